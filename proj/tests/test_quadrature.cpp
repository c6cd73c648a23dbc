#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "quadrature.hpp"

#include <cmath>

using namespace jdlab;

TEST_CASE("adaptive rule resolves smooth integrands to tolerance") {
    const double v = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12).value;
    CHECK(v == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));

    const double w =
        integrate([](double x) { return std::cos(10.0 * x); }, 0.0, 1.0, 1e-12).value;
    CHECK(w == doctest::Approx(std::sin(10.0) / 10.0).epsilon(1e-11));
}

TEST_CASE("adaptive rule handles integrable endpoint spikes") {
    // |x|^(-1/2) near 0 from the right
    const double v =
        integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-8, 20000).value;
    CHECK(v == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("non-convergence raises with the achieved tolerance") {
    bool threw = false;
    try {
        // tolerance unreachable within the interval budget
        integrate([](double x) { return std::sin(1.0 / (x + 1e-12)); }, 0.0, 1.0, 1e-15, 8);
    } catch (const NumericError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("achieved") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("gauss-legendre is exact on polynomials of matching degree") {
    // degree 2n-1 exactness
    const double v = integrate_gl([](double x) { return 5 * x * x * x * x; }, -1.0, 1.0, 8);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
    const GaussRule& r = gauss_legendre(32);
    double mass = 0.0;
    for (double w : r.w) mass += w;
    CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("prefix integral is fourth order") {
    const int n = 401;
    const double h = 2.0 / (n - 1);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + i * h;
        y[i] = std::exp(x);
    }
    const auto p = prefix_integral(y, h);
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + i * h;
        CHECK(p[i] == doctest::Approx(std::exp(x) - std::exp(-1.0)).epsilon(1e-9));
    }
}
