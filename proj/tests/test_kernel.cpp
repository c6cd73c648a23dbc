#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"

#include <cmath>

using namespace jdlab;

TEST_CASE("order 1 solves to the parabolic kernel") {
    // moment system: integral (1-x^2) c0 = 1  =>  c0 = 3/4
    const KernelSpec k = build_kernel(1);
    REQUIRE(k.coeffs.size() == 1);
    CHECK(k.coeffs[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(k(0.5) == doctest::Approx(0.75 * (1.0 - 0.25)).epsilon(1e-14));
    CHECK(k.sup_norm == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("order 3 solves the two-moment system") {
    // (4/3) c0 + (4/15) c1 = 1 and (4/15) c0 + (4/35) c1 = 0
    // => c0 = 45/32, c1 = -105/32
    const KernelSpec k = build_kernel(3);
    REQUIRE(k.coeffs.size() == 2);
    CHECK(k.coeffs[0] == doctest::Approx(45.0 / 32.0).epsilon(1e-12));
    CHECK(k.coeffs[1] == doctest::Approx(-105.0 / 32.0).epsilon(1e-12));
}

TEST_CASE("vanishing moments hold to quadrature accuracy") {
    for (int M : {1, 2, 3, 4, 5, 6, 7}) {
        const KernelSpec k = build_kernel(M);
        CHECK(std::fabs(k.moment(0) - 1.0) <= 1e-10);
        for (int i = 1; i <= M; ++i) CHECK(std::fabs(k.moment(i)) <= 1e-10);
        // odd moments vanish beyond the order too, by symmetry
        CHECK(std::fabs(k.moment(2 * M + 1)) <= 1e-10);
        CHECK(k(1.0) == 0.0);
        CHECK(k(-1.2) == 0.0);
        CHECK(std::isfinite(k.sup_norm));
    }
}

TEST_CASE("bump: unit peak, zero mass, compact support, flat edges") {
    const BumpSpec b = build_bump();
    CHECK(b(0.0) == 1.0);
    CHECK(std::fabs(b.mass()) <= 1e-10);
    CHECK(b(1.0) == 0.0);
    CHECK(b(-1.000001) == 0.0);
    CHECK(b(0.999999) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(b.sup_norm == doctest::Approx(1.0).epsilon(1e-9));
    // finite-difference check of the supplied derivative
    for (double x : {-0.8, -0.3, 0.2, 0.6, 0.95}) {
        const double fd = (b(x + 1e-6) - b(x - 1e-6)) / 2e-6;
        CHECK(b.deriv(x) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("default bandwidth rules") {
    CHECK(default_bandwidth(10000.0, 1)[0] == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(default_bandwidth(1.0, 1)[0] == 1.0);
    const auto h2 = default_bandwidth(std::exp(1.0), 2);
    CHECK(h2[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(h2[1] == h2[0]);
    CHECK_THROWS_AS(default_bandwidth(0.5, 1), ValidationError);
    CHECK_THROWS_AS(default_bandwidth(1.0, 2), ValidationError);
}

namespace {

PathRecord constant_path(double x0, std::size_t n, double dt) {
    PathRecord p;
    p.dim = 1;
    p.dt = dt;
    p.states.assign(n, x0);
    return p;
}

} // namespace

TEST_CASE("estimate at the state of a constant record is K(0)/h") {
    const KernelSpec k = build_kernel(1);
    const PathRecord p = constant_path(2.0, 1001, 0.01);
    const std::array<double, 2> h{0.05, 0.0};
    const double x = 2.0;
    CHECK(estimate_density_at(p, k, h, &x) == doctest::Approx(k(0.0) / 0.05).epsilon(1e-12));

    // farther than h from every state: exactly zero
    const double far = 2.0 + 0.05001;
    CHECK(estimate_density_at(p, k, h, &far) == 0.0);
}

TEST_CASE("estimator is linear in the occupation measure") {
    // two equal-length records vs their concatenation
    const KernelSpec k = build_kernel(1);
    const std::size_t n = 2000;
    const double dt = 0.01;
    PathRecord a, b, ab;
    a.dim = b.dim = ab.dim = 1;
    a.dt = b.dt = ab.dt = dt;
    for (std::size_t i = 0; i < n; ++i) {
        a.states.push_back(std::sin(0.05 * i));
        b.states.push_back(std::cos(0.07 * i));
    }
    ab.states = a.states;
    ab.states.insert(ab.states.end(), b.states.begin(), b.states.end());
    const std::array<double, 2> h{0.2, 0.0};
    const double x = 0.3;
    const double lhs = estimate_density_at(ab, k, h, &x);
    const double rhs =
        0.5 * (estimate_density_at(a, k, h, &x) + estimate_density_at(b, k, h, &x));
    // Agreement up to the two boundary cells the concatenation rewires.
    const double cell = k.sup_norm / h[0] * dt / (n * dt);
    CHECK(std::fabs(lhs - rhs) <= 4.0 * cell);
}

TEST_CASE("nonnegative kernel integrates to one over a covering grid") {
    const KernelSpec k = build_kernel(1);
    PathRecord p;
    p.dim = 1;
    p.dt = 0.01;
    for (int i = 0; i <= 5000; ++i) p.states.push_back(std::sin(0.01 * i) * 2.0);
    const std::array<double, 2> h{0.1, 0.0};
    double mass = 0.0;
    const double step = 0.01;
    for (double x = -2.5; x <= 2.5; x += step) {
        const double v = estimate_density_at(p, k, h, &x);
        CHECK(v >= 0.0);
        mass += v * step;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("estimate_density validates bandwidths and path size") {
    const KernelSpec k = build_kernel(1);
    PathRecord p = constant_path(0.0, 10, 0.01);
    EstimateConfig cfg;
    cfg.eval_points = {{0.0, 0.0}};
    cfg.bandwidth = {0.0, 0.0};
    CHECK_THROWS_AS(estimate_density(p, k, cfg), ValidationError);
    cfg.bandwidth = {1.5, 0.0};
    CHECK_THROWS_AS(estimate_density(p, k, cfg), ValidationError);
    cfg.bandwidth = {0.5, 0.0};
    PathRecord short_path = constant_path(0.0, 1, 0.01);
    CHECK_THROWS_AS(estimate_density(short_path, k, cfg), ValidationError);
}
