#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "hypotheses.hpp"
#include "quadrature.hpp"
#include "smooth_profile.hpp"

#include <cmath>

using namespace jdlab;

TEST_CASE("piecewise reference shape hits its landmark values") {
    CHECK(piecewise_shape(0.0) == 1.0);
    CHECK(piecewise_shape(0.5) == 1.0);
    CHECK(piecewise_shape(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(piecewise_shape(-0.75) == doctest::Approx(std::exp(-4.0 * 0.25 * 0.25)));
}

TEST_CASE("smooth profile stays inside the stated bands") {
    const SmoothProfile& f = smooth_profile();
    CHECK(f.envelope_margin() <= 0.0);
    for (int i = 0; i <= 4000; ++i) {
        const double u = i * 0.005;
        const double e = std::exp(-u);
        CHECK(f.value(u) >= 0.5 * e);
        CHECK(f.value(u) <= 2.0 * e);
        CHECK(std::fabs(f.deriv(u)) <= 5.0 * e);
        CHECK(std::fabs(f.second_deriv(u)) <= 14.0 * e);
    }
}

TEST_CASE("smooth profile tail is exactly exponential") {
    const SmoothProfile& f = smooth_profile();
    for (double u : {1.0, 1.5, 3.0, 10.0}) {
        CHECK(f.value(u) == doctest::Approx(std::exp(0.5 - u)).epsilon(1e-12));
        CHECK(f.deriv(u) / f.value(u) == doctest::Approx(-1.0).epsilon(1e-12));
    }
    // flat start: derivative vanishes identically near the origin
    CHECK(f.deriv(0.0) == 0.0);
    CHECK(f.deriv(1e-4) == 0.0);
}

TEST_CASE("profile derivatives agree with finite differences") {
    const SmoothProfile& f = smooth_profile();
    for (double u : {0.2, 0.5, 0.7, 0.9, 1.5}) {
        const double fd1 = (f.value(u + 1e-6) - f.value(u - 1e-6)) / 2e-6;
        const double fd2 =
            (f.value(u + 1e-5) - 2 * f.value(u) + f.value(u - 1e-5)) / 1e-10;
        CHECK(f.deriv(u) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(f.second_deriv(u) == doctest::Approx(fd2).epsilon(1e-4));
    }
}

TEST_CASE("base density normalises and is even") {
    const BaseDensity b = build_f0(0.25, 1, nullptr);
    const double mass =
        integrate([&](double y) { return b.value(&y); }, -200.0, 200.0, 1e-9).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    for (double y : {0.3, 1.7, 4.0, 9.5}) {
        const double yp = y, ym = -y;
        CHECK(b.value(&yp) == b.value(&ym));
    }
}

TEST_CASE("base density respects the envelope bands after scaling") {
    const BaseDensity b = build_f0(0.25, 1, nullptr);
    for (int i = 0; i <= 400; ++i) {
        const double y = -20.0 + 0.1 * i;
        const double e = std::exp(-0.25 * std::fabs(y));
        CHECK(b.value(&y) >= 0.5 * b.c_eta * e);
        CHECK(b.value(&y) <= 2.0 * b.c_eta * e);
    }
}

TEST_CASE("two-dimensional base density uses per-axis inverse scales") {
    const std::array<double, 4> aaT{2.0, 0.0, 0.0, 0.5};
    const BaseDensity b = build_f0(0.2, 2, aaT.data());
    CHECK(b.axis_scale[0] == doctest::Approx(0.2 * 0.5));  // (aaT)^{-1}_{11} = 1/2
    CHECK(b.axis_scale[1] == doctest::Approx(0.2 * 2.0));  // (aaT)^{-1}_{22} = 2
    CHECK(b.k_max == doctest::Approx(2.0));
    const int n = 256;
    const GaussRule& rule = gauss_legendre(n);
    const double R = 300.0;
    double mass = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x[2] = {R * rule.x[i], R * rule.x[j]};
            mass += rule.w[i] * rule.w[j] * b.value(x);
        }
    mass *= R * R;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("eta outside (0, 1/2) is rejected") {
    CHECK_THROWS_AS(build_f0(0.0, 1, nullptr), ValidationError);
    CHECK_THROWS_AS(build_f0(0.5, 1, nullptr), ValidationError);
    CHECK_THROWS_AS(build_f0(-0.1, 2, nullptr), ValidationError);
}

TEST_CASE("density-spec view validates and carries the audited constants") {
    const DensitySpec d = to_density_spec(build_f0(0.25, 1, nullptr));
    CHECK(d.env.c1_hat == 4.0);
    CHECK(d.env.eps == 0.25);
    CHECK(d.env.c2_hat == doctest::Approx(16.0));
    CHECK(d.env.c3_hat == doctest::Approx(7.0));
    CHECK(d.env.c4_hat == 28.0);
    CHECK(d.env.eps_tilde == 0.25);
    CHECK(d.env.R == doctest::Approx(4.0));
    // tail log-slope equals -eta exactly beyond R
    for (double y : {4.1, 6.0, 12.0}) {
        CHECK(d.df(y) / d.f(y) == doctest::Approx(-0.25).epsilon(1e-12));
        CHECK(d.df(-y) / d.f(-y) == doctest::Approx(0.25).epsilon(1e-12));
    }
}
