#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "hypotheses.hpp"
#include "inverse_drift.hpp"
#include "philox.hpp"
#include "stats.hpp"

#include <cmath>

using namespace jdlab;

namespace {

DensitySpec sech2_density() {
    DensitySpec d;
    d.f = [](double x) {
        const double c = std::cosh(x);
        return 0.5 / (c * c);
    };
    d.df = [](double x) {
        const double s = 1.0 / std::cosh(x);
        return -s * s * std::tanh(x);
    };
    d.d2f = [](double x) {
        const double s2 = 1.0 / (std::cosh(x) * std::cosh(x));
        const double t = std::tanh(x);
        return 2.0 * s2 * t * t - s2 * s2;
    };
    d.name = "sech2";
    d.validate();
    return d;
}

} // namespace

TEST_CASE("adjoint term vanishes without jumps") {
    const DensitySpec f0 = to_density_spec(build_f0(0.25, 1, nullptr));
    const LevyMeasure none = LevyMeasure::none(1);
    for (double x : {-3.0, 0.0, 1.2}) CHECK(adjoint_jump_apply(f0, 1.0, none, x) == 0.0);
}

TEST_CASE("adjoint map of an even density under symmetric marks is even") {
    const DensitySpec f0 = to_density_spec(build_f0(0.25, 1, nullptr));
    const auto levy = LevyMeasure::compound_poisson_gauss(1, 0.5, {0.4, 0.4}, 0.5, 0.3);
    for (double x : {0.4, 1.3, 2.8}) {
        const double plus = adjoint_jump_apply(f0, 1.0, levy, x);
        const double minus = adjoint_jump_apply(f0, 1.0, levy, -x);
        CHECK(plus == doctest::Approx(minus).epsilon(1e-8));
    }
}

TEST_CASE("adjoint term matches a Monte Carlo oracle") {
    // independent oracle: sample the mark law directly and average the
    // same bracket the quadrature integrates
    DensitySpec g = gaussian_density(0.5);
    const double lambda = 0.7, sigma = 0.6, gamma = 1.0;
    const auto levy = LevyMeasure::compound_poisson_gauss(1, lambda, {sigma, sigma}, 0.5, 0.3);
    for (double x : {0.0, 0.9}) {
        const double quad = adjoint_jump_apply(g, gamma, levy, x);
        RandomStream rng(derive_key(2718281, x < 0.5 ? 0 : 1), 0);
        const std::size_t n = 10000000;
        double acc = 0.0, acc2 = 0.0;
        const double fx = g.f(x), dfx = g.df(x);
        for (std::size_t i = 0; i < n; ++i) {
            const double z = sigma * rng.normal();
            const double v = g.f(x - gamma * z) - fx + gamma * z * dfx;
            acc += v;
            acc2 += v * v;
        }
        const double mc = lambda * acc / n;
        const double se = lambda * std::sqrt((acc2 / n - (acc / n) * (acc / n)) / n);
        CHECK(std::fabs(quad - mc) <= 4.0 * se);
    }
}

TEST_CASE("adjoint scales linearly in the jump intensity") {
    const DensitySpec f0 = to_density_spec(build_f0(0.25, 1, nullptr));
    const auto base = LevyMeasure::compound_poisson_gauss(1, 0.4, {0.5, 0.5}, 0.5, 0.3);
    const auto twice = LevyMeasure::compound_poisson_gauss(1, 0.8, {0.5, 0.5}, 0.5, 0.3);
    for (double x : {-1.0, 0.3, 2.0}) {
        const double one = adjoint_jump_apply(f0, 1.0, base, x);
        const double two = adjoint_jump_apply(f0, 1.0, twice, x);
        CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-7));
    }
}

TEST_CASE("no-jump gaussian target inverts to the linear pullback drift") {
    DensitySpec g = gaussian_density(0.5); // stationary law of b(x) = -x with a = 1
    DriftGrid grid;
    grid.lo = -10.0;
    grid.hi = 10.0;
    grid.step = 0.01;
    const DriftFunction b = build_drift(g, 1.0, 1.0, LevyMeasure::none(1), grid);
    for (std::size_t i = 0; i < b.values.size(); ++i) {
        const double x = b.lo + i * b.step;
        CHECK(std::fabs(b.values[i] - (-x)) <= 1e-8);
    }
}

TEST_CASE("no-jump base-density target has saturated tail drift") {
    const double eta = 0.25, a = 1.0;
    const DensitySpec f0 = to_density_spec(build_f0(eta, 1, nullptr));
    DriftGrid grid; // default [-30, 30] step 0.01
    const DriftFunction b = build_drift(f0, a, 1.0, LevyMeasure::none(1), grid);
    // beyond R = 1/eta the log-slope is exactly -eta, so b = -a^2 eta/2 sgn(x)
    for (double x : {4.5, 7.0, 20.0}) {
        CHECK(b(x) == doctest::Approx(-0.5 * a * a * eta).epsilon(1e-10));
        CHECK(b(-x) == doctest::Approx(0.5 * a * a * eta).epsilon(1e-10));
    }
    CHECK(b.sup_norm <= 0.5 * a * a * eta + 1e-10);
}

TEST_CASE("inverted drift is antisymmetric for even targets and symmetric marks") {
    const DensitySpec f0 = to_density_spec(build_f0(0.25, 1, nullptr));
    const auto levy = LevyMeasure::compound_poisson_gauss(1, 0.008, {0.3, 0.3}, 0.5, 0.3);
    DriftGrid grid;
    grid.lo = -12.0;
    grid.hi = 12.0;
    grid.step = 0.01;
    const DriftFunction b = build_drift(f0, 1.0, 1.0, levy, grid);
    for (double x : {0.5, 1.0, 3.3, 8.0}) {
        CHECK(b(x) == doctest::Approx(-b(-x)).epsilon(1e-7));
    }
}

TEST_CASE("stationarity mass balance closes") {
    const DensitySpec f0 = to_density_spec(build_f0(0.25, 1, nullptr));
    const auto levy = LevyMeasure::compound_poisson_gauss(1, 0.008, {0.3, 0.3}, 0.5, 0.3);
    CHECK(std::fabs(stationarity_balance(f0, 1.0, 1.0, levy)) <= 1e-8);
}

TEST_CASE("condition audit passes the base density with its stated constants") {
    const DensitySpec f0 = to_density_spec(build_f0(0.25, 1, nullptr));
    const auto levy = LevyMeasure::compound_poisson_gauss(1, 0.008, {0.3, 0.3}, 0.5, 0.3);
    REQUIRE(check_c4_condition(1.0, 1.0, levy.c4()));
    const ConditionReport rep = audit_proposition_conditions(f0, 1.0, 1.0, levy);
    for (const auto& c : rep.conditions) {
        INFO(c.name, ": ", c.detail);
        CHECK(c.pass);
    }
}

TEST_CASE("gaussian targets break the growth bound") {
    DensitySpec g = gaussian_density(0.5);
    g.env.c1_hat = 4.0;
    g.env.eps = 0.25;
    g.env.c2_hat = 16.0;
    g.env.c3_hat = 7.0;
    g.env.c4_hat = 28.0;
    g.env.eps_tilde = 0.25;
    g.env.R = 4.0;
    const auto levy = LevyMeasure::compound_poisson_gauss(1, 0.008, {0.3, 0.3}, 0.5, 0.3);
    const ConditionReport rep = audit_proposition_conditions(g, 1.0, 1.0, levy);
    REQUIRE(rep.conditions.size() == 5);
    CHECK_FALSE(rep.conditions[1].pass); // growth bound
}

TEST_CASE("an oversized exponential-moment constant fails the gate") {
    const DensitySpec f0 = to_density_spec(build_f0(0.25, 1, nullptr));
    // intensity 1 puts c4 near 2.5, far above a^2/896
    const auto levy = LevyMeasure::compound_poisson_gauss(1, 1.0, {1.0, 1.0}, 0.5, 0.5);
    CHECK_FALSE(check_c4_condition(1.0, 1.0, levy.c4()));
    const ConditionReport rep = audit_proposition_conditions(f0, 1.0, 1.0, levy);
    CHECK_FALSE(rep.conditions[3].pass); // log-slope constant gate
}

TEST_CASE("roundtrip: simulated stationary law hugs the target") {
    DensitySpec target = sech2_density();
    DriftGrid grid;
    grid.lo = -15.0;
    grid.hi = 15.0;
    grid.step = 0.01;
    const DriftFunction b = build_drift(target, 1.0, 1.0, LevyMeasure::none(1), grid);
    SimConfig sim;
    sim.horizon = 2000.0;
    sim.dt = 0.005;
    sim.burn_in = 10.0;
    sim.seed = 77;
    const RoundtripReport rep = roundtrip_invariance(
        target, b, 1.0, 1.0, LevyMeasure::none(1), sim, 12, build_kernel(1), -3.0, 3.0, 0.5);
    CHECK(rep.sup_error <= 4.0 * rep.max_se);
    CHECK(rep.max_se > 0.0);
}

TEST_CASE("roundtrip with an empty simulation window errors") {
    DensitySpec target = sech2_density();
    DriftGrid grid;
    grid.lo = -5.0;
    grid.hi = 5.0;
    grid.step = 0.05;
    const DriftFunction b = build_drift(target, 1.0, 1.0, LevyMeasure::none(1), grid);
    SimConfig sim;
    sim.horizon = 0.0;
    sim.seed = 1;
    CHECK_THROWS_AS(roundtrip_invariance(target, b, 1.0, 1.0, LevyMeasure::none(1), sim, 8,
                                         build_kernel(1), -2.0, 2.0, 0.5),
                    ValidationError);
}

TEST_CASE("drift table interpolates and extends by its boundary values") {
    DriftFunction b;
    b.lo = 0.0;
    b.step = 1.0;
    b.values = {1.0, 3.0, 5.0};
    CHECK(b(0.5) == doctest::Approx(2.0));
    CHECK(b(-10.0) == 1.0);
    CHECK(b(10.0) == 5.0);
}
