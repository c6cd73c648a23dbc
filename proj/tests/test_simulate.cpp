#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "kernel.hpp"
#include "simulate.hpp"
#include "stats.hpp"

#include <cmath>

using namespace jdlab;

namespace {

ModelSpec zero_dynamics(double x0) {
    ModelSpec m;
    m.dim = 1;
    m.id = "still";
    m.drift = [](const double*, double* out) { out[0] = 0.0; };
    m.diffusion = [](const double*, double* out) { out[0] = 0.0; };
    m.jump_coeff = [](const double*, double* out) { out[0] = 1.0; };
    m.levy = LevyMeasure::none(1);
    m.x0 = {x0, 0.0};
    m.constant_coeffs = true;
    return m;
}

} // namespace

TEST_CASE("all-zero dynamics give a constant record") {
    SimConfig cfg;
    cfg.horizon = 5.0;
    cfg.dt = 0.01;
    cfg.burn_in = 1.0;
    cfg.seed = 3;
    const PathRecord p = simulate_path(zero_dynamics(1.5), cfg);
    CHECK(p.size() == 501);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(p.states[k] == 1.5);
    CHECK(p.horizon() == doctest::Approx(5.0));
}

TEST_CASE("linear pullback drift reaches its stationary spread") {
    SimConfig cfg;
    cfg.horizon = 2000.0;
    cfg.dt = 0.005;
    cfg.burn_in = 10.0;
    cfg.seed = 1;
    const PathRecord p = simulate_path(catalogue("ou_d1"), cfg);
    const double var = sample_variance(p.states);
    CHECK(std::fabs(var - 0.5) < 0.02);
}

TEST_CASE("compensated symmetric jumps leave a zero-mean martingale") {
    ModelSpec m = zero_dynamics(0.0);
    m.id = "pure_jump";
    m.levy = LevyMeasure::compound_poisson_gauss(1, 2.0, {1.0, 1.0}, 0.5, 0.5);
    SimConfig cfg;
    cfg.horizon = 1.0;
    cfg.dt = 0.01;
    cfg.burn_in = 0.0;
    cfg.seed = 11;
    const int n_rep = 10000;
    std::vector<double> ends(n_rep);
    ensemble_apply(m, cfg, n_rep, 0,
                   [&](int r, const PathRecord& p) { ends[r] = p.states.back(); });
    const double m_end = mean(ends);
    const double se = std::sqrt(sample_variance(ends) / n_rep);
    CHECK(std::fabs(m_end) <= 3.0 * se);
}

TEST_CASE("ensembles are bit-identical across worker counts and reruns") {
    const ModelSpec& m = catalogue("tanh_cpois_d1");
    SimConfig cfg;
    cfg.horizon = 20.0;
    cfg.dt = 0.01;
    cfg.burn_in = 2.0;
    cfg.seed = 42;
    const auto e1 = simulate_ensemble(m, cfg, 16, 1);
    const auto e8 = simulate_ensemble(m, cfg, 16, 8);
    const auto e8b = simulate_ensemble(m, cfg, 16, 8);
    REQUIRE(e1.size() == e8.size());
    for (std::size_t r = 0; r < e1.size(); ++r) {
        CHECK(e1[r].states == e8[r].states);
        CHECK(e1[r].states == e8b[r].states);
    }
}

TEST_CASE("single replication equals the derived-stream path") {
    const ModelSpec& m = catalogue("ou_cpois_d1");
    SimConfig cfg;
    cfg.horizon = 10.0;
    cfg.dt = 0.01;
    cfg.burn_in = 1.0;
    cfg.seed = 99;
    const auto ensemble = simulate_ensemble(m, cfg, 1, 4);
    const PathRecord solo = simulate_path(m, cfg);
    CHECK(ensemble[0].states == solo.states);
}

TEST_CASE("ensemble mean of the terminal state sits at the origin") {
    const ModelSpec& m = catalogue("ou_d1");
    SimConfig cfg;
    cfg.horizon = 20.0;
    cfg.dt = 0.01;
    cfg.burn_in = 5.0;
    cfg.seed = 7;
    const int n_rep = 500;
    std::vector<double> ends(n_rep);
    ensemble_apply(m, cfg, n_rep, 0,
                   [&](int r, const PathRecord& p) { ends[r] = p.states.back(); });
    const double se = std::sqrt(sample_variance(ends) / n_rep);
    CHECK(std::fabs(mean(ends)) <= 3.0 * se);
}

TEST_CASE("jump counts concentrate around intensity times horizon") {
    const ModelSpec& m = catalogue("tanh_cpois_d1"); // intensity 1
    SimConfig cfg;
    cfg.horizon = 50.0;
    cfg.dt = 0.01;
    cfg.burn_in = 0.0;
    cfg.seed = 5;
    const int n_rep = 200;
    std::vector<double> counts(n_rep);
    ensemble_apply(m, cfg, n_rep, 0, [&](int r, const PathRecord& p) {
        counts[r] = static_cast<double>(p.n_jumps);
    });
    const double lamT = 50.0;
    const double t_stat = (mean(counts) - lamT) / std::sqrt(sample_variance(counts) / n_rep);
    CHECK(std::fabs(t_stat) <= 4.0);
}

TEST_CASE("post burn-in record is time-shift stationary") {
    SimConfig cfg;
    cfg.horizon = 4000.0;
    cfg.dt = 0.01;
    cfg.burn_in = 10.0;
    cfg.seed = 21;
    const PathRecord p = simulate_path(catalogue("tanh_cpois_d1"), cfg);
    const std::size_t half = p.size() / 2;
    std::vector<double> first(p.states.begin(), p.states.begin() + half);
    std::vector<double> second(p.states.begin() + half, p.states.end());
    const double m1 = mean(first), m2 = mean(second);
    const double se = std::hypot(batch_means_se(first), batch_means_se(second));
    CHECK(std::fabs(m1 - m2) <= 4.0 * se);
}

TEST_CASE("halving dt moves the density estimate by less than its MC error") {
    const ModelSpec& m = catalogue("tanh_cpois_d1");
    const KernelSpec kernel = build_kernel(1);
    const double x = 0.0;
    const int n_rep = 32;
    auto run = [&](double dt) {
        SimConfig cfg;
        cfg.horizon = 500.0;
        cfg.dt = dt;
        cfg.burn_in = 10.0;
        cfg.seed = 31;
        std::vector<double> est(n_rep);
        const std::array<double, 2> h = default_bandwidth(cfg.horizon, 1);
        ensemble_apply(m, cfg, n_rep, 0, [&](int r, const PathRecord& p) {
            est[r] = estimate_density_at(p, kernel, h, &x);
        });
        return est;
    };
    const auto coarse = run(0.01);
    const auto fine = run(0.005);
    const double se =
        std::sqrt(sample_variance(coarse) / n_rep + sample_variance(fine) / n_rep);
    CHECK(std::fabs(mean(coarse) - mean(fine)) < se);
}

TEST_CASE("infinite activity requires a cutoff, then simulates") {
    ModelSpec m = catalogue("tanh_d1");
    m.id = "tanh_ts_d1";
    m.levy = LevyMeasure::tempered_stable(0.05, 0.5, 2.0, 0.4);
    SimConfig cfg;
    cfg.horizon = 5.0;
    cfg.dt = 0.01;
    cfg.burn_in = 0.0;
    cfg.seed = 8;
    CHECK_THROWS_AS(simulate_path(m, cfg), ValidationError);
    cfg.small_jump_cutoff = pick_small_jump_cutoff(m.levy);
    CHECK(m.levy.residual_variance(cfg.small_jump_cutoff) <= 1e-4);
    const PathRecord p = simulate_path(m, cfg);
    CHECK(p.size() == 501);
    for (double v : p.states) CHECK(std::isfinite(v));
}

TEST_CASE("blow-up names the failing step") {
    ModelSpec m = zero_dynamics(2.0);
    m.drift = [](const double* x, double* out) { out[0] = x[0] * x[0] * x[0]; };
    SimConfig cfg;
    cfg.horizon = 50.0;
    cfg.dt = 0.05;
    cfg.burn_in = 0.0;
    cfg.seed = 2;
    CHECK_THROWS_WITH_AS(simulate_path(m, cfg), doctest::Contains("blew up at step"),
                         NumericError);
}

TEST_CASE("dimension-two paths have finite coordinates and two columns") {
    SimConfig cfg;
    cfg.horizon = 50.0;
    cfg.dt = 0.01;
    cfg.burn_in = 5.0;
    cfg.seed = 12;
    const PathRecord p = simulate_path(catalogue("ou_cpois_d2"), cfg);
    CHECK(p.dim == 2);
    CHECK(p.states.size() == 2 * p.size());
    double spread0 = 0.0, spread1 = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        spread0 += p.point(k)[0] * p.point(k)[0];
        spread1 += p.point(k)[1] * p.point(k)[1];
    }
    CHECK(spread0 / p.size() > 0.3);
    CHECK(spread1 / p.size() > 0.3);
}

TEST_CASE("config validation rejects bad grids") {
    const ModelSpec& m = catalogue("ou_d1");
    SimConfig cfg;
    cfg.horizon = 1.0;
    cfg.dt = 2.0;
    cfg.seed = 1;
    CHECK_THROWS_AS(simulate_path(m, cfg), ValidationError);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(simulate_path(m, cfg), ValidationError);
    cfg.dt = 0.01;
    cfg.burn_in = -1.0;
    CHECK_THROWS_AS(simulate_path(m, cfg), ValidationError);
}
