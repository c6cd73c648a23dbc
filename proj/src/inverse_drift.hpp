#pragma once

#include "kernel.hpp"
#include "levy.hpp"
#include "simulate.hpp"

#include <functional>
#include <string>
#include <vector>

namespace jdlab {

// Tail-envelope constants attached to a target density: growth bound
// f(y±z) <= c1_hat exp(eps|z|) f(y), tail-ratio bound c2_hat, log-slope
// bound eps_tilde beyond radius R, derivative bounds c3_hat and c4_hat.
struct EnvelopeConstants {
    double c1_hat = 0.0;
    double eps = 0.0;
    double c2_hat = 0.0;
    double c3_hat = 0.0;
    double c4_hat = 0.0;
    double eps_tilde = 0.0;
    double R = 0.0;
};

// Analytic scalar target density with two derivatives. validate() enforces
// positivity, unit mass (1e-6 by quadrature) and finite-difference
// consistency of the supplied derivatives (1e-4 relative on a grid).
struct DensitySpec {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
    EnvelopeConstants env;
    std::string name;

    void validate() const;
};

// N(0, variance), with envelope constants left zero: it intentionally
// fails the growth conditions and exists for formula checks.
DensitySpec gaussian_density(double variance);

// Tabulated drift with linear interpolation inside the grid and constant
// extension beyond it.
struct DriftFunction {
    double lo = 0.0;
    double step = 0.0;
    std::vector<double> values;
    double sup_norm = 0.0;
    double lipschitz_estimate = 0.0;

    double operator()(double x) const;
};

struct DriftGrid {
    double lo = -30.0;
    double hi = 30.0;
    double step = 0.01;
};

// Adjoint of the jump part of the generator applied to f at x:
//   integral of [f(x - gamma z) - f(x) + gamma z f'(x)] F(z) dz,
// adaptive quadrature to 1e-10 absolute.
double adjoint_jump_apply(const DensitySpec& f, double gamma, const LevyMeasure& levy,
                          double x);

// Drift that makes f stationary for the constant-coefficient dynamics
// (a, gamma, F):
//   b(x) = (a^2 f'(x)/2 + J(x) - [x >= 0] J_inf) / f(x),
// where J is the running integral of the adjoint jump term. The two
// one-sided forms must agree at 0 (|J_inf| small); a mismatch beyond 1e-6
// signals a quadrature or density defect and raises.
DriftFunction build_drift(const DensitySpec& f, double a, double gamma,
                          const LevyMeasure& levy, const DriftGrid& grid);

// Mass balance of the stationarity identity: quadrature of
// a^2 f''/2 + adjoint term over the line (should vanish).
double stationarity_balance(const DensitySpec& f, double a, double gamma,
                            const LevyMeasure& levy);

struct ConditionVerdict {
    std::string name;
    bool pass = false;
    double worst_point = 0.0;
    double margin = 0.0; // positive margin = satisfied with room
    std::string detail;
};

struct ConditionReport {
    std::vector<ConditionVerdict> conditions; // exactly five
    EnvelopeConstants used;
    bool all_pass() const {
        for (const auto& c : conditions)
            if (!c.pass) return false;
        return true;
    }
};

// Numerical audit of the five requirements the construction rests on:
// vanishing tails, the exponential growth bound, the tail-ratio bounds,
// the log-slope condition with its constant gate, and the second
// derivative bound.
ConditionReport audit_proposition_conditions(const DensitySpec& f, double a, double gamma,
                                             const LevyMeasure& levy);

struct RoundtripReport {
    std::vector<double> grid;
    std::vector<double> mu_hat;   // ensemble mean estimate
    std::vector<double> se;       // per-point Monte Carlo standard error
    std::vector<double> f_target;
    double sup_error = 0.0;
    double max_se = 0.0;
};

// Simulates the inverted model and compares the estimated stationary
// density against the target on a grid.
RoundtripReport roundtrip_invariance(const DensitySpec& f, const DriftFunction& b, double a,
                                     double gamma, const LevyMeasure& levy,
                                     const SimConfig& sim_cfg, int n_rep,
                                     const KernelSpec& kernel, double grid_lo, double grid_hi,
                                     double grid_step, int workers = 0);

// Wraps a tabulated drift into a simulable one-dimensional model.
ModelSpec model_from_drift(const DriftFunction& b, double a, double gamma,
                           const LevyMeasure& levy, const std::string& id);

void drift_to_csv(const DriftFunction& b, const std::string& filename);

} // namespace jdlab
