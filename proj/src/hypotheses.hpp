#pragma once

#include "inverse_drift.hpp"
#include "kernel.hpp"
#include "levy.hpp"

#include <array>
#include <vector>

namespace jdlab {

// Base density built from the smooth exponential-tail profile:
//   d=1:  f0(y) = c_eta * profile(eta |y|)
//   d=2:  f0(x) = c_eta * profile(eta k1 |x1|) * profile(eta k2 |x2|),
// with k_i the diagonal entries of (a a^T)^{-1} and c_eta the normaliser.
struct BaseDensity {
    double eta = 0.0;
    int dim = 1;
    double c_eta = 0.0;
    std::array<double, 2> axis_scale{1.0, 1.0}; // eta * k_i premultipliers / eta
    std::array<double, 4> aaT{1.0, 0.0, 0.0, 1.0};
    double k_max = 1.0; // max_i (aaT)^{-1}_{ii} in d=2, 1 in d=1

    double value(const double* x) const;
    double axis_value(int axis, double t) const;  // p_i(t)
    double axis_deriv(int axis, double t) const;  // p_i'(t)
    double axis_second(int axis, double t) const; // p_i''(t)
};

// aaT may be null in dimension one (identity assumed).
BaseDensity build_f0(double eta, int dim, const double* aaT);

// View of a one-dimensional base density as a drift-inversion target,
// envelope constants filled with the audited values
// (c1=4, eps=eta, c2=4/eta, c3=28 eta, c4=28, eps_tilde=eta, R=1/eta).
DensitySpec to_density_spec(const BaseDensity& base);

// Two-hypothesis family in dimension one: {f0, f0 + bump/M_T}.
struct HypothesisFamilyD1 {
    BaseDensity base;
    BumpSpec bump;
    double x0 = 0.0;
    double H = 0.25;
    double M_T = 0.0;

    double f0(double x) const { return base.value(&x); }
    double f1(double x) const;
    double girsanov_budget(double T) const { return T / (M_T * M_T * H); }
};

// Gate: 1/M_T <= gate_eps * H^beta, plus bump positivity against f0.
HypothesisFamilyD1 build_family_d1(const BaseDensity& base, const BumpSpec& bump, double x0,
                                   double H, double M_T, double gate_eps, double beta);

// Perturbation grid in dimension two: centres x_j = (2 j1 H1, 2 j2 H2) for
// j in {1..floor(1/sqrt(H1))} x {1..floor(1/sqrt(H2))}, each carrying a
// product bump of amplitude 2 v sqrt(log T / T).
struct HypothesisFamilyD2 {
    BaseDensity base;
    BumpSpec bump;
    double H1 = 0.0, H2 = 0.0;
    double v = 0.0;
    double T = 0.0;
    int n1 = 0, n2 = 0; // index ranges
    double amplitude = 0.0; // 2 v sqrt(log T / T)
    double psi = 0.0;       // v sqrt(log T / T)

    int count() const { return n1 * n2; }
    std::array<double, 2> center(int j1, int j2) const {
        return {2.0 * j1 * H1, 2.0 * j2 * H2};
    }
    double f0(const double* x) const { return base.value(x); }
    double perturbation(int j1, int j2, const double* x) const; // f_j - f0
    double fj(int j1, int j2, const double* x) const;
};

HypothesisFamilyD2 build_family_d2(const BaseDensity& base, const BumpSpec& bump, double H1,
                                   double H2, double v, double T, double gate_eps,
                                   std::array<double, 2> beta);

struct KlRow {
    int j1 = 0, j2 = 0;
    double entropy_term = 0.0;
    double entropy_bound = 0.0;
    double girsanov_term = 0.0; // T * integral |a^{-1}(b0-bj)|^2 f0
    double prop_bound = 0.0;    // matching closed-form cap on the same quantity
    double kl = 0.0;
    double ratio_to_log_JT = 0.0;
};

// Shared quadrature state for the divergence computations of one family:
// the unperturbed drift b0 and the per-axis bump transforms, all reduced
// to one-dimensional tables thanks to the product structure. Requires a
// diagonal jump coefficient and a product symmetric mark law.
class LowerBoundMachinery {
public:
    LowerBoundMachinery(const HypothesisFamilyD2& family, std::array<double, 4> a,
                        std::array<double, 2> gamma_diag, const LevyMeasure& levy);

    const HypothesisFamilyD2& family() const { return family_; }

    // b0 and b_j - b0, componentwise
    void b0(const double* x, double* out) const;
    void drift_difference(int j1, int j2, const double* x, double* out) const;

    KlRow kl_terms(int j1, int j2) const;
    std::vector<KlRow> kl_all() const;

private:
    double mark_density(int axis, double s) const; // law of gamma_ii * z_i
    double conv_p(int axis, double t) const;   // (p * q)(t), mark-smoothed axis density
    double G_p(int axis, double t) const;      // running integral of conv_p - p
    double conv_bump(int axis, double t) const; // (bump_H * q)(t), centred
    double G_bump(int axis, double t) const;
    double bump_prefix(double u) const;

    HypothesisFamilyD2 family_;
    std::array<double, 4> a_;
    std::array<double, 4> a_inv_;
    std::array<double, 2> gamma_;
    const LevyMeasure* levy_;
    double rate_ = 0.0;                 // total jump intensity
    std::array<double, 2> mark_sd_{0, 0}; // std dev of gamma_ii * z_i
    std::array<double, 2> tail_mult_{1, 1}; // E exp(-eta k s) on each axis

    double table_lo_ = 0.0, table_step_ = 0.0;
    std::array<std::vector<double>, 2> conv_p_tab_;
    std::array<std::vector<double>, 2> G_p_tab_;
    double tail_edge_ = 0.0; // |t| beyond which the analytic tail form is used

    std::vector<double> bump_prefix_tab_; // antiderivative of the bump on [-1,1]
    double bump_prefix_step_ = 0.0;
};

void kl_rows_to_csv(const std::vector<KlRow>& rows, const std::string& filename);

} // namespace jdlab
