#pragma once

#include "kernel.hpp"
#include "model.hpp"
#include "simulate.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace jdlab {

// Where the "true" density value at the evaluation point comes from: the
// model's closed form, or one very long simulated record with the default
// bandwidth, cached on disk keyed by its inputs.
struct ReferenceSpec {
    enum class Mode { ClosedForm, LongRun };
    Mode mode = Mode::ClosedForm;
    double T = 1e6;
    double dt = 0.005;
    std::uint64_t seed = 99991;
    std::string cache_dir; // empty disables caching
};

double reference_density_at(const ModelSpec& spec, const KernelSpec& kernel,
                            const ReferenceSpec& ref, const double* x);

struct RiskRow {
    double T = 0.0;
    double h = 0.0;
    double mse = 0.0;
    double bias2 = 0.0;
    double variance = 0.0;
    double se = 0.0; // Monte Carlo standard error of the mse estimate
    int n_rep = 0;
    double mse_T_over_logT = 0.0; // populated in dimension two
};

struct RiskReport {
    std::string model_id;
    int dim = 1;
    std::array<double, 2> x{0.0, 0.0};
    double reference = 0.0;
    std::vector<RiskRow> rows;
    double slope = 0.0;    // log mse vs log T
    double slope_se = 0.0;
};

// Pointwise quadratic risk across a geometric horizon grid with the
// default bandwidth rule; replications use disjoint derived streams.
RiskReport rate_study(const ModelSpec& spec, const KernelSpec& kernel,
                      const std::vector<double>& T_grid, const double* x, int n_rep,
                      std::uint64_t seed, double dt, const ReferenceSpec& ref,
                      int workers = 0);

struct MixingConfig {
    int n_paths = 10;
    double T = 20000.0;
    double dt = 0.01;
    double burn_in = 10.0;
    double h_pair = 0.15; // bandwidth of the lagged-pair density estimate
    double u0 = 2.0;      // split between the local and the decay regime
    double u_max = 12.0;
    double du_fine = 0.02;
    double du_coarse = 0.2;
    std::uint64_t seed = 1234;
};

struct MixingReport {
    std::vector<double> xs, ys;     // pair list: (xs[i], ys[i])
    std::vector<double> u_grid;
    std::vector<std::vector<double>> ghat;    // [pair][u], mean over paths
    std::vector<std::vector<double>> ghat_se; // [pair][u]
    std::vector<double> mu_x, mu_y;           // occupation density estimates per pair
    std::vector<double> rho_hat;              // fitted decay rate beyond u0
    std::vector<double> small_u_coef;         // fitted c in g ~ c u^{-1/2} (diagonal pairs)
    std::vector<double> wcl1, wcl2;           // integral of |g| below/above u0
    std::vector<double> tail_residual;        // appended exponential tail mass
    std::vector<double> sigma, sigma_se;      // 2 * integral of g over (0, inf)
};

// Lag-u joint-vs-product discrepancy along long stationary records:
// ghat_u(x,y) = jhat_u(x,y) - mu_hat(x) mu_hat(y), integrated into the
// asymptotic covariance sigma(x,y).
MixingReport estimate_gu(const ModelSpec& spec, const std::vector<double>& xs,
                         const std::vector<double>& ys, const MixingConfig& cfg,
                         int workers = 0);

struct CltReport {
    std::vector<double> points;
    int n_rep = 0;
    double T = 0.0;
    double h = 0.0;
    double eps = 0.0;
    std::vector<double> sigma_emp;    // m x m, row major
    std::vector<double> sigma_hat;    // m x m from the mixing integrals
    std::vector<double> sigma_hat_se; // m x m
    std::vector<double> ks_p;         // per point
    double emp_se(int i) const;       // SE of sigma_emp diagonal entry i
};

// Root-T fluctuations of the estimator at m points, their empirical
// covariance, per-point normality p-values, and the independently
// integrated covariance for comparison.
CltReport clt_study(const ModelSpec& spec, const KernelSpec& kernel, double T,
                    const std::vector<double>& points, int n_rep, double eps,
                    std::uint64_t seed, double dt, const MixingConfig& mix_cfg,
                    int workers = 0);

struct BlockingReport {
    std::vector<double> b_grid;                   // window lengths, in blocks
    std::vector<std::vector<double>> partial_avg; // [pair][b]
    double delta = 0.0;
    int n_blocks = 0;
};

// Block sums Y_i over [i Delta, (i+1) Delta) and overlapping-window partial
// averages of (1/b) (sum Y^(r)) (sum Y^(s)) for convergence plots. centers
// supplies the expected per-unit-time kernel mass at each point; when
// empty the path's own average is used (fine for b much smaller than n).
BlockingReport blocking_check(const PathRecord& path, const KernelSpec& kernel,
                              const std::vector<double>& points, double delta_hint,
                              const std::array<double, 2>& h,
                              const std::vector<double>& centers = {});

void risk_to_csv(const RiskReport& rep, const std::string& filename);
void mixing_to_csv(const MixingReport& rep, const std::string& gu_file,
                   const std::string& summary_file);
void clt_to_csv(const CltReport& rep, const std::string& points_file,
                const std::string& cov_file);

} // namespace jdlab
