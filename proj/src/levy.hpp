#pragma once

#include "philox.hpp"

#include <array>
#include <string>
#include <vector>

namespace jdlab {

enum class LevyKind {
    None,                    // no jump part
    CompoundPoissonGauss,    // finite intensity, independent Gaussian axes
    CompoundPoissonCauchy,   // finite intensity, Cauchy marks (no exp moment)
    TemperedStableTruncated, // infinite activity, d=1
};

// Jump measure F(z)dz on R^d minus the origin. Carries both the analytic
// form (density, moments, tail radii) and the declared constants used by
// the assumption audit: alpha/c3 for the small-jump envelope, eps0/c4 for
// the exponential moment.
class LevyMeasure {
public:
    static LevyMeasure none(int dim);
    static LevyMeasure compound_poisson_gauss(int dim, double intensity,
                                              std::array<double, 2> sigma,
                                              double alpha, double eps0);
    static LevyMeasure compound_poisson_cauchy(double intensity, double scale,
                                               double alpha, double eps0);
    static LevyMeasure tempered_stable(double coef, double alpha, double theta,
                                       double eps0);

    LevyKind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_none() const { return kind_ == LevyKind::None; }
    bool finite_activity() const;
    bool symmetric() const { return symmetric_; }
    bool product_axes() const; // independent per-axis marks
    std::string describe() const;

    double density(const double* z) const; // F(z)
    double intensity() const;              // total mass, +inf for infinite activity

    // declared audit constants
    double alpha() const { return alpha_; }
    double c3() const { return c3_; }
    double eps0() const { return eps0_; }
    double c4() const { return c4_; }

    // integral of z_i F(z) dz (compensator drift component)
    double mean_jump(int axis) const;
    // integral of |z|^2 exp(eps |z|) F(z) dz; +inf when it diverges
    double exp_moment(double eps) const;
    // |z| radius beyond which exp(eps|z|)-weighted contributions are below tol
    double tail_radius(double eps, double tol) const;

    // per-axis mark density/CDF, probability-normalised (finite activity,
    // product measures only)
    double axis_density(int axis, double s) const;
    double axis_sigma(int axis) const;

    // simulation with small jumps below `cutoff` removed:
    double rate_above(double cutoff) const;          // effective Poisson rate
    double residual_variance(double cutoff) const;   // mass dropped, in |z|^2
    void sample_mark(RandomStream& rng, double cutoff, double* z) const;

private:
    LevyMeasure() = default;
    void build_ts_table(double cutoff) const;

    LevyKind kind_ = LevyKind::None;
    int dim_ = 1;
    bool symmetric_ = true;
    double intensity_ = 0.0;
    std::array<double, 2> sigma_{1.0, 1.0}; // gauss std dev / cauchy scale
    double ts_coef_ = 0.0, ts_theta_ = 0.0;
    double alpha_ = 0.5, c3_ = 0.0, eps0_ = 0.0, c4_ = 0.0;

    // lazily built inverse-CDF table for tempered stable radii
    mutable double ts_cutoff_ = -1.0;
    mutable double ts_rate_ = 0.0;
    mutable std::vector<double> ts_r_, ts_cdf_;
};

} // namespace jdlab
