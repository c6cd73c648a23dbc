#include "hypotheses.hpp"

#include "csvio.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "smooth_profile.hpp"
#include "stats.hpp"
#include "worker_pool.hpp"

#include <cmath>
#include <sstream>

namespace jdlab {

namespace {

double profile_half_mass() {
    // integral of the profile over [0, inf); the tail beyond 1 is exactly
    // sqrt(e) exp(-u)
    static const double value = [] {
        const SmoothProfile& p = smooth_profile();
        const double head = integrate([&](double u) { return p.value(u); }, 0.0, 1.0, 1e-13).value;
        return head + std::exp(-0.5);
    }();
    return value;
}

} // namespace

double BaseDensity::axis_value(int axis, double t) const {
    return smooth_profile().value(axis_scale[axis] * std::fabs(t));
}

double BaseDensity::axis_deriv(int axis, double t) const {
    const double s = axis_scale[axis];
    const double d = s * smooth_profile().deriv(s * std::fabs(t));
    return t >= 0.0 ? d : -d;
}

double BaseDensity::axis_second(int axis, double t) const {
    const double s = axis_scale[axis];
    return s * s * smooth_profile().second_deriv(s * std::fabs(t));
}

double BaseDensity::value(const double* x) const {
    double v = c_eta * axis_value(0, x[0]);
    if (dim == 2) v *= axis_value(1, x[1]);
    return v;
}

BaseDensity build_f0(double eta, int dim, const double* aaT) {
    if (!(eta > 0.0 && eta < 0.5))
        throw ValidationError("build_f0: eta must lie in (0, 1/2)");
    if (dim != 1 && dim != 2) throw ValidationError("build_f0: dim must be 1 or 2");
    BaseDensity b;
    b.eta = eta;
    b.dim = dim;
    if (dim == 1) {
        b.axis_scale = {eta, 0.0};
        b.k_max = 1.0;
    } else {
        if (aaT == nullptr) {
            b.aaT = {1.0, 0.0, 0.0, 1.0};
        } else {
            b.aaT = {aaT[0], aaT[1], aaT[2], aaT[3]};
        }
        const double det = b.aaT[0] * b.aaT[3] - b.aaT[1] * b.aaT[2];
        if (!(det > 0.0) || !(b.aaT[0] > 0.0))
            throw ValidationError("build_f0: aaT must be positive definite");
        const double k1 = b.aaT[3] / det;
        const double k2 = b.aaT[0] / det;
        b.axis_scale = {eta * k1, eta * k2};
        b.k_max = std::max(k1, k2);
    }
    // normalise: each axis integrates to 2 * half_mass / scale
    double inv = 1.0;
    for (int l = 0; l < dim; ++l) inv *= 2.0 * profile_half_mass() / b.axis_scale[l];
    b.c_eta = 1.0 / inv;
    // construction guard, mirrors the profile's own envelope audit
    if (smooth_profile().envelope_margin() > 0.0)
        throw NumericError("build_f0: profile envelope audit failed");
    return b;
}

DensitySpec to_density_spec(const BaseDensity& base) {
    if (base.dim != 1) throw ValidationError("to_density_spec: one-dimensional only");
    DensitySpec d;
    const double eta = base.eta;
    d.f = [base](double x) { return base.value(&x); };
    d.df = [base](double x) { return base.c_eta * base.axis_deriv(0, x); };
    d.d2f = [base](double x) { return base.c_eta * base.axis_second(0, x); };
    d.env.c1_hat = 4.0;
    d.env.eps = eta;
    d.env.c2_hat = 4.0 / eta;
    d.env.c3_hat = 28.0 * eta;
    d.env.c4_hat = 28.0;
    d.env.eps_tilde = eta;
    d.env.R = 1.0 / eta;
    std::ostringstream name;
    name << "f0(eta=" << eta << ")";
    d.name = name.str();
    d.validate();
    return d;
}

double HypothesisFamilyD1::f1(double x) const {
    return f0(x) + bump((x - x0) / H) / M_T;
}

HypothesisFamilyD1 build_family_d1(const BaseDensity& base, const BumpSpec& bump, double x0,
                                   double H, double M_T, double gate_eps, double beta) {
    if (base.dim != 1) throw ValidationError("build_family_d1: base must be one-dimensional");
    if (!(H > 0.0)) throw ValidationError("build_family_d1: H must be > 0");
    if (!(M_T > 0.0)) throw ValidationError("build_family_d1: M_T must be > 0");
    if (1.0 / M_T > gate_eps * std::pow(H, beta)) {
        std::ostringstream os;
        os << "perturbation amplitude gate failed: 1/M_T = " << 1.0 / M_T
           << " exceeds gate_eps * H^beta = " << gate_eps * std::pow(H, beta);
        throw ValidationError(os.str());
    }
    double min_f0 = 1e300;
    for (int i = 0; i <= 200; ++i) {
        const double x = x0 - H + 2.0 * H * i / 200.0;
        min_f0 = std::min(min_f0, base.value(&x));
    }
    if (bump.sup_norm / M_T >= min_f0) {
        std::ostringstream os;
        os << "positivity gate failed: bump amplitude " << bump.sup_norm / M_T
           << " reaches min f0 = " << min_f0 << " on the bump support";
        throw ValidationError(os.str());
    }
    HypothesisFamilyD1 fam;
    fam.base = base;
    fam.bump = bump;
    fam.x0 = x0;
    fam.H = H;
    fam.M_T = M_T;
    return fam;
}

double HypothesisFamilyD2::perturbation(int j1, int j2, const double* x) const {
    const auto c = center(j1, j2);
    return amplitude * bump((x[0] - c[0]) / H1) * bump((x[1] - c[1]) / H2);
}

double HypothesisFamilyD2::fj(int j1, int j2, const double* x) const {
    return f0(x) + perturbation(j1, j2, x);
}

HypothesisFamilyD2 build_family_d2(const BaseDensity& base, const BumpSpec& bump, double H1,
                                   double H2, double v, double T, double gate_eps,
                                   std::array<double, 2> beta) {
    if (base.dim != 2) throw ValidationError("build_family_d2: base must be two-dimensional");
    if (!(H1 > 0.0 && H1 < 1.0 && H2 > 0.0 && H2 < 1.0))
        throw ValidationError("build_family_d2: bandwidths must lie in (0,1)");
    if (!(T > 1.0)) throw ValidationError("build_family_d2: T must exceed 1");
    if (v < 0.0) throw ValidationError("build_family_d2: v must be >= 0");
    const double rate_sep = std::sqrt(std::log(T) / T);
    for (int l = 0; l < 2; ++l) {
        const double H = l == 0 ? H1 : H2;
        if (rate_sep > gate_eps * std::pow(H, beta[l])) {
            std::ostringstream os;
            os << "smoothness gate failed on axis " << (l + 1)
               << ": sqrt(log T / T) = " << rate_sep << " exceeds gate_eps * H^beta = "
               << gate_eps * std::pow(H, beta[l]);
            throw ValidationError(os.str());
        }
    }
    // diagonal dominance gate on the diffusion matrix
    const auto& m = base.aaT;
    const double det = m[0] * m[3] - m[1] * m[2];
    const double c12 = std::fabs(m[1] * (m[0] / det));
    const double c21 = std::fabs(m[2] * (m[3] / det));
    if (c12 > 0.5 || c21 > 0.5)
        throw ValidationError("build_family_d2: off-diagonal diffusion dominance gate failed");

    HypothesisFamilyD2 fam;
    fam.base = base;
    fam.bump = bump;
    fam.H1 = H1;
    fam.H2 = H2;
    fam.v = v;
    fam.T = T;
    fam.n1 = static_cast<int>(std::floor(1.0 / std::sqrt(H1)));
    fam.n2 = static_cast<int>(std::floor(1.0 / std::sqrt(H2)));
    fam.amplitude = 2.0 * v * rate_sep;
    fam.psi = v * rate_sep;
    if (fam.n1 < 1 || fam.n2 < 1)
        throw ValidationError("build_family_d2: empty index grid");

    // positivity with headroom: the perturbation must stay below f0/2 on
    // every bump box; f0 is smallest at the farthest box corner
    const double corner[2] = {2.0 * fam.n1 * H1 + H1, 2.0 * fam.n2 * H2 + H2};
    const double min_f0 = base.value(corner);
    if (fam.amplitude * bump.sup_norm * bump.sup_norm > 0.5 * min_f0) {
        std::ostringstream os;
        os << "amplitude gate failed: 2 v sqrt(log T/T) = " << fam.amplitude
           << " exceeds half the smallest box value of f0 = " << 0.5 * min_f0;
        throw ValidationError(os.str());
    }
    return fam;
}

// ---------------------------------------------------------------------------

LowerBoundMachinery::LowerBoundMachinery(const HypothesisFamilyD2& family,
                                         std::array<double, 4> a,
                                         std::array<double, 2> gamma_diag,
                                         const LevyMeasure& levy)
    : family_(family), a_(a), gamma_(gamma_diag), levy_(&levy) {
    // a a^T must match the matrix the base density was built from
    const std::array<double, 4> aat{a[0] * a[0] + a[1] * a[1], a[0] * a[2] + a[1] * a[3],
                                    a[0] * a[2] + a[1] * a[3], a[2] * a[2] + a[3] * a[3]};
    for (int i = 0; i < 4; ++i)
        if (std::fabs(aat[i] - family.base.aaT[i]) > 1e-9)
            throw ValidationError("machinery: a a^T differs from the base density's matrix");
    const double det = a[0] * a[3] - a[1] * a[2];
    if (std::fabs(det) < 1e-12) throw ValidationError("machinery: a is singular");
    a_inv_ = {a[3] / det, -a[1] / det, -a[2] / det, a[0] / det};

    if (!levy.is_none()) {
        if (!levy.finite_activity())
            throw ValidationError("machinery: jump measure must have finite intensity");
        if (!levy.product_axes() || !levy.symmetric())
            throw ValidationError(
                "machinery: requires a symmetric product mark law on the axes");
        if (levy.dim() != 2) throw ValidationError("machinery: need a two-dimensional measure");
        rate_ = levy.intensity();
        for (int l = 0; l < 2; ++l) mark_sd_[l] = std::fabs(gamma_diag[l]) * levy.axis_sigma(l);
    }

    if (rate_ > 0.0) {
        // per-axis tables for the mark-smoothed base density
        const double smax = std::max(mark_sd_[0], mark_sd_[1]);
        const double scale_min = std::min(family_.base.axis_scale[0], family_.base.axis_scale[1]);
        tail_edge_ = 1.0 / scale_min + 12.0 * smax + 1.0;
        table_lo_ = -tail_edge_ - 2.0;
        table_step_ = 0.005;
        const std::size_t n =
            static_cast<std::size_t>(std::ceil(2.0 * (-table_lo_) / table_step_)) + 1;
        for (int l = 0; l < 2; ++l) {
            const double s = family_.base.axis_scale[l];
            const double sd = mark_sd_[l];
            tail_mult_[l] = std::exp(0.5 * s * s * sd * sd);
            std::vector<double> conv(n), diff(n);
            parallel_for_index(n, 0, [&](std::size_t i) {
                const double t = table_lo_ + static_cast<double>(i) * table_step_;
                auto f = [&](double u) {
                    return family_.base.axis_value(l, t - u) * mark_density(l, u);
                };
                conv[i] = integrate(f, -12.0 * sd, 12.0 * sd, 1e-12).value;
                diff[i] = conv[i] - family_.base.axis_value(l, t);
            });
            conv_p_tab_[l] = std::move(conv);
            G_p_tab_[l] = prefix_integral(diff, table_step_);
            // anchor the running integral with the exact tail form
            const double anchor =
                (tail_mult_[l] - 1.0) * family_.base.axis_value(l, table_lo_) / s;
            for (double& gv : G_p_tab_[l]) gv += anchor;
        }
    }
    {
        constexpr int n = 8192;
        bump_prefix_step_ = 2.0 / n;
        std::vector<double> vals(n + 1);
        for (int i = 0; i <= n; ++i) vals[i] = family_.bump(-1.0 + i * bump_prefix_step_);
        bump_prefix_tab_ = prefix_integral(vals, bump_prefix_step_);
    }
}

double LowerBoundMachinery::mark_density(int axis, double s) const {
    const double g = std::fabs(gamma_[axis]);
    return levy_->axis_density(axis, s / g) / g;
}

double LowerBoundMachinery::bump_prefix(double u) const {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return bump_prefix_tab_.back();
    const double t = (u + 1.0) / bump_prefix_step_;
    const std::size_t i =
        std::min<std::size_t>(static_cast<std::size_t>(t), bump_prefix_tab_.size() - 2);
    const double w = t - static_cast<double>(i);
    return bump_prefix_tab_[i] * (1.0 - w) + bump_prefix_tab_[i + 1] * w;
}

double LowerBoundMachinery::conv_p(int axis, double t) const {
    if (std::fabs(t) >= tail_edge_)
        return tail_mult_[axis] * family_.base.axis_value(axis, t);
    const double pos = (t - table_lo_) / table_step_;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                                conv_p_tab_[axis].size() - 2);
    const double w = pos - static_cast<double>(i);
    return conv_p_tab_[axis][i] * (1.0 - w) + conv_p_tab_[axis][i + 1] * w;
}

double LowerBoundMachinery::G_p(int axis, double t) const {
    const double s = family_.base.axis_scale[axis];
    if (t <= -tail_edge_)
        return (tail_mult_[axis] - 1.0) * family_.base.axis_value(axis, t) / s;
    if (t >= tail_edge_)
        return -(tail_mult_[axis] - 1.0) * family_.base.axis_value(axis, t) / s;
    const double pos = (t - table_lo_) / table_step_;
    const std::size_t i =
        std::min<std::size_t>(static_cast<std::size_t>(pos), G_p_tab_[axis].size() - 2);
    const double w = pos - static_cast<double>(i);
    return G_p_tab_[axis][i] * (1.0 - w) + G_p_tab_[axis][i + 1] * w;
}

double LowerBoundMachinery::conv_bump(int axis, double t) const {
    const double H = axis == 0 ? family_.H1 : family_.H2;
    const GaussRule& rule = gauss_legendre(32);
    double acc = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double r = rule.x[i];
        acc += rule.w[i] * family_.bump(r) * mark_density(axis, t - H * r);
    }
    return acc * H;
}

double LowerBoundMachinery::G_bump(int axis, double t) const {
    const double H = axis == 0 ? family_.H1 : family_.H2;
    const double sd = mark_sd_[axis];
    const GaussRule& rule = gauss_legendre(32);
    double acc = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double r = rule.x[i];
        acc += rule.w[i] * family_.bump(r) * normal_cdf((t - H * r) / sd);
    }
    return H * (acc - bump_prefix(t / H));
}

void LowerBoundMachinery::b0(const double* x, double* out) const {
    const BaseDensity& base = family_.base;
    const double p1 = base.axis_value(0, x[0]);
    const double p2 = base.axis_value(1, x[1]);
    const double r1 = base.axis_deriv(0, x[0]) / p1;
    const double r2 = base.axis_deriv(1, x[1]) / p2;
    const auto& m = base.aaT;
    out[0] = 0.5 * (m[0] * r1 + m[1] * r2);
    out[1] = 0.5 * (m[2] * r1 + m[3] * r2);
    if (rate_ > 0.0) {
        out[0] += rate_ * G_p(0, x[0]) / p1;
        out[1] += rate_ * (conv_p(0, x[0]) / p1) * (G_p(1, x[1]) / p2);
    }
}

void LowerBoundMachinery::drift_difference(int j1, int j2, const double* x,
                                           double* out) const {
    const auto c = family_.center(j1, j2);
    const double u1 = (x[0] - c[0]) / family_.H1;
    const double u2 = (x[1] - c[1]) / family_.H2;
    const double A = family_.amplitude;
    const double f0v = family_.f0(x);
    const double d = family_.perturbation(j1, j2, x);
    const double fj = f0v + d;

    const double k1 = family_.bump(u1), k2 = family_.bump(u2);
    const double dk1 = family_.bump.deriv(u1), dk2 = family_.bump.deriv(u2);
    const double d1 = A * dk1 * k2 / family_.H1; // partial_1 d
    const double d2 = A * k1 * dk2 / family_.H2; // partial_2 d
    const auto& m = family_.base.aaT;

    double I1 = 0.5 * (m[0] * d1 + m[1] * d2);
    double I2 = 0.5 * (m[2] * d1 + m[3] * d2);
    if (rate_ > 0.0) {
        I1 += A * rate_ * k2 * G_bump(0, x[0] - c[0]);
        I2 += A * rate_ * conv_bump(0, x[0] - c[0]) * G_bump(1, x[1] - c[1]);
    }
    double b0v[2];
    b0(x, b0v);
    out[0] = (d * b0v[0] + I1) / fj;
    out[1] = (d * b0v[1] + I2) / fj;
}

KlRow LowerBoundMachinery::kl_terms(int j1, int j2) const {
    const HypothesisFamilyD2& fam = family_;
    KlRow row;
    row.j1 = j1;
    row.j2 = j2;
    const auto c = fam.center(j1, j2);

    // entropy of the start point: integral over the bump box
    {
        const GaussRule& rule = gauss_legendre(48);
        double acc = 0.0;
        for (int i = 0; i < 48; ++i) {
            const double x1 = c[0] + fam.H1 * rule.x[i];
            for (int j = 0; j < 48; ++j) {
                const double x2 = c[1] + fam.H2 * rule.x[j];
                const double x[2] = {x1, x2};
                const double f0v = fam.f0(x);
                const double d = fam.perturbation(j1, j2, x);
                acc += rule.w[i] * rule.w[j] * std::log1p(d / f0v) * (f0v + d);
            }
        }
        row.entropy_term = acc * fam.H1 * fam.H2;
    }
    const double k = fam.base.k_max;
    const double eta = fam.base.eta;
    const double c_eta = fam.base.c_eta;
    const double root = std::sqrt(std::log(fam.T) / fam.T);
    const double c_star = 8.0 / c_eta * std::exp(4.0 * eta * k);
    row.entropy_bound =
        std::fabs(std::log1p(c_star * fam.v * root * fam.bump.sup_norm * fam.bump.sup_norm));

    // path term: T * integral |a^{-1}(b0 - bj)|^2 f0 over the patch where
    // the difference lives
    {
        const double L1 = fam.H1 + 12.0 * std::max(mark_sd_[0], 1e-3) + 0.5;
        const double L2 = fam.H2 + 12.0 * std::max(mark_sd_[1], 1e-3) + 0.5;
        const double seg1[4] = {c[0] - L1, c[0] - fam.H1, c[0] + fam.H1, c[0] + L1};
        const double seg2[4] = {c[1] - L2, c[1] - fam.H2, c[1] + fam.H2, c[1] + L2};
        const int ord1[3] = {96, 32, 96};
        const int ord2[3] = {96, 32, 96};
        double acc = 0.0;
        for (int si = 0; si < 3; ++si) {
            const GaussRule& r1 = gauss_legendre(ord1[si]);
            const double a1 = seg1[si], b1 = seg1[si + 1];
            const double c1 = 0.5 * (a1 + b1), h1 = 0.5 * (b1 - a1);
            for (int sj = 0; sj < 3; ++sj) {
                if (rate_ == 0.0 && !(si == 1 && sj == 1)) continue; // no tails without jumps
                const GaussRule& r2 = gauss_legendre(ord2[sj]);
                const double a2 = seg2[sj], b2 = seg2[sj + 1];
                const double c2 = 0.5 * (a2 + b2), h2 = 0.5 * (b2 - a2);
                double panel = 0.0;
                for (std::size_t i = 0; i < r1.x.size(); ++i) {
                    const double x1 = c1 + h1 * r1.x[i];
                    for (std::size_t j = 0; j < r2.x.size(); ++j) {
                        const double x2 = c2 + h2 * r2.x[j];
                        const double x[2] = {x1, x2};
                        double diff[2];
                        drift_difference(j1, j2, x, diff);
                        const double y1 = a_inv_[0] * diff[0] + a_inv_[1] * diff[1];
                        const double y2 = a_inv_[2] * diff[0] + a_inv_[3] * diff[1];
                        panel += r1.w[i] * r2.w[j] * (y1 * y1 + y2 * y2) * fam.f0(x);
                    }
                }
                acc += panel * h1 * h2;
            }
        }
        row.girsanov_term = fam.T * acc;
    }

    row.prop_bound = 64.0 * std::exp(8.0 * eta * k) / (c_eta * c_eta) * k * k * fam.v *
                     fam.v * fam.H1 * fam.H2 * std::pow(1.0 / fam.H1 + 1.0 / fam.H2, 2.0) *
                     std::log(fam.T);
    row.kl = row.entropy_term + 0.5 * row.girsanov_term;
    row.ratio_to_log_JT = row.kl / std::log(static_cast<double>(fam.count()));
    return row;
}

std::vector<KlRow> LowerBoundMachinery::kl_all() const {
    const int n = family_.count();
    std::vector<KlRow> rows(n);
    parallel_for_index(n, 0, [&](std::size_t idx) {
        const int j1 = 1 + static_cast<int>(idx) / family_.n2;
        const int j2 = 1 + static_cast<int>(idx) % family_.n2;
        rows[idx] = kl_terms(j1, j2);
    });
    return rows;
}

void kl_rows_to_csv(const std::vector<KlRow>& rows, const std::string& filename) {
    CsvWriter csv(filename);
    csv.header({"j1", "j2", "entropy_term", "girsanov_term", "prop_bound", "ratio_to_log_JT"});
    for (const auto& r : rows)
        csv.row({static_cast<double>(r.j1), static_cast<double>(r.j2), r.entropy_term,
                 r.girsanov_term, r.prop_bound, r.ratio_to_log_JT});
}

} // namespace jdlab
