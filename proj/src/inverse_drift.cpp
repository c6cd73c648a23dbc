#include "inverse_drift.hpp"

#include "csvio.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "stats.hpp"
#include "worker_pool.hpp"

#include <cmath>
#include <sstream>

namespace jdlab {

void DensitySpec::validate() const {
    if (!f || !df || !d2f) throw ValidationError("density: missing callables");
    double mass = 0.0;
    for (double w = -200.0; w < 200.0; w += 0.5)
        mass += integrate_gl(f, w, w + 0.5, 16);
    if (std::fabs(mass - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "density '" << name << "' has mass " << mass;
        throw ValidationError(os.str());
    }
    const double fd = 1e-5;
    for (int i = -80; i <= 80; ++i) {
        const double x = i * 0.25;
        if (!(f(x) > 0.0)) {
            std::ostringstream os;
            os << "density '" << name << "' not positive at " << x;
            throw ValidationError(os.str());
        }
        const double d1 = (f(x + fd) - f(x - fd)) / (2 * fd);
        const double d2 = (f(x + fd) - 2 * f(x) + f(x - fd)) / (fd * fd);
        const double scale1 = std::max(1e-8, std::fabs(df(x)) + 1e-3 * f(x));
        const double scale2 = std::max(1e-4, std::fabs(d2f(x)) + 1e-2 * f(x));
        if (std::fabs(d1 - df(x)) / scale1 > 1e-4 * (1.0 + 1.0 / fd / 100.0) ||
            std::fabs(d2 - d2f(x)) / scale2 > 1e-2) {
            std::ostringstream os;
            os << "density '" << name << "' derivative mismatch at " << x;
            throw ValidationError(os.str());
        }
    }
}

DensitySpec gaussian_density(double variance) {
    if (!(variance > 0.0)) throw ValidationError("gaussian_density: variance must be > 0");
    DensitySpec d;
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * variance);
    d.f = [=](double x) { return norm * std::exp(-0.5 * x * x / variance); };
    d.df = [=, f = d.f](double x) { return -x / variance * f(x); };
    d.d2f = [=, f = d.f](double x) {
        return (x * x / (variance * variance) - 1.0 / variance) * f(x);
    };
    d.name = "gaussian";
    d.validate();
    return d;
}

double DriftFunction::operator()(double x) const {
    if (values.empty()) throw ValidationError("drift: empty table");
    const double t = (x - lo) / step;
    if (t <= 0.0) return values.front();
    const std::size_t n = values.size();
    if (t >= static_cast<double>(n - 1)) return values.back();
    const std::size_t i = static_cast<std::size_t>(t);
    const double w = t - static_cast<double>(i);
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

double adjoint_jump_apply(const DensitySpec& f, double gamma, const LevyMeasure& levy,
                          double x) {
    if (levy.is_none() || levy.intensity() == 0.0) return 0.0;
    if (levy.dim() != 1) throw ValidationError("adjoint_jump_apply: one-dimensional only");
    const double fx = f.f(x);
    const double dfx = f.df(x);
    auto integrand = [&](double z) {
        return (f.f(x - gamma * z) - fx + gamma * z * dfx) * levy.density(&z);
    };
    const double eps = std::max(f.env.eps, 0.05);
    double R = levy.tail_radius(std::fabs(gamma) * eps, 1e-16);
    if (!std::isfinite(R)) R = levy.tail_radius(0.0, 1e-16);
    // split at the origin: infinite-activity densities blow up there and
    // the panel rule must not evaluate it
    const QuadResult neg = integrate(integrand, -R, 0.0, 5e-11);
    const QuadResult pos = integrate(integrand, 0.0, R, 5e-11);
    return neg.value + pos.value;
}

namespace {

struct AdjointTable {
    double lo = 0.0;
    double step = 0.0;
    std::vector<double> J;     // running integral of the adjoint term
    double J_total = 0.0;
};

AdjointTable tabulate_adjoint_integral(const DensitySpec& f, double gamma,
                                       const LevyMeasure& levy, double lo, double hi,
                                       double step) {
    AdjointTable tab;
    // extend far enough that the omitted tails are below 1e-12 by the
    // density's own envelope
    const double eps_t = f.env.eps_tilde > 0.0 ? f.env.eps_tilde : 0.25;
    double margin = (34.0 + std::log1p(levy.is_none() ? 0.0 : std::max(0.0, levy.intensity()))) / eps_t;
    margin = std::min(margin, 400.0);
    const double W = std::max(std::fabs(lo), std::fabs(hi)) + margin;
    const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * W / step)) + 1;
    tab.lo = -W;
    tab.step = step;
    std::vector<double> vals(n);
    parallel_for_index(n, 0, [&](std::size_t i) {
        vals[i] = adjoint_jump_apply(f, gamma, levy, -W + static_cast<double>(i) * step);
    });
    tab.J = prefix_integral(vals, step);
    tab.J_total = tab.J.back();
    return tab;
}

double interp_table(const std::vector<double>& v, double lo, double step, double x) {
    const double t = (x - lo) / step;
    if (t <= 0.0) return v.front();
    if (t >= static_cast<double>(v.size() - 1)) return v.back();
    const std::size_t i = static_cast<std::size_t>(t);
    const double w = t - static_cast<double>(i);
    return v[i] * (1.0 - w) + v[i + 1] * w;
}

} // namespace

DriftFunction build_drift(const DensitySpec& f, double a, double gamma,
                          const LevyMeasure& levy, const DriftGrid& grid) {
    if (a == 0.0) throw ValidationError("build_drift: a must be nonzero");
    if (!(grid.step > 0.0) || !(grid.hi > grid.lo))
        throw ValidationError("build_drift: bad grid");
    const bool with_jumps = !levy.is_none() && levy.intensity() > 0.0;

    AdjointTable tab;
    if (with_jumps)
        tab = tabulate_adjoint_integral(f, gamma, levy, grid.lo, grid.hi,
                                        std::min(grid.step, 0.01));

    if (with_jumps) {
        const double seam = std::fabs(tab.J_total) / f.f(0.0);
        if (seam > 1e-6) {
            std::ostringstream os;
            os << "one-sided drift forms disagree at 0 by " << seam
               << "; stationary mass balance is off (adjoint integral = " << tab.J_total
               << ")";
            throw NumericError(os.str());
        }
    }

    const std::size_t n = static_cast<std::size_t>(std::llround((grid.hi - grid.lo) / grid.step)) + 1;
    DriftFunction b;
    b.lo = grid.lo;
    b.step = grid.step;
    b.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.lo + static_cast<double>(i) * grid.step;
        const double fx = f.f(x);
        if (!(fx > 0.0)) throw NumericError("build_drift: density vanishes on the grid");
        double J = 0.0;
        if (with_jumps) {
            J = interp_table(tab.J, tab.lo, tab.step, x);
            if (x >= 0.0) J -= tab.J_total;
        }
        // running integral of a^2 f''/2 is a^2 f'/2 exactly (tails vanish)
        b.values[i] = (0.5 * a * a * f.df(x) + J) / fx;
        if (!std::isfinite(b.values[i])) {
            std::ostringstream os;
            os << "build_drift: non-finite drift at x=" << x;
            throw NumericError(os.str());
        }
    }
    double sup = 0.0, lip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sup = std::max(sup, std::fabs(b.values[i]));
        if (i) lip = std::max(lip, std::fabs(b.values[i] - b.values[i - 1]) / grid.step);
    }
    b.sup_norm = sup;
    b.lipschitz_estimate = lip;
    return b;
}

double stationarity_balance(const DensitySpec& f, double a, double gamma,
                            const LevyMeasure& levy) {
    // the diffusion part integrates to zero exactly (f' vanishes at both
    // ends); what remains is the jump term
    (void)a;
    if (levy.is_none() || levy.intensity() == 0.0) return 0.0;
    AdjointTable tab = tabulate_adjoint_integral(f, gamma, levy, -30.0, 30.0, 0.01);
    return tab.J_total;
}

ConditionReport audit_proposition_conditions(const DensitySpec& f, double a, double gamma,
                                             const LevyMeasure& levy) {
    ConditionReport rep;
    rep.used = f.env;
    const EnvelopeConstants& e = f.env;
    const double Y = 60.0;

    {
        ConditionVerdict v;
        v.name = "tails_vanish";
        double worst = 0.0, at = Y;
        for (double y = Y - 5.0; y <= Y; y += 0.5) {
            for (double s : {-1.0, 1.0}) {
                const double val = std::max(f.f(s * y), std::fabs(f.df(s * y)));
                if (val > worst) {
                    worst = val;
                    at = s * y;
                }
            }
        }
        v.pass = worst < 1e-5;
        v.worst_point = at;
        v.margin = 1e-5 - worst;
        v.detail = "max of f and |f'| near the audit boundary";
        rep.conditions.push_back(v);
    }
    {
        ConditionVerdict v;
        v.name = "growth_bound";
        double worst_ratio = 0.0, at = 0.0;
        for (double y = -40.0; y <= 40.0; y += 0.25) {
            const double fy = f.f(y);
            for (double z = 0.25; z <= 30.0; z += 0.25) {
                const double cap = e.c1_hat * std::exp(e.eps * z) * fy;
                const double val = std::max(f.f(y + z), f.f(y - z));
                if (val / cap > worst_ratio) {
                    worst_ratio = val / cap;
                    at = y;
                }
            }
        }
        v.pass = worst_ratio <= 1.0;
        v.worst_point = at;
        v.margin = 1.0 - worst_ratio;
        v.detail = "f(y±z) vs c1 exp(eps|z|) f(y); margin is 1 - worst ratio";
        rep.conditions.push_back(v);
    }
    {
        ConditionVerdict v;
        v.name = "tail_ratio";
        // left ratio: (1/f(y)) integral_{-inf}^{y} f for y < 0, tail part
        // bounded through the envelope
        const double step = 0.05;
        const std::size_t n = static_cast<std::size_t>(2.0 * Y / step) + 1;
        std::vector<double> fv(n);
        for (std::size_t i = 0; i < n; ++i) fv[i] = f.f(-Y + static_cast<double>(i) * step);
        std::vector<double> pref = prefix_integral(fv, step);
        const double eps_t = e.eps_tilde > 0.0 ? e.eps_tilde : 0.25;
        const double tail = f.f(-Y) / eps_t; // bound on the un-tabulated mass
        double worst = 0.0, at = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = -Y + static_cast<double>(i) * step;
            double ratio;
            if (y < 0.0)
                ratio = (pref[i] + tail) / fv[i];
            else
                ratio = (pref[n - 1] - pref[i] + tail) / fv[i];
            if (ratio > worst) {
                worst = ratio;
                at = y;
            }
        }
        v.pass = worst < e.c2_hat;
        v.worst_point = at;
        v.margin = e.c2_hat - worst;
        std::ostringstream os;
        os << "sup tail-mass ratio " << worst << " vs c2=" << e.c2_hat;
        v.detail = os.str();
        rep.conditions.push_back(v);
    }
    {
        ConditionVerdict v;
        v.name = "log_slope";
        double worst = -1e300, at = 0.0;
        for (double y = e.R + 1e-9; y <= Y; y += 0.05) {
            for (double s : {-1.0, 1.0}) {
                const double x = s * y;
                const double slope = f.df(x) / f.f(x) * (s > 0 ? 1.0 : -1.0);
                // require slope <= -eps_tilde on the outward side
                const double viol = slope + e.eps_tilde;
                if (viol > worst) {
                    worst = viol;
                    at = x;
                }
            }
        }
        double deriv_worst = 0.0;
        for (double y = -Y; y <= Y; y += 0.05)
            deriv_worst = std::max(deriv_worst, std::fabs(f.df(y)) / f.f(y));
        const double c4m = levy.is_none() ? 0.0 : levy.c4();
        const double gate =
            c4m > 0.0 ? a * a / (2.0 * gamma * gamma * c4m * e.c2_hat * e.c4_hat * e.c1_hat)
                      : std::numeric_limits<double>::infinity();
        const bool slope_ok = worst <= 1e-12;
        const bool deriv_ok = deriv_worst <= e.c3_hat * (1.0 + 1e-12);
        const bool gate_ok = e.eps_tilde < gate;
        v.pass = slope_ok && deriv_ok && gate_ok;
        v.worst_point = at;
        v.margin = -worst;
        std::ostringstream os;
        os << "log-slope margin " << -worst << "; sup|f'|/f=" << deriv_worst
           << " vs c3=" << e.c3_hat << "; eps_tilde=" << e.eps_tilde << " vs gate=" << gate;
        v.detail = os.str();
        rep.conditions.push_back(v);
    }
    {
        ConditionVerdict v;
        v.name = "second_derivative";
        double worst = 0.0, at = 0.0;
        for (double y = -Y; y <= Y; y += 0.05) {
            const double ratio = std::fabs(f.d2f(y)) / (e.c4_hat * e.eps_tilde * e.eps_tilde * f.f(y));
            if (ratio > worst) {
                worst = ratio;
                at = y;
            }
        }
        v.pass = worst <= 1.0;
        v.worst_point = at;
        v.margin = 1.0 - worst;
        v.detail = "|f''| vs c4 eps_tilde^2 f";
        rep.conditions.push_back(v);
    }
    return rep;
}

ModelSpec model_from_drift(const DriftFunction& b, double a, double gamma,
                           const LevyMeasure& levy, const std::string& id) {
    ModelSpec m;
    m.dim = 1;
    m.id = id;
    m.drift = [b](const double* x, double* out) { out[0] = b(x[0]); };
    m.diffusion = [a](const double*, double* out) { out[0] = a; };
    m.jump_coeff = [gamma](const double*, double* out) { out[0] = gamma; };
    m.levy = levy;
    m.constant_coeffs = true;
    return m;
}

RoundtripReport roundtrip_invariance(const DensitySpec& f, const DriftFunction& b, double a,
                                     double gamma, const LevyMeasure& levy,
                                     const SimConfig& sim_cfg, int n_rep,
                                     const KernelSpec& kernel, double grid_lo, double grid_hi,
                                     double grid_step, int workers) {
    if (n_rep < 2) throw ValidationError("roundtrip: n_rep must be >= 2");
    ModelSpec model = model_from_drift(b, a, gamma, levy, "inverted:" + f.name);
    const std::array<double, 2> h = default_bandwidth(sim_cfg.horizon, 1);

    RoundtripReport rep;
    for (double x = grid_lo; x <= grid_hi + 1e-12; x += grid_step) rep.grid.push_back(x);
    const std::size_t g = rep.grid.size();
    std::vector<double> acc(static_cast<std::size_t>(n_rep) * g);
    ensemble_apply(model, sim_cfg, n_rep, workers, [&](int r, const PathRecord& path) {
        for (std::size_t i = 0; i < g; ++i) {
            const double x = rep.grid[i];
            acc[static_cast<std::size_t>(r) * g + i] = estimate_density_at(path, kernel, h, &x);
        }
    });
    rep.mu_hat.resize(g);
    rep.se.resize(g);
    rep.f_target.resize(g);
    for (std::size_t i = 0; i < g; ++i) {
        std::vector<double> vals(n_rep);
        for (int r = 0; r < n_rep; ++r) vals[r] = acc[static_cast<std::size_t>(r) * g + i];
        rep.mu_hat[i] = mean(vals);
        rep.se[i] = std::sqrt(sample_variance(vals) / n_rep);
        rep.f_target[i] = f.f(rep.grid[i]);
        rep.sup_error = std::max(rep.sup_error, std::fabs(rep.mu_hat[i] - rep.f_target[i]));
        rep.max_se = std::max(rep.max_se, rep.se[i]);
    }
    return rep;
}

void drift_to_csv(const DriftFunction& b, const std::string& filename) {
    CsvWriter csv(filename);
    csv.header({"x", "b"});
    for (std::size_t i = 0; i < b.values.size(); ++i)
        csv.row({b.lo + static_cast<double>(i) * b.step, b.values[i]});
}

} // namespace jdlab
