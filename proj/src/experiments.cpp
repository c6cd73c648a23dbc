#include "experiments.hpp"

#include "csvio.hpp"
#include "errors.hpp"
#include "stats.hpp"
#include "worker_pool.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace jdlab {

namespace {

std::string ref_cache_name(const ModelSpec& spec, const ReferenceSpec& ref, const double* x,
                           int dim) {
    std::ostringstream os;
    os << "ref_" << spec.id << "_T" << format_double(ref.T) << "_dt" << format_double(ref.dt)
       << "_s" << ref.seed << "_x" << format_double(x[0]);
    if (dim == 2) os << "_" << format_double(x[1]);
    os << ".txt";
    return os.str();
}

} // namespace

double reference_density_at(const ModelSpec& spec, const KernelSpec& kernel,
                            const ReferenceSpec& ref, const double* x) {
    if (ref.mode == ReferenceSpec::Mode::ClosedForm) {
        if (!spec.has_closed_form())
            throw ValidationError("reference: model '" + spec.id +
                                  "' has no closed-form density; supply a long-run reference");
        return spec.invariant_density(x);
    }
    namespace fs = std::filesystem;
    fs::path cache_file;
    if (!ref.cache_dir.empty()) {
        cache_file = fs::path(ref.cache_dir) / ref_cache_name(spec, ref, x, spec.dim);
        std::ifstream in(cache_file);
        if (in) {
            double v;
            if (in >> v) return v;
        }
    }
    SimConfig cfg;
    cfg.horizon = ref.T;
    cfg.dt = ref.dt;
    cfg.burn_in = 10.0;
    cfg.seed = ref.seed;
    if (!spec.levy.is_none() && !spec.levy.finite_activity())
        cfg.small_jump_cutoff = pick_small_jump_cutoff(spec.levy);
    PathRecord path = simulate_path(spec, cfg);
    const auto h = default_bandwidth(ref.T, spec.dim);
    const double value = estimate_density_at(path, kernel, h, x);
    if (!ref.cache_dir.empty()) {
        fs::create_directories(cache_file.parent_path());
        std::ofstream out(cache_file);
        out << format_double(value) << "\n";
        if (!out) throw IoError("cannot write reference cache: " + cache_file.string());
    }
    return value;
}

RiskReport rate_study(const ModelSpec& spec, const KernelSpec& kernel,
                      const std::vector<double>& T_grid, const double* x, int n_rep,
                      std::uint64_t seed, double dt, const ReferenceSpec& ref, int workers) {
    if (T_grid.size() < 4) throw ValidationError("rate_study: need at least 4 horizons");
    for (std::size_t i = 1; i < T_grid.size(); ++i)
        if (T_grid[i] < 2.0 * T_grid[i - 1] * (1.0 - 1e-9))
            throw ValidationError("rate_study: horizon grid must be geometric with ratio >= 2");
    if (n_rep < 2) throw ValidationError("rate_study: n_rep must be >= 2");

    RiskReport rep;
    rep.model_id = spec.id;
    rep.dim = spec.dim;
    rep.x = {x[0], spec.dim == 2 ? x[1] : 0.0};
    rep.reference = reference_density_at(spec, kernel, ref, x);

    std::vector<double> logT, logMse;
    for (std::size_t ti = 0; ti < T_grid.size(); ++ti) {
        const double T = T_grid[ti];
        SimConfig cfg;
        cfg.horizon = T;
        cfg.dt = dt;
        cfg.burn_in = 10.0;
        cfg.seed = seed;
        if (!spec.levy.is_none() && !spec.levy.finite_activity())
            cfg.small_jump_cutoff = pick_small_jump_cutoff(spec.levy);
        const auto h = default_bandwidth(T, spec.dim);

        std::vector<double> est(n_rep);
        // disjoint replication ids across the horizon grid
        const std::uint64_t rep_base = static_cast<std::uint64_t>(ti) * n_rep;
        parallel_for_index(n_rep, workers, [&](std::size_t r) {
            PathRecord path = simulate_rep(spec, cfg, rep_base + r);
            est[r] = estimate_density_at(path, kernel, h, x);
        });

        RiskRow row;
        row.T = T;
        row.h = h[0];
        row.n_rep = n_rep;
        std::vector<double> sq(n_rep);
        for (int r = 0; r < n_rep; ++r) {
            const double e = est[r] - rep.reference;
            sq[r] = e * e;
        }
        row.mse = mean(sq);
        row.se = std::sqrt(sample_variance(sq) / n_rep);
        const double mhat = mean(est);
        row.bias2 = (mhat - rep.reference) * (mhat - rep.reference);
        row.variance = sample_variance(est);
        if (spec.dim == 2) row.mse_T_over_logT = row.mse * T / std::log(T);
        rep.rows.push_back(row);
        logT.push_back(std::log(T));
        logMse.push_back(std::log(row.mse));
    }
    const LineFit fit = fit_line(logT, logMse);
    rep.slope = fit.slope;
    rep.slope_se = fit.slope_se;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct PairHarvest {
    // per path results, indexed [pair][u]
    std::vector<std::vector<double>> ghat;
    std::vector<double> mu_x, mu_y;
};

std::vector<double> build_u_grid(const MixingConfig& cfg) {
    std::vector<double> u;
    const auto push_snapped = [&](double v) {
        const double snapped = std::max(cfg.dt, std::round(v / cfg.dt) * cfg.dt);
        if (u.empty() || snapped > u.back() + 0.5 * cfg.dt) u.push_back(snapped);
    };
    for (double v = cfg.du_fine; v <= cfg.u0 + 1e-12; v += cfg.du_fine) push_snapped(v);
    for (double v = cfg.u0 + cfg.du_coarse; v <= cfg.u_max + 1e-12; v += cfg.du_coarse)
        push_snapped(v);
    return u;
}

// sparse kernel weights of one point along the path
struct PointWeights {
    std::vector<std::uint32_t> idx;
    std::vector<double> w; // K((p - X)/h)/h, trapezoid end weights folded in
    std::vector<double> dense;
    double mu = 0.0; // time-average = occupation estimate
};

PointWeights harvest_point(const PathRecord& path, const KernelSpec& kernel, double p,
                           double h) {
    PointWeights out;
    const std::size_t n = path.size();
    out.dense.assign(n, 0.0);
    const double inv_h = 1.0 / h;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = p - path.states[k];
        if (d > h || d < -h) continue;
        double val = kernel(d * inv_h) * inv_h;
        out.idx.push_back(static_cast<std::uint32_t>(k));
        out.w.push_back(val);
        out.dense[k] = val;
        double tw = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        acc += val * tw;
    }
    out.mu = acc * path.dt / path.horizon();
    return out;
}

} // namespace

MixingReport estimate_gu(const ModelSpec& spec, const std::vector<double>& xs,
                         const std::vector<double>& ys, const MixingConfig& cfg,
                         int workers) {
    if (spec.dim != 1) throw ValidationError("estimate_gu: one-dimensional records only");
    if (xs.size() != ys.size() || xs.empty())
        throw ValidationError("estimate_gu: need matching nonempty point lists");
    if (!(cfg.u_max > cfg.u0) || !(cfg.u0 > 0.0))
        throw ValidationError("estimate_gu: need 0 < u0 < u_max");
    if (cfg.n_paths < 2) throw ValidationError("estimate_gu: need at least 2 paths");
    const double min_pairs = (cfg.T - cfg.u_max) / cfg.dt;
    if (min_pairs < 1e4) {
        std::ostringstream os;
        os << "estimate_gu: record too short for the lag harvest (needs at least 10000 "
              "usable pairs, would have "
           << static_cast<long long>(min_pairs) << ")";
        throw ValidationError(os.str());
    }

    const std::vector<double> u_grid = build_u_grid(cfg);
    const std::size_t nu = u_grid.size();
    const std::size_t np = xs.size();
    const KernelSpec kernel = build_kernel(1);

    SimConfig sim;
    sim.horizon = cfg.T;
    sim.dt = cfg.dt;
    sim.burn_in = cfg.burn_in;
    sim.seed = cfg.seed;
    if (!spec.levy.is_none() && !spec.levy.finite_activity())
        sim.small_jump_cutoff = pick_small_jump_cutoff(spec.levy);

    std::vector<PairHarvest> per_path(cfg.n_paths);
    parallel_for_index(cfg.n_paths, workers, [&](std::size_t r) {
        PathRecord path = simulate_rep(spec, sim, r);
        PairHarvest h;
        h.ghat.assign(np, std::vector<double>(nu, 0.0));
        h.mu_x.resize(np);
        h.mu_y.resize(np);
        const std::size_t n = path.size();
        for (std::size_t p = 0; p < np; ++p) {
            PointWeights wx = harvest_point(path, kernel, xs[p], cfg.h_pair);
            PointWeights wy = harvest_point(path, kernel, ys[p], cfg.h_pair);
            h.mu_x[p] = wx.mu;
            h.mu_y[p] = wy.mu;
            for (std::size_t ui = 0; ui < nu; ++ui) {
                const std::size_t lag =
                    static_cast<std::size_t>(std::llround(u_grid[ui] / cfg.dt));
                double acc = 0.0;
                for (std::size_t s = 0; s < wx.idx.size(); ++s) {
                    const std::size_t k = wx.idx[s];
                    if (k + lag >= n) break;
                    acc += wx.w[s] * wy.dense[k + lag];
                }
                const double cover = (static_cast<double>(n - lag) - 1.0) * path.dt;
                const double jhat = acc * path.dt / cover;
                h.ghat[p][ui] = jhat - wx.mu * wy.mu;
            }
        }
        per_path[r] = std::move(h);
    });

    MixingReport rep;
    rep.xs = xs;
    rep.ys = ys;
    rep.u_grid = u_grid;
    rep.ghat.assign(np, std::vector<double>(nu, 0.0));
    rep.ghat_se.assign(np, std::vector<double>(nu, 0.0));
    rep.mu_x.assign(np, 0.0);
    rep.mu_y.assign(np, 0.0);
    rep.rho_hat.assign(np, 0.0);
    rep.small_u_coef.assign(np, 0.0);
    rep.wcl1.assign(np, 0.0);
    rep.wcl2.assign(np, 0.0);
    rep.tail_residual.assign(np, 0.0);
    rep.sigma.assign(np, 0.0);
    rep.sigma_se.assign(np, 0.0);

    const int R = cfg.n_paths;
    for (std::size_t p = 0; p < np; ++p) {
        for (int r = 0; r < R; ++r) {
            rep.mu_x[p] += per_path[r].mu_x[p] / R;
            rep.mu_y[p] += per_path[r].mu_y[p] / R;
        }
        for (std::size_t ui = 0; ui < nu; ++ui) {
            std::vector<double> vals(R);
            for (int r = 0; r < R; ++r) vals[r] = per_path[r].ghat[p][ui];
            rep.ghat[p][ui] = mean(vals);
            rep.ghat_se[p][ui] = std::sqrt(sample_variance(vals) / R);
        }

        // per-path sigma, then aggregate for a replication-based SE
        std::vector<double> sigma_r(R), wcl1_r(R), wcl2_r(R), tail_r(R);
        const bool diagonal = std::fabs(xs[p] - ys[p]) < 1e-12;
        // common decay rate from the averaged curve keeps per-path noise out
        {
            std::vector<double> du, gv;
            for (std::size_t ui = 0; ui < nu; ++ui) {
                if (u_grid[ui] > cfg.u0 && u_grid[ui] <= cfg.u0 + 6.0) {
                    du.push_back(u_grid[ui]);
                    gv.push_back(rep.ghat[p][ui]);
                }
            }
            rep.rho_hat[p] = fit_decay_rate(du, gv);
        }
        const double rho = rep.rho_hat[p] > 0.05 ? rep.rho_hat[p] : 0.5;
        for (int r = 0; r < R; ++r) {
            const auto& g = per_path[r].ghat[p];
            double head = 0.0, body1 = 0.0, body2 = 0.0;
            double coef = 0.0;
            if (diagonal) {
                int cnt = 0;
                for (std::size_t ui = 0; ui < nu && cnt < 4; ++ui, ++cnt)
                    coef += g[ui] * std::sqrt(u_grid[ui]) / 4.0;
                head = 2.0 * coef * std::sqrt(u_grid[0]);
            } else {
                head = g[0] * u_grid[0];
            }
            double habs = std::fabs(head);
            for (std::size_t ui = 0; ui + 1 < nu; ++ui) {
                const double du = u_grid[ui + 1] - u_grid[ui];
                const double tz = 0.5 * du * (g[ui] + g[ui + 1]);
                const double ta = 0.5 * du * (std::fabs(g[ui]) + std::fabs(g[ui + 1]));
                if (u_grid[ui + 1] <= cfg.u0 + 1e-9) {
                    body1 += tz;
                    wcl1_r[r] += ta;
                } else {
                    body2 += tz;
                    wcl2_r[r] += ta;
                }
            }
            const double tail = g[nu - 1] / rho;
            tail_r[r] = tail;
            sigma_r[r] = 2.0 * (head + body1 + body2 + tail);
            wcl1_r[r] += habs;
            wcl2_r[r] += std::fabs(tail);
            if (diagonal && r == 0) rep.small_u_coef[p] = coef;
        }
        rep.sigma[p] = mean(sigma_r);
        rep.sigma_se[p] = std::sqrt(sample_variance(sigma_r) / R);
        rep.wcl1[p] = mean(wcl1_r);
        rep.wcl2[p] = mean(wcl2_r);
        rep.tail_residual[p] = mean(tail_r);
        if (diagonal) {
            // refit the small-u coefficient on the averaged curve
            double coef = 0.0;
            for (int ui = 0; ui < 4; ++ui)
                coef += rep.ghat[p][ui] * std::sqrt(u_grid[ui]) / 4.0;
            rep.small_u_coef[p] = coef;
        }
    }
    return rep;
}

double CltReport::emp_se(int i) const {
    const int m = static_cast<int>(points.size());
    return sigma_emp[i * m + i] * std::sqrt(2.0 / (n_rep - 1));
}

CltReport clt_study(const ModelSpec& spec, const KernelSpec& kernel, double T,
                    const std::vector<double>& points, int n_rep, double eps,
                    std::uint64_t seed, double dt, const MixingConfig& mix_cfg,
                    int workers) {
    if (spec.dim != 1) throw ValidationError("clt_study: one-dimensional only");
    if (points.empty()) throw ValidationError("clt_study: need evaluation points");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (std::fabs(points[i] - points[j]) < 1e-12)
                throw ValidationError("clt_study: points must be distinct");
    if (!(eps > 0.0 && eps < 0.5)) throw ValidationError("clt_study: eps must be in (0, 1/2)");
    if (n_rep < 100)
        throw ValidationError("clt_study: n_rep below 100 leaves the covariance too noisy");

    const int m = static_cast<int>(points.size());
    CltReport rep;
    rep.points = points;
    rep.n_rep = n_rep;
    rep.T = T;
    rep.eps = eps;
    rep.h = std::pow(1.0 / T, 0.5 - eps);

    SimConfig cfg;
    cfg.horizon = T;
    cfg.dt = dt;
    cfg.burn_in = 10.0;
    cfg.seed = seed;
    if (!spec.levy.is_none() && !spec.levy.finite_activity())
        cfg.small_jump_cutoff = pick_small_jump_cutoff(spec.levy);

    std::vector<double> est(static_cast<std::size_t>(n_rep) * m);
    const std::array<double, 2> h{rep.h, 0.0};
    parallel_for_index(n_rep, workers, [&](std::size_t r) {
        PathRecord path = simulate_rep(spec, cfg, r);
        for (int i = 0; i < m; ++i)
            est[r * m + i] = estimate_density_at(path, kernel, h, &points[i]);
    });

    std::vector<double> center(m, 0.0);
    for (int r = 0; r < n_rep; ++r)
        for (int i = 0; i < m; ++i) center[i] += est[r * m + i] / n_rep;
    const double sqT = std::sqrt(T);
    std::vector<double> Y(static_cast<std::size_t>(n_rep) * m);
    for (int r = 0; r < n_rep; ++r)
        for (int i = 0; i < m; ++i) Y[r * m + i] = sqT * (est[r * m + i] - center[i]);

    rep.sigma_emp.assign(m * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int r = 0; r < n_rep; ++r) acc += Y[r * m + i] * Y[r * m + j];
            rep.sigma_emp[i * m + j] = acc / (n_rep - 1);
        }

    rep.ks_p.resize(m);
    for (int i = 0; i < m; ++i) {
        std::vector<double> yi(n_rep);
        for (int r = 0; r < n_rep; ++r) yi[r] = Y[r * m + i];
        rep.ks_p[i] = ks_test_normal(yi, rep.sigma_emp[i * m + i]).p_value;
    }

    // pair list covering the full matrix
    std::vector<double> xs, ys;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            xs.push_back(points[i]);
            ys.push_back(points[j]);
        }
    MixingConfig mc = mix_cfg;
    mc.seed = mix_cfg.seed == 0 ? seed + 0x9e3779b9ULL : mix_cfg.seed;
    const MixingReport mix = estimate_gu(spec, xs, ys, mc, workers);
    rep.sigma_hat.assign(m * m, 0.0);
    rep.sigma_hat_se.assign(m * m, 0.0);
    std::size_t pair = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j, ++pair) {
            rep.sigma_hat[i * m + j] = mix.sigma[pair];
            rep.sigma_hat[j * m + i] = mix.sigma[pair];
            rep.sigma_hat_se[i * m + j] = mix.sigma_se[pair];
            rep.sigma_hat_se[j * m + i] = mix.sigma_se[pair];
        }
    return rep;
}

BlockingReport blocking_check(const PathRecord& path, const KernelSpec& kernel,
                              const std::vector<double>& points, double delta_hint,
                              const std::array<double, 2>& h,
                              const std::vector<double>& centers) {
    const double T = path.horizon();
    if (T < 2.0) throw ValidationError("blocking_check: record must cover at least 2 time units");
    if (!(delta_hint >= 1.0 && delta_hint < 2.0))
        throw ValidationError("blocking_check: block length must lie in [1, 2)");
    (void)delta_hint; // n = floor(T) forces Delta = T/n in [1, 2)
    const int n = static_cast<int>(std::floor(T));
    const double delta = T / n;
    const std::size_t m = points.size();
    if (!centers.empty() && centers.size() != m)
        throw ValidationError("blocking_check: centers must match points");

    BlockingReport rep;
    rep.delta = delta;
    rep.n_blocks = n;

    // per-point block integrals
    std::vector<std::vector<double>> Y(m, std::vector<double>(n, 0.0));
    const std::size_t N = path.size();
    for (std::size_t p = 0; p < m; ++p) {
        std::vector<double> block(n, 0.0);
        const double inv_h = 1.0 / h[0];
        for (std::size_t k = 0; k < N; ++k) {
            const double d = points[p] - path.states[k];
            if (d > h[0] || d < -h[0]) continue;
            double w = kernel(d * inv_h) * inv_h * path.dt;
            if (k == 0 || k == N - 1) w *= 0.5;
            int bi = static_cast<int>(path.time(k) / delta);
            if (bi >= n) bi = n - 1;
            block[bi] += w;
        }
        double center;
        if (!centers.empty()) {
            center = centers[p];
        } else {
            double s = 0.0;
            for (double b : block) s += b;
            center = s / T;
        }
        for (int i = 0; i < n; ++i) Y[p][i] = (block[i] - center * delta) / std::sqrt(delta);
    }

    // overlapping windows via prefix sums
    std::vector<std::vector<double>> prefix(m, std::vector<double>(n + 1, 0.0));
    for (std::size_t p = 0; p < m; ++p)
        for (int i = 0; i < n; ++i) prefix[p][i + 1] = prefix[p][i] + Y[p][i];

    for (int b = 1; b <= n; ++b) rep.b_grid.push_back(b);
    const std::size_t npairs = m * m;
    rep.partial_avg.assign(npairs, std::vector<double>(rep.b_grid.size(), 0.0));
    for (std::size_t pi = 0; pi < m; ++pi)
        for (std::size_t pj = 0; pj < m; ++pj) {
            auto& row = rep.partial_avg[pi * m + pj];
            for (std::size_t bi = 0; bi < rep.b_grid.size(); ++bi) {
                const int b = static_cast<int>(rep.b_grid[bi]);
                double acc = 0.0;
                int cnt = 0;
                for (int s = 0; s + b <= n; ++s, ++cnt) {
                    const double si = prefix[pi][s + b] - prefix[pi][s];
                    const double sj = prefix[pj][s + b] - prefix[pj][s];
                    acc += si * sj / b;
                }
                row[bi] = acc / cnt;
            }
        }
    return rep;
}

void risk_to_csv(const RiskReport& rep, const std::string& filename) {
    CsvWriter csv(filename);
    if (rep.dim == 1)
        csv.header({"T", "h", "mse", "bias2", "variance", "se", "n_rep"});
    else
        csv.header({"T", "h", "mse", "bias2", "variance", "se", "n_rep", "mse_T_over_logT"});
    for (const auto& r : rep.rows) {
        std::vector<double> row{r.T, r.h, r.mse, r.bias2, r.variance, r.se,
                                static_cast<double>(r.n_rep)};
        if (rep.dim == 2) row.push_back(r.mse_T_over_logT);
        csv.row(row);
    }
}

void mixing_to_csv(const MixingReport& rep, const std::string& gu_file,
                   const std::string& summary_file) {
    if (!gu_file.empty()) {
        CsvWriter csv(gu_file);
        csv.header({"x", "y", "u", "ghat", "se"});
        for (std::size_t p = 0; p < rep.xs.size(); ++p)
            for (std::size_t ui = 0; ui < rep.u_grid.size(); ++ui)
                csv.row({rep.xs[p], rep.ys[p], rep.u_grid[ui], rep.ghat[p][ui],
                         rep.ghat_se[p][ui]});
    }
    if (!summary_file.empty()) {
        CsvWriter csv(summary_file);
        csv.header({"x", "y", "mu_x", "mu_y", "rho_hat", "wcl1_integral", "wcl2_integral",
                    "tail_residual", "sigma", "sigma_se"});
        for (std::size_t p = 0; p < rep.xs.size(); ++p)
            csv.row({rep.xs[p], rep.ys[p], rep.mu_x[p], rep.mu_y[p], rep.rho_hat[p],
                     rep.wcl1[p], rep.wcl2[p], rep.tail_residual[p], rep.sigma[p],
                     rep.sigma_se[p]});
    }
}

void clt_to_csv(const CltReport& rep, const std::string& points_file,
                const std::string& cov_file) {
    const int m = static_cast<int>(rep.points.size());
    if (!points_file.empty()) {
        CsvWriter csv(points_file);
        csv.header({"i", "x", "sigma_emp", "sigma_hat", "sigma_hat_se", "ks_p"});
        for (int i = 0; i < m; ++i)
            csv.row({static_cast<double>(i), rep.points[i], rep.sigma_emp[i * m + i],
                     rep.sigma_hat[i * m + i], rep.sigma_hat_se[i * m + i], rep.ks_p[i]});
    }
    if (!cov_file.empty()) {
        CsvWriter csv(cov_file);
        csv.header({"i", "j", "sigma_emp", "sigma_hat"});
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                csv.row({static_cast<double>(i), static_cast<double>(j),
                         rep.sigma_emp[i * m + j], rep.sigma_hat[i * m + j]});
    }
}

} // namespace jdlab
