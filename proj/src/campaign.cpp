#include "campaign.hpp"

#include "config.hpp"
#include "csvio.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "hypotheses.hpp"
#include "inverse_drift.hpp"
#include "kernel.hpp"
#include "model.hpp"
#include "simulate.hpp"
#include "smooth_profile.hpp"
#include "stats.hpp"
#include "worker_pool.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace jdlab {

namespace {

constexpr const char* kVersion = "jdlab 0.1.0";

struct EvalRange {
    double lo = 0.0, hi = 0.0, step = 0.0;
};

EvalRange parse_range(const std::string& spec, const std::string& what) {
    EvalRange r;
    std::istringstream in(spec);
    char c1 = 0, c2 = 0;
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':')
        throw ValidationError("config: " + what + " must look like lo:hi:step, got '" + spec +
                              "'");
    if (!(r.step > 0.0) || !(r.hi >= r.lo))
        throw ValidationError("config: " + what + " range is empty or has nonpositive step");
    return r;
}

LevyMeasure levy_from_config(const Config& cfg, int dim, std::vector<std::string>& problems) {
    const std::string kind = cfg.get_str("levy", "kind", "none");
    try {
        if (kind == "none") return LevyMeasure::none(dim);
        if (kind == "cpois_gauss") {
            const double intensity = cfg.require_num("levy", "intensity");
            std::vector<double> sigma = cfg.get_list("levy", "sigma", {1.0});
            if (sigma.size() == 1 && dim == 2) sigma.push_back(sigma[0]);
            const double alpha = cfg.get_num("levy", "alpha", 0.5);
            const double eps0 = cfg.get_num("levy", "eps0", 0.5);
            return LevyMeasure::compound_poisson_gauss(
                dim, intensity, {sigma[0], sigma.size() > 1 ? sigma[1] : sigma[0]}, alpha,
                eps0);
        }
        if (kind == "cpois_cauchy") {
            if (dim != 1) throw ValidationError("levy: cpois_cauchy is one-dimensional");
            return LevyMeasure::compound_poisson_cauchy(
                cfg.require_num("levy", "intensity"), cfg.get_num("levy", "scale", 1.0),
                cfg.get_num("levy", "alpha", 1.0), cfg.get_num("levy", "eps0", 0.5));
        }
        if (kind == "tempered_stable") {
            if (dim != 1) throw ValidationError("levy: tempered_stable is one-dimensional");
            return LevyMeasure::tempered_stable(
                cfg.get_num("levy", "coef", 0.1), cfg.get_num("levy", "alpha", 0.5),
                cfg.get_num("levy", "theta", 1.0), cfg.get_num("levy", "eps0", 0.4));
        }
        throw ValidationError("levy: unknown kind '" + kind + "'");
    } catch (const ValidationError& e) {
        problems.push_back(e.what());
        return LevyMeasure::none(dim);
    }
}

DriftFunction drift_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open drift table: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("drift table is empty: " + path);
    DriftFunction b;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("drift table needs x,b rows: " + path);
        xs.push_back(std::strtod(line.substr(0, comma).c_str(), nullptr));
        b.values.push_back(std::strtod(line.substr(comma + 1).c_str(), nullptr));
    }
    if (xs.size() < 2) throw ValidationError("drift table needs at least two rows: " + path);
    b.lo = xs.front();
    b.step = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::fabs(xs[i] - (b.lo + b.step * static_cast<double>(i))) > 1e-9 * (1.0 + std::fabs(xs[i])))
            throw ValidationError("drift table grid is not uniform: " + path);
    for (double v : b.values) {
        b.sup_norm = std::max(b.sup_norm, std::fabs(v));
    }
    for (std::size_t i = 1; i < b.values.size(); ++i)
        b.lipschitz_estimate =
            std::max(b.lipschitz_estimate, std::fabs(b.values[i] - b.values[i - 1]) / b.step);
    return b;
}

ModelSpec model_from_config(const Config& cfg, std::vector<std::string>& problems) {
    if (cfg.has("model", "id")) {
        try {
            return catalogue(cfg.require_str("model", "id"));
        } catch (const ValidationError& e) {
            problems.push_back(e.what());
            return catalogue("ou_d1");
        }
    }
    if (cfg.has("model", "drift_csv")) {
        DriftFunction b = drift_from_csv(cfg.require_str("model", "drift_csv"));
        const double a = cfg.get_num("model", "a", 1.0);
        const double gamma = cfg.get_num("model", "gamma", 1.0);
        LevyMeasure levy = levy_from_config(cfg, 1, problems);
        return model_from_drift(b, a, gamma, levy, "drift_csv");
    }
    problems.push_back("config: [model] needs either id or drift_csv");
    return catalogue("ou_d1");
}

std::uint64_t require_seed(const Config& cfg, std::vector<std::string>& problems) {
    if (!cfg.has("campaign", "seed")) {
        problems.push_back("config: [campaign] seed is required (no wall-clock default)");
        return 0;
    }
    return static_cast<std::uint64_t>(cfg.get_int("campaign", "seed", 0));
}

void fill_sim_cutoff(SimConfig& sim, const ModelSpec& model) {
    if (!model.levy.is_none() && !model.levy.finite_activity() && sim.small_jump_cutoff == 0.0)
        sim.small_jump_cutoff = pick_small_jump_cutoff(model.levy);
}

struct ArtifactSet {
    std::vector<std::pair<std::string, std::function<void(const std::string&)>>> writers;
    void add(const std::string& name, std::function<void(const std::string&)> fn) {
        writers.emplace_back(name, std::move(fn));
    }
};

void raise_if_problems(const std::vector<std::string>& problems) {
    if (problems.empty()) return;
    std::ostringstream os;
    os << problems.size() << " validation problem(s):";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ValidationError(os.str());
}

} // namespace

CampaignOutcome run_campaign(const std::string& config_text, const std::string& out_dir,
                             int workers) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();
    CampaignOutcome outcome;
    try {
        Config cfg = Config::parse(config_text);
        std::vector<std::string> problems;
        const std::string command = cfg.get_str("campaign", "command", "");
        if (command.empty()) problems.push_back("config: [campaign] command is required");
        if (out_dir.empty()) problems.push_back("output directory is required");

        ArtifactSet artifacts;
        ManifestWriter manifest((fs::path(out_dir) / "manifest.txt").string());
        manifest.set("version", std::string(kVersion));
        manifest.set("command", command);
        manifest.set("workers", static_cast<long long>(workers));

        const KernelSpec kernel = build_kernel(
            static_cast<int>(cfg.get_int("campaign", "kernel_order", 1)));
        manifest.set("kernel_order", static_cast<long long>(kernel.order));

        if (command == "simulate" || command == "estimate") {
            ModelSpec model = model_from_config(cfg, problems);
            const std::uint64_t seed = require_seed(cfg, problems);
            SimConfig sim;
            if (!cfg.has("sim", "T")) problems.push_back("config: [sim] T is required");
            sim.horizon = cfg.get_num("sim", "T", 100.0);
            sim.dt = cfg.get_num("sim", "dt", 0.01);
            sim.burn_in = cfg.get_num("sim", "burn_in", 10.0);
            sim.seed = seed;
            sim.small_jump_cutoff = cfg.get_num("sim", "cutoff", 0.0);
            fill_sim_cutoff(sim, model);
            raise_if_problems(problems);

            if (command == "simulate") {
                PathRecord path =
                    simulate_rep(model, sim, static_cast<std::uint64_t>(cfg.get_int("sim", "rep", 0)));
                manifest.set("model", model.id);
                manifest.set("n_jumps", static_cast<long long>(path.n_jumps));
                artifacts.add("path.csv",
                              [p = std::move(path)](const std::string& f) { path_to_csv(p, f); });
            } else {
                EvalRange r1 = parse_range(cfg.get_str("estimate", "eval", "-4:4:0.25"),
                                           "[estimate] eval");
                EstimateConfig ec;
                if (model.dim == 1) {
                    for (double x = r1.lo; x <= r1.hi + 1e-12; x += r1.step)
                        ec.eval_points.push_back({x, 0.0});
                } else {
                    EvalRange r2 = parse_range(
                        cfg.get_str("estimate", "eval2", cfg.get_str("estimate", "eval", "-4:4:0.25")),
                        "[estimate] eval2");
                    for (double x = r1.lo; x <= r1.hi + 1e-12; x += r1.step)
                        for (double y = r2.lo; y <= r2.hi + 1e-12; y += r2.step)
                            ec.eval_points.push_back({x, y});
                }
                const std::string hs = cfg.get_str("estimate", "h", "auto");
                if (hs == "auto") {
                    ec.bandwidth = default_bandwidth(sim.horizon, model.dim);
                } else {
                    const double h = cfg.require_num("estimate", "h");
                    ec.bandwidth = {h, h};
                }
                PathRecord path = simulate_path(model, sim);
                DensityEstimate est = estimate_density(path, kernel, ec);
                manifest.set("model", model.id);
                manifest.set("h", ec.bandwidth[0]);
                const int dim = model.dim;
                artifacts.add("density.csv", [est = std::move(est), dim](const std::string& f) {
                    density_to_csv(est, dim, f);
                });
            }
        } else if (command == "rate") {
            ModelSpec model = model_from_config(cfg, problems);
            const std::uint64_t seed = require_seed(cfg, problems);
            if (!cfg.has("rate", "T_grid")) problems.push_back("config: [rate] T_grid is required");
            if (!cfg.has("rate", "n_rep")) problems.push_back("config: [rate] n_rep is required");
            std::vector<double> T_grid = cfg.get_list("rate", "T_grid", {250, 500, 1000, 2000});
            const int n_rep = static_cast<int>(cfg.get_int("rate", "n_rep", 100));
            std::vector<double> x = cfg.get_list("rate", "x", {0.0});
            if (model.dim == 2 && x.size() == 1) x.push_back(x[0]);
            const double dt = cfg.get_num("rate", "dt", model.dim == 1 ? 0.005 : 0.01);

            ReferenceSpec ref;
            const std::string mode = cfg.get_str("reference", "mode",
                                                 model.has_closed_form() ? "closed_form" : "longrun");
            if (mode == "closed_form") {
                ref.mode = ReferenceSpec::Mode::ClosedForm;
            } else if (mode == "longrun") {
                ref.mode = ReferenceSpec::Mode::LongRun;
                ref.T = cfg.get_num("reference", "T", 1e6);
                ref.dt = cfg.get_num("reference", "dt", dt);
                ref.seed = static_cast<std::uint64_t>(cfg.get_int("reference", "seed", 99991));
                ref.cache_dir = cfg.get_str("reference", "cache", "");
            } else {
                problems.push_back("config: [reference] mode must be closed_form or longrun");
            }
            raise_if_problems(problems);

            RiskReport report = rate_study(model, kernel, T_grid, x.data(), n_rep, seed, dt,
                                           ref, workers);
            manifest.set("model", model.id);
            manifest.set("slope", report.slope);
            manifest.set("slope_se", report.slope_se);
            manifest.set("reference", report.reference);
            artifacts.add("risk.csv", [r = report](const std::string& f) { risk_to_csv(r, f); });
            artifacts.add("rate_summary.csv", [r = report](const std::string& f) {
                CsvWriter csv(f);
                csv.header({"slope", "slope_se", "reference", "x"});
                csv.row({r.slope, r.slope_se, r.reference, r.x[0]});
            });
        } else if (command == "clt") {
            ModelSpec model = model_from_config(cfg, problems);
            const std::uint64_t seed = require_seed(cfg, problems);
            if (!cfg.has("clt", "T")) problems.push_back("config: [clt] T is required");
            if (!cfg.has("clt", "n_rep")) problems.push_back("config: [clt] n_rep is required");
            if (!cfg.has("clt", "points")) problems.push_back("config: [clt] points is required");
            const double T = cfg.get_num("clt", "T", 2000.0);
            const int n_rep = static_cast<int>(cfg.get_int("clt", "n_rep", 500));
            std::vector<double> points = cfg.get_list("clt", "points", {0.0});
            const double eps = cfg.get_num("clt", "eps", 0.1);
            const double dt = cfg.get_num("clt", "dt", 0.005);
            MixingConfig mix;
            mix.n_paths = static_cast<int>(cfg.get_int("mixing", "n_paths", 10));
            mix.T = cfg.get_num("mixing", "T", 20000.0);
            mix.dt = cfg.get_num("mixing", "dt", 0.01);
            mix.h_pair = cfg.get_num("mixing", "h_pair", 0.15);
            mix.u0 = cfg.get_num("mixing", "u0", 2.0);
            mix.u_max = cfg.get_num("mixing", "u_max", 12.0);
            mix.du_fine = cfg.get_num("mixing", "du_fine", 0.02);
            mix.du_coarse = cfg.get_num("mixing", "du_coarse", 0.2);
            mix.seed = static_cast<std::uint64_t>(cfg.get_int("mixing", "seed", 0));
            raise_if_problems(problems);

            CltReport report =
                clt_study(model, kernel, T, points, n_rep, eps, seed, dt, mix, workers);
            manifest.set("model", model.id);
            manifest.set("h", report.h);
            artifacts.add("clt_points.csv", [r = report](const std::string& f) {
                clt_to_csv(r, f, "");
            });
            artifacts.add("clt_cov.csv", [r = report](const std::string& f) {
                clt_to_csv(r, "", f);
            });
        } else if (command == "mixing") {
            ModelSpec model = model_from_config(cfg, problems);
            const std::uint64_t seed = require_seed(cfg, problems);
            if (!cfg.has("mixing", "x")) problems.push_back("config: [mixing] x is required");
            std::vector<double> xs = cfg.get_list("mixing", "x", {0.0});
            std::vector<double> ys = cfg.get_list("mixing", "y", xs);
            if (ys.size() != xs.size())
                problems.push_back("config: [mixing] x and y must have equal length");
            MixingConfig mix;
            mix.n_paths = static_cast<int>(cfg.get_int("mixing", "n_paths", 10));
            mix.T = cfg.get_num("mixing", "T", 20000.0);
            mix.dt = cfg.get_num("mixing", "dt", 0.01);
            mix.h_pair = cfg.get_num("mixing", "h_pair", 0.15);
            mix.u0 = cfg.get_num("mixing", "u0", 2.0);
            mix.u_max = cfg.get_num("mixing", "u_max", 12.0);
            mix.du_fine = cfg.get_num("mixing", "du_fine", 0.02);
            mix.du_coarse = cfg.get_num("mixing", "du_coarse", 0.2);
            mix.seed = seed;
            raise_if_problems(problems);

            MixingReport report = estimate_gu(model, xs, ys, mix, workers);
            manifest.set("model", model.id);
            artifacts.add("gu.csv", [r = report](const std::string& f) {
                mixing_to_csv(r, f, "");
            });
            artifacts.add("mixing_summary.csv", [r = report](const std::string& f) {
                mixing_to_csv(r, "", f);
            });
        } else if (command == "invert-drift") {
            const std::string fkind = cfg.get_str("invert", "f", "f0");
            const double a = cfg.get_num("invert", "a", 1.0);
            const double gamma = cfg.get_num("invert", "gamma", 1.0);
            LevyMeasure levy = levy_from_config(cfg, 1, problems);
            DensitySpec density;
            if (fkind == "f0") {
                const double eta = cfg.get_num("invert", "eta", 0.25);
                if (!levy.is_none() && !check_c4_condition(a, gamma, levy.c4())) {
                    std::ostringstream os;
                    os << "constant gate failed: jump exponential moment c4=" << levy.c4()
                       << " must stay below a^2/(2 gamma^2 * 16 * 28) = "
                       << a * a / (2.0 * gamma * gamma * 16.0 * 28.0);
                    problems.push_back(os.str());
                } else {
                    density = to_density_spec(build_f0(eta, 1, nullptr));
                }
            } else if (fkind == "gaussian") {
                density = gaussian_density(cfg.get_num("invert", "variance", 0.5));
            } else {
                problems.push_back("config: [invert] f must be f0 or gaussian");
            }
            raise_if_problems(problems);

            DriftGrid grid;
            grid.lo = cfg.get_num("invert", "grid_lo", -30.0);
            grid.hi = cfg.get_num("invert", "grid_hi", 30.0);
            grid.step = cfg.get_num("invert", "grid_step", 0.01);
            DriftFunction drift = build_drift(density, a, gamma, levy, grid);
            ConditionReport conds = audit_proposition_conditions(density, a, gamma, levy);
            manifest.set("f", fkind);
            manifest.set("drift_sup_norm", drift.sup_norm);
            manifest.set("drift_lipschitz", drift.lipschitz_estimate);
            manifest.set("conditions_pass", conds.all_pass() ? "true" : "false");
            artifacts.add("drift.csv",
                          [d = drift](const std::string& f) { drift_to_csv(d, f); });
            artifacts.add("conditions.csv", [c = conds](const std::string& f) {
                CsvWriter csv(f);
                csv.header({"condition", "pass", "worst_point", "margin", "detail"});
                for (const auto& v : c.conditions)
                    csv.raw_row({v.name, v.pass ? "1" : "0", format_double(v.worst_point),
                                 format_double(v.margin), v.detail});
            });
            if (cfg.get_bool("invert", "roundtrip", false)) {
                const std::uint64_t seed = require_seed(cfg, problems);
                raise_if_problems(problems);
                SimConfig sim;
                sim.horizon = cfg.get_num("invert", "roundtrip_T", 5000.0);
                sim.dt = cfg.get_num("invert", "roundtrip_dt", 0.005);
                sim.burn_in = cfg.get_num("invert", "burn_in", 10.0);
                sim.seed = seed;
                const int n_rep = static_cast<int>(cfg.get_int("invert", "roundtrip_reps", 50));
                EvalRange er =
                    parse_range(cfg.get_str("invert", "roundtrip_eval", "-8:8:0.5"),
                                "[invert] roundtrip_eval");
                RoundtripReport rt = roundtrip_invariance(density, drift, a, gamma, levy, sim,
                                                          n_rep, kernel, er.lo, er.hi, er.step,
                                                          workers);
                manifest.set("roundtrip_sup_error", rt.sup_error);
                manifest.set("roundtrip_max_se", rt.max_se);
                artifacts.add("roundtrip.csv", [r = rt](const std::string& f) {
                    CsvWriter csv(f);
                    csv.header({"x", "mu_hat", "se", "target"});
                    for (std::size_t i = 0; i < r.grid.size(); ++i)
                        csv.row({r.grid[i], r.mu_hat[i], r.se[i], r.f_target[i]});
                });
            }
        } else if (command == "lower-bound") {
            const int dim = static_cast<int>(cfg.get_int("lower_bound", "dim", 2));
            const double eta = cfg.get_num("lower_bound", "eta", 0.25);
            if (!cfg.has("lower_bound", "T_list"))
                problems.push_back("config: [lower_bound] T_list is required");
            std::vector<double> T_list = cfg.get_list("lower_bound", "T_list", {1e4});
            LevyMeasure levy = levy_from_config(cfg, dim, problems);
            const BumpSpec bump = build_bump();
            raise_if_problems(problems);

            if (dim == 1) {
                const double a = cfg.get_num("lower_bound", "a", 1.0);
                const double gamma = cfg.get_num("lower_bound", "gamma", 1.0);
                const double H = cfg.get_num("lower_bound", "H", 0.25);
                const double x0 = cfg.get_num("lower_bound", "x0", 0.0);
                const double gate_eps = cfg.get_num("lower_bound", "gate_eps", 1.0);
                const double beta = cfg.get_num("lower_bound", "beta", 1.0);
                BaseDensity base = build_f0(eta, 1, nullptr);
                const bool c4_ok =
                    levy.is_none() || check_c4_condition(a, gamma, levy.c4());
                std::vector<std::vector<double>> rows;
                for (double T : T_list) {
                    const double M_T = std::sqrt(T);
                    HypothesisFamilyD1 fam =
                        build_family_d1(base, bump, x0, H, M_T, gate_eps, beta);
                    rows.push_back({T, M_T, H, fam.girsanov_budget(T),
                                    fam.f1(x0) - fam.f0(x0), c4_ok ? 1.0 : 0.0});
                }
                manifest.set("dim", static_cast<long long>(1));
                artifacts.add("family_d1.csv", [rows](const std::string& f) {
                    CsvWriter csv(f);
                    csv.header({"T", "M_T", "H", "girsanov_budget", "separation_at_x0",
                                "c4_gate"});
                    for (const auto& r : rows) csv.row(r);
                });
            } else {
                const double a_scalar = cfg.get_num("lower_bound", "a", 1.0);
                const std::array<double, 4> a{a_scalar, 0.0, 0.0, a_scalar};
                const std::array<double, 4> aaT{a_scalar * a_scalar, 0.0, 0.0,
                                                a_scalar * a_scalar};
                const std::array<double, 2> gamma{cfg.get_num("lower_bound", "gamma", 1.0),
                                                  cfg.get_num("lower_bound", "gamma", 1.0)};
                const double alpha_exp = cfg.get_num("lower_bound", "alpha", 0.5);
                const double v_frac = cfg.get_num("lower_bound", "v_frac", 0.5);
                const double gate_eps = cfg.get_num("lower_bound", "gate_eps", 1.0);
                std::vector<double> beta = cfg.get_list("lower_bound", "beta", {1.0, 1.0});
                BaseDensity base = build_f0(eta, 2, aaT.data());
                const double k = base.k_max;
                const double v_cap2 = base.c_eta * base.c_eta * alpha_exp /
                                      (1024.0 * k * k * std::exp(8.0 * eta * k));
                const double v = std::sqrt(v_frac * v_cap2);
                manifest.set("dim", static_cast<long long>(2));
                manifest.set("v", v);
                manifest.set("c_eta", base.c_eta);

                std::vector<std::vector<double>> summary;
                std::vector<std::vector<double>> separation;
                std::vector<std::pair<std::string, std::vector<KlRow>>> kl_tables;
                for (double T : T_list) {
                    const double H = std::pow(std::log(T) / T, alpha_exp);
                    HypothesisFamilyD2 fam = build_family_d2(base, bump, H, H, v, T, gate_eps,
                                                             {beta[0], beta.size() > 1 ? beta[1] : beta[0]});
                    LowerBoundMachinery mach(fam, a, gamma, levy);
                    std::vector<KlRow> rows = mach.kl_all();
                    double avg_ratio = 0.0;
                    double worst_excess = 0.0;
                    for (const auto& r : rows) {
                        avg_ratio += r.ratio_to_log_JT / rows.size();
                        worst_excess = std::max(worst_excess, r.girsanov_term - r.prop_bound);
                    }
                    summary.push_back({T, H, static_cast<double>(fam.count()), fam.psi,
                                       avg_ratio, worst_excess});
                    // pairwise separation at bump centres
                    for (int j1 = 1; j1 <= fam.n1; ++j1)
                        for (int j2 = 1; j2 <= fam.n2; ++j2)
                            for (int k1 = 1; k1 <= fam.n1; ++k1)
                                for (int k2 = 1; k2 <= fam.n2; ++k2) {
                                    if (j1 == k1 && j2 == k2) continue;
                                    const auto c = fam.center(j1, j2);
                                    const double x[2] = {c[0], c[1]};
                                    const double sep =
                                        std::fabs(fam.fj(j1, j2, x) - fam.fj(k1, k2, x));
                                    if (j1 + j2 + k1 + k2 <= 6) // keep the file small
                                        separation.push_back({T, static_cast<double>(j1),
                                                              static_cast<double>(j2),
                                                              static_cast<double>(k1),
                                                              static_cast<double>(k2), sep,
                                                              2.0 * fam.psi});
                                }
                    std::ostringstream name;
                    name << "kl_T" << format_double(T) << ".csv";
                    kl_tables.emplace_back(name.str(), std::move(rows));
                }
                for (auto& [name, rows] : kl_tables) {
                    artifacts.add(name, [rows = rows](const std::string& f) {
                        kl_rows_to_csv(rows, f);
                    });
                }
                artifacts.add("separation.csv", [separation](const std::string& f) {
                    CsvWriter csv(f);
                    csv.header({"T", "j1", "j2", "k1", "k2", "gap_at_center", "two_psi"});
                    for (const auto& r : separation) csv.row(r);
                });
                artifacts.add("lb_summary.csv", [summary](const std::string& f) {
                    CsvWriter csv(f);
                    csv.header({"T", "H", "J_T", "psi", "avg_kl_ratio", "worst_girsanov_excess"});
                    for (const auto& r : summary) csv.row(r);
                });
            }
        } else {
            problems.push_back("config: unknown command '" + command + "'");
            raise_if_problems(problems);
        }

        // everything computed; write artifacts and the manifest
        fs::create_directories(out_dir);
        for (auto& [name, writer] : artifacts.writers)
            writer((fs::path(out_dir) / name).string());
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        manifest.set("wall_time_s", wall);
        manifest.write();
        {
            std::ofstream app((fs::path(out_dir) / "manifest.txt").string(), std::ios::app);
            app << "\n# resolved configuration\n" << cfg.dump();
            if (!app) throw IoError("cannot finalise manifest");
        }
        return outcome;
    } catch (const ValidationError& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
        return outcome;
    } catch (const NumericError& e) {
        outcome.exit_code = 3;
        outcome.message = e.what();
        return outcome;
    } catch (const IoError& e) {
        outcome.exit_code = 4;
        outcome.message = e.what();
        return outcome;
    } catch (const std::exception& e) {
        outcome.exit_code = 3;
        outcome.message = e.what();
        return outcome;
    }
}

} // namespace jdlab
