// Command-line front end: maps subcommand flags onto a campaign
// configuration and hands it to the shared library through the C API.
// Exit codes: 0 ok, 2 validation, 3 numeric failure, 4 I/O.

#include "jdlab/jdlab.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommonOpts {
    std::string out_dir;
    std::string config_file;
    long long seed = -1;
    int workers = 0;
    int kernel_order = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_seed = true) {
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--config", opts.config_file,
                    "read additional keys from a configuration file");
    if (needs_seed)
        cmd->add_option("--seed", opts.seed, "base seed (required; no wall-clock default)");
    cmd->add_option("--workers", opts.workers, "worker threads (default: hardware)");
    cmd->add_option("--kernel-order", opts.kernel_order, "vanishing-moment order");
}

class ConfigText {
public:
    void set(const std::string& section, const std::string& key, const std::string& value) {
        sections_[section] += "  " + key + " = " + value + "\n";
    }
    void set_num(const std::string& section, const std::string& key, double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        set(section, key, os.str());
    }
    void set_int(const std::string& section, const std::string& key, long long v) {
        set(section, key, std::to_string(v));
    }
    std::string str() const {
        std::string out;
        for (const auto& [name, body] : sections_) {
            out += "[" + name + "]\n" + body + "\n";
        }
        return out;
    }

private:
    std::map<std::string, std::string> sections_;
};

int run(const ConfigText& text, const CommonOpts& opts, const std::string& command,
        bool needs_seed = true) {
    ConfigText full = text;
    full.set("campaign", "command", command);
    if (opts.seed >= 0) full.set_int("campaign", "seed", opts.seed);
    if (opts.kernel_order != 1) full.set_int("campaign", "kernel_order", opts.kernel_order);
    (void)needs_seed;
    std::string config = full.str();
    if (!opts.config_file.empty()) {
        std::ifstream in(opts.config_file);
        if (!in) {
            std::fprintf(stderr, "error: cannot open config file %s\n",
                         opts.config_file.c_str());
            return JDL_ERR_IO;
        }
        std::stringstream extra;
        extra << in.rdbuf();
        config += "\n" + extra.str();
    }
    const int rc = jdl_run_campaign(config.c_str(), opts.out_dir.c_str(), opts.workers);
    if (rc != 0) std::fprintf(stderr, "error: %s\n", jdl_last_error());
    return rc;
}

std::string join_list(const std::vector<double>& xs) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ",";
        os << xs[i];
    }
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"jdlab: invariant-density estimation lab for jump diffusions"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate one trajectory");
    CommonOpts sim_opts;
    std::string sim_model = "ou_d1";
    double sim_T = 100.0, sim_dt = 0.01, sim_burn = 10.0;
    add_common(sim, sim_opts);
    sim->add_option("--model", sim_model, "catalogue model id");
    sim->add_option("--T", sim_T, "time horizon");
    sim->add_option("--dt", sim_dt, "grid step");
    sim->add_option("--burn-in", sim_burn, "discarded lead-in");
    sim->callback([&]() {
        ConfigText t;
        t.set("model", "id", sim_model);
        t.set_num("sim", "T", sim_T);
        t.set_num("sim", "dt", sim_dt);
        t.set_num("sim", "burn_in", sim_burn);
        std::exit(run(t, sim_opts, "simulate"));
    });

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "simulate and estimate the stationary density");
    CommonOpts est_opts;
    std::string est_model = "ou_d1", est_eval = "-4:4:0.25", est_h = "auto";
    double est_T = 1000.0, est_dt = 0.01;
    add_common(est, est_opts);
    est->add_option("--model", est_model, "catalogue model id");
    est->add_option("--T", est_T, "time horizon");
    est->add_option("--dt", est_dt, "grid step");
    est->add_option("--eval", est_eval, "evaluation grid lo:hi:step");
    est->add_option("--h", est_h, "bandwidth (number or 'auto')");
    est->callback([&]() {
        ConfigText t;
        t.set("model", "id", est_model);
        t.set_num("sim", "T", est_T);
        t.set_num("sim", "dt", est_dt);
        t.set("estimate", "eval", est_eval);
        t.set("estimate", "h", est_h);
        std::exit(run(t, est_opts, "estimate"));
    });

    // ---- rate ----
    auto* rate = app.add_subcommand("rate", "pointwise risk across a horizon grid");
    CommonOpts rate_opts;
    std::string rate_model = "ou_d1", rate_ref_mode, rate_cache;
    std::vector<double> rate_T{250, 500, 1000, 2000, 4000}, rate_x{0.0};
    long long rate_reps = 100;
    double rate_dt = 0.0, rate_ref_T = 1e6;
    add_common(rate, rate_opts);
    rate->add_option("--model", rate_model, "catalogue model id");
    rate->add_option("--T", rate_T, "horizon grid (geometric, ratio >= 2)")->delimiter(',');
    rate->add_option("--reps", rate_reps, "replications per horizon");
    rate->add_option("--x", rate_x, "evaluation point")->delimiter(',');
    rate->add_option("--dt", rate_dt, "grid step (0 = default)");
    rate->add_option("--ref", rate_ref_mode, "reference mode: closed_form or longrun");
    rate->add_option("--ref-T", rate_ref_T, "long-run reference horizon");
    rate->add_option("--ref-cache", rate_cache, "reference cache directory");
    rate->callback([&]() {
        ConfigText t;
        t.set("model", "id", rate_model);
        t.set("rate", "T_grid", join_list(rate_T));
        t.set_int("rate", "n_rep", rate_reps);
        t.set("rate", "x", join_list(rate_x));
        if (rate_dt > 0.0) t.set_num("rate", "dt", rate_dt);
        if (!rate_ref_mode.empty()) t.set("reference", "mode", rate_ref_mode);
        t.set_num("reference", "T", rate_ref_T);
        if (!rate_cache.empty()) t.set("reference", "cache", rate_cache);
        std::exit(run(t, rate_opts, "rate"));
    });

    // ---- clt ----
    auto* clt = app.add_subcommand("clt", "fluctuation normality and covariance study");
    CommonOpts clt_opts;
    std::string clt_model = "tanh_cpois_d1";
    std::vector<double> clt_points{0.0, 1.0};
    double clt_T = 2000.0, clt_eps = 0.1, clt_dt = 0.005;
    long long clt_reps = 500;
    add_common(clt, clt_opts);
    clt->add_option("--model", clt_model, "catalogue model id");
    clt->add_option("--T", clt_T, "time horizon");
    clt->add_option("--reps", clt_reps, "replications");
    clt->add_option("--points", clt_points, "evaluation points")->delimiter(',');
    clt->add_option("--eps", clt_eps, "bandwidth exponent offset in (0, 1/2)");
    clt->add_option("--dt", clt_dt, "grid step");
    clt->callback([&]() {
        ConfigText t;
        t.set("model", "id", clt_model);
        t.set_num("clt", "T", clt_T);
        t.set_int("clt", "n_rep", clt_reps);
        t.set("clt", "points", join_list(clt_points));
        t.set_num("clt", "eps", clt_eps);
        t.set_num("clt", "dt", clt_dt);
        std::exit(run(t, clt_opts, "clt"));
    });

    // ---- mixing ----
    auto* mix = app.add_subcommand("mixing", "lag-correlation diagnostics");
    CommonOpts mix_opts;
    std::string mix_model = "tanh_cpois_d1";
    std::vector<double> mix_x{0.0}, mix_y;
    double mix_T = 20000.0, mix_umax = 12.0;
    long long mix_paths = 10;
    add_common(mix, mix_opts);
    mix->add_option("--model", mix_model, "catalogue model id");
    mix->add_option("--x", mix_x, "first coordinates")->delimiter(',');
    mix->add_option("--y", mix_y, "second coordinates (default: same as x)")->delimiter(',');
    mix->add_option("--T", mix_T, "record length per path");
    mix->add_option("--paths", mix_paths, "independent records");
    mix->add_option("--umax", mix_umax, "largest lag");
    mix->callback([&]() {
        ConfigText t;
        t.set("model", "id", mix_model);
        t.set("mixing", "x", join_list(mix_x));
        if (!mix_y.empty()) t.set("mixing", "y", join_list(mix_y));
        t.set_num("mixing", "T", mix_T);
        t.set_int("mixing", "n_paths", mix_paths);
        t.set_num("mixing", "u_max", mix_umax);
        std::exit(run(t, mix_opts, "mixing"));
    });

    // ---- invert-drift ----
    auto* inv = app.add_subcommand("invert-drift",
                                   "construct the drift that makes a density stationary");
    CommonOpts inv_opts;
    std::string inv_f = "f0", inv_levy = "none", inv_grid = "";
    double inv_eta = 0.25, inv_a = 1.0, inv_gamma = 1.0, inv_var = 0.5;
    double inv_intensity = 0.0, inv_sigma = 0.3, inv_eps0 = 0.3;
    bool inv_roundtrip = false;
    double inv_rt_T = 5000.0;
    long long inv_rt_reps = 50;
    add_common(inv, inv_opts);
    inv->add_option("--f", inv_f, "target density: f0 or gaussian");
    inv->add_option("--eta", inv_eta, "tail rate of the base density");
    inv->add_option("--variance", inv_var, "gaussian target variance");
    inv->add_option("--a", inv_a, "diffusion constant");
    inv->add_option("--gamma", inv_gamma, "jump coefficient");
    inv->add_option("--levy", inv_levy, "jump measure: none or cpois_gauss");
    inv->add_option("--levy-intensity", inv_intensity, "jump intensity");
    inv->add_option("--levy-sigma", inv_sigma, "jump mark std deviation");
    inv->add_option("--levy-eps0", inv_eps0, "exponential moment rate");
    inv->add_option("--grid", inv_grid, "drift table grid lo:hi:step");
    inv->add_flag("--roundtrip", inv_roundtrip, "simulate the inverted model and compare");
    inv->add_option("--roundtrip-T", inv_rt_T, "roundtrip horizon");
    inv->add_option("--roundtrip-reps", inv_rt_reps, "roundtrip replications");
    inv->callback([&]() {
        ConfigText t;
        t.set("invert", "f", inv_f);
        t.set_num("invert", "eta", inv_eta);
        t.set_num("invert", "variance", inv_var);
        t.set_num("invert", "a", inv_a);
        t.set_num("invert", "gamma", inv_gamma);
        if (!inv_grid.empty()) {
            std::istringstream gs(inv_grid);
            double lo, hi, step;
            char c;
            if (gs >> lo >> c >> hi >> c >> step) {
                t.set_num("invert", "grid_lo", lo);
                t.set_num("invert", "grid_hi", hi);
                t.set_num("invert", "grid_step", step);
            }
        }
        t.set("levy", "kind", inv_levy);
        if (inv_levy != "none") {
            t.set_num("levy", "intensity", inv_intensity);
            t.set_num("levy", "sigma", inv_sigma);
            t.set_num("levy", "eps0", inv_eps0);
        }
        if (inv_roundtrip) {
            t.set("invert", "roundtrip", "true");
            t.set_num("invert", "roundtrip_T", inv_rt_T);
            t.set_int("invert", "roundtrip_reps", inv_rt_reps);
        }
        std::exit(run(t, inv_opts, "invert-drift"));
    });

    // ---- lower-bound ----
    auto* lb = app.add_subcommand("lower-bound",
                                  "hypothesis families and divergence bounds");
    CommonOpts lb_opts;
    std::vector<double> lb_T{1e4, 1e5, 1e6};
    double lb_eta = 0.25, lb_alpha = 0.5, lb_vfrac = 0.5, lb_a = 1.0, lb_gamma = 1.0;
    double lb_intensity = 0.5, lb_sigma = 0.5;
    long long lb_dim = 2;
    add_common(lb, lb_opts, false);
    lb->add_option("--dim", lb_dim, "dimension (1 or 2)");
    lb->add_option("--T", lb_T, "horizons")->delimiter(',');
    lb->add_option("--eta", lb_eta, "tail rate of the base density");
    lb->add_option("--alpha", lb_alpha, "bandwidth exponent: H = (log T / T)^alpha");
    lb->add_option("--vfrac", lb_vfrac, "fraction of the amplitude cap");
    lb->add_option("--a", lb_a, "diffusion constant (isotropic)");
    lb->add_option("--gamma", lb_gamma, "jump coefficient (diagonal)");
    lb->add_option("--levy-intensity", lb_intensity, "jump intensity");
    lb->add_option("--levy-sigma", lb_sigma, "jump mark std deviation");
    lb->callback([&]() {
        ConfigText t;
        t.set_int("lower_bound", "dim", lb_dim);
        t.set("lower_bound", "T_list", join_list(lb_T));
        t.set_num("lower_bound", "eta", lb_eta);
        t.set_num("lower_bound", "alpha", lb_alpha);
        t.set_num("lower_bound", "v_frac", lb_vfrac);
        t.set_num("lower_bound", "a", lb_a);
        t.set_num("lower_bound", "gamma", lb_gamma);
        if (lb_intensity > 0.0) {
            t.set("levy", "kind", "cpois_gauss");
            t.set_num("levy", "intensity", lb_intensity);
            t.set_num("levy", "sigma", lb_sigma);
        }
        std::exit(run(t, lb_opts, "lower-bound", false));
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
