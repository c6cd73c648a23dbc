#include "simulate.hpp"

#include "csvio.hpp"
#include "errors.hpp"
#include "worker_pool.hpp"

#include <cmath>
#include <sstream>

namespace jdlab {

void SimConfig::validate(const ModelSpec& spec) const {
    if (!(horizon > 0.0)) throw ValidationError("sim: horizon must be > 0");
    if (!(dt > 0.0)) throw ValidationError("sim: dt must be > 0");
    if (dt > horizon) throw ValidationError("sim: dt must not exceed the horizon");
    if (burn_in < 0.0) throw ValidationError("sim: burn_in must be >= 0");
    if (!spec.levy.is_none() && !spec.levy.finite_activity() && !(small_jump_cutoff > 0.0))
        throw ValidationError(
            "sim: infinite-activity jump measure requires small_jump_cutoff > 0");
}

namespace {

struct StepCounts {
    std::uint64_t burn = 0;
    std::uint64_t main = 0;
};

StepCounts step_counts(const SimConfig& cfg) {
    StepCounts c;
    c.burn = static_cast<std::uint64_t>(std::llround(cfg.burn_in / cfg.dt));
    c.main = static_cast<std::uint64_t>(std::llround(cfg.horizon / cfg.dt));
    if (c.main == 0) c.main = 1;
    return c;
}

} // namespace

PathRecord simulate_rep(const ModelSpec& spec, const SimConfig& cfg, std::uint64_t replication) {
    cfg.validate(spec);
    const int d = spec.dim;
    const StepCounts counts = step_counts(cfg);
    const std::uint64_t key = derive_key(cfg.seed, replication);

    const bool has_jumps = !spec.levy.is_none();
    const double rate = has_jumps ? spec.levy.rate_above(cfg.small_jump_cutoff) : 0.0;
    const double jump_mean_rate = rate * cfg.dt;
    double comp[2] = {0.0, 0.0}; // compensator drift gamma * mean_jump
    if (has_jumps)
        for (int i = 0; i < d; ++i) comp[i] = spec.levy.mean_jump(i);

    // constant-coefficient fast path
    double a_const[4] = {0, 0, 0, 0}, g_const[4] = {0, 0, 0, 0};
    if (spec.constant_coeffs) {
        spec.diffusion(spec.x0.data(), a_const);
        spec.jump_coeff(spec.x0.data(), g_const);
    }

    PathRecord path;
    path.dim = d;
    path.dt = cfg.dt;
    path.model_id = spec.id;
    path.seed = cfg.seed;
    path.replication = replication;
    path.states.resize((counts.main + 1) * d);

    double x[2] = {spec.x0[0], spec.x0[1]};
    double bx[2], am[4], gm[4], z[2];
    const double sqdt = std::sqrt(cfg.dt);
    const std::uint64_t total = counts.burn + counts.main;

    auto record = [&](std::uint64_t k) {
        for (int i = 0; i < d; ++i) path.states[k * d + i] = x[i];
    };
    if (counts.burn == 0) record(0);

    for (std::uint64_t step = 0; step < total; ++step) {
        RandomStream rng(key, step);
        spec.drift(x, bx);
        const double* A = a_const;
        const double* G = g_const;
        if (!spec.constant_coeffs) {
            spec.diffusion(x, am);
            spec.jump_coeff(x, gm);
            A = am;
            G = gm;
        }
        double xi[2] = {rng.normal(), 0.0};
        if (d == 2) xi[1] = rng.normal();

        double nx[2] = {0.0, 0.0};
        if (d == 1) {
            nx[0] = x[0] + bx[0] * cfg.dt + A[0] * sqdt * xi[0];
        } else {
            nx[0] = x[0] + bx[0] * cfg.dt + (A[0] * xi[0] + A[1] * xi[1]) * sqdt;
            nx[1] = x[1] + bx[1] * cfg.dt + (A[2] * xi[0] + A[3] * xi[1]) * sqdt;
        }
        if (has_jumps) {
            const int k = rng.poisson(jump_mean_rate);
            for (int j = 0; j < k; ++j) {
                spec.levy.sample_mark(rng, cfg.small_jump_cutoff, z);
                if (d == 1) {
                    nx[0] += G[0] * z[0];
                } else {
                    nx[0] += G[0] * z[0] + G[1] * z[1];
                    nx[1] += G[2] * z[0] + G[3] * z[1];
                }
            }
            path.n_jumps += static_cast<std::uint64_t>(k) * (step >= counts.burn ? 1 : 0);
            if (d == 1) {
                nx[0] -= G[0] * comp[0] * cfg.dt;
            } else {
                nx[0] -= (G[0] * comp[0] + G[1] * comp[1]) * cfg.dt;
                nx[1] -= (G[2] * comp[0] + G[3] * comp[1]) * cfg.dt;
            }
        }
        x[0] = nx[0];
        if (d == 2) x[1] = nx[1];
        if (!std::isfinite(x[0]) || (d == 2 && !std::isfinite(x[1])) ||
            std::fabs(x[0]) > 1e10 || (d == 2 && std::fabs(x[1]) > 1e10)) {
            std::ostringstream os;
            os << "state blew up at step " << step << " (t=" << step * cfg.dt
               << ", replication " << replication << ")";
            throw NumericError(os.str());
        }
        if (step + 1 >= counts.burn) record(step + 1 - counts.burn);
    }
    return path;
}

PathRecord simulate_path(const ModelSpec& spec, const SimConfig& cfg) {
    return simulate_rep(spec, cfg, 0);
}

std::vector<PathRecord> simulate_ensemble(const ModelSpec& spec, const SimConfig& cfg,
                                          int n_rep, int workers) {
    if (n_rep < 1) throw ValidationError("ensemble: n_rep must be >= 1");
    std::vector<PathRecord> out(n_rep);
    parallel_for_index(n_rep, workers, [&](std::size_t r) {
        try {
            out[r] = simulate_rep(spec, cfg, r);
        } catch (const NumericError& e) {
            std::ostringstream os;
            os << "replication " << r << ": " << e.what();
            throw NumericError(os.str());
        }
    });
    return out;
}

void ensemble_apply(const ModelSpec& spec, const SimConfig& cfg, int n_rep, int workers,
                    const std::function<void(int, const PathRecord&)>& consume) {
    if (n_rep < 1) throw ValidationError("ensemble: n_rep must be >= 1");
    parallel_for_index(n_rep, workers, [&](std::size_t r) {
        try {
            PathRecord path = simulate_rep(spec, cfg, r);
            consume(static_cast<int>(r), path);
        } catch (const NumericError& e) {
            std::ostringstream os;
            os << "replication " << r << ": " << e.what();
            throw NumericError(os.str());
        }
    });
}

double pick_small_jump_cutoff(const LevyMeasure& levy, double target) {
    if (levy.finite_activity()) return 0.0;
    double cutoff = 1.0;
    while (levy.residual_variance(cutoff) > target && cutoff > 1e-12) cutoff *= 0.5;
    return cutoff;
}

void path_to_csv(const PathRecord& path, const std::string& filename) {
    CsvWriter csv(filename);
    csv.header(path.dim == 1 ? std::vector<std::string>{"t", "x1"}
                             : std::vector<std::string>{"t", "x1", "x2"});
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (path.dim == 1)
            csv.row({path.time(k), path.point(k)[0]});
        else
            csv.row({path.time(k), path.point(k)[0], path.point(k)[1]});
    }
}

} // namespace jdlab
