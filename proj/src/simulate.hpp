#pragma once

#include "model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace jdlab {

struct SimConfig {
    double horizon = 100.0;        // recorded time span T
    double dt = 0.01;              // uniform grid step
    double burn_in = 10.0;         // discarded lead-in, in time units
    std::uint64_t seed = 0;
    double small_jump_cutoff = 0.0; // required > 0 for infinite-activity measures

    void validate(const ModelSpec& spec) const;
};

// Discretised trajectory on the uniform grid k*dt, k = 0..n_steps, starting
// at the post-burn-in state. States are stored row-major (point k at
// states[k*dim .. k*dim+dim-1]); the time grid is implicit in dt.
struct PathRecord {
    int dim = 1;
    double dt = 0.0;
    std::vector<double> states;
    std::string model_id;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::string scheme = "euler_jump";
    std::uint64_t n_jumps = 0;

    std::size_t size() const { return states.size() / dim; }
    double time(std::size_t k) const { return dt * static_cast<double>(k); }
    double horizon() const { return dt * static_cast<double>(size() - 1); }
    const double* point(std::size_t k) const { return states.data() + k * dim; }
};

// One replication with the stream derived from (cfg.seed, replication).
// simulate_path is replication 0.
PathRecord simulate_rep(const ModelSpec& spec, const SimConfig& cfg, std::uint64_t replication);
PathRecord simulate_path(const ModelSpec& spec, const SimConfig& cfg);

// Materialised ensemble, bit-reproducible and scheduling-independent.
// Intended for moderate n_rep; large campaigns should map-reduce with
// ensemble_apply instead of holding every path.
std::vector<PathRecord> simulate_ensemble(const ModelSpec& spec, const SimConfig& cfg,
                                          int n_rep, int workers = 0);

// Runs consume(rep, path) for every replication without keeping paths.
// consume runs concurrently and must only write to per-rep slots.
void ensemble_apply(const ModelSpec& spec, const SimConfig& cfg, int n_rep, int workers,
                    const std::function<void(int, const PathRecord&)>& consume);

// Cutoff making the discarded small-jump variance at most `target`
// (infinite-activity measures only).
double pick_small_jump_cutoff(const LevyMeasure& levy, double target = 1e-4);

void path_to_csv(const PathRecord& path, const std::string& filename);

} // namespace jdlab
