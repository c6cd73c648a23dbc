#include "jdlab/jdlab.h"

#include "campaign.hpp"
#include "csvio.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "hypotheses.hpp"
#include "inverse_drift.hpp"
#include "kernel.hpp"
#include "model.hpp"
#include "simulate.hpp"
#include "worker_pool.hpp"

#include <cstdio>
#include <cstring>
#include <string>

// Opaque handle definitions; each wraps one core object.
struct jdl_model {
    jdlab::ModelSpec spec;
};
struct jdl_levy {
    jdlab::LevyMeasure measure;
};
struct jdl_path {
    jdlab::PathRecord record;
};
struct jdl_kernel {
    jdlab::KernelSpec spec;
};
struct jdl_bump {
    jdlab::BumpSpec spec;
};
struct jdl_density {
    jdlab::DensitySpec spec;
};
struct jdl_drift {
    jdlab::DriftFunction fn;
};
struct jdl_family {
    jdlab::HypothesisFamilyD2 family;
};
struct jdl_machinery {
    jdlab::LowerBoundMachinery impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

jdl_status status_of(const std::exception& e) {
    if (dynamic_cast<const jdlab::ValidationError*>(&e)) return JDL_ERR_INVALID;
    if (dynamic_cast<const jdlab::NumericError*>(&e)) return JDL_ERR_NUMERIC;
    if (dynamic_cast<const jdlab::IoError*>(&e)) return JDL_ERR_IO;
    return JDL_ERR_INTERNAL;
}

template <typename Fn>
jdl_status guarded(Fn&& fn) {
    try {
        fn();
        return JDL_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_of(e);
    } catch (...) {
        set_error("unknown error");
        return JDL_ERR_INTERNAL;
    }
}

template <typename T, typename Fn>
T* guarded_new(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    } catch (...) {
        set_error("unknown error");
        return nullptr;
    }
}

jdlab::SimConfig to_sim_config(const jdl_sim_config* cfg) {
    if (cfg == nullptr) throw jdlab::ValidationError("sim config is null");
    jdlab::SimConfig out;
    out.horizon = cfg->horizon;
    out.dt = cfg->dt;
    out.burn_in = cfg->burn_in;
    out.seed = cfg->seed;
    out.small_jump_cutoff = cfg->small_jump_cutoff;
    return out;
}

} // namespace

extern "C" {

const char* jdl_last_error(void) { return g_last_error.c_str(); }

const char* jdl_version(void) { return "jdlab 0.1.0"; }

void jdl_set_workers(int n) { jdlab::set_default_workers(n); }

/* ------------------------------------------------------------------ */

jdl_model* jdl_model_catalogue(const char* id) {
    return guarded_new<jdl_model>([&]() {
        if (id == nullptr) throw jdlab::ValidationError("catalogue id is null");
        return new jdl_model{jdlab::catalogue(id)};
    });
}

void jdl_model_free(jdl_model* m) { delete m; }

int jdl_model_dim(const jdl_model* m) { return m == nullptr ? 0 : m->spec.dim; }

jdl_status jdl_model_invariant_density(const jdl_model* m, const double* x, double* out) {
    return guarded([&]() {
        if (m == nullptr || x == nullptr || out == nullptr)
            throw jdlab::ValidationError("null argument");
        if (!m->spec.has_closed_form())
            throw jdlab::ValidationError("model '" + m->spec.id + "' has no closed form");
        *out = m->spec.invariant_density(x);
    });
}

jdl_levy* jdl_levy_none(int dim) {
    return guarded_new<jdl_levy>([&]() { return new jdl_levy{jdlab::LevyMeasure::none(dim)}; });
}

jdl_levy* jdl_levy_cpois_gauss(int dim, double intensity, const double* sigma_per_axis,
                               double alpha, double eps0) {
    return guarded_new<jdl_levy>([&]() {
        if (sigma_per_axis == nullptr) throw jdlab::ValidationError("sigma array is null");
        std::array<double, 2> s{sigma_per_axis[0], dim == 2 ? sigma_per_axis[1] : sigma_per_axis[0]};
        return new jdl_levy{
            jdlab::LevyMeasure::compound_poisson_gauss(dim, intensity, s, alpha, eps0)};
    });
}

jdl_levy* jdl_levy_cpois_cauchy(double intensity, double scale, double alpha, double eps0) {
    return guarded_new<jdl_levy>([&]() {
        return new jdl_levy{
            jdlab::LevyMeasure::compound_poisson_cauchy(intensity, scale, alpha, eps0)};
    });
}

jdl_levy* jdl_levy_tempered_stable(double coef, double alpha, double theta, double eps0) {
    return guarded_new<jdl_levy>([&]() {
        return new jdl_levy{jdlab::LevyMeasure::tempered_stable(coef, alpha, theta, eps0)};
    });
}

void jdl_levy_free(jdl_levy* l) { delete l; }

double jdl_levy_c4(const jdl_levy* l) { return l == nullptr ? 0.0 : l->measure.c4(); }

jdl_status jdl_audit_assumptions(const jdl_model* m, double grid_lo, double grid_hi,
                                 int points_per_axis, double tol, jdl_audit_item* items,
                                 int max_items, int* n_items) {
    return guarded([&]() {
        if (m == nullptr || items == nullptr || n_items == nullptr)
            throw jdlab::ValidationError("null argument");
        jdlab::AuditGrid grid;
        grid.lo = grid_lo;
        grid.hi = grid_hi;
        grid.points_per_axis = points_per_axis;
        const jdlab::AssumptionReport rep = jdlab::audit_assumptions(m->spec, grid, tol);
        const int n = std::min<int>(max_items, static_cast<int>(rep.items.size()));
        for (int i = 0; i < n; ++i) {
            const auto& it = rep.items[i];
            std::snprintf(items[i].name, sizeof(items[i].name), "%s", it.name.c_str());
            items[i].pass = it.pass ? 1 : 0;
            items[i].worst[0] = it.worst[0];
            items[i].worst[1] = it.worst[1];
            items[i].value = it.value;
        }
        *n_items = n;
    });
}

jdl_status jdl_check_c4_condition(double a, double gamma, double c4, int* out) {
    return guarded([&]() {
        if (out == nullptr) throw jdlab::ValidationError("null output");
        *out = jdlab::check_c4_condition(a, gamma, c4) ? 1 : 0;
    });
}

/* ------------------------------------------------------------------ */

jdl_path* jdl_simulate(const jdl_model* m, const jdl_sim_config* cfg, uint64_t replication) {
    return guarded_new<jdl_path>([&]() {
        if (m == nullptr) throw jdlab::ValidationError("model is null");
        jdlab::SimConfig sc = to_sim_config(cfg);
        if (!m->spec.levy.is_none() && !m->spec.levy.finite_activity() &&
            sc.small_jump_cutoff == 0.0)
            sc.small_jump_cutoff = jdlab::pick_small_jump_cutoff(m->spec.levy);
        return new jdl_path{jdlab::simulate_rep(m->spec, sc, replication)};
    });
}

void jdl_path_free(jdl_path* p) { delete p; }

size_t jdl_path_length(const jdl_path* p) { return p == nullptr ? 0 : p->record.size(); }

double jdl_path_dt(const jdl_path* p) { return p == nullptr ? 0.0 : p->record.dt; }

uint64_t jdl_path_jumps(const jdl_path* p) { return p == nullptr ? 0 : p->record.n_jumps; }

jdl_status jdl_path_states(const jdl_path* p, size_t from, size_t n, double* out) {
    return guarded([&]() {
        if (p == nullptr || out == nullptr) throw jdlab::ValidationError("null argument");
        if (from + n > p->record.size())
            throw jdlab::ValidationError("requested range exceeds the record");
        std::memcpy(out, p->record.states.data() + from * p->record.dim,
                    n * p->record.dim * sizeof(double));
    });
}

jdl_status jdl_path_to_csv(const jdl_path* p, const char* filename) {
    return guarded([&]() {
        if (p == nullptr || filename == nullptr) throw jdlab::ValidationError("null argument");
        jdlab::path_to_csv(p->record, filename);
    });
}

/* ------------------------------------------------------------------ */

jdl_kernel* jdl_kernel_build(int order) {
    return guarded_new<jdl_kernel>([&]() { return new jdl_kernel{jdlab::build_kernel(order)}; });
}

void jdl_kernel_free(jdl_kernel* k) { delete k; }

double jdl_kernel_eval(const jdl_kernel* k, double x) {
    return k == nullptr ? 0.0 : k->spec(x);
}

double jdl_kernel_moment(const jdl_kernel* k, int i) {
    return k == nullptr ? 0.0 : k->spec.moment(i);
}

double jdl_kernel_sup_norm(const jdl_kernel* k) {
    return k == nullptr ? 0.0 : k->spec.sup_norm;
}

jdl_bump* jdl_bump_build(void) {
    return guarded_new<jdl_bump>([&]() { return new jdl_bump{jdlab::build_bump()}; });
}

void jdl_bump_free(jdl_bump* b) { delete b; }

double jdl_bump_eval(const jdl_bump* b, double x) { return b == nullptr ? 0.0 : b->spec(x); }

double jdl_bump_mass(const jdl_bump* b) { return b == nullptr ? 0.0 : b->spec.mass(); }

double jdl_bump_sup_norm(const jdl_bump* b) {
    return b == nullptr ? 0.0 : b->spec.sup_norm;
}

jdl_status jdl_default_bandwidth(double T, int dim, double* h_out) {
    return guarded([&]() {
        if (h_out == nullptr) throw jdlab::ValidationError("null output");
        const auto h = jdlab::default_bandwidth(T, dim);
        h_out[0] = h[0];
        if (dim == 2) h_out[1] = h[1];
    });
}

jdl_status jdl_estimate_density(const jdl_path* p, const jdl_kernel* k, const double* h,
                                const double* x, size_t n, double* out) {
    return guarded([&]() {
        if (p == nullptr || k == nullptr || h == nullptr || x == nullptr || out == nullptr)
            throw jdlab::ValidationError("null argument");
        const int dim = p->record.dim;
        std::array<double, 2> hh{h[0], dim == 2 ? h[1] : 0.0};
        if (!(hh[0] > 0.0) || hh[0] > 1.0 || (dim == 2 && (!(hh[1] > 0.0) || hh[1] > 1.0)))
            throw jdlab::ValidationError("bandwidth must lie in (0,1]");
        for (size_t i = 0; i < n; ++i)
            out[i] = jdlab::estimate_density_at(p->record, k->spec, hh, x + i * dim);
    });
}

/* ------------------------------------------------------------------ */

jdl_density* jdl_density_f0(double eta) {
    return guarded_new<jdl_density>([&]() {
        return new jdl_density{jdlab::to_density_spec(jdlab::build_f0(eta, 1, nullptr))};
    });
}

jdl_density* jdl_density_gaussian(double variance) {
    return guarded_new<jdl_density>(
        [&]() { return new jdl_density{jdlab::gaussian_density(variance)}; });
}

void jdl_density_free(jdl_density* d) { delete d; }

double jdl_density_eval(const jdl_density* d, double x) {
    return d == nullptr ? 0.0 : d->spec.f(x);
}

double jdl_density_deriv(const jdl_density* d, double x) {
    return d == nullptr ? 0.0 : d->spec.df(x);
}

jdl_status jdl_adjoint_apply(const jdl_density* d, double gamma, const jdl_levy* levy,
                             double x, double* out) {
    return guarded([&]() {
        if (d == nullptr || levy == nullptr || out == nullptr)
            throw jdlab::ValidationError("null argument");
        *out = jdlab::adjoint_jump_apply(d->spec, gamma, levy->measure, x);
    });
}

jdl_drift* jdl_build_drift(const jdl_density* d, double a, double gamma, const jdl_levy* levy,
                           double grid_lo, double grid_hi, double grid_step) {
    return guarded_new<jdl_drift>([&]() {
        if (d == nullptr || levy == nullptr) throw jdlab::ValidationError("null argument");
        jdlab::DriftGrid grid{grid_lo, grid_hi, grid_step};
        return new jdl_drift{jdlab::build_drift(d->spec, a, gamma, levy->measure, grid)};
    });
}

void jdl_drift_free(jdl_drift* b) { delete b; }

double jdl_drift_eval(const jdl_drift* b, double x) { return b == nullptr ? 0.0 : b->fn(x); }

double jdl_drift_sup_norm(const jdl_drift* b) { return b == nullptr ? 0.0 : b->fn.sup_norm; }

double jdl_drift_lipschitz(const jdl_drift* b) {
    return b == nullptr ? 0.0 : b->fn.lipschitz_estimate;
}

jdl_status jdl_drift_to_csv(const jdl_drift* b, const char* filename) {
    return guarded([&]() {
        if (b == nullptr || filename == nullptr) throw jdlab::ValidationError("null argument");
        jdlab::drift_to_csv(b->fn, filename);
    });
}

jdl_status jdl_audit_conditions(const jdl_density* d, double a, double gamma,
                                const jdl_levy* levy, jdl_condition_report* out) {
    return guarded([&]() {
        if (d == nullptr || levy == nullptr || out == nullptr)
            throw jdlab::ValidationError("null argument");
        const jdlab::ConditionReport rep =
            jdlab::audit_proposition_conditions(d->spec, a, gamma, levy->measure);
        for (int i = 0; i < 5 && i < static_cast<int>(rep.conditions.size()); ++i) {
            out->pass[i] = rep.conditions[i].pass ? 1 : 0;
            out->worst_point[i] = rep.conditions[i].worst_point;
            out->margin[i] = rep.conditions[i].margin;
        }
        out->all_pass = rep.all_pass() ? 1 : 0;
    });
}

jdl_status jdl_roundtrip(const jdl_density* d, const jdl_drift* b, double a, double gamma,
                         const jdl_levy* levy, const jdl_sim_config* sim, int n_rep,
                         const jdl_kernel* kernel, double grid_lo, double grid_hi,
                         double grid_step, const char* csv_file, jdl_roundtrip_report* out) {
    return guarded([&]() {
        if (d == nullptr || b == nullptr || levy == nullptr || kernel == nullptr ||
            out == nullptr)
            throw jdlab::ValidationError("null argument");
        const jdlab::RoundtripReport rep = jdlab::roundtrip_invariance(
            d->spec, b->fn, a, gamma, levy->measure, to_sim_config(sim), n_rep, kernel->spec,
            grid_lo, grid_hi, grid_step);
        if (csv_file != nullptr && csv_file[0] != '\0') {
            jdlab::CsvWriter csv(csv_file);
            csv.header({"x", "mu_hat", "se", "target"});
            for (std::size_t i = 0; i < rep.grid.size(); ++i)
                csv.row({rep.grid[i], rep.mu_hat[i], rep.se[i], rep.f_target[i]});
        }
        out->sup_error = rep.sup_error;
        out->max_se = rep.max_se;
    });
}

jdl_model* jdl_model_from_drift(const jdl_drift* b, double a, double gamma,
                                const jdl_levy* levy) {
    return guarded_new<jdl_model>([&]() {
        if (b == nullptr || levy == nullptr) throw jdlab::ValidationError("null argument");
        return new jdl_model{
            jdlab::model_from_drift(b->fn, a, gamma, levy->measure, "drift_table")};
    });
}

/* ------------------------------------------------------------------ */

jdl_family* jdl_family_build_d2(double eta, const double* aaT, double H1, double H2, double v,
                                double T, double gate_eps, const double* beta) {
    return guarded_new<jdl_family>([&]() {
        const jdlab::BaseDensity base = jdlab::build_f0(eta, 2, aaT);
        const jdlab::BumpSpec bump = jdlab::build_bump();
        std::array<double, 2> bb{1.0, 1.0};
        if (beta != nullptr) bb = {beta[0], beta[1]};
        return new jdl_family{
            jdlab::build_family_d2(base, bump, H1, H2, v, T, gate_eps, bb)};
    });
}

void jdl_family_free(jdl_family* f) { delete f; }

int jdl_family_count1(const jdl_family* f) { return f == nullptr ? 0 : f->family.n1; }

int jdl_family_count2(const jdl_family* f) { return f == nullptr ? 0 : f->family.n2; }

double jdl_family_psi(const jdl_family* f) { return f == nullptr ? 0.0 : f->family.psi; }

double jdl_family_amplitude(const jdl_family* f) {
    return f == nullptr ? 0.0 : f->family.amplitude;
}

jdl_status jdl_family_center(const jdl_family* f, int j1, int j2, double* out) {
    return guarded([&]() {
        if (f == nullptr || out == nullptr) throw jdlab::ValidationError("null argument");
        const auto c = f->family.center(j1, j2);
        out[0] = c[0];
        out[1] = c[1];
    });
}

double jdl_family_f0(const jdl_family* f, const double* x) {
    return f == nullptr || x == nullptr ? 0.0 : f->family.f0(x);
}

double jdl_family_fj(const jdl_family* f, int j1, int j2, const double* x) {
    return f == nullptr || x == nullptr ? 0.0 : f->family.fj(j1, j2, x);
}

jdl_machinery* jdl_machinery_build(const jdl_family* f, const double* a,
                                   const double* gamma_diag, const jdl_levy* levy) {
    return guarded_new<jdl_machinery>([&]() {
        if (f == nullptr || a == nullptr || gamma_diag == nullptr || levy == nullptr)
            throw jdlab::ValidationError("null argument");
        return new jdl_machinery{jdlab::LowerBoundMachinery(
            f->family, {a[0], a[1], a[2], a[3]}, {gamma_diag[0], gamma_diag[1]},
            levy->measure)};
    });
}

void jdl_machinery_free(jdl_machinery* m) { delete m; }

jdl_status jdl_drift_difference_d2(const jdl_machinery* m, int j1, int j2, const double* x,
                                   double* out2) {
    return guarded([&]() {
        if (m == nullptr || x == nullptr || out2 == nullptr)
            throw jdlab::ValidationError("null argument");
        m->impl.drift_difference(j1, j2, x, out2);
    });
}

jdl_status jdl_kl_terms(const jdl_machinery* m, int j1, int j2, jdl_kl_report* out) {
    return guarded([&]() {
        if (m == nullptr || out == nullptr) throw jdlab::ValidationError("null argument");
        const jdlab::KlRow row = m->impl.kl_terms(j1, j2);
        out->entropy_term = row.entropy_term;
        out->entropy_bound = row.entropy_bound;
        out->girsanov_term = row.girsanov_term;
        out->prop_bound = row.prop_bound;
        out->kl = row.kl;
        out->ratio_to_log_JT = row.ratio_to_log_JT;
    });
}

/* ------------------------------------------------------------------ */

int jdl_run_campaign(const char* config_text, const char* out_dir, int workers) {
    if (config_text == nullptr || out_dir == nullptr) {
        set_error("null argument");
        return JDL_ERR_INVALID;
    }
    const jdlab::CampaignOutcome outcome =
        jdlab::run_campaign(config_text, out_dir, workers);
    if (outcome.exit_code != 0) set_error(outcome.message);
    return outcome.exit_code;
}

} // extern "C"
