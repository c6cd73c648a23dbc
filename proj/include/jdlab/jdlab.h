/*
 * jdlab - simulation and estimation laboratory for ergodic jump diffusions.
 *
 * C interface to the shared library. All handles are opaque; functions
 * return JDL_OK (0) on success or a nonzero jdl_status, with a
 * thread-local description available from jdl_last_error(). Every routine
 * is deterministic given its seed arguments, independent of the worker
 * count configured with jdl_set_workers().
 */
#ifndef JDLAB_H
#define JDLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jdl_status {
    JDL_OK = 0,
    JDL_ERR_INVALID = 2,  /* validation / precondition failure */
    JDL_ERR_NUMERIC = 3,  /* numeric breakdown (blow-up, non-convergence) */
    JDL_ERR_IO = 4,       /* filesystem problem */
    JDL_ERR_INTERNAL = 5
} jdl_status;

/* message for the most recent failure on this thread */
const char* jdl_last_error(void);

/* library version string */
const char* jdl_version(void);

/* worker threads used by ensemble computations; 0 restores the hardware
 * default. Results never depend on this setting. */
void jdl_set_workers(int n);

/* ------------------------------------------------------------------ */
/* models                                                              */

typedef struct jdl_model jdl_model;
typedef struct jdl_levy jdl_levy;

/* built-in catalogue, e.g. "ou_d1", "tanh_d1", "ou_cpois_d1",
 * "tanh_cpois_d1", "ou_d2", "tanh_d2", "ou_cpois_d2", "tanh_cpois_d2" */
jdl_model* jdl_model_catalogue(const char* id);
void jdl_model_free(jdl_model* m);
int jdl_model_dim(const jdl_model* m);
/* closed-form stationary density when the catalogue entry has one;
 * JDL_ERR_INVALID otherwise */
jdl_status jdl_model_invariant_density(const jdl_model* m, const double* x, double* out);

jdl_levy* jdl_levy_none(int dim);
jdl_levy* jdl_levy_cpois_gauss(int dim, double intensity, const double* sigma_per_axis,
                               double alpha, double eps0);
jdl_levy* jdl_levy_cpois_cauchy(double intensity, double scale, double alpha, double eps0);
jdl_levy* jdl_levy_tempered_stable(double coef, double alpha, double theta, double eps0);
void jdl_levy_free(jdl_levy* l);
/* declared exponential-moment constant (A4 audit value) */
double jdl_levy_c4(const jdl_levy* l);

/* one audited assumption: pass flag, witness point, audited value */
typedef struct jdl_audit_item {
    char name[32];
    int pass;
    double worst[2];
    double value;
} jdl_audit_item;

#define JDL_AUDIT_MAX_ITEMS 12

/* grid audit of the standing assumptions; fills up to max_items entries
 * and stores the count in *n_items */
jdl_status jdl_audit_assumptions(const jdl_model* m, double grid_lo, double grid_hi,
                                 int points_per_axis, double tol, jdl_audit_item* items,
                                 int max_items, int* n_items);

/* constant gate c4 < a^2 / (2 gamma^2 * 16 * 28); *out is 1 or 0 */
jdl_status jdl_check_c4_condition(double a, double gamma, double c4, int* out);

/* ------------------------------------------------------------------ */
/* simulation                                                          */

typedef struct jdl_sim_config {
    double horizon;
    double dt;
    double burn_in;
    uint64_t seed;
    double small_jump_cutoff; /* 0 = automatic for infinite activity */
} jdl_sim_config;

typedef struct jdl_path jdl_path;

jdl_path* jdl_simulate(const jdl_model* m, const jdl_sim_config* cfg, uint64_t replication);
void jdl_path_free(jdl_path* p);
size_t jdl_path_length(const jdl_path* p);
double jdl_path_dt(const jdl_path* p);
uint64_t jdl_path_jumps(const jdl_path* p);
/* copies n*dim state coordinates starting at grid index `from` */
jdl_status jdl_path_states(const jdl_path* p, size_t from, size_t n, double* out);
jdl_status jdl_path_to_csv(const jdl_path* p, const char* filename);

/* ------------------------------------------------------------------ */
/* kernels and density estimation                                      */

typedef struct jdl_kernel jdl_kernel;
typedef struct jdl_bump jdl_bump;

jdl_kernel* jdl_kernel_build(int order);
void jdl_kernel_free(jdl_kernel* k);
double jdl_kernel_eval(const jdl_kernel* k, double x);
double jdl_kernel_moment(const jdl_kernel* k, int i);
double jdl_kernel_sup_norm(const jdl_kernel* k);

jdl_bump* jdl_bump_build(void);
void jdl_bump_free(jdl_bump* b);
double jdl_bump_eval(const jdl_bump* b, double x);
double jdl_bump_mass(const jdl_bump* b);
double jdl_bump_sup_norm(const jdl_bump* b);

/* h = T^(-1/2) for dim 1; sqrt(log T / T) per axis for dim 2 */
jdl_status jdl_default_bandwidth(double T, int dim, double* h_out);

/* occupation-density estimate at n evaluation points (x: n*dim doubles) */
jdl_status jdl_estimate_density(const jdl_path* p, const jdl_kernel* k, const double* h,
                                const double* x, size_t n, double* out);

/* ------------------------------------------------------------------ */
/* drift inversion                                                     */

typedef struct jdl_density jdl_density;
typedef struct jdl_drift jdl_drift;

/* exponential-tail base density, dim 1, with its audited constants */
jdl_density* jdl_density_f0(double eta);
/* centred Gaussian; fails the growth conditions by design */
jdl_density* jdl_density_gaussian(double variance);
void jdl_density_free(jdl_density* d);
double jdl_density_eval(const jdl_density* d, double x);
double jdl_density_deriv(const jdl_density* d, double x);

/* adjoint jump-generator term at x, quadrature to 1e-10 */
jdl_status jdl_adjoint_apply(const jdl_density* d, double gamma, const jdl_levy* levy,
                             double x, double* out);

jdl_drift* jdl_build_drift(const jdl_density* d, double a, double gamma, const jdl_levy* levy,
                           double grid_lo, double grid_hi, double grid_step);
void jdl_drift_free(jdl_drift* b);
double jdl_drift_eval(const jdl_drift* b, double x);
double jdl_drift_sup_norm(const jdl_drift* b);
double jdl_drift_lipschitz(const jdl_drift* b);
jdl_status jdl_drift_to_csv(const jdl_drift* b, const char* filename);

typedef struct jdl_condition_report {
    int pass[5];
    double worst_point[5];
    double margin[5];
    int all_pass;
} jdl_condition_report;

jdl_status jdl_audit_conditions(const jdl_density* d, double a, double gamma,
                                const jdl_levy* levy, jdl_condition_report* out);

typedef struct jdl_roundtrip_report {
    double sup_error;
    double max_se;
} jdl_roundtrip_report;

/* simulate the inverted model and compare the estimate with the target on
 * a uniform grid; per-point results optionally land in csv_file */
jdl_status jdl_roundtrip(const jdl_density* d, const jdl_drift* b, double a, double gamma,
                         const jdl_levy* levy, const jdl_sim_config* sim, int n_rep,
                         const jdl_kernel* kernel, double grid_lo, double grid_hi,
                         double grid_step, const char* csv_file, jdl_roundtrip_report* out);

/* wrap a drift table into a simulable model */
jdl_model* jdl_model_from_drift(const jdl_drift* b, double a, double gamma,
                                const jdl_levy* levy);

/* ------------------------------------------------------------------ */
/* hypothesis families and divergence bounds (dim 2)                   */

typedef struct jdl_family jdl_family;

jdl_family* jdl_family_build_d2(double eta, const double* aaT, double H1, double H2, double v,
                                double T, double gate_eps, const double* beta);
void jdl_family_free(jdl_family* f);
int jdl_family_count1(const jdl_family* f);
int jdl_family_count2(const jdl_family* f);
double jdl_family_psi(const jdl_family* f);
double jdl_family_amplitude(const jdl_family* f);
jdl_status jdl_family_center(const jdl_family* f, int j1, int j2, double* out);
double jdl_family_f0(const jdl_family* f, const double* x);
double jdl_family_fj(const jdl_family* f, int j1, int j2, const double* x);

typedef struct jdl_kl_report {
    double entropy_term;
    double entropy_bound;
    double girsanov_term;
    double prop_bound;
    double kl;
    double ratio_to_log_JT;
} jdl_kl_report;

typedef struct jdl_machinery jdl_machinery;

jdl_machinery* jdl_machinery_build(const jdl_family* f, const double* a,
                                   const double* gamma_diag, const jdl_levy* levy);
void jdl_machinery_free(jdl_machinery* m);
jdl_status jdl_drift_difference_d2(const jdl_machinery* m, int j1, int j2, const double* x,
                                   double* out2);
jdl_status jdl_kl_terms(const jdl_machinery* m, int j1, int j2, jdl_kl_report* out);

/* ------------------------------------------------------------------ */
/* campaigns                                                           */

/* Runs a full configured campaign (same format the command line uses)
 * and writes CSVs plus a manifest into out_dir. Returns the would-be
 * process exit code: 0 ok, 2 validation, 3 numeric, 4 io. */
int jdl_run_campaign(const char* config_text, const char* out_dir, int workers);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* JDLAB_H */
