#ifndef DUALDIV_DUALDIV_H
#define DUALDIV_DUALDIV_H

#include <stddef.h>
#include <stdint.h>

#if defined(DUALDIV_BUILDING_LIBRARY)
#define DD_API __attribute__((visibility("default")))
#else
#define DD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dd_status {
  DD_OK = 0,
  DD_ERR_INVALID_ARGUMENT = 1,
  DD_ERR_SUBORDINATOR = 2,
  DD_ERR_INVALID_PHASE_TYPE = 3,
  DD_ERR_NONPOSITIVE_RATE = 4,
  DD_ERR_SINGULAR_RESOLVENT = 5,
  DD_ERR_REPEATED_ROOT = 6,
  DD_ERR_ROOT_COUNT = 7,
  DD_ERR_OVERFLOW_GUARD = 8,
  DD_ERR_DOMAIN = 9,
  DD_ERR_DEGENERATE_DENOMINATOR = 10,
  DD_ERR_NO_CONVERGENCE = 11,
  DD_ERR_BRACKET = 12,
  DD_ERR_CONFIG = 13,
  DD_ERR_PARSE = 14,
  DD_ERR_IO = 15,
  DD_ERR_INTERNAL = 16
} dd_status;

/* Name of a status code, e.g. "NoConvergence". */
DD_API const char* dd_status_name(dd_status status);

/* Message of the last failed call on this thread; empty after success. */
DD_API const char* dd_last_error(void);

typedef struct dd_model dd_model;
typedef struct dd_basis dd_basis;

typedef struct dd_model_params {
  double drift_d;
  double sigma;
  double lambda;
  double q;
  int phases;
  const double* alpha; /* phases entries */
  const double* T;     /* phases x phases, row-major */
} dd_model_params;

typedef struct dd_model_info {
  double drift_d;
  double sigma;
  double lambda;
  double q;
  int phases;
  double mu;
  double mean_jump;
  double jump_mass; /* sum(alpha) */
  int bounded_variation;
} dd_model_info;

DD_API dd_status dd_model_create(const dd_model_params* params, dd_model** out);
DD_API dd_status dd_model_load(const char* path, dd_model** out);
DD_API dd_status dd_model_parse(const char* text, dd_model** out);
DD_API dd_status dd_model_with_q(const dd_model* model, double q, dd_model** out);
DD_API void dd_model_free(dd_model* model);
DD_API dd_status dd_model_info_get(const dd_model* model, dd_model_info* out);

/* psi and psi' at a complex point. */
DD_API dd_status dd_psi(const dd_model* model, double re, double im,
                        double* out_re, double* out_im);
DD_API dd_status dd_psi_prime(const dd_model* model, double re, double im,
                              double* out_re, double* out_im);

/* Scale basis: roots of psi(s) = q and residues. */
DD_API dd_status dd_basis_create(const dd_model* model, dd_basis** out);
DD_API void dd_basis_free(dd_basis* basis);

typedef struct dd_basis_info {
  double phi;
  double lead_coeff;
  double mu;
  double q;
  size_t neg_root_count;
  double max_residual;
  double min_separation;
} dd_basis_info;

DD_API dd_status dd_basis_info_get(const dd_basis* basis, dd_basis_info* out);

/* Copies xi_i and C_i; *count receives the total even when capacity is too
   small (then nothing is written past capacity). */
DD_API dd_status dd_basis_roots(const dd_basis* basis, double* xi_re,
                                double* xi_im, double* c_re, double* c_im,
                                size_t capacity, size_t* count);

typedef enum dd_scale_fn {
  DD_W = 0,
  DD_W_PRIME = 1,
  DD_WBAR = 2,
  DD_Z = 3,
  DD_ZBAR = 4,
  DD_R = 5
} dd_scale_fn;

DD_API dd_status dd_scale_eval(const dd_basis* basis, dd_scale_fn fn, double x,
                               double* out);
DD_API dd_status dd_exit(const dd_basis* basis, double x, double b,
                         double* up, double* down);
DD_API dd_status dd_laplace_check(const dd_basis* basis, double s, double* out);

/* Policy functionals at one (c1, c2). */
typedef struct dd_policy_eval {
  double f;
  double g;
  double vbar;
  double gamma;
  double G;
  double H;
  double objective; /* vbar - c1 */
  double grad_c1;   /* d/dc1 (vbar - c1) */
  double grad_c2;   /* d/dc2 vbar */
} dd_policy_eval;

DD_API dd_status dd_policy_evaluate(const dd_basis* basis, double beta,
                                    double c1, double c2, dd_policy_eval* out);

typedef struct dd_solve_options {
  int grid;
  int zoom_levels;
  int zoom_grid;
  int max_iterations;
  int starts;
  double agreement;
  int threads;
} dd_solve_options;

typedef struct dd_solve_report {
  double c1;
  double c2;
  double vbar;
  double objective;
  double gamma;
  double G_residual;
  double H_value;
  int corner;
  double beta;
  int iterations;
  double ceiling;
} dd_solve_report;

DD_API void dd_solve_options_default(dd_solve_options* out);

/* options may be NULL for the defaults. */
DD_API dd_status dd_solve(const dd_basis* basis, double beta,
                          const dd_solve_options* options, dd_solve_report* out);
DD_API dd_status dd_solve_from(const dd_basis* basis, double beta, double c1,
                               double c2, double ceiling,
                               const dd_solve_options* options,
                               dd_solve_report* out);
DD_API dd_status dd_search_ceiling(const dd_basis* basis, double beta,
                                   double* out);

/* n x n objective grid over [0, ceiling]^2, row-major with row index c1;
   NaN where c1 >= c2. */
DD_API dd_status dd_surface(const dd_basis* basis, double beta, double ceiling,
                            int n, int threads, double* values);

/* v_{c1,c2}(x) and its x-derivative for any admissible policy. */
DD_API dd_status dd_value(const dd_basis* basis, double beta, double c1,
                          double c2, double x, double* v, double* dv);

/* Optimal value and derivative from a solve report. */
DD_API dd_status dd_optimal_value(const dd_basis* basis,
                                  const dd_solve_report* report, double x,
                                  double* v, double* dv);

/* Zero-cost benchmark: a* and vhat at n points (xs/vhat may be NULL when
   n == 0). */
DD_API dd_status dd_benchmark(const dd_basis* basis, const double* xs, size_t n,
                              double* a_star, double* vhat);

/* Solves for each beta (positive, strictly descending); reports has n slots. */
DD_API dd_status dd_beta_sweep(const dd_basis* basis, const double* betas,
                               size_t n, const dd_solve_options* options,
                               dd_solve_report* reports);

typedef struct dd_sim_config {
  int64_t paths;
  uint64_t seed;
  double dt;
  double discount_floor;
  int threads;
} dd_sim_config;

typedef struct dd_sim_result {
  double mean;
  double std_error;
  int64_t paths;
  double truncated_fraction;
  uint64_t seed;
} dd_sim_result;

DD_API void dd_sim_config_default(dd_sim_config* out);
DD_API dd_status dd_simulate_value(const dd_model* model, double c1, double c2,
                                   double beta, double x,
                                   const dd_sim_config* config,
                                   dd_sim_result* out);
DD_API dd_status dd_simulate_exit(const dd_model* model, double x, double b,
                                  const dd_sim_config* config,
                                  dd_sim_result* up, dd_sim_result* down);

/* Diagnostic table of the scale basis. */
typedef struct dd_check_row {
  char name[32];
  double value;
  double tolerance;
  int pass;
} dd_check_row;

DD_API dd_status dd_check(const dd_basis* basis, dd_check_row* rows,
                          size_t capacity, size_t* count);

/* Shortest decimal form with at most 12 significant digits; returns the
   length written (excluding the terminator), or the length needed if the
   buffer is too small. */
DD_API size_t dd_format_number(double v, char* buf, size_t size);

#ifdef __cplusplus
}
#endif

#endif
