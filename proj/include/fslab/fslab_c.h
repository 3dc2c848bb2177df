/* C interface to the finite-sum optimization laboratory.
 *
 * All functions return fslab_status; out-parameters are written only on
 * FSLAB_OK. fslab_last_error() describes the most recent failure on the
 * calling thread.
 */
#ifndef FSLAB_FSLAB_C_H
#define FSLAB_FSLAB_C_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fslab_status {
  FSLAB_OK = 0,
  FSLAB_INVALID_ARG = 1,
  FSLAB_RUNTIME = 2,
  FSLAB_IO = 3
} fslab_status;

typedef struct fslab_problem fslab_problem;
typedef struct fslab_bias_pair fslab_bias_pair;
typedef struct fslab_trace fslab_trace;

typedef struct fslab_trace_row {
  int64_t k;
  int64_t calls;
  double subopt;
  double dist;
} fslab_trace_row;

const char* fslab_version(void);
const char* fslab_last_error(void);

/* Quadratic family whose strong convexity parameter mu sits in a single
 * 2x2 block; requires 0 < eps < mu < L, d >= 2, n >= 1. */
fslab_status fslab_unknown_mu_create(double L, double mu, double eps, double R,
                                     int d, int n, fslab_problem** out);
void fslab_problem_destroy(fslab_problem* problem);

fslab_status fslab_problem_dim(const fslab_problem* problem, int* d, int* n);

/* Evaluates the average function; grad_out must hold d doubles (pass NULL to
 * skip the gradient). */
fslab_status fslab_problem_eval(const fslab_problem* problem, const double* w,
                                int d, double* value_out, double* grad_out);

fslab_status fslab_problem_suboptimality(const fslab_problem* problem,
                                         const double* w, int d, double* out);

/* kind is one of "smooth_sc", "smooth_cvx", "lipschitz_sc"; p1/p2 are
 * (kappa, unused), (L, unused), (M, lambda) respectively; n must be odd. */
fslab_status fslab_bias_pair_create(const char* kind, int n, double p1,
                                    double p2, int d, fslab_bias_pair** out);
void fslab_bias_pair_destroy(fslab_bias_pair* pair);

fslab_status fslab_bias_pair_delta_closed(const fslab_bias_pair* pair,
                                          double* out);
fslab_status fslab_bias_pair_delta_numeric(const fslab_bias_pair* pair,
                                           double* out);

/* Runs a named solver ("gd", "agd", "sgd", "sag", "saga", "svrg", "svrg_pp",
 * "sdca_wd") from the origin for the given oracle-call budget. */
fslab_status fslab_solve(const fslab_problem* problem, const char* solver,
                         int64_t budget, uint64_t seed, int64_t record_every,
                         fslab_trace** out);
void fslab_trace_destroy(fslab_trace* trace);

int64_t fslab_trace_rows(const fslab_trace* trace);
fslab_status fslab_trace_get_row(const fslab_trace* trace, int64_t index,
                                 fslab_trace_row* out);

/* exact_out >= bound_out = n^2 / 2 always holds. */
fslab_status fslab_info_lower_bound(int64_t n, double* exact_out,
                                    double* bound_out);

/* H(p) - (1 - 4 (p - 1/2)^2); nonnegative on [0, 1]. */
fslab_status fslab_entropy_margin(double p, double* out);

/* Runs one experiment kind ("gap", "bias", "race", "symbolic", "restart",
 * "fit") into out_dir. config_path may be NULL or "" for defaults.
 * Pass seed_override < 0 or trials_override < 0 to keep the config values.
 * exit_code_out receives 0 (pass) or 2 (invariant failure). */
fslab_status fslab_run_experiment(const char* kind, const char* config_path,
                                  const char* out_dir, int64_t seed_override,
                                  int64_t trials_override, int* exit_code_out);

#ifdef __cplusplus
}
#endif

#endif /* FSLAB_FSLAB_C_H */
