#ifndef SNOISE_SNOISE_H
#define SNOISE_SNOISE_H

#include <stddef.h>
#include <stdint.h>

#if defined(SNOISE_BUILDING_LIBRARY)
#define SNOISE_API __attribute__((visibility("default")))
#else
#define SNOISE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status. On failure the message of the last error on
   the calling thread is available from snoise_last_error(). */
typedef enum snoise_status {
  SNOISE_OK = 0,
  SNOISE_E_INVALID_ARGUMENT = 1,
  SNOISE_E_NON_FINITE = 2,
  SNOISE_E_DIMENSION_MISMATCH = 3,
  SNOISE_E_NOT_SEPARABLE = 4,
  SNOISE_E_ZERO_AT_ORIGIN = 5,
  SNOISE_E_INCONSISTENT_KERNEL = 6,
  SNOISE_E_INVALID_BOUND = 7,
  SNOISE_E_QUADRATURE_FAILURE = 8,
  SNOISE_E_UNSUPPORTED_MARKS = 9,
  SNOISE_E_KERNEL_NOT_EXPONENTIAL = 10,
  SNOISE_E_INTEGRABILITY_FAILURE = 11,
  SNOISE_E_EXPLOSION_GUARD = 12,
  SNOISE_E_BLOW_UP = 13,
  SNOISE_E_MGF_DIVERGES = 14,
  SNOISE_E_DEGENERATE_JUMPS = 15,
  SNOISE_E_CONFIG_ERROR = 16,
  SNOISE_E_IO_ERROR = 17,
  SNOISE_E_INTERNAL = 99
} snoise_status;

typedef struct snoise_kernel snoise_kernel;
typedef struct snoise_marks snoise_marks;
typedef struct snoise_compensator snoise_compensator;
typedef struct snoise_path snoise_path;
typedef struct snoise_process snoise_process;

SNOISE_API const char* snoise_version(void);
/* Machine-readable name, e.g. "ConfigError". */
SNOISE_API const char* snoise_status_name(snoise_status status);
SNOISE_API const char* snoise_last_error(void);

/* Kernels. */
SNOISE_API snoise_status snoise_kernel_jump_to_level(snoise_kernel** out);
SNOISE_API snoise_status snoise_kernel_exponential(double a, double b, snoise_kernel** out);
SNOISE_API snoise_status snoise_kernel_power_law(double c, snoise_kernel** out);
SNOISE_API snoise_status snoise_kernel_random_decay(snoise_kernel** out);
/* (t[i], x[i], G[i]) triples on a full rectangular grid. */
SNOISE_API snoise_status snoise_kernel_table(const double* t, const double* x, const double* G,
                                             size_t n, snoise_kernel** out);
SNOISE_API void snoise_kernel_free(snoise_kernel* kernel);
SNOISE_API snoise_status snoise_kernel_mark_dim(const snoise_kernel* kernel, int* dim);
SNOISE_API snoise_status snoise_kernel_eval(const snoise_kernel* kernel, double t, const double* x,
                                            size_t dim, double* G, double* g);
SNOISE_API snoise_status snoise_kernel_is_markov(const snoise_kernel* kernel, const double* grid,
                                                 size_t n, double tol, int* markov, double* a,
                                                 double* b, double* max_residual);

/* Mark laws. */
SNOISE_API snoise_status snoise_marks_point_mass(double u, snoise_marks** out);
SNOISE_API snoise_status snoise_marks_normal(double mean, double sd, snoise_marks** out);
SNOISE_API snoise_status snoise_marks_exponential(double rate, snoise_marks** out);
SNOISE_API snoise_status snoise_marks_uniform(double lo, double hi, snoise_marks** out);
SNOISE_API snoise_status snoise_marks_discrete(const double* values, const double* probs, size_t n,
                                               snoise_marks** out);
/* Independent one-dimensional components. */
SNOISE_API snoise_status snoise_marks_product(const snoise_marks* const* parts, size_t n,
                                              snoise_marks** out);
SNOISE_API void snoise_marks_free(snoise_marks* marks);

/* Compensators rate(t) F(dx) dt. The marks handle may be freed afterwards. */
SNOISE_API snoise_status snoise_compensator_standard(double lambda, const snoise_marks* marks,
                                                     snoise_compensator** out);
/* Piecewise-linear rate through (t[i], rate[i]); bound must dominate it. */
SNOISE_API snoise_status snoise_compensator_table(const double* t, const double* rate, size_t n,
                                                  double bound, const snoise_marks* marks,
                                                  snoise_compensator** out);
SNOISE_API void snoise_compensator_free(snoise_compensator* spec);

/* Marked point process paths. */
SNOISE_API snoise_status snoise_path_new(int mark_dim, double horizon, snoise_path** out);
SNOISE_API snoise_status snoise_path_simulate(const snoise_compensator* spec, double horizon,
                                              uint64_t seed, uint64_t path_index,
                                              snoise_path** out);
SNOISE_API snoise_status snoise_path_push(snoise_path* path, double t, const double* x, size_t dim);
SNOISE_API snoise_status snoise_path_size(const snoise_path* path, size_t* size);
SNOISE_API snoise_status snoise_path_event(const snoise_path* path, size_t i, double* t,
                                           double* x, size_t dim);
SNOISE_API void snoise_path_free(snoise_path* path);

/* Shot-noise process. */
SNOISE_API snoise_status snoise_process_new(const snoise_kernel* kernel,
                                            const snoise_compensator* spec, snoise_process** out);
SNOISE_API void snoise_process_free(snoise_process* proc);
SNOISE_API snoise_status snoise_process_eval(const snoise_process* proc, const snoise_path* path,
                                             double t, double* value);
/* E[exp(i theta S_T) | F_t] given the path observed up to t. */
SNOISE_API snoise_status snoise_process_cf(const snoise_process* proc, const snoise_path* path,
                                           double t, double T, double theta, double quad_tol,
                                           double* re, double* im);

/* Self-exciting intensity. out6 receives phi, psi1, psi2 at the horizon as
   (re, im) pairs. */
SNOISE_API snoise_status snoise_riccati_terminal(double kappa, double theta_bar, double u1,
                                                 double u2, double horizon, int steps,
                                                 double* out6);
SNOISE_API snoise_status snoise_affine_cf(double kappa, double theta_bar, double t, double n,
                                          double lambda, double T, double u1, double u2,
                                          double* re, double* im);

/* Runs one scenario from a config file. subcommand may be NULL to use the
   scenario named in the file; n_paths <= 0 and seed == NULL keep the file's
   values; out_dir NULL means SNOISE_OUT or the current directory. exit_code
   receives 0 pass, 1 check failure, 2 config error, 3 numerical failure. */
SNOISE_API snoise_status snoise_run_scenario(const char* subcommand, const char* config_path,
                                             const char* out_dir, int64_t n_paths,
                                             const uint64_t* seed, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
