/* C interface to the spectral power series solver.
 *
 * Every object is an opaque handle created by a *_create / *_load / *_parse
 * call and released by the matching *_free. Calls return sps_status; on
 * failure sps_last_error() holds a message for the calling thread. Strings
 * returned through char** are owned by the caller and released with
 * sps_string_free(). Vectors are written to caller buffers of the documented
 * length (M = system dimension).
 */
#ifndef SPS_SPS_H
#define SPS_SPS_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(SPS_BUILDING_LIBRARY)
#define SPS_API __declspec(dllexport)
#else
#define SPS_API __declspec(dllimport)
#endif
#else
#define SPS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sps_status {
  SPS_OK = 0,
  SPS_E_PARSE = 1,
  SPS_E_DIMENSION = 2,
  SPS_E_NONFINITE = 3,
  SPS_E_SINGULAR = 4,
  SPS_E_COMPLEX_SPECTRUM = 5,
  SPS_E_NONNEGATIVE_EIGENVALUE = 6,
  SPS_E_REPEATED_EIGENVALUE = 7,
  SPS_E_KERNEL_DIMENSION = 8,
  SPS_E_RESONANCE = 9,
  SPS_E_MISSING_COEFFICIENT = 10,
  SPS_E_BUDGET = 11,
  SPS_E_OVERFLOW = 12,
  SPS_E_FIT_NONCONVERGENCE = 13,
  SPS_E_FIT_SINGULAR_JACOBIAN = 14,
  SPS_E_TAIL_DRIFT = 15,
  SPS_E_DIVERGENCE = 16,
  SPS_E_MISSING_INITIAL_STATE = 17,
  SPS_E_INVALID_ARGUMENT = 18,
  SPS_E_REDUCTION = 19,
  SPS_E_IO = 20,
  SPS_E_INTERNAL = 21
} sps_status;

/* "SPS_OK", "SPS_E_PARSE", ...; never NULL. */
SPS_API const char* sps_status_name(sps_status status);
/* Message of the last failed call on this thread ("" if none). */
SPS_API const char* sps_last_error(void);
SPS_API void sps_string_free(char* text);

typedef enum sps_truncation_mode {
  SPS_TRUNCATION_PER_INDEX = 0,
  SPS_TRUNCATION_TOTAL_DEGREE = 1
} sps_truncation_mode;

typedef struct sps_truncation {
  sps_truncation_mode mode;
  int value;
} sps_truncation;

/* ---- systems ---------------------------------------------------------- */

typedef struct sps_system sps_system;

SPS_API sps_status sps_system_parse(const char* text, sps_system** out);
SPS_API sps_status sps_system_load(const char* path, sps_system** out);
/* a is M*M, row-major; x0 may be NULL. */
SPS_API sps_status sps_system_create(size_t dim, const double* a, const double* b,
                                     const double* x0, sps_system** out);
SPS_API void sps_system_free(sps_system* system);
SPS_API size_t sps_system_dim(const sps_system* system);
SPS_API int sps_system_has_x0(const sps_system* system);
/* SPS_E_MISSING_INITIAL_STATE when the system carries no x0. */
SPS_API sps_status sps_system_x0(const sps_system* system, double* out);
/* Writes the file's truncation and sets *present; *out is untouched if absent. */
SPS_API sps_status sps_system_truncation(const sps_system* system, sps_truncation* out,
                                         int* present);
SPS_API sps_status sps_system_to_json(const sps_system* system, char** out);

/* ---- series solutions ------------------------------------------------- */

typedef struct sps_solution sps_solution;

typedef struct sps_fit_info {
  double residual;
  double t_ref;
  int iterations;
  int warnings;
} sps_fit_info;

/* Spectral analysis plus the unit-parameter coefficient tensor. Free
 * parameters start at 1. */
SPS_API sps_status sps_solution_create(const sps_system* system, sps_truncation truncation,
                                       sps_solution** out);
SPS_API void sps_solution_free(sps_solution* solution);
SPS_API size_t sps_solution_dim(const sps_solution* solution);
SPS_API sps_status sps_solution_equilibrium(const sps_solution* solution, double* out);
/* Sorted by ascending magnitude. */
SPS_API sps_status sps_solution_eigenvalues(const sps_solution* solution, double* out);
SPS_API size_t sps_solution_coefficient_count(const sps_solution* solution);
/* alpha^n under the current free parameters; n has M entries. */
SPS_API sps_status sps_solution_coefficient(const sps_solution* solution, const int* n,
                                            double* out);
SPS_API sps_status sps_solution_set_parameters(sps_solution* solution, const double* p);
SPS_API sps_status sps_solution_parameters(const sps_solution* solution, double* out);
/* Fits p so the series equals x_ref at t_ref. certified_t0 may be NaN; when
 * t_ref lies below it a warning is recorded. info may be NULL. */
SPS_API sps_status sps_solution_fit_sum(sps_solution* solution, const double* x_ref, double t_ref,
                                        double certified_t0, sps_fit_info* info);
typedef struct sps_trajectory sps_trajectory;
/* Fits p from the late-time behaviour of a numerical trajectory. */
SPS_API sps_status sps_solution_fit_tail(sps_solution* solution, const sps_trajectory* trajectory,
                                         sps_fit_info* info);
/* Warning i of the last fit, or NULL. */
SPS_API const char* sps_solution_fit_warning(const sps_solution* solution, size_t index);
SPS_API sps_status sps_solution_evaluate(const sps_solution* solution, double t, double* out);
SPS_API sps_status sps_solution_coefficients_csv(const sps_solution* solution, char** out);
SPS_API sps_status sps_solution_coefficients_json(const sps_solution* solution, char** out);

/* ---- convergence certificate ------------------------------------------ */

typedef struct sps_certificate {
  int n0;
  int n1;
  int n2;
  double k;
  double k_unit;
  double t0;
  double t0_unclamped;
  double delta;
  double opnorm_a;
  double opnorm_j;
  double opnorm_inverse_bound;
  int partial;
  int degree_reached;
} sps_certificate;

/* p has M entries (NULL means unit parameters). work_budget caps the
 * convolution terms spent building the tensor; <= 0 selects the library
 * default (4e10). A build stopped by the budget gives partial = 1. */
SPS_API sps_status sps_certificate_compute(const sps_system* system, const double* p, double delta,
                                           double work_budget, sps_certificate* out);
/* JSON report over several delta values, with the t0 minimizer. */
SPS_API sps_status sps_certificate_grid_json(const sps_system* system, const double* p,
                                             const double* deltas, size_t count,
                                             double work_budget, char** out);
SPS_API sps_status sps_compute_n0(double opnorm_j, double lambda1, double delta, int* out);
SPS_API sps_status sps_compute_n1(double opnorm_a, double lambda1, int dim, double delta, int* out);

/* ---- numerical oracle ------------------------------------------------- */

/* x0 may be NULL to use the system's own x0. */
SPS_API sps_status sps_integrate(const sps_system* system, const double* x0, double t_end,
                                 double step, sps_trajectory** out);
SPS_API void sps_trajectory_free(sps_trajectory* trajectory);
SPS_API size_t sps_trajectory_length(const sps_trajectory* trajectory);
SPS_API size_t sps_trajectory_dim(const sps_trajectory* trajectory);
SPS_API double sps_trajectory_step(const sps_trajectory* trajectory);
SPS_API double sps_trajectory_est_error(const sps_trajectory* trajectory);
SPS_API sps_status sps_trajectory_sample(const sps_trajectory* trajectory, size_t index, double* t,
                                         double* x);
SPS_API sps_status sps_trajectory_csv(const sps_trajectory* trajectory, char** out);

/* ---- reduced models --------------------------------------------------- */

typedef struct sps_reduction sps_reduction;

typedef enum sps_reduction_field {
  SPS_REDUCTION_DELTA = 0,      /* L entries */
  SPS_REDUCTION_GAMMA = 1,      /* L */
  SPS_REDUCTION_GAMMA_STAR = 2, /* L */
  SPS_REDUCTION_C_HAT = 3,      /* L */
  SPS_REDUCTION_LAMBDA_HAT = 4, /* L */
  SPS_REDUCTION_C_FULL = 5,     /* M */
  SPS_REDUCTION_LAMBDA_FULL = 6 /* M */
} sps_reduction_field;

SPS_API sps_status sps_reduce(const sps_system* system, int keep, sps_reduction** out);
SPS_API void sps_reduction_free(sps_reduction* reduction);
SPS_API int sps_reduction_keep(const sps_reduction* reduction);
SPS_API sps_status sps_reduction_vector(const sps_reduction* reduction, sps_reduction_field field,
                                        double* out);
SPS_API sps_status sps_reduction_json(const sps_reduction* reduction, char** out);
SPS_API sps_status sps_reduction_corrected_system(const sps_reduction* reduction, sps_system** out);
SPS_API sps_status sps_reduction_partial_system(const sps_reduction* reduction, sps_system** out);

/* ---- logistic equation ------------------------------------------------ */

SPS_API sps_status sps_logistic_closed_form(double r, double k, double x0, double t, double* out);
/* Writes degree + 1 coefficients. */
SPS_API sps_status sps_logistic_coefficients(double r, double k, double x0, int degree, double* out);
/* clamped != 0 gives max(0, t0). */
SPS_API sps_status sps_logistic_t0(double r, double k, double x0, int clamped, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SPS_SPS_H */
