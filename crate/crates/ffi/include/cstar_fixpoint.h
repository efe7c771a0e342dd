#ifndef CSTAR_FIXPOINT_H
#define CSTAR_FIXPOINT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CstarStatus {
  CSTAR_STATUS_OK = 0,
  CSTAR_STATUS_NULL_POINTER = 1,
  CSTAR_STATUS_INVALID_UTF8 = 2,
  CSTAR_STATUS_PARSE = 3,
  CSTAR_STATUS_UNKNOWN_BUILTIN = 4,
  CSTAR_STATUS_DIMENSION_MISMATCH = 5,
  CSTAR_STATUS_NON_FINITE = 6,
  CSTAR_STATUS_NOT_HERMITIAN = 7,
  CSTAR_STATUS_CERTIFICATE_INVALID = 8,
  CSTAR_STATUS_WEIGHT_NOT_POSITIVE = 9,
  CSTAR_STATUS_DIVERGENCE = 10,
  CSTAR_STATUS_INVALID_INPUT = 11,
  CSTAR_STATUS_BUFFER_TOO_SMALL = 12,
  CSTAR_STATUS_PANIC = 13,
} CstarStatus;

/*
 A metric space, map, certificate, start point and tolerances.
 */
typedef struct CstarProblem CstarProblem;

/*
 The outcome of a Picard solve.
 */
typedef struct CstarSolution CstarSolution;

/*
 Counts from a sampled verification run. `passed` is nonzero when every
 count of failures is zero.
 */
typedef struct CstarVerifySummary {
  size_t positivity_failures;
  size_t identity_failures;
  size_t symmetry_failures;
  size_t triangle_failures;
  size_t axiom_checks;
  size_t contraction_checks;
  size_t contraction_failures;
  bool passed;
} CstarVerifySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 The message of the most recent failure on this thread, or NULL if there
 has been none. The caller owns the string and must release it with
 [`cstar_string_free`].
 */
char *cstar_last_error_message(void);

/*
 # Safety
 `s` must be NULL or a string returned by this library, not yet freed.
 */
void cstar_string_free(char *s);

/*
 Parses an instance file held in memory.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum CstarStatus cstar_problem_from_text(const char *text, struct CstarProblem **out);

/*
 Loads a built-in instance by name, for example `"scalar-half"`.

 # Safety
 `name` must be a NUL-terminated string; `out` must be writable.
 */
enum CstarStatus cstar_problem_builtin(const char *name, struct CstarProblem **out);

/*
 # Safety
 `problem` must be NULL or a handle from this library, not yet freed.
 */
void cstar_problem_free(struct CstarProblem *problem);

/*
 Dimension of the points the problem's map acts on, or 0 for NULL.

 # Safety
 `problem` must be NULL or a live handle.
 */
size_t cstar_problem_point_dim(const struct CstarProblem *problem);

/*
 Size `n` of the matrix algebra `M_n(C)` the metric takes values in, or 0
 for NULL.

 # Safety
 `problem` must be NULL or a live handle.
 */
size_t cstar_problem_algebra_dim(const struct CstarProblem *problem);

/*
 `||A||` of the problem's certificate, or NaN for NULL.

 # Safety
 `problem` must be NULL or a live handle.
 */
double cstar_problem_norm_a(const struct CstarProblem *problem);

/*
 Samples `samples` triples for the metric axioms and `samples` pairs for
 the contraction condition. A failed verification is reported through
 `out->passed`, not through the status.

 # Safety
 `problem` must be a live handle; `out` must be writable.
 */
enum CstarStatus cstar_problem_verify(const struct CstarProblem *problem,
                                      uint64_t seed,
                                      size_t samples,
                                      struct CstarVerifySummary *out);

/*
 Runs Picard iteration from the problem's start point. A `conv_tol` of 0
 keeps the problem's own tolerance.

 # Safety
 `problem` must be a live handle; `out` must be writable.
 */
enum CstarStatus cstar_problem_solve(const struct CstarProblem *problem,
                                     double conv_tol,
                                     size_t max_iter,
                                     struct CstarSolution **out);

/*
 # Safety
 `solution` must be NULL or a handle from this library, not yet freed.
 */
void cstar_solution_free(struct CstarSolution *solution);

/*
 Copies the approximate fixed point into `buf`, which holds `len` doubles.
 Fails with `BUFFER_TOO_SMALL` if `len` is below the point dimension.

 # Safety
 `solution` must be a live handle; `buf` must hold `len` writable doubles.
 */
enum CstarStatus cstar_solution_point(const struct CstarSolution *solution,
                                      double *buf,
                                      size_t len);

/*
 Dimension of the fixed point, or 0 for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
size_t cstar_solution_point_dim(const struct CstarSolution *solution);

/*
 Number of map applications performed, or 0 for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
size_t cstar_solution_iterations(const struct CstarSolution *solution);

/*
 `||d(x_n, T x_n)||` at the returned point, or NaN for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
double cstar_solution_residual_norm(const struct CstarSolution *solution);

/*
 `||A||^(2n) / (1 - ||A||^2) * ||d(x_0, T x_0)||`, or NaN for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
double cstar_solution_apriori_bound(const struct CstarSolution *solution);

/*
 `residual / (1 - ||A||^2)`, or NaN for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
double cstar_solution_aposteriori_bound(const struct CstarSolution *solution);

/*
 Whether the residual reached the convergence tolerance.

 # Safety
 `solution` must be NULL or a live handle.
 */
bool cstar_solution_converged(const struct CstarSolution *solution);

/*
 Operator norm of the `dim x dim` complex matrix whose real and imaginary
 parts are given row-major in `re` and `im` (`im` may be NULL for a real
 matrix).

 # Safety
 `re` (and `im` if non-NULL) must hold `dim * dim` readable doubles; `out`
 must be writable.
 */
enum CstarStatus cstar_operator_norm(size_t dim, const double *re, const double *im, double *out);

/*
 `(q^n + q^m) / (1 - q) * d0_norm` with `q = norm_a^2`.

 # Safety
 `out` must be writable.
 */
enum CstarStatus cstar_cauchy_pair_bound(double norm_a,
                                         double d0_norm,
                                         size_t n,
                                         size_t m,
                                         double *out);

/*
 `q^n / (1 - q) * d0_norm` with `q = norm_a^2`.

 # Safety
 `out` must be writable.
 */
enum CstarStatus cstar_apriori_bound(double norm_a, double d0_norm, size_t n, double *out);

/*
 `residual_norm / (1 - norm_a^2)`.

 # Safety
 `out` must be writable.
 */
enum CstarStatus cstar_aposteriori_bound(double norm_a, double residual_norm, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSTAR_FIXPOINT_H */
