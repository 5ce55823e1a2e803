#ifndef SIPDE_H
#define SIPDE_H

/* Generated by cbindgen from the sipde-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum SipdeStatus {
  SipdeStatus_Ok = 0,
  /**
   * Unknown name, out-of-range parameter, or malformed configuration.
   */
  SipdeStatus_InvalidArgument = 1,
  /**
   * The computation ran but failed numerically (singular system,
   * blow-up, pole).
   */
  SipdeStatus_NumericFailure = 2,
  SipdeStatus_NullPointer = 3,
} SipdeStatus;

/**
 * Opaque Rosenbrock tableau handle.
 */
typedef struct SipdeTableau SipdeTableau;

/**
 * Complex number in Cartesian form.
 */
typedef struct SipdeComplex {
  double re;
  double im;
} SipdeComplex;

/**
 * One convergence run: which case, which integrator, and the step rule.
 * Fields at their zero values select the documented defaults.
 */
typedef struct SipdeRunSpec {
  /**
   * Grid resolution (number of nodes).
   */
  uint32_t n;
  /**
   * 0: Rosenbrock with `gamma`; 1: SI-PC BDF with `p`/`mu`.
   */
  int use_bdf;
  /**
   * Rosenbrock diagonal coefficient (>= 1/4). 0 selects 3/4.
   */
  double gamma;
  /**
   * BDF corrector order (1..=4). 0 selects 3.
   */
  int p;
  /**
   * Corrector iterations. 0 selects p.
   */
  int mu;
  /**
   * Starting-procedure reduction factor (1, 2, 4, 8, 16). 0 selects 4.
   */
  int start_m;
  /**
   * Nonzero: take starting values from the exact solution.
   */
  int exact_start;
  /**
   * dt = dt_ratio * dx when cfl <= 0. 0 selects 1.
   */
  double dt_ratio;
  /**
   * dt = cfl * dx / max|f'(u0)| when positive.
   */
  double cfl;
  /**
   * Final time; <= 0 selects the case default.
   */
  double final_time;
  /**
   * Traveling-wave speed for the KdV cases; <= 0 selects 0.1.
   */
  double lambda;
  /**
   * Nonzero: fifth-order WENO reconstruction instead of third.
   */
  int weno53;
  /**
   * WENO smoothness regularizer; <= 0 selects the case default.
   */
  double weno_epsilon;
  /**
   * Implicit stencil order (2 or 4). 0 selects 4.
   */
  int stencil_order;
} SipdeRunSpec;

/**
 * Discrete error norms of a convergence run.
 */
typedef struct SipdeErrorNorms {
  /**
   * dx-scaled L1 norm.
   */
  double l1;
  /**
   * dx-scaled L2 norm.
   */
  double l2;
  /**
   * Max norm.
   */
  double linf;
} SipdeErrorNorms;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The exact-rational gamma = 3/4 scheme. Never fails.
 */
struct SipdeTableau *sipde_tableau_gamma_three_quarters(void);

/**
 * Construct the third-order scheme for `gamma >= 1/4`.
 */
enum SipdeStatus sipde_tableau_construct(double gamma, struct SipdeTableau **out);

/**
 * Release a tableau handle. Accepts NULL.
 */
void sipde_tableau_free(struct SipdeTableau *t);

/**
 * Number of stages, or -1 for NULL.
 */
int sipde_tableau_stages(const struct SipdeTableau *t);

/**
 * Highest satisfied order condition (0..=3), or -1 for NULL.
 */
int sipde_tableau_order(const struct SipdeTableau *t);

/**
 * 1 when the tableau is stiffly accurate, 0 otherwise, -1 for NULL.
 */
int sipde_tableau_is_stiffly_accurate(const struct SipdeTableau *t);

/**
 * Serialize the tableau in the plain-text exchange format. The returned
 * string must be released with `sipde_string_free`.
 */
char *sipde_tableau_export(const struct SipdeTableau *t);

/**
 * Release a string returned by this library. Accepts NULL.
 */
void sipde_string_free(char *s);

/**
 * Evaluate the stability function R(zt, z).
 */
enum SipdeStatus sipde_stability_function(const struct SipdeTableau *t,
                                          struct SipdeComplex z_tilde,
                                          struct SipdeComplex z,
                                          struct SipdeComplex *out);

/**
 * The damping limit R(zt, inf) = 1 - b^T B^{-1} e.
 */
enum SipdeStatus sipde_r_at_infinity(const struct SipdeTableau *t, double *out);

/**
 * Integrate one benchmark case to its final time and report the error
 * norms against the exact solution. `case` is one of "R1", "R2", "R3",
 * "M1", "M2", "M3", "M4" (or the long names).
 */
enum SipdeStatus sipde_run_case(const char *case_,
                                const struct SipdeRunSpec *spec,
                                struct SipdeErrorNorms *out);

/**
 * Library version as a static string; do not free.
 */
const char *sipde_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIPDE_H */
