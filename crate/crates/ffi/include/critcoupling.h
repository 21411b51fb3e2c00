#ifndef CRITCOUPLING_H
#define CRITCOUPLING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_ARGUMENT = 2,
  CC_STATUS_INVALID_POTENTIAL = 3,
  CC_STATUS_NOT_APPLICABLE = 4,
  CC_STATUS_NUMERICAL_FAILURE = 5,
  CC_STATUS_PANIC = 6,
} CcStatus;

typedef enum CcKind {
  CC_KIND_LOWER = 0,
  CC_KIND_UPPER = 1,
  CC_KIND_EXACT = 2,
} CcKind;

typedef enum CcMethod {
  CC_METHOD_TRACE_N = 0,
  CC_METHOD_GLASER = 1,
  CC_METHOD_HOELDER = 2,
  CC_METHOD_SUFFICIENT = 3,
  CC_METHOD_EXACT_EIGEN = 4,
  CC_METHOD_EXACT_SHOOTING = 5,
  CC_METHOD_CLOSED_FORM = 6,
} CcMethod;

// Opaque potential shape.
typedef struct CcShape CcShape;

// Quadrature grid knobs; see `cc_resolution_default`.
typedef struct CcResolution {
  uint32_t panels;
  uint32_t points_per_panel;
  uint32_t origin_panels;
  uint32_t tail_panels;
  double tail_eps;
} CcResolution;

// One bound on the critical coupling.
//
// `parameter` holds the method parameter: the trace order `n`, the
// optimal exponent `p`, the crossing radius `alpha`, the grid size for
// the eigen route, or the outer radius for shooting.
typedef struct CcBound {
  double value;
  double error_estimate;
  enum CcKind kind;
  enum CcMethod method;
  uint32_t ell;
  double parameter;
} CcBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *cc_version(void);

// Message of the last failed call on this thread, empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *cc_last_error(void);

struct CcResolution cc_resolution_default(void);

// Built-in shape by name (`square_well`, `exponential`, `gaussian`,
// `wood_saxon`) with `count` named parameters.
enum CcStatus cc_shape_builtin(const char *name,
                               const char *const *keys,
                               const double *values,
                               size_t count,
                               struct CcShape **out);

// Shape from an expression in `r`, e.g. `"exp(-r^2/b)"`.
enum CcStatus cc_shape_expression(const char *text,
                                  const char *const *keys,
                                  const double *values,
                                  size_t count,
                                  struct CcShape **out);

// Shape interpolated monotonically through `count` samples `(y[i], v[i])`.
enum CcStatus cc_shape_table(const double *y, const double *v, size_t count, struct CcShape **out);

// Releases a shape; null is ignored.
void cc_shape_free(struct CcShape *shape);

// `v(y)` of a shape.
enum CcStatus cc_shape_value(const struct CcShape *shape, double y, double *out);

// Trace lower limit of order `n`. `resolution` may be null for defaults.
enum CcStatus cc_trace_lower_limit(const struct CcShape *shape,
                                   uint32_t ell,
                                   uint32_t n,
                                   const struct CcResolution *resolution,
                                   struct CcBound *out);

// Glaser-type moment limit at the optimal exponent.
enum CcStatus cc_glaser_limit(const struct CcShape *shape,
                              uint32_t ell,
                              const struct CcResolution *resolution,
                              struct CcBound *out);

// Hölder-type moment limit at the optimal exponent; `ell >= 1`.
enum CcStatus cc_hoelder_limit(const struct CcShape *shape,
                               uint32_t ell,
                               const struct CcResolution *resolution,
                               struct CcBound *out);

// Upper limit for monotone shapes, `ell = 0` only.
enum CcStatus cc_sufficient_limit(const struct CcShape *shape,
                                  uint32_t ell,
                                  const struct CcResolution *resolution,
                                  struct CcBound *out);

// `g_c` from the dominant kernel eigenvalue.
enum CcStatus cc_critical_coupling_eigen(const struct CcShape *shape,
                                         uint32_t ell,
                                         const struct CcResolution *resolution,
                                         struct CcBound *out);

// `g_c` from zero-energy shooting with default settings.
enum CcStatus cc_critical_coupling_shooting(const struct CcShape *shape,
                                            uint32_t ell,
                                            struct CcBound *out);

// Closed-form `g_c` of the unit square well.
enum CcStatus cc_square_well_exact(uint32_t ell, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRITCOUPLING_H */
