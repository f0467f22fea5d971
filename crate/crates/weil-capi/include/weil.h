#ifndef WEIL_H
#define WEIL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every entry point.
typedef enum WeilStatus {
  // Success.
  WEIL_STATUS_OK = 0,
  // The input text failed to parse.
  WEIL_STATUS_PARSE_ERROR = 1,
  // The input parsed but violated a validity requirement.
  WEIL_STATUS_VALIDATION_ERROR = 2,
  // A required pointer argument was null.
  WEIL_STATUS_NULL_POINTER = 3,
  // An input/output error (for example an unreadable diagram file).
  WEIL_STATUS_IO_ERROR = 4,
} WeilStatus;

// Opaque handle to a parsed expression.
typedef struct WeilExpr WeilExpr;

// Quasi-colimit verdict as plain C data. `failure` is 0 for none, 1 for
// not-injective, 2 for not-surjective; `gap` is the dimension defect.
typedef struct WeilVerdict {
  bool is_quasi_colimit;
  uintptr_t apex_dim;
  uintptr_t limit_dim;
  uintptr_t image_dim;
  uint8_t failure;
  uintptr_t gap;
} WeilVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a unary expression in `x`. On success writes a fresh handle to
// `out`.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum WeilStatus weil_expr_parse(const char *text, struct WeilExpr **out);

// Releases an expression handle. Null is ignored.
//
// # Safety
// `expr` must be a handle from [`weil_expr_parse`], not yet freed.
void weil_expr_free(struct WeilExpr *expr);

// Renders the expression; reparsing the result reproduces it.
//
// # Safety
// `expr` must be a live handle; `out` a valid pointer. The returned string
// must be freed with [`weil_string_free`].
enum WeilStatus weil_expr_to_string(const struct WeilExpr *expr, char **out);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must originate from this library and not be freed twice.
void weil_string_free(char *s);

// Exact n-th derivative of the expression at a rational point (e.g. "2",
// "-3/4"). The result is written as exact rational text.
//
// # Safety
// `expr` must be a live handle; `at` a valid string; `out` valid.
enum WeilStatus weil_derive(const struct WeilExpr *expr,
                            const char *at,
                            uintptr_t order,
                            char **out);

// Verifies the infinitesimal Taylor expansion of the expression at the
// given order; writes the verdict to `out_holds`.
//
// # Safety
// `expr` must be a live handle; `at` a valid string; `out_holds` valid.
enum WeilStatus weil_taylor_check(const struct WeilExpr *expr,
                                  const char *at,
                                  uintptr_t order,
                                  bool *out_holds);

// Parses a diagram file and decides the quasi-colimit property, filling
// `out` with the exact dimensions.
//
// # Safety
// `path` must be a valid string and `out` a valid pointer.
enum WeilStatus weil_check_diagram(const char *path, struct WeilVerdict *out);

// Lie bracket of two polynomial fields on Q^dim. Fields are given as
// `dim` components separated by `;` (brackets optional), in `x1..xdim`
// (`x` for dimension one). Writes the bracket components in the same
// format.
//
// # Safety
// `x_field`, `y_field` must be valid strings; `out` valid. Free the result
// with [`weil_string_free`].
enum WeilStatus weil_bracket(uintptr_t dim, const char *x_field, const char *y_field, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WEIL_H */
