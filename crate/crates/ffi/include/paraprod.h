#ifndef PARAPROD_H
#define PARAPROD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_POINTER = 1,
  PP_STATUS_INVALID_ARGUMENT = 2,
  PP_STATUS_PARSE_ERROR = 3,
  PP_STATUS_IO_ERROR = 4,
  PP_STATUS_DEPTH_MISMATCH = 5,
  PP_STATUS_NUMERICAL_ERROR = 6,
  PP_STATUS_PANIC = 7,
} PpStatus;

typedef enum PpGramKind {
  /**
   * `⟨Π_b Π_d h_J, h_I⟩` from the closed form.
   */
  PP_GRAM_KIND_COMPOSITION_CLOSED = 0,
  /**
   * Same matrix, applying both paraproducts on the grid.
   */
  PP_GRAM_KIND_COMPOSITION_DIRECT = 1,
  /**
   * Half-plane transplant, closed form.
   */
  PP_GRAM_KIND_TRANSPLANT_CLOSED = 2,
  /**
   * Half-plane transplant, composed operator factors.
   */
  PP_GRAM_KIND_TRANSPLANT_DIRECT = 3,
} PpGramKind;

/**
 * Opaque dense matrix handle, rows and columns in canonical node order.
 */
typedef struct PpMatrix PpMatrix;

/**
 * Opaque conditions report handle.
 */
typedef struct PpReport PpReport;

/**
 * Opaque symbol handle.
 */
typedef struct PpSymbol PpSymbol;

/**
 * Numeric fields of a report. `ratio` is `+inf` when `A + B + C = 0 < op_norm`
 * and NaN when both vanish.
 */
typedef struct PpConditions {
  uint32_t depth;
  double a;
  double b;
  double c;
  double bmo_b;
  double bmo_d;
  double op_norm;
  double ratio;
} PpConditions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid until the
 * next failing call on the same thread.
 */
const char *pp_last_error_message(void);

/**
 * Builds a symbol from a descriptor string (`zero`, `const:<c>`, `log`,
 * `random[:seed=<n>][,gamma=<g>][,dist=<name>]`, `file:<path>`).
 *
 * # Safety
 * `descriptor` must be a NUL-terminated string; `out` must be writable.
 */
enum PpStatus pp_symbol_generate(const char *descriptor,
                                 uint32_t depth,
                                 struct PpSymbol **out_symbol);

/**
 * Builds a symbol from `len` values in canonical node order; `len` must be
 * `2^(depth+1) - 1`. `im` may be null for a real symbol.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `len` readable doubles.
 */
enum PpStatus pp_symbol_from_values(uint32_t depth,
                                    const double *re,
                                    const double *im,
                                    size_t len,
                                    struct PpSymbol **out_symbol);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out_symbol` must be writable.
 */
enum PpStatus pp_symbol_load(const char *path, struct PpSymbol **out_symbol);

/**
 * # Safety
 * `symbol` must be a live handle; `path` a NUL-terminated string.
 */
enum PpStatus pp_symbol_save(const struct PpSymbol *symbol, const char *path);

/**
 * Depth of a symbol, or 0 for null.
 *
 * # Safety
 * `symbol` must be null or a live handle.
 */
uint32_t pp_symbol_depth(const struct PpSymbol *symbol);

/**
 * Number of nodes, or 0 for null.
 *
 * # Safety
 * `symbol` must be null or a live handle.
 */
size_t pp_symbol_len(const struct PpSymbol *symbol);

/**
 * Value at canonical index `index`.
 *
 * # Safety
 * `symbol` must be a live handle; `re` and `im` writable.
 */
enum PpStatus pp_symbol_get(const struct PpSymbol *symbol, size_t index, double *re, double *im);

/**
 * Writes the 16-hex-digit content hash plus NUL into `buf` (at least 17 bytes).
 *
 * # Safety
 * `symbol` must be a live handle; `buf` must hold `buf_len` bytes.
 */
enum PpStatus pp_symbol_hash(const struct PpSymbol *symbol, char *buf, size_t buf_len);

/**
 * # Safety
 * `symbol` must be null or a handle not yet freed.
 */
void pp_symbol_free(struct PpSymbol *symbol);

/**
 * Computes A, B, C, the BMO norms and the operator norm of `Π_b Π_d`.
 *
 * # Safety
 * `b`, `d` must be live handles; `out_report` writable.
 */
enum PpStatus pp_conditions(const struct PpSymbol *b,
                            const struct PpSymbol *d,
                            struct PpReport **out_report);

/**
 * # Safety
 * `report` must be a live handle; `out_values` writable.
 */
enum PpStatus pp_report_values(const struct PpReport *report, struct PpConditions *out_values);

/**
 * Report as pretty JSON; release with [`pp_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out_json` writable.
 */
enum PpStatus pp_report_json(const struct PpReport *report, char **out_json);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void pp_report_free(struct PpReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void pp_string_free(char *s);

/**
 * # Safety
 * `b`, `d` must be live handles; `out_matrix` writable.
 */
enum PpStatus pp_gram(const struct PpSymbol *b,
                      const struct PpSymbol *d,
                      enum PpGramKind kind,
                      struct PpMatrix **out_matrix);

/**
 * Side length, or 0 for null.
 *
 * # Safety
 * `matrix` must be null or a live handle.
 */
size_t pp_matrix_dim(const struct PpMatrix *matrix);

/**
 * # Safety
 * `matrix` must be a live handle; `re` and `im` writable.
 */
enum PpStatus pp_matrix_get(const struct PpMatrix *matrix,
                            size_t row,
                            size_t col,
                            double *re,
                            double *im);

/**
 * Spectral norm: dense SVD up to dimension 2000, power iteration above.
 *
 * # Safety
 * `matrix` must be a live handle; `out_norm` writable.
 */
enum PpStatus pp_matrix_norm(const struct PpMatrix *matrix, double *out_norm);

/**
 * # Safety
 * `matrix` must be null or a handle not yet freed.
 */
void pp_matrix_free(struct PpMatrix *matrix);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARAPROD_H */
