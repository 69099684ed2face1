#ifndef GPTSHAPE_H
#define GPTSHAPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum GptStatus {
  Ok = 0,
  NullPointer = 1,
  InvalidArgument = 2,
  ComputationFailed = 3,
  Panic = 4,
} GptStatus;

/**
 * Opaque list of recovered domain candidates, ranked best first.
 */
typedef struct GptCandidates GptCandidates;

/**
 * Opaque discretized boundary curve.
 */
typedef struct GptCurve GptCurve;

/**
 * Opaque bivariate polynomial.
 */
typedef struct GptPoly GptPoly;

/**
 * Opaque tesselated GPT matrix.
 */
typedef struct GptTensor GptTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the most recent error on this thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full message length in
 * bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must point to at least `len` writable bytes, or be null (in which
 * case only the length is returned).
 */
size_t gpt_last_error_message(char *buf, size_t len);

/**
 * Builds a boundary curve by resampling a closed point loop given as
 * interleaved `x0, y0, x1, y1, ...` to `n_nodes` arclength-uniform nodes.
 *
 * # Safety
 * `xy` must point to `2 * n_points` doubles; `out` must be a valid pointer.
 * The returned handle must be freed with [`gpt_curve_free`].
 */
enum GptStatus gpt_curve_from_points(const double *xy,
                                     size_t n_points,
                                     size_t n_nodes,
                                     struct GptCurve **out);

/**
 * Builds one of the parametric test shapes from its JSON description, e.g.
 * `{"kind":"ellipse","a":2.0,"b":1.0}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 * The returned handle must be freed with [`gpt_curve_free`].
 */
enum GptStatus gpt_curve_from_shape_json(const char *json, size_t n_nodes, struct GptCurve **out);

/**
 * Number of nodes of a curve handle.
 *
 * # Safety
 * `curve` must be a live handle from this library.
 */
size_t gpt_curve_len(const struct GptCurve *curve);

/**
 * Copies the node coordinates (interleaved x,y) into `out_xy`.
 *
 * # Safety
 * `out_xy` must have room for `2 * gpt_curve_len(curve)` doubles.
 */
enum GptStatus gpt_curve_nodes(const struct GptCurve *curve, double *out_xy);

/**
 * # Safety
 * `curve` must come from this library and not be freed twice; null is a no-op.
 */
void gpt_curve_free(struct GptCurve *curve);

/**
 * Computes the tesselated GPT of order `d` at spectral parameter `lambda`.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be valid. The returned handle
 * must be freed with [`gpt_tensor_free`].
 */
enum GptStatus gpt_tensor_compute(const struct GptCurve *curve,
                                  double lambda,
                                  size_t d,
                                  struct GptTensor **out);

/**
 * # Safety
 * `t` must be a live handle.
 */
size_t gpt_tensor_rows(const struct GptTensor *t);

/**
 * # Safety
 * `t` must be a live handle.
 */
size_t gpt_tensor_cols(const struct GptTensor *t);

/**
 * Copies the entries row-major into `out`.
 *
 * # Safety
 * `out` must have room for `rows * cols` doubles.
 */
enum GptStatus gpt_tensor_entries(const struct GptTensor *t, double *out);

/**
 * Parses a tensor from its JSON serialization.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be valid. The returned handle
 * must be freed with [`gpt_tensor_free`].
 */
enum GptStatus gpt_tensor_from_json(const char *json, struct GptTensor **out);

/**
 * # Safety
 * `t` must come from this library and not be freed twice; null is a no-op.
 */
void gpt_tensor_free(struct GptTensor *t);

/**
 * Recovers the minimal boundary polynomial from the tensor's numerical
 * kernel.
 *
 * # Safety
 * `t` must be a live handle; `out` must be valid. The returned handle must
 * be freed with [`gpt_poly_free`].
 */
enum GptStatus gpt_recover_poly(const struct GptTensor *t, struct GptPoly **out);

/**
 * # Safety
 * `p` must be a live handle.
 */
size_t gpt_poly_degree(const struct GptPoly *p);

/**
 * Coefficient of the monomial `x^a1 * y^a2` (0 when out of range).
 *
 * # Safety
 * `p` must be a live handle.
 */
double gpt_poly_coeff(const struct GptPoly *p, size_t a1, size_t a2);

/**
 * Evaluates the polynomial at `(x, y)`.
 *
 * # Safety
 * `p` must be a live handle.
 */
double gpt_poly_eval(const struct GptPoly *p, double x, double y);

/**
 * # Safety
 * `p` must come from this library and not be freed twice; null is a no-op.
 */
void gpt_poly_free(struct GptPoly *p);

/**
 * Runs the full recovery pipeline and returns the ranked domain candidates.
 * `rank` toggles the forward-solve scoring stage.
 *
 * # Safety
 * `t` must be a live handle; `out` must be valid. The returned handle must
 * be freed with [`gpt_candidates_free`].
 */
enum GptStatus gpt_recover_candidates(const struct GptTensor *t,
                                      bool rank,
                                      struct GptCandidates **out);

/**
 * # Safety
 * `c` must be a live handle.
 */
size_t gpt_candidates_count(const struct GptCandidates *c);

/**
 * Number of boundary points of candidate `index`.
 *
 * # Safety
 * `c` must be a live handle.
 */
size_t gpt_candidates_len(const struct GptCandidates *c, size_t index);

/**
 * Copies the boundary loop of candidate `index` (interleaved x,y).
 *
 * # Safety
 * `out_xy` must have room for `2 * gpt_candidates_len(c, index)` doubles.
 */
enum GptStatus gpt_candidates_points(const struct GptCandidates *c, size_t index, double *out_xy);

/**
 * Candidate score (relative first-order tensor discrepancy), or NaN when
 * unscored.
 *
 * # Safety
 * `c` must be a live handle.
 */
double gpt_candidates_score(const struct GptCandidates *c, size_t index);

/**
 * # Safety
 * `c` must come from this library and not be freed twice; null is a no-op.
 */
void gpt_candidates_free(struct GptCandidates *c);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GPTSHAPE_H */
