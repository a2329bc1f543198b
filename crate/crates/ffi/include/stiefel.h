#ifndef STIEFEL_H
#define STIEFEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum StiefelStatus {
  STIEFEL_STATUS_OK = 0,
  STIEFEL_STATUS_NULL_POINTER = 1,
  STIEFEL_STATUS_INVALID_ARGUMENT = 2,
  STIEFEL_STATUS_INADMISSIBLE = 3,
  STIEFEL_STATUS_POLE = 4,
  STIEFEL_STATUS_OUT_OF_REGION = 5,
  STIEFEL_STATUS_NUMERICAL = 6,
  STIEFEL_STATUS_CONFIG = 7,
  STIEFEL_STATUS_PANIC = 8,
} StiefelStatus;

// Opaque catalog function on `V(n,m)`.
typedef struct StiefelFunction StiefelFunction;

// Opaque verification report.
typedef struct StiefelReport StiefelReport;

// A Monte Carlo estimate.
typedef struct StiefelEstimate {
  double mean;
  double stderr;
  uint64_t samples;
} StiefelEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `cap` bytes) and returns its full length without the NUL.
// Pass a null `buf` to query the length.
//
// # Safety
// `buf` must be null or point to at least `cap` writable bytes.
size_t stiefel_last_error(char *buf, size_t cap);

// A normalizing constant by tag (`gamma_mk`, `delta_m`, `delta_0`, ...).
// At a pole `*value` is NaN and `*pole_order` is the order; otherwise `*pole_order` is 0.
//
// # Safety
// `kind` must be a NUL-terminated string; `value` and `pole_order` must be valid for writes.
enum StiefelStatus stiefel_constant(const char *kind,
                                    size_t n,
                                    size_t m,
                                    size_t k,
                                    size_t j,
                                    double lambda,
                                    double *value,
                                    uint32_t *pole_order);

// Siegel gamma `Γ_m(alpha)`, with the same pole convention as [`stiefel_constant`].
//
// # Safety
// `value` and `pole_order` must be valid for writes.
enum StiefelStatus stiefel_siegel_gamma(size_t m,
                                        double alpha,
                                        double *value,
                                        uint32_t *pole_order);

// Builds a catalog function from its key, e.g. `"trace_quadratic:S=e1"`.
// Release it with [`stiefel_function_free`].
//
// # Safety
// `key` must be a NUL-terminated string and `out` valid for writes.
enum StiefelStatus stiefel_function_new(const char *key,
                                        size_t n,
                                        size_t m,
                                        struct StiefelFunction **out);

// # Safety
// `f` must be null or a handle from [`stiefel_function_new`] not yet freed.
void stiefel_function_free(struct StiefelFunction *f);

// `f(v)` at a frame `v` given as `n·m` row-major entries.
//
// # Safety
// `f` must be a live handle, `v` must point to `n·m` doubles and `value` be valid for writes.
enum StiefelStatus stiefel_function_eval(const struct StiefelFunction *f,
                                         const double *v,
                                         double *value);

// Unnormalized cosine transform `∫ f(v) |u'v|_m^λ d_*v` at `u ∈ V(n,k)`.
//
// # Safety
// `f` must be a live handle, `u` must point to `n·k` doubles and `out` be valid for writes.
enum StiefelStatus stiefel_cosine_transform(const struct StiefelFunction *f,
                                            const double *u,
                                            size_t k,
                                            double lambda,
                                            size_t samples,
                                            uint64_t seed,
                                            struct StiefelEstimate *out);

// Normalized sine transform at `u ∈ V(n,m)`, sampled from the kernel-tilted law.
//
// # Safety
// `f` must be a live handle, `u` must point to `n·m` doubles and `out` be valid for writes.
enum StiefelStatus stiefel_sine_transform(const struct StiefelFunction *f,
                                          const double *u,
                                          double lambda,
                                          size_t samples,
                                          uint64_t seed,
                                          struct StiefelEstimate *out);

// Funk transform at `u ∈ V(n,k)`.
//
// # Safety
// `f` must be a live handle, `u` must point to `n·k` doubles and `out` be valid for writes.
enum StiefelStatus stiefel_funk_transform(const struct StiefelFunction *f,
                                          const double *u,
                                          size_t k,
                                          size_t samples,
                                          uint64_t seed,
                                          struct StiefelEstimate *out);

// Runs a suite given as TOML text. `threads = 0` uses the global pool;
// a null `seed` keeps the suite seed. Release with [`stiefel_report_free`].
//
// A run whose experiments fail still returns `Ok`; see [`stiefel_report_summary`].
//
// # Safety
// `config_toml` must be a NUL-terminated string, `seed` null or valid for reads,
// and `out` valid for writes.
enum StiefelStatus stiefel_verify_run(const char *config_toml,
                                      size_t threads,
                                      const uint64_t *seed,
                                      struct StiefelReport **out);

// Overall verdict and counts of a report.
//
// # Safety
// `r` must be a live handle; the outputs must be valid for writes.
enum StiefelStatus stiefel_report_summary(const struct StiefelReport *r,
                                          bool *pass,
                                          size_t *passed,
                                          size_t *failed);

// The report as JSON, owned by the handle; null if `r` is null.
//
// # Safety
// `r` must be null or a live handle. The string is valid until the handle is freed.
const char *stiefel_report_json(const struct StiefelReport *r);

// # Safety
// `r` must be null or a handle from [`stiefel_verify_run`] not yet freed.
void stiefel_report_free(struct StiefelReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STIEFEL_H */
