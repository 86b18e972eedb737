#ifndef PERCO_FFI_H
#define PERCO_FFI_H

/* Generated by cbindgen; do not edit by hand. Regenerate with: cbindgen --crate perco-ffi -o include/perco.h */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PERCO_OK 0

#define PERCO_EINVAL 1

#define PERCO_ENUMERIC 2

#define PERCO_ENULL 3

#define PERCO_EPANIC 4

// Opaque kernel handle.
typedef struct PercoKernel PercoKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a kernel from a KernelSpec JSON document.
//
// # Safety
// `spec_json` must be a NUL-terminated string and `out` a valid pointer.
int32_t perco_kernel_new(const char *spec_json, struct PercoKernel **out);

// # Safety
// `k` must come from perco_kernel_new and not be used afterwards.
void perco_kernel_free(struct PercoKernel *k);

// Evaluate a diagram ("loopN" / "thetaABC"); writes ln|v| and sign.
//
// # Safety
// All pointers must be valid; `id` NUL-terminated.
int32_t perco_diagram(const struct PercoKernel *k, const char *id, double *ln_abs, int32_t *sign);

// Same, but normalized by the scale-invariant power of the kernel mass.
//
// # Safety
// All pointers must be valid; `id` NUL-terminated.
int32_t perco_diagram_normalized(const struct PercoKernel *k,
                                 const char *id,
                                 double *ln_abs,
                                 int32_t *sign);

// φ(x) for a d-vector x.
//
// # Safety
// `x` must point to `len` doubles equal to the kernel dimension.
int32_t perco_kernel_eval(const struct PercoKernel *k, const double *x, size_t len, double *out);

// Critical-intensity series report as a JSON string (perco_string_free it).
//
// # Safety
// `k` and `out` must be valid pointers.
int32_t perco_expansion_json(const struct PercoKernel *k, char **out);

// Closed-form per-family series report as JSON, from a KernelSpec JSON.
//
// # Safety
// `spec_json` must be NUL-terminated; `out` valid.
int32_t perco_corollary_json(const char *spec_json, char **out);

// Decay/Fourier diagnostics report as JSON. `user_g <= 0` means "not given";
// `exp_decay != 0` declares exponential profile decay.
//
// # Safety
// `k` and `out` must be valid pointers.
int32_t perco_assumptions_json(const struct PercoKernel *k,
                               double b,
                               size_t sample_budget,
                               int32_t exp_decay,
                               double user_g,
                               char **out);

// Release a string returned by this library.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void perco_string_free(char *s);

// Description of the most recent error on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread; do not free.
const char *perco_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERCO_FFI_H */
