#ifndef LEVY_HIT_H
#define LEVY_HIT_H

#include <stddef.h>
#include <stdint.h>

/*
 Result codes; `LH_OK` is zero.
 */
typedef enum LhStatus {
  LH_OK = 0,
  LH_NULL_POINTER = 1,
  LH_INVALID_UTF8 = 2,
  LH_DOMAIN = 3,
  LH_INVALID_MODEL = 4,
  LH_CONFIG = 5,
  LH_NUMERICAL = 6,
  LH_ASSUMPTION = 7,
  LH_UNSUPPORTED = 8,
  LH_IO = 9,
  LH_PANIC = 10,
} LhStatus;

/*
 Opaque model handle.
 */
typedef struct LhModel LhModel;

/*
 Simulation settings for [`lh_hitting_tail`].
 */
typedef struct LhMcConfig {
  uint64_t seed;
  size_t n_paths;
  double dt;
  /*
   0 defers to `LEVY_HIT_THREADS`, then to the machine.
   */
  size_t threads;
} LhMcConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *lh_version(void);

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length, 0 if none.

 # Safety
 `buf` must be NULL or point to `len` writable bytes.
 */
size_t lh_last_error(char *buf, size_t len);

/*
 Built-in model by name, e.g. `"stable-sym-1.5"`.

 # Safety
 `name` must be a NUL-terminated string; `out` must be writable.
 */
enum LhStatus lh_model_preset(const char *name, struct LhModel **out);

/*
 Model from a TOML description.

 # Safety
 `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum LhStatus lh_model_from_toml(const char *toml, struct LhModel **out);

/*
 Centered strictly stable model with `Re ψ(1) = 1` and skewness `beta`.

 # Safety
 `out` must be writable.
 */
enum LhStatus lh_model_stable(double alpha, double beta, struct LhModel **out);

/*
 Brownian motion with `ψ(ξ) = σ²ξ²`.

 # Safety
 `out` must be writable.
 */
enum LhStatus lh_model_brownian(double sigma, struct LhModel **out);

/*
 Releases a handle; NULL is ignored.

 # Safety
 `m` must come from an `lh_model_*` constructor and not be used afterwards.
 */
void lh_model_free(struct LhModel *m);

/*
 `ψ(ξ)` as real and imaginary parts.

 # Safety
 `m` must be a live handle; `re` and `im` must be writable.
 */
enum LhStatus lh_psi(const struct LhModel *m, double xi, double *re, double *im);

/*
 Concentration function `h(r)`.

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum LhStatus lh_concentration(const struct LhModel *m, double r, double *out);

/*
 λ-potential density `u^λ(x)`, `λ > 0`.

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum LhStatus lh_u_lambda(const struct LhModel *m, double lambda, double x, double *out);

/*
 `K^λ(x) = u^λ(0) − u^λ(x)`; `λ = 0` gives the compensated kernel `K`.

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum LhStatus lh_k_lambda(const struct LhModel *m, double lambda, double x, double *out);

/*
 `H^λ(x) = K^λ(x) + K^λ(−x)`.

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum LhStatus lh_h_sym(const struct LhModel *m, double lambda, double x, double *out);

/*
 Limit of `t (Re ψ)^{-1}(1/t) P^x(T_0 > t)`.

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum LhStatus lh_point_asymptote(const struct LhModel *m, double x, double *out);

/*
 Defaults matching the library.
 */
struct LhMcConfig lh_mc_config_default(void);

/*
 Monte Carlo survival `P^x(T_[lo,hi] > t_i)` for `n` times; writes
 estimates and 95% half-widths into `estimate[n]` and `ci[n]`.

 # Safety
 `m` must be a live handle, `t` must hold `n` readable values and
 `estimate`, `ci` `n` writable ones; `cfg` may be NULL for defaults.
 */
enum LhStatus lh_hitting_tail(const struct LhModel *m,
                              double x,
                              double lo,
                              double hi,
                              const double *t,
                              size_t n,
                              const struct LhMcConfig *cfg,
                              double *estimate,
                              double *ci);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVY_HIT_H */
