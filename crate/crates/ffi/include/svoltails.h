/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef SVOLTAILS_H
#define SVOLTAILS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SvtStatus {
  SVT_STATUS_OK = 0,
  // A null pointer, bad length or parameter outside its admissible range.
  SVT_STATUS_INVALID_ARGUMENT = 1,
  // Transform argument outside the analyticity half-plane.
  SVT_STATUS_DOMAIN = 2,
  // Quadrature, inversion or root finding failed.
  SVT_STATUS_NUMERICAL = 3,
  // Price outside the no-arbitrage band.
  SVT_STATUS_ARBITRAGE = 4,
  SVT_STATUS_INTERNAL = 5,
  // A Rust panic was caught at the boundary.
  SVT_STATUS_PANIC = 6,
} SvtStatus;

// Opaque model handle.
typedef struct SvtModel SvtModel;

// Opaque stock-density handle; precomputes the mixing table once.
typedef struct SvtStockDensity SvtStockDensity;

// `m_t(y) ≈ exp(log_prefactor) · y^power · exp(linear·y − quadratic·y²)`.
typedef struct SvtMixingTail {
  double log_prefactor;
  double linear;
  double quadratic;
  double power;
} SvtMixingTail;

// `D_t(x0 e^{μt} x) ≈ c1 x^{−c3} e^{c2 √log x} (log x)^{log_power}`, with the smile
// coefficients at maturity `t`.
typedef struct SvtStockTail {
  double c1;
  double log_c1;
  double c2;
  double c3;
  double log_power;
  double moment_lo;
  double moment_hi;
  double beta1;
  double beta2;
  double beta3;
} SvtStockTail;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays valid until the
// next failing call on the same thread.
const char *svt_last_error(void);

// Library version as a static NUL-terminated string.
const char *svt_version(void);

// # Safety
// `out` must be valid for writes. The handle must be released with [`svt_model_free`].
enum SvtStatus svt_model_heston_new(double mu,
                                    double a,
                                    double b,
                                    double c,
                                    double y0,
                                    double x0,
                                    struct SvtModel **out);

// # Safety
// `out` must be valid for writes. The handle must be released with [`svt_model_free`].
enum SvtStatus svt_model_stein_stein_new(double mu,
                                         double q,
                                         double m,
                                         double sigma,
                                         double y0,
                                         double x0,
                                         struct SvtModel **out);

// # Safety
// `m` must be null or a handle from a model constructor that has not been freed.
void svt_model_free(struct SvtModel *m);

// Smallest positive zero of `z cos z + s sin z`.
//
// # Safety
// `out` must be valid for writes.
enum SvtStatus svt_smallest_root(double s, double *out);

// `E exp(−λ V)` for the integrated variance `V` at complex `λ`.
//
// # Safety
// `model` must be a live handle; `out_re` and `out_im` valid for writes.
enum SvtStatus svt_laplace(const struct SvtModel *model,
                           double t,
                           double lam_re,
                           double lam_im,
                           double *out_re,
                           double *out_im);

// Density of the integrated variance at `v`.
//
// # Safety
// `model` must be a live handle; `out` valid for writes.
enum SvtStatus svt_integrated_variance_density(const struct SvtModel *model,
                                               double t,
                                               double v,
                                               double *out);

// Mixing density `m_t(y)`.
//
// # Safety
// `model` must be a live handle; `out` valid for writes.
enum SvtStatus svt_mixing_density(const struct SvtModel *model, double t, double y, double *out);

// `log m_t(y)`, finite where `m_t(y)` underflows.
//
// # Safety
// `model` must be a live handle; `out` valid for writes.
enum SvtStatus svt_log_mixing_density(const struct SvtModel *model,
                                      double t,
                                      double y,
                                      double *out);

// `P(α_t ≤ y)`.
//
// # Safety
// `model` must be a live handle; `out` valid for writes.
enum SvtStatus svt_mixing_cdf(const struct SvtModel *model, double t, double y, double *out);

// # Safety
// `model` must be a live handle; `out` valid for writes. Release with
// [`svt_stock_density_free`].
enum SvtStatus svt_stock_density_new(const struct SvtModel *model,
                                     double t,
                                     struct SvtStockDensity **out);

// # Safety
// `d` must be null or a live stock-density handle.
void svt_stock_density_free(struct SvtStockDensity *d);

// `D_t(x0 e^{μt} x)` at moneyness `x > 0`; `log_out` receives its logarithm when not null.
//
// # Safety
// `d` must be a live handle; `out` valid for writes; `log_out` null or valid for writes.
enum SvtStatus svt_stock_density_eval(const struct SvtStockDensity *d,
                                      double x,
                                      double *out,
                                      double *log_out);

// Call price `e^{−rT} E[(X_T − K)^+]` with drift `rate`.
//
// # Safety
// `model` must be a live handle; `out` valid for writes.
enum SvtStatus svt_call_price(const struct SvtModel *model,
                              double t,
                              double rate,
                              double strike,
                              double *out);

// # Safety
// `model` must be a live handle; `out` valid for writes.
enum SvtStatus svt_mixing_tail(const struct SvtModel *model, double t, struct SvtMixingTail *out);

// # Safety
// `model` must be a live handle; `out` valid for writes.
enum SvtStatus svt_stock_tail(const struct SvtModel *model, double t, struct SvtStockTail *out);

// Black–Scholes call price.
//
// # Safety
// `out` must be valid for writes.
enum SvtStatus svt_bs_call(double spot,
                           double strike,
                           double rate,
                           double expiry,
                           double vol,
                           double *out);

// Black–Scholes implied volatility of a call price.
//
// # Safety
// `out` must be valid for writes.
enum SvtStatus svt_implied_vol(double spot,
                               double strike,
                               double rate,
                               double expiry,
                               double price,
                               double *out);

// Implied volatilities of the model at log-strikes `k[0..n]` (relative to the forward).
// `flagged` (optional) receives 1 where the price was only representable in log space.
//
// # Safety
// `model` must be a live handle; `k` and `vols` valid for `n` elements; `flagged` null or
// valid for `n` elements.
enum SvtStatus svt_smile(const struct SvtModel *model,
                         double maturity,
                         double rate,
                         const double *k,
                         size_t n,
                         double *vols,
                         uint8_t *flagged);

// Draws of `α_t` with exact transitions; `out` receives `paths` values.
//
// # Safety
// `model` must be a live handle; `out` valid for `paths` elements.
enum SvtStatus svt_simulate_alpha(const struct SvtModel *model,
                                  double t,
                                  size_t paths,
                                  size_t steps,
                                  uint64_t seed,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SVOLTAILS_H */
