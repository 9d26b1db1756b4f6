#ifndef TFDYN_H
#define TFDYN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TfdStatus {
  TFD_STATUS_OK = 0,
  TFD_STATUS_INVALID_ARGUMENT = 1,
  TFD_STATUS_NULL_POINTER = 2,
  TFD_STATUS_CONFIG = 3,
  TFD_STATUS_NUMERICAL = 4,
  TFD_STATUS_UNPHYSICAL = 5,
  TFD_STATUS_UNSTABLE_REGIME = 6,
  TFD_STATUS_DEGENERATE = 7,
  TFD_STATUS_TRUNCATION_OVERFLOW = 8,
  TFD_STATUS_PANIC = 9,
} TfdStatus;

typedef enum TfdSweepKind {
  TFD_SWEEP_KIND_NEGATIVITY = 0,
  TFD_SWEEP_KIND_MUTUAL_INFO = 1,
} TfdSweepKind;

// Parsed, validated sweep configuration.
typedef struct TfdSweepConfig TfdSweepConfig;

// Rows of a finished sweep.
typedef struct TfdSweepResult TfdSweepResult;

typedef struct TfdSweepRow {
  double t;
  double r_mag;
  double phi;
  double d_minus_tilde;
  double e_n;
  double i_m;
} TfdSweepRow;

typedef struct TfdComplex {
  double re;
  double im;
} TfdComplex;

typedef struct TfdGammaFactors {
  struct TfdComplex gamma_plus;
  struct TfdComplex gamma3;
  struct TfdComplex gamma_minus;
  struct TfdComplex phi;
  struct TfdComplex log_gamma3;
} TfdGammaFactors;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into the library from the same thread.
const char *tfd_last_error_message(void);

// Parse a JSON sweep configuration.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum TfdStatus tfd_sweep_config_from_json(const char *json, struct TfdSweepConfig **out);

// # Safety
// `cfg` must come from `tfd_sweep_config_from_json` (or be NULL) and not be used afterwards.
void tfd_sweep_config_free(struct TfdSweepConfig *cfg);

// Run a sweep over the configured time grid.
//
// # Safety
// `cfg` must be a live config handle and `out` a valid pointer.
enum TfdStatus tfd_sweep_run(const struct TfdSweepConfig *cfg,
                             enum TfdSweepKind kind,
                             struct TfdSweepResult **out);

// Number of rows, 0 for NULL.
//
// # Safety
// `res` must be a live result handle or NULL.
size_t tfd_sweep_result_len(const struct TfdSweepResult *res);

// # Safety
// `res` must be a live result handle and `out` a valid pointer.
enum TfdStatus tfd_sweep_result_row(const struct TfdSweepResult *res,
                                    size_t index,
                                    struct TfdSweepRow *out);

// # Safety
// `res` must come from `tfd_sweep_run` (or be NULL) and not be used afterwards.
void tfd_sweep_result_free(struct TfdSweepResult *res);

// Two-mode squeezed vacuum covariance, row-major into `out[16]`.
//
// # Safety
// `out` must point to 16 writable doubles.
enum TfdStatus tfd_cov_two_mode_squeezed(double r, double phi, double *out);

// Covariance of two single-mode squeezed modes, row-major into `out[16]`.
//
// # Safety
// `out` must point to 16 writable doubles.
enum TfdStatus tfd_cov_two_single_mode_squeezed(double r, double phi, double *out);

// # Safety
// `sigma` must point to 16 doubles (row-major); the outputs must be valid.
enum TfdStatus tfd_symplectic_eigs(const double *sigma,
                                   bool transposed,
                                   double *d_plus,
                                   double *d_minus);

// # Safety
// `sigma` must point to 16 doubles (row-major); `out` must be valid.
enum TfdStatus tfd_log_negativity(const double *sigma, double *out);

// # Safety
// `sigma` must point to 16 doubles (row-major); `out` must be valid.
enum TfdStatus tfd_mutual_information(const double *sigma, double *out);

// Factor exp(ξ₃K₃ + ξ₊K₊ + ξ₋K₋) into normal order.
//
// # Safety
// `out` must be valid.
enum TfdStatus tfd_disentangle(struct TfdComplex xi3,
                               struct TfdComplex xi_plus,
                               struct TfdComplex xi_minus,
                               struct TfdGammaFactors *out);

// Normalized Bogoliubov coefficients μ = m/√(m² − n²), ν = n/√(m² − n²).
//
// # Safety
// `mu` and `nu` must be valid.
enum TfdStatus tfd_bogoliubov(struct TfdComplex m,
                              struct TfdComplex n,
                              struct TfdComplex *mu,
                              struct TfdComplex *nu);

// Run the oracle checks; `*out` receives a JSON report to be released with
// `tfd_string_free`.
//
// # Safety
// `out` must be valid.
enum TfdStatus tfd_oracle_validate(size_t truncation, double r, uint64_t seed, char **out);

// # Safety
// `s` must come from this library (or be NULL) and not be used afterwards.
void tfd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFDYN_H */
