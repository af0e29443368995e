#ifndef YAMABE_H
#define YAMABE_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum YamabeBlowupCase {
  YAMABE_BLOWUP_CASE_CASE1,
  YAMABE_BLOWUP_CASE_CASE2,
  YAMABE_BLOWUP_CASE_CASE3,
} YamabeBlowupCase;

typedef enum YamabeGeometryColumn {
  YAMABE_GEOMETRY_COLUMN_R,
  YAMABE_GEOMETRY_COLUMN_V,
  YAMABE_GEOMETRY_COLUMN_W,
  YAMABE_GEOMETRY_COLUMN_SCALAR_CURVATURE,
  YAMABE_GEOMETRY_COLUMN_K0,
  YAMABE_GEOMETRY_COLUMN_K1,
  YAMABE_GEOMETRY_COLUMN_PSI_S,
} YamabeGeometryColumn;

typedef enum YamabeProfileColumn {
  YAMABE_PROFILE_COLUMN_R,
  YAMABE_PROFILE_COLUMN_V,
  YAMABE_PROFILE_COLUMN_DV,
} YamabeProfileColumn;

typedef enum YamabeProfileKind {
  YAMABE_PROFILE_KIND_GLOBAL,
  YAMABE_PROFILE_KIND_BLOW_UP,
  YAMABE_PROFILE_KIND_STEP_FAILURE,
} YamabeProfileKind;

typedef enum YamabeSolitonKind {
  YAMABE_SOLITON_KIND_SHRINKING,
  YAMABE_SOLITON_KIND_STEADY,
  YAMABE_SOLITON_KIND_EXPANDING,
  YAMABE_SOLITON_KIND_NON_SOLITON,
} YamabeSolitonKind;

typedef enum YamabeStatus {
  YAMABE_STATUS_OK = 0,
  YAMABE_STATUS_NULL_POINTER = 1,
  YAMABE_STATUS_INVALID_PARAMS = 2,
  YAMABE_STATUS_OUTSIDE_THEOREMS = 3,
  YAMABE_STATUS_NOT_BLOWUP_REGIME = 4,
  YAMABE_STATUS_NOT_SOLITON = 5,
  YAMABE_STATUS_INVALID_ARGUMENT = 6,
  YAMABE_STATUS_OUT_OF_RANGE = 7,
  YAMABE_STATUS_SOLVER = 8,
  YAMABE_STATUS_IO = 9,
  YAMABE_STATUS_SERIALIZATION = 10,
  YAMABE_STATUS_BUFFER_TOO_SMALL = 11,
  YAMABE_STATUS_PANIC = 12,
} YamabeStatus;

typedef enum YamabeVerdict {
  YAMABE_VERDICT_PASS,
  YAMABE_VERDICT_INCONCLUSIVE,
  YAMABE_VERDICT_FAIL,
} YamabeVerdict;

typedef struct YamabeGeometry YamabeGeometry;

typedef struct YamabeParams YamabeParams;

typedef struct YamabeProfile YamabeProfile;

typedef struct YamabeReport YamabeReport;

typedef struct YamabeParamValues {
  uint32_t n;
  double m;
  double alpha;
  double beta;
  /**
   * NaN when `has_rho` is false.
   */
  double rho;
  bool has_rho;
  double eta;
} YamabeParamValues;

typedef struct YamabeClass {
  enum YamabeSolitonKind kind;
  /**
   * Whether the asymptotic theorems apply.
   */
  bool covered;
} YamabeClass;

typedef struct YamabeCertificate {
  enum YamabeBlowupCase case_tag;
  /**
   * False for Case 3; `c1` and `radius_bound` are then NaN.
   */
  bool has_bound;
  double c1;
  double radius_bound;
} YamabeCertificate;

typedef struct YamabeSettings {
  double rtol;
  double atol;
  /**
   * Start radius is `r0_scale * eta^((m-1)/2)`.
   */
  double r0_scale;
  /**
   * Steps never exceed `max_step_frac * r`.
   */
  double max_step_frac;
} YamabeSettings;

typedef struct YamabeOriginValues {
  double scalar_curvature;
  double k0;
  double k1;
  /**
   * Largest disagreement of the two K0 routes.
   */
  double k0_crosscheck_defect;
} YamabeOriginValues;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Owned by the library.
 */
const char *yamabe_last_error(void);

/**
 * Library version, a static string.
 */
const char *yamabe_version(void);

/**
 * Releases a string returned by this library.
 */
void yamabe_string_free(char *s);

/**
 * Soliton with `m = (n-2)/(n+2)` and `alpha = (2 beta + rho)/(1-m)`.
 */
enum YamabeStatus yamabe_params_soliton(uint32_t n,
                                        double beta,
                                        double rho,
                                        double eta,
                                        struct YamabeParams **out);

/**
 * Soliton given `alpha` instead of `rho`.
 */
enum YamabeStatus yamabe_params_soliton_from_alpha(uint32_t n,
                                                   double alpha,
                                                   double beta,
                                                   double eta,
                                                   struct YamabeParams **out);

/**
 * Any exponent `0 < m <= (n-2)/n`; no soliton constant.
 */
enum YamabeStatus yamabe_params_general(uint32_t n,
                                        double m,
                                        double alpha,
                                        double beta,
                                        double eta,
                                        struct YamabeParams **out);

enum YamabeStatus yamabe_params_values(const struct YamabeParams *p, struct YamabeParamValues *out);

void yamabe_params_free(struct YamabeParams *p);

enum YamabeStatus yamabe_classify(const struct YamabeParams *p, struct YamabeClass *out);

/**
 * Certified blow-up radius; `YAMABE_STATUS_NOT_BLOWUP_REGIME` unless
 * `alpha < 0` and `beta <= 0`.
 */
enum YamabeStatus yamabe_blowup_certificate(const struct YamabeParams *p,
                                            struct YamabeCertificate *out);

struct YamabeSettings yamabe_settings_default(void);

/**
 * Integrates the profile on `[0, r_max]`. `settings` may be NULL for defaults.
 * Blow-up is a successful result; see `yamabe_profile_status`.
 */
enum YamabeStatus yamabe_solve(const struct YamabeParams *p,
                               double r_max,
                               const struct YamabeSettings *settings_ptr,
                               struct YamabeProfile **out);

/**
 * Outcome and the radius it refers to (`r_max`, `r*` or the failure radius).
 */
enum YamabeStatus yamabe_profile_status(const struct YamabeProfile *prof,
                                        enum YamabeProfileKind *kind,
                                        double *radius);

enum YamabeStatus yamabe_profile_len(const struct YamabeProfile *prof, size_t *out);

/**
 * Copies one column of the samples; `len` must be at least `yamabe_profile_len`.
 */
enum YamabeStatus yamabe_profile_column(const struct YamabeProfile *prof,
                                        enum YamabeProfileColumn column,
                                        double *buf,
                                        size_t len);

/**
 * `v(r)` and `v'(r)` from the dense output, `0 <= r <= r_last`.
 */
enum YamabeStatus yamabe_profile_eval(const struct YamabeProfile *prof,
                                      double r,
                                      double *v,
                                      double *dv);

void yamabe_profile_free(struct YamabeProfile *prof);

/**
 * Curvature curves on the profile grid; soliton parameters with `beta != 0` only.
 */
enum YamabeStatus yamabe_geometry(const struct YamabeProfile *prof, struct YamabeGeometry **out);

/**
 * Solve to `min(r_max, 1e3)` and continue in the log variable to `r_max`.
 */
enum YamabeStatus yamabe_geometry_stitched(const struct YamabeParams *p,
                                           double r_max,
                                           const struct YamabeSettings *settings_ptr,
                                           struct YamabeGeometry **out);

enum YamabeStatus yamabe_geometry_len(const struct YamabeGeometry *geo, size_t *out);

enum YamabeStatus yamabe_geometry_column(const struct YamabeGeometry *geo,
                                         enum YamabeGeometryColumn column,
                                         double *buf,
                                         size_t len);

enum YamabeStatus yamabe_geometry_origin(const struct YamabeGeometry *geo,
                                         struct YamabeOriginValues *out);

void yamabe_geometry_free(struct YamabeGeometry *geo);

/**
 * Asymptotic verification to `r_max >= 100`. Without `formal`, parameters outside
 * the covered regimes give `YAMABE_STATUS_OUTSIDE_THEOREMS`.
 */
enum YamabeStatus yamabe_verify(const struct YamabeParams *p,
                                double r_max,
                                const struct YamabeSettings *settings_ptr,
                                bool formal,
                                struct YamabeReport **out);

enum YamabeStatus yamabe_report_overall(const struct YamabeReport *rep, enum YamabeVerdict *out);

enum YamabeStatus yamabe_report_failed_invariants(const struct YamabeReport *rep, size_t *out);

/**
 * Full report as JSON; release with `yamabe_string_free`.
 */
enum YamabeStatus yamabe_report_json(const struct YamabeReport *rep, char **out);

void yamabe_report_free(struct YamabeReport *rep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YAMABE_H */
