#ifndef LEVYFIELD_LEVYFIELD_H
#define LEVYFIELD_LEVYFIELD_H

/*
 * C interface to the levyfield toolkit: simulation and regularity analysis of
 * multivariate Levy fields built from a characteristic triple (a, mu, nu).
 *
 * Conventions:
 *   - Every function returns an lf_status; results come back through out
 *     parameters. On failure, lf_last_error_message() describes the error
 *     (thread-local, valid until the next call on the same thread).
 *   - Handles are opaque and owned by the caller; release them with the
 *     matching *_free function. Strings returned through char** are released
 *     with lf_string_free.
 *   - Vectors of R^d are passed as arrays of d doubles.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LF_API __declspec(dllexport)
#elif defined(__GNUC__)
#define LF_API __attribute__((visibility("default")))
#else
#define LF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lf_status {
  LF_OK = 0,
  LF_ERR_INTERNAL = 1,
  LF_ERR_CONFIG = 2,
  LF_ERR_NUMERIC = 3,
  LF_ERR_FINGERPRINT = 4,
  LF_ERR_IO = 5,
  LF_ERR_ARGUMENT = 6
} lf_status;

typedef enum lf_component {
  LF_COMPONENT_GAUSSIAN = 0,
  LF_COMPONENT_JUMP = 1,
  LF_COMPONENT_COMBINED = 2
} lf_component;

typedef struct lf_config lf_config;
typedef struct lf_field lf_field;

LF_API const char* lf_version(void);
LF_API const char* lf_last_error_message(void);
LF_API void lf_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

LF_API lf_status lf_config_load(const char* path, lf_config** out);
LF_API lf_status lf_config_parse(const char* text, lf_config** out);
LF_API void lf_config_free(lf_config* cfg);
/* Canonical text of the configuration. */
LF_API lf_status lf_config_to_string(const lf_config* cfg, char** out);
LF_API lf_status lf_config_set_seed(lf_config* cfg, uint64_t seed);
LF_API lf_status lf_config_fingerprint(const lf_config* cfg, char** out);
LF_API lf_status lf_config_dim(const lf_config* cfg, int* out);
LF_API lf_status lf_config_output_dir(const lf_config* cfg, char** out);

/* ---- triple calculus -------------------------------------------------- */

LF_API lf_status lf_index_beta(const lf_config* cfg, double* out);
/* Mass of jump band j (j = 0: |x| > 1; j >= 1: |x| in (2^-j, 2^{1-j}]). */
LF_API lf_status lf_band_mass(const lf_config* cfg, int j, double* out);
LF_API lf_status lf_admissibility_chi(const lf_config* cfg, int j_max, double* partial_sum, int* converged);
/* Exponent of the gauge r^s (log 1/r)^b; +inf when the index is zero. */
LF_API lf_status lf_gauge_exponent(const lf_config* cfg, double s, double b, double* out);
/* Theoretical spectrum at h; -inf outside the support. */
LF_API lf_status lf_theoretical_spectrum(const lf_config* cfg, double h, double* out);

/* ---- runs writing artifacts to out_dir -------------------------------- */

LF_API lf_status lf_run_simulate(const lf_config* cfg, lf_component which, const char* out_dir);
/* atoms_csv may be NULL. */
LF_API lf_status lf_run_analyze(const lf_config* cfg, const char* sample_csv, const char* atoms_csv,
                                const char* out_dir);
/* basis: n_vectors rows of dim doubles, row-major. */
LF_API lf_status lf_run_trace(const lf_config* cfg, const double* basis, int n_vectors, const char* out_dir);
LF_API lf_status lf_run_validate_cf(const lf_config* cfg, const double* t, const double* thetas, size_t n_thetas,
                                    const char* out_dir);
LF_API lf_status lf_run_report(const lf_config* cfg, const char* out_dir);

/* ---- in-memory fields ------------------------------------------------- */

LF_API lf_status lf_field_simulate(const lf_config* cfg, lf_component which, lf_field** out);
LF_API void lf_field_free(lf_field* field);
LF_API lf_status lf_field_size(const lf_field* field, size_t* out);
/* Values in grid order (axis 1 varies fastest). */
LF_API lf_status lf_field_values(const lf_field* field, const double** out);

#ifdef __cplusplus
}
#endif

#endif /* LEVYFIELD_LEVYFIELD_H */
