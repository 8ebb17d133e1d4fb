/* C interface to the qdisk library. All functions are thread-safe on
 * distinct handles; a weights handle may be shared for reading. On failure a
 * function returns a non-zero status and qdisk_last_error() describes it
 * for the calling thread. */
#ifndef QDISK_H
#define QDISK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QDISK_API __declspec(dllexport)
#else
#define QDISK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdisk_status {
  QDISK_OK = 0,
  QDISK_ERROR_CONFIG = 1,        /* invalid parameters or config text */
  QDISK_ERROR_PRECONDITION = 2,  /* call outside the operation's domain */
  QDISK_ERROR_IO = 3,
  QDISK_ERROR_NULL_ARGUMENT = 4,
  QDISK_ERROR_INTERNAL = 5
} qdisk_status;

typedef enum qdisk_variant { QDISK_UNBALANCED = 0, QDISK_BALANCED = 1 } qdisk_variant;

typedef enum qdisk_operator { QDISK_OP_A = 0, QDISK_OP_A0 = 1, QDISK_OP_Q = 2 } qdisk_operator;

typedef enum qdisk_norm_method { QDISK_NORM_POWER = 0, QDISK_NORM_LANCZOS = 1 } qdisk_norm_method;

typedef enum qdisk_coefficient {
  QDISK_COEFF_W = 0,          /* w(k) */
  QDISK_COEFF_S = 1,          /* w(k)^2 - w(k-1)^2 */
  QDISK_COEFF_A = 2,          /* w(k)^2 / S(k) */
  QDISK_COEFF_C = 3,          /* w(k+n) / w(k) */
  QDISK_COEFF_A_BALANCED = 4, /* sqrt(a(k) a(k+n)) */
  QDISK_COEFF_R = 5           /* formal kernel element of mode n */
} qdisk_coefficient;

typedef struct qdisk_weights qdisk_weights;
typedef struct qdisk_config qdisk_config;

QDISK_API const char* qdisk_version(void);
QDISK_API const char* qdisk_last_error(void);
QDISK_API const char* qdisk_status_string(qdisk_status status);

/* family: "logistic", "arctan" or "piecewise_exponential". */
QDISK_API qdisk_status qdisk_weights_create(const char* family, double w_plus, double tau, qdisk_weights** out);
/* Keys must be consecutive integers. tail_rule: "reject" or "geometric". */
QDISK_API qdisk_status qdisk_weights_create_table(const int64_t* k, const double* w, size_t count, double w_plus,
                                                  const char* tail_rule, qdisk_weights** out);
QDISK_API void qdisk_weights_destroy(qdisk_weights* weights);

QDISK_API qdisk_status qdisk_weights_coefficient(const qdisk_weights* weights, qdisk_coefficient which, int64_t n,
                                                 int64_t k, double* out);
QDISK_API qdisk_status qdisk_trace_partial(const qdisk_weights* weights, int64_t K, double* value,
                                           double* tail_bound);
/* failed_condition is 0 when all pass, otherwise the first failing id 1..4. */
QDISK_API qdisk_status qdisk_validate(const qdisk_weights* weights, int64_t k_min, int64_t k_max, int* pass,
                                      int* failed_condition, double* empirical_sup_ratio);

/* Mode vectors are passed as `count` triplets (k[i], re[i], im[i]).
 * Dense outputs cover [k_min, k_max] and hold k_max - k_min + 1 values. */
QDISK_API qdisk_status qdisk_apply_A(const qdisk_weights* weights, qdisk_variant variant, int64_t n,
                                     const int64_t* k, const double* re, const double* im, size_t count,
                                     int64_t k_min, int64_t k_max, double* out_re, double* out_im);
QDISK_API qdisk_status qdisk_apply_Q(const qdisk_weights* weights, qdisk_variant variant, int64_t n,
                                     const int64_t* k, const double* re, const double* im, size_t count,
                                     int64_t k_min, int64_t k_max, double* out_re, double* out_im);
QDISK_API qdisk_status qdisk_norm(const qdisk_weights* weights, qdisk_variant variant, int64_t n, const int64_t* k,
                                  const double* re, const double* im, size_t count, double* out);
QDISK_API qdisk_status qdisk_residual_inverse(const qdisk_weights* weights, qdisk_variant variant, int64_t n,
                                              const int64_t* k, const double* re, const double* im, size_t count,
                                              int64_t k_min, int64_t k_max, double* right, double* left,
                                              double* g_norm);

QDISK_API qdisk_status qdisk_operator_norm(const qdisk_weights* weights, qdisk_variant variant, int64_t n,
                                           qdisk_operator op, int64_t k_min, int64_t k_max, qdisk_norm_method method,
                                           double tol, double* value, int* iterations, int* converged);
QDISK_API qdisk_status qdisk_schur_young(const qdisk_weights* weights, qdisk_variant variant, int64_t n,
                                         int64_t k_min, int64_t k_max, double* bound, double* tail);
/* Largest singular value of the discretized classical parametrix. */
QDISK_API qdisk_status qdisk_classical_norm(int64_t n, double T, int64_t m, double* value);

QDISK_API qdisk_status qdisk_config_create(qdisk_config** out);
QDISK_API qdisk_status qdisk_config_load(const char* path, qdisk_config** out);
QDISK_API qdisk_status qdisk_config_parse(const char* text, qdisk_config** out);
QDISK_API qdisk_status qdisk_config_set(qdisk_config* config, const char* key, const char* value);
QDISK_API void qdisk_config_destroy(qdisk_config* config);

/* Runs one suite ("validate", "invert", "bounds", "classical", "kernels" or
 * "sweep"). exit_code receives 0 (pass), 1 (failed check), 2 (bad config)
 * or 3 (inconclusive); the status is QDISK_OK whenever exit_code is set. */
QDISK_API qdisk_status qdisk_run_suite(const qdisk_config* config, const char* suite, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* QDISK_H */
