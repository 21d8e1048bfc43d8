/* C interface to the fracdens library. */
#ifndef FRACDENS_H
#define FRACDENS_H

#include <stddef.h>

#if defined(FRACDENS_BUILDING_LIBRARY)
#define FD_API __attribute__((visibility("default")))
#else
#define FD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fd_status {
    FD_OK = 0,
    FD_ERR_DOMAIN = 1,
    FD_ERR_OVERFLOW = 2,
    FD_ERR_ACCURACY = 3,
    FD_ERR_NON_SMOOTH_POINT = 4,
    FD_ERR_GLUING = 5,
    FD_ERR_UNSUPPORTED_HISTORY = 6,
    FD_ERR_MONOTONICITY = 7,
    FD_ERR_RANGE = 8,
    FD_ERR_SPAN_FAILURE = 9,
    FD_ERR_APPROXIMATION_FAILURE = 10,
    FD_ERR_FIT_FAILURE = 11,
    FD_ERR_CONSTRUCTION_FAILURE = 12,
    FD_ERR_BOUNDARY_SINGULARITY = 13,
    FD_ERR_PARSE = 14,
    FD_ERR_INVALID_CONFIG = 15,
    FD_ERR_NULL_ARGUMENT = 64,
    FD_ERR_INTERNAL = 65
} fd_status;

typedef enum fd_strategy { FD_STRATEGY_AUTO = 0, FD_STRATEGY_JET = 1, FD_STRATEGY_LEAST_SQUARES = 2 } fd_strategy;

typedef struct fd_expr fd_expr;
typedef struct fd_result fd_result;

/* Version string of the library, e.g. "1.0.0". */
FD_API const char* fd_version(void);
/* Schema version written into every JSON artifact. */
FD_API const char* fd_spec_version(void);
FD_API const char* fd_status_name(fd_status status);

/* Details of the last failure on the calling thread; empty after success. */
FD_API const char* fd_last_error(void);
/* Pipeline stage of the last failure ("fit", "span", "delta-selection", ...) or "". */
FD_API const char* fd_last_error_stage(void);
/* Achieved error carried by the last stage failure; NaN when none. */
FD_API double fd_last_error_achieved(void);

/* Strings returned through char** belong to the caller. Handle and string outputs are NULL after a failure. */
FD_API void fd_string_free(char* s);
/* Re-serializes a JSON document with 17 significant digits per number. */
FD_API fd_status fd_json_format(const char* text, char** out);

/* Expressions */
FD_API fd_status fd_expr_from_json(const char* text, fd_expr** out);
FD_API fd_status fd_expr_parse(const char* formula, fd_expr** out);
FD_API fd_status fd_expr_polynomial(const double* coeffs, size_t n, double center, fd_expr** out);
FD_API fd_status fd_expr_sampled(const double* t, const double* f, size_t n, fd_expr** out);
FD_API fd_status fd_expr_clone(const fd_expr* e, fd_expr** out);
FD_API void fd_expr_free(fd_expr* e);
/* n-th derivative at t. */
FD_API fd_status fd_expr_eval(const fd_expr* e, int n, double t, double* out);
FD_API fd_status fd_expr_max_order(const fd_expr* e, int* out);
FD_API fd_status fd_expr_to_json(const fd_expr* e, char** out);

/* Caputo derivatives; a may be -INFINITY when the k-th derivative has left-bounded support. */
FD_API fd_status fd_caputo(const fd_expr* u, double a, int k, double alpha, double t, double* out);
/* psi-Caputo derivative with clock psi; psi_unbounded_below flags lim psi = -inf. */
FD_API fd_status fd_psi_caputo(const fd_expr* u, double a, int k, double alpha, const fd_expr* psi,
                               int psi_unbounded_below, double t, double* out);
/* psi^{-1}(y) */
FD_API fd_status fd_psi_inverse(const fd_expr* psi, int psi_unbounded_below, double y, double* out);

/* Boundary constant by the closed form and by nested quadrature; each output may be NULL. */
FD_API fd_status fd_kappa(int k, double alpha, double* closed_form, double* quadrature, double* delta);
/* Building block psi of the given order (a new handle). */
FD_API fd_status fd_building_block(int k, double alpha, fd_expr** out);

/* Approximation */
typedef struct fd_approx_options {
    int k;
    double alpha;
    int h;
    double epsilon;
    fd_strategy strategy;
    int jobs;
} fd_approx_options;

FD_API void fd_approx_options_default(fd_approx_options* opts);

/* psi may be NULL for the plain problem; otherwise the warped problem is solved. */
FD_API fd_status fd_approximate(const fd_expr* target, const fd_approx_options* opts, const fd_expr* psi,
                                int psi_unbounded_below, fd_result** out);
FD_API void fd_result_free(fd_result* r);
FD_API fd_status fd_result_u(const fd_result* r, fd_expr** out);
FD_API double fd_result_a(const fd_result* r);
FD_API double fd_result_error(const fd_result* r);
FD_API double fd_result_residual(const fd_result* r);
FD_API const char* fd_result_method(const fd_result* r);
/* Full result document: spec_version, request, a, errors, residual, u, provenance. */
FD_API fd_status fd_result_json(const fd_result* r, char** out);
/* Residual D^alpha u (or D_a^{alpha,psi} u) at each of the n points of t. */
FD_API fd_status fd_result_residual_curve(const fd_result* r, const double* t, size_t n, double* out);

/* Invariant suites; suites is a comma-separated list of beta, equiv, oracle, asymptotic.
   kappa_scale != 1 perturbs the reference kappa of the asymptotic suite. */
FD_API fd_status fd_verify(const char* suites, double kappa_scale, unsigned seed, char** report_json, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
