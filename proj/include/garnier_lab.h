/* C interface of the garnier_lab shared library. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * gl_free_string. Every call returns a status; on failure gl_last_error()
 * describes the problem (per thread). */
#ifndef GARNIER_LAB_H
#define GARNIER_LAB_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GL_API __declspec(dllexport)
#else
#define GL_API __attribute__((visibility("default")))
#endif

typedef enum gl_status {
    GL_OK = 0,
    GL_E_PARAMETER = 1,
    GL_E_DEGENERATE = 2,
    GL_E_SINGULAR = 3,
    GL_E_ILL_CONDITIONED = 4,
    GL_E_INTEGRATION = 5,
    GL_E_BRANCH = 6,
    GL_E_UNSUPPORTED = 7,
    GL_E_INCONSISTENT = 8,
    GL_E_SCHEMA = 9,
    GL_E_NULL = 10,
    GL_E_INTERNAL = 11
} gl_status;

typedef struct gl_system gl_system;       /* Fuchsian system, fuchsian-v1 */
typedef struct gl_monodromy gl_monodromy; /* monodromy data, monodromy-v1 */
typedef struct gl_state gl_state;         /* Garnier state, garnier-state-v1 */

GL_API const char* gl_version(void);
GL_API const char* gl_status_name(gl_status s);
GL_API const char* gl_last_error(void);
GL_API void gl_free_string(char* s);
/* Caps internal parallelism (monodromy loops, classical sample batches). */
GL_API void gl_set_threads(int threads);
GL_API int gl_threads(void);

GL_API gl_status gl_system_from_json(const char* json, gl_system** out);
GL_API gl_status gl_system_to_json(const gl_system* sys, char** json);
GL_API void gl_system_free(gl_system* sys);
/* {"ok": bool, "violations": [...]} */
GL_API gl_status gl_system_validate(const gl_system* sys, double tol, char** report);

GL_API gl_status gl_monodromy_compute(const gl_system* sys, double tol, gl_monodromy** out);
GL_API gl_status gl_monodromy_from_json(const char* json, gl_monodromy** out);
/* monodromy-v1 with an added "relations" object (cyclic, eigen, inf_consistency). */
GL_API gl_status gl_monodromy_to_json(const gl_monodromy* m, char** json);
GL_API void gl_monodromy_free(gl_monodromy* m);
GL_API gl_status gl_monodromy_classify(const gl_monodromy* m, double tol, char** report);

/* Schlesinger flow along a path-v1 document; report carries steps, warnings and,
 * when verify != 0, the isomonodromy deviation. */
GL_API gl_status gl_schlesinger_deform(const gl_system* sys, const char* path_json, double tol, int verify,
                                       gl_system** out, char** report);

GL_API gl_status gl_state_from_system(const gl_system* sys, gl_state** out);
GL_API gl_status gl_state_from_json(const char* json, gl_state** out);
GL_API gl_status gl_state_to_json(const gl_state* s, char** json);
GL_API void gl_state_free(gl_state* s);
/* Garnier flow along a path-v1 document; trajectory is {"tolerance", "steps", "trajectory": [states]}. */
GL_API gl_status gl_garnier_flow(const gl_state* s, const char* path_json, double tol, int samples, gl_state** out,
                                 char** trajectory);

/* Gauge pipelines; audit receives the audit-v1 record list. */
GL_API gl_status gl_reduce_poles(const gl_system* sys, const int* poles, int count, gl_system** out, char** audit);
GL_API gl_status gl_reduce_infinity(const gl_system* sys, int pole, gl_system** out, char** audit);
GL_API gl_status gl_extend(const gl_system* sys, double u_re, double u_im, double f_re, double f_im, int index,
                           gl_system** out, char** audit);
GL_API gl_status gl_shift_theta(const gl_system* sys, int pole, int n, gl_system** out, char** audit);
/* report: K, shifts, eps, conjugator, audit. */
GL_API gl_status gl_triangularize(const gl_system* sys, gl_system** out, char** report);

/* request: {"family": ..., "theta": [3], "theta_inf", "mix", "x0", "f_init", "samples": [...], "force": bool}.
 * solution is classical-v1, csv the sample table; unverified solutions are refused unless forced. */
GL_API gl_status gl_classical(const char* request, char** solution, char** csv);
/* request: classical-v1 document, or {"theta": [4], "labeling": "classical"|"garnier", "samples": [{x,y,yp,ypp}]}. */
GL_API gl_status gl_verify_pvi(const char* request, double tol, char** report);
/* request: {"op": "T"|"w", "which": k, "state": garnier-state-v1} or {"op": "w", "which": k, "x", "y", "p", "b": [4]}. */
GL_API gl_status gl_symmetry(const char* request, char** result);
/* b holds four complex numbers as re/im pairs. */
GL_API gl_status gl_strata(const double* b, double tol, char** report);

#ifdef __cplusplus
}
#endif

#endif
