#ifndef FHOPS_H
#define FHOPS_H

/* C interface to the Fourier-Hermite operator system library.
 *
 * All objects are opaque handles created and destroyed here. Functions
 * return FHOPS_OK on success; on failure they return a status code and
 * leave a message retrievable with fhops_last_error() (thread-local).
 * Strings and buffers returned through out-parameters are heap-allocated
 * and must be released with fhops_string_free() / fhops_buffer_free().
 * JSON payloads produced by the run functions are deterministic: identical
 * inputs yield identical bytes regardless of the thread count.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  FHOPS_OK = 0,
  FHOPS_E_INTERNAL = 1,
  FHOPS_E_PRECONDITION = 2
} fhops_status;

typedef struct fhops_system fhops_system;
typedef struct fhops_field fhops_field;
typedef struct fhops_data fhops_data;
typedef struct fhops_coeffset fhops_coeffset;

const char* fhops_version(void);
const char* fhops_last_error(void);
void fhops_string_free(char* s);
void fhops_buffer_free(double* p);

/* ----- construction ---------------------------------------------------- */

fhops_status fhops_system_from_json(const char* jsonText, const char* baseDir,
                                    fhops_system** out);
fhops_status fhops_system_load(const char* path, fhops_system** out);
fhops_status fhops_system_info(const fhops_system* s, int* m, int* n,
                               int* opCount);
fhops_status fhops_system_to_json(const fhops_system* s, char** jsonOut);
void fhops_system_free(fhops_system* s);

fhops_status fhops_field_read_csv(const char* csvPath, fhops_field** out);
fhops_status fhops_field_write_csv(const fhops_field* f, const char* csvPath);
void fhops_field_free(fhops_field* f);

fhops_status fhops_data_read_manifest(const char* manifestPath,
                                      fhops_data** out);
fhops_status fhops_data_write_manifest(const fhops_data* F,
                                       const char* manifestPath,
                                       const char* stem);
fhops_status fhops_data_component(const fhops_data* F, int r,
                                  fhops_field** out);
void fhops_data_free(fhops_data* F);

fhops_status fhops_coeffset_load(const char* path, fhops_coeffset** out);
fhops_status fhops_coeffset_from_json(const char* jsonText, const char* baseDir,
                                      fhops_coeffset** out);
void fhops_coeffset_free(fhops_coeffset* c);

/* ----- pointwise queries ------------------------------------------------ */

fhops_status fhops_weight(const fhops_system* s, const int64_t* tau, int m,
                          int64_t j, double* out);
fhops_status fhops_symbol_eval(const fhops_system* s, int r,
                               const int64_t* tau, int m, int64_t j,
                               double* re, double* im);
/* norm + 1-based argmax of the component moduli (smallest index on ties) */
fhops_status fhops_system_norm(const fhops_system* s, const int64_t* tau,
                               int m, int64_t j, double* norm, int* argmax);
fhops_status fhops_eigenvalue(const fhops_system* s, int64_t j, double* out);
fhops_status fhops_hermite_eval(int64_t j, double x, double* out);

/* ----- runs (JSON results) ---------------------------------------------- */

fhops_status fhops_zero_set(const fhops_system* s, const int64_t* tauMax,
                            int m, int64_t jMax, int threads, char** jsonOut);
/* solvability = 0 for hypoellipticity, 1 for solvability;
 * delta0/delta1 <= 0 pick the built-in thresholds (1e-3 / 1e-2) */
fhops_status fhops_check(const fhops_system* s, const int64_t* tauMax, int m,
                         int64_t jMax, int shellCount, double delta0,
                         double delta1, int threads, int solvability,
                         char** jsonOut);
/* writes the "R,epsHat" artifact for the same run */
fhops_status fhops_check_profile_csv(const fhops_system* s,
                                     const int64_t* tauMax, int m,
                                     int64_t jMax, int shellCount,
                                     double delta0, double delta1, int threads,
                                     int solvability, const char* csvPath,
                                     char** jsonOut);

fhops_status fhops_apply(const fhops_system* s, const fhops_field* u,
                         int threads, fhops_data** out);
fhops_status fhops_admissibility(const fhops_system* s, const fhops_data* F,
                                 double tol, int threads, char** jsonOut);
/* kernel may be NULL */
fhops_status fhops_solve(const fhops_system* s, const fhops_data* F,
                         const fhops_field* kernel, int threads,
                         fhops_field** uOut, char** reportJsonOut);
fhops_status fhops_symbol_division(const fhops_system* s, const fhops_data* F,
                                   int threads, fhops_field** out);

/* flavor: "gh" or "gs". eps <= 0 derives epsilon from the profile's worst
 * modes; uOut receives NULL for the gs flavor. */
fhops_status fhops_counterexample(const fhops_system* s, const int64_t* tauMax,
                                  int m, int64_t jMax, const char* flavor,
                                  double eps, int threads, fhops_data** FOut,
                                  fhops_field** uOut, char** jsonOut);

fhops_status fhops_decay_fit(const fhops_field* f, char** jsonOut);

/* config: {"quotients": ["..."]} or {"rule": {"kind": "factorial-power"|
 * "exp-rule"|"constant", "base": b, "a1": v}}, plus "sigma" and "depth";
 * {"vector": [cf, cf, ...]} runs the coordinate test. */
fhops_status fhops_liouville(const char* configJson, char** jsonOut);

/* eigenJson: the "eigen" config section */
fhops_status fhops_weyl(const char* eigenJson, const char* baseDir,
                        int64_t jLo, int64_t jHi, char** jsonOut);
fhops_status fhops_eigen_info(const char* eigenJson, const char* baseDir,
                              int* M, int* n);

/* ----- normal form ------------------------------------------------------ */

fhops_status fhops_reduce_system(const fhops_coeffset* c, fhops_system** out,
                                 char** jsonOut);
/* Nt = 0 picks the automatic grid */
fhops_status fhops_psi_apply(const fhops_coeffset* c, const fhops_field* u,
                             int inverse, int64_t Nt, int threads,
                             fhops_field** out, char** reportJsonOut);
fhops_status fhops_conjugation_residual(const fhops_coeffset* c,
                                        const fhops_field* u, int64_t Nt,
                                        int threads, double* out);
fhops_status fhops_compat_integral(const fhops_coeffset* c,
                                   const fhops_field* fr, int r, int64_t j,
                                   int64_t Nt, char** jsonOut);

/* ----- reconstruction ---------------------------------------------------
 * Samples the field on tPerAxis^m uniform torus points and xCount points of
 * R^n (xs row-major xCount x n) using the eigen config in eigenJson.
 * Allocates two buffers of tPerAxis^m * xCount doubles (re, im); x index
 * varies slowest. */
fhops_status fhops_reconstruct(const fhops_field* f, const char* eigenJson,
                               const char* baseDir, int tPerAxis,
                               const double* xs, int xCount, double** reOut,
                               double** imOut, int64_t* countOut);

#ifdef __cplusplus
}
#endif

#endif /* FHOPS_H */
