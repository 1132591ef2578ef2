#ifndef ACSV_H
#define ACSV_H

#include <stddef.h>
#include <stdint.h>

/*
 Status codes. Values 2 to 6 match the command-line exit codes.
 */
typedef enum AcsvStatus {
  ACSV_STATUS_OK = 0,
  ACSV_STATUS_NULL_POINTER = 1,
  ACSV_STATUS_INPUT = 2,
  ACSV_STATUS_GEOMETRY = 3,
  ACSV_STATUS_DEGENERATE = 4,
  ACSV_STATUS_UNSUPPORTED = 5,
  ACSV_STATUS_MISMATCH = 6,
  ACSV_STATUS_OUT_OF_RANGE = 7,
  ACSV_STATUS_PANIC = 8,
} AcsvStatus;

/*
 A parsed problem.
 */
typedef struct AcsvProblem AcsvProblem;

/*
 Expansions at every point of a problem.
 */
typedef struct AcsvResult AcsvResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *acsv_last_error(void);

/*
 Parses a problem document (TOML, or JSON when `is_json` is nonzero).

 # Safety
 `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AcsvStatus acsv_problem_new(const char *source, int is_json, struct AcsvProblem **out);

/*
 # Safety
 `p` must come from [`acsv_problem_new`] (or be null) and not be used afterwards.
 */
void acsv_problem_free(struct AcsvProblem *p);

/*
 Computes expansions at every point of the problem. `order` 0 keeps the
 problem's own order.

 # Safety
 `p` must be a live problem handle and `out` a valid pointer.
 */
enum AcsvStatus acsv_expand(const struct AcsvProblem *p,
                            uintptr_t order,
                            int assume_minimal,
                            struct AcsvResult **out);

/*
 # Safety
 `r` must come from [`acsv_expand`] (or be null) and not be used afterwards.
 */
void acsv_result_free(struct AcsvResult *r);

/*
 Number of points (0 for a null handle).

 # Safety
 `r` must be a live result handle or null.
 */
uintptr_t acsv_result_points(const struct AcsvResult *r);

/*
 Number of terms at a point (0 when out of range).

 # Safety
 `r` must be a live result handle or null.
 */
uintptr_t acsv_result_terms(const struct AcsvResult *r, uintptr_t point);

/*
 Exponential growth `c^{-alpha}` as a complex double.

 # Safety
 `r` must be a live result handle; `re` and `im` valid pointers.
 */
enum AcsvStatus acsv_result_growth(const struct AcsvResult *r,
                                   uintptr_t point,
                                   double *re,
                                   double *im);

/*
 Term `q`: the power of `n` and the coefficient including the prefactor.

 # Safety
 `r` must be a live result handle; output pointers must be valid.
 */
enum AcsvStatus acsv_result_term(const struct AcsvResult *r,
                                 uintptr_t point,
                                 uintptr_t q,
                                 double *exponent,
                                 double *re,
                                 double *im);

/*
 Sum of the first `terms` terms at `n`, divided by `growth^n`.

 # Safety
 `r` must be a live result handle; `re` and `im` valid pointers.
 */
enum AcsvStatus acsv_result_evaluate(const struct AcsvResult *r,
                                     uintptr_t point,
                                     uint64_t n,
                                     uintptr_t terms,
                                     double *re,
                                     double *im);

/*
 The expansions as a JSON array of documents with exact coefficients.
 Release the string with [`acsv_string_free`].

 # Safety
 `r` must be a live result handle and `out` a valid pointer.
 */
enum AcsvStatus acsv_result_json(const struct AcsvResult *r, char **out);

/*
 # Safety
 `s` must come from this library (or be null).
 */
void acsv_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACSV_H */
