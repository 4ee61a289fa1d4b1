#ifndef QCF_H
#define QCF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Code file formats accepted by the loaders.
 */
typedef enum QcfFormat {
  QcfFormatAppendix = 0,
  QcfFormatJson = 1,
} QcfFormat;

/**
 * Status codes returned by every fallible function.
 */
typedef enum QcfStatus {
  QcfOk = 0,
  QcfErrInvalidArgument = 1,
  QcfErrParse = 2,
  QcfErrIo = 3,
  QcfErrBudget = 4,
  QcfErrRange = 5,
  QcfErrInternal = 6,
} QcfStatus;

/**
 * An immutable code handle.
 */
typedef struct QcfCode QcfCode;

/**
 * A closed matrix group handle.
 */
typedef struct QcfGroup QcfGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *qcf_last_error(void);

/**
 * Gaussian binomial coefficient for q = 2, written to `out`.
 * Fails with a range error when the value does not fit 64 bits.
 * # Safety
 * `out` must be null or valid for one `u64` write.
 */
enum QcfStatus qcf_gaussian_binomial(uint32_t n, uint32_t k, uint64_t *out);

/**
 * Parse a code from text. Rows are taken verbatim (no orbit expansion);
 * duplicates are an error.
 * # Safety
 * `text` must be null or a valid NUL-terminated string; `out` must be
 * null or valid for one pointer write.
 */
enum QcfStatus qcf_code_parse(const char *text, enum QcfFormat format, struct QcfCode **out);

/**
 * Load a code from a file path.
 * # Safety
 * `path` must be null or a valid NUL-terminated string; `out` must be
 * null or valid for one pointer write.
 */
enum QcfStatus qcf_code_load(const char *path, enum QcfFormat format, struct QcfCode **out);

/**
 * Release a code handle. Null is ignored.
 * # Safety
 * `code` must be null or a handle returned by this library, not yet freed.
 */
void qcf_code_free(struct QcfCode *code);

/**
 * Number of codewords.
 * # Safety
 * `code` must be null or a live handle returned by this library.
 */
uintptr_t qcf_code_len(const struct QcfCode *code);

/**
 * Minimum pairwise subspace distance, or -1 for fewer than two codewords.
 * # Safety
 * `code` must be null or a live handle returned by this library.
 */
int32_t qcf_code_min_distance(const struct QcfCode *code);

/**
 * Load a group from a JSON file path, or resolve a bundled name such as
 * `G_{4,6}`. The group is closed on load.
 * # Safety
 * `name_or_path` must be null or a valid NUL-terminated string; `out`
 * must be null or valid for one pointer write.
 */
enum QcfStatus qcf_group_load(const char *name_or_path, struct QcfGroup **out);

/**
 * Release a group handle. Null is ignored.
 * # Safety
 * `group` must be null or a handle returned by this library, not yet freed.
 */
void qcf_group_free(struct QcfGroup *group);

/**
 * Group order; 0 for a null handle or an unclosed group.
 * # Safety
 * `group` must be null or a live handle returned by this library.
 */
uint64_t qcf_group_order(const struct QcfGroup *group);

/**
 * Expand orbit representatives into the union of their orbits.
 * # Safety
 * `reps` and `group` must be null or live handles; `out` must be null or
 * valid for one pointer write.
 */
enum QcfStatus qcf_code_expand(const struct QcfCode *reps,
                               const struct QcfGroup *group,
                               struct QcfCode **out);

/**
 * Write the orbit type of a code under a group (e.g. `1^9 2^26 4^68`)
 * into the caller's buffer as a NUL-terminated string.
 * # Safety
 * `code` and `group` must be null or live handles; `buffer` must be null
 * or valid for `capacity` bytes of writes.
 */
enum QcfStatus qcf_code_orbit_type(const struct QcfCode *code,
                                   const struct QcfGroup *group,
                                   char *buffer,
                                   uintptr_t capacity);

/**
 * Order of the code's full automorphism group, within a time budget in
 * seconds (0 means unlimited).
 * # Safety
 * `code` must be null or a live handle; `out` must be null or valid for
 * one `u64` write.
 */
enum QcfStatus qcf_code_automorphism_order(const struct QcfCode *code,
                                           uint64_t budget_seconds,
                                           uint64_t *out);

/**
 * Run the reference verification battery; returns Ok only if every check
 * passes. `fast` skips the solver checks beyond the order-127 model.
 */
enum QcfStatus qcf_verify_paper(bool fast);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCF_H */
