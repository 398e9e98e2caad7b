#ifndef NPAMOMENT_H
#define NPAMOMENT_H

/* C interface to the moment-matrix constraint library. Handles are opaque;
 * every fallible call returns a status and, on failure, leaves a message
 * retrievable with npam_last_error() on the calling thread. Handles are
 * immutable after creation and safe to share across threads; each handle
 * must be released exactly once with its matching _free function. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum npam_status {
  NPAM_OK = 0,
  NPAM_ERR_INVALID_ARGUMENT = 1,
  NPAM_ERR_IO = 2,
  NPAM_ERR_SOLVER = 3,
  NPAM_ERR_INFEASIBLE_SPEC = 4,
  NPAM_ERR_INTERNAL = 5,
} npam_status;

typedef enum npam_solve_status {
  NPAM_SOLVE_OPTIMAL = 0,
  NPAM_SOLVE_INFEASIBLE = 1,
  NPAM_SOLVE_MAX_ITERATIONS = 2,
} npam_solve_status;

typedef enum npam_format {
  NPAM_FORMAT_TEXT = 0,
  NPAM_FORMAT_STRUCTURED = 1,
} npam_format;

typedef struct npam_scenario npam_scenario;       /* Bell scenario */
typedef struct npam_basis npam_basis;             /* monomial basis of one hierarchy level */
typedef struct npam_partition npam_partition;     /* equality classes over moment-matrix cells */
typedef struct npam_functional npam_functional;   /* linear objective over joint probabilities */
typedef struct npam_sdp npam_sdp;                 /* assembled semidefinite program */
typedef struct npam_experiments npam_experiments; /* loaded Monte-Carlo configurations */

/* Library version as "major.minor.patch". */
const char* npam_version(void);

/* Message describing this thread's most recent failure; empty string if the
 * thread has not seen one. The buffer is overwritten by the next failure. */
const char* npam_last_error(void);

/* ---- scenarios ---- */

/* Two-party scenario: a_settings/b_settings measurement choices per party,
 * uniform a_outcomes/b_outcomes outcomes per setting. */
npam_status npam_scenario_two_party(int a_settings, int b_settings, int a_outcomes,
                                    int b_outcomes, npam_scenario** out);

/* General scenario. settings[p] is the number of settings of party p;
 * outcomes holds the per-setting outcome counts, party-major, with
 * settings[0]+...+settings[parties-1] entries in total. */
npam_status npam_scenario_general(int parties, const int* settings, const int* outcomes,
                                  npam_scenario** out);

/* Accessors return -1 when the handle is null or the index is out of range. */
int npam_scenario_parties(const npam_scenario* s);
int npam_scenario_settings(const npam_scenario* s, int party);
int npam_scenario_outcomes(const npam_scenario* s, int party, int setting);

void npam_scenario_free(npam_scenario* s);

/* ---- bases ---- */

/* All monomials of the hierarchy level over the scenario's reduced projector
 * alphabet. The level string is a base length ("2") optionally extended by
 * party patterns ("1+AB", "2+AAB+ABB"). */
npam_status npam_basis_create(const npam_scenario* s, const char* level, npam_basis** out);

/* Number of basis monomials; -1 on a null handle. */
int64_t npam_basis_size(const npam_basis* b);

/* Human-readable monomial label ("1", "A0.0 B1.0", ...). The pointer stays
 * valid for the life of the handle. Null on a bad index. */
const char* npam_basis_label(const npam_basis* b, int64_t index);

/* Whether sampling at this level with the given rank provably recovers
 * exactly the algebraic constraints. Writes 1 or 0 to *holds. */
npam_status npam_basis_check_result1(const npam_basis* b, int rank, int* holds);

void npam_basis_free(npam_basis* b);

/* ---- constraint partitions ---- */

/* Symbolic oracle: cells share a class exactly when their monomial products
 * coincide. */
npam_status npam_partition_algebraic(const npam_basis* b, npam_partition** out);

/* Monte-Carlo detection: clusters the cells of `samples` moment matrices
 * built from independently sampled rank-`rank` realizations. Tolerances <= 0
 * select the library defaults. */
npam_status npam_partition_sample(const npam_basis* b, int rank, int samples, uint64_t seed,
                                  double tol_eq, double tol_zero, npam_partition** out);

/* Raw class count and cell lookups; -1 on null handles or bad indices.
 * npam_partition_zero_class also returns -1 when no cell is forced zero. */
int64_t npam_partition_num_classes(const npam_partition* p);
int64_t npam_partition_basis_size(const npam_partition* p);
int32_t npam_partition_class_at(const npam_partition* p, int64_t row, int64_t col);
int32_t npam_partition_zero_class(const npam_partition* p);

/* Distinct-entry count under a named counting convention; null or empty
 * convention selects the calibrated default. */
npam_status npam_partition_count(const npam_partition* p, const char* convention, int64_t* out);

/* Relates a sampled partition to a reference one. merges counts equalities
 * present only in `sampled`; splits counts reference classes torn apart.
 * equal and refinement are 0/1 flags. Any output pointer may be null. */
npam_status npam_partition_compare(const npam_partition* sampled, const npam_partition* reference,
                                   int64_t* merges, int64_t* splits, int* equal, int* refinement);

/* Writes the constraint document for a partition over `b` (schema-tagged
 * text, or the same content as a single JSON object). The convention selects
 * the headline count, as in npam_partition_count. */
npam_status npam_partition_write(const npam_partition* p, const npam_basis* b, npam_format format,
                                 const char* convention, const char* path);

void npam_partition_free(npam_partition* p);

/* ---- Bell functionals ---- */

/* Reads records "x y a b c" (1-based settings and outcomes, '#' comments). */
npam_status npam_functional_load(const npam_scenario* s, const char* path, npam_functional** out);

/* The identically-zero functional; solving it tests membership. */
npam_status npam_functional_zero(const npam_scenario* s, npam_functional** out);

void npam_functional_free(npam_functional* f);

/* ---- semidefinite programs ---- */

/* Maximization of the functional over moment matrices carrying the
 * partition's equality structure. */
npam_status npam_sdp_assemble(const npam_partition* p, const npam_basis* b,
                              const npam_functional* f, npam_sdp** out);

/* Moment-matrix side length and number of free variables; -1 on null. */
int64_t npam_sdp_matrix_size(const npam_sdp* sdp);
int64_t npam_sdp_num_vars(const npam_sdp* sdp);

/* Writes the problem as an SDPA sparse ".dat-s" file. */
npam_status npam_sdp_export(const npam_sdp* sdp, const char* path);

/* Interior-point solve. max_iter <= 0 and gap_tol <= 0 select defaults.
 * Writes the termination status, the objective value, the final duality gap,
 * and the iteration count; any output pointer may be null. A non-optimal
 * termination is reported through *solve_status with NPAM_OK. */
npam_status npam_sdp_solve(const npam_sdp* sdp, int max_iter, double gap_tol,
                           int* solve_status, double* value, double* gap, int* iterations);

void npam_sdp_free(npam_sdp* sdp);

/* ---- Monte-Carlo experiments ---- */

/* Loads configuration rows "l1 l2 mnip r d runs tol seed" (or control rows
 * "control d runs seed"); '#' starts a comment. */
npam_status npam_experiments_load(const char* path, npam_experiments** out);

/* Number of loaded rows; -1 on a null handle. */
int64_t npam_experiments_count(const npam_experiments* e);

/* Copies row fields into the given pointers; any of them may be null.
 * control is a 0/1 flag. */
npam_status npam_experiments_row(const npam_experiments* e, int64_t index, int64_t* len1,
                                 int64_t* len2, int* mnip, int* rank, int* dim, int64_t* runs,
                                 double* tol, uint64_t* seed, int* control);

/* Runs one row: generates its block-pair system (or the homogeneous control
 * pair) and evaluates the configured number of trials. Any output pointer
 * may be null. */
npam_status npam_experiments_run(const npam_experiments* e, int64_t index, int64_t* runs_done,
                                 int64_t* equalities_found, double* min_abs_difference,
                                 double* wall_time);

void npam_experiments_free(npam_experiments* e);

#ifdef __cplusplus
}
#endif

#endif
