#ifndef DDIN_H
#define DDIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call. `DDIN_STATUS_OK` is zero.
 */
typedef enum DdinStatus {
  DDIN_STATUS_OK = 0,
  DDIN_STATUS_NULL_POINTER = 1,
  DDIN_STATUS_INVALID_ARGUMENT = 2,
  DDIN_STATUS_INVALID_DOMAIN = 3,
  DDIN_STATUS_NOT_REGULAR_GRID = 4,
  DDIN_STATUS_INVALID_RADIUS = 5,
  DDIN_STATUS_INSUFFICIENT_NEIGHBORS = 6,
  DDIN_STATUS_DEGENERATE_NEIGHBORHOOD = 7,
  DDIN_STATUS_SINGULAR_WEIGHT = 8,
  DDIN_STATUS_COINCIDENT_NODE = 9,
  DDIN_STATUS_LENGTH_MISMATCH = 10,
  DDIN_STATUS_BUFFER_TOO_SMALL = 11,
  DDIN_STATUS_STUDY_FAILED = 12,
  DDIN_STATUS_IO = 13,
  DDIN_STATUS_PANIC = 14,
} DdinStatus;

typedef enum DdinWeight {
  DDIN_WEIGHT_UNIFORM = 0,
  DDIN_WEIGHT_MPS = 1,
} DdinWeight;

typedef enum DdinFunction {
  DDIN_FUNCTION_POWER = 0,
  DDIN_FUNCTION_SINUSOIDAL = 1,
} DdinFunction;

/*
 Opaque radius-neighbor table.
 */
typedef struct DdinNeighborTable DdinNeighborTable;

/*
 Opaque node set.
 */
typedef struct DdinNodeSet DdinNodeSet;

/*
 Derivative jet at one node.
 */
typedef struct DdinJet {
  double fx;
  double fy;
  double fxx;
  double fxy;
  double fyy;
} DdinJet;

/*
 Analytic value and jet of a built-in test function.
 */
typedef struct DdinAnalytic {
  double f;
  struct DdinJet jet;
} DdinAnalytic;

/*
 Convergence-study parameters. `sizes` may be null to use the default
 ladder 26, 51, 101, 201.
 */
typedef struct DdinStudyConfig {
  enum DdinFunction function;
  const size_t *sizes;
  size_t sizes_len;
  double dr_frac;
  double r_frac;
  enum DdinWeight weight;
  uint64_t seed;
  bool include_boundary;
} DdinStudyConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null after a
 success. The pointer stays valid until the next call on this thread.
 */
const char *ddin_last_error(void);

/*
 Regular `nx` by `ny` grid on `[x_min, x_max] x [y_min, y_max]`. Pass
 `ny = 1` with `y_min = y_max = 0` for a line of nodes.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum DdinStatus ddin_nodeset_regular(double x_min,
                                     double x_max,
                                     double y_min,
                                     double y_max,
                                     size_t nx,
                                     size_t ny,
                                     struct DdinNodeSet **out);

/*
 Node set from `n` interleaved `(x, y)` pairs. `dim` is 1 or 2; `dx` is
 the nominal spacing.

 # Safety
 `xy` must point to `2 * n` readable doubles; `out` must be writable.
 */
enum DdinStatus ddin_nodeset_from_points(size_t dim,
                                         const double *xy,
                                         size_t n,
                                         double dx,
                                         struct DdinNodeSet **out);

/*
 Perturbed copy of a regular grid: every coordinate moves by at most `dr`.

 # Safety
 `nodes` must be a live handle; `out` must be writable.
 */
enum DdinStatus ddin_nodeset_perturb(const struct DdinNodeSet *nodes,
                                     double dr,
                                     uint64_t seed,
                                     struct DdinNodeSet **out);

/*
 Number of nodes, or 0 for a null handle.

 # Safety
 `nodes` must be null or a live handle.
 */
size_t ddin_nodeset_len(const struct DdinNodeSet *nodes);

/*
 Copies node coordinates as interleaved `(x, y)` pairs into `xy`, which
 holds `cap` doubles (at least `2 * len`).

 # Safety
 `nodes` must be a live handle; `xy` must point to `cap` writable doubles.
 */
enum DdinStatus ddin_nodeset_points(const struct DdinNodeSet *nodes, double *xy, size_t cap);

/*
 # Safety
 `nodes` must be null or a handle not yet freed.
 */
void ddin_nodeset_free(struct DdinNodeSet *nodes);

/*
 Neighbors strictly within `r_cut` of every node.

 # Safety
 `nodes` must be a live handle; `out` must be writable.
 */
enum DdinStatus ddin_neighbors_build(const struct DdinNodeSet *nodes,
                                     double r_cut,
                                     struct DdinNeighborTable **out);

/*
 Writes the neighbor count of node `i` to `count`.

 # Safety
 `table` must be a live handle; `count` must be writable.
 */
enum DdinStatus ddin_neighbors_count(const struct DdinNeighborTable *table,
                                     size_t i,
                                     size_t *count);

/*
 # Safety
 `table` must be null or a handle not yet freed.
 */
void ddin_neighbors_free(struct DdinNeighborTable *table);

/*
 Least-squares derivative jets of `field` (one value per node). Writes
 `jets[k]` and `status[k]` for every node; a node whose stencil was
 rejected gets a zero jet and a nonzero status. The call itself fails only
 for invalid arguments.

 # Safety
 `field`, `jets` and `status` must each hold `n` elements, and the handles
 must be live.
 */
enum DdinStatus ddin_derivatives(const struct DdinNodeSet *nodes,
                                 const struct DdinNeighborTable *table,
                                 const double *field,
                                 size_t n,
                                 enum DdinWeight weight,
                                 struct DdinJet *jets,
                                 enum DdinStatus *status);

/*
 Analytic value and derivatives of a built-in test function at `(x, y)`.

 # Safety
 `out` must be writable.
 */
enum DdinStatus ddin_test_function_eval(enum DdinFunction function,
                                        double x,
                                        double y,
                                        struct DdinAnalytic *out);

/*
 Runs a convergence study over all methods and returns the CSV table as
 a NUL-terminated string owned by the caller; release it with
 [`ddin_string_free`].

 # Safety
 `config` must be readable, `config.sizes` must hold `sizes_len` values
 when non-null, and `csv` must be writable.
 */
enum DdinStatus ddin_study_csv(const struct DdinStudyConfig *config, char **csv);

/*
 # Safety
 `s` must be null or a string returned by this library and not yet freed.
 */
void ddin_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DDIN_H */
