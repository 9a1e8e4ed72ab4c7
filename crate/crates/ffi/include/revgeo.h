#ifndef REVGEO_H
#define REVGEO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define REVGEO_OK 0

#define REVGEO_ERR_NULL 1

#define REVGEO_ERR_INVALID_ARGUMENT 2

#define REVGEO_ERR_CONFIG 3

#define REVGEO_ERR_NUMERICAL 4

#define REVGEO_ERR_IO 5

#define REVGEO_ERR_PANIC 6

// A sphere of revolution.
typedef struct RevgeoProfile RevgeoProfile;

// A generating-function table of a profile.
typedef struct RevgeoTable RevgeoTable;

// Areas and contact volume for one wind strength.
typedef struct RevgeoAreas {
  double riemannian;
  double contact_volume;
  double bh;
  double ht;
} RevgeoAreas;

// One node of a generating-function table. `f`, `tau` and `winding` are NaN at η = ±1.
typedef struct RevgeoRow {
  double eta;
  double big_f;
  double f;
  double tau;
  double winding;
} RevgeoRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a profile from `{"family": name, "params": {...}}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out_profile` a valid pointer.
int32_t revgeo_profile_from_family_json(const char *json, struct RevgeoProfile **out_profile);

// Build a profile from a CSV of samples with header `s,r,z`.
//
// # Safety
// `path` must be a NUL-terminated string and `out_profile` a valid pointer.
int32_t revgeo_profile_from_csv(const char *path, struct RevgeoProfile **out_profile);

// # Safety
// `profile` must come from a `revgeo_profile_*` constructor and not be freed twice. Null is ignored.
void revgeo_profile_free(struct RevgeoProfile *profile);

// Meridian length M, minimal equator radius and maximal radius.
//
// # Safety
// All pointers must be valid.
int32_t revgeo_profile_dimensions(const struct RevgeoProfile *profile,
                                  double *meridian_length,
                                  double *r_min,
                                  double *r_max);

// r(s), r′(s) and z(s) at arc length `s` in [0, M/2].
//
// # Safety
// All pointers must be valid.
int32_t revgeo_profile_eval(const struct RevgeoProfile *profile,
                            double s,
                            double *r,
                            double *dr,
                            double *z);

// Riemannian, Busemann–Hausdorff and Holmes–Thompson areas and the contact volume at wind `a`.
//
// # Safety
// All pointers must be valid.
int32_t revgeo_areas(const struct RevgeoProfile *profile, double a, struct RevgeoAreas *areas);

// First return to the equatorial annulus from height η ∈ (−1, 1): return time and winding number.
//
// # Safety
// All pointers must be valid.
int32_t revgeo_first_return(const struct RevgeoProfile *profile,
                            double eta,
                            double tol,
                            double *tau,
                            double *winding);

// Zermelo norm of the tangent vector A∂θ + B∂s at height `s` under wind `a`.
//
// # Safety
// All pointers must be valid.
int32_t revgeo_finsler_norm(const struct RevgeoProfile *profile,
                            double a,
                            double s,
                            double theta_component,
                            double s_component,
                            double *norm);

// Generating-function table on `nodes` points of [−1, 1] (0 selects the default of 201).
//
// # Safety
// All pointers must be valid.
int32_t revgeo_table_build(const struct RevgeoProfile *profile,
                           size_t nodes,
                           struct RevgeoTable **out_table);

// Number of rows; 0 for a null table.
//
// # Safety
// `table` must be null or valid.
size_t revgeo_table_len(const struct RevgeoTable *table);

// # Safety
// All pointers must be valid.
int32_t revgeo_table_row(const struct RevgeoTable *table, size_t index, struct RevgeoRow *row);

// # Safety
// `table` must come from `revgeo_table_build` and not be freed twice. Null is ignored.
void revgeo_table_free(struct RevgeoTable *table);

// Full analysis report as JSON; free the string with `revgeo_string_free`.
//
// # Safety
// All pointers must be valid.
int32_t revgeo_report_json(const struct RevgeoProfile *profile,
                           double a,
                           size_t nodes,
                           char **json);

// # Safety
// `s` must come from this library and not be freed twice. Null is ignored.
void revgeo_string_free(char *s);

// Copy the calling thread's last error message into `buf` (NUL-terminated, truncated to `len`).
// Returns the full message length including the terminator, so a short buffer can be resized.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t revgeo_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REVGEO_H */
