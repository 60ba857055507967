#ifndef KICKHO_H
#define KICKHO_H

#include <stddef.h>
#include <stdint.h>

#if defined(KICKHO_BUILDING_LIBRARY)
#define KICKHO_API __attribute__((visibility("default")))
#else
#define KICKHO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kickho_status {
  KICKHO_OK = 0,
  KICKHO_ERR_DOMAIN = 1,
  KICKHO_ERR_NONRESONANT = 2,
  KICKHO_ERR_NUMERIC = 3,
  KICKHO_ERR_DIMENSION = 4,
  KICKHO_ERR_INSUFFICIENT_BASIS = 5,
  KICKHO_ERR_IO = 6,
  KICKHO_ERR_NULL_ARGUMENT = 7,
  KICKHO_ERR_BUFFER_TOO_SMALL = 8,
  KICKHO_ERR_INTERNAL = 9
} kickho_status;

KICKHO_API const char* kickho_version(void);
KICKHO_API const char* kickho_status_string(kickho_status status);
/* Message of the most recent failed call on this thread; empty after a
   successful call. */
KICKHO_API const char* kickho_last_error(void);
KICKHO_API unsigned kickho_default_threads(void);

/* Arrays are returned into caller buffers. A buffer shorter than the
   documented length yields KICKHO_ERR_BUFFER_TOO_SMALL. Complex arrays are
   interleaved (re, im) pairs, so they need twice the element count. */

/* ---- parameters ---- */

typedef struct kickho_params {
  double K;
  int q;
  double eta;
} kickho_params;

typedef struct kickho_physical {
  double m;
  double nu;
  double tau;
  double k;
  double A;
  double hbar;
} kickho_physical;

KICKHO_API kickho_status kickho_params_check(const kickho_params* p, double* alpha,
                                             double* ktilde, int* quasicrystal);
KICKHO_API kickho_status kickho_params_from_physical(const kickho_physical* phys,
                                                     kickho_params* out);

/* ---- classical web map ---- */

KICKHO_API kickho_status kickho_web_map_step(const kickho_params* p, double v, double u,
                                             double* v_out, double* u_out);

typedef struct kickho_trajectory kickho_trajectory;

KICKHO_API kickho_status kickho_trajectory_create(const kickho_params* p, double v0, double u0,
                                                  int64_t n_kicks, kickho_trajectory** out);
/* Number of finite points stored (n_kicks + 1 unless the orbit escaped). */
KICKHO_API size_t kickho_trajectory_length(const kickho_trajectory* t);
KICKHO_API int kickho_trajectory_escaped(const kickho_trajectory* t);
KICKHO_API kickho_status kickho_trajectory_points(const kickho_trajectory* t, double* v,
                                                  double* u, size_t capacity);
KICKHO_API void kickho_trajectory_free(kickho_trajectory* t);

typedef struct kickho_histogram_grid {
  double v_min;
  double v_max;
  double u_min;
  double u_max;
  size_t nv;
  size_t nu;
} kickho_histogram_grid;

typedef struct kickho_histogram kickho_histogram;

KICKHO_API kickho_status kickho_histogram_create(const kickho_trajectory* t,
                                                 const kickho_histogram_grid* grid,
                                                 kickho_histogram** out);
/* nv * nu counts, row-major in (iv, iu). */
KICKHO_API kickho_status kickho_histogram_counts(const kickho_histogram* h, uint64_t* counts,
                                                 size_t capacity);
KICKHO_API kickho_status kickho_histogram_summary(const kickho_histogram* h, uint64_t* recorded,
                                                  uint64_t* overflow, size_t* occupied);
KICKHO_API void kickho_histogram_free(kickho_histogram* h);

/* Mean scaled energy of a Gaussian vacuum-like ensemble after each kick;
   energies needs n_kicks + 1 entries. */
KICKHO_API kickho_status kickho_classical_heating(const kickho_params* p, size_t ensemble_size,
                                                  uint64_t seed, int64_t n_kicks,
                                                  unsigned threads, double* energies,
                                                  size_t capacity, size_t* escaped);

/* ---- Floquet operator ---- */

typedef struct kickho_floquet kickho_floquet;

KICKHO_API kickho_status kickho_floquet_create(const kickho_params* p, size_t basis_size,
                                               kickho_floquet** out);
KICKHO_API size_t kickho_floquet_size(const kickho_floquet* u);
/* Fails with KICKHO_ERR_DOMAIN for operators without stored parameters. */
KICKHO_API kickho_status kickho_floquet_params(const kickho_floquet* u, kickho_params* out);
/* N*N complex entries, row-major. */
KICKHO_API kickho_status kickho_floquet_matrix(const kickho_floquet* u, double* re_im,
                                               size_t capacity);
KICKHO_API kickho_status kickho_floquet_save(const kickho_floquet* u, const char* path);
KICKHO_API kickho_status kickho_floquet_load(const char* path, kickho_floquet** out);
KICKHO_API void kickho_floquet_free(kickho_floquet* u);

/* ---- states and propagation ---- */

enum { KICKHO_INITIAL_VACUUM = 0, KICKHO_INITIAL_DISPLACED = 1 };

/* Displaced states are centred at beta = x1 + i x2. */
typedef struct kickho_initial {
  int kind;
  double x1;
  double x2;
} kickho_initial;

typedef struct kickho_state kickho_state;

KICKHO_API kickho_status kickho_state_create(const kickho_initial* init, size_t basis_size,
                                             kickho_state** out);
KICKHO_API kickho_status kickho_state_from_amplitudes(const double* re_im, size_t basis_size,
                                                      kickho_state** out);
KICKHO_API size_t kickho_state_size(const kickho_state* s);
KICKHO_API kickho_status kickho_state_amplitudes(const kickho_state* s, double* re_im,
                                                 size_t capacity);
/* Replaces s by U s. */
KICKHO_API kickho_status kickho_state_apply(kickho_state* s, const kickho_floquet* u);
KICKHO_API kickho_status kickho_state_mean_excitation(const kickho_state* s, double* out);
KICKHO_API kickho_status kickho_state_leakage(const kickho_state* s, double top_fraction,
                                              double* out);
KICKHO_API void kickho_state_free(kickho_state* s);

typedef struct kickho_heating kickho_heating;

typedef struct kickho_heating_info {
  size_t basis_size;
  int64_t n_kicks;
  double max_leakage;
  int converged;          /* leakage stayed below tolerance (and, for the
                             automatic variant, doubling agreed) */
  double doubling_change; /* automatic variant only, else 0 */
  size_t sizes_tried;     /* automatic variant only, else 1 */
} kickho_heating_info;

KICKHO_API kickho_status kickho_heating_run(const kickho_floquet* u, int64_t n_kicks,
                                            const kickho_state* initial, kickho_heating** out);
/* Basis chosen by doubling from start up to cap. */
KICKHO_API kickho_status kickho_heating_run_auto(const kickho_params* p, int64_t n_kicks,
                                                 const kickho_initial* initial, size_t start,
                                                 size_t cap, kickho_heating** out);
KICKHO_API kickho_status kickho_heating_info_get(const kickho_heating* h,
                                                 kickho_heating_info* out);
/* n_kicks + 1 entries each. */
KICKHO_API kickho_status kickho_heating_energies(const kickho_heating* h, double* out,
                                                 size_t capacity);
KICKHO_API kickho_status kickho_heating_leakage(const kickho_heating* h, double* out,
                                                size_t capacity);
KICKHO_API void kickho_heating_free(kickho_heating* h);

/* ---- quasienergy spectrum ---- */

typedef struct kickho_spectrum kickho_spectrum;

KICKHO_API kickho_status kickho_spectrum_create(const kickho_floquet* u, kickho_spectrum** out);
KICKHO_API size_t kickho_spectrum_size(const kickho_spectrum* s);
/* Ascending phases in (-pi, pi]. */
KICKHO_API kickho_status kickho_spectrum_phases(const kickho_spectrum* s, double* out,
                                                size_t capacity);
KICKHO_API kickho_status kickho_spectrum_eigenvector(const kickho_spectrum* s, size_t index,
                                                     double* re_im, size_t capacity);
KICKHO_API kickho_status kickho_spectrum_overlaps(const kickho_spectrum* s,
                                                  const kickho_state* psi0, double* out,
                                                  size_t capacity);
KICKHO_API double kickho_spectrum_max_residual(const kickho_spectrum* s);
KICKHO_API void kickho_spectrum_free(kickho_spectrum* s);

/* ---- eta sweep ---- */

typedef struct kickho_sweep kickho_sweep;

KICKHO_API kickho_status kickho_sweep_run(double K, int q, size_t basis_size, const double* etas,
                                          size_t n_eta, const kickho_initial* psi0,
                                          double threshold, unsigned threads,
                                          kickho_sweep** out);
KICKHO_API size_t kickho_sweep_points(const kickho_sweep* s);
KICKHO_API kickho_status kickho_sweep_point(const kickho_sweep* s, size_t i, double* eta,
                                            size_t* n_levels, int* failed);
KICKHO_API kickho_status kickho_sweep_levels(const kickho_sweep* s, size_t i, double* phases,
                                             double* overlaps, size_t capacity);
/* Number of branches found by overlap tracking. */
KICKHO_API kickho_status kickho_sweep_branch_count(const kickho_sweep* s, size_t* out);
/* Branch id of every level at point i (levels merged as degenerate share one). */
KICKHO_API kickho_status kickho_sweep_branch_ids(const kickho_sweep* s, size_t i, size_t* ids,
                                                 size_t capacity);
KICKHO_API void kickho_sweep_free(kickho_sweep* s);

/* ---- avoided crossings ---- */

typedef struct kickho_crossing_options {
  double refine_tol;
  double prominence;
  double max_gap;
  double min_partner_overlap;
  int refine;
  unsigned threads;
} kickho_crossing_options;

typedef struct kickho_crossing_info {
  double eta_center;
  double phase_center;
  double min_gap;
  double phase_a;
  double phase_b;
  double overlap_a;
  double overlap_b;
  double subspace_weight;
  double eta_tracked; /* grid point of smallest gap; classification starts here */
  int refined;
  int degenerate;
} kickho_crossing_info;

typedef struct kickho_partner_profile {
  double eta;
  double phase;
  double localization;
  double outer_mass;
  double psi0_overlap;
  double min_step_overlap;
  int localized;
} kickho_partner_profile;

typedef struct kickho_classification {
  kickho_partner_profile a_left;
  kickho_partner_profile b_left;
  kickho_partner_profile a_right;
  kickho_partner_profile b_right;
  int exchanged;
} kickho_classification;

typedef struct kickho_classify_options {
  double max_step;
  double radius;
  double threshold;
  double outer_radius;
  double grid_extent;
  double grid_spacing;
  unsigned threads;
} kickho_classify_options;

typedef struct kickho_crossings kickho_crossings;

KICKHO_API void kickho_crossing_options_default(kickho_crossing_options* out);
KICKHO_API void kickho_classify_options_default(kickho_classify_options* out);
KICKHO_API kickho_status kickho_crossings_find(const kickho_sweep* sweep,
                                               const kickho_crossing_options* options,
                                               kickho_crossings** out);
KICKHO_API size_t kickho_crossings_count(const kickho_crossings* c);
KICKHO_API kickho_status kickho_crossings_get(const kickho_crossings* c, size_t i,
                                              kickho_crossing_info* out);
/* which = 0 for the lower partner, 1 for the upper. */
KICKHO_API kickho_status kickho_crossings_state(const kickho_crossings* c, size_t i, int which,
                                                double* re_im, size_t capacity);
KICKHO_API kickho_status kickho_crossings_classify(const kickho_crossings* c, size_t i,
                                                   double eta_left, double eta_right,
                                                   const kickho_classify_options* options,
                                                   kickho_classification* out);
KICKHO_API void kickho_crossings_free(kickho_crossings* c);

/* ---- Husimi function ---- */

typedef struct kickho_husimi_grid {
  double x1_min;
  double x1_max;
  double x2_min;
  double x2_max;
  size_t n1;
  size_t n2;
} kickho_husimi_grid;

typedef struct kickho_husimi kickho_husimi;

KICKHO_API kickho_status kickho_husimi_create(const kickho_state* s, const kickho_husimi_grid* grid,
                                              unsigned threads, kickho_husimi** out);
/* n1 * n2 values, row-major in (i1, i2). */
KICKHO_API kickho_status kickho_husimi_values(const kickho_husimi* h, double* out,
                                              size_t capacity);
KICKHO_API double kickho_husimi_total_mass(const kickho_husimi* h);
KICKHO_API kickho_status kickho_husimi_localization(const kickho_husimi* h, double radius,
                                                    double* out);
KICKHO_API kickho_status kickho_husimi_mass_beyond(const kickho_husimi* h, double radius,
                                                   double* out);
KICKHO_API void kickho_husimi_free(kickho_husimi* h);

/* ---- basis convergence ---- */

typedef struct kickho_convergence_step {
  size_t from;
  size_t to;
  double max_drift;
  size_t matched;
  double min_match_overlap;
} kickho_convergence_step;

typedef struct kickho_convergence kickho_convergence;

KICKHO_API kickho_status kickho_convergence_run(const kickho_params* p, const size_t* sizes,
                                                size_t n_sizes, const kickho_initial* psi0,
                                                double threshold, kickho_convergence** out);
/* Tracks the two partners of crossing i at its centre eta (K and q from p). */
KICKHO_API kickho_status kickho_convergence_run_crossing(const kickho_params* p,
                                                         const size_t* sizes, size_t n_sizes,
                                                         const kickho_crossings* c, size_t i,
                                                         kickho_convergence** out);
/* Tracks caller-supplied reference vectors (lengths may differ from the sizes;
   overlaps use the common leading components). */
KICKHO_API kickho_status kickho_convergence_run_states(const kickho_params* p, const size_t* sizes,
                                                       size_t n_sizes,
                                                       const double* const* states_re_im,
                                                       const size_t* lengths, size_t n_states,
                                                       kickho_convergence** out);
/* Phase matched to reference r at size index k (reference-state reports only). */
KICKHO_API kickho_status kickho_convergence_tracked_phase(const kickho_convergence* r, size_t k,
                                                          size_t ref, double* out);
KICKHO_API size_t kickho_convergence_steps(const kickho_convergence* r);
KICKHO_API kickho_status kickho_convergence_step_get(const kickho_convergence* r, size_t i,
                                                     kickho_convergence_step* out);
/* Returns 1 and sets *size when saturated, 0 otherwise. */
KICKHO_API int kickho_convergence_saturated(const kickho_convergence* r, size_t* size);
KICKHO_API void kickho_convergence_free(kickho_convergence* r);

#ifdef __cplusplus
}
#endif

#endif
