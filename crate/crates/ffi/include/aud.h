#ifndef AUD_H
#define AUD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AUD_SERVICE_UNIFORM 0

#define AUD_SERVICE_EXPONENTIAL 1

#define AUD_SERVICE_DETERMINISTIC 2

#define AUD_DECISION_POISSON 0

#define AUD_DECISION_PERIODIC 1

#define AUD_DISCIPLINE_BLOCKING1 0

#define AUD_DISCIPLINE_FCFS 1

typedef enum AudStatus {
  AUD_STATUS_OK = 0,
  AUD_STATUS_INVALID_ARGUMENT = 1,
  AUD_STATUS_NULL_POINTER = 2,
  // Infinite FCFS buffer at load >= 1.
  AUD_STATUS_UNSTABLE = 3,
  // Load too close to 1 for the exponential periodic formula.
  AUD_STATUS_SINGULAR_LOAD = 4,
  // A formula left [0, 1].
  AUD_STATUS_OUT_OF_RANGE = 5,
  AUD_STATUS_IO = 6,
  // Internal failure; see `aud_last_error`.
  AUD_STATUS_INTERNAL = 7,
} AudStatus;

// Opaque system description.
typedef struct AudSystem AudSystem;

// Closed-form values of a system. `*_available` is false where no formula
// covers it; `*_exact` is false for uniform-epoch approximations.
typedef struct AudAnalytic {
  double avg_aud;
  double missing_prob;
  bool aud_available;
  bool pmis_available;
  bool aud_exact;
  bool pmis_exact;
} AudAnalytic;

typedef struct AudEstimate {
  double avg_aud;
  double aud_stderr;
  double missing_prob;
  double pmis_stderr;
  double drop_prob;
  double mean_interdeparture;
  uint64_t n_decisions;
  uint64_t n_generated;
  uint64_t n_successful;
  uint64_t n_dropped;
  uint64_t n_missed_updates;
} AudEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *aud_version(void);

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next library call on this thread.
const char *aud_last_error(void);

// Create a system. `service`, `decision` and `discipline` take the
// `AUD_SERVICE_*`, `AUD_DECISION_*` and `AUD_DISCIPLINE_*` codes.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum AudStatus aud_system_new(double lambda,
                              double mu,
                              uint32_t service,
                              uint32_t decision,
                              double nu,
                              uint32_t discipline,
                              struct AudSystem **out);

// Release a handle. Null is ignored.
//
// # Safety
// `system` must come from [`aud_system_new`] and not have been freed.
void aud_system_free(struct AudSystem *system);

// Pin the lattice offset of periodic decisions to `phase` in `[0, 1/nu)`.
//
// # Safety
// `system` must be a live handle.
enum AudStatus aud_system_set_phase(struct AudSystem *system, double phase);

// Offered load `lambda * E[S]`.
//
// # Safety
// `system` must be a live handle and `out` writable.
enum AudStatus aud_system_rho(const struct AudSystem *system, double *out);

// Closed-form AuD and missing probability.
//
// # Safety
// `system` must be a live handle and `out` writable.
enum AudStatus aud_analytic(const struct AudSystem *system, struct AudAnalytic *out);

// Pool `n_reps` replications of `horizon` decisions (the first `warmup`
// discarded).
//
// # Safety
// `system` must be a live handle and `out` writable.
enum AudStatus aud_simulate(const struct AudSystem *system,
                            uint64_t horizon,
                            uint64_t warmup,
                            uint64_t n_reps,
                            uint64_t seed,
                            struct AudEstimate *out);

// Threshold `m0*` between exponential and uniform service under periodic
// decisions, scanning `1..=m0_max`. Writes 0 when there is no crossing.
//
// # Safety
// `out` must be writable.
enum AudStatus aud_find_m0_star(double lambda, double mu, uint64_t m0_max, uint64_t *out);

// Run a figure sweep with its default grid and write the CSV to `path`.
//
// # Safety
// `figure` and `path` must be NUL-terminated strings.
enum AudStatus aud_sweep_csv(const char *figure,
                             uint64_t horizon,
                             uint64_t n_reps,
                             uint64_t seed,
                             const char *path);

// Run a figure sweep (infinite-buffer baselines included) and check it
// under the default tolerance policy. `passed` receives the verdict.
//
// # Safety
// `figure` must be a NUL-terminated string and `passed` writable.
enum AudStatus aud_verify_figure(const char *figure,
                                 uint64_t horizon,
                                 uint64_t n_reps,
                                 uint64_t seed,
                                 bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUD_H */
