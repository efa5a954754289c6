#ifndef HYBRIDQ_H
#define HYBRIDQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HqStatus {
  HQ_STATUS_OK = 0,
  HQ_STATUS_NULL_POINTER = 1,
  HQ_STATUS_INVALID_ARGUMENT = 2,
  // Integration or eigenvalue failure.
  HQ_STATUS_NUMERICAL = 3,
  HQ_STATUS_INDEX_OUT_OF_RANGE = 4,
  HQ_STATUS_IO = 5,
  // A Rust panic was caught at the boundary.
  HQ_STATUS_PANIC = 6,
} HqStatus;

typedef enum HqPerturbationKind {
  HQ_PERTURBATION_KIND_SINGLE_QUBIT = 0,
  HQ_PERTURBATION_KIND_TWO_QUBIT = 1,
} HqPerturbationKind;

typedef struct HqEnsemble HqEnsemble;

// Model parameters plus coupling schedule and perturbation.
typedef struct HqModel HqModel;

typedef struct HqTrajectory HqTrajectory;

typedef struct HqComplex {
  double re;
  double im;
} HqComplex;

// One output sample of a trajectory.
typedef struct HqSample {
  double t;
  double x;
  double p;
  // Amplitudes in the basis |++>, |-->, (|+-> + |-+>)/sqrt2, (|+-> - |-+>)/sqrt2.
  struct HqComplex c[4];
  double concurrence;
  double e_total;
} HqSample;

// One output sample of an ensemble average.
typedef struct HqEnsembleSample {
  double t;
  double concurrence;
  double linear_entropy;
  double purity;
  // Averaged density matrix, row-major.
  struct HqComplex rho[16];
} HqEnsembleSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or "" after a success.
// The pointer stays valid until the next `hq_*` call on the same thread.
const char *hq_last_error_message(void);

// Creates a model with constant coupling and no perturbation.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum HqStatus hq_model_new(double mass,
                           double omega,
                           double omega0,
                           double beta,
                           struct HqModel **out);

// # Safety
// `model` must be null or a handle from [`hq_model_new`] not yet freed.
void hq_model_free(struct HqModel *model);

// Replaces constant coupling with a Gaussian pulse of peak `amplitude` (in
// units of the constant coupling), centred at `center` with width `width`.
//
// # Safety
// `model` must be a live handle.
enum HqStatus hq_model_set_pulse(struct HqModel *model,
                                 double amplitude,
                                 double center,
                                 double width);

// Sets the perturbation weights (omega1, omega2, omega3) for the given kind.
//
// # Safety
// `model` must be a live handle.
enum HqStatus hq_model_set_perturbation(struct HqModel *model,
                                        enum HqPerturbationKind kind,
                                        double w1,
                                        double w2,
                                        double w3);

// Concurrence of the normalized pure state `c[4]`.
//
// # Safety
// `c` must point to 4 values and `out` to a writable double.
enum HqStatus hq_concurrence_pure(const struct HqComplex *c, double *out);

// Concurrence of the density matrix `rho[16]` (row-major).
//
// # Safety
// `rho` must point to 16 values and `out` to a writable double.
enum HqStatus hq_concurrence_mixed(const struct HqComplex *rho, double *out);

// Entanglement of formation for a concurrence in [0, 1].
//
// # Safety
// `out` must point to a writable double.
enum HqStatus hq_entanglement_of_formation(double concurrence, double *out);

// Integrates from t = 0 to `t_max` with RK4 step `dt`, keeping every
// `stride`-th step plus the first and last.
//
// # Safety
// `model` must be a live handle, `c` must point to 4 values and `out` to
// writable storage for a handle.
enum HqStatus hq_integrate(const struct HqModel *model,
                           const struct HqComplex *c,
                           double x0,
                           double p0,
                           double t_max,
                           double dt,
                           size_t stride,
                           struct HqTrajectory **out);

// # Safety
// `traj` must be a live handle and `out` a writable size_t.
enum HqStatus hq_trajectory_len(const struct HqTrajectory *traj, size_t *out);

// # Safety
// `traj` must be a live handle and `out` writable.
enum HqStatus hq_trajectory_sample(const struct HqTrajectory *traj,
                                   size_t index,
                                   struct HqSample *out);

// # Safety
// `traj` must be null or a live handle.
void hq_trajectory_free(struct HqTrajectory *traj);

// Averages `trajectories` runs whose (x0, p0) are drawn from independent
// Gaussians. Results are identical for a given seed regardless of threads.
//
// # Safety
// `model` must be a live handle, `c` must point to 4 values and `out` to
// writable storage for a handle.
enum HqStatus hq_ensemble_run(const struct HqModel *model,
                              const struct HqComplex *c,
                              size_t trajectories,
                              double x_mean,
                              double p_mean,
                              double sigma_x,
                              double sigma_p,
                              uint64_t seed,
                              double t_max,
                              double dt,
                              size_t stride,
                              struct HqEnsemble **out);

// # Safety
// `ens` must be a live handle and `out` a writable size_t.
enum HqStatus hq_ensemble_len(const struct HqEnsemble *ens, size_t *out);

// # Safety
// `ens` must be a live handle and `out` writable.
enum HqStatus hq_ensemble_sample(const struct HqEnsemble *ens,
                                 size_t index,
                                 struct HqEnsembleSample *out);

// # Safety
// `ens` must be null or a live handle.
void hq_ensemble_free(struct HqEnsemble *ens);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYBRIDQ_H */
