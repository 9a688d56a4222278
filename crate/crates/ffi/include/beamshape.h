#ifndef BEAMSHAPE_H
#define BEAMSHAPE_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of a library call.
 */
typedef enum BsStatus {
  /**
   * Success.
   */
  BS_OK = 0,
  /**
   * A pointer argument was null or a scalar argument malformed.
   */
  BS_INVALID_ARGUMENT = 1,
  /**
   * Configuration rejected by validation.
   */
  BS_VALIDATION_ERROR = 2,
  /**
   * Numerical failure (non-monotone tangency, unattainable threshold, ...).
   */
  BS_NUMERICAL_ERROR = 3,
  /**
   * I/O failure.
   */
  BS_IO_ERROR = 4,
} BsStatus;

/**
 * Opaque array aperture handle.
 */
typedef struct BsAperture BsAperture;

/**
 * Opaque 2-D intensity map handle.
 */
typedef struct BsFieldGrid BsFieldGrid;

/**
 * Opaque trajectory handle.
 */
typedef struct BsTrajectory BsTrajectory;

/**
 * Opaque beamforming weights handle.
 */
typedef struct BsWeights BsWeights;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be null (to query the length).
 */
uintptr_t bs_last_error_message(char *buf, uintptr_t cap);

/**
 * Creates a uniform linear aperture with `num_elements` elements spaced
 * `spacing` wavelengths apart along the x-axis from the origin.
 *
 * # Safety
 * `out` must be a valid out-pointer.
 */
enum BsStatus bs_aperture_new(uintptr_t num_elements, double spacing, struct BsAperture **out);

/**
 * # Safety
 * `aperture` must come from `bs_aperture_new` and not be freed twice.
 */
void bs_aperture_free(struct BsAperture *aperture);

/**
 * Trajectory x = x0 on z in [z_start, z_end].
 *
 * # Safety
 * `out` must be a valid out-pointer.
 */
enum BsStatus bs_trajectory_constant(double x0,
                                     double z_start,
                                     double z_end,
                                     struct BsTrajectory **out);

/**
 * Trajectory x = slope * z + intercept on z in [z_start, z_end].
 *
 * # Safety
 * `out` must be a valid out-pointer.
 */
enum BsStatus bs_trajectory_linear(double slope,
                                   double intercept,
                                   double z_start,
                                   double z_end,
                                   struct BsTrajectory **out);

/**
 * Parabolic trajectory x = apex_x +/- curvature * z^2; pass nonzero
 * `toward_negative_x` for the minus sign.
 *
 * # Safety
 * `out` must be a valid out-pointer.
 */
enum BsStatus bs_trajectory_parabolic(double curvature,
                                      double apex_x,
                                      int32_t toward_negative_x,
                                      double z_start,
                                      double z_end,
                                      struct BsTrajectory **out);

/**
 * Circular-arc trajectory (aperture-facing branch) with the given radius and
 * center (center_x, center_z).
 *
 * # Safety
 * `out` must be a valid out-pointer.
 */
enum BsStatus bs_trajectory_circular(double radius,
                                     double center_x,
                                     double center_z,
                                     double z_start,
                                     double z_end,
                                     struct BsTrajectory **out);

/**
 * Evaluates x = c(z) on the trajectory.
 *
 * # Safety
 * `trajectory` must be a live handle; `x_out` must be writable.
 */
enum BsStatus bs_trajectory_position(const struct BsTrajectory *trajectory,
                                     double z,
                                     double *x_out);

/**
 * # Safety
 * `trajectory` must come from a bs_trajectory_* constructor.
 */
void bs_trajectory_free(struct BsTrajectory *trajectory);

/**
 * Numeric caustic design for an arbitrary trajectory; yields unit-modulus
 * weights for the aperture.
 *
 * # Safety
 * All handles must be live; `out` must be a valid out-pointer.
 */
enum BsStatus bs_design_numeric(const struct BsTrajectory *trajectory,
                                const struct BsAperture *aperture,
                                double samples_per_wavelength,
                                struct BsWeights **out);

/**
 * Closed-form circular-caustic design (radius in wavelengths).
 *
 * # Safety
 * `aperture` must be live; `out` must be a valid out-pointer.
 */
enum BsStatus bs_design_circular(double radius,
                                 const struct BsAperture *aperture,
                                 double samples_per_wavelength,
                                 struct BsWeights **out);

/**
 * Closed-form parabolic-caustic design (curvature alpha).
 *
 * # Safety
 * `aperture` must be live; `out` must be a valid out-pointer.
 */
enum BsStatus bs_design_parabolic(double curvature,
                                  const struct BsAperture *aperture,
                                  double samples_per_wavelength,
                                  struct BsWeights **out);

/**
 * Matched-filter focusing weights for a single point (x, z).
 *
 * # Safety
 * `aperture` must be live; `out` must be a valid out-pointer.
 */
enum BsStatus bs_focus_weights(double x,
                               double z,
                               const struct BsAperture *aperture,
                               struct BsWeights **out);

/**
 * Multipoint superposition baseline: `count` focals uniform in z on the
 * trajectory, unit total power (or unit modulus if `phase_only` is nonzero).
 *
 * # Safety
 * All handles must be live; `out` must be a valid out-pointer.
 */
enum BsStatus bs_multipoint_weights(const struct BsTrajectory *trajectory,
                                    const struct BsAperture *aperture,
                                    uintptr_t count,
                                    int32_t phase_only,
                                    struct BsWeights **out);

/**
 * Number of coefficients in a weight vector.
 *
 * # Safety
 * `weights` must be a live handle.
 */
uintptr_t bs_weights_len(const struct BsWeights *weights);

/**
 * Copies per-element phases (radians, in (-pi, pi]) into `buf`. Returns the
 * number of phases written.
 *
 * # Safety
 * `weights` must be live; `buf` must hold at least `cap` doubles.
 */
uintptr_t bs_weights_phases(const struct BsWeights *weights, double *buf, uintptr_t cap);

/**
 * # Safety
 * `weights` must come from a bs_* constructor.
 */
void bs_weights_free(struct BsWeights *weights);

/**
 * Received intensity I = |h(x, z)^H w|.
 *
 * # Safety
 * All handles must be live; `intensity_out` must be writable.
 */
enum BsStatus bs_intensity(const struct BsAperture *aperture,
                           const struct BsWeights *weights,
                           double x,
                           double z,
                           double *intensity_out);

/**
 * Arc-length-weighted fraction of `samples` trajectory points with
 * intensity >= gamma.
 *
 * # Safety
 * All handles must be live; `reliability_out` must be writable.
 */
enum BsStatus bs_reliability(const struct BsAperture *aperture,
                             const struct BsWeights *weights,
                             const struct BsTrajectory *trajectory,
                             double gamma,
                             uintptr_t samples,
                             double *reliability_out);

/**
 * Computes an nx-by-nz intensity map over [x0, x1] x [z0, z1].
 *
 * # Safety
 * All handles must be live; `out` must be a valid out-pointer.
 */
enum BsStatus bs_field_grid_compute(const struct BsAperture *aperture,
                                    const struct BsWeights *weights,
                                    double x0,
                                    double x1,
                                    double z0,
                                    double z1,
                                    uintptr_t nx,
                                    uintptr_t nz,
                                    struct BsFieldGrid **out);

/**
 * Reads one grid sample; ix indexes x, iz indexes z.
 *
 * # Safety
 * `grid` must be live; `intensity_out` must be writable.
 */
enum BsStatus bs_field_grid_at(const struct BsFieldGrid *grid,
                               uintptr_t ix,
                               uintptr_t iz,
                               double *intensity_out);

/**
 * # Safety
 * `grid` must come from `bs_field_grid_compute`.
 */
void bs_field_grid_free(struct BsFieldGrid *grid);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BEAMSHAPE_H */
