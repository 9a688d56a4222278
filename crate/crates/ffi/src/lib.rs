//! C ABI for the beamshape library.
//!
//! All objects are opaque handles created by `bs_*_new`-style constructors
//! and released with the matching `bs_*_free`. Every fallible call returns a
//! `BsStatus`; on failure, `bs_last_error_message` retrieves a human-readable
//! description (thread-local, overwritten by the next failure on the same
//! thread).
//!
//! Safety contract for all functions: handle pointers must be valid objects
//! created by this library and not yet freed; out-pointers must be non-null
//! and writable; buffers must have the advertised capacity.

use std::cell::RefCell;
use std::os::raw::c_char;
use std::ptr;

use beamshape::aperture::{ApertureConfig, BeamWeights};
use beamshape::baselines;
use beamshape::error::{Error, ErrorKind};
use beamshape::metrics;
use beamshape::nearfield;
use beamshape::phase::{self, DesignOptions};
use beamshape::trajectory::{Orientation, Trajectory};

/// Result code of a library call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum BsStatus {
    /// Success.
    BsOk = 0,
    /// A pointer argument was null or a scalar argument malformed.
    BsInvalidArgument = 1,
    /// Configuration rejected by validation.
    BsValidationError = 2,
    /// Numerical failure (non-monotone tangency, unattainable threshold, ...).
    BsNumericalError = 3,
    /// I/O failure.
    BsIoError = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into_bytes());
}

fn fail(err: Error) -> BsStatus {
    let status = match err.kind() {
        ErrorKind::Validation => BsStatus::BsValidationError,
        ErrorKind::Numerical => BsStatus::BsNumericalError,
        ErrorKind::Io => BsStatus::BsIoError,
    };
    set_error(err.to_string());
    status
}

fn invalid(msg: &str) -> BsStatus {
    set_error(msg.to_string());
    BsStatus::BsInvalidArgument
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (to query the length).
#[no_mangle]
pub unsafe extern "C" fn bs_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Opaque array aperture handle.
pub struct BsAperture(ApertureConfig);
/// Opaque trajectory handle.
pub struct BsTrajectory(Trajectory);
/// Opaque beamforming weights handle.
pub struct BsWeights(BeamWeights);
/// Opaque 2-D intensity map handle.
pub struct BsFieldGrid(nearfield::FieldGrid);

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

unsafe fn out_write<T>(out: *mut *mut T, value: T) -> BsStatus {
    if out.is_null() {
        return invalid("out pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    BsStatus::BsOk
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, BsStatus> {
    p.as_ref().ok_or_else(|| invalid(&format!("{name} is null")))
}

/// Creates a uniform linear aperture with `num_elements` elements spaced
/// `spacing` wavelengths apart along the x-axis from the origin.
///
/// # Safety
/// `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_aperture_new(
    num_elements: usize,
    spacing: f64,
    out: *mut *mut BsAperture,
) -> BsStatus {
    let cfg = try_ffi!(ApertureConfig::new(num_elements, spacing));
    out_write(out, BsAperture(cfg))
}

/// # Safety
/// `aperture` must come from `bs_aperture_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bs_aperture_free(aperture: *mut BsAperture) {
    if !aperture.is_null() {
        drop(Box::from_raw(aperture));
    }
}

/// Trajectory x = x0 on z in [z_start, z_end].
///
/// # Safety
/// `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_trajectory_constant(
    x0: f64,
    z_start: f64,
    z_end: f64,
    out: *mut *mut BsTrajectory,
) -> BsStatus {
    let t = try_ffi!(Trajectory::constant(x0, z_start, z_end));
    out_write(out, BsTrajectory(t))
}

/// Trajectory x = slope * z + intercept on z in [z_start, z_end].
///
/// # Safety
/// `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_trajectory_linear(
    slope: f64,
    intercept: f64,
    z_start: f64,
    z_end: f64,
    out: *mut *mut BsTrajectory,
) -> BsStatus {
    let t = try_ffi!(Trajectory::linear(slope, intercept, z_start, z_end));
    out_write(out, BsTrajectory(t))
}

/// Parabolic trajectory x = apex_x +/- curvature * z^2; pass nonzero
/// `toward_negative_x` for the minus sign.
///
/// # Safety
/// `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_trajectory_parabolic(
    curvature: f64,
    apex_x: f64,
    toward_negative_x: i32,
    z_start: f64,
    z_end: f64,
    out: *mut *mut BsTrajectory,
) -> BsStatus {
    let orientation = if toward_negative_x != 0 {
        Orientation::TowardNegativeX
    } else {
        Orientation::TowardPositiveX
    };
    let t = try_ffi!(Trajectory::parabolic(curvature, apex_x, orientation, z_start, z_end));
    out_write(out, BsTrajectory(t))
}

/// Circular-arc trajectory (aperture-facing branch) with the given radius and
/// center (center_x, center_z).
///
/// # Safety
/// `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_trajectory_circular(
    radius: f64,
    center_x: f64,
    center_z: f64,
    z_start: f64,
    z_end: f64,
    out: *mut *mut BsTrajectory,
) -> BsStatus {
    let t = try_ffi!(Trajectory::circular(radius, (center_x, center_z), z_start, z_end));
    out_write(out, BsTrajectory(t))
}

/// Evaluates x = c(z) on the trajectory.
///
/// # Safety
/// `trajectory` must be a live handle; `x_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_trajectory_position(
    trajectory: *const BsTrajectory,
    z: f64,
    x_out: *mut f64,
) -> BsStatus {
    let t = match deref(trajectory, "trajectory") {
        Ok(t) => t,
        Err(s) => return s,
    };
    if x_out.is_null() {
        return invalid("x_out is null");
    }
    *x_out = try_ffi!(t.0.position(z));
    BsStatus::BsOk
}

/// # Safety
/// `trajectory` must come from a bs_trajectory_* constructor.
#[no_mangle]
pub unsafe extern "C" fn bs_trajectory_free(trajectory: *mut BsTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

fn opts(samples_per_wavelength: f64) -> DesignOptions {
    DesignOptions {
        samples_per_wavelength,
        ..DesignOptions::default()
    }
}

unsafe fn weights_from_profile(
    profile: beamshape::phase::PhaseProfile,
    cfg: &ApertureConfig,
    out: *mut *mut BsWeights,
) -> BsStatus {
    let phases = match profile.element_phases(cfg) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let w = match cfg.weights_from_phases(&phases) {
        Ok(w) => w,
        Err(e) => return fail(e),
    };
    out_write(out, BsWeights(w))
}

/// Numeric caustic design for an arbitrary trajectory; yields unit-modulus
/// weights for the aperture.
///
/// # Safety
/// All handles must be live; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_design_numeric(
    trajectory: *const BsTrajectory,
    aperture: *const BsAperture,
    samples_per_wavelength: f64,
    out: *mut *mut BsWeights,
) -> BsStatus {
    let (t, a) = match (deref(trajectory, "trajectory"), deref(aperture, "aperture")) {
        (Ok(t), Ok(a)) => (t, a),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let profile = try_ffi!(phase::design_numeric(&t.0, &a.0, &opts(samples_per_wavelength)));
    weights_from_profile(profile, &a.0, out)
}

/// Closed-form circular-caustic design (radius in wavelengths).
///
/// # Safety
/// `aperture` must be live; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_design_circular(
    radius: f64,
    aperture: *const BsAperture,
    samples_per_wavelength: f64,
    out: *mut *mut BsWeights,
) -> BsStatus {
    let a = match deref(aperture, "aperture") {
        Ok(a) => a,
        Err(s) => return s,
    };
    let profile = try_ffi!(phase::design_circular(radius, &a.0, &opts(samples_per_wavelength)));
    weights_from_profile(profile, &a.0, out)
}

/// Closed-form parabolic-caustic design (curvature alpha).
///
/// # Safety
/// `aperture` must be live; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_design_parabolic(
    curvature: f64,
    aperture: *const BsAperture,
    samples_per_wavelength: f64,
    out: *mut *mut BsWeights,
) -> BsStatus {
    let a = match deref(aperture, "aperture") {
        Ok(a) => a,
        Err(s) => return s,
    };
    let profile = try_ffi!(phase::design_parabolic(curvature, &a.0, &opts(samples_per_wavelength)));
    weights_from_profile(profile, &a.0, out)
}

/// Matched-filter focusing weights for a single point (x, z).
///
/// # Safety
/// `aperture` must be live; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_focus_weights(
    x: f64,
    z: f64,
    aperture: *const BsAperture,
    out: *mut *mut BsWeights,
) -> BsStatus {
    let a = match deref(aperture, "aperture") {
        Ok(a) => a,
        Err(s) => return s,
    };
    let w = try_ffi!(baselines::focus_weights((x, z), &a.0));
    out_write(out, BsWeights(w))
}

/// Multipoint superposition baseline: `count` focals uniform in z on the
/// trajectory, unit total power (or unit modulus if `phase_only` is nonzero).
///
/// # Safety
/// All handles must be live; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_multipoint_weights(
    trajectory: *const BsTrajectory,
    aperture: *const BsAperture,
    count: usize,
    phase_only: i32,
    out: *mut *mut BsWeights,
) -> BsStatus {
    let (t, a) = match (deref(trajectory, "trajectory"), deref(aperture, "aperture")) {
        (Ok(t), Ok(a)) => (t, a),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let focals = try_ffi!(baselines::multipoint_focals(&t.0, count));
    let w = try_ffi!(baselines::multipoint_weights(&focals, &a.0, phase_only != 0));
    out_write(out, BsWeights(w))
}

/// Number of coefficients in a weight vector.
///
/// # Safety
/// `weights` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_weights_len(weights: *const BsWeights) -> usize {
    weights.as_ref().map_or(0, |w| w.0.len())
}

/// Copies per-element phases (radians, in (-pi, pi]) into `buf`. Returns the
/// number of phases written.
///
/// # Safety
/// `weights` must be live; `buf` must hold at least `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn bs_weights_phases(
    weights: *const BsWeights,
    buf: *mut f64,
    cap: usize,
) -> usize {
    let Some(w) = weights.as_ref() else { return 0 };
    if buf.is_null() {
        return 0;
    }
    let phases = w.0.phases();
    let n = phases.len().min(cap);
    ptr::copy_nonoverlapping(phases.as_ptr(), buf, n);
    n
}

/// # Safety
/// `weights` must come from a bs_* constructor.
#[no_mangle]
pub unsafe extern "C" fn bs_weights_free(weights: *mut BsWeights) {
    if !weights.is_null() {
        drop(Box::from_raw(weights));
    }
}

/// Received intensity I = |h(x, z)^H w|.
///
/// # Safety
/// All handles must be live; `intensity_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_intensity(
    aperture: *const BsAperture,
    weights: *const BsWeights,
    x: f64,
    z: f64,
    intensity_out: *mut f64,
) -> BsStatus {
    let (a, w) = match (deref(aperture, "aperture"), deref(weights, "weights")) {
        (Ok(a), Ok(w)) => (a, w),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    if intensity_out.is_null() {
        return invalid("intensity_out is null");
    }
    *intensity_out = try_ffi!(nearfield::intensity((x, z), &w.0, &a.0));
    BsStatus::BsOk
}

/// Arc-length-weighted fraction of `samples` trajectory points with
/// intensity >= gamma.
///
/// # Safety
/// All handles must be live; `reliability_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_reliability(
    aperture: *const BsAperture,
    weights: *const BsWeights,
    trajectory: *const BsTrajectory,
    gamma: f64,
    samples: usize,
    reliability_out: *mut f64,
) -> BsStatus {
    let (a, w, t) = match (
        deref(aperture, "aperture"),
        deref(weights, "weights"),
        deref(trajectory, "trajectory"),
    ) {
        (Ok(a), Ok(w), Ok(t)) => (a, w, t),
        (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
    };
    if reliability_out.is_null() {
        return invalid("reliability_out is null");
    }
    let pts = try_ffi!(nearfield::intensity_along_trajectory(&w.0, &a.0, &t.0, samples));
    *reliability_out = try_ffi!(metrics::spatial_outage_reliability(&pts, gamma));
    BsStatus::BsOk
}

/// Computes an nx-by-nz intensity map over [x0, x1] x [z0, z1].
///
/// # Safety
/// All handles must be live; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_field_grid_compute(
    aperture: *const BsAperture,
    weights: *const BsWeights,
    x0: f64,
    x1: f64,
    z0: f64,
    z1: f64,
    nx: usize,
    nz: usize,
    out: *mut *mut BsFieldGrid,
) -> BsStatus {
    let (a, w) = match (deref(aperture, "aperture"), deref(weights, "weights")) {
        (Ok(a), Ok(w)) => (a, w),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let grid = try_ffi!(nearfield::field_grid(&w.0, &a.0, (x0, x1), (z0, z1), nx, nz));
    out_write(out, BsFieldGrid(grid))
}

/// Reads one grid sample; ix indexes x, iz indexes z.
///
/// # Safety
/// `grid` must be live; `intensity_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_field_grid_at(
    grid: *const BsFieldGrid,
    ix: usize,
    iz: usize,
    intensity_out: *mut f64,
) -> BsStatus {
    let g = match deref(grid, "grid") {
        Ok(g) => g,
        Err(s) => return s,
    };
    if intensity_out.is_null() {
        return invalid("intensity_out is null");
    }
    if ix >= g.0.nx || iz >= g.0.nz {
        return invalid("grid index out of bounds");
    }
    *intensity_out = g.0.at(ix, iz);
    BsStatus::BsOk
}

/// # Safety
/// `grid` must come from `bs_field_grid_compute`.
#[no_mangle]
pub unsafe extern "C" fn bs_field_grid_free(grid: *mut BsFieldGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}
