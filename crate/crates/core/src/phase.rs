//! Aperture phase profiles that steer the near-field ridge along a curve.
//!
//! The numeric designer integrates the aperture phase gradient
//! k0 * s / sqrt(1 + s^2), where s is the trajectory slope at the tangency
//! solution of each aperture point; the circular and parabolic closed forms
//! evaluate the same profile analytically.
//!
//! Sign convention: with the channel h_n = (1/r) exp(-j k0 r) and weights
//! exp(+j phi), the summed field accumulates phi + k0 r, so constructive
//! concentration requires d(phi)/d(xi) = k0 sin(theta) with theta the ray
//! deviation toward the tangent point. The circular closed form is stated in
//! the optics literature with the opposite field convention; here it carries
//! the sign that places the caustic in front of the array.

use crate::aperture::ApertureConfig;
use crate::error::{Error, Result};
use crate::specfun::{arcsec, gauss_2f1, Hyp2F1Params};
use crate::trajectory::Trajectory;

/// Handling of aperture regions outside the image of the tangent-intercept
/// map (e.g. xi < R for a circular caustic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadMode {
    /// Error out when any aperture point is uncovered.
    Strict,
    /// Extend the phase constantly from the covered boundary.
    #[default]
    Zero,
}

/// Designer resolution and padding options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptions {
    /// Aperture samples per wavelength for the continuous profile.
    pub samples_per_wavelength: f64,
    pub pad_mode: PadMode,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            samples_per_wavelength: 8.0,
            pad_mode: PadMode::Zero,
        }
    }
}

/// Continuous-aperture phase profile phi(xi) on a uniform grid over [0, D].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    xi: Vec<f64>,
    phi: Vec<f64>,
    step: f64,
}

impl PhaseProfile {
    fn from_samples(xi: Vec<f64>, phi: Vec<f64>) -> Self {
        debug_assert!(xi.len() == phi.len() && xi.len() >= 2);
        let step = xi[1] - xi[0];
        Self { xi, phi, step }
    }

    pub fn aperture_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xi.iter().copied().zip(self.phi.iter().copied())
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn sample_step(&self) -> f64 {
        self.step
    }

    /// Linear interpolation of the profile; exact at sample points.
    pub fn phi_at(&self, xi: f64) -> Result<f64> {
        let (lo, hi) = (self.xi[0], *self.xi.last().unwrap());
        let tol = 1e-9 * (1.0 + hi.abs());
        if xi < lo - tol || xi > hi + tol {
            return Err(Error::Domain(format!(
                "profile domain [{lo}, {hi}] does not cover xi = {xi}"
            )));
        }
        let t = ((xi - lo) / self.step).clamp(0.0, (self.xi.len() - 1) as f64);
        let i = (t.floor() as usize).min(self.xi.len() - 2);
        let frac = t - i as f64;
        Ok(self.phi[i] * (1.0 - frac) + self.phi[i + 1] * frac)
    }

    /// Per-element phases phi_n = phi((n-1) * spacing) by linear
    /// interpolation of the aperture samples.
    pub fn element_phases(&self, cfg: &ApertureConfig) -> Result<Vec<f64>> {
        (0..cfg.num_elements())
            .map(|n| self.phi_at(cfg.element_position(n)))
            .collect()
    }

    /// Central-difference gradient d(phi)/d(xi), one-sided at the ends.
    pub fn gradient(&self) -> Vec<f64> {
        let n = self.xi.len();
        let mut g = Vec::with_capacity(n);
        for i in 0..n {
            let v = if i == 0 {
                (self.phi[1] - self.phi[0]) / self.step
            } else if i == n - 1 {
                (self.phi[n - 1] - self.phi[n - 2]) / self.step
            } else {
                (self.phi[i + 1] - self.phi[i - 1]) / (2.0 * self.step)
            };
            g.push(v);
        }
        g
    }
}

/// Uniform design grid over [0, D].
fn design_grid(cfg: &ApertureConfig, opts: &DesignOptions) -> Result<Vec<f64>> {
    if !(opts.samples_per_wavelength > 0.0) {
        return Err(Error::InvalidConfig(
            "samples_per_wavelength must be positive".into(),
        ));
    }
    let d = cfg.aperture_length();
    if d <= 0.0 {
        return Err(Error::InvalidConfig(
            "phase design needs an aperture with at least two elements".into(),
        ));
    }
    let n = (d * opts.samples_per_wavelength).ceil().max(1.0) as usize;
    let step = d / n as f64;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

/// Numeric designer: integrate the per-point phase gradient obtained from
/// the tangency solution of each covered aperture point.
pub fn design_numeric(
    traj: &Trajectory,
    cfg: &ApertureConfig,
    opts: &DesignOptions,
) -> Result<PhaseProfile> {
    let xi_grid = design_grid(cfg, opts)?;
    let k0 = cfg.wave_number();

    if traj.is_straight() {
        // degenerate tangency map: plane wave with the trajectory's slope
        let m = traj.slope(traj.z_start())?;
        let g = k0 * m / (1.0 + m * m).sqrt();
        let phi = xi_grid.iter().map(|&xi| g * xi).collect();
        return Ok(PhaseProfile::from_samples(xi_grid, phi));
    }

    let (lo, hi) = traj.tangent_image()?;
    let d = cfg.aperture_length();
    if hi <= 0.0 || lo >= d {
        return Err(Error::EmptyApertureOverlap {
            lo,
            hi,
            aperture: d,
        });
    }
    if opts.pad_mode == PadMode::Strict && (lo > 0.0 || hi < d) {
        return Err(Error::OutsideTangentImage {
            xi: if lo > 0.0 { 0.0 } else { d },
            lo,
            hi,
        });
    }
    if lo > 0.0 || hi < d {
        eprintln!(
            "warning: tangent image [{lo:.3}, {hi:.3}] covers the aperture [0, {d:.3}] \
             only partially; extending the phase constantly outside"
        );
    }

    // indices of grid points inside the covered interval
    let first = xi_grid.partition_point(|&xi| xi < lo);
    let last = xi_grid.partition_point(|&xi| xi <= hi);
    if first >= last {
        return Err(Error::EmptyApertureOverlap {
            lo,
            hi,
            aperture: d,
        });
    }

    let integrand: Vec<f64> = xi_grid[first..last]
        .iter()
        .map(|&xi| -> Result<f64> {
            let z = traj.solve_tangency(xi)?;
            let s = traj.slope(z)?;
            Ok(k0 * s / (1.0 + s * s).sqrt())
        })
        .collect::<Result<_>>()?;

    // cumulative trapezoid, anchored to 0 at the first covered sample
    let step = xi_grid[1] - xi_grid[0];
    let mut phi = vec![0.0; xi_grid.len()];
    let mut acc = 0.0;
    for i in 1..integrand.len() {
        acc += 0.5 * (integrand[i - 1] + integrand[i]) * step;
        phi[first + i] = acc;
    }
    for v in phi.iter_mut().take(first) {
        *v = 0.0;
    }
    let top = phi[last - 1];
    for v in phi.iter_mut().skip(last) {
        *v = top;
    }
    Ok(PhaseProfile::from_samples(xi_grid, phi))
}

/// Closed-form profile for a circular caustic of radius R:
/// phi(xi) = -k0 R (sqrt((xi/R)^2 - 1) - arcsec(xi/R)) for xi >= R.
pub fn design_circular(
    radius: f64,
    cfg: &ApertureConfig,
    opts: &DesignOptions,
) -> Result<PhaseProfile> {
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "circular radius must be positive, got {radius}"
        )));
    }
    let d = cfg.aperture_length();
    if d <= radius {
        return Err(Error::EmptyApertureOverlap {
            lo: radius,
            hi: f64::INFINITY,
            aperture: d,
        });
    }
    if opts.pad_mode == PadMode::Strict {
        return Err(Error::OutsideTangentImage {
            xi: 0.0,
            lo: radius,
            hi: f64::INFINITY,
        });
    }
    let xi_grid = design_grid(cfg, opts)?;
    let k0 = cfg.wave_number();
    let phi = xi_grid
        .iter()
        .map(|&xi| -> Result<f64> {
            if xi <= radius {
                return Ok(0.0); // constant extension, phi(R) = 0
            }
            let u = xi / radius;
            Ok(-k0 * radius * ((u * u - 1.0).sqrt() - arcsec(u)?))
        })
        .collect::<Result<_>>()?;
    Ok(PhaseProfile::from_samples(xi_grid, phi))
}

/// Closed-form profile for a parabolic caustic with curvature alpha:
/// phi(xi) = -(4 alpha k0 xi / 3) sqrt(xi/alpha) 2F1(1/2,3/2;5/2;-4 alpha xi).
///
/// This realizes the parabola bending toward negative x (apex at the origin);
/// its tangent-intercept map alpha z^2 covers the aperture from xi = 0.
pub fn design_parabolic(alpha: f64, cfg: &ApertureConfig, opts: &DesignOptions) -> Result<PhaseProfile> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "parabolic curvature must be positive, got {alpha}"
        )));
    }
    let xi_grid = design_grid(cfg, opts)?;
    let k0 = cfg.wave_number();
    let params = Hyp2F1Params::parabolic_phase();
    let phi = xi_grid
        .iter()
        .map(|&xi| -> Result<f64> {
            if xi == 0.0 {
                return Ok(0.0);
            }
            let f = gauss_2f1(params, -4.0 * alpha * xi)?;
            Ok(-(4.0 * alpha * k0 * xi / 3.0) * (xi / alpha).sqrt() * f)
        })
        .collect::<Result<_>>()?;
    Ok(PhaseProfile::from_samples(xi_grid, phi))
}

/// Total accumulated phase Psi(xi; x, z) over the aperture, in the exact
/// spherical form and the Fresnel (parabolic wavefront) approximation.
#[derive(Debug, Clone)]
pub struct TotalPhase {
    pub xi: Vec<f64>,
    pub exact: Vec<f64>,
    pub fresnel: Vec<f64>,
}

/// Diagnostic: Psi(xi) = phi(xi) + k0 r(xi) at an observation point, plus its
/// Fresnel form phi(xi) + k0 (z + (x - xi)^2 / (2 z)).
pub fn total_phase(profile: &PhaseProfile, point: (f64, f64), cfg: &ApertureConfig) -> Result<TotalPhase> {
    let (x, z) = point;
    if !(z > 0.0) {
        return Err(Error::Domain(format!(
            "total phase requires z > 0, got z = {z}"
        )));
    }
    let k0 = cfg.wave_number();
    let mut exact = Vec::with_capacity(profile.xi.len());
    let mut fresnel = Vec::with_capacity(profile.xi.len());
    for (&xi, &phi) in profile.xi.iter().zip(&profile.phi) {
        let dx = x - xi;
        exact.push(phi + k0 * (dx * dx + z * z).sqrt());
        fresnel.push(phi + k0 * (z + dx * dx / (2.0 * z)));
    }
    Ok(TotalPhase {
        xi: profile.xi.clone(),
        exact,
        fresnel,
    })
}
