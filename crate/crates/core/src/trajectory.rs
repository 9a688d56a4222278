//! Receiver trajectories x = c(z), their tangency geometry and arc length.
//!
//! The tangent-intercept map T(z) = c(z) - z c'(z) sends a trajectory point
//! to the aperture point whose ray is tangent there; it is the bridge between
//! the curve and the phase designer.

use std::path::Path;

use crate::error::{Error, Result};

/// Number of samples used to validate monotonicity of the tangent-intercept
/// map before root finding.
const MONOTONE_SCAN: usize = 512;
/// Residual tolerance for the tangency root finder.
const TANGENCY_TOL: f64 = 1e-9;

/// Curve shape, evaluated as x = c(z).
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryShape {
    /// x = x0.
    Constant { x0: f64 },
    /// x = slope * z + intercept.
    Linear { slope: f64, intercept: f64 },
    /// x = apex_x + orientation * curvature * z^2, apex at z = 0.
    Parabolic {
        curvature: f64,
        apex_x: f64,
        orientation: Orientation,
    },
    /// Branch facing the aperture: x = cx + sqrt(R^2 - (z - cz)^2).
    Circular { radius: f64, center: (f64, f64) },
    /// Tabulated samples with linear or cubic interpolation.
    Tabulated(TabulatedCurve),
}

/// Bending sense of a parabolic trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    TowardPositiveX,
    TowardNegativeX,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::TowardPositiveX => 1.0,
            Orientation::TowardNegativeX => -1.0,
        }
    }
}

/// A trajectory shape restricted to a z-segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    shape: TrajectoryShape,
    z_start: f64,
    z_end: f64,
}

/// One ray of the caustic construction: launch point, tangency point and
/// deviation angle from the z-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayGeometry {
    pub aperture_point: f64,
    pub tangent_z: f64,
    pub deviation_angle: f64,
}

/// Uniform-in-z trajectory sample with its trapezoidal arc-length weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub x: f64,
    pub z: f64,
    pub arc_weight: f64,
}

impl Trajectory {
    pub fn new(shape: TrajectoryShape, z_start: f64, z_end: f64) -> Result<Self> {
        if !(z_start < z_end) || !z_start.is_finite() || !z_end.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "segment [{z_start}, {z_end}] must satisfy z_start < z_end"
            )));
        }
        match &shape {
            TrajectoryShape::Parabolic { curvature, .. } => {
                if !(*curvature > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "parabolic curvature must be positive, got {curvature}"
                    )));
                }
            }
            TrajectoryShape::Circular { radius, center } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "circular radius must be positive, got {radius}"
                    )));
                }
                let (_, cz) = *center;
                if (z_start - cz).abs() >= *radius || (z_end - cz).abs() >= *radius {
                    return Err(Error::InvalidConfig(format!(
                        "segment [{z_start}, {z_end}] leaves the valid z-range of a circle \
                         of radius {radius} centered at z = {cz}"
                    )));
                }
            }
            TrajectoryShape::Tabulated(t) => {
                t.validate()?;
                if z_start < t.z_first() || z_end > t.z_last() {
                    return Err(Error::InvalidConfig(format!(
                        "segment [{z_start}, {z_end}] outside tabulated range [{}, {}]",
                        t.z_first(),
                        t.z_last()
                    )));
                }
            }
            _ => {}
        }
        Ok(Self {
            shape,
            z_start,
            z_end,
        })
    }

    pub fn constant(x0: f64, z_start: f64, z_end: f64) -> Result<Self> {
        Self::new(TrajectoryShape::Constant { x0 }, z_start, z_end)
    }

    pub fn linear(slope: f64, intercept: f64, z_start: f64, z_end: f64) -> Result<Self> {
        Self::new(TrajectoryShape::Linear { slope, intercept }, z_start, z_end)
    }

    pub fn parabolic(
        curvature: f64,
        apex_x: f64,
        orientation: Orientation,
        z_start: f64,
        z_end: f64,
    ) -> Result<Self> {
        Self::new(
            TrajectoryShape::Parabolic {
                curvature,
                apex_x,
                orientation,
            },
            z_start,
            z_end,
        )
    }

    pub fn circular(radius: f64, center: (f64, f64), z_start: f64, z_end: f64) -> Result<Self> {
        Self::new(TrajectoryShape::Circular { radius, center }, z_start, z_end)
    }

    pub fn shape(&self) -> &TrajectoryShape {
        &self.shape
    }

    pub fn z_start(&self) -> f64 {
        self.z_start
    }

    pub fn z_end(&self) -> f64 {
        self.z_end
    }

    fn check_segment(&self, z: f64) -> Result<()> {
        let tol = 1e-12 * (1.0 + self.z_end.abs().max(self.z_start.abs()));
        if z < self.z_start - tol || z > self.z_end + tol {
            return Err(Error::OutsideSegment {
                z,
                z_start: self.z_start,
                z_end: self.z_end,
            });
        }
        Ok(())
    }

    /// x = c(z).
    pub fn position(&self, z: f64) -> Result<f64> {
        self.check_segment(z)?;
        Ok(self.position_unchecked(z))
    }

    fn position_unchecked(&self, z: f64) -> f64 {
        match &self.shape {
            TrajectoryShape::Constant { x0 } => *x0,
            TrajectoryShape::Linear { slope, intercept } => slope * z + intercept,
            TrajectoryShape::Parabolic {
                curvature,
                apex_x,
                orientation,
            } => apex_x + orientation.sign() * curvature * z * z,
            TrajectoryShape::Circular { radius, center } => {
                let dz = z - center.1;
                center.0 + (radius * radius - dz * dz).max(0.0).sqrt()
            }
            TrajectoryShape::Tabulated(t) => t.position(z),
        }
    }

    /// dc/dz.
    pub fn slope(&self, z: f64) -> Result<f64> {
        self.check_segment(z)?;
        if let TrajectoryShape::Circular { radius, center } = &self.shape {
            let dz = z - center.1;
            if radius * radius - dz * dz <= 1e-12 * radius * radius {
                return Err(Error::Domain(format!(
                    "circle tangent vertical at z = {z} (|z - cz| -> R)"
                )));
            }
        }
        Ok(self.slope_unchecked(z))
    }

    fn slope_unchecked(&self, z: f64) -> f64 {
        match &self.shape {
            TrajectoryShape::Constant { .. } => 0.0,
            TrajectoryShape::Linear { slope, .. } => *slope,
            TrajectoryShape::Parabolic {
                curvature,
                orientation,
                ..
            } => 2.0 * orientation.sign() * curvature * z,
            TrajectoryShape::Circular { radius, center } => {
                let dz = z - center.1;
                -dz / (radius * radius - dz * dz).max(f64::MIN_POSITIVE).sqrt()
            }
            TrajectoryShape::Tabulated(t) => t.slope(z),
        }
    }

    /// Tangent intercept T(z) = c(z) - z c'(z): the x-axis crossing of the
    /// ray tangent to the trajectory at z.
    pub fn tangent_intercept(&self, z: f64) -> Result<f64> {
        self.check_segment(z)?;
        Ok(self.position_unchecked(z) - z * self.slope_unchecked(z))
    }

    /// True when the tangent-intercept map is degenerate (constant), which is
    /// the case for straight trajectories.
    pub fn is_straight(&self) -> bool {
        matches!(
            self.shape,
            TrajectoryShape::Constant { .. } | TrajectoryShape::Linear { .. }
        )
    }

    /// Inverts the tangent-intercept map: finds z* with T(z*) = xi.
    ///
    /// T is validated to be strictly monotone by a scan over the segment,
    /// then the root is bracketed and bisected to |T(z*) - xi| <= 1e-9.
    pub fn solve_tangency(&self, xi: f64) -> Result<f64> {
        if self.is_straight() {
            // image of T is a single point
            let t0 = self.tangent_intercept(self.z_start)?;
            if (xi - t0).abs() <= TANGENCY_TOL {
                return Ok(self.z_start);
            }
            return Err(Error::OutsideTangentImage {
                xi,
                lo: t0,
                hi: t0,
            });
        }
        let scan = self.tangent_scan()?;
        let (lo, hi) = (
            scan.t[0].min(*scan.t.last().unwrap()),
            scan.t[0].max(*scan.t.last().unwrap()),
        );
        if xi < lo - TANGENCY_TOL || xi > hi + TANGENCY_TOL {
            return Err(Error::OutsideTangentImage { xi, lo, hi });
        }
        let xi = xi.clamp(lo, hi);
        // locate bracketing scan interval
        let increasing = scan.increasing;
        let idx = scan
            .t
            .windows(2)
            .position(|w| {
                if increasing {
                    w[0] <= xi && xi <= w[1]
                } else {
                    w[1] <= xi && xi <= w[0]
                }
            })
            .ok_or(Error::OutsideTangentImage { xi, lo, hi })?;
        let (mut a, mut b) = (scan.z[idx], scan.z[idx + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let tm = self.tangent_intercept(mid)?;
            if (tm - xi).abs() <= TANGENCY_TOL * 1e-3 || (b - a).abs() < f64::EPSILON * mid.abs().max(1.0) {
                return Ok(mid);
            }
            if (tm < xi) == increasing {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// Ray geometry at aperture point xi: tangency solution and deviation
    /// angle theta with tan(theta) = dc/dz at the tangent point.
    pub fn ray_geometry(&self, xi: f64) -> Result<RayGeometry> {
        let z = self.solve_tangency(xi)?;
        let s = self.slope(z)?;
        Ok(RayGeometry {
            aperture_point: xi,
            tangent_z: z,
            deviation_angle: s.atan(),
        })
    }

    fn tangent_scan(&self) -> Result<TangentScan> {
        let n = MONOTONE_SCAN;
        let mut z = Vec::with_capacity(n);
        let mut t = Vec::with_capacity(n);
        for i in 0..n {
            let zi = self.z_start + (self.z_end - self.z_start) * i as f64 / (n - 1) as f64;
            z.push(zi);
            t.push(self.tangent_intercept(zi)?);
        }
        let increasing = t[1] > t[0];
        for w in t.windows(2) {
            let step_ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
            if !step_ok {
                return Err(Error::NonMonotoneTangency);
            }
        }
        Ok(TangentScan { z, t, increasing })
    }

    /// Image [min, max] of the tangent-intercept map over the segment.
    pub fn tangent_image(&self) -> Result<(f64, f64)> {
        if self.is_straight() {
            let t0 = self.tangent_intercept(self.z_start)?;
            return Ok((t0, t0));
        }
        let scan = self.tangent_scan()?;
        let (a, b) = (scan.t[0], *scan.t.last().unwrap());
        Ok((a.min(b), a.max(b)))
    }

    /// Curve length over the segment by adaptive Simpson quadrature.
    pub fn arc_length(&self) -> Result<f64> {
        let f = |z: f64| (1.0 + self.slope_unchecked(z).powi(2)).sqrt();
        Ok(adaptive_simpson(&f, self.z_start, self.z_end, 1e-8))
    }

    /// `count` uniform-in-z samples with trapezoidal arc-length weights.
    pub fn sample_points(&self, count: usize) -> Result<Vec<TrajectorySample>> {
        if count < 2 {
            return Err(Error::InvalidConfig(format!(
                "sample count {count} must be >= 2"
            )));
        }
        let dz = (self.z_end - self.z_start) / (count - 1) as f64;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let z = self.z_start + dz * i as f64;
            let speed = (1.0 + self.slope_unchecked(z).powi(2)).sqrt();
            let w = if i == 0 || i == count - 1 { 0.5 } else { 1.0 };
            out.push(TrajectorySample {
                x: self.position_unchecked(z),
                z,
                arc_weight: speed * dz * w,
            });
        }
        Ok(out)
    }

    /// Fingerprint of the trajectory parameters, used as output metadata.
    pub fn content_hash(&self) -> u64 {
        let mut h = crate::fnv::Fnv1a::new();
        h.write_f64(self.z_start);
        h.write_f64(self.z_end);
        match &self.shape {
            TrajectoryShape::Constant { x0 } => {
                h.write_u64(1);
                h.write_f64(*x0);
            }
            TrajectoryShape::Linear { slope, intercept } => {
                h.write_u64(2);
                h.write_f64(*slope);
                h.write_f64(*intercept);
            }
            TrajectoryShape::Parabolic {
                curvature,
                apex_x,
                orientation,
            } => {
                h.write_u64(3);
                h.write_f64(*curvature);
                h.write_f64(*apex_x);
                h.write_f64(orientation.sign());
            }
            TrajectoryShape::Circular { radius, center } => {
                h.write_u64(4);
                h.write_f64(*radius);
                h.write_f64(center.0);
                h.write_f64(center.1);
            }
            TrajectoryShape::Tabulated(t) => {
                h.write_u64(5);
                for (&z, &x) in t.zs.iter().zip(&t.xs) {
                    h.write_f64(z);
                    h.write_f64(x);
                }
                h.write_u64(t.order as u64);
            }
        }
        h.finish()
    }
}

struct TangentScan {
    z: Vec<f64>,
    t: Vec<f64>,
    increasing: bool,
}

/// Adaptive Simpson quadrature with relative tolerance `tol`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        eps: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * eps, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * eps, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let eps = tol * whole.abs().max(tol);
    recurse(f, a, fa, b, fb, whole, m, fm, eps, 50)
}

/// Monotone (z, x) samples with linear or natural-cubic-spline interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve {
    zs: Vec<f64>,
    xs: Vec<f64>,
    order: InterpolationOrder,
    /// second derivatives at the knots (cubic only)
    m2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpolationOrder {
    Linear = 1,
    Cubic = 3,
}

impl TabulatedCurve {
    pub fn new(zs: Vec<f64>, xs: Vec<f64>, order: InterpolationOrder) -> Result<Self> {
        let mut c = Self {
            zs,
            xs,
            order,
            m2: Vec::new(),
        };
        c.validate()?;
        if order == InterpolationOrder::Cubic {
            c.m2 = natural_spline_second_derivatives(&c.zs, &c.xs);
        }
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.zs.len() != self.xs.len() {
            return Err(Error::InvalidConfig(
                "tabulated z and x lengths differ".into(),
            ));
        }
        let min_pts = match self.order {
            InterpolationOrder::Linear => 2,
            InterpolationOrder::Cubic => 4,
        };
        if self.zs.len() < min_pts {
            return Err(Error::InvalidConfig(format!(
                "tabulated trajectory needs >= {min_pts} points, got {}",
                self.zs.len()
            )));
        }
        if self.zs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig(
                "tabulated z samples must be strictly increasing".into(),
            ));
        }
        if self.zs.iter().chain(&self.xs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "tabulated samples must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Loads a two-column CSV (z, x); a non-numeric first line is treated as
    /// a header.
    pub fn from_csv(path: &Path, order: InterpolationOrder) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut zs = Vec::new();
        let mut xs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let (a, b) = (parts.next(), parts.next());
            match (
                a.and_then(|v| v.trim().parse::<f64>().ok()),
                b.and_then(|v| v.trim().parse::<f64>().ok()),
            ) {
                (Some(z), Some(x)) => {
                    zs.push(z);
                    xs.push(x);
                }
                _ if lineno == 0 => continue, // header
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "unparseable CSV line {}: {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(zs, xs, order)
    }

    pub fn z_first(&self) -> f64 {
        self.zs[0]
    }

    pub fn z_last(&self) -> f64 {
        *self.zs.last().unwrap()
    }

    fn segment_index(&self, z: f64) -> usize {
        match self.zs.binary_search_by(|v| v.partial_cmp(&z).unwrap()) {
            Ok(i) => i.min(self.zs.len() - 2),
            Err(i) => i.clamp(1, self.zs.len() - 1) - 1,
        }
    }

    fn position(&self, z: f64) -> f64 {
        let i = self.segment_index(z);
        let h = self.zs[i + 1] - self.zs[i];
        let t = (z - self.zs[i]) / h;
        match self.order {
            InterpolationOrder::Linear => self.xs[i] * (1.0 - t) + self.xs[i + 1] * t,
            InterpolationOrder::Cubic => {
                let (a, b) = (1.0 - t, t);
                a * self.xs[i]
                    + b * self.xs[i + 1]
                    + ((a * a * a - a) * self.m2[i] + (b * b * b - b) * self.m2[i + 1]) * h * h
                        / 6.0
            }
        }
    }

    fn slope(&self, z: f64) -> f64 {
        let i = self.segment_index(z);
        let h = self.zs[i + 1] - self.zs[i];
        let t = (z - self.zs[i]) / h;
        match self.order {
            InterpolationOrder::Linear => (self.xs[i + 1] - self.xs[i]) / h,
            InterpolationOrder::Cubic => {
                let (a, b) = (1.0 - t, t);
                (self.xs[i + 1] - self.xs[i]) / h
                    + ((3.0 * b * b - 1.0) * self.m2[i + 1] - (3.0 * a * a - 1.0) * self.m2[i]) * h
                        / 6.0
            }
        }
    }
}

/// Natural cubic spline: second derivatives at the knots via the standard
/// tridiagonal solve.
fn natural_spline_second_derivatives(zs: &[f64], xs: &[f64]) -> Vec<f64> {
    let n = zs.len();
    let mut m2 = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let sig = (zs[i] - zs[i - 1]) / (zs[i + 1] - zs[i - 1]);
        let p = sig * m2[i - 1] + 2.0;
        m2[i] = (sig - 1.0) / p;
        let d = (xs[i + 1] - xs[i]) / (zs[i + 1] - zs[i])
            - (xs[i] - xs[i - 1]) / (zs[i] - zs[i - 1]);
        u[i] = (6.0 * d / (zs[i + 1] - zs[i - 1]) - sig * u[i - 1]) / p;
    }
    m2[n - 1] = 0.0;
    for i in (0..n - 1).rev() {
        m2[i] = m2[i] * m2[i + 1] + u[i];
    }
    m2
}
