//! Coverage metrics: spatial outage reliability, threshold sweeps, ridge
//! tracing and handover counting.

use crate::aperture::{ApertureConfig, BeamWeights};
use crate::error::{Error, Result};
use crate::nearfield::{self, FieldGrid, TrajectoryIntensity};
use crate::trajectory::Trajectory;

/// Arc-length-weighted fraction of trajectory samples with I >= gamma.
pub fn spatial_outage_reliability(samples: &[TrajectoryIntensity], gamma: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("reliability needs samples".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidConfig("gamma must be positive".into()));
    }
    let mut good = 0.0;
    let mut total = 0.0;
    for s in samples {
        total += s.arc_weight;
        if s.intensity >= gamma {
            good += s.arc_weight;
        }
    }
    Ok(good / total)
}

/// Reliability as a function of threshold, for one weight vector.
#[derive(Debug, Clone)]
pub struct ReliabilityCurve {
    pub gamma: Vec<f64>,
    pub reliability: Vec<f64>,
    pub min_intensity: f64,
    pub max_intensity: f64,
}

impl ReliabilityCurve {
    /// Largest gamma with reliability still >= target (None if even the
    /// smallest swept gamma falls short).
    pub fn gamma_at(&self, target: f64) -> Option<f64> {
        self.gamma
            .iter()
            .zip(&self.reliability)
            .filter(|(_, &r)| r >= target)
            .map(|(&g, _)| g)
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.max(g))))
    }
}

/// Sweep gammas over trajectory samples. The curve is non-increasing in
/// gamma by construction.
pub fn reliability_sweep(
    weights: &BeamWeights,
    cfg: &ApertureConfig,
    traj: &Trajectory,
    gammas: &[f64],
    sample_count: usize,
) -> Result<ReliabilityCurve> {
    let samples = nearfield::intensity_along_trajectory(weights, cfg, traj, sample_count)?;
    let reliability = gammas
        .iter()
        .map(|&g| spatial_outage_reliability(&samples, g))
        .collect::<Result<Vec<_>>>()?;
    let min_intensity = samples.iter().map(|s| s.intensity).fold(f64::INFINITY, f64::min);
    let max_intensity = samples.iter().map(|s| s.intensity).fold(0.0, f64::max);
    Ok(ReliabilityCurve {
        gamma: gammas.to_vec(),
        reliability,
        min_intensity,
        max_intensity,
    })
}

/// Per-row intensity ridge of a field map.
#[derive(Debug, Clone)]
pub struct RidgeTrace {
    pub z: Vec<f64>,
    /// Sub-sample ridge abscissa per row.
    pub x: Vec<f64>,
    pub peak_intensity: Vec<f64>,
}

impl RidgeTrace {
    /// RMS of (x_ridge - reference(z)) over rows where `reference` is finite.
    pub fn rms_deviation<F: Fn(f64) -> Option<f64>>(&self, reference: F) -> Option<f64> {
        let mut acc = 0.0;
        let mut n = 0usize;
        for (&z, &x) in self.z.iter().zip(&self.x) {
            if let Some(r) = reference(z) {
                let d = x - r;
                acc += d * d;
                n += 1;
            }
        }
        (n > 0).then(|| (acc / n as f64).sqrt())
    }
}

/// Argmax of each grid row with 3-point parabolic refinement. Exact ties on
/// the discrete argmax resolve to the smaller x.
pub fn ridge_trace(grid: &FieldGrid) -> RidgeTrace {
    let xs = grid.x_coords();
    let zs = grid.z_coords();
    let dx = xs[1] - xs[0];
    let mut x = Vec::with_capacity(grid.nz);
    let mut peak = Vec::with_capacity(grid.nz);
    for iz in 0..grid.nz {
        let row = grid.row(iz);
        let mut best = 0usize;
        for (i, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = i; // strict ">" keeps the smaller-x index on ties
            }
        }
        let mut xr = xs[best];
        if best > 0 && best + 1 < row.len() {
            // quadratic through the three samples around the argmax
            let (a, b, c) = (row[best - 1], row[best], row[best + 1]);
            let denom = a - 2.0 * b + c;
            if denom < 0.0 {
                let delta = 0.5 * (a - c) / denom;
                if delta.abs() <= 0.5 {
                    xr = xs[best] + delta * dx;
                }
            }
        }
        x.push(xr);
        peak.push(row[best]);
    }
    RidgeTrace {
        z: zs,
        x,
        peak_intensity: peak,
    }
}

/// Continuity-constrained ridge: rows are traced outward from the brightest
/// grid cell, and each row's peak is searched only within `max_step` (in x
/// units) of the neighboring row's ridge. This keeps the trace on one lobe
/// where the plain per-row argmax would jump to a bright interference
/// sidelobe.
pub fn ridge_trace_tracked(grid: &FieldGrid, max_step: f64) -> RidgeTrace {
    let xs = grid.x_coords();
    let zs = grid.z_coords();
    let dx = xs[1] - xs[0];
    let half = (max_step / dx).ceil() as usize;

    // brightest cell of the whole grid anchors the trace
    let (mut seed_iz, mut seed_ix, mut seed_v) = (0usize, 0usize, f64::NEG_INFINITY);
    for iz in 0..grid.nz {
        for (ix, &v) in grid.row(iz).iter().enumerate() {
            if v > seed_v {
                (seed_iz, seed_ix, seed_v) = (iz, ix, v);
            }
        }
    }

    let refine = |row: &[f64], best: usize| -> f64 {
        let mut xr = xs[best];
        if best > 0 && best + 1 < row.len() {
            let (a, b, c) = (row[best - 1], row[best], row[best + 1]);
            let denom = a - 2.0 * b + c;
            if denom < 0.0 {
                let delta = 0.5 * (a - c) / denom;
                if delta.abs() <= 0.5 {
                    xr = xs[best] + delta * dx;
                }
            }
        }
        xr
    };
    let windowed_argmax = |row: &[f64], center: usize| -> usize {
        let lo = center.saturating_sub(half);
        let hi = (center + half).min(row.len() - 1);
        let mut best = lo;
        for i in lo..=hi {
            if row[i] > row[best] {
                best = i;
            }
        }
        best
    };

    let mut x = vec![0.0; grid.nz];
    let mut peak = vec![0.0; grid.nz];
    x[seed_iz] = refine(grid.row(seed_iz), seed_ix);
    peak[seed_iz] = seed_v;
    let mut prev = seed_ix;
    for iz in (seed_iz + 1)..grid.nz {
        let row = grid.row(iz);
        let best = windowed_argmax(row, prev);
        x[iz] = refine(row, best);
        peak[iz] = row[best];
        prev = best;
    }
    prev = seed_ix;
    for iz in (0..seed_iz).rev() {
        let row = grid.row(iz);
        let best = windowed_argmax(row, prev);
        x[iz] = refine(row, best);
        peak[iz] = row[best];
        prev = best;
    }
    RidgeTrace {
        z: zs,
        x,
        peak_intensity: peak,
    }
}

/// Number of downward gamma-crossings along an intensity sequence: the count
/// of handovers a reactive system serving this profile would need.
pub fn switch_count(intensity: &[f64], gamma: f64) -> usize {
    let mut count = 0;
    let mut above = intensity.first().map_or(false, |&v| v >= gamma);
    for &v in intensity.iter().skip(1) {
        let now = v >= gamma;
        if above && !now {
            count += 1;
        }
        above = now;
    }
    count
}
