//! Reference beamformers and the reactive tracking baseline.

use num_complex::Complex64;

use crate::aperture::{ApertureConfig, BeamWeights};
use crate::error::{Error, Result};
use crate::nearfield;
use crate::trajectory::Trajectory;

/// Matched-filter focusing at a single point: w_n = exp(-j k0 r_n) / sqrt(N),
/// which aligns every element's propagation phase at the focal point.
pub fn focus_weights(focal: (f64, f64), cfg: &ApertureConfig) -> Result<BeamWeights> {
    let (x, z) = focal;
    let k0 = cfg.wave_number();
    let mut phases = Vec::with_capacity(cfg.num_elements());
    for n in 0..cfg.num_elements() {
        let dx = x - cfg.element_position(n);
        let r = (dx * dx + z * z).sqrt();
        if r < 1e-9 {
            return Err(Error::ReceiverOnElement { x, z, index: n });
        }
        phases.push(-k0 * r);
    }
    cfg.weights_from_phases(&phases)
}

/// Superposition of K focusing beams, renormalized to unit total power.
///
/// With `phase_only` the summed coefficients are projected back to the unit-
/// modulus manifold (per-element phase kept, magnitudes equalized).
pub fn multipoint_weights(
    focals: &[(f64, f64)],
    cfg: &ApertureConfig,
    phase_only: bool,
) -> Result<BeamWeights> {
    if focals.is_empty() {
        return Err(Error::InvalidConfig("multipoint needs at least one focal".into()));
    }
    let mut sum = vec![Complex64::new(0.0, 0.0); cfg.num_elements()];
    for &f in focals {
        let w = focus_weights(f, cfg)?;
        for (s, c) in sum.iter_mut().zip(w.coefficients()) {
            *s += c;
        }
    }
    if phase_only {
        // project back to the unit-modulus manifold: keep per-element phase
        for s in &sum {
            if s.norm() < 1e-12 {
                return Err(Error::ZeroSumCancellation { norm: s.norm() });
            }
        }
        let phases: Vec<f64> = sum.iter().map(|s| s.arg()).collect();
        cfg.weights_from_phases(&phases)
    } else {
        BeamWeights::unit_norm(sum)
    }
}

/// Select K focal points uniform in z along the trajectory (midpoint rule,
/// so the single-point case lands mid-segment rather than on an endpoint).
pub fn multipoint_focals(traj: &Trajectory, count: usize) -> Result<Vec<(f64, f64)>> {
    if count == 0 {
        return Err(Error::InvalidConfig("focal count must be positive".into()));
    }
    let (z0, z1) = (traj.z_start(), traj.z_end());
    let step = (z1 - z0) / count as f64;
    (0..count)
        .map(|i| {
            let z = z0 + (i as f64 + 0.5) * step;
            Ok((traj.position(z)?, z))
        })
        .collect()
}

/// How the reactive baseline decides when to refocus.
#[derive(Debug, Clone, Copy)]
pub struct TrackingPolicy {
    /// Intensity threshold gamma that triggers a refocus.
    pub gamma: f64,
    /// Number of uniform-in-z receiver steps along the trajectory.
    pub steps: usize,
}

/// Outcome of a tracking walk.
#[derive(Debug, Clone)]
pub struct TrackingResult {
    /// Intensity seen by the receiver at each step, after any refocus.
    pub intensity: Vec<f64>,
    /// Step indices where a refocus fired.
    pub refocus_steps: Vec<usize>,
    /// Fraction of steps (arc-length weighted) at or above gamma *before*
    /// the refocus correction was applied.
    pub pre_refocus_reliability: f64,
}

impl TrackingResult {
    pub fn switch_count(&self) -> usize {
        self.refocus_steps.len()
    }
}

/// Reactive refocusing walk: the receiver moves along the trajectory; when
/// the served intensity drops below gamma the array refocuses on the
/// receiver's current position (one switch) and the walk continues.
pub fn tracking_run(
    traj: &Trajectory,
    cfg: &ApertureConfig,
    policy: &TrackingPolicy,
) -> Result<TrackingResult> {
    let samples = traj.sample_points(policy.steps)?;
    let initial = focus_weights((samples[0].x, samples[0].z), cfg)?;
    tracking_walk(&samples, initial, cfg, policy)
}

/// Same walk but starting from externally supplied weights (e.g. a shaped
/// profile) instead of a focus on the first sample.
pub fn tracking_run_with_weights(
    traj: &Trajectory,
    cfg: &ApertureConfig,
    policy: &TrackingPolicy,
    weights: &BeamWeights,
) -> Result<TrackingResult> {
    let samples = traj.sample_points(policy.steps)?;
    tracking_walk(&samples, weights.clone(), cfg, policy)
}

fn tracking_walk(
    samples: &[crate::trajectory::TrajectorySample],
    mut weights: BeamWeights,
    cfg: &ApertureConfig,
    policy: &TrackingPolicy,
) -> Result<TrackingResult> {
    if !(policy.gamma > 0.0) {
        return Err(Error::InvalidConfig("gamma must be positive".into()));
    }
    let mut intensity = Vec::with_capacity(samples.len());
    let mut refocus_steps = Vec::new();
    let mut good_weight = 0.0;
    let mut total_weight = 0.0;
    for (i, s) in samples.iter().enumerate() {
        let pre = nearfield::intensity((s.x, s.z), &weights, cfg)?;
        total_weight += s.arc_weight;
        if pre >= policy.gamma {
            good_weight += s.arc_weight;
            intensity.push(pre);
            continue;
        }
        // outage: refocus on the current receiver position
        weights = focus_weights((s.x, s.z), cfg)?;
        refocus_steps.push(i);
        let post = nearfield::intensity((s.x, s.z), &weights, cfg)?;
        if post < policy.gamma {
            return Err(Error::ThresholdUnattainable {
                gamma: policy.gamma,
                intensity: post,
                z: s.z,
            });
        }
        intensity.push(post);
    }
    Ok(TrackingResult {
        intensity,
        refocus_steps,
        pre_refocus_reliability: good_weight / total_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> ApertureConfig {
        ApertureConfig::half_wavelength(201).unwrap()
    }

    #[test]
    fn focus_weights_align_phases() {
        let cfg = cfg();
        let focal = (30.0, 150.0);
        let w = focus_weights(focal, &cfg).unwrap();
        let ch = nearfield::channel(focal, &cfg).unwrap();
        // conj(h_n) w_n must share one common phase for all n
        let ref_arg = (ch.coefficients()[0].conj() * w.coefficients()[0]).arg();
        for (h, c) in ch.coefficients().iter().zip(w.coefficients()) {
            let mut d = (h.conj() * c).arg() - ref_arg;
            d = (d + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
                - std::f64::consts::PI;
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn focus_beats_random_phases() {
        let cfg = cfg();
        let focal = (50.0, 120.0);
        let focused = focus_weights(focal, &cfg).unwrap();
        let phases: Vec<f64> = (0..201).map(|i| (i as f64 * 12.9898).sin() * 43758.5453 % 6.28).collect();
        let rough = cfg.weights_from_phases(&phases).unwrap();
        let i_f = nearfield::intensity(focal, &focused, &cfg).unwrap();
        let i_r = nearfield::intensity(focal, &rough, &cfg).unwrap();
        assert!(i_f > 5.0 * i_r, "focused {i_f} vs rough {i_r}");
    }

    #[test]
    fn multipoint_single_matches_focus() {
        let cfg = cfg();
        let focal = (10.0, 90.0);
        let single = multipoint_weights(&[focal], &cfg, false).unwrap();
        let focus = focus_weights(focal, &cfg).unwrap();
        for (a, b) in single.coefficients().iter().zip(focus.coefficients()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn multipoint_unit_power() {
        let cfg = cfg();
        let focals = [(0.0, 80.0), (20.0, 120.0), (40.0, 160.0)];
        let w = multipoint_weights(&focals, &cfg, false).unwrap();
        let p: f64 = w.coefficients().iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn multipoint_phase_only_unit_modulus() {
        let cfg = cfg();
        let focals = [(0.0, 80.0), (40.0, 160.0)];
        let w = multipoint_weights(&focals, &cfg, true).unwrap();
        let m = 1.0 / (201f64).sqrt();
        for c in w.coefficients() {
            assert_relative_eq!(c.norm(), m, epsilon = 1e-12);
        }
    }

    #[test]
    fn multipoint_dilutes_peak() {
        let cfg = cfg();
        let traj = Trajectory::constant(25.0, 60.0, 260.0).unwrap();
        let f1 = multipoint_focals(&traj, 1).unwrap();
        let f8 = multipoint_focals(&traj, 8).unwrap();
        let w1 = multipoint_weights(&f1, &cfg, false).unwrap();
        let w8 = multipoint_weights(&f8, &cfg, false).unwrap();
        let peak = |w: &BeamWeights| -> f64 {
            nearfield::intensity_along_trajectory(w, &cfg, &traj, 400)
                .unwrap()
                .iter()
                .map(|s| s.intensity)
                .fold(0.0, f64::max)
        };
        assert!(peak(&w8) < peak(&w1));
    }

    #[test]
    fn multipoint_focals_midpoints() {
        let traj = Trajectory::constant(10.0, 0.0, 100.0).unwrap();
        let f = multipoint_focals(&traj, 4).unwrap();
        let zs: Vec<f64> = f.iter().map(|p| p.1).collect();
        assert_eq!(zs, vec![12.5, 37.5, 62.5, 87.5]);
        assert!(f.iter().all(|p| p.0 == 10.0));
    }

    #[test]
    fn tracking_no_switch_when_easy() {
        let cfg = cfg();
        let traj = Trajectory::constant(25.0, 140.0, 150.0).unwrap();
        let res = tracking_run(&traj, &cfg, &TrackingPolicy { gamma: 1e-4, steps: 64 }).unwrap();
        assert_eq!(res.switch_count(), 0);
        assert_relative_eq!(res.pre_refocus_reliability, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tracking_switches_on_long_segment() {
        let cfg = cfg();
        let traj = Trajectory::constant(25.0, 60.0, 400.0).unwrap();
        let res = tracking_run(&traj, &cfg, &TrackingPolicy { gamma: 0.03, steps: 256 }).unwrap();
        assert!(res.switch_count() >= 1, "expected at least one refocus");
        // every post-refocus step meets the threshold by construction
        for &i in &res.refocus_steps {
            assert!(res.intensity[i] >= 0.03);
        }
        assert!(res.pre_refocus_reliability < 1.0);
    }

    #[test]
    fn tracking_unattainable_gamma_errors() {
        let cfg = ApertureConfig::half_wavelength(5).unwrap();
        let traj = Trajectory::constant(25.0, 60.0, 120.0).unwrap();
        let err = tracking_run(&traj, &cfg, &TrackingPolicy { gamma: 10.0, steps: 16 });
        assert!(matches!(err, Err(Error::ThresholdUnattainable { .. })));
    }
}
