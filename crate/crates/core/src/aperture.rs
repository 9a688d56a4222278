//! Uniform linear array geometry and constant-amplitude beamforming weights.
//!
//! All lengths are wavelength-normalized (lambda = 1, k0 = 2*pi). The array
//! lies on the x-axis spanning [0, D] with D = (N-1) * spacing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Array geometry. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureConfig {
    num_elements: usize,
    spacing: f64,
    /// Physical wavelength carried as metadata only; the simulation is
    /// wavelength-normalized so this is 1 unless a caller overrides it.
    wavelength: f64,
}

impl ApertureConfig {
    pub const DEFAULT_SPACING: f64 = 0.5;

    pub fn new(num_elements: usize, spacing: f64) -> Result<Self> {
        if num_elements < 1 {
            return Err(Error::InvalidConfig("num_elements must be >= 1".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "spacing must be positive and finite, got {spacing}"
            )));
        }
        Ok(Self {
            num_elements,
            spacing,
            wavelength: 1.0,
        })
    }

    /// Half-wavelength spaced array with `num_elements` elements.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, Self::DEFAULT_SPACING)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength_metadata(&self) -> f64 {
        self.wavelength
    }

    /// Aperture length D = (N-1) * spacing.
    pub fn aperture_length(&self) -> f64 {
        (self.num_elements - 1) as f64 * self.spacing
    }

    /// Wave number k0 = 2*pi in normalized units.
    pub fn wave_number(&self) -> f64 {
        2.0 * std::f64::consts::PI
    }

    /// Element x-coordinates [0, spacing, ..., D], strictly increasing.
    pub fn element_positions(&self) -> Vec<f64> {
        (0..self.num_elements)
            .map(|n| n as f64 * self.spacing)
            .collect()
    }

    /// x-coordinate of element `n` (0-based).
    pub fn element_position(&self, n: usize) -> f64 {
        n as f64 * self.spacing
    }

    /// Constant-amplitude weights w_n = exp(j * phi_n) / sqrt(N).
    pub fn weights_from_phases(&self, phases: &[f64]) -> Result<BeamWeights> {
        if phases.len() != self.num_elements {
            return Err(Error::InvalidConfig(format!(
                "phase vector length {} does not match {} elements",
                phases.len(),
                self.num_elements
            )));
        }
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("non-finite phase {bad}")));
        }
        let amp = 1.0 / (self.num_elements as f64).sqrt();
        let coefficients = phases
            .iter()
            .map(|&p| Complex64::from_polar(amp, p))
            .collect();
        Ok(BeamWeights {
            coefficients,
            mode: ModulusMode::UnitModulus,
        })
    }
}

/// Amplitude constraint satisfied by a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusMode {
    /// Every coefficient has magnitude 1/sqrt(N) (analog phase shifters).
    UnitModulus,
    /// Only the total norm ||w||_2 = 1 is constrained (superposed beams).
    UnitNorm,
}

/// Beamforming weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    coefficients: Vec<Complex64>,
    mode: ModulusMode,
}

impl BeamWeights {
    /// Builds a unit-norm weight vector, rescaling the input.
    pub fn unit_norm(coefficients: Vec<Complex64>) -> Result<Self> {
        let norm = coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-9 {
            return Err(Error::ZeroSumCancellation { norm });
        }
        Ok(Self {
            coefficients: coefficients.iter().map(|c| c / norm).collect(),
            mode: ModulusMode::UnitNorm,
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn mode(&self) -> ModulusMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Per-element phases in (-pi, pi].
    pub fn phases(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.arg()).collect()
    }

    /// FNV-1a hash of the coefficient bytes, used as grid metadata.
    pub fn content_hash(&self) -> u64 {
        let mut h = crate::fnv::Fnv1a::new();
        for c in &self.coefficients {
            h.write_f64(c.re);
            h.write_f64(c.im);
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn element_positions_single() {
        let cfg = ApertureConfig::half_wavelength(1).unwrap();
        assert_eq!(cfg.element_positions(), vec![0.0]);
    }

    #[test]
    fn element_positions_progression() {
        let cfg = ApertureConfig::half_wavelength(3).unwrap();
        assert_eq!(cfg.element_positions(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn element_positions_large_aperture() {
        let cfg = ApertureConfig::half_wavelength(1001).unwrap();
        let pos = cfg.element_positions();
        assert_eq!(pos.len(), 1001);
        assert_relative_eq!(*pos.last().unwrap(), 500.0);
        assert_relative_eq!(cfg.aperture_length(), 500.0);
    }

    #[test]
    fn weights_zero_phase() {
        let cfg = ApertureConfig::half_wavelength(2).unwrap();
        let w = cfg.weights_from_phases(&[0.0, 0.0]).unwrap();
        let amp = 1.0 / 2f64.sqrt();
        for c in w.coefficients() {
            assert_relative_eq!(c.re, amp, epsilon = 1e-15);
            assert_relative_eq!(c.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn weights_half_turn() {
        let cfg = ApertureConfig::half_wavelength(2).unwrap();
        let w = cfg
            .weights_from_phases(&[0.0, std::f64::consts::PI])
            .unwrap();
        let amp = 1.0 / 2f64.sqrt();
        assert_relative_eq!(w.coefficients()[0].re, amp, epsilon = 1e-15);
        assert_relative_eq!(w.coefficients()[1].re, -amp, epsilon = 1e-15);
        assert!(w.coefficients()[1].im.abs() < 1e-15);
    }

    #[test]
    fn weights_quarter_turn() {
        use std::f64::consts::PI;
        let cfg = ApertureConfig::half_wavelength(4).unwrap();
        let w = cfg
            .weights_from_phases(&[0.0, PI / 2.0, PI, 1.5 * PI])
            .unwrap();
        let expect = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, -0.5),
        ];
        for (c, e) in w.coefficients().iter().zip(expect) {
            assert!((c - e).norm() < 1e-15);
        }
    }

    #[test]
    fn weights_length_mismatch() {
        let cfg = ApertureConfig::half_wavelength(3).unwrap();
        assert!(cfg.weights_from_phases(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn weights_non_finite_phase() {
        let cfg = ApertureConfig::half_wavelength(2).unwrap();
        assert!(cfg.weights_from_phases(&[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn total_power_normalized() {
        let cfg = ApertureConfig::half_wavelength(17).unwrap();
        let phases: Vec<f64> = (0..17).map(|i| (i as f64) * 0.37 - 2.0).collect();
        let w = cfg.weights_from_phases(&phases).unwrap();
        let power: f64 = w.coefficients().iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(power, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_wrap_invariance() {
        use std::f64::consts::TAU;
        let cfg = ApertureConfig::half_wavelength(5).unwrap();
        let phases: Vec<f64> = (0..5).map(|i| i as f64 * 0.91).collect();
        let shifted: Vec<f64> = phases.iter().map(|p| p + TAU).collect();
        let a = cfg.weights_from_phases(&phases).unwrap();
        let b = cfg.weights_from_phases(&shifted).unwrap();
        for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(ApertureConfig::new(0, 0.5).is_err());
        assert!(ApertureConfig::new(4, 0.0).is_err());
        assert!(ApertureConfig::new(4, -0.5).is_err());
        assert!(ApertureConfig::new(4, f64::INFINITY).is_err());
    }
}
