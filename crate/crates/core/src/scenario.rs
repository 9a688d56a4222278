//! Declarative scenario files (TOML) and the run pipelines behind the CLI
//! subcommands. Scenarios pin every physical and numerical parameter so a
//! run is reproducible from the file alone.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aperture::{ApertureConfig, BeamWeights};
use crate::baselines::{self, TrackingPolicy};
use crate::error::{Error, Result};
use crate::metrics;
use crate::nearfield;
use crate::phase::{self, DesignOptions, PadMode, PhaseProfile};
use crate::trajectory::{InterpolationOrder, Orientation, TabulatedCurve, Trajectory, TrajectoryShape};

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub aperture: ApertureSpec,
    pub trajectory: TrajectorySpec,
    pub design: DesignSpec,
    #[serde(default)]
    pub fieldmap: Option<FieldmapSpec>,
    #[serde(default)]
    pub reliability: Option<ReliabilitySpec>,
    #[serde(default)]
    pub compare: Option<CompareSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureSpec {
    pub num_elements: usize,
    pub spacing: f64,
}

// no deny_unknown_fields here: serde cannot combine it with #[serde(flatten)]
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub z_start: f64,
    pub z_end: f64,
    #[serde(flatten)]
    pub shape: ShapeSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    Constant {
        x0: f64,
    },
    Linear {
        slope: f64,
        intercept: f64,
    },
    Parabolic {
        curvature: f64,
        #[serde(default)]
        apex_x: f64,
        orientation: OrientationSpec,
    },
    Circular {
        radius: f64,
        center: [f64; 2],
    },
    Tabulated {
        path: PathBuf,
        #[serde(default = "default_order")]
        order: u32,
    },
}

fn default_order() -> u32 {
    3
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSpec {
    TowardPositiveX,
    TowardNegativeX,
}

impl From<OrientationSpec> for Orientation {
    fn from(o: OrientationSpec) -> Self {
        match o {
            OrientationSpec::TowardPositiveX => Orientation::TowardPositiveX,
            OrientationSpec::TowardNegativeX => Orientation::TowardNegativeX,
        }
    }
}

/// How the transmit weights are produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum DesignSpec {
    /// Numeric caustic designer driven by the scenario trajectory.
    Numeric {
        #[serde(default = "default_spw")]
        samples_per_wavelength: f64,
        #[serde(default)]
        strict_padding: bool,
    },
    /// Closed-form circular-caustic profile.
    Circular {
        radius: f64,
        #[serde(default = "default_spw")]
        samples_per_wavelength: f64,
    },
    /// Closed-form parabolic-caustic profile.
    Parabolic {
        curvature: f64,
        #[serde(default = "default_spw")]
        samples_per_wavelength: f64,
    },
    /// Single-point focusing baseline.
    Focus { focal: [f64; 2] },
    /// Multipoint superposition baseline with K focals on the trajectory.
    Multipoint {
        count: usize,
        #[serde(default)]
        phase_only: bool,
    },
}

fn default_spw() -> f64 {
    8.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldmapSpec {
    pub x_range: [f64; 2],
    pub z_range: [f64; 2],
    pub nx: usize,
    pub nz: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReliabilitySpec {
    pub gammas: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    2000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    /// Thresholds at which all strategies are compared.
    pub gammas: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Focal counts for the multipoint baseline sweep.
    #[serde(default)]
    pub multipoint_counts: Vec<usize>,
    /// Gamma for the reactive tracking walk (defaults to the first entry of
    /// `gammas`).
    #[serde(default)]
    pub tracking_gamma: Option<f64>,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let sc: Scenario =
            toml::from_str(&text).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
        if sc.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                sc.schema_version
            )));
        }
        sc.validate()?;
        Ok(sc)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Scenario("scenario name must not be empty".into()));
        }
        Ok(())
    }

    pub fn aperture(&self) -> Result<ApertureConfig> {
        ApertureConfig::new(self.aperture.num_elements, self.aperture.spacing)
    }

    pub fn trajectory(&self) -> Result<Trajectory> {
        let shape = match &self.trajectory.shape {
            ShapeSpec::Constant { x0 } => TrajectoryShape::Constant { x0: *x0 },
            ShapeSpec::Linear { slope, intercept } => TrajectoryShape::Linear {
                slope: *slope,
                intercept: *intercept,
            },
            ShapeSpec::Parabolic {
                curvature,
                apex_x,
                orientation,
            } => TrajectoryShape::Parabolic {
                curvature: *curvature,
                apex_x: *apex_x,
                orientation: (*orientation).into(),
            },
            ShapeSpec::Circular { radius, center } => TrajectoryShape::Circular {
                radius: *radius,
                center: (center[0], center[1]),
            },
            ShapeSpec::Tabulated { path, order } => {
                let order = match order {
                    1 => InterpolationOrder::Linear,
                    3 => InterpolationOrder::Cubic,
                    o => {
                        return Err(Error::Scenario(format!(
                            "tabulated order must be 1 or 3, got {o}"
                        )))
                    }
                };
                TrajectoryShape::Tabulated(TabulatedCurve::from_csv(path, order)?)
            }
        };
        Trajectory::new(shape, self.trajectory.z_start, self.trajectory.z_end)
    }

    /// Phase profile for the designed methods (None for focus/multipoint,
    /// whose weights are not derived from a continuous profile).
    pub fn phase_profile(&self, cfg: &ApertureConfig) -> Result<Option<PhaseProfile>> {
        match &self.design {
            DesignSpec::Numeric {
                samples_per_wavelength,
                strict_padding,
            } => {
                let opts = DesignOptions {
                    samples_per_wavelength: *samples_per_wavelength,
                    pad_mode: if *strict_padding {
                        PadMode::Strict
                    } else {
                        PadMode::Zero
                    },
                };
                Ok(Some(phase::design_numeric(&self.trajectory()?, cfg, &opts)?))
            }
            DesignSpec::Circular {
                radius,
                samples_per_wavelength,
            } => {
                let opts = DesignOptions {
                    samples_per_wavelength: *samples_per_wavelength,
                    pad_mode: PadMode::Zero,
                };
                Ok(Some(phase::design_circular(*radius, cfg, &opts)?))
            }
            DesignSpec::Parabolic {
                curvature,
                samples_per_wavelength,
            } => {
                let opts = DesignOptions {
                    samples_per_wavelength: *samples_per_wavelength,
                    pad_mode: PadMode::Zero,
                };
                Ok(Some(phase::design_parabolic(*curvature, cfg, &opts)?))
            }
            DesignSpec::Focus { .. } | DesignSpec::Multipoint { .. } => Ok(None),
        }
    }

    /// Transmit weights for the scenario's design method.
    pub fn weights(&self, cfg: &ApertureConfig) -> Result<BeamWeights> {
        match &self.design {
            DesignSpec::Focus { focal } => baselines::focus_weights((focal[0], focal[1]), cfg),
            DesignSpec::Multipoint { count, phase_only } => {
                let focals = baselines::multipoint_focals(&self.trajectory()?, *count)?;
                baselines::multipoint_weights(&focals, cfg, *phase_only)
            }
            _ => {
                let profile = self.phase_profile(cfg)?.expect("designed methods yield a profile");
                cfg.weights_from_phases(&profile.element_phases(cfg)?)
            }
        }
    }
}

/// Formats a float with enough digits to round-trip (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `design` pipeline: continuous profile (if any) and element phases.
pub fn run_design(sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let cfg = sc.aperture()?;
    let weights = sc.weights(&cfg)?;
    let mut written = Vec::new();

    if let Some(profile) = sc.phase_profile(&cfg)? {
        let mut csv = String::from("xi,phi\n");
        for (xi, phi) in profile.aperture_samples() {
            let _ = writeln!(csv, "{},{}", fmt_f64(xi), fmt_f64(phi));
        }
        let p = out_dir.join("phase_profile.csv");
        write_atomic(&p, csv.as_bytes())?;
        written.push(p);
    }

    let mut csv = String::from("element,xi,phase\n");
    for (n, phase) in weights.phases().iter().enumerate() {
        let _ = writeln!(csv, "{n},{},{}", fmt_f64(cfg.element_position(n)), fmt_f64(*phase));
    }
    let p = out_dir.join("element_phases.csv");
    write_atomic(&p, csv.as_bytes())?;
    written.push(p);
    Ok(written)
}

/// `fieldmap` pipeline: intensity grid (CSV + PGM preview) and its ridge.
pub fn run_fieldmap(sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = sc
        .fieldmap
        .as_ref()
        .ok_or_else(|| Error::Scenario("scenario has no [fieldmap] section".into()))?;
    let cfg = sc.aperture()?;
    let weights = sc.weights(&cfg)?;
    let grid = nearfield::field_grid(
        &weights,
        &cfg,
        (spec.x_range[0], spec.x_range[1]),
        (spec.z_range[0], spec.z_range[1]),
        spec.nx,
        spec.nz,
    )?;

    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# config_hash={:016x} weights_hash={:016x}",
        grid.config_hash, grid.weights_hash
    );
    csv.push_str("x,z,intensity\n");
    let xs = grid.x_coords();
    let zs = grid.z_coords();
    for (iz, &z) in zs.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{}", fmt_f64(x), fmt_f64(z), fmt_f64(grid.at(ix, iz)));
        }
    }
    let mut written = Vec::new();
    let p = out_dir.join("fieldmap.csv");
    write_atomic(&p, csv.as_bytes())?;
    written.push(p);

    let p = out_dir.join("fieldmap.pgm");
    write_atomic(&p, &grid_to_pgm(&grid))?;
    written.push(p);

    let ridge = metrics::ridge_trace(&grid);
    let mut csv = String::from("z,x_ridge,peak_intensity\n");
    for i in 0..ridge.z.len() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            fmt_f64(ridge.z[i]),
            fmt_f64(ridge.x[i]),
            fmt_f64(ridge.peak_intensity[i])
        );
    }
    let p = out_dir.join("ridge.csv");
    write_atomic(&p, csv.as_bytes())?;
    written.push(p);
    Ok(written)
}

/// 8-bit PGM preview, normalized to the grid maximum (row order: z increasing
/// downward).
fn grid_to_pgm(grid: &nearfield::FieldGrid) -> Vec<u8> {
    let peak = grid.max_intensity().max(f64::MIN_POSITIVE);
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.nz).into_bytes();
    for iz in 0..grid.nz {
        for &v in grid.row(iz) {
            out.push(((v / peak).clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    out
}

/// `reliability` pipeline: threshold sweep for the scenario design.
pub fn run_reliability(sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = sc
        .reliability
        .as_ref()
        .ok_or_else(|| Error::Scenario("scenario has no [reliability] section".into()))?;
    let cfg = sc.aperture()?;
    let traj = sc.trajectory()?;
    let weights = sc.weights(&cfg)?;
    let curve = metrics::reliability_sweep(&weights, &cfg, &traj, &spec.gammas, spec.samples)?;

    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# min_intensity={} max_intensity={}",
        fmt_f64(curve.min_intensity),
        fmt_f64(curve.max_intensity)
    );
    csv.push_str("gamma,reliability\n");
    for (g, r) in curve.gamma.iter().zip(&curve.reliability) {
        let _ = writeln!(csv, "{},{}", fmt_f64(*g), fmt_f64(*r));
    }
    let p = out_dir.join("reliability.csv");
    write_atomic(&p, csv.as_bytes())?;
    Ok(vec![p])
}

/// One row of the strategy comparison.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub strategy: String,
    pub gamma: f64,
    pub reliability: f64,
    pub peak_intensity: f64,
    pub switches: usize,
}

/// `compare` pipeline: designed weights vs focusing, multipoint sweep and the
/// reactive tracking walk, at each requested threshold.
pub fn run_compare(sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = compare_rows(sc)?;
    let mut csv = String::from("strategy,gamma,reliability,peak_intensity,switches\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.strategy,
            fmt_f64(r.gamma),
            fmt_f64(r.reliability),
            fmt_f64(r.peak_intensity),
            r.switches
        );
    }
    let p = out_dir.join("compare.csv");
    write_atomic(&p, csv.as_bytes())?;
    Ok(vec![p])
}

pub fn compare_rows(sc: &Scenario) -> Result<Vec<CompareRow>> {
    let spec = sc
        .compare
        .as_ref()
        .ok_or_else(|| Error::Scenario("scenario has no [compare] section".into()))?;
    let cfg = sc.aperture()?;
    let traj = sc.trajectory()?;
    let mut rows = Vec::new();

    let designed = sc.weights(&cfg)?;
    let focal = baselines::multipoint_focals(&traj, 1)?[0];
    let focus = baselines::focus_weights(focal, &cfg)?;

    let strategies: Vec<(String, BeamWeights)> = {
        let mut v = vec![
            ("designed".to_string(), designed),
            ("focus".to_string(), focus),
        ];
        for &k in &spec.multipoint_counts {
            let focals = baselines::multipoint_focals(&traj, k)?;
            v.push((
                format!("multipoint_{k}"),
                baselines::multipoint_weights(&focals, &cfg, false)?,
            ));
        }
        v
    };

    for (name, w) in &strategies {
        let samples = nearfield::intensity_along_trajectory(w, &cfg, &traj, spec.samples)?;
        let profile: Vec<f64> = samples.iter().map(|s| s.intensity).collect();
        let peak = profile.iter().copied().fold(0.0, f64::max);
        for &g in &spec.gammas {
            rows.push(CompareRow {
                strategy: name.clone(),
                gamma: g,
                reliability: metrics::spatial_outage_reliability(&samples, g)?,
                peak_intensity: peak,
                switches: metrics::switch_count(&profile, g),
            });
        }
    }

    // reactive tracking walk at a single gamma
    let tg = spec
        .tracking_gamma
        .or_else(|| spec.gammas.first().copied())
        .ok_or_else(|| Error::Scenario("compare needs at least one gamma".into()))?;
    let tr = baselines::tracking_run(
        &traj,
        &cfg,
        &TrackingPolicy {
            gamma: tg,
            steps: spec.samples,
        },
    )?;
    let peak = tr.intensity.iter().copied().fold(0.0, f64::max);
    rows.push(CompareRow {
        strategy: "tracking".to_string(),
        gamma: tg,
        reliability: tr.pre_refocus_reliability,
        peak_intensity: peak,
        switches: tr.switch_count(),
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn toml_parabolic() -> String {
        r#"
schema_version = 1
name = "parabolic-demo"

[aperture]
num_elements = 101
spacing = 0.5

[trajectory]
kind = "parabolic"
curvature = 0.01
apex_x = 0.0
orientation = "toward_negative_x"
z_start = 20.0
z_end = 60.0

[design]
method = "parabolic"
curvature = 0.01

[fieldmap]
x_range = [-60.0, 20.0]
z_range = [10.0, 70.0]
nx = 33
nz = 17

[reliability]
gammas = [0.001, 0.01, 0.1]
samples = 200

[compare]
gammas = [0.01]
samples = 200
multipoint_counts = [2]
"#
        .to_string()
    }

    fn load(text: &str) -> Scenario {
        let dir = tempdir().unwrap();
        let p = dir.path().join("s.toml");
        std::fs::write(&p, text).unwrap();
        Scenario::from_path(&p).unwrap()
    }

    #[test]
    fn round_trip_parse() {
        let sc = load(&toml_parabolic());
        assert_eq!(sc.name, "parabolic-demo");
        assert!(matches!(sc.design, DesignSpec::Parabolic { curvature, .. } if curvature == 0.01));
        let cfg = sc.aperture().unwrap();
        assert_eq!(cfg.num_elements(), 101);
        let traj = sc.trajectory().unwrap();
        assert_eq!(traj.z_start(), 20.0);
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let text = toml_parabolic().replace("schema_version = 1", "schema_version = 7");
        let dir = tempdir().unwrap();
        let p = dir.path().join("s.toml");
        std::fs::write(&p, text).unwrap();
        let err = Scenario::from_path(&p).unwrap_err();
        assert!(matches!(err, Error::Scenario(_)));
    }

    #[test]
    fn rejects_unknown_field() {
        // top-level key, before the first table header
        let text = toml_parabolic().replace(
            "name = \"parabolic-demo\"",
            "name = \"parabolic-demo\"\nmystery = 4",
        );
        let dir = tempdir().unwrap();
        let p = dir.path().join("s.toml");
        std::fs::write(&p, text).unwrap();
        assert!(Scenario::from_path(&p).is_err());
    }

    #[test]
    fn design_outputs_written() {
        let sc = load(&toml_parabolic());
        let dir = tempdir().unwrap();
        let files = run_design(&sc, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let phases = std::fs::read_to_string(dir.path().join("element_phases.csv")).unwrap();
        assert_eq!(phases.lines().count(), 102); // header + 101 elements
        assert!(phases.starts_with("element,xi,phase\n"));
    }

    #[test]
    fn fieldmap_outputs_written() {
        let sc = load(&toml_parabolic());
        let dir = tempdir().unwrap();
        run_fieldmap(&sc, dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("fieldmap.csv")).unwrap();
        // comment, header, then nx * nz rows
        assert_eq!(csv.lines().count(), 2 + 33 * 17);
        let pgm = std::fs::read(dir.path().join("fieldmap.pgm")).unwrap();
        assert!(pgm.starts_with(b"P5\n33 17\n255\n"));
        assert_eq!(pgm.len(), b"P5\n33 17\n255\n".len() + 33 * 17);
        let ridge = std::fs::read_to_string(dir.path().join("ridge.csv")).unwrap();
        assert_eq!(ridge.lines().count(), 1 + 17);
    }

    #[test]
    fn reliability_output_monotone() {
        let sc = load(&toml_parabolic());
        let dir = tempdir().unwrap();
        run_reliability(&sc, dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("reliability.csv")).unwrap();
        let vals: Vec<f64> = csv
            .lines()
            .skip(2)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(vals.len(), 3);
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
    }

    #[test]
    fn compare_includes_all_strategies() {
        let sc = load(&toml_parabolic());
        let rows = compare_rows(&sc).unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.strategy.as_str()).collect();
        assert!(names.contains(&"designed"));
        assert!(names.contains(&"focus"));
        assert!(names.contains(&"multipoint_2"));
        assert!(names.contains(&"tracking"));
    }

    #[test]
    fn csv_floats_round_trip() {
        for &v in &[0.1, 1.0 / 3.0, 6.02e23, -4.9e-324, 0.0] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {s}");
        }
    }
}
