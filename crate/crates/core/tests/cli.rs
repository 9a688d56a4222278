//! End-to-end tests of the `beamshape` binary: exit codes, output files and
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn beamshape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamshape"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SMALL_SCENARIO: &str = r#"
schema_version = 1
name = "cli-smoke"

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
nx = 40
nz = 30

[reliability]
gammas = [0.001, 0.01, 0.1]
samples = 300

[compare]
gammas = [0.01]
samples = 300
multipoint_counts = [3]
"#;

fn write_scenario(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn design_subcommand_writes_outputs() {
    let dir = tempdir().unwrap();
    let sc = write_scenario(dir.path(), SMALL_SCENARIO);
    let out = dir.path().join("out");
    let res = beamshape(&[
        "design",
        "--scenario",
        sc.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("phase_profile.csv").exists());
    assert!(out.join("element_phases.csv").exists());
    // the file list is echoed on stdout
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("element_phases.csv"));
}

#[test]
fn all_subcommands_succeed() {
    let dir = tempdir().unwrap();
    let sc = write_scenario(dir.path(), SMALL_SCENARIO);
    for cmd in ["design", "fieldmap", "reliability", "compare"] {
        let out = dir.path().join(cmd);
        let res = beamshape(&[
            cmd,
            "--scenario",
            sc.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            res.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
}

#[test]
fn missing_scenario_is_io_failure() {
    let res = beamshape(&["design", "--scenario", "/nonexistent/nope.toml"]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn invalid_scenario_exits_2() {
    let dir = tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        &SMALL_SCENARIO.replace("schema_version = 1", "schema_version = 99"),
    );
    let res = beamshape(&["design", "--scenario", sc.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("schema_version"));
}

#[test]
fn validation_error_exits_2() {
    // zero elements is rejected by aperture validation
    let dir = tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        &SMALL_SCENARIO.replace("num_elements = 101", "num_elements = 0"),
    );
    let res = beamshape(&["design", "--scenario", sc.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn fieldmap_without_section_fails_cleanly() {
    let dir = tempdir().unwrap();
    let stripped: String = {
        let s = SMALL_SCENARIO;
        let cut = s.find("[fieldmap]").unwrap();
        let rest = &s[cut..];
        let next = rest.find("[reliability]").unwrap();
        format!("{}{}", &s[..cut], &rest[next..])
    };
    let sc = write_scenario(dir.path(), &stripped);
    let res = beamshape(&["fieldmap", "--scenario", sc.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("fieldmap"));
}

#[test]
fn fieldmap_deterministic_across_thread_counts() {
    let dir = tempdir().unwrap();
    let sc = write_scenario(dir.path(), SMALL_SCENARIO);
    let mut bytes = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = dir.path().join(format!("out{threads}"));
        let res = beamshape(&[
            "fieldmap",
            "--scenario",
            sc.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(res.status.success());
        bytes.push((
            std::fs::read(out.join("fieldmap.csv")).unwrap(),
            std::fs::read(out.join("fieldmap.pgm")).unwrap(),
            std::fs::read(out.join("ridge.csv")).unwrap(),
        ));
    }
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[1], bytes[2]);
}

#[test]
fn repeated_runs_byte_identical() {
    let dir = tempdir().unwrap();
    let sc = write_scenario(dir.path(), SMALL_SCENARIO);
    let mut runs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}"));
        let res = beamshape(&[
            "reliability",
            "--scenario",
            sc.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
        runs.push(std::fs::read(out.join("reliability.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn shipped_scenarios_parse_and_design() {
    // every scenario in scenarios/ must at least run the design pipeline
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(&scenarios).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        seen += 1;
        let dir = tempdir().unwrap();
        let res = beamshape(&[
            "design",
            "--scenario",
            path.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(
            res.status.success(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&res.stderr)
        );
    }
    assert!(seen >= 4, "expected shipped scenarios, found {seen}");
}
