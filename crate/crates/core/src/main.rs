use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use beamshape::error::ErrorKind;
use beamshape::scenario::{self, Scenario};

/// Near-field beam shaping toolkit: caustic phase design, field maps,
/// reliability sweeps and baseline comparisons, driven by TOML scenarios.
#[derive(Parser)]
#[command(name = "beamshape", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for result files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = one per core). Outputs are identical for any
    /// thread count.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the phase profile and element phases.
    Design(Common),
    /// Render the 2-D intensity map, PGM preview and intensity ridge.
    Fieldmap(Common),
    /// Sweep spatial outage reliability over thresholds.
    Reliability(Common),
    /// Compare the designed weights against focusing, multipoint and
    /// reactive tracking baselines.
    Compare(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Design(c)
            | Command::Fieldmap(c)
            | Command::Reliability(c)
            | Command::Compare(c) => c,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();

    if common.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    match run(&cli.command, common) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e.kind() {
                ErrorKind::Validation => ExitCode::from(2),
                ErrorKind::Numerical | ErrorKind::Io => ExitCode::from(3),
            }
        }
    }
}

fn run(cmd: &Command, common: &Common) -> beamshape::Result<Vec<PathBuf>> {
    let sc = Scenario::from_path(&common.scenario)?;
    match cmd {
        Command::Design(_) => scenario::run_design(&sc, &common.out),
        Command::Fieldmap(_) => scenario::run_fieldmap(&sc, &common.out),
        Command::Reliability(_) => scenario::run_reliability(&sc, &common.out),
        Command::Compare(_) => scenario::run_compare(&sc, &common.out),
    }
}
