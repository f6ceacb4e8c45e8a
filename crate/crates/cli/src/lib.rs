//! Library side of the `hdual` command: configuration, trajectory files and
//! the two subcommands, kept free of process handling so they can be tested
//! directly.

pub mod config;
pub mod trajectory_csv;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use heisenberg_dual::dynamics::{simulate, DynamicsError, Mode, Trajectory};
use heisenberg_dual::suites::{run_suites, Suite};
use thiserror::Error;

pub use config::{ConfigError, RawConfig, SimConfig, SimMode};
pub use trajectory_csv::{read_trajectory, write_trajectory, CsvError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("integration failed: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] CsvError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

/// Runs every suite, printing one line each; `EXIT_OK` iff all pass.
pub fn cmd_check(suites: &[Suite], out: &mut impl Write) -> io::Result<u8> {
    let reports = run_suites(suites);
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} suites, {} failed", reports.len(), failed)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

/// Builds the configuration from an optional file plus flag overrides.
pub fn load_config(file: Option<&Path>, flags: &RawConfig) -> Result<SimConfig, ConfigError> {
    let base = match file {
        Some(path) => RawConfig::read(path)?,
        None => RawConfig::new(),
    };
    SimConfig::from_raw(&base.merged(flags))
}

pub fn run_simulation(cfg: &SimConfig) -> Result<Trajectory, DynamicsError> {
    simulate(
        cfg.dynamics_mode(),
        &cfg.rep_params(),
        &cfg.hamiltonian,
        &cfg.observable,
        cfg.t_end,
        cfg.dt,
    )
}

/// Runs `cfg` and writes the trajectory to `out` (standard output if
/// `None`). The Planck constant in effect is always reported on `log`.
pub fn cmd_simulate(
    cfg: &SimConfig,
    out: Option<&Path>,
    log: &mut impl Write,
) -> Result<(), CliError> {
    let par = cfg.rep_params();
    // best effort: a closed log must not stop the run
    let _ = writeln!(log, "hbar = {} (h = {})", par.hbar(), par.h());
    let mode = match cfg.dynamics_mode() {
        Mode::Classical => "classical".to_string(),
        Mode::Quantum(convention) => format!("quantum, {convention} convention"),
    };
    let _ = writeln!(log, "mode = {mode}, t_end = {}, dt = {}", cfg.t_end, cfg.dt);
    let traj = run_simulation(cfg)?;
    match out {
        Some(path) => {
            let io_err = |source| CliError::Output {
                path: path.to_path_buf(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            write_trajectory(&mut w, &traj)?;
            w.flush().map_err(io_err)?;
        }
        None => write_trajectory(io::stdout().lock(), &traj)?,
    }
    Ok(())
}
