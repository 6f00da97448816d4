//! Experiment configuration, Monte Carlo drivers, CSV output and the CLI.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod output;

use std::path::PathBuf;

pub use cli::{parse_cli, CliError, Invocation, Mode};
pub use config::ExperimentConfig;
pub use experiment::{
    run_ber_experiment, run_ccdf_experiment, BerCurve, BerPoint, BerReport, Case, CcdfReport, CcdfResult,
};

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub ccdf: Option<CcdfReport>,
    pub ber: Option<BerReport>,
    pub files: Vec<PathBuf>,
}

/// Runs the selected experiments on the current rayon pool and writes
/// their outputs.
pub fn run(cfg: &ExperimentConfig, mode: Mode) -> Result<RunOutput> {
    let ccdf = match mode {
        Mode::Ccdf | Mode::All => Some(run_ccdf_experiment(cfg)?),
        Mode::Ber => None,
    };
    let ber = match mode {
        Mode::Ber | Mode::All => Some(run_ber_experiment(cfg)?),
        Mode::Ccdf => None,
    };
    let files = output::write_outputs(cfg, mode.name(), ccdf.as_ref(), ber.as_ref())?;
    Ok(RunOutput { ccdf, ber, files })
}
