//! CSV and manifest writers.
//!
//! Numbers are printed with Rust's shortest round-trip formatting, so equal
//! results always produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::channel::qpsk_ber_analytic;
use crate::clipfilter::Chain;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{cases, format_cr, BerCurve, BerReport, CcdfReport, Case};
use crate::rng::ALGORITHM;

/// Eb/N0 at which the summary reports BER.
pub const SUMMARY_EBN0_DB: f64 = 6.0;

pub fn ccdf_file_name(case: &Case) -> String {
    format!("ccdf_{}.csv", case.label())
}

pub fn ber_file_name(case: &Case) -> String {
    format!("ber_{}.csv", case.label())
}

pub fn ber_csv(curve: &BerCurve) -> String {
    let mut out = String::from("ebn0_db,ber,errors,bits\n");
    for p in &curve.points {
        let _ = writeln!(out, "{},{},{},{}", p.ebn0_db, p.ber(), p.errors, p.bits);
    }
    out
}

pub fn analytic_csv(ebn0_list: &[f64]) -> String {
    let mut out = String::from("ebn0_db,ber\n");
    for &e in ebn0_list {
        let _ = writeln!(out, "{e},{}", qpsk_ber_analytic(e));
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per (chain, CR): PAPR at CCDF 0.1 and BER at 6 dB, each empty
/// when not measured.
pub fn summary_csv(cfg: &ExperimentConfig, ccdf: Option<&CcdfReport>, ber: Option<&BerReport>) -> String {
    let mut out = String::from("chain,cr,papr_at_ccdf_0p1_db,ber_at_6db\n");
    for case in cases(cfg) {
        let papr = ccdf.and_then(|r| r.get(case.chain, case.cr)).and_then(|r| r.crossing_db);
        let ber6 = ber
            .and_then(|r| r.get(case.chain, case.cr))
            .and_then(|c| c.at(SUMMARY_EBN0_DB))
            .map(|p| p.ber());
        let cr = case.cr.map(format_cr).unwrap_or_default();
        let _ = writeln!(out, "{},{cr},{},{}", case.chain, opt(papr), opt(ber6));
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    rng: &'static str,
    sample_rate_hz: f64,
    block_len: usize,
    unclipped_rms: Option<f64>,
    clip_levels: Vec<(String, f64)>,
    config: &'a ExperimentConfig,
    files: &'a [String],
}

fn write(dir: &Path, name: &str, contents: &str, files: &mut Vec<String>) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    files.push(name.to_string());
    Ok(())
}

/// Writes every result file plus `manifest.json` into `cfg.output_dir` and
/// returns the written paths.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    command: &str,
    ccdf: Option<&CcdfReport>,
    ber: Option<&BerReport>,
) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();

    if let Some(report) = ccdf {
        for r in &report.results {
            write(dir, &ccdf_file_name(&r.case), &r.curve.to_csv(), &mut files)?;
        }
    }
    if let Some(report) = ber {
        for c in &report.curves {
            write(dir, &ber_file_name(&c.case), &ber_csv(c), &mut files)?;
        }
        write(dir, "ber_analytic.csv", &analytic_csv(&cfg.ebn0_list), &mut files)?;
    }
    write(dir, "summary.csv", &summary_csv(cfg, ccdf, ber), &mut files)?;

    let sigma = ccdf.map(|r| r.sigma).or(ber.map(|r| r.sigma));
    let clip_levels = match sigma {
        Some(s) => cases(cfg)
            .iter()
            .filter(|c| c.chain != Chain::Unclipped)
            .filter_map(|c| c.cr.map(|cr| (c.label(), cr * s)))
            .collect(),
        None => Vec::new(),
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        rng: ALGORITHM,
        sample_rate_hz: cfg.ofdm.sample_rate(),
        block_len: cfg.ofdm.block_len(),
        unclipped_rms: sigma,
        clip_levels,
        config: cfg,
        files: &files,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.json"), json + "\n")?;
    files.push("manifest.json".into());

    Ok(files.iter().map(|f| dir.join(f)).collect())
}
