//! Monte Carlo drivers for the CCDF and BER experiments.
//!
//! Random draws are addressed by index, never by schedule: the bits of
//! symbol `i` come from stream `(seed, DATA, i)` and its noise at the `e`-th
//! Eb/N0 from `(seed, NOISE, e, i)`. Every chain and clipping ratio
//! therefore sees the same data and the same noise, and results do not
//! depend on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::add_awgn;
use crate::clipfilter::{Chain, ClipSpec, Transmitter};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::modem::{hamming, qpsk_demap_into, qpsk_map_slice, random_bits};
use crate::passband::{downconvert, PassbandSignal};
use crate::peak::{papr_db, CcdfAccumulator, CcdfCurve};
use crate::rng::Rng;

const DATA_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Symbols evaluated between stopping checks in the BER loop.
pub const BER_BATCH: usize = 128;

/// CCDF level at which PAPR values are compared.
pub const CCDF_READOUT: f64 = 0.1;

fn symbol_bits_for(seed: u64, index: usize, n: usize) -> Vec<u8> {
    let mut rng = Rng::for_trial(seed, &[DATA_STREAM, index as u64]);
    random_bits(n, &mut rng).expect("n > 0").bits().to_vec()
}

fn noise_rng(seed: u64, ebn0_index: usize, index: usize) -> Rng {
    Rng::for_trial(seed, &[NOISE_STREAM, ebn0_index as u64, index as u64])
}

/// Bits and unclipped passband block of symbol `index`.
pub fn unclipped_block(tx: &Transmitter, seed: u64, index: usize) -> Result<(Vec<u8>, PassbandSignal)> {
    let bits = symbol_bits_for(seed, index, tx.config().bits_per_block());
    let symbols = qpsk_map_slice(&bits)?;
    let xp = tx.unclipped(&symbols)?;
    Ok((bits, xp))
}

/// Run-wide RMS of the unclipped passband signal over symbols `0..count`.
pub fn unclipped_rms(tx: &Transmitter, seed: u64, count: usize) -> Result<f64> {
    let sums = (0..count)
        .into_par_iter()
        .map(|i| unclipped_block(tx, seed, i).map(|(_, xp)| xp.data().iter().map(|v| v * v).sum::<f64>()))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = sums.iter().sum();
    let samples = (count * tx.config().block_len()) as f64;
    Ok((total / samples).sqrt())
}

/// One (chain, clipping ratio) combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub chain: Chain,
    pub cr: Option<f64>,
}

impl Case {
    pub fn label(&self) -> String {
        match self.cr {
            Some(cr) => format!("{}_cr{}", self.chain, format_cr(cr)),
            None => self.chain.to_string(),
        }
    }

    fn clip(&self, sigma: f64) -> Result<Option<ClipSpec>> {
        self.cr.map(|cr| ClipSpec::from_rms(cr, sigma)).transpose()
    }
}

pub fn format_cr(cr: f64) -> String {
    format!("{cr:.2}")
}

pub fn cases(cfg: &ExperimentConfig) -> Vec<Case> {
    cfg.chains
        .iter()
        .flat_map(|&chain| cfg.crs_for(chain).into_iter().map(move |cr| Case { chain, cr }))
        .collect()
}

#[derive(Debug, Clone)]
pub struct CcdfResult {
    pub case: Case,
    pub clip_level: Option<f64>,
    pub curve: CcdfCurve,
    /// PAPR (dB) where the curve crosses `CCDF_READOUT`.
    pub crossing_db: Option<f64>,
    /// Largest per-symbol PAPR observed.
    pub max_papr_db: f64,
}

#[derive(Debug, Clone)]
pub struct CcdfReport {
    pub sigma: f64,
    pub results: Vec<CcdfResult>,
}

impl CcdfReport {
    pub fn get(&self, chain: Chain, cr: Option<f64>) -> Option<&CcdfResult> {
        self.results.iter().find(|r| r.case.chain == chain && r.case.cr == cr)
    }
}

/// Per-symbol PAPR for every case, indexed `[case][symbol]`.
pub fn papr_table(cfg: &ExperimentConfig, tx: &Transmitter, sigma: f64) -> Result<Vec<Vec<f64>>> {
    let cases = cases(cfg);
    let clips = cases.iter().map(|c| c.clip(sigma)).collect::<Result<Vec<_>>>()?;
    let per_symbol = (0..cfg.num_symbols)
        .into_par_iter()
        .map(|i| {
            let (_, xp) = unclipped_block(tx, cfg.master_seed, i)?;
            cases
                .iter()
                .zip(&clips)
                .map(|(case, clip)| {
                    let y = tx.finish(case.chain, xp.clone(), clip.as_ref())?;
                    papr_db(y.data())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((0..cases.len())
        .map(|c| per_symbol.iter().map(|row| row[c]).collect())
        .collect())
}

pub fn run_ccdf_experiment(cfg: &ExperimentConfig) -> Result<CcdfReport> {
    cfg.validate()?;
    let tx = Transmitter::new(&cfg.ofdm, &cfg.filter)?;
    let sigma = unclipped_rms(&tx, cfg.master_seed, cfg.num_symbols)?;
    let table = papr_table(cfg, &tx, sigma)?;
    let results = cases(cfg)
        .into_iter()
        .zip(table)
        .map(|(case, paprs)| {
            let mut acc = CcdfAccumulator::new(cfg.ccdf_grid.clone())?;
            for &p in &paprs {
                acc.push(p);
            }
            let curve = acc.finish()?;
            Ok(CcdfResult {
                case,
                clip_level: case.clip(sigma)?.map(|c| c.level()),
                crossing_db: curve.crossing(CCDF_READOUT),
                max_papr_db: paprs.iter().copied().fold(0.0, f64::max),
                curve,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CcdfReport { sigma, results })
}

/// Coherent receiver: downconvert, transform, keep the data bins.
pub fn receive(tx: &Transmitter, rx: &PassbandSignal) -> Result<Vec<Complex64>> {
    let mut buf = downconvert(rx, tx.config()).into_data();
    tx.fft().process(&mut buf, false)?;
    Ok(tx.config().data_bins().into_iter().map(|k| buf[k]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub errors: u64,
    pub bits: u64,
    pub symbols: usize,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct BerCurve {
    pub case: Case,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub fn at(&self, ebn0_db: f64) -> Option<&BerPoint> {
        self.points.iter().find(|p| (p.ebn0_db - ebn0_db).abs() < 1e-9)
    }
}

#[derive(Debug, Clone)]
pub struct BerReport {
    pub sigma: f64,
    pub curves: Vec<BerCurve>,
}

impl BerReport {
    pub fn get(&self, chain: Chain, cr: Option<f64>) -> Option<&BerCurve> {
        self.curves.iter().find(|c| c.case.chain == chain && c.case.cr == cr)
    }
}

fn symbol_errors(
    tx: &Transmitter,
    case: Case,
    clip: Option<&ClipSpec>,
    seed: u64,
    ebn0_index: usize,
    ebn0_db: f64,
    index: usize,
) -> Result<u64> {
    let (bits, xp) = unclipped_block(tx, seed, index)?;
    let sent = tx.finish(case.chain, xp, clip)?;
    let noisy = add_awgn(&sent, ebn0_db, tx.config(), &mut noise_rng(seed, ebn0_index, index));
    let mut decided = Vec::with_capacity(bits.len());
    qpsk_demap_into(&receive(tx, &noisy)?, &mut decided);
    Ok(hamming(&bits, &decided) as u64)
}

/// Counts errors for one case and Eb/N0, in fixed batches, until both
/// `num_symbols` symbols and `min_errors` errors are reached or the
/// `max_symbols` cap is hit.
pub fn measure_ber_point(
    cfg: &ExperimentConfig,
    tx: &Transmitter,
    case: Case,
    sigma: f64,
    ebn0_index: usize,
) -> Result<BerPoint> {
    let ebn0_db = *cfg
        .ebn0_list
        .get(ebn0_index)
        .ok_or_else(|| Error::Config(format!("no Eb/N0 at index {ebn0_index}")))?;
    let clip = case.clip(sigma)?;
    let bits_per_symbol = tx.config().bits_per_block() as u64;
    let mut errors = 0u64;
    let mut symbols = 0usize;
    while symbols < cfg.max_symbols && (symbols < cfg.num_symbols || errors < cfg.min_errors) {
        let end = (symbols + BER_BATCH).min(cfg.max_symbols);
        let batch: Vec<u64> = (symbols..end)
            .into_par_iter()
            .map(|i| symbol_errors(tx, case, clip.as_ref(), cfg.master_seed, ebn0_index, ebn0_db, i))
            .collect::<Result<_>>()?;
        errors += batch.iter().sum::<u64>();
        symbols = end;
    }
    Ok(BerPoint {
        ebn0_db,
        errors,
        bits: symbols as u64 * bits_per_symbol,
        symbols,
    })
}

pub fn run_ber_experiment(cfg: &ExperimentConfig) -> Result<BerReport> {
    cfg.validate()?;
    let tx = Transmitter::new(&cfg.ofdm, &cfg.filter)?;
    let sigma = unclipped_rms(&tx, cfg.master_seed, cfg.num_symbols)?;
    let curves = cases(cfg)
        .into_iter()
        .map(|case| {
            let points = (0..cfg.ebn0_list.len())
                .map(|e| measure_ber_point(cfg, &tx, case, sigma, e))
                .collect::<Result<Vec<_>>>()?;
            Ok(BerCurve { case, points })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BerReport { sigma, curves })
}
