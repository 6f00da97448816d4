use std::path::PathBuf;

use serde::Serialize;

use crate::clipfilter::{Chain, FilterMode, FilterSpec};
use crate::error::{Error, Result};
use crate::peak::default_grid;
use crate::spectral::OfdmConfig;

pub const DEFAULT_CR_LIST: [f64; 5] = [0.8, 1.0, 1.2, 1.4, 1.6];
pub const DEFAULT_EBN0_DB: [f64; 5] = [0.0, 2.0, 4.0, 6.0, 8.0];
pub const DEFAULT_SYMBOLS: usize = 10_000;
pub const DEFAULT_MAX_SYMBOLS: usize = 200_000;
pub const DEFAULT_MIN_ERRORS: u64 = 500;
pub const DEFAULT_SEED: u64 = 20_140_901;

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub ofdm: OfdmConfig,
    pub cr_list: Vec<f64>,
    pub filter: FilterSpec,
    /// Symbols per CCDF curve, and the minimum per BER point.
    pub num_symbols: usize,
    /// BER points stop here even if fewer than `min_errors` were seen.
    pub max_symbols: usize,
    pub min_errors: u64,
    pub ebn0_list: Vec<f64>,
    pub master_seed: u64,
    pub chains: Vec<Chain>,
    pub output_dir: PathBuf,
    pub ccdf_grid: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let ofdm = OfdmConfig::default();
        let filter = FilterSpec::for_config(
            &ofdm,
            FilterMode::Cheby1Bandpass,
            FilterSpec::DEFAULT_ORDER,
            FilterSpec::DEFAULT_RIPPLE_DB,
        )
        .expect("reference filter is valid");
        Self {
            ofdm,
            cr_list: DEFAULT_CR_LIST.to_vec(),
            filter,
            num_symbols: DEFAULT_SYMBOLS,
            max_symbols: DEFAULT_MAX_SYMBOLS,
            min_errors: DEFAULT_MIN_ERRORS,
            ebn0_list: DEFAULT_EBN0_DB.to_vec(),
            master_seed: DEFAULT_SEED,
            chains: vec![Chain::Unclipped, Chain::Existing, Chain::Proposed],
            output_dir: PathBuf::from("results"),
            ccdf_grid: default_grid(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.ofdm.check_passband()?;
        if self.num_symbols == 0 {
            return Err(Error::Config("symbols must be at least 1".into()));
        }
        if self.max_symbols < self.num_symbols {
            return Err(Error::Config(format!(
                "max-symbols ({}) is below symbols ({})",
                self.max_symbols, self.num_symbols
            )));
        }
        if self.chains.is_empty() {
            return Err(Error::Config("no chain selected".into()));
        }
        if self.chains.iter().any(|c| c.is_clipped()) && self.cr_list.is_empty() {
            return Err(Error::Config("clipped chains need at least one clipping ratio".into()));
        }
        if let Some(cr) = self.cr_list.iter().find(|&&cr| !(cr > 0.0 && cr.is_finite())) {
            return Err(Error::Config(format!("clipping ratio must be positive, got {cr}")));
        }
        if let Some(e) = self.ebn0_list.iter().find(|e| e.is_nan()) {
            return Err(Error::Config(format!("invalid Eb/N0 {e}")));
        }
        self.filter.validate()
    }

    /// Clipping ratios to run for `chain`; the unclipped chain has none.
    pub fn crs_for(&self, chain: Chain) -> Vec<Option<f64>> {
        if chain.is_clipped() {
            self.cr_list.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }
}
