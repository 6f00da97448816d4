//! AWGN calibrated to Eb/N0 and the analytic QPSK reference curve.

use crate::passband::PassbandSignal;
use crate::rng::Rng;
use crate::spectral::OfdmConfig;

/// Noise level for one block.
///
/// A block of `N L` real passband samples with mean-square `P` carries
/// `N * bits_per_symbol` bits. Its complex envelope has energy `2 P N L`, so
/// `Eb = P L / bits_per_symbol` and the per-sample noise variance is
/// `N0 / 2 = Eb / (2 Eb/N0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub ebn0_db: f64,
    pub signal_power: f64,
    pub noise_std: f64,
}

impl NoiseSpec {
    pub fn new(ebn0_db: f64, signal_power: f64, cfg: &OfdmConfig) -> Self {
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        let variance = signal_power * cfg.oversample() as f64 / (2.0 * cfg.bits_per_symbol() as f64 * ebn0);
        Self {
            ebn0_db,
            signal_power,
            noise_std: variance.sqrt(),
        }
    }

    pub fn variance(&self) -> f64 {
        self.noise_std * self.noise_std
    }
}

/// Adds white Gaussian noise scaled to the block's measured power.
pub fn add_awgn(xp: &PassbandSignal, ebn0_db: f64, cfg: &OfdmConfig, rng: &mut Rng) -> PassbandSignal {
    add_awgn_with_power(xp, ebn0_db, xp.mean_power(), cfg, rng)
}

/// Adds noise calibrated against an explicit reference power, e.g. the
/// pre-clipping power of the same block.
pub fn add_awgn_with_power(
    xp: &PassbandSignal,
    ebn0_db: f64,
    signal_power: f64,
    cfg: &OfdmConfig,
    rng: &mut Rng,
) -> PassbandSignal {
    let spec = NoiseSpec::new(ebn0_db, signal_power, cfg);
    if spec.noise_std == 0.0 {
        return xp.clone();
    }
    xp.with_data(xp.data().iter().map(|&v| v + spec.noise_std * rng.gaussian()).collect())
}

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Gray-coded QPSK bit error probability over AWGN, `Q(sqrt(2 Eb/N0))`.
pub fn qpsk_ber_analytic(ebn0_db: f64) -> f64 {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    0.5 * libm::erfc(ebn0.sqrt())
}
