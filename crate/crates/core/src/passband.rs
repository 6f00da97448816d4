//! Carrier up/down conversion between complex baseband and real passband.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Domain, OfdmConfig, SampleVector};

/// Real-valued signal on a carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct PassbandSignal {
    data: Vec<f64>,
    rate: f64,
    carrier: f64,
}

impl PassbandSignal {
    pub fn new(data: Vec<f64>, cfg: &OfdmConfig) -> Result<Self> {
        cfg.check_passband()?;
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self::from_parts(data, cfg.sample_rate(), cfg.carrier()))
    }

    pub(crate) fn from_parts(data: Vec<f64>, rate: f64, carrier: f64) -> Self {
        Self { data, rate, carrier }
    }

    pub(crate) fn with_data(&self, data: Vec<f64>) -> Self {
        Self::from_parts(data, self.rate, self.carrier)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        mean_square(&self.data)
    }
}

pub(crate) fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// `e^{j 2 pi fc m / fs}`, with the phase reduced modulo one cycle first.
fn carrier_phasor(m: usize, cycles_per_sample: f64) -> Complex64 {
    let turns = (m as f64 * cycles_per_sample).fract();
    Complex64::from_polar(1.0, 2.0 * PI * turns)
}

/// `out[m] = Re{ x[m] e^{j 2 pi fc m / fs} }`.
pub fn upconvert(x: &SampleVector, cfg: &OfdmConfig) -> Result<PassbandSignal> {
    cfg.check_passband()?;
    let fs = cfg.sample_rate();
    if x.domain() != Domain::Time {
        return Err(Error::Config("upconversion expects a time-domain signal".into()));
    }
    if (x.rate() - fs).abs() > 1e-9 * fs {
        return Err(Error::RateMismatch {
            expected: fs,
            found: x.rate(),
        });
    }
    let cps = cfg.carrier() / fs;
    let data = x
        .data()
        .iter()
        .enumerate()
        .map(|(m, &z)| (z * carrier_phasor(m, cps)).re)
        .collect();
    Ok(PassbandSignal::from_parts(data, fs, cfg.carrier()))
}

/// `y[m] = 2 xp[m] e^{-j 2 pi fc m / fs}`. The image at `-2 fc` is left in
/// place; the receiver removes it by keeping only the data bins.
pub fn downconvert(xp: &PassbandSignal, cfg: &OfdmConfig) -> SampleVector {
    let cps = cfg.carrier() / cfg.sample_rate();
    let data = xp
        .data
        .iter()
        .enumerate()
        .map(|(m, &v)| 2.0 * v * carrier_phasor(m, cps).conj())
        .collect();
    SampleVector::from_parts(data, xp.rate, Domain::Time)
}
