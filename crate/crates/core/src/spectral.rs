//! Unitary radix-2 transforms, zero-padding interpolation and OFDM synthesis.
//!
//! Both transform directions carry a `1/sqrt(len)` factor, so an OFDM block
//! synthesized from `N` unit-energy symbols has total energy `N` in either
//! domain regardless of the oversampling factor.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Time,
    Frequency,
}

/// A complex sequence tagged with its sample rate and domain.
///
/// For frequency-domain vectors `rate` is the span of the spectrum, so the
/// bin spacing is `rate / len`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector {
    data: Vec<Complex64>,
    rate: f64,
    domain: Domain,
}

impl SampleVector {
    pub fn new(data: Vec<Complex64>, rate: f64, domain: Domain) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Config(format!("sample rate must be positive, got {rate}")));
        }
        Ok(Self { data, rate, domain })
    }

    pub fn time(data: Vec<Complex64>, rate: f64) -> Result<Self> {
        Self::new(data, rate, Domain::Time)
    }

    pub fn frequency(data: Vec<Complex64>, rate: f64) -> Result<Self> {
        Self::new(data, rate, Domain::Frequency)
    }

    /// Builds a vector whose invariants the caller has already established.
    pub(crate) fn from_parts(data: Vec<Complex64>, rate: f64, domain: Domain) -> Self {
        debug_assert!(!data.is_empty() && rate > 0.0);
        Self { data, rate, domain }
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.data)
    }
}

pub fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Transmitter parameters. Defaults are the reference setup: 128 QPSK
/// subcarriers over 1 MHz, 8x oversampling, 2 MHz carrier.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OfdmConfig {
    num_subcarriers: usize,
    oversample: usize,
    bandwidth: f64,
    carrier: f64,
    bits_per_symbol: usize,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            num_subcarriers: 128,
            oversample: 8,
            bandwidth: 1.0e6,
            carrier: 2.0e6,
            bits_per_symbol: 2,
        }
    }
}

impl OfdmConfig {
    pub fn new(num_subcarriers: usize, oversample: usize, bandwidth: f64, carrier: f64) -> Result<Self> {
        let cfg = Self {
            num_subcarriers,
            oversample,
            bandwidth,
            carrier,
            bits_per_symbol: 2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_subcarriers;
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "number of subcarriers must be a power of two >= 2, got {n}"
            )));
        }
        if self.oversample == 0 || !self.oversample.is_power_of_two() {
            return Err(Error::Config(format!(
                "oversampling factor must be a power of two >= 1, got {}",
                self.oversample
            )));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::Config(format!("bandwidth must be positive, got {}", self.bandwidth)));
        }
        if !(self.carrier >= 0.0 && self.carrier.is_finite()) {
            return Err(Error::Config(format!("carrier must be non-negative, got {}", self.carrier)));
        }
        Ok(())
    }

    /// Checks that the occupied band `fc -+ BW/2` lies strictly between DC
    /// and Nyquist, as required before upconversion.
    pub fn check_passband(&self) -> Result<()> {
        let half_bw = self.bandwidth / 2.0;
        if self.carrier <= half_bw {
            return Err(Error::Config(format!(
                "carrier {} Hz must exceed half the bandwidth ({half_bw} Hz)",
                self.carrier
            )));
        }
        if self.carrier + half_bw > self.sample_rate() / 2.0 {
            return Err(Error::Config(format!(
                "passband edge {} Hz exceeds Nyquist {} Hz",
                self.carrier + half_bw,
                self.sample_rate() / 2.0
            )));
        }
        Ok(())
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// `fs = BW * L`.
    pub fn sample_rate(&self) -> f64 {
        self.bandwidth * self.oversample as f64
    }

    /// Samples per oversampled OFDM block, `N * L`.
    pub fn block_len(&self) -> usize {
        self.num_subcarriers * self.oversample
    }

    pub fn bits_per_block(&self) -> usize {
        self.num_subcarriers * self.bits_per_symbol
    }

    pub fn bin_spacing(&self) -> f64 {
        self.bandwidth / self.num_subcarriers as f64
    }

    /// Indices of the `N * L` spectrum that carry data after zero padding,
    /// in subcarrier order.
    pub fn data_bins(&self) -> Vec<usize> {
        let n = self.num_subcarriers;
        let shift = n * (self.oversample - 1);
        (0..n).map(|k| if k <= n / 2 { k } else { k + shift }).collect()
    }
}

/// Precomputed radix-2 transform of one size.
#[derive(Debug, Clone)]
pub struct Radix2Fft {
    len: usize,
    twiddles: Vec<Complex64>,
    scale: f64,
}

impl Radix2Fft {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        Ok(Self {
            len,
            twiddles,
            scale: 1.0 / (len as f64).sqrt(),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place unitary transform. `inverse` selects the `e^{+j...}` kernel.
    pub fn process(&self, buf: &mut [Complex64], inverse: bool) -> Result<()> {
        let n = self.len;
        if buf.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: buf.len(),
            });
        }
        if n == 1 {
            return Ok(());
        }

        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }

        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }

        for z in buf.iter_mut() {
            *z *= self.scale;
        }
        Ok(())
    }
}

/// Unitary DFT (or inverse) of `x`. The result is tagged with the opposite
/// domain and keeps the rate annotation.
pub fn dft(x: &SampleVector, inverse: bool) -> Result<SampleVector> {
    let fft = Radix2Fft::new(x.len())?;
    let mut data = x.data.clone();
    fft.process(&mut data, inverse)?;
    let domain = match x.domain {
        Domain::Time => Domain::Frequency,
        Domain::Frequency => Domain::Time,
    };
    Ok(SampleVector::from_parts(data, x.rate, domain))
}

/// Inserts `N(L-1)` zeros in the middle of an `N`-bin spectrum.
///
/// Bins `0..=N/2` stay in place and bins `N/2+1..N` move to the top of the
/// `N*L` spectrum. The shared Nyquist bin `N/2` is kept only on the low side.
pub fn zero_pad_oversample(x: &SampleVector, oversample: usize) -> Result<SampleVector> {
    let n = x.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    if oversample == 0 {
        return Err(Error::Config("oversampling factor must be >= 1".into()));
    }
    let nl = n * oversample;
    let shift = nl - n;
    let mut out = vec![Complex64::new(0.0, 0.0); nl];
    for (k, &v) in x.data.iter().enumerate() {
        let dst = if k <= n / 2 { k } else { k + shift };
        out[dst] = v;
    }
    Ok(SampleVector::from_parts(out, x.rate * oversample as f64, x.domain))
}

/// Synthesizes one oversampled OFDM block from `N` frequency-domain symbols.
pub fn ofdm_modulate(symbols: &SampleVector, cfg: &OfdmConfig) -> Result<SampleVector> {
    let fft = Radix2Fft::new(cfg.block_len())?;
    ofdm_modulate_with(&fft, symbols.data(), cfg)
}

pub(crate) fn ofdm_modulate_with(
    fft: &Radix2Fft,
    symbols: &[Complex64],
    cfg: &OfdmConfig,
) -> Result<SampleVector> {
    let n = cfg.num_subcarriers();
    if symbols.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: symbols.len(),
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); cfg.block_len()];
    for (&bin, &s) in cfg.data_bins().iter().zip(symbols) {
        buf[bin] = s;
    }
    fft.process(&mut buf, true)?;
    Ok(SampleVector::from_parts(buf, cfg.sample_rate(), Domain::Time))
}
