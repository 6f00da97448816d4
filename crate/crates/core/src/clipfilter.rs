//! Clipping operators, the FFT-domain bandpass filter, and the two
//! clip-and-filter transmit chains.
//!
//! Both chains oversample, modulate and upconvert a QPSK block, hard-clip
//! the real passband signal at a fixed level, then filter it in the
//! frequency domain: every bin outside the occupied band is zeroed and
//! in-band bins are multiplied by a gain. The `Existing` chain uses unit
//! in-band gain. The `Proposed` chain uses the sampled response of a
//! Chebyshev Type I bandpass.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::passband::{upconvert, PassbandSignal};
use crate::peak::{check_cr, rms, SamplePower};
use crate::spectral::{ofdm_modulate_with, Domain, OfdmConfig, Radix2Fft, SampleVector};

/// Clipping ratio and the amplitude derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipSpec {
    cr: f64,
    level: f64,
}

impl ClipSpec {
    /// `A = cr * sigma` with `sigma` the RMS of the unclipped signal.
    pub fn from_rms(cr: f64, sigma: f64) -> Result<Self> {
        check_cr(cr)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::ZeroSignal);
        }
        Ok(Self { cr, level: cr * sigma })
    }

    pub fn for_signal<T: SamplePower>(cr: f64, unclipped: &[T]) -> Result<Self> {
        check_cr(cr)?;
        Self::from_rms(cr, rms(unclipped)?)
    }

    pub fn cr(&self) -> f64 {
        self.cr
    }

    pub fn level(&self) -> f64 {
        self.level
    }
}

fn check_level(a: f64) -> Result<()> {
    if a > 0.0 && !a.is_nan() {
        Ok(())
    } else {
        Err(Error::Config(format!("clipping level must be positive, got {a}")))
    }
}

/// Polar clip: magnitudes above `a` are clamped to `a`, phase is kept.
pub fn clip_baseband(x: &SampleVector, a: f64) -> Result<SampleVector> {
    check_level(a)?;
    let data = x
        .data()
        .iter()
        .map(|&z| {
            let mag = z.norm();
            if mag <= a {
                z
            } else {
                let mut clipped = z * (a / mag);
                // rounding may leave |clipped| an ulp above a
                while clipped.norm() > a {
                    clipped *= 1.0 - f64::EPSILON;
                }
                clipped
            }
        })
        .collect();
    Ok(SampleVector::from_parts(data, x.rate(), x.domain()))
}

/// Symmetric clamp of a real passband signal to `[-a, a]`.
pub fn clip_passband(xp: &PassbandSignal, a: f64) -> Result<PassbandSignal> {
    check_level(a)?;
    Ok(xp.with_data(xp.data().iter().map(|&v| v.clamp(-a, a)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    Cheby1Bandpass,
    IdealBrickwall,
}

/// How the in-band Chebyshev gain is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterPhase {
    /// The full complex response, phase included.
    #[default]
    Complex,
    /// Magnitude only.
    Zero,
}

impl FromStr for FilterPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Self::Complex),
            "zero" => Ok(Self::Zero),
            _ => Err(Error::Config(format!("unknown filter phase '{s}' (expected complex or zero)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FilterSpec {
    pub order: usize,
    pub passband_ripple_db: f64,
    pub f_low: f64,
    pub f_high: f64,
    pub fs: f64,
    pub mode: FilterMode,
    pub phase: FilterPhase,
}

impl FilterSpec {
    pub const DEFAULT_ORDER: usize = 4;
    pub const DEFAULT_RIPPLE_DB: f64 = 0.5;

    /// Band edges at `fc -+ BW/2`.
    pub fn for_config(cfg: &OfdmConfig, mode: FilterMode, order: usize, passband_ripple_db: f64) -> Result<Self> {
        let spec = Self {
            order,
            passband_ripple_db,
            f_low: cfg.carrier() - cfg.bandwidth() / 2.0,
            f_high: cfg.carrier() + cfg.bandwidth() / 2.0,
            fs: cfg.sample_rate(),
            mode,
            phase: FilterPhase::Complex,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::Filter("order must be at least 1".into()));
        }
        if !(self.passband_ripple_db > 0.0 && self.passband_ripple_db.is_finite()) {
            return Err(Error::Filter(format!(
                "passband ripple must be positive, got {} dB",
                self.passband_ripple_db
            )));
        }
        if !(0.0 < self.f_low && self.f_low < self.f_high && self.f_high < self.fs / 2.0) {
            return Err(Error::Filter(format!(
                "band edges must satisfy 0 < {} < {} < {}",
                self.f_low,
                self.f_high,
                self.fs / 2.0
            )));
        }
        Ok(())
    }

    /// `sqrt(10^(Rp/10) - 1)`.
    pub fn ripple_epsilon(&self) -> f64 {
        (10f64.powf(self.passband_ripple_db / 10.0) - 1.0).sqrt()
    }

    pub fn with_phase(self, phase: FilterPhase) -> Self {
        Self { phase, ..self }
    }

    /// Sampled gain on `len` FFT bins as applied by the composed filter:
    /// all ones in ideal mode, otherwise the Chebyshev response, reduced to
    /// its magnitude when `phase` is `Zero`.
    pub fn response(&self, len: usize) -> Result<FrequencyResponse> {
        match self.mode {
            FilterMode::IdealBrickwall => Ok(FrequencyResponse::unit(len)),
            FilterMode::Cheby1Bandpass => {
                let h = design_cheby1_bandpass(self, len)?;
                Ok(match self.phase {
                    FilterPhase::Complex => h,
                    FilterPhase::Zero => FrequencyResponse(h.0.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect()),
                })
            }
        }
    }
}

/// Complex gain at each FFT bin `k`, frequency `k fs / len`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse(Vec<Complex64>);

impl FrequencyResponse {
    pub fn unit(len: usize) -> Self {
        Self(vec![Complex64::new(1.0, 0.0); len])
    }

    pub fn new(gains: Vec<Complex64>) -> Self {
        Self(gains)
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Digital Chebyshev Type I bandpass in zero/pole/gain form.
#[derive(Debug, Clone)]
pub struct Cheby1Bandpass {
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
    gain: f64,
    fs: f64,
}

impl Cheby1Bandpass {
    pub fn new(spec: &FilterSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.order;
        let eps = spec.ripple_epsilon();

        // analog lowpass prototype, cutoff 1 rad/s
        let mu = (1.0 / eps).asinh() / n as f64;
        let proto: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = PI * (2 * k + 1) as f64 / (2 * n) as f64;
                Complex64::new(-mu.sinh() * theta.sin(), mu.cosh() * theta.cos())
            })
            .collect();
        let mut k_proto = proto.iter().map(|p| -p).product::<Complex64>().re;
        if n.is_multiple_of(2) {
            k_proto /= (1.0 + eps * eps).sqrt();
        }

        // prewarped edges, then s -> (s^2 + w0^2) / (B s)
        let fs2 = 2.0 * spec.fs;
        let w_lo = fs2 * (PI * spec.f_low / spec.fs).tan();
        let w_hi = fs2 * (PI * spec.f_high / spec.fs).tan();
        let w0 = (w_lo * w_hi).sqrt();
        let bw = w_hi - w_lo;
        let mut analog_poles = Vec::with_capacity(2 * n);
        for p in &proto {
            let half = p * (bw / 2.0);
            let disc = (half * half - w0 * w0).sqrt();
            analog_poles.push(half + disc);
            analog_poles.push(half - disc);
        }
        let analog_zeros = vec![Complex64::new(0.0, 0.0); n];
        let k_analog = k_proto * bw.powi(n as i32);

        // bilinear transform; the n zeros at infinity land on z = -1
        let fs2c = Complex64::new(fs2, 0.0);
        let map = |s: &Complex64| (fs2c + s) / (fs2c - s);
        let mut zeros: Vec<Complex64> = analog_zeros.iter().map(map).collect();
        zeros.extend(std::iter::repeat_n(Complex64::new(-1.0, 0.0), analog_poles.len() - analog_zeros.len()));
        let poles: Vec<Complex64> = analog_poles.iter().map(map).collect();
        let num: Complex64 = analog_zeros.iter().map(|z| fs2c - z).product();
        let den: Complex64 = analog_poles.iter().map(|p| fs2c - p).product();
        let gain = k_analog * (num / den).re;

        Ok(Self {
            zeros,
            poles,
            gain,
            fs: spec.fs,
        })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// `H(z)` at a point of the z-plane.
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|q| z - q).product();
        let den: Complex64 = self.poles.iter().map(|p| z - p).product();
        num / den * self.gain
    }

    /// Response at frequency `f` in Hz.
    pub fn response_at(&self, f: f64) -> Complex64 {
        self.eval_z(Complex64::from_polar(1.0, 2.0 * PI * f / self.fs))
    }

    /// Response at the `len` FFT bin frequencies. DC and Nyquist use the
    /// exact points `z = 1` and `z = -1`; the upper half mirrors the lower
    /// half by conjugation.
    pub fn sample_bins(&self, len: usize) -> FrequencyResponse {
        let mut h = vec![Complex64::new(0.0, 0.0); len];
        for k in 0..=len / 2 {
            let z = if k == 0 {
                Complex64::new(1.0, 0.0)
            } else if 2 * k == len {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, 2.0 * PI * k as f64 / len as f64)
            };
            h[k] = self.eval_z(z);
        }
        for k in len / 2 + 1..len {
            h[k] = h[len - k].conj();
        }
        FrequencyResponse(h)
    }
}

pub fn design_cheby1_bandpass(spec: &FilterSpec, len: usize) -> Result<FrequencyResponse> {
    if spec.mode != FilterMode::Cheby1Bandpass {
        return Err(Error::Filter("spec is not a Chebyshev Type I bandpass".into()));
    }
    if len < 2 {
        return Err(Error::Filter(format!("need at least 2 bins, got {len}")));
    }
    Ok(Cheby1Bandpass::new(spec)?.sample_bins(len))
}

/// In-band flag per FFT bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMask(Vec<bool>);

impl BinMask {
    pub fn new(in_band: Vec<bool>) -> Self {
        Self(in_band)
    }

    /// Bins whose frequency magnitude lies in `[fc - BW/2, fc + BW/2]`.
    pub fn for_config(cfg: &OfdmConfig) -> Self {
        let len = cfg.block_len();
        let df = cfg.sample_rate() / len as f64;
        let lo = cfg.carrier() - cfg.bandwidth() / 2.0;
        let hi = cfg.carrier() + cfg.bandwidth() / 2.0;
        let tol = 1e-9 * df;
        let mask = (0..len)
            .map(|k| {
                let signed = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
                let f = signed.abs() * df;
                f >= lo - tol && f <= hi + tol
            })
            .collect();
        Self(mask)
    }

    pub fn in_band(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        let n = self.0.len();
        (1..n).all(|k| self.0[k] == self.0[n - k])
    }
}

fn check_lengths(n: usize, h: &FrequencyResponse, mask: &BinMask, fft: &Radix2Fft) -> Result<()> {
    for found in [h.len(), mask.len(), fft.len()] {
        if found != n {
            return Err(Error::LengthMismatch { expected: n, found });
        }
    }
    Ok(())
}

fn shape_spectrum(fft: &Radix2Fft, xp: &PassbandSignal, h: &FrequencyResponse, mask: &BinMask) -> Result<Vec<Complex64>> {
    check_lengths(xp.len(), h, mask, fft)?;
    let mut buf: Vec<Complex64> = xp.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf, false)?;
    for ((bin, &g), &keep) in buf.iter_mut().zip(h.gains()).zip(mask.in_band()) {
        *bin = if keep { *bin * g } else { Complex64::new(0.0, 0.0) };
    }
    Ok(buf)
}

/// FFT, in-band gain, out-of-band zeroing, inverse FFT. Returns the real
/// part and the largest discarded imaginary magnitude.
pub(crate) fn composed_filter_with(
    fft: &Radix2Fft,
    xp: &PassbandSignal,
    h: &FrequencyResponse,
    mask: &BinMask,
) -> Result<(PassbandSignal, f64)> {
    let mut buf = shape_spectrum(fft, xp, h, mask)?;
    fft.process(&mut buf, true)?;
    let residue = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok((xp.with_data(buf.iter().map(|z| z.re).collect()), residue))
}

pub fn composed_filter(xp: &PassbandSignal, h: &FrequencyResponse, mask: &BinMask) -> Result<PassbandSignal> {
    let fft = Radix2Fft::new(xp.len())?;
    composed_filter_with(&fft, xp, h, mask).map(|(y, _)| y)
}

/// Spectrum that [`composed_filter`] inverts: masked-out bins are exactly
/// zero.
pub fn composed_spectrum(xp: &PassbandSignal, h: &FrequencyResponse, mask: &BinMask) -> Result<SampleVector> {
    let fft = Radix2Fft::new(xp.len())?;
    let buf = shape_spectrum(&fft, xp, h, mask)?;
    Ok(SampleVector::from_parts(buf, xp.rate(), Domain::Frequency))
}

/// Which transmit chain to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chain {
    /// Modulate and upconvert only.
    Unclipped,
    /// Passband clipping without filtering.
    ClipOnly,
    /// Clipping followed by out-of-band zeroing.
    Existing,
    /// Clipping followed by Chebyshev in-band shaping and out-of-band zeroing.
    Proposed,
}

impl Chain {
    pub const ALL: [Chain; 4] = [Chain::Unclipped, Chain::ClipOnly, Chain::Existing, Chain::Proposed];

    pub fn name(self) -> &'static str {
        match self {
            Chain::Unclipped => "unclipped",
            Chain::ClipOnly => "clip_only",
            Chain::Existing => "existing",
            Chain::Proposed => "proposed",
        }
    }

    pub fn id(self) -> u64 {
        self as u64
    }

    pub fn is_clipped(self) -> bool {
        self != Chain::Unclipped
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Chain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Chain::ALL
            .into_iter()
            .find(|c| c.name() == s || c.name().replace('_', "-") == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown chain '{s}' (expected unclipped, clip_only, existing or proposed)"
                ))
            })
    }
}

/// Reusable transmitter state: transform plan, both in-band responses and
/// the bin mask for one configuration.
#[derive(Debug, Clone)]
pub struct Transmitter {
    cfg: OfdmConfig,
    fft: Radix2Fft,
    mask: BinMask,
    ideal: FrequencyResponse,
    shaped: FrequencyResponse,
    filter: FilterSpec,
}

impl Transmitter {
    /// `filter` supplies the Chebyshev order, ripple and phase handling for
    /// the proposed chain; its mode is ignored.
    pub fn new(cfg: &OfdmConfig, filter: &FilterSpec) -> Result<Self> {
        cfg.check_passband()?;
        let len = cfg.block_len();
        let cheby = FilterSpec {
            mode: FilterMode::Cheby1Bandpass,
            ..*filter
        };
        Ok(Self {
            cfg: *cfg,
            fft: Radix2Fft::new(len)?,
            mask: BinMask::for_config(cfg),
            ideal: FrequencyResponse::unit(len),
            shaped: cheby.response(len)?,
            filter: cheby,
        })
    }

    pub fn with_defaults(cfg: &OfdmConfig) -> Result<Self> {
        let spec = FilterSpec::for_config(
            cfg,
            FilterMode::Cheby1Bandpass,
            FilterSpec::DEFAULT_ORDER,
            FilterSpec::DEFAULT_RIPPLE_DB,
        )?;
        Self::new(cfg, &spec)
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    pub fn fft(&self) -> &Radix2Fft {
        &self.fft
    }

    pub fn mask(&self) -> &BinMask {
        &self.mask
    }

    pub fn filter(&self) -> &FilterSpec {
        &self.filter
    }

    pub fn shaped_response(&self) -> &FrequencyResponse {
        &self.shaped
    }

    /// Oversampled, upconverted block before any clipping.
    pub fn unclipped(&self, symbols: &[Complex64]) -> Result<PassbandSignal> {
        let x = ofdm_modulate_with(&self.fft, symbols, &self.cfg)?;
        upconvert(&x, &self.cfg)
    }

    /// Clips and filters an unclipped passband block for `chain`.
    pub fn finish(&self, chain: Chain, unclipped: PassbandSignal, clip: Option<&ClipSpec>) -> Result<PassbandSignal> {
        if chain == Chain::Unclipped {
            return Ok(unclipped);
        }
        let clip = clip.ok_or_else(|| Error::Config(format!("chain '{chain}' needs a clipping level")))?;
        let clipped = clip_passband(&unclipped, clip.level())?;
        let h = match chain {
            Chain::ClipOnly => return Ok(clipped),
            Chain::Existing => &self.ideal,
            _ => &self.shaped,
        };
        composed_filter_with(&self.fft, &clipped, h, &self.mask).map(|(y, _)| y)
    }

    pub fn transmit(&self, chain: Chain, symbols: &[Complex64], clip: Option<&ClipSpec>) -> Result<PassbandSignal> {
        self.finish(chain, self.unclipped(symbols)?, clip)
    }
}

fn block_clip(tx: &Transmitter, symbols: &SampleVector, cr: f64) -> Result<(PassbandSignal, ClipSpec)> {
    let unclipped = tx.unclipped(symbols.data())?;
    let clip = ClipSpec::for_signal(cr, unclipped.data())?;
    Ok((unclipped, clip))
}

/// Clip plus ideal out-of-band zeroing, with the clipping level taken from
/// this block's own unclipped RMS. The harness instead uses one level per
/// experiment via [`Transmitter`].
pub fn existing_chain(symbols: &SampleVector, cfg: &OfdmConfig, cr: f64) -> Result<PassbandSignal> {
    let tx = Transmitter::with_defaults(cfg)?;
    let (unclipped, clip) = block_clip(&tx, symbols, cr)?;
    tx.finish(Chain::Existing, unclipped, Some(&clip))
}

/// Clip plus Chebyshev in-band shaping and out-of-band zeroing, default
/// filter parameters, per-block clipping level.
pub fn proposed_chain(symbols: &SampleVector, cfg: &OfdmConfig, cr: f64) -> Result<PassbandSignal> {
    let tx = Transmitter::with_defaults(cfg)?;
    let (unclipped, clip) = block_clip(&tx, symbols, cr)?;
    tx.finish(Chain::Proposed, unclipped, Some(&clip))
}
