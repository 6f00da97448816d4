//! PAPR measurement, clipping level derivation and CCDF estimation.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Instantaneous power of one sample.
pub trait SamplePower: Copy {
    fn power(self) -> f64;
}

impl SamplePower for f64 {
    fn power(self) -> f64 {
        self * self
    }
}

impl SamplePower for Complex64 {
    fn power(self) -> f64 {
        self.norm_sqr()
    }
}

fn peak_and_mean<T: SamplePower>(x: &[T]) -> Result<(f64, f64)> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let (peak, sum) = x.iter().fold((0.0f64, 0.0f64), |(p, s), &v| {
        let e = v.power();
        (p.max(e), s + e)
    });
    if sum == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok((peak, sum / x.len() as f64))
}

/// `10 log10(max |x|^2 / mean |x|^2)`.
pub fn papr_db<T: SamplePower>(x: &[T]) -> Result<f64> {
    let (peak, mean) = peak_and_mean(x)?;
    Ok((10.0 * (peak / mean).log10()).max(0.0))
}

pub fn rms<T: SamplePower>(x: &[T]) -> Result<f64> {
    peak_and_mean(x).map(|(_, mean)| mean.sqrt())
}

/// Clipping amplitude `A = cr * rms(x)` for the unclipped signal `x`.
pub fn clip_level_from_cr<T: SamplePower>(cr: f64, x: &[T]) -> Result<f64> {
    check_cr(cr)?;
    Ok(cr * rms(x)?)
}

pub(crate) fn check_cr(cr: f64) -> Result<()> {
    if cr > 0.0 && cr.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("clipping ratio must be positive and finite, got {cr}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaprSample {
    pub value_db: f64,
    pub symbol_index: usize,
}

/// `0, 0.1, ..., 14` dB.
pub fn default_grid() -> Vec<f64> {
    (0..=140).map(|i| i as f64 / 10.0).collect()
}

/// Exceedance counts on a fixed grid. Accumulators over disjoint sample
/// sets merge by addition, in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfAccumulator {
    grid: Vec<f64>,
    exceed: Vec<u64>,
    trials: u64,
}

impl CcdfAccumulator {
    pub fn new(grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Empty);
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("CCDF grid must be strictly ascending".into()));
        }
        let exceed = vec![0; grid.len()];
        Ok(Self { grid, exceed, trials: 0 })
    }

    pub fn push(&mut self, value_db: f64) {
        // grid is ascending, so the thresholds below value_db form a prefix
        let below = self.grid.partition_point(|&g| g < value_db);
        for c in &mut self.exceed[..below] {
            *c += 1;
        }
        self.trials += 1;
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Config("cannot merge CCDFs on different grids".into()));
        }
        for (a, b) in self.exceed.iter_mut().zip(&other.exceed) {
            *a += b;
        }
        self.trials += other.trials;
        Ok(())
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn finish(&self) -> Result<CcdfCurve> {
        if self.trials == 0 {
            return Err(Error::Empty);
        }
        let n = self.trials as f64;
        Ok(CcdfCurve {
            grid: self.grid.clone(),
            prob: self.exceed.iter().map(|&c| c as f64 / n).collect(),
            trials: self.trials,
        })
    }
}

/// Empirical `Pr[PAPR > threshold]` on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub grid: Vec<f64>,
    pub prob: Vec<f64>,
    pub trials: u64,
}

impl CcdfCurve {
    /// Threshold where the curve falls to `level`, linearly interpolated
    /// between the bracketing grid points. `None` if the curve never
    /// crosses `level` inside the grid.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let i = self.prob.iter().position(|&p| p <= level)?;
        if i == 0 {
            return None;
        }
        let (g0, g1) = (self.grid[i - 1], self.grid[i]);
        let (p0, p1) = (self.prob[i - 1], self.prob[i]);
        Some(g0 + (p0 - level) / (p0 - p1) * (g1 - g0))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("papr0_db,ccdf\n");
        for (g, p) in self.grid.iter().zip(&self.prob) {
            let _ = writeln!(out, "{g},{p}");
        }
        out
    }
}

pub fn ccdf(samples: &[PaprSample], grid: &[f64]) -> Result<CcdfCurve> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut acc = CcdfAccumulator::new(grid.to_vec())?;
    for s in samples {
        acc.push(s.value_db);
    }
    acc.finish()
}
