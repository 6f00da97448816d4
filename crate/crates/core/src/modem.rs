//! Bit generation, Gray-coded QPSK and bit-error counting.
//!
//! Constellation (unit energy):
//!
//! ```text
//!   01 (-1+j)/√2  |  00 (+1+j)/√2
//!   --------------+--------------
//!   11 (-1-j)/√2  |  10 (+1-j)/√2
//! ```
//!
//! The first bit of each pair selects the sign of the in-phase component,
//! the second the sign of the quadrature component.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::spectral::SampleVector;

pub const QPSK_BITS_PER_SYMBOL: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBlock {
    bits: Vec<u8>,
    lineage: u64,
}

impl BitBlock {
    /// Wraps explicit bits; every element must be 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(index) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Config(format!("bit {index} is not 0 or 1")));
        }
        Ok(Self { bits, lineage: 0 })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Stream id of the generator that produced these bits, 0 if none.
    pub fn lineage(&self) -> u64 {
        self.lineage
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

pub fn random_bits(n: usize, rng: &mut Rng) -> Result<BitBlock> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let bits = (0..n).map(|_| rng.bit()).collect();
    Ok(BitBlock {
        bits,
        lineage: rng.stream(),
    })
}

pub fn qpsk_symbol(b0: u8, b1: u8) -> Complex64 {
    let re = if b0 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    let im = if b1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

pub(crate) fn qpsk_map_slice(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(QPSK_BITS_PER_SYMBOL) {
        return Err(Error::OddLength(bits.len()));
    }
    Ok(bits.chunks_exact(2).map(|p| qpsk_symbol(p[0], p[1])).collect())
}

/// Maps bit pairs onto QPSK symbols. `rate` annotates the band the symbols
/// occupy (the OFDM bandwidth).
pub fn qpsk_map(bits: &BitBlock, rate: f64) -> Result<SampleVector> {
    if bits.is_empty() {
        return Err(Error::Empty);
    }
    SampleVector::frequency(qpsk_map_slice(&bits.bits)?, rate)
}

/// Hard quadrant decision. Points on an axis resolve to bit 0.
pub fn qpsk_demap_into(symbols: &[Complex64], out: &mut Vec<u8>) {
    out.reserve(symbols.len() * 2);
    for s in symbols {
        out.push(u8::from(s.re < 0.0));
        out.push(u8::from(s.im < 0.0));
    }
}

pub fn qpsk_demap(symbols: &SampleVector) -> BitBlock {
    let mut bits = Vec::new();
    qpsk_demap_into(symbols.data(), &mut bits);
    BitBlock { bits, lineage: 0 }
}

pub(crate) fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Hamming distance and error rate between two equal-length blocks.
pub fn count_bit_errors(sent: &BitBlock, received: &BitBlock) -> Result<(usize, f64)> {
    if sent.len() != received.len() {
        return Err(Error::LengthMismatch {
            expected: sent.len(),
            found: received.len(),
        });
    }
    if sent.is_empty() {
        return Ok((0, 0.0));
    }
    let errors = hamming(&sent.bits, &received.bits);
    Ok((errors, errors as f64 / sent.len() as f64))
}
