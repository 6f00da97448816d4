//! Simulation of amplitude clipping and filtering for OFDM peak-to-average
//! power ratio reduction.
//!
//! The library builds a QPSK OFDM transmitter (zero-padded oversampling,
//! carrier upconversion), the two clip-and-filter chains being compared
//! (an ideal out-of-band zeroing filter and a Chebyshev Type I shaped
//! variant), an AWGN channel with a coherent receiver, and the Monte Carlo
//! harness producing CCDF-of-PAPR and BER curves.

pub mod channel;
pub mod clipfilter;
pub mod error;
pub mod harness;
pub mod modem;
pub mod passband;
pub mod peak;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
