use std::f64::consts::PI;

use papr_lab::modem::{qpsk_map, random_bits};
use papr_lab::peak::papr_db;
use papr_lab::rng::Rng;
use papr_lab::spectral::{dft, ofdm_modulate, zero_pad_oversample, OfdmConfig, SampleVector};
use papr_lab::Complex64;
use proptest::prelude::*;

fn complex_vec(log2_max: u32) -> impl Strategy<Value = Vec<Complex64>> {
    (0..=log2_max).prop_flat_map(|k| {
        prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64).prop_map(|(re, im)| Complex64::new(re, im)), 1usize << k)
    })
}

fn random_symbols(cfg: &OfdmConfig, seed: u64) -> SampleVector {
    let bits = random_bits(cfg.bits_per_block(), &mut Rng::new(seed, 0)).unwrap();
    qpsk_map(&bits, cfg.bandwidth()).unwrap()
}

/// Signed frequency index of data subcarrier `k`, matching the spectrum
/// layout: the upper half of the bins are negative frequencies.
fn signed_index(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// `x(t) = 1/sqrt(N L) sum_k X_k e^{j 2 pi f_k t}` at `t = m T / (N L)`.
fn direct_synthesis(symbols: &[Complex64], l: usize) -> Vec<Complex64> {
    let n = symbols.len();
    let nl = (n * l) as f64;
    (0..n * l)
        .map(|m| {
            symbols
                .iter()
                .enumerate()
                .map(|(k, &s)| s * Complex64::from_polar(1.0, 2.0 * PI * signed_index(k, n) * m as f64 / nl))
                .sum::<Complex64>()
                / nl.sqrt()
        })
        .collect()
}

#[test]
fn ofdm_block_matches_direct_synthesis() {
    let cfg = OfdmConfig::default();
    let x = random_symbols(&cfg, 11);
    let fast = ofdm_modulate(&x, &cfg).unwrap();
    let slow = direct_synthesis(x.data(), cfg.oversample());
    for (a, b) in fast.data().iter().zip(&slow) {
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn decimating_oversampled_block_recovers_critical_rate() {
    let over = OfdmConfig::default();
    let critical = OfdmConfig::new(128, 1, 1e6, 0.0).unwrap();
    let l = over.oversample() as f64;
    for seed in 0..4 {
        let x = random_symbols(&over, seed);
        let a = ofdm_modulate(&x, &over).unwrap();
        let b = ofdm_modulate(&x, &critical).unwrap();
        for (m, z) in b.data().iter().enumerate() {
            let w = a.data()[m * over.oversample()] * l.sqrt();
            assert!((w - z).norm() < 1e-9);
        }
    }
}

#[test]
fn all_equal_block_peaks_at_block_size() {
    let cfg = OfdmConfig::new(128, 1, 1e6, 0.0).unwrap();
    let s = Complex64::new(1.0, 1.0) / 2f64.sqrt();
    let x = SampleVector::frequency(vec![s; 128], cfg.bandwidth()).unwrap();
    let y = ofdm_modulate(&x, &cfg).unwrap();
    let expect = 10.0 * 128f64.log10();
    assert!((papr_db(y.data()).unwrap() - expect).abs() < 1e-9);
    assert!((expect - 21.07).abs() < 0.01);
}

proptest! {
    #[test]
    fn parseval_holds(x in complex_vec(11)) {
        let v = SampleVector::time(x, 1.0).unwrap();
        let e = v.energy();
        let y = dft(&v, false).unwrap();
        prop_assert!((y.energy() - e).abs() <= 1e-9 * e.max(1e-300));
    }

    #[test]
    fn inverse_undoes_forward(x in complex_vec(11)) {
        let v = SampleVector::time(x, 1.0).unwrap();
        let back = dft(&dft(&v, false).unwrap(), true).unwrap();
        let scale = v.data().iter().map(|z| z.norm()).fold(1e-300, f64::max);
        for (a, b) in back.data().iter().zip(v.data()) {
            prop_assert!((a - b).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn zero_padding_preserves_energy_and_bins(x in complex_vec(8).prop_filter("even", |v| v.len() >= 2), lexp in 0u32..4) {
        let l = 1usize << lexp;
        let n = x.len();
        let v = SampleVector::frequency(x.clone(), 1.0).unwrap();
        let p = zero_pad_oversample(&v, l).unwrap();
        prop_assert_eq!(p.len(), n * l);
        prop_assert_eq!(p.energy(), v.energy());
        for (k, z) in x.iter().enumerate() {
            let dst = if k <= n / 2 { k } else { k + n * (l - 1) };
            prop_assert_eq!(p.data()[dst], *z);
        }
        let nonzero = p.data().iter().filter(|z| z.norm() != 0.0).count();
        prop_assert!(nonzero <= n);
    }

    #[test]
    fn ofdm_block_energy_equals_symbol_count(seed in any::<u64>()) {
        let cfg = OfdmConfig::default();
        let x = random_symbols(&cfg, seed);
        let y = ofdm_modulate(&x, &cfg).unwrap();
        prop_assert!((y.energy() - 128.0).abs() < 1e-9);
    }
}
