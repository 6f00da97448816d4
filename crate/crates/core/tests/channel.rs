use papr_lab::channel::{add_awgn, q_function, qpsk_ber_analytic, NoiseSpec};
use papr_lab::clipfilter::Transmitter;
use papr_lab::harness::experiment::receive;
use papr_lab::modem::{count_bit_errors, qpsk_demap, qpsk_map, random_bits, BitBlock};
use papr_lab::passband::{downconvert, upconvert, PassbandSignal};
use papr_lab::rng::Rng;
use papr_lab::spectral::{ofdm_modulate, OfdmConfig, SampleVector};
use papr_lab::Complex64;
use proptest::prelude::*;

/// Q(x) by composite Simpson integration of the Gaussian density over
/// `[x, x + 12]`.
fn q_numeric(x: f64) -> f64 {
    let steps = 200_000;
    let h = 12.0 / steps as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = pdf(x) + pdf(x + 12.0);
    for i in 1..steps {
        acc += pdf(x + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn analytic_ber_matches_numeric_integration() {
    for ebn0 in [-4.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0] {
        let gamma: f64 = 10f64.powf(ebn0 / 10.0);
        let want = q_numeric((2.0 * gamma).sqrt());
        let got = qpsk_ber_analytic(ebn0);
        assert!((got / want - 1.0).abs() < 1e-9, "{ebn0} dB: {got} vs {want}");
    }
    assert!((qpsk_ber_analytic(0.0) - 0.07865).abs() < 5e-6);
    assert!((qpsk_ber_analytic(6.0) - 0.00239).abs() < 5e-6);
    assert!((q_function(0.0) - 0.5).abs() < 1e-15);
}

#[test]
fn direct_qpsk_over_awgn_matches_analytic() {
    // Es = 1, Eb = 1/2, so each quadrature gets variance N0/2 = 1/(4 gamma)
    let ebn0 = 6.0;
    let gamma = 10f64.powf(ebn0 / 10.0);
    let std = (1.0 / (4.0 * gamma)).sqrt();
    let mut data = Rng::new(3, 1);
    let mut noise = Rng::new(3, 2);
    let bits = random_bits(800_000, &mut data).unwrap();
    let tx = qpsk_map(&bits, 1.0).unwrap();
    let rx: Vec<Complex64> = tx
        .data()
        .iter()
        .map(|s| s + Complex64::new(std * noise.gaussian(), std * noise.gaussian()))
        .collect();
    let decided = qpsk_demap(&SampleVector::time(rx, 1.0).unwrap());
    let (errors, ber) = count_bit_errors(&bits, &decided).unwrap();
    assert!(errors >= 500);
    let want = qpsk_ber_analytic(ebn0);
    assert!((ber / want - 1.0).abs() < 0.1, "{ber} vs {want}");
}

#[test]
fn unclipped_ofdm_chain_meets_analytic_at_6db() {
    let cfg = OfdmConfig::default();
    let tx = Transmitter::with_defaults(&cfg).unwrap();
    let mut errors = 0;
    let mut bits_total = 0;
    let mut i = 0u64;
    while errors < 500 || i < 500 {
        let bits = random_bits(cfg.bits_per_block(), &mut Rng::for_trial(9, &[1, i])).unwrap();
        let x = qpsk_map(&bits, cfg.bandwidth()).unwrap();
        let xp = tx.unclipped(x.data()).unwrap();
        let rx = add_awgn(&xp, 6.0, &cfg, &mut Rng::for_trial(9, &[2, i]));
        let decided = qpsk_demap(&SampleVector::frequency(receive(&tx, &rx).unwrap(), cfg.bandwidth()).unwrap());
        errors += count_bit_errors(&bits, &decided).unwrap().0;
        bits_total += bits.len();
        i += 1;
    }
    let ber = errors as f64 / bits_total as f64;
    let want = qpsk_ber_analytic(6.0);
    assert!((ber / want - 1.0).abs() < 0.1, "{ber} vs {want}");
}

#[test]
fn noise_variance_matches_calibration() {
    let cfg = OfdmConfig::default();
    let xp = PassbandSignal::new(vec![0.25; 1 << 20], &cfg).unwrap();
    let spec = NoiseSpec::new(4.0, xp.mean_power(), &cfg);
    let expect = 0.0625 * 8.0 / (2.0 * 2.0 * 10f64.powf(0.4));
    assert!((spec.variance() / expect - 1.0).abs() < 1e-12);
    let y = add_awgn(&xp, 4.0, &cfg, &mut Rng::new(1, 1));
    let n = y.len() as f64;
    let diffs: Vec<f64> = y.data().iter().zip(xp.data()).map(|(a, b)| a - b).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((var / expect - 1.0).abs() < 0.01);
    assert!(mean.abs() < 5.0 * (expect / n).sqrt());
}

proptest! {
    #[test]
    fn map_demap_roundtrip(bits in prop::collection::vec(0u8..2, 1..64).prop_map(|mut b| { if b.len() % 2 == 1 { b.pop(); } b }).prop_filter("non-empty", |b| !b.is_empty())) {
        let block = BitBlock::new(bits.clone()).unwrap();
        let back = qpsk_demap(&qpsk_map(&block, 1.0).unwrap());
        prop_assert_eq!(back.bits(), &bits[..]);
    }

    #[test]
    fn upconvert_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let cfg = OfdmConfig::default();
        let block = |seed| {
            let bits = random_bits(cfg.bits_per_block(), &mut Rng::new(seed, 0)).unwrap();
            ofdm_modulate(&qpsk_map(&bits, cfg.bandwidth()).unwrap(), &cfg).unwrap()
        };
        let (x, y) = (block(s1), block(s2));
        let combo: Vec<Complex64> = x.data().iter().zip(y.data()).map(|(p, q)| p * a + q * b).collect();
        let lhs = upconvert(&SampleVector::time(combo, cfg.sample_rate()).unwrap(), &cfg).unwrap();
        let (ux, uy) = (upconvert(&x, &cfg).unwrap(), upconvert(&y, &cfg).unwrap());
        for ((l, p), q) in lhs.data().iter().zip(ux.data()).zip(uy.data()) {
            prop_assert!((l - (a * p + b * q)).abs() < 1e-12);
        }
    }

    #[test]
    fn downconvert_of_zero_is_zero(len in 1usize..512) {
        let cfg = OfdmConfig::default();
        let xp = PassbandSignal::new(vec![0.0; len], &cfg).unwrap();
        prop_assert!(downconvert(&xp, &cfg).data().iter().all(|z| z.norm() == 0.0));
    }
}
