mod common;

use afdm_core::daft::{
    append_cpp, daft, idaft, oversampled_envelope, remove_prefix, SymbolBlock, TimeSignal,
};
use afdm_core::fft::FftPlan;
use afdm_core::{ChirpParams, Complex64};
use common::*;
use proptest::prelude::*;
use rand::Rng;
use rustfft::FftPlanner;

#[test]
fn fft_matches_rustfft_for_radix2_and_bluestein() {
    let mut r = rng(1);
    let mut planner = FftPlanner::<f64>::new();
    for n in [1usize, 2, 6, 8, 12, 16, 64, 100, 640] {
        let x = gaussian_vec(&mut r, n, 1.0);
        let mut ours = x.clone();
        FftPlan::new(n).forward(&mut ours);
        let mut theirs = x.clone();
        planner.plan_fft_forward(n).process(&mut theirs);
        assert!(rel_err(&ours, &theirs) < 1e-12, "n = {n}");
        let mut inv = x.clone();
        FftPlan::new(n).inverse(&mut inv);
        let mut theirs = x.clone();
        planner.plan_fft_inverse(n).process(&mut theirs);
        assert!(rel_err(&inv, &theirs) < 1e-12, "n = {n}");
    }
}

#[test]
fn idaft_matches_direct_summation() {
    let mut r = rng(2);
    let x = gaussian_block(&mut r, 8);
    let s = idaft(&x, ChirpParams::new(0.37, 0.11).unwrap());
    let d = idaft_direct(x.as_slice(), 0.37, 0.11);
    let max = s
        .samples
        .iter()
        .zip(&d)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(max < 1e-12, "{max}");
}

#[test]
fn impulse_gives_constant_modulus_chirp() {
    let x = SymbolBlock::impulse(16, 0).unwrap();
    let c = ChirpParams::new(0.21, 0.64).unwrap();
    let s = idaft(&x, c);
    for (n, v) in s.samples.iter().enumerate() {
        let expect = cis(0.21 * (n * n) as f64) / 4.0;
        assert!((v - expect).norm() < 1e-12);
    }
}

#[test]
fn zero_chirp_reduces_to_dft_pair() {
    let mut r = rng(3);
    let mut planner = FftPlanner::<f64>::new();
    for n in [8usize, 16, 64] {
        let x = gaussian_block(&mut r, n);
        let s = idaft(&x, ChirpParams::OFDM);
        let mut oracle = x.as_slice().to_vec();
        planner.plan_fft_inverse(n).process(&mut oracle);
        let scale = 1.0 / (n as f64).sqrt();
        oracle.iter_mut().for_each(|v| *v *= scale);
        assert!(rel_err(&s.samples, &oracle) < 1e-10);

        let back = daft(
            &TimeSignal::critical(x.as_slice().to_vec()),
            ChirpParams::OFDM,
            n,
        )
        .unwrap();
        let mut fwd = x.as_slice().to_vec();
        planner.plan_fft_forward(n).process(&mut fwd);
        fwd.iter_mut().for_each(|v| *v *= scale);
        assert!(rel_err(back.as_slice(), &fwd) < 1e-10);
    }
}

#[test]
fn round_trip_and_parseval_on_random_cases() {
    let mut r = rng(4);
    for n in [8usize, 16, 64] {
        for _ in 0..100 {
            let x = gaussian_block(&mut r, n);
            let c = ChirpParams::new(r.random(), r.random()).unwrap();
            let s = idaft(&x, c);
            assert!(((s.energy() - x.energy()) / x.energy()).abs() < 1e-12);
            let y = daft(&s, c, n).unwrap();
            assert!(rel_err(y.as_slice(), x.as_slice()) < 1e-10);

            let rs = TimeSignal::critical(gaussian_vec(&mut r, n, 1.0));
            let fx = daft(&rs, c, n).unwrap();
            assert!(((fx.energy() - rs.energy()) / rs.energy()).abs() < 1e-12);
        }
    }
}

#[test]
fn daft_rejects_length_mismatch_and_bad_blocks() {
    let s = TimeSignal::critical(vec![Complex64::new(1.0, 0.0); 8]);
    assert!(daft(&s, ChirpParams::OFDM, 16).is_err());
    assert!(SymbolBlock::new(vec![]).is_err());
    assert!(SymbolBlock::new(vec![Complex64::new(1.0, 0.0); 3]).is_err());
    assert!(SymbolBlock::new(vec![Complex64::new(f64::NAN, 0.0); 4]).is_err());
}

#[test]
fn cpp_phase_rule() {
    let mut r = rng(5);
    let x = gaussian_block(&mut r, 8);
    let s = idaft(&x, ChirpParams::new(0.3, 0.2).unwrap());
    let p = append_cpp(&s, 0.3, 2).unwrap();
    assert_eq!(p.len(), 10);
    let expect = s.samples[7] * cis(-0.3 * (64.0 - 16.0));
    assert!((p.samples[1] - expect).norm() < 1e-12);
    let expect0 = s.samples[6] * cis(-0.3 * (64.0 - 32.0));
    assert!((p.samples[0] - expect0).norm() < 1e-12);
    assert_eq!(&p.samples[2..], &s.samples[..]);

    let same = append_cpp(&s, 0.3, 0).unwrap();
    assert_eq!(same.samples, s.samples);
    assert!(append_cpp(&s, 0.3, 8).is_err());
    assert_eq!(remove_prefix(&p, 2, 8).unwrap().samples, s.samples);
}

#[test]
fn cpp_equals_cp_when_2nc1_is_integer() {
    let mut r = rng(6);
    let n = 16;
    let x = gaussian_block(&mut r, n);
    for k in 0..5 {
        let c1 = k as f64 / (2.0 * n as f64);
        let s = idaft(&x, ChirpParams::new(c1, 0.4).unwrap());
        let p = append_cpp(&s, c1, 5).unwrap();
        for i in 0..5 {
            assert!((p.samples[i] - s.samples[n - 5 + i]).norm() < 1e-12);
        }
    }
    // a generic c1 does not give a plain cyclic prefix
    let c1 = 0.013;
    let s = idaft(&x, ChirpParams::new(c1, 0.4).unwrap());
    let p = append_cpp(&s, c1, 5).unwrap();
    assert!((p.samples[4] - s.samples[n - 1]).norm() > 1e-3);
}

#[test]
fn envelope_at_unit_oversampling_matches_idaft_modulus() {
    let mut r = rng(7);
    let x = gaussian_block(&mut r, 16);
    let c = ChirpParams::new(0.77, 0.31).unwrap();
    let s = idaft(&x, c);
    let e = oversampled_envelope(&x, c.c2(), 1).unwrap();
    for (a, b) in s.samples.iter().zip(&e.samples) {
        assert!((a.norm() - b.norm()).abs() < 1e-12);
    }
}

#[test]
fn envelope_of_impulse_is_flat() {
    let x = SymbolBlock::impulse(16, 5).unwrap();
    let e = oversampled_envelope(&x, 0.3, 10).unwrap();
    assert_eq!(e.len(), 160);
    for v in &e.samples {
        assert!((v.norm() - 0.25).abs() < 1e-13);
    }
}

#[test]
fn envelope_dense_and_sparse_paths_agree() {
    let mut r = rng(8);
    // 64 active symbols use the FFT path, 4 active use direct synthesis
    let full = gaussian_block(&mut r, 64);
    let mut sparse = vec![Complex64::new(0.0, 0.0); 64];
    for m in 10..14 {
        sparse[m] = cgauss(&mut r, 1.0);
    }
    let sparse = SymbolBlock::new(sparse).unwrap();
    for x in [&full, &sparse] {
        let e = oversampled_envelope(x, 0.17, 10).unwrap();
        for (k, v) in e.samples.iter().enumerate().step_by(37) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, s) in x.as_slice().iter().enumerate() {
                acc += s * cis(0.17 * (m * m) as f64 + (m * k) as f64 / 640.0);
            }
            assert!((acc / 8.0 - v).norm() < 1e-12);
        }
    }
}

#[test]
fn oversampled_peak_close_to_dense_grid() {
    let mut r = rng(9);
    let x = qpsk_block(&mut r, 16);
    let e = oversampled_envelope(&x, 0.2, 10).unwrap();
    let coarse = e.samples.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let dense = oversampled_envelope(&x, 0.2, 10_000).unwrap();
    let fine = dense
        .samples
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max);
    assert!(10.0 * (fine / coarse).log10() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_unitarity(seed in any::<u64>(), c1 in 0.0f64..1.0, c2 in 0.0f64..1.0, k in 2usize..6) {
        let n = 1 << k;
        let mut r = rng(seed);
        let x = gaussian_block(&mut r, n);
        let c = ChirpParams::new(c1, c2).unwrap();
        let y = daft(&idaft(&x, c), c, n).unwrap();
        prop_assert!(rel_err(y.as_slice(), x.as_slice()) < 1e-10);
    }

    #[test]
    fn prop_chirp_params_wrap(c1 in -1e6f64..1e6, c2 in -1e6f64..1e6) {
        let c = ChirpParams::new(c1, c2).unwrap();
        prop_assert!((0.0..1.0).contains(&c.c1()));
        prop_assert!((0.0..1.0).contains(&c.c2()));
    }

    #[test]
    fn prop_cpp_cp_equivalence_iff_integer(k in 0u32..128, n in 2usize..9, frac in 0.01f64..0.99) {
        let n = 2 * n;
        let x = SymbolBlock::new((0..n).map(|m| Complex64::new(1.0 + m as f64, 0.5)).collect()).unwrap();
        let c1 = k as f64 / (2.0 * n as f64);
        let s = idaft(&x, ChirpParams::new(c1, 0.0).unwrap());
        let p = append_cpp(&s, c1, 1).unwrap();
        prop_assert!((p.samples[0] - s.samples[n - 1]).norm() < 1e-9);
        let c1b = (k as f64 + frac) / (2.0 * n as f64);
        let s = idaft(&x, ChirpParams::new(c1b, 0.0).unwrap());
        let p = append_cpp(&s, c1b, 1).unwrap();
        // the prefix phase is exp(-j 2 pi c1 (N^2 - 2N)) = exp(-j 2 pi (k + frac)(N - 2) / 2)
        let phase = cis(-c1b * ((n * n) as f64 - 2.0 * n as f64));
        prop_assert!((p.samples[0] - s.samples[n - 1] * phase).norm() < 1e-9);
    }
}
