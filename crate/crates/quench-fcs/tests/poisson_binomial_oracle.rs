//! Exhaustive-enumeration oracle for the Poisson binomial machinery.

use quench_fcs::counting::{pmf_from_spectrum, pmf_via_characteristic, ExcitationSpectrum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Brute-force PMF: walk all `2^M` outcomes and accumulate their weights.
/// Independent of the convolution path it checks.
fn enumerate_pmf(ps: &[f64]) -> Vec<f64> {
    let m = ps.len();
    let mut pmf = vec![0.0; m + 1];
    for outcome in 0..1usize << m {
        let mut weight = 1.0;
        let mut excited = 0usize;
        for (i, &p) in ps.iter().enumerate() {
            if outcome & (1 << i) != 0 {
                weight *= p;
                excited += 1;
            } else {
                weight *= 1.0 - p;
            }
        }
        pmf[excited] += weight;
    }
    pmf
}

#[test]
fn dp_matches_enumeration_for_200_random_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
    for trial in 0..200 {
        let m = rng.random_range(1..=12);
        let ps: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
        let spectrum = ExcitationSpectrum::new(ps.clone()).unwrap();
        let dp = pmf_from_spectrum(&spectrum);
        let brute = enumerate_pmf(&ps);
        for (n, (a, b)) in dp.pmf.iter().zip(&brute).enumerate() {
            assert!(
                (a - b).abs() <= 1e-12,
                "trial {trial}, n = {n}: dp = {a}, enumeration = {b}"
            );
        }
    }
}

#[test]
fn dp_matches_dft_up_to_512_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xcafe);
    for &m in &[2usize, 16, 64, 200, 512] {
        let ps: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
        let spectrum = ExcitationSpectrum::new(ps).unwrap();
        let dp = pmf_from_spectrum(&spectrum);
        let dft = pmf_via_characteristic(&spectrum).unwrap();
        let sup = dp
            .pmf
            .iter()
            .zip(&dft.pmf)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup <= 1e-9, "sup-norm {sup} at {m} modes");
        let norm: f64 = dp.pmf.iter().sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn enumeration_edge_cases() {
    // all modes certain: mass on the top count
    let spectrum = ExcitationSpectrum::new(vec![1.0; 5]).unwrap();
    let dp = pmf_from_spectrum(&spectrum);
    assert_eq!(dp.pmf[5], 1.0);
    assert!(dp.pmf[..5].iter().all(|&p| p == 0.0));

    // empty spectrum: the empty product, P(0) = 1
    let spectrum = ExcitationSpectrum::new(vec![]).unwrap();
    let dp = pmf_from_spectrum(&spectrum);
    assert_eq!(dp.pmf, vec![1.0]);
}
