//! Integrated dynamics against the closed-form crossing probabilities across
//! quench speeds: agreement past A ~ 2, breakdown at fast quenches.

use quench_fcs::counting::{
    cumulants_from_spectrum, exact_cumulant, lz_probability, ExcitationSpectrum,
};
use quench_fcs::lz_engine::excitation_spectrum;
use quench_fcs::modes::{ChainSpec, QuenchSchedule};
use quench_fcs::IntegratorConfig;

fn unitary_spectrum(n: usize, a: f64) -> Vec<quench_fcs::ModeResult> {
    let spec = ChainSpec::new(n, 1.0).unwrap();
    let schedule = QuenchSchedule::linear(a).unwrap();
    excitation_spectrum(&spec, &schedule, &IntegratorConfig::default()).unwrap()
}

#[test]
fn mean_agrees_with_erf_form_past_a_two() {
    for a in [2.0, 5.0, 20.0] {
        let results = unitary_spectrum(100, a);
        let s = ExcitationSpectrum::from_mode_results(&results).unwrap();
        let (k1, _, _) = cumulants_from_spectrum(&s);
        let erf_k1 = exact_cumulant(1, 100, a).unwrap();
        let dev = (k1 - erf_k1).abs() / erf_k1;
        assert!(dev < 0.05, "A = {a}: relative deviation {dev}");
    }
}

#[test]
fn mean_breaks_from_erf_form_at_fast_quench() {
    // at A = 1 the crossing formula no longer describes the integrated
    // dynamics: the deviation of the summed mean is well above 5%
    let results = unitary_spectrum(100, 1.0);
    let s = ExcitationSpectrum::from_mode_results(&results).unwrap();
    let (k1, _, _) = cumulants_from_spectrum(&s);
    let erf_k1 = exact_cumulant(1, 100, 1.0).unwrap();
    let dev = (k1 - erf_k1).abs() / erf_k1;
    assert!(dev > 0.05, "expected fast-quench breakdown, got deviation {dev}");
}

#[test]
fn pointwise_deviation_is_small_when_slow_and_large_when_fast() {
    let max_dev = |a: f64| -> f64 {
        unitary_spectrum(100, a)
            .iter()
            .map(|r| (r.p - lz_probability(r.k, a)).abs())
            .fold(0.0, f64::max)
    };
    assert!(max_dev(20.0) < 0.01);
    assert!(max_dev(1.0) > 0.02);
}
