//! Sweep execution: one record per quench time per method.
//!
//! Modes inside a record are integrated in parallel (inside the engine);
//! the record list itself is assembled in deterministic order, so identical
//! configs produce identical outputs under any thread schedule. Per-record
//! failures are collected rather than aborting the sweep; callers flush the
//! partial results together with the failure manifest.

use serde::Serialize;

use crate::config::{MethodName, SweepConfig};
use crate::records::SweepRecord;
use quench_fcs::counting::{
    closed_form_spectrum, cumulants_from_spectrum, pmf_from_spectrum, total_kink_cumulants,
    ExcitationSpectrum, KinkDistribution,
};
use quench_fcs::lz_engine::excitation_spectrum;
use quench_fcs::noise::dephased_spectrum;
use quench_fcs::{Error, Result};

/// One record that could not be computed.
#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub a: f64,
    pub method: MethodName,
    pub error: String,
}

/// Partial results plus the failure manifest.
#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
}

/// Compute the excitation spectrum for one `(A, method)` cell.
pub fn spectrum_for(cfg: &SweepConfig, a: f64, method: MethodName) -> Result<ExcitationSpectrum> {
    let spec = cfg.chain_spec()?;
    let schedule = cfg.schedule_for(a)?;
    match method {
        MethodName::ClosedForm => Ok(closed_form_spectrum(&spec, a)),
        MethodName::Unitary => {
            let results = excitation_spectrum(&spec, &schedule, &cfg.integrator()?)?;
            ExcitationSpectrum::from_mode_results(&results)
        }
        MethodName::Dephased => {
            let results =
                dephased_spectrum(&spec, &schedule, &cfg.integrator()?, &cfg.dephasing()?)?;
            ExcitationSpectrum::from_mode_results(&results)
        }
    }
}

/// Kink-pair distribution for one `(A, method)` cell.
pub fn distribution_for(cfg: &SweepConfig, a: f64, method: MethodName) -> Result<KinkDistribution> {
    Ok(pmf_from_spectrum(&spectrum_for(cfg, a, method)?))
}

fn record_for(cfg: &SweepConfig, a: f64, method: MethodName, hash: &str) -> Result<SweepRecord> {
    let spectrum = spectrum_for(cfg, a, method)?;
    let kappa = cumulants_from_spectrum(&spectrum);
    if !(kappa.0.is_finite() && kappa.1.is_finite() && kappa.2.is_finite()) || kappa.1 < 0.0 {
        return Err(Error::numerical(format!(
            "cumulants out of contract at A = {a}, method {method}: {kappa:?}"
        )));
    }
    let total = total_kink_cumulants(kappa);
    let pmf = if cfg.emit_pmf { Some(pmf_from_spectrum(&spectrum)) } else { None };
    Ok(SweepRecord {
        a,
        method,
        kappa1: kappa.0,
        kappa2: kappa.1,
        kappa3: kappa.2,
        kappa1_total: total.0,
        kappa2_total: total.1,
        kappa3_total: total.2,
        gamma: if method == MethodName::Dephased { cfg.gamma } else { 0.0 },
        config_hash: hash.to_string(),
        pmf_file: None,
        pmf,
    })
}

/// Run the configured sweep: records ordered by ascending `A`, then by the
/// configured method order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let a_values = cfg.a_values()?;
    let hash = cfg.physics_hash();
    let mut outcome = SweepOutcome::default();
    for &a in &a_values {
        for &method in &cfg.methods {
            match record_for(cfg, a, method, &hash) {
                Ok(record) => outcome.records.push(record),
                Err(e) => {
                    outcome.failures.push(SweepFailure { a, method, error: e.to_string() })
                }
            }
        }
    }
    if outcome.records.is_empty() && !outcome.failures.is_empty() {
        let first = &outcome.failures[0];
        return Err(Error::numerical(format!(
            "every sweep cell failed; first failure at A = {}, method {}: {}",
            first.a, first.method, first.error
        )));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use quench_fcs::counting::kzm_mean;

    #[test]
    fn closed_form_sweep_shapes_and_determinism() {
        let cfg = SweepConfig {
            n: 1000,
            a_min: 1.0,
            a_max: 100.0,
            a_points: 20,
            ..Default::default()
        };
        let first = run_sweep(&cfg).unwrap();
        assert!(first.failures.is_empty());
        assert_eq!(first.records.len(), 20);
        for w in first.records.windows(2) {
            assert!(w[0].a < w[1].a);
        }
        let second = run_sweep(&cfg).unwrap();
        for (x, y) in first.records.iter().zip(&second.records) {
            assert_eq!(x.kappa1.to_bits(), y.kappa1.to_bits());
            assert_eq!(x.kappa3.to_bits(), y.kappa3.to_bits());
        }
    }

    #[test]
    fn closed_form_tracks_kzm_mean_at_slow_quench() {
        let cfg = SweepConfig { n: 1000, a: Some(25.0), ..Default::default() };
        let outcome = run_sweep(&cfg).unwrap();
        let r = &outcome.records[0];
        assert_relative_eq!(r.kappa1, kzm_mean(1000, 25.0), max_relative = 1e-3);
    }

    #[test]
    fn total_kink_columns_are_doubled_cumulants() {
        let cfg = SweepConfig {
            n: 64,
            a_min: 1.0,
            a_max: 10.0,
            a_points: 5,
            methods: vec![MethodName::ClosedForm, MethodName::Unitary],
            ..Default::default()
        };
        let outcome = run_sweep(&cfg).unwrap();
        assert_eq!(outcome.records.len(), 10);
        for r in &outcome.records {
            assert_eq!(r.kappa1_total, 2.0 * r.kappa1);
            assert_eq!(r.kappa2_total, 4.0 * r.kappa2);
            assert_eq!(r.kappa3_total, 8.0 * r.kappa3);
        }
    }

    #[test]
    fn gamma_column_reflects_method() {
        let cfg = SweepConfig {
            n: 16,
            a: Some(2.0),
            methods: vec![MethodName::ClosedForm, MethodName::Dephased],
            gamma: 0.01,
            ..Default::default()
        };
        let outcome = run_sweep(&cfg).unwrap();
        assert_eq!(outcome.records[0].gamma, 0.0);
        assert_eq!(outcome.records[1].gamma, 0.01);
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let cfg = SweepConfig { methods: vec![], ..Default::default() };
        assert!(run_sweep(&cfg).is_err());
    }
}
