//! Power-law fits of cumulants against quench time: ordinary least squares
//! on `(log A, log kappa_q)`.

use serde::{Deserialize, Serialize};

use crate::records::SweepRecord;
use quench_fcs::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub q: u8,
    /// Slope of `log kappa_q` vs `log A`.
    pub exponent: f64,
    /// Prefactor `C` in `kappa_q = C A^exponent`.
    pub amplitude: f64,
    /// Standard error of the exponent.
    pub stderr: f64,
    pub window: [f64; 2],
    pub points: usize,
    /// Set when `kappa_q` is not monotone over the window (the anti-KZM
    /// signature); the fit still runs, but a power law is suspect.
    pub non_monotone: bool,
}

/// Fit `kappa_q ~ A^exponent` over records with `A` inside `window`.
///
/// Requires at least three in-window records with strictly positive
/// `kappa_q`; a non-positive cumulant is reported with its offending `A`
/// since its log is undefined.
pub fn fit_power_law(records: &[SweepRecord], q: u8, window: [f64; 2]) -> Result<PowerLawFit> {
    if !(1..=3).contains(&q) {
        return Err(Error::invalid(format!("cumulant order must be 1, 2 or 3, got {q}")));
    }
    let [lo, hi] = window;
    let mut selected: Vec<&SweepRecord> =
        records.iter().filter(|r| r.a >= lo && r.a <= hi).collect();
    selected.sort_by(|x, y| x.a.total_cmp(&y.a));
    if selected.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 records inside the window [{lo}, {hi}], found {}",
            selected.len()
        )));
    }
    for r in &selected {
        let value = r.kappa(q);
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::invalid(format!(
                "kappa_{q} = {value} at A = {} is not positive; log-log fit undefined",
                r.a
            )));
        }
    }
    let non_monotone = selected.windows(2).any(|w| w[1].kappa(q) > w[0].kappa(q));
    if non_monotone {
        eprintln!(
            "warning: kappa_{q} is not monotone over the fit window [{lo}, {hi}] \
             (anti-KZM upturn?); the power-law fit may not be meaningful"
        );
    }

    let xs: Vec<f64> = selected.iter().map(|r| r.a.ln()).collect();
    let ys: Vec<f64> = selected.iter().map(|r| r.kappa(q).ln()).collect();
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("all in-window records share the same A".to_string()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = if selected.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };

    Ok(PowerLawFit {
        q,
        exponent: slope,
        amplitude: intercept.exp(),
        stderr,
        window,
        points: selected.len(),
        non_monotone,
    })
}
