//! Full counting statistics of kink pairs.
//!
//! Excitations of different momentum modes are independent Bernoulli trials,
//! so the kink-pair number follows a Poisson binomial distribution. This
//! module turns a set of per-mode excitation probabilities into the exact
//! PMF (iterative convolution), a characteristic-function cross-check, and
//! the first three cumulants, and provides the closed forms valid for the
//! Landau-Zener excitation profile: the Kibble-Zurek mean, the erf-form
//! cumulants, their scaling-limit constants, the Gaussian PMF approximation,
//! and the polylogarithmic characteristic function.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lz_engine::ModeResult;
use crate::modes::{momentum_grid, ChainSpec};

/// Scaling-limit variance constant `1 - 1/sqrt(2)`.
pub const C2: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// Scaling-limit third-cumulant constant `1 - 3/sqrt(2) + 2/sqrt(3)`.
pub const C3: f64 = 1.0 - 3.0 * std::f64::consts::FRAC_1_SQRT_2 + 2.0 / 1.732_050_807_568_877_2;

/// The closed-form expressions implemented by this module, by provenance:
/// per-mode crossing probability ([`lz_probability`]), erf-form cumulants
/// ([`exact_cumulant`]), their scaling-limit constants
/// ([`scaling_cumulant`]), the normal PMF approximation ([`gaussian_pmf`]),
/// and the polylogarithmic characteristic function
/// ([`polylog_characteristic`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormKind {
    LzFormula,
    ErfExact,
    ScalingLimit,
    GaussianPmf,
    PolylogCf,
}

/// Per-mode excitation probabilities indexed by the positive-momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSpectrum {
    probabilities: Vec<f64>,
}

impl ExcitationSpectrum {
    /// Every entry must lie in `[0, 1]`.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        for (i, &p) in probabilities.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::invalid(format!(
                    "excitation probability out of [0, 1] at mode {i}: {p}"
                )));
            }
        }
        Ok(ExcitationSpectrum { probabilities })
    }

    pub fn from_mode_results(results: &[ModeResult]) -> Result<Self> {
        Self::new(results.iter().map(|r| r.p).collect())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// Kink-pair number distribution `P(n)`, `n = 0..N/2`, with its first three
/// cumulants.
#[derive(Debug, Clone, PartialEq)]
pub struct KinkDistribution {
    pub pmf: Vec<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
}

impl KinkDistribution {
    /// Moments of the PMF itself (used when no spectrum is available, and by
    /// consistency tests).
    pub fn from_pmf(pmf: Vec<f64>) -> Result<Self> {
        let pmf = clamp_and_renormalize(pmf)?;
        let kappa1: f64 = pmf.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let kappa2: f64 =
            pmf.iter().enumerate().map(|(n, p)| (n as f64 - kappa1).powi(2) * p).sum();
        let kappa3: f64 =
            pmf.iter().enumerate().map(|(n, p)| (n as f64 - kappa1).powi(3) * p).sum();
        Ok(KinkDistribution { pmf, kappa1, kappa2, kappa3 })
    }

    pub fn total_variation_distance(&self, other: &KinkDistribution) -> f64 {
        let len = self.pmf.len().max(other.pmf.len());
        let mut acc = 0.0;
        for n in 0..len {
            let a = self.pmf.get(n).copied().unwrap_or(0.0);
            let b = other.pmf.get(n).copied().unwrap_or(0.0);
            acc += (a - b).abs();
        }
        0.5 * acc
    }
}

// Round-off guard: probabilities in [-1e-14, 0) are clamped to zero and the
// PMF renormalized; anything more negative is a logic error upstream.
fn clamp_and_renormalize(mut pmf: Vec<f64>) -> Result<Vec<f64>> {
    for p in &mut pmf {
        if *p < 0.0 {
            if *p < -1e-14 {
                return Err(Error::numerical(format!("PMF entry below round-off floor: {p}")));
            }
            *p = 0.0;
        }
    }
    let total: f64 = compensated_sum(pmf.iter().copied());
    if total.is_nan() || total <= 0.0 {
        return Err(Error::numerical("PMF sums to zero".to_string()));
    }
    for p in &mut pmf {
        *p /= total;
    }
    Ok(pmf)
}

/// Neumaier-compensated summation.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Closed-form Landau-Zener excitation probability
/// `p = exp(-2 pi A w^2)` with `w = pi - k` the distance to the soft point.
///
/// Near `w = 0` this coincides with the asymptotic crossing formula
/// `exp(-2 pi A sin^2 k)`; the Gaussian-in-`w` form is the one whose grid
/// sums integrate to the erf-form cumulants below.
pub fn lz_probability(k: f64, a: f64) -> f64 {
    let w = std::f64::consts::PI - k;
    (-2.0 * std::f64::consts::PI * a * w * w).exp()
}

/// The closed-form spectrum over the positive-momentum grid of `spec`.
pub fn closed_form_spectrum(spec: &ChainSpec, a: f64) -> ExcitationSpectrum {
    ExcitationSpectrum {
        probabilities: momentum_grid(spec).iter().map(|m| lz_probability(m.k, a)).collect(),
    }
}

/// Exact Poisson binomial PMF by iterative convolution over modes, `O(M^2)`
/// for `M` modes. Cumulants attached from the spectrum sums.
pub fn pmf_from_spectrum(spectrum: &ExcitationSpectrum) -> KinkDistribution {
    let mut pmf = vec![0.0; spectrum.len() + 1];
    pmf[0] = 1.0;
    for (mode, &p) in spectrum.probabilities.iter().enumerate() {
        let q = 1.0 - p;
        // convolve in place, highest count first
        for n in (0..=mode + 1).rev() {
            let stay = if n <= mode { pmf[n] * q } else { 0.0 };
            let up = if n > 0 { pmf[n - 1] * p } else { 0.0 };
            pmf[n] = stay + up;
        }
    }
    let (kappa1, kappa2, kappa3) = cumulants_from_spectrum(spectrum);
    KinkDistribution { pmf, kappa1, kappa2, kappa3 }
}

/// PMF via the characteristic function evaluated on the `M = N/2 + 1` point
/// angle grid and inverted by a discrete Fourier sum.
///
/// The distribution is supported on `0..=N/2`, so the inversion is exact up
/// to round-off; this path exists as a cross-check of [`pmf_from_spectrum`].
pub fn pmf_via_characteristic(spectrum: &ExcitationSpectrum) -> Result<KinkDistribution> {
    let m = spectrum.len() + 1;
    let cf: Vec<Complex64> = (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            characteristic_product(spectrum, theta)
        })
        .collect();
    let mut pmf = Vec::with_capacity(m);
    for n in 0..m {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in cf.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (n * j % m) as f64 / m as f64;
            acc += c * Complex64::from_polar(1.0, phase);
        }
        pmf.push(acc.re / m as f64);
    }
    let pmf = clamp_and_renormalize(pmf)?;
    let (kappa1, kappa2, kappa3) = cumulants_from_spectrum(spectrum);
    Ok(KinkDistribution { pmf, kappa1, kappa2, kappa3 })
}

/// Product-form characteristic function
/// `prod_k [1 + (e^{i theta} - 1) p_k]`.
pub fn characteristic_product(spectrum: &ExcitationSpectrum, theta: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, theta) - 1.0;
    spectrum
        .probabilities
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &p| acc * (Complex64::new(1.0, 0.0) + phase * p))
}

/// First three cumulants of the Poisson binomial distribution:
/// `k1 = sum p`, `k2 = sum p(1-p)`, `k3 = sum p(1-p)(1-2p)`,
/// each in compensated summation.
pub fn cumulants_from_spectrum(spectrum: &ExcitationSpectrum) -> (f64, f64, f64) {
    let ps = &spectrum.probabilities;
    let k1 = compensated_sum(ps.iter().copied());
    let k2 = compensated_sum(ps.iter().map(|&p| p * (1.0 - p)));
    let k3 = compensated_sum(ps.iter().map(|&p| p * (1.0 - p) * (1.0 - 2.0 * p)));
    (k1, k2, k3)
}

/// Kibble-Zurek mean kink-pair number `<n> = (N / 4 pi) / sqrt(2 A)`.
pub fn kzm_mean(n: usize, a: f64) -> f64 {
    n as f64 / (4.0 * std::f64::consts::PI) / (2.0 * a).sqrt()
}

/// Erf-form cumulants: the continuum limit of the grid sums of the
/// closed-form excitation profile, valid for moderately fast quenches.
///
/// - `q = 1`: `<n> erf(sqrt(2 pi^3 A))`
/// - `q = 2`: `<n> [erf(sqrt(2 pi^3 A)) - erf(sqrt(4 pi^3 A)) / sqrt(2)]`
/// - `q = 3`: `<n> [erf(sqrt(2 pi^3 A)) - 3 erf(sqrt(4 pi^3 A)) / sqrt(2)
///   + 2 erf(sqrt(6 pi^3 A)) / sqrt(3)]`
pub fn exact_cumulant(q: u8, n: usize, a: f64) -> Result<f64> {
    let pi3 = std::f64::consts::PI.powi(3);
    let erf_q = |m: f64| libm::erf((2.0 * m * pi3 * a).sqrt());
    let factor = match q {
        1 => erf_q(1.0),
        2 => erf_q(1.0) - erf_q(2.0) / 2.0f64.sqrt(),
        3 => erf_q(1.0) - 3.0 * erf_q(2.0) / 2.0f64.sqrt() + 2.0 * erf_q(3.0) / 3.0f64.sqrt(),
        _ => return Err(Error::invalid(format!("cumulant order must be 1, 2 or 3, got {q}"))),
    };
    Ok(kzm_mean(n, a) * factor)
}

/// Scaling-limit cumulants `kappa_q = c_q <n>` with `c_1 = 1`, `c_2 = 1 -
/// 1/sqrt(2)`, `c_3 = 1 - 3/sqrt(2) + 2/sqrt(3)`.
pub fn scaling_cumulant(q: u8, n: usize, a: f64) -> Result<f64> {
    let c = match q {
        1 => 1.0,
        2 => C2,
        3 => C3,
        _ => return Err(Error::invalid(format!("cumulant order must be 1, 2 or 3, got {q}"))),
    };
    Ok(c * kzm_mean(n, a))
}

/// Quench-parameter threshold `A > 2 / (q pi^3)` beyond which the erf factors
/// of `kappa_q` saturate and the scaling limit applies.
pub fn scaling_onset(q: u8) -> Result<f64> {
    if q == 0 {
        return Err(Error::invalid("cumulant order must be >= 1".to_string()));
    }
    Ok(2.0 / (q as f64 * std::f64::consts::PI.powi(3)))
}

/// Normal approximation to the kink-pair PMF,
/// `P(n) = (6 <n> / pi)^{-1/2} exp[-pi^2 (n - <n>)^2 / (6 <n>)]`,
/// valid in the scaling limit away from the adiabatic regime.
pub fn gaussian_pmf(n: i64, mean_kzm: f64) -> Result<f64> {
    if !mean_kzm.is_finite() || mean_kzm <= 0.0 {
        return Err(Error::invalid(format!("mean must be positive, got {mean_kzm}")));
    }
    let pi = std::f64::consts::PI;
    let d = n as f64 - mean_kzm;
    Ok((6.0 * mean_kzm / pi).sqrt().recip() * (-pi * pi * d * d / (6.0 * mean_kzm)).exp())
}

/// Scaling-limit characteristic function
/// `P~(theta) = exp[-<n> Li_{3/2}(1 - e^{i theta})]`.
///
/// `Li_{3/2}` is evaluated by its defining series, which converges only for
/// `|1 - e^{i theta}| <= 1`, i.e. `|theta| <= pi/3`; outside (and in a
/// hairline band at the boundary, where the series needs unboundedly many
/// terms) the call reports out-of-domain instead of extrapolating.
pub fn polylog_characteristic(theta: f64, mean_kzm: f64) -> Result<Complex64> {
    Ok(polylog_log_characteristic(theta, mean_kzm)?.exp())
}

/// Logarithm of [`polylog_characteristic`]: the cumulant-generating function
/// `-<n> Li_{3/2}(1 - e^{i theta})`, without the 2 pi phase ambiguity of
/// taking `ln` after exponentiation.
pub fn polylog_log_characteristic(theta: f64, mean_kzm: f64) -> Result<Complex64> {
    let z = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta);
    let li = polylog_three_halves(z)?;
    Ok(-mean_kzm * li)
}

/// `Li_{3/2}(z) = sum_{p >= 1} z^p / p^{3/2}` summed to a 1e-14 tail bound.
fn polylog_three_halves(z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if r > 1.0 + 1e-12 {
        return Err(Error::OutOfDomain(format!(
            "Li_3/2 series requires |1 - e^(i theta)| <= 1, got {r:.6}"
        )));
    }
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if r > 1.0 - 1e-12 {
        return Err(Error::OutOfDomain(
            "Li_3/2 series does not reach the tail bound at |z| = 1 (theta = +-pi/3)".to_string(),
        ));
    }
    const TAIL: f64 = 1e-14;
    const MAX_TERMS: usize = 100_000_000;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut z_pow = Complex64::new(1.0, 0.0);
    for p in 1..=MAX_TERMS {
        z_pow *= z;
        let fp = p as f64;
        sum += z_pow / (fp * fp.sqrt());
        // geometric tail bound: sum_{q > p} r^q / q^{3/2} <= r^{p+1} / ((p+1)^{3/2} (1-r))
        let next = fp + 1.0;
        if z_pow.norm() * r / (next * next.sqrt() * (1.0 - r)) < TAIL {
            return Ok(sum);
        }
    }
    Err(Error::numerical("Li_3/2 series did not converge within the term budget".to_string()))
}

/// Cumulants of the total kink number from kink-pair cumulants:
/// `kappa_q^T = 2^q kappa_q`.
pub fn total_kink_cumulants(pair: (f64, f64, f64)) -> (f64, f64, f64) {
    (2.0 * pair.0, 4.0 * pair.1, 8.0 * pair.2)
}

/// Skewness `gamma_1 = kappa_3 / kappa_2^{3/2}`, a derived convenience on
/// top of the cumulants (the standard definition).
pub fn skewness(kappa2: f64, kappa3: f64) -> f64 {
    kappa3 / kappa2.powf(1.5)
}
