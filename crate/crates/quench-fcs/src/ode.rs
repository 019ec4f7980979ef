//! Adaptive Dormand-Prince 5(4) integration over complex state vectors.
//!
//! One stepper serves all evolvers in this crate: two-level wavefunctions,
//! 2x2 density matrices flattened to four entries, and full spin-chain states
//! of dimension `2^N`. Error control is the usual mixed absolute/relative
//! norm with a PI step-size controller and FSAL reuse of the last stage.

use num_complex::Complex64;

/// Tolerances and step bounds for one integration.
#[derive(Debug, Clone, Copy)]
pub struct StepperOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Counters reported back after a successful integration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integration {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Step-size underflow: the controller pushed `h` below the resolvable scale.
#[derive(Debug, Clone, Copy)]
pub struct StepUnderflow {
    pub t: f64,
    pub h: f64,
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `dy/dt = rhs(t, y)` from `t0` to `t1` in place.
pub fn integrate<F>(
    rhs: F,
    t_span: (f64, f64),
    y: &mut [Complex64],
    opts: &StepperOpts,
) -> Result<Integration, StepUnderflow>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    integrate_with_cap(rhs, t_span, y, opts, |_| f64::INFINITY)
}

/// Same as [`integrate`], with a problem-supplied cap on the step size.
///
/// `cap(t)` is queried at the start of every attempted step; evolvers use it
/// to shrink steps where the instantaneous Hamiltonian makes the state rotate
/// fast (near an avoided crossing) independently of the error estimate.
pub fn integrate_with_cap<F, C>(
    mut rhs: F,
    (t0, t1): (f64, f64),
    y: &mut [Complex64],
    opts: &StepperOpts,
    mut cap: C,
) -> Result<Integration, StepUnderflow>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    C: FnMut(f64) -> f64,
{
    let n = y.len();
    let span = t1 - t0;
    let mut stats = Integration::default();
    if span == 0.0 {
        return Ok(stats);
    }
    assert!(span > 0.0, "integration span must be forward in time");

    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];

    let mut t = t0;
    rhs(t, y, &mut k1);
    stats.rhs_evals += 1;

    // Initial step: conservative guess from the first derivative scale.
    let y_scale: f64 = y.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let d_scale: f64 = k1.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut h = if d_scale > 0.0 {
        (opts.rel_tol.powf(0.2) * y_scale / d_scale).min(span / 10.0)
    } else {
        span / 100.0
    };
    h = h.min(opts.max_step).min(span).max(span * 1e-12);

    let mut err_prev: f64 = 1.0;
    const SAFETY: f64 = 0.9;
    const MIN_SCALE: f64 = 0.2;
    const MAX_SCALE: f64 = 6.0;

    loop {
        if t >= t1 {
            return Ok(stats);
        }
        h = h.min(opts.max_step).min(cap(t)).min(t1 - t);
        if h < (t1 - t0) * 1e-15 || t + h == t {
            return Err(StepUnderflow { t, h });
        }

        // Stages 2..6.
        for i in 0..n {
            stage[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, &stage, &mut k2);
        for i in 0..n {
            stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &stage, &mut k3);
        for i in 0..n {
            stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &stage, &mut k4);
        for i in 0..n {
            stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &stage, &mut k5);
        for i in 0..n {
            stage[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, &stage, &mut k6);

        // 5th-order solution; k7 = f(t + h, y_new) is FSAL.
        for i in 0..n {
            y_new[i] =
                y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        rhs(t + h, &y_new, &mut k7);
        stats.rhs_evals += 6;

        // Weighted RMS error of the embedded difference.
        let mut err_sq = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y_new);
            std::mem::swap(&mut k1, &mut k7);
            stats.accepted += 1;
            // PI controller (Hairer/Wanner beta = 0.04).
            let scale = SAFETY * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= scale.clamp(MIN_SCALE, MAX_SCALE);
            err_prev = err.max(1e-10);
        } else {
            stats.rejected += 1;
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, 1.0);
        }
    }
}
