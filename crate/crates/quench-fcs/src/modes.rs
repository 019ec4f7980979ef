//! Momentum grid, dispersion, per-mode two-level Hamiltonians, eigenstate
//! angles, and quench schedules.
//!
//! Conventions, used everywhere downstream:
//! - positive-momentum grid `k = (pi/N)(2m - 1)`, `m = 1..N/2`;
//! - mode Hamiltonian `H_k = (hz sigma_z + hx sigma_x)/2` with
//!   `hz = 4J(g - cos k)` and `hx = 4J sin k` (`hbar = 1`), so the soft modes
//!   of a ramp ending at `g = 0` sit near `k = pi`;
//! - ground-state Bloch angle `theta(k, g) = -atan2(sin k, cos k - g)`, which
//!   evaluates to `-atan(sin k / (5 + cos k))` at `g = -5` and to `-k` at
//!   `g = 0`.
//!
//! The mirrored convention `hz = 4J(g + cos k)` (soft modes near `k = 0`) is
//! the same physics under `k <-> pi - k`; since the grid maps onto itself
//! under that reflection, every summed statistic is identical either way.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Chain geometry and coupling. Times are always expressed through the
/// dimensionless quench parameter `A = J tau_Q / hbar`, so `J` only sets the
/// energy scale of reported Hamiltonians and dispersions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n: usize,
    j: f64,
}

impl ChainSpec {
    /// `n` must be even and at least 4; `j` strictly positive.
    pub fn new(n: usize, j: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "chain size must be even and >= 4, got {n}"
            )));
        }
        if !j.is_finite() || j <= 0.0 {
            return Err(Error::invalid(format!("coupling must be positive, got {j}")));
        }
        Ok(ChainSpec { n, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    /// Number of positive-momentum modes, `N/2`.
    pub fn mode_count(&self) -> usize {
        self.n / 2
    }
}

/// One positive momentum `k = (pi/N)(2m - 1)` with its 1-based index `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumMode {
    pub index: usize,
    pub k: f64,
}

/// The positive-momentum half of the antiperiodic grid, ascending in `k`.
pub fn momentum_grid(spec: &ChainSpec) -> Vec<MomentumMode> {
    let n = spec.n() as f64;
    (1..=spec.mode_count())
        .map(|m| MomentumMode { index: m, k: std::f64::consts::PI / n * (2.0 * m as f64 - 1.0) })
        .collect()
}

/// Quasiparticle energy `eps_k(g) = 2J sqrt((g - cos k)^2 + sin^2 k)`.
pub fn dispersion(k: f64, g: f64, spec: &ChainSpec) -> f64 {
    let dz = g - k.cos();
    2.0 * spec.j() * dz.hypot(k.sin())
}

/// Two-level Hamiltonian `H = (hz sigma_z + hx sigma_x) / 2`, coefficients in
/// angular-frequency units (`hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelHamiltonian {
    pub hz: f64,
    pub hx: f64,
}

impl TwoLevelHamiltonian {
    /// Eigenvalue gap `sqrt(hz^2 + hx^2)` (the full splitting, not half).
    pub fn gap(&self) -> f64 {
        self.hz.hypot(self.hx)
    }

    /// Eigenvalues `(-gap/2, +gap/2)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half = 0.5 * self.gap();
        (-half, half)
    }

    /// Apply to a two-component state.
    #[inline]
    pub fn apply(&self, psi: &[Complex64; 2]) -> [Complex64; 2] {
        let hz = 0.5 * self.hz;
        let hx = 0.5 * self.hx;
        [hz * psi[0] + hx * psi[1], hx * psi[0] - hz * psi[1]]
    }
}

/// Hamiltonian of mode `k` at field `g`: `hz = 4J(g - cos k)`,
/// `hx = 4J sin k`. Its spectrum is `+-dispersion(k, g)` for `hbar = 1`.
///
/// `k = 0` and `k = pi` are rejected: there `sin k = 0` and the chirp
/// parametrization of the crossing degenerates.
pub fn mode_hamiltonian(k: f64, g: f64, spec: &ChainSpec) -> Result<TwoLevelHamiltonian> {
    if !(k > 0.0 && k < std::f64::consts::PI) {
        return Err(Error::invalid(format!(
            "mode momentum must lie strictly inside (0, pi), got {k}"
        )));
    }
    let j = spec.j();
    Ok(TwoLevelHamiltonian { hz: 4.0 * j * (g - k.cos()), hx: 4.0 * j * k.sin() })
}

/// Bloch polar angle of the instantaneous ground state of
/// [`mode_hamiltonian`], `theta(k, g) = -atan2(sin k, cos k - g)`.
///
/// The branch is fixed by `sin k > 0`, so `theta` varies smoothly through the
/// avoided crossing at `g = cos k`. Anchors: `theta(k, -5) =
/// -atan(sin k / (5 + cos k))` and `theta(k, 0) = -k`.
pub fn eigenstate_angle(k: f64, g: f64) -> f64 {
    -f64::atan2(k.sin(), k.cos() - g)
}

/// Ground state with angle `theta`: `cos(theta/2)|0> + sin(theta/2)|1>`.
pub fn ground_state_from_angle(theta: f64) -> [Complex64; 2] {
    let half = 0.5 * theta;
    [Complex64::new(half.cos(), 0.0), Complex64::new(half.sin(), 0.0)]
}

/// Excited state with angle `theta`: `-sin(theta/2)|0> + cos(theta/2)|1>`,
/// orthogonal to [`ground_state_from_angle`].
pub fn excited_state_from_angle(theta: f64) -> [Complex64; 2] {
    let half = 0.5 * theta;
    [Complex64::new(-half.sin(), 0.0), Complex64::new(half.cos(), 0.0)]
}

/// How the field trajectory is traversed in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// `g(t) = g_start + t/A` in dimensionless time; total duration
    /// `A * |g_end - g_start|`.
    LinearRamp,
    /// Experiment-style replica: mode `k` evolves under `H_k / sin k` for a
    /// duration `normalization * A * |g_end - g_start| * sin k`.
    ///
    /// `normalization = 1` reproduces the linear ramp exactly (pure time
    /// rescaling). The hardware pulse-length convention corresponds to
    /// `normalization = 1/4` (one Rabi time `1/Omega_R = hbar/4J` per unit),
    /// which is equivalent to a linear ramp at `A/4`.
    RescaledChirp { normalization: f64 },
}

/// A field trajectory `g(s)` for `s` in `[0, 1]` plus the quench parameter
/// `A = J tau_Q / hbar` that converts it into a trajectory in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchSchedule {
    pub kind: ScheduleKind,
    pub g_start: f64,
    pub g_end: f64,
    pub a: f64,
}

impl QuenchSchedule {
    pub const DEFAULT_G_START: f64 = -5.0;
    pub const DEFAULT_G_END: f64 = 0.0;

    /// Linear ramp from `g_start = -5` to `g_end = 0`.
    pub fn linear(a: f64) -> Result<Self> {
        Self::new(ScheduleKind::LinearRamp, Self::DEFAULT_G_START, Self::DEFAULT_G_END, a)
    }

    /// Chirp replica with the hardware pulse-length convention.
    pub fn chirp(a: f64) -> Result<Self> {
        Self::new(
            ScheduleKind::RescaledChirp { normalization: 0.25 },
            Self::DEFAULT_G_START,
            Self::DEFAULT_G_END,
            a,
        )
    }

    pub fn new(kind: ScheduleKind, g_start: f64, g_end: f64, a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::invalid(format!("quench parameter A must be positive, got {a}")));
        }
        if !g_start.is_finite() || !g_end.is_finite() {
            return Err(Error::invalid("schedule endpoints must be finite".to_string()));
        }
        if let ScheduleKind::RescaledChirp { normalization } = kind {
            if !normalization.is_finite() || normalization <= 0.0 {
                return Err(Error::invalid(format!(
                    "chirp normalization must be positive, got {normalization}"
                )));
            }
        }
        Ok(QuenchSchedule { kind, g_start, g_end, a })
    }

    /// Soft sanity checks: a critical-point crossing needs `g_start < -1` and
    /// `g_end >= -1`. Violations are reported, not rejected, so sudden and
    /// partial ramps stay usable.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.g_start >= -1.0 {
            w.push(format!(
                "g_start = {} does not start in the paramagnetic phase (expected < -1)",
                self.g_start
            ));
        }
        if self.g_end < -1.0 {
            w.push(format!(
                "g_end = {} stays short of the critical point (expected >= -1)",
                self.g_end
            ));
        }
        w
    }

    /// Field value at ramp fraction `s` in `[0, 1]`; endpoints are exact.
    pub fn field_at(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid(format!("ramp fraction must lie in [0, 1], got {s}")));
        }
        if s == 0.0 {
            Ok(self.g_start)
        } else if s == 1.0 {
            Ok(self.g_end)
        } else {
            Ok(self.g_start + s * (self.g_end - self.g_start))
        }
    }

    /// Dimensionless duration of the ramp for mode `k` (time in `hbar/J`).
    ///
    /// Linear ramps are mode-independent: `A * |g_end - g_start|`.
    pub fn duration(&self, k: f64) -> f64 {
        let base = self.a * (self.g_end - self.g_start).abs();
        match self.kind {
            ScheduleKind::LinearRamp => base,
            ScheduleKind::RescaledChirp { normalization } => base * normalization * k.sin(),
        }
    }

    /// Factor multiplying `H_k` during evolution (`1/sin k` for the chirp).
    pub fn hamiltonian_scale(&self, k: f64) -> f64 {
        match self.kind {
            ScheduleKind::LinearRamp => 1.0,
            ScheduleKind::RescaledChirp { .. } => 1.0 / k.sin(),
        }
    }
}
