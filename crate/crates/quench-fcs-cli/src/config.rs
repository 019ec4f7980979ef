//! Flat JSON sweep configuration. Command-line flags override file values;
//! the effective config is echoed into every JSON output together with a
//! hash of its physics-relevant fields, so any emitted record names the
//! exact computation that produced it.

use serde::{Deserialize, Serialize};

use quench_fcs::modes::{QuenchSchedule, ScheduleKind};
use quench_fcs::noise::{DephasingBasis, DephasingConfig};
use quench_fcs::{Error, IntegratorConfig, Method, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    ClosedForm,
    Unitary,
    Dephased,
}

impl MethodName {
    pub fn to_method(self) -> Method {
        match self {
            MethodName::ClosedForm => Method::ClosedForm,
            MethodName::Unitary => Method::Unitary,
            MethodName::Dephased => Method::Dephased,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "closed-form" | "closedform" | "closed_form" => Ok(MethodName::ClosedForm),
            "unitary" => Ok(MethodName::Unitary),
            "dephased" => Ok(MethodName::Dephased),
            other => Err(Error::invalid(format!(
                "unknown method {other:?} (expected closed-form, unitary, or dephased)"
            ))),
        }
    }
}

impl std::fmt::Display for MethodName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_method())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleName {
    Linear,
    Chirp,
}

impl ScheduleName {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(ScheduleName::Linear),
            "chirp" => Ok(ScheduleName::Chirp),
            other => {
                Err(Error::invalid(format!("unknown schedule {other:?} (expected linear or chirp)")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseBasisName {
    QubitZ,
    InstantaneousEnergy,
}

impl NoiseBasisName {
    pub fn to_basis(self) -> DephasingBasis {
        match self {
            NoiseBasisName::QubitZ => DephasingBasis::QubitZ,
            NoiseBasisName::InstantaneousEnergy => DephasingBasis::InstantaneousEnergy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

/// The single flat configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Chain size (even, >= 4).
    pub n: usize,
    /// Single quench-time point; set by `--a`, used by pk/dist/cumulants.
    pub a: Option<f64>,
    pub a_min: f64,
    pub a_max: f64,
    pub a_points: usize,
    pub methods: Vec<MethodName>,
    pub gamma: f64,
    pub noise_basis: NoiseBasisName,
    pub schedule: ScheduleName,
    pub chirp_normalization: f64,
    pub g_start: f64,
    pub g_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    /// Fit window in A; defaults to `[max(2, a_min), min(50, a_max)]`.
    pub fit_window: Option<[f64; 2]>,
    /// Also dump one PMF file per record.
    pub emit_pmf: bool,
    /// Output destination (sweep: directory); the `--out` flag overrides.
    pub out: Option<String>,
    /// Output format; the `--format` flag overrides.
    pub format: Option<OutputFormat>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 100,
            a: None,
            a_min: 1.0,
            a_max: 100.0,
            a_points: 20,
            methods: vec![MethodName::ClosedForm],
            gamma: 0.0,
            noise_basis: NoiseBasisName::QubitZ,
            schedule: ScheduleName::Linear,
            chirp_normalization: 0.25,
            g_start: QuenchSchedule::DEFAULT_G_START,
            g_end: QuenchSchedule::DEFAULT_G_END,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: None,
            fit_window: None,
            emit_pmf: false,
            out: None,
            format: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("config parse error: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The log-spaced quench-time grid, ascending; a single `--a` overrides
    /// the range.
    pub fn a_values(&self) -> Result<Vec<f64>> {
        if let Some(a) = self.a {
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::invalid(format!("A must be positive, got {a}")));
            }
            return Ok(vec![a]);
        }
        if !self.a_min.is_finite() || self.a_min <= 0.0 || !self.a_max.is_finite() || self.a_max < self.a_min {
            return Err(Error::invalid(format!(
                "need 0 < a_min <= a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if self.a_points == 0 {
            return Err(Error::invalid("a_points must be at least 1".to_string()));
        }
        if self.a_points == 1 || self.a_max == self.a_min {
            return Ok(vec![self.a_min]);
        }
        let ratio = self.a_max / self.a_min;
        Ok((0..self.a_points)
            .map(|i| self.a_min * ratio.powf(i as f64 / (self.a_points - 1) as f64))
            .collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::invalid("method set must not be empty".to_string()));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        let a_values = self.a_values()?;
        if let Some([lo, hi]) = self.fit_window {
            let (a_min, a_max) = (a_values[0], *a_values.last().unwrap());
            if !lo.is_finite() || !hi.is_finite() || lo >= hi || lo > a_max || hi < a_min {
                return Err(Error::invalid(format!(
                    "fit window [{lo}, {hi}] does not overlap the A range [{a_min}, {a_max}]"
                )));
            }
        }
        // delegate the rest
        quench_fcs::ChainSpec::new(self.n, 1.0)?;
        self.schedule_for(a_values[0])?;
        self.integrator()?;
        if self.gamma > 0.0 || self.methods.contains(&MethodName::Dephased) {
            self.dephasing()?;
        }
        Ok(())
    }

    pub fn chain_spec(&self) -> Result<quench_fcs::ChainSpec> {
        quench_fcs::ChainSpec::new(self.n, 1.0)
    }

    pub fn schedule_for(&self, a: f64) -> Result<QuenchSchedule> {
        let kind = match self.schedule {
            ScheduleName::Linear => ScheduleKind::LinearRamp,
            ScheduleName::Chirp => {
                ScheduleKind::RescaledChirp { normalization: self.chirp_normalization }
            }
        };
        QuenchSchedule::new(kind, self.g_start, self.g_end, a)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step.unwrap_or(f64::INFINITY),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dephasing(&self) -> Result<DephasingConfig> {
        DephasingConfig::new(self.gamma, self.noise_basis.to_basis())
    }

    /// Default fit window `[max(2, a_min), min(50, a_max)]`, clamped to the
    /// actual A range.
    pub fn effective_fit_window(&self) -> Result<[f64; 2]> {
        if let Some(w) = self.fit_window {
            return Ok(w);
        }
        let a_values = self.a_values()?;
        let (a_min, a_max) = (a_values[0], *a_values.last().unwrap());
        let lo = a_min.max(2.0).min(a_max);
        let hi = a_max.min(50.0).max(lo);
        Ok([lo, hi])
    }

    /// FNV-1a hash over the physics-relevant fields (outputs and fit window
    /// excluded): two configs with equal hashes produce identical records.
    pub fn physics_hash(&self) -> String {
        let canonical = format!(
            "n={};a={:?};a_min={};a_max={};a_points={};methods={:?};gamma={};basis={:?};\
             schedule={:?};chirp_norm={};g_start={};g_end={};rel_tol={};abs_tol={};max_step={:?}",
            self.n,
            self.a,
            self.a_min,
            self.a_max,
            self.a_points,
            self.methods,
            self.gamma,
            self.noise_basis,
            self.schedule,
            self.chirp_normalization,
            self.g_start,
            self.g_end,
            self.rel_tol,
            self.abs_tol,
            self.max_step,
        );
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in canonical.as_bytes() {
            hash ^= *byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}
