//! Orchestration around the kink-statistics engine: sweep configuration,
//! parallel execution over quench times, power-law fitting, and CSV/JSON
//! emission.

pub mod config;
pub mod fit;
pub mod records;
pub mod sweep;

pub use config::{MethodName, NoiseBasisName, OutputFormat, ScheduleName, SweepConfig};
pub use fit::{fit_power_law, PowerLawFit};
pub use records::SweepRecord;
pub use sweep::{run_sweep, SweepFailure, SweepOutcome};
