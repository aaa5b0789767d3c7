//! Batch front end: JSON experiment specs in, JSON reports and CSV phase traces out.

pub mod error;
pub mod report;
pub mod run;
pub mod spec;
pub mod trace;

pub use error::CliError;
pub use report::{Comparison, Item, Report, Value, WindingRecord};
pub use run::run;
pub use spec::{schema, ExperimentSpec};
pub use trace::{emit_phase_trace, phase_trace};
