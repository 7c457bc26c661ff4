//! Classical zero-point-field simulator for delayed-choice and quantum-eraser
//! optics: reproducible Monte-Carlo ensembles, closed-form click
//! probabilities and dimension witnesses.

pub mod analytics;
pub mod cli;
pub mod detection;
pub mod dsl;
pub mod elements;
pub mod ensemble;
pub mod error;
pub mod field;
pub mod rng;
pub mod stats;
pub mod studies;

pub use detection::{ClickPattern, Predicate};
pub use dsl::{builtin, expand_sweeps, parse_str, ExperimentSpec};
pub use ensemble::{run_ensemble, CompiledExperiment, RunStats};
pub use error::{Error, Result};
pub use field::{ComplexAmp, GlobalConfig, JonesVector};
