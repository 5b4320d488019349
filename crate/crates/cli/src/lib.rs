//! Experiment runner: declarative specs in, CSV tables and a manifest out.

pub mod allocate;
pub mod experiment;
pub mod grid;
pub mod overlay;
pub mod spec;
pub mod validate;

pub use experiment::{run_experiment, Manifest, RunOutput};
pub use spec::{ExperimentKind, ExperimentSpec};
