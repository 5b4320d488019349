//! Monte Carlo outage estimation.
//!
//! Each trial draws its randomness from a ChaCha8 stream addressed by
//! `(master_seed, trial index, stage)`, so results do not depend on the
//! worker count and two configurations sharing a seed see the same channels.

mod config;
mod csv;
mod engine;
mod trial;

pub use config::{CdiModel, CodebookSettings, IpcMode, TrialConfig};
pub use csv::{sweep_csv, sweep_csv_row, SWEEP_CSV_HEADER};
pub use engine::{ci_halfwidth, default_workers, Engine, OutageEstimate, PairedEstimate, SweepRow, BATCH};
pub use trial::{trial_rng, PreparedConfig, PreparedIpc, Stage, TrialRecord, TrialTrace, PU_OUTAGE_REL_TOL};
