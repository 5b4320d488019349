//! Shared fixtures for the benchmarks.

use cogfeed_core::feedback::MIN_CODEBOOK_SAMPLES;
use cogfeed_core::sim::TrialConfig;
use cogfeed_core::{BeamMode, Bits, SystemParams};

/// Default parameters at 20 dB with 12 CDI bits.
pub fn params() -> SystemParams {
    SystemParams::default()
        .with_gamma_max_db(20.0)
        .with_cdi_bits(Bits::Finite(12))
}

/// A configuration with `a_ipc` IPC bits and the smallest allowed codebook.
pub fn config(mode: BeamMode, feedforward: bool, a_ipc: Bits, n_trials: u64) -> TrialConfig {
    let mut c = TrialConfig::new(params().with_ipc_bits(a_ipc), mode, feedforward, n_trials, 1);
    c.codebook.n_samples = MIN_CODEBOOK_SAMPLES;
    c
}
