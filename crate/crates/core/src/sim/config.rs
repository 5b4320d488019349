use serde::{Deserialize, Serialize};

use crate::channel::{Bits, SystemParams};
use crate::error::{config, Result};
use crate::feedback::{BeamMode, MAX_IPC_BITS, MAX_RVQ_BITS, MIN_CODEBOOK_SAMPLES};

/// How the PU direction is quantized when `B` is finite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdiModel {
    /// Sphere-cap statistical model.
    #[default]
    Statistical,
    /// Fresh random vector codebook per block (`B ≤ 16`).
    Rvq,
}

/// Settings for building IPC codebooks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodebookSettings {
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for CodebookSettings {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 0x5EED,
        }
    }
}

/// One Monte Carlo configuration. The feedback budgets live in `params`:
/// an infinite `b_cdi`, `a_ipc` or `b_local` means that feedback is perfect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub params: SystemParams,
    pub mode: BeamMode,
    pub feedforward: bool,
    #[serde(default)]
    pub cdi_model: CdiModel,
    pub n_trials: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub codebook: CodebookSettings,
}

/// Whether the IPC feedback is quantized, as implied by `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IpcMode {
    Perfect,
    Quantized(u32),
}

impl TrialConfig {
    pub fn new(params: SystemParams, mode: BeamMode, feedforward: bool, n_trials: u64, master_seed: u64) -> Self {
        Self {
            params,
            mode,
            feedforward,
            cdi_model: CdiModel::Statistical,
            n_trials,
            master_seed,
            codebook: CodebookSettings::default(),
        }
    }

    pub fn ipc_mode(&self) -> IpcMode {
        match self.params.a_ipc {
            Bits::Infinite => IpcMode::Perfect,
            Bits::Finite(a) => IpcMode::Quantized(a),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_trials == 0 {
            return Err(config("n_trials must be at least 1"));
        }
        if let IpcMode::Quantized(a) = self.ipc_mode() {
            if !(1..=MAX_IPC_BITS).contains(&a) {
                return Err(config(format!("quantized IPC needs 1 <= A <= {MAX_IPC_BITS}, got {a}")));
            }
            if self.codebook.n_samples < MIN_CODEBOOK_SAMPLES {
                return Err(config(format!(
                    "codebook n_samples must be at least {MIN_CODEBOOK_SAMPLES}"
                )));
            }
        }
        if self.cdi_model == CdiModel::Rvq {
            if let Bits::Finite(b) = self.params.b_cdi {
                if b > MAX_RVQ_BITS {
                    return Err(config(format!("random codebooks are limited to {MAX_RVQ_BITS} bits, got {b}")));
                }
            }
        }
        Ok(())
    }
}
