use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{CdiModel, TrialConfig};
use crate::beamform::{beamform, interference_power, BeamformerOutput};
use crate::channel::{pu_sinr, sample_channels, su_snr, ChannelRealization};
use crate::error::Result;
use crate::feedback::{
    compute_omega, ipc_nocb, ipc_ocb, quantize_cdi_rvq, quantize_cdi_statistical, quantize_local_cdi, BeamMode,
    CdiQuantization, IpcBranch, IpcCodebook, IpcSignal, NocbCodebooks,
};
use crate::mathkit::ComplexVector;

/// Relative margin below `θ_p` before a PU outage is counted. With
/// feedforward and perfect IPC the SU can fill the margin exactly, putting
/// the SINR on the threshold up to rounding.
pub const PU_OUTAGE_REL_TOL: f64 = 1e-9;

/// Independent random-number stages within one trial. Keeping them apart
/// gives common random numbers across configurations with the same seed.
#[derive(Clone, Copy, Debug)]
#[repr(u8)]
pub enum Stage {
    Channel = 0,
    LocalCdi = 1,
    PuCdi = 2,
}

/// Generator for `stage` of trial `index`: ChaCha8 keyed by the master
/// seed, one stream per trial, stages at disjoint word offsets.
pub fn trial_rng(master_seed: u64, index: u64, stage: Stage) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng.set_word_pos(u128::from(stage as u8) << 48);
    rng
}

/// IPC quantization state for a configuration.
#[derive(Clone, Debug)]
pub enum PreparedIpc {
    Perfect,
    Ocb(Arc<IpcCodebook>),
    Nocb(Arc<NocbCodebooks>),
}

/// A validated configuration with its codebooks built.
#[derive(Clone, Debug)]
pub struct PreparedConfig {
    pub config: TrialConfig,
    pub ipc: PreparedIpc,
}

/// Outcome of one block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub su_snr: f64,
    pub pu_sinr: f64,
    pub tx_power: f64,
    pub interference: f64,
    pub omega: f64,
    pub branch: IpcBranch,
    /// `SNR_s ≤ θ_s`.
    pub su_outage: bool,
    /// `SINR_p < θ_p`.
    pub pu_outage: bool,
    /// `γ_p g_p < θ_p`: PU outage without any SU interference.
    pub pu_outage_alone: bool,
}

/// Every intermediate quantity of one block, for inspection and tests.
#[derive(Clone, Debug)]
pub struct TrialTrace {
    pub channel: ChannelRealization,
    /// SU channel shape as seen by the transmitter.
    pub s_s_used: ComplexVector,
    pub cdi: CdiQuantization,
    pub ipc: IpcSignal,
    pub beam: BeamformerOutput,
    pub record: TrialRecord,
}

impl PreparedConfig {
    pub fn run_trial(&self, index: u64) -> TrialRecord {
        self.run_trial_traced(index).record
    }

    pub fn run_trial_traced(&self, index: u64) -> TrialTrace {
        let cfg = &self.config;
        let p = &cfg.params;
        let seed = cfg.master_seed;
        let channel = sample_channels(p, &mut trial_rng(seed, index, Stage::Channel));
        let s_s_used = quantize_local_cdi(&channel.s_s, p.b_local, &mut trial_rng(seed, index, Stage::LocalCdi));
        let mut rng = trial_rng(seed, index, Stage::PuCdi);
        let cdi = match cfg.cdi_model {
            CdiModel::Statistical => quantize_cdi_statistical(&channel.s_x, &s_s_used, p.b_cdi, &mut rng),
            CdiModel::Rvq => quantize_cdi_rvq(&channel.s_x, &s_s_used, p.b_cdi, &mut rng)
                .expect("budget checked by validation"),
        };
        let omega = compute_omega(channel.g_p, p);
        let ipc = self
            .ipc_signal(omega, channel.g_x, &cdi)
            .expect("codebook kinds checked at preparation");
        let beam = beamform(&cdi, &ipc);
        let snr = su_snr(&channel, &beam.f, p);
        let sinr = pu_sinr(&channel, &beam.f, p);
        let record = TrialRecord {
            su_snr: snr,
            pu_sinr: sinr,
            tx_power: beam.power,
            interference: interference_power(&beam.f, &channel),
            omega,
            branch: ipc.branch,
            su_outage: snr <= p.theta_s,
            pu_outage: sinr < p.theta_p * (1.0 - PU_OUTAGE_REL_TOL),
            pu_outage_alone: p.gamma_p * channel.g_p < p.theta_p,
        };
        TrialTrace {
            channel,
            s_s_used,
            cdi,
            ipc,
            beam,
            record,
        }
    }

    fn ipc_signal(&self, omega: f64, g_x: f64, cdi: &CdiQuantization) -> Result<IpcSignal> {
        let cfg = &self.config;
        let (p, ff) = (&cfg.params, cfg.feedforward);
        match (cfg.mode, &self.ipc) {
            (BeamMode::Ocb, PreparedIpc::Perfect) => ipc_ocb(omega, g_x, cdi, None, p, ff),
            (BeamMode::Ocb, PreparedIpc::Ocb(cb)) => ipc_ocb(omega, g_x, cdi, Some(cb), p, ff),
            (BeamMode::Nocb, PreparedIpc::Perfect) => ipc_nocb(omega, g_x, cdi, None, p, ff),
            (BeamMode::Nocb, PreparedIpc::Nocb(cbs)) => ipc_nocb(omega, g_x, cdi, Some(cbs), p, ff),
            (mode, _) => Err(crate::error::Error::ModeMismatch(format!(
                "prepared codebooks do not match beamformer mode {mode}"
            ))),
        }
    }
}
