//! Cognitive beamforming with finite-rate cooperative feedback.
//!
//! A secondary (SU) multi-antenna transmitter shares spectrum with a primary
//! (PU) link. The PU receiver feeds back quantized channel direction (CDI)
//! and interference power control (IPC) information so the SU can beamform
//! without raising the PU outage probability. This crate provides the
//! beamformers, quantizers, closed-form outage analysis and a deterministic
//! parallel Monte Carlo engine.

pub mod analysis;
pub mod beamform;
pub mod channel;
pub mod error;
pub mod feedback;
pub mod mathkit;
pub mod report;
pub mod sim;
pub mod stats;

#[cfg(test)]
mod oracle;

pub use channel::{pu_sinr, sample_channels, su_snr, Bits, ChannelRealization, SystemParams};
pub use analysis::{optimal_bit_allocation, theorem1_su_outage, AnalyticOutage, BitAllocation};
pub use beamform::{beamform, BeamformerOutput};
pub use error::{Error, Result};
pub use feedback::{build_ipc_codebook, BeamMode, CdiQuantization, CodebookKind, IpcCodebook, IpcSignal};
pub use mathkit::{Complex, ComplexVector};
pub use sim::{CdiModel, Engine, OutageEstimate, SweepRow, TrialConfig, TrialRecord};
