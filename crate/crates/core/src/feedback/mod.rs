//! Cooperative feedback from the PU receiver: quantized channel direction
//! (CDI) and interference power control (IPC).

mod cdi;
mod codebook;
mod ipc;

pub use cdi::{
    cap_radius, quantize_cdi_rvq, quantize_cdi_statistical, quantize_cdi_with_codebook, quantize_local_cdi,
    random_codebook, sphere_cap_perturb, CdiQuantization, MAX_RVQ_BITS,
};
pub use codebook::{
    build_ipc_codebook, codebook_rng, ipc_power_loss_bound, CodebookKind, IpcCodebook, MAX_IPC_BITS,
    MIN_CODEBOOK_SAMPLES,
};
pub use ipc::{
    compute_omega, ipc_nocb, ipc_ocb, ipc_ocb_unquantized, nocb_nu, perfect_ipc_ocb, quantize_ipc_ocb, BeamMode,
    IpcBranch, IpcSignal, NocbCodebooks,
};
