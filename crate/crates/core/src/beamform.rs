//! Transmit beamformers built from quantized feedback.

use serde::Serialize;

use crate::channel::ChannelRealization;
use crate::feedback::{BeamMode, CdiQuantization, IpcSignal};
use crate::mathkit::{Complex, ComplexVector};

/// Absolute slack when checking the interference budget.
pub const BUDGET_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct BeamformerOutput {
    pub f: ComplexVector,
    /// `‖f‖²`.
    pub power: f64,
    pub mode: BeamMode,
}

impl BeamformerOutput {
    fn new(f: ComplexVector, mode: BeamMode) -> Self {
        Self {
            power: f.norm_sqr(),
            f,
            mode,
        }
    }
}

/// Orthogonal beamformer `√η̂ ŝ_⊥`: maximum-ratio transmission inside the
/// null space of `ŝ_x`.
pub fn ocb_beamformer(cdi: &CdiQuantization, ipc: &IpcSignal) -> BeamformerOutput {
    debug_assert_eq!(ipc.mode, BeamMode::Ocb);
    BeamformerOutput::new(cdi.s_hat_perp.scaled(ipc.ocb_power.sqrt()), BeamMode::Ocb)
}

/// Coordinates `(α, β)` of the non-orthogonal beamformer `α ŝ_x + β ŝ_⊥`
/// maximizing `|f† s_s|²` subject to `|α|² ≤ μ₁` and `|α|² + |β|² ≤ μ₂`.
///
/// When the unconstrained matched beam already respects the leak bound
/// (`μ₁ ≥ |a|² μ₂`) it is used as is; otherwise the leak saturates at `μ₁`
/// with the phase of `a` and the rest of the power goes along `ŝ_⊥`.
pub fn nocb_coordinates(a: Complex, b: f64, mu1: f64, mu2: f64) -> (Complex, f64) {
    let a2 = a.norm_sqr();
    if mu1 >= a2 * mu2 {
        (a * mu2.sqrt(), b * mu2.sqrt())
    } else {
        debug_assert!(mu1 <= mu2);
        let phase = a / a2.sqrt();
        (phase * mu1.sqrt(), (mu2 - mu1).max(0.0).sqrt())
    }
}

/// Non-orthogonal beamformer from the power pair `(μ₁, μ₂)`.
pub fn nocb_beamformer(cdi: &CdiQuantization, ipc: &IpcSignal) -> BeamformerOutput {
    debug_assert_eq!(ipc.mode, BeamMode::Nocb);
    let (mu1, mu2) = ipc.nocb_pair;
    let (alpha, beta) = nocb_coordinates(cdi.a, cdi.b.re, mu1, mu2);
    let mut f = cdi.s_hat_x.scaled_by(alpha);
    f.add_scaled(Complex::new(beta, 0.0), &cdi.s_hat_perp);
    BeamformerOutput::new(f, BeamMode::Nocb)
}

/// Dispatch on the message's beamformer family.
pub fn beamform(cdi: &CdiQuantization, ipc: &IpcSignal) -> BeamformerOutput {
    match ipc.mode {
        BeamMode::Ocb => ocb_beamformer(cdi, ipc),
        BeamMode::Nocb => nocb_beamformer(cdi, ipc),
    }
}

/// Interference power at the PU receiver, `|f† h_x|²`.
pub fn interference_power(f: &ComplexVector, real: &ChannelRealization) -> f64 {
    f.dot(&real.h_x).norm_sqr()
}

/// True when the PU was already in outage (ω < 0) or the interference stays
/// within the margin ω.
pub fn verify_interference_budget(f: &ComplexVector, real: &ChannelRealization, omega: f64) -> bool {
    omega < 0.0 || interference_power(f, real) <= omega + BUDGET_SLACK
}
