//! Interference power control: the PU margin ω, the unquantized OCB and
//! NOCB power signals, and their quantized feedback messages.

use serde::{Deserialize, Serialize};

use super::cdi::CdiQuantization;
use super::codebook::{CodebookKind, IpcCodebook};
use crate::channel::SystemParams;
use crate::error::{Error, Result};

/// Beamformer family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamMode {
    /// Orthogonal: transmit only in the null space of `ŝ_x`.
    Ocb,
    /// Non-orthogonal: bounded power along `ŝ_x`.
    Nocb,
}

impl std::fmt::Display for BeamMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BeamMode::Ocb => "ocb",
            BeamMode::Nocb => "nocb",
        })
    }
}

/// Which case of the IPC design produced a message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IpcBranch {
    /// ω < 0: the PU is in outage anyway, the SU may use full power.
    PuOutage,
    /// ω ≥ 0 and no power is allowed along `ŝ_x` (always the case for OCB).
    Orthogonal,
    /// ω ≥ 0 and ν ≥ 0: NOCB may leak power along `ŝ_x`.
    Leaky,
}

/// Per-block IPC feedback message.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IpcSignal {
    pub mode: BeamMode,
    pub feedforward: bool,
    pub branch: IpcBranch,
    /// Set when ω < 0.
    pub outage_bit: bool,
    /// Orthogonal-branch power η̂ (`P_max` in outage).
    pub ocb_power: f64,
    /// `(μ₁, μ₂)`: power bound along `ŝ_x` and total power bound.
    pub nocb_pair: (f64, f64),
}

impl IpcSignal {
    /// Two header bits: outage flag (bit 1) and leaky-branch flag (bit 0).
    pub fn header(&self) -> u8 {
        (u8::from(self.outage_bit) << 1) | u8::from(self.branch == IpcBranch::Leaky)
    }

    fn outage(mode: BeamMode, feedforward: bool, p_max: f64) -> Self {
        Self {
            mode,
            feedforward,
            branch: IpcBranch::PuOutage,
            outage_bit: true,
            ocb_power: p_max,
            nocb_pair: (p_max, p_max),
        }
    }
}

/// Tolerable interference at the PU receiver, `σ²(γ_p g_p/θ_p − 1)`.
pub fn compute_omega(g_p: f64, params: &SystemParams) -> f64 {
    params.sigma2 * (params.gamma_p * g_p / params.theta_p - 1.0)
}

fn direction_error(cdi: &CdiQuantization, feedforward: bool) -> f64 {
    if feedforward {
        cdi.delta
    } else {
        cdi.epsilon
    }
}

/// Unquantized OCB power: `ω/(λ g_x ε)`, or `ω/(λ g_x δ)` with
/// feedforward; `P_max` when ω < 0 and `+∞` when the error is zero.
pub fn ipc_ocb_unquantized(omega: f64, g_x: f64, cdi: &CdiQuantization, params: &SystemParams, feedforward: bool) -> f64 {
    if omega < 0.0 {
        return params.p_max;
    }
    let den = params.lambda * g_x * direction_error(cdi, feedforward);
    if den > 0.0 {
        omega / den
    } else {
        f64::INFINITY
    }
}

/// Unquantized leaky-branch amplitude
/// `ν = (√(ω/(λ g_x)) − √(ε P_max))/√(1 − ε)`, with δ replacing ε in the
/// second term under feedforward. Only meaningful when ω ≥ 0.
pub fn nocb_nu(omega: f64, g_x: f64, cdi: &CdiQuantization, params: &SystemParams, feedforward: bool) -> f64 {
    let num = (omega.max(0.0) / (params.lambda * g_x)).sqrt()
        - (direction_error(cdi, feedforward) * params.p_max).sqrt();
    let den = (1.0 - cdi.epsilon).sqrt();
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

/// OCB message with perfect (unquantized) IPC: `min(η, P_max)`.
pub fn perfect_ipc_ocb(eta: f64, omega: f64, params: &SystemParams, feedforward: bool) -> IpcSignal {
    if omega < 0.0 {
        return IpcSignal::outage(BeamMode::Ocb, feedforward, params.p_max);
    }
    let power = eta.min(params.p_max);
    IpcSignal {
        mode: BeamMode::Ocb,
        feedforward,
        branch: IpcBranch::Orthogonal,
        outage_bit: false,
        ocb_power: power,
        nocb_pair: (0.0, power),
    }
}

/// OCB message with quantized IPC: `⌊η⌋_𝒫` when ω ≥ 0 and η < `P_max`,
/// otherwise `P_max`. The feedforward flag follows the codebook kind.
pub fn quantize_ipc_ocb(eta: f64, codebook: &IpcCodebook, omega: f64, params: &SystemParams) -> IpcSignal {
    let feedforward = codebook.mode.feedforward();
    if omega < 0.0 {
        return IpcSignal::outage(BeamMode::Ocb, feedforward, params.p_max);
    }
    let power = if eta < params.p_max {
        codebook.floor(eta).min(params.p_max)
    } else {
        params.p_max
    };
    IpcSignal {
        mode: BeamMode::Ocb,
        feedforward,
        branch: IpcBranch::Orthogonal,
        outage_bit: false,
        ocb_power: power,
        nocb_pair: (0.0, power),
    }
}

fn check_kind(codebook: &IpcCodebook, expected: CodebookKind) -> Result<()> {
    if codebook.mode == expected {
        Ok(())
    } else {
        Err(Error::ModeMismatch(format!(
            "expected a {expected:?} codebook, got {:?}",
            codebook.mode
        )))
    }
}

/// OCB message from channel quantities, with optional IPC quantization.
pub fn ipc_ocb(
    omega: f64,
    g_x: f64,
    cdi: &CdiQuantization,
    codebook: Option<&IpcCodebook>,
    params: &SystemParams,
    feedforward: bool,
) -> Result<IpcSignal> {
    let eta = ipc_ocb_unquantized(omega, g_x, cdi, params, feedforward);
    match codebook {
        None => Ok(perfect_ipc_ocb(eta, omega, params, feedforward)),
        Some(cb) => {
            check_kind(cb, CodebookKind::eta(feedforward))?;
            Ok(quantize_ipc_ocb(eta, cb, omega, params))
        }
    }
}

/// Codebooks for quantized NOCB feedback.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NocbCodebooks {
    /// Orthogonal-branch codebook; absent under perfect CDI, where that
    /// branch cannot occur.
    pub eta: Option<IpcCodebook>,
    /// Leaky-branch codebook over ν².
    pub nu: IpcCodebook,
}

/// NOCB message: `(⌊ν²⌋, P_max)` on the leaky branch, `(0, η̂)` on the
/// orthogonal branch and `(P_max, P_max)` when ω < 0. Perfect IPC when
/// `codebooks` is `None`.
pub fn ipc_nocb(
    omega: f64,
    g_x: f64,
    cdi: &CdiQuantization,
    codebooks: Option<&NocbCodebooks>,
    params: &SystemParams,
    feedforward: bool,
) -> Result<IpcSignal> {
    if let Some(cbs) = codebooks {
        check_kind(&cbs.nu, CodebookKind::nu(feedforward))?;
        if let Some(eta) = &cbs.eta {
            check_kind(eta, CodebookKind::eta(feedforward))?;
        }
    }
    if omega < 0.0 {
        return Ok(IpcSignal::outage(BeamMode::Nocb, feedforward, params.p_max));
    }
    let p_max = params.p_max;
    let eta = ipc_ocb_unquantized(omega, g_x, cdi, params, feedforward);
    let eta_hat = match codebooks {
        None => eta.min(p_max),
        Some(NocbCodebooks { eta: Some(cb), .. }) => quantize_ipc_ocb(eta, cb, omega, params).ocb_power,
        Some(NocbCodebooks { eta: None, .. }) if eta >= p_max => p_max,
        Some(_) => {
            return Err(Error::ModeMismatch(
                "orthogonal-branch codebook required for finite CDI".into(),
            ))
        }
    };
    let nu = nocb_nu(omega, g_x, cdi, params, feedforward);
    let (branch, pair) = if nu >= 0.0 {
        let nu2 = nu * nu;
        let mu1 = match codebooks {
            None => nu2.min(p_max),
            Some(cbs) => cbs.nu.floor(nu2).min(p_max),
        };
        (IpcBranch::Leaky, (mu1, p_max))
    } else {
        (IpcBranch::Orthogonal, (0.0, eta_hat))
    };
    Ok(IpcSignal {
        mode: BeamMode::Nocb,
        feedforward,
        branch,
        outage_bit: false,
        ocb_power: eta_hat,
        nocb_pair: pair,
    })
}
