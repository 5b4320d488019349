//! Closed-form outage expressions, the distribution laws behind them, the
//! IPC quantization loss and the feedback bit allocation rule.
//!
//! All expressions are first order in the CDI quantization error scale
//! `2^{-B/(L-1)}`. Each result carries the ratio of the neglected
//! second-order scale to the retained penalty so callers can tell when the
//! approximation is meaningful.

use serde::Serialize;

use crate::channel::{Bits, SystemParams};
use crate::error::{domain, Result};
use crate::mathkit::{gamma_int, regularized_lower_gamma, regularized_upper_gamma, upper_incomplete_gamma};
use crate::report::{csv_field, fmt_float};

/// Results whose second-order-to-penalty ratio exceeds this are flagged.
pub const VALIDITY_RATIO_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Finite maximum transmit power.
    Finite,
    /// Limit of large maximum transmit power.
    Asymptotic,
}

/// A first-order outage probability with its breakdown.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticOutage {
    /// Probability clamped to `[0, 1]`.
    pub value: f64,
    pub unclamped: f64,
    /// Outage with perfect feedback.
    pub baseline: f64,
    pub cdi_penalty: f64,
    pub ipc_penalty: f64,
    pub regime: Regime,
    /// `2^{-2B/(L-1)}` over the retained penalty.
    pub validity_ratio: f64,
    /// `validity_ratio <= VALIDITY_RATIO_LIMIT`.
    pub valid: bool,
    /// The first-order value left `[0, 1]`.
    pub clamped: bool,
}

impl AnalyticOutage {
    fn new(params: &SystemParams, b: Bits, baseline: f64, cdi: f64, ipc: f64, regime: Regime) -> Self {
        let unclamped = baseline + cdi + ipc;
        let value = unclamped.clamp(0.0, 1.0);
        let second = b.pow2_neg_over(params.lm1()).powi(2);
        let penalty = cdi + ipc;
        let validity_ratio = if second == 0.0 {
            0.0
        } else if penalty > 0.0 {
            second / penalty
        } else {
            f64::INFINITY
        };
        Self {
            value,
            unclamped,
            baseline,
            cdi_penalty: cdi,
            ipc_penalty: ipc,
            regime,
            validity_ratio,
            valid: validity_ratio <= VALIDITY_RATIO_LIMIT,
            clamped: value != unclamped,
        }
    }
}

fn lu(params: &SystemParams) -> u32 {
    params.antennas as u32
}

/// `θ_s / γ_max`.
fn snr_ratio(params: &SystemParams) -> f64 {
    params.theta_s / params.gamma_max()
}

/// `e^{-θ_p/γ_p}`: probability that the PU is not in outage on its own.
fn pu_clear(params: &SystemParams) -> f64 {
    (-params.theta_p / params.gamma_p).exp()
}

/// PU outage without SU interference, `1 − e^{-θ_p/γ_p}`.
pub fn pu_outage_closed_form(params: &SystemParams) -> f64 {
    params.pu_outage_reference()
}

/// SU outage with perfect feedback, `1 − Γ(L−1, θ_s/γ_max)/Γ(L−1)`.
pub fn baseline_outage(params: &SystemParams) -> f64 {
    regularized_lower_gamma(lu(params) - 1, snr_ratio(params)).expect("L >= 3")
}

/// CDI penalty coefficient
/// `φ = e^{-θ_p/γ_p}(L−1)λθ_pθ_s Γ(L−2, θ_s/γ_max)/(γ_p Γ(L−1))`.
pub fn phi(params: &SystemParams) -> f64 {
    let l = lu(params);
    let x = snr_ratio(params);
    pu_clear(params) * params.lm1() * params.lambda * params.theta_p * params.theta_s
        * upper_incomplete_gamma(l - 2, x).expect("L >= 3")
        / (params.gamma_p * gamma_int(l - 1).expect("L >= 3"))
}

/// Large-power limit of `φ`: `e^{-θ_p/γ_p}(L−1)λθ_pθ_s/((L−2)γ_p)`.
pub fn phi_asymptotic(params: &SystemParams) -> f64 {
    pu_clear(params) * params.lm1() * params.lambda * params.theta_p * params.theta_s
        / ((params.lm1() - 1.0) * params.gamma_p)
}

/// IPC penalty coefficient `e^{-θ_p/γ_p} Γ(L−1, θ_s/γ_max)/Γ(L−1)`.
pub fn ipc_penalty_coeff(params: &SystemParams) -> f64 {
    pu_clear(params) * regularized_upper_gamma(lu(params) - 1, snr_ratio(params)).expect("L >= 3")
}

/// Large-power limit of the IPC penalty coefficient, `e^{-θ_p/γ_p}`.
pub fn ipc_penalty_coeff_asymptotic(params: &SystemParams) -> f64 {
    pu_clear(params)
}

fn cdi_scale(params: &SystemParams, b: Bits) -> f64 {
    b.pow2_neg_over(params.lm1())
}

fn ipc_scale(a: Bits) -> f64 {
    a.pow2_neg_over(1.0)
}

/// SU outage for OCB without feedforward and with perfect IPC.
pub fn theorem1_su_outage(params: &SystemParams, b: Bits) -> AnalyticOutage {
    let cdi = phi(params) * cdi_scale(params, b);
    AnalyticOutage::new(params, b, baseline_outage(params), cdi, 0.0, Regime::Finite)
}

/// SU outage for OCB with feedforward: the CDI penalty shrinks by `L − 1`.
pub fn theorem2_su_outage_ff(params: &SystemParams, b: Bits) -> AnalyticOutage {
    let cdi = phi(params) / params.lm1() * cdi_scale(params, b);
    AnalyticOutage::new(params, b, baseline_outage(params), cdi, 0.0, Regime::Finite)
}

/// Saturation level of the OCB outage as `P_max → ∞`.
pub fn corollary1_asymptote(params: &SystemParams, b: Bits) -> AnalyticOutage {
    let cdi = phi_asymptotic(params) * cdi_scale(params, b);
    AnalyticOutage::new(params, b, 0.0, cdi, 0.0, Regime::Asymptotic)
}

/// Strict lower bound on the saturation level,
/// `e^{-θ_p/γ_p} λθ_pθ_s/γ_p · 2^{-B/(L-1)}`.
pub fn saturation_lower_bound(params: &SystemParams, b: Bits) -> AnalyticOutage {
    let cdi = pu_clear(params) * params.lambda * params.theta_p * params.theta_s / params.gamma_p
        * cdi_scale(params, b);
    AnalyticOutage::new(params, b, 0.0, cdi, 0.0, Regime::Asymptotic)
}

/// Upper bound on the OCB outage with quantized CDI and IPC. With
/// feedforward both penalties are divided by `L − 1` and the IPC term is
/// additionally scaled by `2^{-B/(L-1)}`, as in the feedforward bound.
pub fn prop2_upper_bound(params: &SystemParams, a: Bits, b: Bits, feedforward: bool) -> AnalyticOutage {
    let base = baseline_outage(params);
    let cs = cdi_scale(params, b);
    let (cdi, ipc) = if feedforward {
        let k = cs / params.lm1();
        (phi(params) * k, ipc_penalty_coeff(params) * ipc_scale(a) * k)
    } else {
        (phi(params) * cs, ipc_penalty_coeff(params) * ipc_scale(a))
    };
    AnalyticOutage::new(params, b, base, cdi, ipc, Regime::Finite)
}

/// Large-power limit of the quantized-IPC bound,
/// `φ' 2^{-B/(L-1)} + α' 2^{-A}`.
pub fn quantized_ipc_floor(params: &SystemParams, a: Bits, b: Bits) -> AnalyticOutage {
    let cdi = phi_asymptotic(params) * cdi_scale(params, b);
    let ipc = ipc_penalty_coeff_asymptotic(params) * ipc_scale(a);
    AnalyticOutage::new(params, b, 0.0, cdi, ipc, Regime::Asymptotic)
}

/// First-order IPC power loss
/// `γ_p σ²/((L−1)θ_p λ) · 2^{B/(L−1) − A}`.
pub fn lemma6_delta_p(params: &SystemParams, a: u32, b: Bits) -> f64 {
    let scale = cdi_scale(params, b);
    if scale == 0.0 {
        return f64::INFINITY;
    }
    params.gamma_p * params.sigma2 / (params.lm1() * params.theta_p * params.lambda) / scale
        * (-f64::from(a)).exp2()
}

/// Distribution laws of the transmit power, the effective SU channel gain
/// and the quantization errors, for a fixed CDI budget.
#[derive(Clone, Debug)]
pub struct DistributionLaws {
    params: SystemParams,
    bits: Bits,
}

/// Evaluators for the distribution laws at CDI budget `b`.
pub fn lemma_distributions(params: &SystemParams, b: Bits) -> DistributionLaws {
    DistributionLaws {
        params: params.clone(),
        bits: b,
    }
}

impl DistributionLaws {
    fn scale(&self) -> f64 {
        cdi_scale(&self.params, self.bits)
    }

    fn check_power(&self, tau: f64) -> Result<()> {
        if (0.0..=self.params.p_max).contains(&tau) {
            Ok(())
        } else {
            Err(domain(format!(
                "power {tau} outside [0, {}]",
                self.params.p_max
            )))
        }
    }

    /// Largest quantization error `2^{-B/(L-1)}`.
    pub fn error_radius(&self) -> f64 {
        self.scale()
    }

    /// `Pr(ε ≤ τ) = 2^B τ^{L-1}` on the cap.
    pub fn epsilon_cdf(&self, tau: f64) -> f64 {
        let r = self.scale();
        if r == 0.0 {
            return 1.0;
        }
        (tau / r).clamp(0.0, 1.0).powf(self.params.lm1())
    }

    /// `Pr(P_s = P_max)` for OCB with perfect IPC, first order.
    pub fn ps_full_power_prob(&self) -> f64 {
        let p = &self.params;
        1.0 - pu_clear(p) * p.lm1() * p.theta_p * p.lambda * p.gamma_max() / p.gamma_p * self.scale()
    }

    /// `Pr(P_s < τ)` for `0 ≤ τ ≤ P_max`, first order.
    pub fn ps_cdf(&self, tau: f64) -> Result<f64> {
        self.check_power(tau)?;
        let p = &self.params;
        Ok(pu_clear(p) * p.lm1() * p.theta_p * p.lambda * tau / (p.gamma_p * p.sigma2) * self.scale())
    }

    /// Feedforward counterpart of [`Self::ps_full_power_prob`].
    pub fn ps_ff_full_power_prob(&self) -> f64 {
        let p = &self.params;
        1.0 - pu_clear(p) * p.theta_p * p.lambda * p.gamma_max() / p.gamma_p * self.scale()
    }

    /// Feedforward counterpart of [`Self::ps_cdf`].
    pub fn ps_ff_cdf(&self, tau: f64) -> Result<f64> {
        self.check_power(tau)?;
        let p = &self.params;
        Ok(pu_clear(p) * p.theta_p * p.lambda * tau / (p.gamma_p * p.sigma2) * self.scale())
    }

    /// With quantized IPC the full-power probability is unchanged.
    pub fn ps_quantized_full_power_prob(&self) -> f64 {
        self.ps_full_power_prob()
    }

    /// Upper bound on `Pr(P̂_s < τ)` given the IPC power loss `ΔP`.
    pub fn ps_quantized_cdf_bound(&self, tau: f64, delta_p: f64) -> Result<f64> {
        self.check_power(tau)?;
        let p = &self.params;
        Ok(pu_clear(p) * p.lm1() * p.theta_p * p.lambda * (tau + delta_p) / (p.gamma_p * p.sigma2) * self.scale())
    }

    /// Density of the effective OCB channel gain, chi-square with `L − 1`
    /// complex degrees of freedom.
    pub fn effective_gain_pdf(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        let l = lu(&self.params);
        tau.powi(l as i32 - 2) * (-tau).exp() / gamma_int(l - 1).expect("L >= 3")
    }

    pub fn effective_gain_cdf(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        regularized_lower_gamma(lu(&self.params) - 1, tau).expect("valid order")
    }

    /// Density of `δ`: `(L−1)/r (1 − τ/r)^{L−2}` on `[0, r]`.
    pub fn delta_pdf(&self, tau: f64) -> f64 {
        let r = self.scale();
        if !(0.0..=r).contains(&tau) || r == 0.0 {
            return 0.0;
        }
        self.params.lm1() / r * (1.0 - tau / r).powf(self.params.lm1() - 1.0)
    }

    pub fn delta_cdf(&self, tau: f64) -> f64 {
        let r = self.scale();
        if r == 0.0 {
            return 1.0;
        }
        1.0 - (1.0 - (tau / r).clamp(0.0, 1.0)).powf(self.params.lm1())
    }

    /// `Pr(κ > τ) = (1 − τ)^{L−2}` for the overlap of two isotropic unit
    /// vectors in `C^{L-1}`.
    pub fn kappa_survival(&self, tau: f64) -> f64 {
        (1.0 - tau.clamp(0.0, 1.0)).powf(self.params.lm1() - 1.0)
    }
}

/// First-order bound `J(B) = φ 2^{-B/(L-1)} + c 2^{-(F-B)}` on the excess
/// outage, `c` the IPC penalty coefficient.
pub fn j_cost(params: &SystemParams, total: u32, b: f64) -> f64 {
    phi(params) * (-b / params.lm1()).exp2() + ipc_penalty_coeff(params) * (b - f64::from(total)).exp2()
}

/// `χ = γ_p Γ(L−1, x)/(λθ_pθ_s Γ(L−2, x))` with `x = θ_s/γ_max`.
pub fn chi(params: &SystemParams) -> f64 {
    let l = lu(params);
    let x = snr_ratio(params);
    params.gamma_p * upper_incomplete_gamma(l - 1, x).expect("L >= 3")
        / (params.lambda * params.theta_p * params.theta_s * upper_incomplete_gamma(l - 2, x).expect("L >= 3"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BitAllocation {
    pub total: u32,
    /// CDI bits after integer rounding.
    pub b_star: u32,
    /// IPC bits, `total − b_star`.
    pub a_star: u32,
    /// Stationary point before rounding.
    pub b_relaxed: f64,
    pub chi: f64,
    /// `J(B)` for `B = 0..=total`.
    pub j_curve: Vec<f64>,
}

/// Split `total = A + B` feedback bits to minimize `J(B)`.
pub fn optimal_bit_allocation(params: &SystemParams, total: u32) -> Result<BitAllocation> {
    if total == 0 {
        return Err(domain("total feedback bits must be at least 1"));
    }
    let f = f64::from(total);
    let l = params.antennas as f64;
    let chi = chi(params);
    let b_relaxed = ((l - 1.0) / l * (f - chi.log2()).max(0.0)).min(f);
    let lo = b_relaxed.floor() as u32;
    let hi = (b_relaxed.ceil() as u32).min(total);
    let b_star = if j_cost(params, total, f64::from(hi)) < j_cost(params, total, f64::from(lo)) {
        hi
    } else {
        lo
    };
    let j_curve = (0..=total).map(|b| j_cost(params, total, f64::from(b))).collect();
    Ok(BitAllocation {
        total,
        b_star,
        a_star: total - b_star,
        b_relaxed,
        chi,
        j_curve,
    })
}

/// Header of [`analytic_csv_row`].
pub const ANALYTIC_CSV_HEADER: &str = "formula,L,lambda,sigma2,theta_p,theta_s,gamma_p,p_max,B,A,value,unclamped,baseline,cdi_penalty,ipc_penalty,regime,validity_ratio,valid,clamped";

/// One CSV row describing a formula evaluation.
pub fn analytic_csv_row(formula: &str, params: &SystemParams, b: Bits, a: Bits, r: &AnalyticOutage) -> String {
    let regime = match r.regime {
        Regime::Finite => "finite",
        Regime::Asymptotic => "asymptotic",
    };
    [
        csv_field(formula),
        params.antennas.to_string(),
        fmt_float(params.lambda),
        fmt_float(params.sigma2),
        fmt_float(params.theta_p),
        fmt_float(params.theta_s),
        fmt_float(params.gamma_p),
        fmt_float(params.p_max),
        b.to_string(),
        a.to_string(),
        fmt_float(r.value),
        fmt_float(r.unclamped),
        fmt_float(r.baseline),
        fmt_float(r.cdi_penalty),
        fmt_float(r.ipc_penalty),
        regime.to_string(),
        fmt_float(r.validity_ratio),
        r.valid.to_string(),
        r.clamped.to_string(),
    ]
    .join(",")
}
