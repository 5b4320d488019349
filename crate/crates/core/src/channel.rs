//! System parameters, block-fading channel draws, and the PU/SU link
//! metrics.

use std::fmt;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{config, Result};
use crate::mathkit::{complex_gaussian, ComplexVector};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// A feedback bit budget; `Infinite` models perfect (unquantized) feedback.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bits {
    Finite(u32),
    Infinite,
}

impl Bits {
    pub fn is_infinite(self) -> bool {
        matches!(self, Bits::Infinite)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Bits::Finite(b) => Some(b),
            Bits::Infinite => None,
        }
    }

    /// `2^{-bits/den}`, zero for infinite budgets.
    pub fn pow2_neg_over(self, den: f64) -> f64 {
        match self {
            Bits::Finite(b) => (-f64::from(b) / den).exp2(),
            Bits::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bits::Finite(b) => write!(f, "{b}"),
            Bits::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bits::Finite(b) => s.serialize_u32(*b),
            Bits::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u32),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(b) => Ok(Bits::Finite(b)),
            Raw::Word(w) if matches!(w.as_str(), "inf" | "infinite" | "perfect") => Ok(Bits::Infinite),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a bit count or \"inf\", got {w:?}"
            ))),
        }
    }
}

/// Scalar constants of the two-link model.
///
/// `gamma_max` is not stored; it is always `p_max / sigma2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// SU transmit antennas L.
    pub antennas: usize,
    /// Path-loss factor λ of the SU→PU channel.
    pub lambda: f64,
    /// Noise variance σ².
    pub sigma2: f64,
    /// PU SINR decoding threshold θ_p (linear).
    pub theta_p: f64,
    /// SU SNR decoding threshold θ_s (linear).
    pub theta_s: f64,
    /// PU transmit SNR γ_p (linear).
    pub gamma_p: f64,
    /// Maximum SU transmit power.
    pub p_max: f64,
    /// CDI feedback bits B.
    pub b_cdi: Bits,
    /// IPC feedback bits A.
    pub a_ipc: Bits,
    /// Local feedback / feedforward bits B'.
    pub b_local: Bits,
}

impl Default for SystemParams {
    /// θ_p = θ_s = 3, λ = 0.1, σ² = 1, L = 4, γ_p = 10 dB, γ_max = 10 dB,
    /// B = 16, perfect IPC and local feedback.
    fn default() -> Self {
        Self {
            antennas: 4,
            lambda: 0.1,
            sigma2: 1.0,
            theta_p: 3.0,
            theta_s: 3.0,
            gamma_p: 10.0,
            p_max: 10.0,
            b_cdi: Bits::Finite(16),
            a_ipc: Bits::Infinite,
            b_local: Bits::Infinite,
        }
    }
}

impl SystemParams {
    pub fn gamma_max(&self) -> f64 {
        self.p_max / self.sigma2
    }

    pub fn with_gamma_max_db(mut self, db: f64) -> Self {
        self.p_max = db_to_linear(db) * self.sigma2;
        self
    }

    pub fn with_gamma_p_db(mut self, db: f64) -> Self {
        self.gamma_p = db_to_linear(db);
        self
    }

    pub fn with_cdi_bits(mut self, b: Bits) -> Self {
        self.b_cdi = b;
        self
    }

    pub fn with_ipc_bits(mut self, a: Bits) -> Self {
        self.a_ipc = a;
        self
    }

    pub fn with_local_bits(mut self, b: Bits) -> Self {
        self.b_local = b;
        self
    }

    pub fn with_antennas(mut self, l: usize) -> Self {
        self.antennas = l;
        self
    }

    /// `L - 1` as a float, the exponent denominator that recurs everywhere.
    pub(crate) fn lm1(&self) -> f64 {
        (self.antennas - 1) as f64
    }

    /// Probability the PU is in outage without any interference,
    /// `Pr(γ_p g_p < θ_p)`.
    pub fn pu_outage_reference(&self) -> f64 {
        -(-self.theta_p / self.gamma_p).exp_m1()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if self.antennas < 3 {
            return Err(config(format!(
                "antennas must be at least 3, got {}",
                self.antennas
            )));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(config(format!("lambda must lie in (0, 1), got {}", self.lambda)));
        }
        positive("sigma2", self.sigma2)?;
        positive("theta_p", self.theta_p)?;
        positive("theta_s", self.theta_s)?;
        positive("gamma_p", self.gamma_p)?;
        positive("p_max", self.p_max)?;
        Ok(())
    }

    /// Short stable digest of the parameter set, used to key codebooks.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("params serialize");
        let hash = Sha256::digest(&json);
        hex::encode(&hash[..8])
    }
}

/// One block-fading draw with its gain/shape decompositions.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    /// SU→PU channel, i.i.d. CN(0, λ).
    pub h_x: ComplexVector,
    /// SU link channel, i.i.d. CN(0, 1).
    pub h_s: ComplexVector,
    /// PU link channel power, Exp(1).
    pub g_p: f64,
    /// `‖h_x‖² / λ`.
    pub g_x: f64,
    pub s_x: ComplexVector,
    /// `‖h_s‖²`.
    pub g_s: f64,
    pub s_s: ComplexVector,
}

impl ChannelRealization {
    /// Build the decomposition from raw channels.
    pub fn from_channels(h_x: ComplexVector, h_s: ComplexVector, g_p: f64, lambda: f64) -> Self {
        let nx = h_x.norm();
        let ns = h_s.norm();
        let s_x = h_x.scaled(1.0 / nx);
        let s_s = h_s.scaled(1.0 / ns);
        Self {
            g_x: nx * nx / lambda,
            g_s: ns * ns,
            h_x,
            h_s,
            g_p,
            s_x,
            s_s,
        }
    }
}

/// Draw `h_x`, `h_s` and `g_p` (in that order) from `rng`.
pub fn sample_channels<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelRealization {
    let l = params.antennas;
    let h_x = complex_gaussian(l, params.lambda, rng);
    let h_s = complex_gaussian(l, 1.0, rng);
    let g_p: f64 = rng.sample(Exp1);
    ChannelRealization::from_channels(h_x, h_s, g_p, params.lambda)
}

/// PU receive SINR `γ_p g_p / (1 + |f† h_x|² / σ²)`.
pub fn pu_sinr(real: &ChannelRealization, f: &ComplexVector, params: &SystemParams) -> f64 {
    let interference = f.dot(&real.h_x).norm_sqr();
    params.gamma_p * real.g_p / (1.0 + interference / params.sigma2)
}

/// SU receive SNR `|f† h_s|² / σ²`; interference from the PU transmitter is
/// neglected.
pub fn su_snr(real: &ChannelRealization, f: &ComplexVector, params: &SystemParams) -> f64 {
    f.dot(&real.h_s).norm_sqr() / params.sigma2
}
