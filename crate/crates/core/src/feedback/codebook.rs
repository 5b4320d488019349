//! Equal-probability scalar codebooks for the IPC feedback signal.
//!
//! The levels are empirical quantiles of the unquantized IPC signal given
//! that the PU is not already in outage. Orthogonal-branch codebooks (η and
//! its feedforward variant) come from plain rejection sampling. The leaky
//! NOCB codebooks (ν² given ν ≥ 0) condition on an event that becomes very
//! rare at high transmit power, so they use an exact conditional sampler
//! instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{Bits, SystemParams};
use crate::error::{config, domain, Error, Result};

/// Smallest accepted construction sample count.
pub const MIN_CODEBOOK_SAMPLES: usize = 100_000;

/// Largest IPC budget; keeps `2^A` levels well inside the sample count.
pub const MAX_IPC_BITS: u32 = 16;

/// Which unquantized IPC signal a codebook quantizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodebookKind {
    /// η for OCB and the orthogonal NOCB branch.
    Eta,
    /// η with feedforward (δ in place of ε).
    EtaFf,
    /// ν² on the leaky NOCB branch.
    Nu,
    /// ν² with feedforward.
    NuFf,
}

impl CodebookKind {
    pub fn feedforward(self) -> bool {
        matches!(self, CodebookKind::EtaFf | CodebookKind::NuFf)
    }

    pub fn is_nu(self) -> bool {
        matches!(self, CodebookKind::Nu | CodebookKind::NuFf)
    }

    pub fn eta(feedforward: bool) -> Self {
        if feedforward {
            CodebookKind::EtaFf
        } else {
            CodebookKind::Eta
        }
    }

    pub fn nu(feedforward: bool) -> Self {
        if feedforward {
            CodebookKind::NuFf
        } else {
            CodebookKind::Nu
        }
    }

    fn stream(self) -> u64 {
        match self {
            CodebookKind::Eta => 1,
            CodebookKind::EtaFf => 2,
            CodebookKind::Nu => 3,
            CodebookKind::NuFf => 4,
        }
    }
}

/// Quantizer levels `p_0 = 0 < p_1 < … < p_{N-1}` with the `P_max` cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpcCodebook {
    pub mode: CodebookKind,
    #[serde(rename = "A")]
    pub a_bits: u32,
    #[serde(rename = "B")]
    pub b_cdi: Bits,
    #[serde(rename = "params-hash")]
    pub params_hash: String,
    pub p_max: f64,
    pub levels: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

impl IpcCodebook {
    /// Codebook from explicit levels, mainly for tests and synthetic setups.
    pub fn from_levels(mode: CodebookKind, levels: Vec<f64>, p_max: f64) -> Result<Self> {
        let n = levels.len();
        if !n.is_power_of_two() || n < 2 {
            return Err(domain(format!("codebook size {n} is not 2^A with A >= 1")));
        }
        let cb = Self {
            mode,
            a_bits: n.trailing_zeros(),
            b_cdi: Bits::Infinite,
            params_hash: String::new(),
            p_max,
            levels,
            n_samples: 0,
            seed: 0,
        };
        cb.check()?;
        Ok(cb)
    }

    fn check(&self) -> Result<()> {
        if self.levels.len() != 1usize << self.a_bits {
            return Err(domain(format!(
                "codebook has {} levels, expected 2^{}",
                self.levels.len(),
                self.a_bits
            )));
        }
        if self.levels[0] != 0.0 {
            return Err(domain("first codebook level must be 0"));
        }
        if self.levels.iter().any(|p| !p.is_finite()) {
            return Err(domain("codebook levels must be finite"));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("codebook levels must be strictly increasing"));
        }
        if self.p_max.is_nan() || self.p_max <= 0.0 {
            return Err(domain("codebook cap must be positive"));
        }
        Ok(())
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// `⌊x⌋_𝒫`: the largest level not above `x`, or `P_max` once `x`
    /// reaches the cap. Never exceeds `x` or `P_max`; NaN maps to zero.
    pub fn floor(&self, x: f64) -> f64 {
        if x.is_nan() {
            return 0.0;
        }
        if x >= self.p_max {
            return self.p_max;
        }
        let idx = self.levels.partition_point(|&p| p <= x);
        if idx == 0 {
            0.0
        } else {
            self.levels[idx - 1]
        }
    }

    /// Number of levels strictly above `P_max`; these can never be emitted.
    pub fn levels_above_pmax(&self) -> usize {
        self.levels.iter().filter(|&&p| p > self.p_max).count()
    }

    /// True when more than two levels exceed the power cap.
    pub fn cap_flag(&self) -> bool {
        self.levels_above_pmax() > 2
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cb: Self = serde_json::from_str(text)?;
        cb.check()?;
        Ok(cb)
    }

    /// SHA-256 over the compact JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("codebook serializes");
        hex::encode(Sha256::digest(&json))
    }
}

/// Worst-case power lost to IPC quantization below the cap: the largest
/// level spacing up to the first level at or above `P_max`.
pub fn ipc_power_loss_bound(codebook: &IpcCodebook, params: &SystemParams) -> f64 {
    let levels = &codebook.levels;
    let n0 = (1..levels.len())
        .find(|&n| levels[n] >= params.p_max)
        .unwrap_or(levels.len() - 1);
    (1..=n0).map(|n| levels[n] - levels[n - 1]).fold(0.0, f64::max)
}

/// Deterministic generator for codebook construction. Streams are taken
/// from the top of the range so they never coincide with per-trial streams
/// derived from the same seed.
pub fn codebook_rng(seed: u64, kind: CodebookKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - kind.stream());
    rng
}

/// Build an equal-probability codebook of `2^A` levels for `kind`, with
/// `A = params.a_ipc` and `B = params.b_cdi`.
pub fn build_ipc_codebook(params: &SystemParams, kind: CodebookKind, n_samples: usize, seed: u64) -> Result<IpcCodebook> {
    params.validate()?;
    let a_bits = match params.a_ipc {
        Bits::Finite(a) if (1..=MAX_IPC_BITS).contains(&a) => a,
        other => {
            return Err(config(format!(
                "quantized IPC needs 1 <= A <= {MAX_IPC_BITS}, got {other}"
            )))
        }
    };
    if n_samples < MIN_CODEBOOK_SAMPLES {
        return Err(config(format!(
            "codebook construction needs at least {MIN_CODEBOOK_SAMPLES} samples, got {n_samples}"
        )));
    }
    let mut rng = codebook_rng(seed, kind);
    let mut values = if kind.is_nu() {
        sample_nu_squared(params, kind.feedforward(), n_samples, &mut rng)?
    } else {
        if params.b_cdi.is_infinite() {
            return Err(domain("η is unbounded under perfect CDI; no codebook exists"));
        }
        let values = sample_eta(params, kind.feedforward(), n_samples, &mut rng)?;
        let required = n_samples.div_ceil(10);
        if values.len() < required {
            return Err(Error::Sampling {
                accepted: values.len(),
                required,
            });
        }
        values
    };
    values.sort_by(f64::total_cmp);
    let n = 1usize << a_bits;
    let m = values.len();
    let mut levels = Vec::with_capacity(n);
    levels.push(0.0);
    for k in 1..n {
        // Smallest sample whose empirical CDF reaches k/N.
        let idx = (k * m).div_ceil(n) - 1;
        levels.push(values[idx]);
    }
    let cb = IpcCodebook {
        mode: kind,
        a_bits,
        b_cdi: params.b_cdi,
        params_hash: params.digest(),
        p_max: params.p_max,
        levels,
        n_samples,
        seed,
    };
    cb.check()?;
    Ok(cb)
}

fn gamma_l(params: &SystemParams, rate: f64) -> Gamma<f64> {
    Gamma::new(params.antennas as f64, 1.0 / rate).expect("valid gamma parameters")
}

/// Draws of η (or ή) given ω ≥ 0, out of `n` unconditional draws of
/// `(g_p, g_x, ε, κ)`.
fn sample_eta<R: Rng + ?Sized>(params: &SystemParams, feedforward: bool, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let lm1 = (params.antennas - 1) as f64;
    let lm2 = (params.antennas - 2) as f64;
    let radius = params.b_cdi.pow2_neg_over(lm1);
    let gx_law = gamma_l(params, 1.0);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let g_p: f64 = rng.sample(Exp1);
        let g_x = gx_law.sample(rng);
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let omega = super::compute_omega(g_p, params);
        if omega < 0.0 {
            continue;
        }
        let eps = radius * u.powf(1.0 / lm1);
        let d = if feedforward {
            // δ = κ ε with Pr(κ > t) = (1 - t)^{L-2}.
            eps * (1.0 - v.powf(1.0 / lm2))
        } else {
            eps
        };
        let eta = omega / (params.lambda * g_x * d);
        if !eta.is_finite() {
            continue;
        }
        out.push(eta);
    }
    Ok(out)
}

/// Inverse-CDF sampler for a density on `(0, τ_max]` given by its
/// logarithm, tabulated on a log-spaced grid.
struct LogGridSampler {
    tau_max: f64,
    x: Vec<f64>,
    cdf: Vec<f64>,
}

impl LogGridSampler {
    const POINTS: usize = 8192;
    /// Span of `ln τ` below `ln τ_max` covered by the grid.
    const SPAN: f64 = 40.0;

    fn new(tau_max: f64, log_density: impl Fn(f64) -> f64) -> Self {
        let hi = tau_max.ln();
        let lo = hi - Self::SPAN;
        let h = (hi - lo) / (Self::POINTS - 1) as f64;
        let x: Vec<f64> = (0..Self::POINTS).map(|i| lo + h * i as f64).collect();
        // Density in x = ln τ is τ f(τ).
        let logs: Vec<f64> = x.iter().map(|&xi| xi + log_density(xi.exp())).collect();
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let dens: Vec<f64> = logs.iter().map(|&l| (l - peak).exp()).collect();
        let mut cdf = Vec::with_capacity(Self::POINTS);
        cdf.push(0.0);
        for i in 1..Self::POINTS {
            let prev = cdf[i - 1];
            cdf.push(prev + 0.5 * h * (dens[i] + dens[i - 1]));
        }
        let total = cdf[Self::POINTS - 1];
        assert!(total.is_finite() && total > 0.0, "degenerate tilted density");
        for c in &mut cdf {
            *c /= total;
        }
        Self { tau_max, x, cdf }
    }

    fn sample(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        (self.x[i - 1] + t * (self.x[i] - self.x[i - 1])).exp().min(self.tau_max)
    }
}

/// Exact draws of ν² (or ν́²) given ω ≥ 0 and ν ≥ 0.
///
/// Given ω ≥ 0, ω is `m·Exp(1)` with `m = σ²γ_p/θ_p`. The leaky event
/// `ω ≥ λ g_x τ P_max` (τ = ε, or δ with feedforward) then has probability
/// `exp(-c g_x τ)` with `c = λ P_max / m`, so conditionally τ is tilted by
/// `(1 + cτ)^{-L}`, `g_x | τ` is `Gamma(L, 1 + cτ)`, and the excess of ω
/// over the threshold is again `m·Exp(1)`.
fn sample_nu_squared<R: Rng + ?Sized>(
    params: &SystemParams,
    feedforward: bool,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let l = params.antennas as f64;
    let lm1 = l - 1.0;
    let lm2 = l - 2.0;
    let m = params.sigma2 * params.gamma_p / params.theta_p;
    let c = params.lambda * params.p_max / m;
    let tau_max = params.b_cdi.pow2_neg_over(lm1);
    let sampler = (tau_max > 0.0).then(|| {
        if feedforward {
            LogGridSampler::new(tau_max, |t| {
                lm2 * (-(t / tau_max).min(1.0)).ln_1p() - l * (c * t).ln_1p()
            })
        } else {
            LogGridSampler::new(tau_max, |t| lm2 * t.ln() - l * (c * t).ln_1p())
        }
    });
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (tau, eps) = match &sampler {
            None => (0.0, 0.0),
            Some(s) => {
                let tau = s.sample(rng.random());
                let eps = if feedforward {
                    let u: f64 = rng.random();
                    tau + (tau_max - tau) * u.powf(1.0 / lm2)
                } else {
                    tau
                };
                (tau, eps)
            }
        };
        let g_x = gamma_l(params, 1.0 + c * tau).sample(rng);
        let excess: f64 = rng.sample(Exp1);
        let omega = params.lambda * g_x * tau * params.p_max + m * excess;
        let nu = ((omega / (params.lambda * g_x)).sqrt() - (tau * params.p_max).sqrt()) / (1.0 - eps).sqrt();
        if nu.is_finite() {
            out.push(nu.max(0.0).powi(2));
        }
    }
    if out.len() < n.div_ceil(10) {
        return Err(Error::Sampling {
            accepted: out.len(),
            required: n.div_ceil(10),
        });
    }
    Ok(out)
}
