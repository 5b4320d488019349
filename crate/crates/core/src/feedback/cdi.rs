//! Channel direction quantization: the sphere-cap statistical model, an
//! explicit random codebook for small budgets, and the decomposition of the
//! SU channel shape against the quantized PU direction.

use rand::Rng;
use serde::Serialize;

use crate::channel::Bits;
use crate::error::{Error, Result};
use crate::mathkit::{project_orthogonal, unit_orthogonal_to, unit_uniform_sphere, Complex, ComplexVector};

/// Largest CDI budget for which an explicit random codebook is materialized.
pub const MAX_RVQ_BITS: u32 = 16;

/// Quantized PU direction and the induced decomposition of `s_s`.
#[derive(Clone, Debug, Serialize)]
pub struct CdiQuantization {
    pub s_hat_x: ComplexVector,
    /// `1 - |ŝ_x† s_x|²`.
    pub epsilon: f64,
    /// `ŝ_x† s_s`.
    pub a: Complex,
    /// `ŝ_⊥† s_s`; real and non-negative by the choice of `ŝ_⊥`.
    pub b: Complex,
    /// Unit vector along the part of `s_s` orthogonal to `ŝ_x`; zero when
    /// `s_s` is parallel to `ŝ_x`.
    pub s_hat_perp: ComplexVector,
    /// `|s_x† ŝ_⊥|²`, never larger than `epsilon`.
    pub delta: f64,
}

impl CdiQuantization {
    /// Decompose `s_s` against a quantized direction `s_hat_x` whose error
    /// with respect to `s_x` is `epsilon`.
    pub fn decompose(s_x: &ComplexVector, s_s: &ComplexVector, s_hat_x: ComplexVector, epsilon: f64) -> Self {
        let a = s_hat_x.dot(s_s);
        let perp = project_orthogonal(s_s, &s_hat_x);
        let b = perp.norm();
        let (s_hat_perp, delta) = if b > 0.0 {
            let u = perp.scaled(1.0 / b);
            // The projection bound δ ≤ ε is exact; clamp away rounding.
            let d = s_x.dot(&u).norm_sqr().min(epsilon);
            (u, d)
        } else {
            (ComplexVector::zeros(s_s.len()), 0.0)
        };
        Self {
            s_hat_x,
            epsilon,
            a,
            b: Complex::new(b, 0.0),
            s_hat_perp,
            delta,
        }
    }

    /// Residual of `s_x` outside `span(ŝ_x, ŝ_⊥)`, i.e. the `q` component.
    pub fn residual(&self, s_x: &ComplexVector) -> ComplexVector {
        let mut q = project_orthogonal(s_x, &self.s_hat_x);
        if self.b.re > 0.0 {
            q = project_orthogonal(&q, &self.s_hat_perp);
        }
        q
    }
}

/// Maximum quantization error `2^{-B/(L-1)}` of the sphere-cap model.
pub fn cap_radius(bits: Bits, antennas: usize) -> f64 {
    bits.pow2_neg_over((antennas - 1) as f64)
}

/// Perturb the unit vector `s` to a point at chordal distance `ε` drawn from
/// the sphere-cap law `Pr(ε ≤ τ) = 2^B τ^{L-1}`. Returns the new direction
/// and `ε`.
pub fn sphere_cap_perturb<R: Rng + ?Sized>(s: &ComplexVector, bits: Bits, rng: &mut R) -> (ComplexVector, f64) {
    if bits.is_infinite() {
        return (s.clone(), 0.0);
    }
    let l = s.len();
    let u: f64 = rng.random();
    let eps = cap_radius(bits, l) * u.powf(1.0 / (l - 1) as f64);
    let w = unit_orthogonal_to(s, rng);
    let mut out = s.scaled((1.0 - eps).sqrt());
    out.add_scaled(Complex::new(eps.sqrt(), 0.0), &w);
    (out, eps)
}

/// Quantize `s_x` with the sphere-cap statistical model.
pub fn quantize_cdi_statistical<R: Rng + ?Sized>(
    s_x: &ComplexVector,
    s_s: &ComplexVector,
    bits: Bits,
    rng: &mut R,
) -> CdiQuantization {
    let (s_hat_x, eps) = sphere_cap_perturb(s_x, bits, rng);
    CdiQuantization::decompose(s_x, s_s, s_hat_x, eps)
}

/// Random codebook of `2^bits` isotropic unit vectors.
pub fn random_codebook<R: Rng + ?Sized>(antennas: usize, bits: u32, rng: &mut R) -> Result<Vec<ComplexVector>> {
    if bits > MAX_RVQ_BITS {
        return Err(Error::Resource(format!(
            "random codebook with {bits} bits exceeds the {MAX_RVQ_BITS}-bit limit"
        )));
    }
    Ok((0..1usize << bits).map(|_| unit_uniform_sphere(antennas, rng)).collect())
}

/// Quantize `s_x` to the codeword maximizing `|c† s_x|²`.
pub fn quantize_cdi_with_codebook(
    s_x: &ComplexVector,
    s_s: &ComplexVector,
    codebook: &[ComplexVector],
) -> Result<CdiQuantization> {
    let (best, gain) = codebook
        .iter()
        .map(|c| (c, c.dot(s_x).norm_sqr()))
        .fold(None, |acc: Option<(&ComplexVector, f64)>, cur| match acc {
            Some(prev) if prev.1 >= cur.1 => Some(prev),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::Domain("empty CDI codebook".into()))?;
    let eps = (1.0 - gain).clamp(0.0, 1.0);
    Ok(CdiQuantization::decompose(s_x, s_s, best.clone(), eps))
}

/// Random vector quantization: draw a fresh codebook of `2^B` isotropic
/// vectors and pick the best codeword. Perfect CDI when `B` is infinite.
pub fn quantize_cdi_rvq<R: Rng + ?Sized>(
    s_x: &ComplexVector,
    s_s: &ComplexVector,
    bits: Bits,
    rng: &mut R,
) -> Result<CdiQuantization> {
    match bits {
        Bits::Infinite => Ok(CdiQuantization::decompose(s_x, s_s, s_x.clone(), 0.0)),
        Bits::Finite(b) => {
            let codebook = random_codebook(s_x.len(), b, rng)?;
            quantize_cdi_with_codebook(s_x, s_s, &codebook)
        }
    }
}

/// Quantize the SU channel shape for local feedback or feedforward, using
/// the same sphere-cap model.
pub fn quantize_local_cdi<R: Rng + ?Sized>(s_s: &ComplexVector, bits: Bits, rng: &mut R) -> ComplexVector {
    sphere_cap_perturb(s_s, bits, rng).0
}
