//! Small complex-vector arithmetic and the integer-order special functions
//! used by the outage formulas.

use std::fmt;
use std::ops::{Add, Index, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{domain, Error, Result};

pub type Complex = Complex64;

/// Inline capacity of [`ComplexVector`]; longer vectors spill to the heap.
const INLINE: usize = 8;

/// Fixed-length column vector of complex scalars.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector(SmallVec<[Complex; INLINE]>);

impl ComplexVector {
    pub fn from_vec(elements: Vec<Complex>) -> Self {
        Self(SmallVec::from_vec(elements))
    }

    pub fn from_slice(elements: &[Complex]) -> Self {
        Self(SmallVec::from_slice(elements))
    }

    pub fn zeros(len: usize) -> Self {
        Self(SmallVec::from_elem(Complex::new(0.0, 0.0), len))
    }

    /// Standard basis vector `e_k` of length `len`.
    pub fn basis(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[k] = Complex::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self† other`, conjugating `self`.
    ///
    /// Panics if the lengths differ; use [`inner_product`] for a checked
    /// version.
    pub fn dot(&self, other: &ComplexVector) -> Complex {
        assert_eq!(self.len(), other.len(), "inner product of unequal lengths");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(Complex::new(0.0, 0.0), |acc, (u, v)| acc + u.conj() * v)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn scaled_by(&self, factor: Complex) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: Complex, other: &ComplexVector) {
        assert_eq!(self.len(), other.len(), "axpy of unequal lengths");
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += factor * b;
        }
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scaled(1.0 / n))
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex;

    fn index(&self, i: usize) -> &Complex {
        &self.0[i]
    }
}

impl FromIterator<Complex> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;

    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), rhs.len());
        self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect()
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;

    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), rhs.len());
        self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect()
    }
}

/// Checked inner product `u† v`.
pub fn inner_product(u: &ComplexVector, v: &ComplexVector) -> Result<Complex> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(u.dot(v))
}

/// Component of `v` orthogonal to the unit vector `u_unit`:
/// `v - (u† v) u`.
pub fn project_orthogonal(v: &ComplexVector, u_unit: &ComplexVector) -> ComplexVector {
    let mut w = v.clone();
    w.add_scaled(-u_unit.dot(v), u_unit);
    w
}

/// Γ(n) = (n-1)! for a positive integer order.
pub fn gamma_int(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(domain("gamma function needs order >= 1"));
    }
    Ok((1..n).map(f64::from).product())
}

/// Regularized upper incomplete gamma Q(n, x) = Γ(n, x)/Γ(n) for integer
/// order, via the finite series `e^{-x} Σ_{k<n} x^k / k!`.
pub fn regularized_upper_gamma(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("incomplete gamma needs order >= 1"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("incomplete gamma needs x >= 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n {
        term *= x / f64::from(k);
        sum += term;
    }
    Ok((-x).exp() * sum)
}

/// Regularized lower incomplete gamma P(n, x) = 1 − Q(n, x). Uses the
/// series `e^{-x} Σ_{k≥n} x^k/k!` for small x, where `1 − Q` would cancel.
pub fn regularized_lower_gamma(n: u32, x: f64) -> Result<f64> {
    let q = regularized_upper_gamma(n, x)?;
    if x >= f64::from(n) {
        return Ok(1.0 - q);
    }
    // term_k = x^k / k!, starting at k = n.
    let mut term = (-x).exp();
    for k in 1..=n {
        term *= x / f64::from(k);
    }
    let mut sum = 0.0;
    let mut k = n;
    while term > sum * f64::EPSILON * 0.25 {
        sum += term;
        k += 1;
        term *= x / f64::from(k);
    }
    Ok(sum)
}

/// Upper incomplete gamma Γ(n, x) = ∫ₓ^∞ t^{n-1} e^{-t} dt for integer
/// order n ≥ 1. Exact finite series; no continued fraction needed.
pub fn upper_incomplete_gamma(n: u32, x: f64) -> Result<f64> {
    Ok(gamma_int(n)? * regularized_upper_gamma(n, x)?)
}

/// Beta function B(x, y) for positive integer arguments.
pub fn beta_int(x: u32, y: u32) -> Result<f64> {
    Ok(gamma_int(x)? * gamma_int(y)? / gamma_int(x + y)?)
}

/// Vector with i.i.d. CN(0, variance) entries; real and imaginary parts are
/// independent N(0, variance/2).
pub fn complex_gaussian<R: Rng + ?Sized>(dim: usize, variance: f64, rng: &mut R) -> ComplexVector {
    let sd = (variance / 2.0).sqrt();
    (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(sd * re, sd * im)
        })
        .collect()
}

/// Isotropic unit vector in C^dim (normalized complex Gaussian).
pub fn unit_uniform_sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    assert!(dim >= 1, "sphere dimension must be positive");
    loop {
        if let Some(u) = complex_gaussian(dim, 1.0, rng).normalized() {
            return u;
        }
    }
}

/// Isotropic unit vector orthogonal to the unit vector `u`.
pub(crate) fn unit_orthogonal_to<R: Rng + ?Sized>(u: &ComplexVector, rng: &mut R) -> ComplexVector {
    loop {
        let g = complex_gaussian(u.len(), 1.0, rng);
        if let Some(w) = project_orthogonal(&g, u).normalized() {
            return w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{adaptive_simpson, seeded};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn inner_product_basis() {
        let e1 = ComplexVector::basis(4, 0);
        let e2 = ComplexVector::basis(4, 1);
        assert_eq!(inner_product(&e1, &e1).unwrap(), c(1.0, 0.0));
        assert_eq!(inner_product(&e1, &e2).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_length_mismatch() {
        let u = ComplexVector::zeros(3);
        let v = ComplexVector::zeros(4);
        assert!(matches!(
            inner_product(&u, &v),
            Err(Error::Dimension { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn inner_product_matches_elementwise_sum() {
        let mut rng = seeded(1);
        for _ in 0..100 {
            let u = complex_gaussian(5, 1.0, &mut rng);
            let v = complex_gaussian(5, 1.0, &mut rng);
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 0..5 {
                // (a - ib)(c + id) = (ac + bd) + i(ad - bc)
                re += u[k].re * v[k].re + u[k].im * v[k].im;
                im += u[k].re * v[k].im - u[k].im * v[k].re;
            }
            let got = inner_product(&u, &v).unwrap();
            assert!((got.re - re).abs() < 1e-12 && (got.im - im).abs() < 1e-12);
            let uu = inner_product(&u, &u).unwrap();
            assert!((uu.re - u.norm_sqr()).abs() < 1e-12 && uu.im.abs() < 1e-12);
        }
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let mut rng = seeded(2);
        let u = complex_gaussian(4, 1.0, &mut rng);
        let v = complex_gaussian(4, 1.0, &mut rng);
        let k = c(0.3, -1.2);
        let lhs = u.scaled_by(k).dot(&v);
        let rhs = k.conj() * u.dot(&v);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn projection_special_cases() {
        let u = ComplexVector::basis(3, 0);
        assert!(project_orthogonal(&u, &u).norm() == 0.0);
        let v = ComplexVector::from_slice(&[c(0.0, 0.0), c(1.0, 2.0), c(-0.5, 0.0)]);
        assert_eq!(project_orthogonal(&v, &u), v);
    }

    #[test]
    fn projection_reconstructs() {
        let mut rng = seeded(3);
        for _ in 0..100 {
            let u = unit_uniform_sphere(4, &mut rng);
            let v = complex_gaussian(4, 2.0, &mut rng);
            let w = project_orthogonal(&v, &u);
            assert!(w.dot(&u).norm() < 1e-12);
            let mut rebuilt = w.clone();
            rebuilt.add_scaled(u.dot(&v), &u);
            assert!((&rebuilt - &v).norm() < 1e-12);
        }
    }

    #[test]
    fn incomplete_gamma_closed_forms() {
        assert!((upper_incomplete_gamma(3, 0.0).unwrap() - 2.0).abs() < 1e-15);
        for x in [0.0, 0.1, 1.0, 7.5] {
            assert!((upper_incomplete_gamma(1, x).unwrap() - (-x).exp()).abs() < 1e-15);
        }
        assert!(upper_incomplete_gamma(0, 1.0).is_err());
        assert!(upper_incomplete_gamma(2, -1.0).is_err());
    }

    #[test]
    fn incomplete_gamma_matches_quadrature() {
        // ∫_{1.5}^∞ t³ e^{-t} dt; the tail beyond 80 is below 1e-28.
        let oracle = adaptive_simpson(&|t: f64| t.powi(3) * (-t).exp(), 1.5, 80.0, 1e-13);
        let got = upper_incomplete_gamma(4, 1.5).unwrap();
        assert!((got - oracle).abs() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn lower_gamma_complements_upper() {
        for n in 1..8 {
            for &x in &[0.0, 1e-12, 1e-4, 0.3, 2.0, 7.5, 30.0] {
                let p = regularized_lower_gamma(n, x).unwrap();
                let q = regularized_upper_gamma(n, x).unwrap();
                assert!((p + q - 1.0).abs() < 1e-14, "{n} {x}");
                assert!(p >= 0.0);
            }
        }
        // Leading term x^n/n! for tiny x.
        let x = 1e-6;
        let p = regularized_lower_gamma(3, x).unwrap();
        assert!((p / (x * x * x / 6.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn beta_matches_gamma_identity() {
        assert!((beta_int(2, 3).unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_dim_one_is_unit_modulus() {
        let mut rng = seeded(4);
        let u = unit_uniform_sphere(1, &mut rng);
        assert_eq!(u.len(), 1);
        assert!((u[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_first_coordinate_power_is_one_over_dim() {
        let mut rng = seeded(5);
        let n = 100_000;
        let dim = 4;
        let samples: Vec<f64> = (0..n)
            .map(|_| unit_uniform_sphere(dim, &mut rng)[0].norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        // |u_1|^2 ~ Beta(1, dim-1): variance (dim-1)/(dim^2 (dim+1)).
        let var = (dim - 1) as f64 / ((dim * dim) as f64 * (dim + 1) as f64);
        let sigma = (var / n as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn sphere_pair_overlap_law() {
        // Brute-force empirical CDF of |u†v|² against 1-(1-τ)^{dim-1}.
        let mut rng = seeded(6);
        let n = 50_000;
        let dim = 3;
        let overlaps: Vec<f64> = (0..n)
            .map(|_| {
                let u = unit_uniform_sphere(dim, &mut rng);
                let v = unit_uniform_sphere(dim, &mut rng);
                u.dot(&v).norm_sqr()
            })
            .collect();
        for tau in [0.1, 0.3, 0.5, 0.8] {
            let emp = overlaps.iter().filter(|&&k| k <= tau).count() as f64 / n as f64;
            let exact = 1.0 - (1.0 - tau).powi(dim as i32 - 1);
            let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
            assert!((emp - exact).abs() < 4.0 * sigma, "tau {tau}: {emp} vs {exact}");
        }
    }

    #[test]
    fn sphere_passes_chi_square_against_beta() {
        // |u†w|² for fixed unit w is Beta(1, dim-1); 21 equiprobable bins.
        let mut rng = seeded(7);
        let dim = 4;
        let n = 100_000;
        let w = unit_uniform_sphere(dim, &mut rng);
        let draws: Vec<f64> = (0..n)
            .map(|_| unit_uniform_sphere(dim, &mut rng).dot(&w).norm_sqr())
            .collect();
        let cdf = |t: f64| 1.0 - (1.0 - t).powi(dim as i32 - 1);
        let p = crate::stats::chi_square_equiprobable(&draws, 21, cdf).unwrap();
        assert!(p > 0.01, "p = {p}");
    }

    proptest! {
        #[test]
        fn pythagoras_for_projection(
            re in prop::collection::vec(-5.0f64..5.0, 8),
            seed in 0u64..1000,
        ) {
            let mut rng = seeded(seed);
            let u = unit_uniform_sphere(4, &mut rng);
            let v: ComplexVector = (0..4).map(|k| Complex::new(re[k], re[k + 4])).collect();
            let w = project_orthogonal(&v, &u);
            let lhs = w.norm_sqr() + u.dot(&v).norm_sqr();
            prop_assert!((lhs - v.norm_sqr()).abs() < 1e-10);
        }

        #[test]
        fn regularized_gamma_is_survival(n in 1u32..12, x in 0.0f64..50.0, dx in 0.0f64..5.0) {
            let q0 = regularized_upper_gamma(n, 0.0).unwrap();
            prop_assert!((q0 - 1.0).abs() < 1e-15);
            let a = regularized_upper_gamma(n, x).unwrap();
            let b = regularized_upper_gamma(n, x + dx).unwrap();
            prop_assert!(b <= a + 1e-15);
            prop_assert!(regularized_upper_gamma(n, 1e4).unwrap() < 1e-300);
        }
    }
}
