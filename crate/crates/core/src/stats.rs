//! Goodness-of-fit statistics used to validate sampled laws.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::mathkit::regularized_upper_gamma;

/// One-sample Kolmogorov-Smirnov result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS test of `samples` against a continuous CDF.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(domain("KS test needs at least one sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x).clamp(0.0, 1.0);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(d, sorted.len()),
        n: sorted.len(),
    })
}

/// Two-sample KS statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("two-sample KS test needs non-empty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = (na * nb / (na + nb)).round().max(1.0) as usize;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(d, n_eff),
        n: n_eff,
    })
}

/// Asymptotic Kolmogorov survival function with Stephens' small-sample
/// correction.
pub fn kolmogorov_survival(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = f64::from(k);
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Pearson chi-square test with `bins` equiprobable cells under `cdf`.
///
/// `bins` must be odd so the statistic has an even number of degrees of
/// freedom and the p-value reduces to an integer-order incomplete gamma.
pub fn chi_square_equiprobable<F: Fn(f64) -> f64>(samples: &[f64], bins: usize, cdf: F) -> Result<f64> {
    if bins < 3 || bins % 2 == 0 {
        return Err(domain("chi-square test needs an odd bin count >= 3"));
    }
    if samples.is_empty() {
        return Err(domain("chi-square test needs samples"));
    }
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let u = cdf(x).clamp(0.0, 1.0);
        let k = ((u * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let half_df = ((bins - 1) / 2) as u32;
    regularized_upper_gamma(half_df, stat / 2.0)
}

/// Mean and standard error of a binomial proportion.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
