//! Goodness-of-fit checks of sampled quantities against their laws.

use cogfeed_core::analysis::lemma_distributions;
use cogfeed_core::report::fmt_float;
use cogfeed_core::sim::{Engine, TrialConfig};
use cogfeed_core::stats::ks_test;
use cogfeed_core::{BeamMode, Bits, Error, Result, SystemParams};
use serde::Serialize;

/// A law passes when its KS p-value exceeds this.
pub const KS_P_THRESHOLD: f64 = 0.01;

pub const KS_CSV_HEADER: &str = "law,samples,statistic,p_value,pass";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsRow {
    pub law: &'static str,
    pub samples: usize,
    pub statistic: f64,
    pub p_value: f64,
}

impl KsRow {
    pub fn pass(&self) -> bool {
        self.p_value > KS_P_THRESHOLD
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.law,
            self.samples,
            fmt_float(self.statistic),
            fmt_float(self.p_value),
            self.pass()
        )
    }
}

/// Draw `n` OCB blocks and test:
/// - `effective_gain`: `|f̂† h_s|²` with `f̂ = f/√P_s`, against chi-square
///   with `L − 1` complex degrees of freedom;
/// - `delta`: the residual overlap `δ` against its CDF;
/// - `kappa`: `δ/ε` against `1 − (1 − τ)^{L−2}`.
pub fn validate_distributions(params: &SystemParams, n: usize, seed: u64) -> Result<Vec<KsRow>> {
    let b = match params.b_cdi {
        Bits::Finite(b) => b,
        Bits::Infinite => return Err(Error::Config("distribution checks need finite CDI bits".into())),
    };
    let params = params.clone().with_ipc_bits(Bits::Infinite);
    let cfg = TrialConfig::new(params.clone(), BeamMode::Ocb, false, n as u64, seed);
    let prepared = Engine::new(1)?.prepare(&cfg)?;
    let mut gain = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let t = prepared.run_trial_traced(i);
        if t.beam.power > 0.0 {
            let inner = t.beam.f.dot(&t.channel.h_s);
            gain.push(inner.norm_sqr() / t.beam.power);
        }
        delta.push(t.cdi.delta);
        if t.cdi.epsilon > 0.0 {
            kappa.push(t.cdi.delta / t.cdi.epsilon);
        }
    }
    let laws = lemma_distributions(&params, Bits::Finite(b));
    let row = |law, samples: &[f64], cdf: &dyn Fn(f64) -> f64| -> Result<KsRow> {
        let ks = ks_test(samples, cdf)?;
        Ok(KsRow {
            law,
            samples: ks.n,
            statistic: ks.statistic,
            p_value: ks.p_value,
        })
    };
    Ok(vec![
        row("effective_gain", &gain, &|x| laws.effective_gain_cdf(x))?,
        row("delta", &delta, &|x| laws.delta_cdf(x))?,
        row("kappa", &kappa, &|x| 1.0 - laws.kappa_survival(x))?,
    ])
}

pub fn ks_csv(rows: &[KsRow]) -> String {
    let mut out = format!("{KS_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}
