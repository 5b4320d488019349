//! Splitting a fixed feedback budget between CDI and IPC bits.

use std::fmt::Write as _;

use cogfeed_core::analysis::{optimal_bit_allocation, BitAllocation};
use cogfeed_core::channel::linear_to_db;
use cogfeed_core::report::fmt_float;
use cogfeed_core::sim::{CodebookSettings, Engine, OutageEstimate, TrialConfig};
use cogfeed_core::{BeamMode, Bits, Result, SystemParams};
use serde::Serialize;

/// Simulated outage for every split `A = 1..F−1`, OCB without feedforward.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalSplit {
    /// `(A, estimate)` in increasing `A`.
    pub rows: Vec<(u32, OutageEstimate)>,
    /// Split with the fewest SU outages; ties go to the smaller `A`.
    pub argmin_a: u32,
    pub trials: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AllocationReport {
    pub params: SystemParams,
    pub analytic: BitAllocation,
    pub empirical: Option<EmpiricalSplit>,
}

/// Monte Carlo search over the split.
pub fn empirical_split(
    engine: &Engine,
    params: &SystemParams,
    total: u32,
    n_trials: u64,
    seed: u64,
    codebook: CodebookSettings,
) -> Result<EmpiricalSplit> {
    let mut rows = Vec::new();
    for a in 1..total {
        let p = params
            .clone()
            .with_cdi_bits(Bits::Finite(total - a))
            .with_ipc_bits(Bits::Finite(a));
        let mut cfg = TrialConfig::new(p, BeamMode::Ocb, false, n_trials, seed);
        cfg.codebook = codebook;
        rows.push((a, engine.estimate_outage(&cfg)?));
    }
    Ok(EmpiricalSplit {
        argmin_a: argmin_split(&rows),
        rows,
        trials: n_trials,
    })
}

/// The `A` with the fewest SU outages, smaller `A` on ties.
pub fn argmin_split(rows: &[(u32, OutageEstimate)]) -> u32 {
    rows.iter()
        .min_by_key(|(a, e)| (e.su_outages, *a))
        .map_or(0, |(a, _)| *a)
}

pub fn allocate(params: &SystemParams, total: u32, empirical: Option<(&Engine, u64, u64, CodebookSettings)>) -> Result<AllocationReport> {
    let analytic = optimal_bit_allocation(params, total)?;
    let empirical = match empirical {
        Some((engine, n, seed, cb)) if total >= 2 => Some(empirical_split(engine, params, total, n, seed, cb)?),
        _ => None,
    };
    Ok(AllocationReport {
        params: params.clone(),
        analytic,
        empirical,
    })
}

pub const ALLOCATION_CSV_HEADER: &str = "gamma_p_db,gamma_max_db,total,B,A,j_cost,analytic_b_star,analytic_a_star,su_outage,su_ci_halfwidth,trials";

impl AllocationReport {
    /// One row per `B = 0..=F`; the simulated columns are empty where no
    /// simulation ran.
    pub fn csv_rows(&self) -> Vec<String> {
        let p = &self.params;
        let an = &self.analytic;
        (0..=an.total)
            .map(|b| {
                let a = an.total - b;
                let sim = self
                    .empirical
                    .as_ref()
                    .and_then(|e| e.rows.iter().find(|(ra, _)| *ra == a))
                    .map(|(_, e)| e);
                [
                    fmt_float(linear_to_db(p.gamma_p)),
                    fmt_float(linear_to_db(p.gamma_max())),
                    an.total.to_string(),
                    b.to_string(),
                    a.to_string(),
                    fmt_float(an.j_curve[b as usize]),
                    an.b_star.to_string(),
                    an.a_star.to_string(),
                    sim.map(|e| fmt_float(e.su_outage)).unwrap_or_default(),
                    sim.map(|e| fmt_float(e.su_ci_halfwidth)).unwrap_or_default(),
                    sim.map(|e| e.trials.to_string()).unwrap_or_default(),
                ]
                .join(",")
            })
            .collect()
    }

    /// Human-readable summary.
    pub fn text(&self) -> String {
        let an = &self.analytic;
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "gamma_p = {} dB, gamma_max = {} dB, L = {}, total F = {}",
            fmt_float(linear_to_db(p.gamma_p)),
            fmt_float(linear_to_db(p.gamma_max())),
            p.antennas,
            an.total
        );
        let _ = writeln!(s, "chi = {}", fmt_float(an.chi));
        let _ = writeln!(
            s,
            "analytic: B* = {} (relaxed {}), A* = {}",
            an.b_star,
            fmt_float(an.b_relaxed),
            an.a_star
        );
        let _ = writeln!(s, "  B    J(B)");
        for (b, j) in an.j_curve.iter().enumerate() {
            let _ = writeln!(s, "  {b:<4} {}", fmt_float(*j));
        }
        if let Some(e) = &self.empirical {
            let _ = writeln!(s, "empirical ({} trials per split):", e.trials);
            let _ = writeln!(s, "  A    su_outage");
            for (a, est) in &e.rows {
                let _ = writeln!(s, "  {a:<4} {} ± {}", fmt_float(est.su_outage), fmt_float(est.su_ci_halfwidth));
            }
            let _ = writeln!(s, "empirical argmin: A = {}, B = {}", e.argmin_a, an.total - e.argmin_a);
        }
        s
    }
}
