use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{IpcMode, TrialConfig};
use super::trial::{PreparedConfig, PreparedIpc};
use crate::channel::Bits;
use crate::error::{config, Error, Result};
use crate::feedback::{build_ipc_codebook, BeamMode, CodebookKind, IpcCodebook, NocbCodebooks};

/// Trials per work unit. Fixed so aggregation order never depends on the
/// number of workers.
pub const BATCH: u64 = 4096;

/// Aggregated outage statistics for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub su_outage: f64,
    pub pu_outage: f64,
    /// `1 − e^{-θ_p/γ_p}`.
    pub pu_outage_reference: f64,
    pub trials: u64,
    /// `3 √(p̂(1 − p̂)/n)` for the SU estimate.
    pub su_ci_halfwidth: f64,
    /// Same for the PU estimate.
    pub pu_ci_halfwidth: f64,
    pub mean_tx_power: f64,
    pub su_outages: u64,
    pub pu_outages: u64,
    /// Blocks where the PU is in outage even without SU interference.
    pub pu_outages_alone: u64,
    /// Blocks transmitting at `P_max` (to relative precision 1e-12).
    pub full_power: u64,
    /// Blocks whose interference exceeded the margin ω (ω ≥ 0).
    pub budget_violations: u64,
}

/// Three binomial standard errors.
pub fn ci_halfwidth(p: f64, n: u64) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    su: u64,
    pu: u64,
    pu_alone: u64,
    full_power: u64,
    violations: u64,
    power: f64,
}

impl Tally {
    fn merge(mut self, o: &Tally) -> Tally {
        self.su += o.su;
        self.pu += o.pu;
        self.pu_alone += o.pu_alone;
        self.full_power += o.full_power;
        self.violations += o.violations;
        self.power += o.power;
        self
    }
}

/// Outcome of comparing two configurations on common random numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairedEstimate {
    pub first: OutageEstimate,
    pub second: OutageEstimate,
    /// `P_out(first) − P_out(second)`.
    pub difference: f64,
    /// Standard error of the per-trial outcome difference.
    pub sigma_paired: f64,
    pub only_first: u64,
    pub only_second: u64,
}

/// One sweep row: the configuration echo and its estimate or error.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub config: TrialConfig,
    pub result: std::result::Result<OutageEstimate, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CodebookKey {
    params: String,
    kind: CodebookKind,
    n_samples: usize,
    seed: u64,
}

/// Monte Carlo engine: a worker pool plus a cache of IPC codebooks.
pub struct Engine {
    pool: rayon::ThreadPool,
    workers: usize,
    cache: Mutex<HashMap<CodebookKey, Arc<IpcCodebook>>>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine").field("workers", &self.workers).finish()
    }
}

/// Number of logical cores, at least 1.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl Engine {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(config("worker count must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?;
        Ok(Self {
            pool,
            workers,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Add a prebuilt codebook (e.g. loaded from JSON) to the cache.
    pub fn insert_codebook(&self, codebook: IpcCodebook) {
        let key = CodebookKey {
            params: codebook.params_hash.clone(),
            kind: codebook.mode,
            n_samples: codebook.n_samples,
            seed: codebook.seed,
        };
        self.cache.lock().expect("cache lock").insert(key, Arc::new(codebook));
    }

    /// Codebooks currently cached, in a stable order.
    pub fn cached_codebooks(&self) -> Vec<Arc<IpcCodebook>> {
        let cache = self.cache.lock().expect("cache lock");
        let mut all: Vec<_> = cache.values().cloned().collect();
        all.sort_by(|a, b| {
            (&a.params_hash, a.mode, a.n_samples, a.seed).cmp(&(&b.params_hash, b.mode, b.n_samples, b.seed))
        });
        all
    }

    /// Build or fetch a codebook.
    pub fn codebook(&self, cfg: &TrialConfig, kind: CodebookKind) -> Result<Arc<IpcCodebook>> {
        let key = CodebookKey {
            params: cfg.params.digest(),
            kind,
            n_samples: cfg.codebook.n_samples,
            seed: cfg.codebook.seed,
        };
        if let Some(cb) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(cb.clone());
        }
        let cb = Arc::new(build_ipc_codebook(&cfg.params, kind, cfg.codebook.n_samples, cfg.codebook.seed)?);
        self.cache.lock().expect("cache lock").insert(key, cb.clone());
        Ok(cb)
    }

    /// Validate a configuration and build the codebooks it needs.
    pub fn prepare(&self, cfg: &TrialConfig) -> Result<PreparedConfig> {
        cfg.validate()?;
        let ff = cfg.feedforward;
        let ipc = match (cfg.ipc_mode(), cfg.mode) {
            (IpcMode::Perfect, _) => PreparedIpc::Perfect,
            (IpcMode::Quantized(_), BeamMode::Ocb) => PreparedIpc::Ocb(self.codebook(cfg, CodebookKind::eta(ff))?),
            (IpcMode::Quantized(_), BeamMode::Nocb) => {
                let eta = match cfg.params.b_cdi {
                    Bits::Infinite => None,
                    Bits::Finite(_) => Some((*self.codebook(cfg, CodebookKind::eta(ff))?).clone()),
                };
                let nu = (*self.codebook(cfg, CodebookKind::nu(ff))?).clone();
                PreparedIpc::Nocb(Arc::new(NocbCodebooks { eta, nu }))
            }
        };
        Ok(PreparedConfig {
            config: cfg.clone(),
            ipc,
        })
    }

    fn tally(&self, prepared: &PreparedConfig) -> Tally {
        let n = prepared.config.n_trials;
        let p_max = prepared.config.params.p_max;
        let batches = n.div_ceil(BATCH);
        let parts: Vec<Tally> = self.pool.install(|| {
            (0..batches)
                .into_par_iter()
                .map(|k| {
                    let mut t = Tally::default();
                    for i in k * BATCH..((k + 1) * BATCH).min(n) {
                        let r = prepared.run_trial(i);
                        t.su += u64::from(r.su_outage);
                        t.pu += u64::from(r.pu_outage);
                        t.pu_alone += u64::from(r.pu_outage_alone);
                        t.full_power += u64::from(r.tx_power >= p_max * (1.0 - 1e-12));
                        t.violations += u64::from(r.omega >= 0.0 && r.interference > r.omega + crate::beamform::BUDGET_SLACK);
                        t.power += r.tx_power;
                    }
                    t
                })
                .collect()
        });
        parts.iter().fold(Tally::default(), |acc, t| acc.merge(t))
    }

    /// Estimate outage probabilities for a prepared configuration.
    pub fn estimate_prepared(&self, prepared: &PreparedConfig) -> OutageEstimate {
        let t = self.tally(prepared);
        let cfg = &prepared.config;
        let n = cfg.n_trials;
        let nf = n as f64;
        let su = t.su as f64 / nf;
        let pu = t.pu as f64 / nf;
        OutageEstimate {
            su_outage: su,
            pu_outage: pu,
            pu_outage_reference: cfg.params.pu_outage_reference(),
            trials: n,
            su_ci_halfwidth: ci_halfwidth(su, n),
            pu_ci_halfwidth: ci_halfwidth(pu, n),
            mean_tx_power: t.power / nf,
            su_outages: t.su,
            pu_outages: t.pu,
            pu_outages_alone: t.pu_alone,
            full_power: t.full_power,
            budget_violations: t.violations,
        }
    }

    /// Prepare and estimate in one step.
    pub fn estimate_outage(&self, cfg: &TrialConfig) -> Result<OutageEstimate> {
        let prepared = self.prepare(cfg)?;
        Ok(self.estimate_prepared(&prepared))
    }

    /// Compare two configurations trial by trial on common random numbers.
    pub fn estimate_paired(&self, first: &TrialConfig, second: &TrialConfig) -> Result<PairedEstimate> {
        if first.n_trials != second.n_trials || first.master_seed != second.master_seed {
            return Err(config("paired estimates need equal n_trials and master_seed"));
        }
        let a = self.prepare(first)?;
        let b = self.prepare(second)?;
        let n = first.n_trials;
        let batches = n.div_ceil(BATCH);
        let parts: Vec<(u64, u64)> = self.pool.install(|| {
            (0..batches)
                .into_par_iter()
                .map(|k| {
                    let (mut only_a, mut only_b) = (0u64, 0u64);
                    for i in k * BATCH..((k + 1) * BATCH).min(n) {
                        let (ra, rb) = (a.run_trial(i).su_outage, b.run_trial(i).su_outage);
                        only_a += u64::from(ra && !rb);
                        only_b += u64::from(rb && !ra);
                    }
                    (only_a, only_b)
                })
                .collect()
        });
        let (only_first, only_second) = parts.iter().fold((0, 0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        let nf = n as f64;
        let mean = (only_first as f64 - only_second as f64) / nf;
        let second_moment = (only_first + only_second) as f64 / nf;
        let sigma_paired = ((second_moment - mean * mean).max(0.0) / nf).sqrt();
        Ok(PairedEstimate {
            first: self.estimate_prepared(&a),
            second: self.estimate_prepared(&b),
            difference: mean,
            sigma_paired,
            only_first,
            only_second,
        })
    }

    /// Estimate every configuration in order. A failing row records its
    /// error and the sweep continues.
    pub fn sweep(&self, grid: &[TrialConfig]) -> Vec<SweepRow> {
        grid.iter()
            .map(|cfg| SweepRow {
                config: cfg.clone(),
                result: self.estimate_outage(cfg).map_err(|e| e.to_string()),
            })
            .collect()
    }
}
