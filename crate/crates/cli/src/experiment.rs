//! Running an experiment and writing its files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cogfeed_core::analysis::optimal_bit_allocation;
use cogfeed_core::channel::linear_to_db;
use cogfeed_core::report::fmt_float;
use cogfeed_core::sim::{sweep_csv, Engine, SweepRow, TrialConfig};
use cogfeed_core::{Bits, Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::allocate::{allocate, argmin_split, ALLOCATION_CSV_HEADER};
use crate::grid::Grid;
use crate::overlay::{overlay_csv_row, OVERLAY_CSV_HEADER};
use crate::spec::{ExperimentKind, ExperimentSpec};
use crate::validate::{ks_csv, validate_distributions};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Inputs that determine every output byte. Hashed into the manifest id.
#[derive(Serialize)]
struct HashedInputs<'a> {
    tool_version: &'a str,
    spec: &'a ExperimentSpec,
    configs: &'a [TrialConfig],
}

#[derive(Clone, Debug, Serialize)]
pub struct CodebookRecord {
    pub kind: String,
    pub a_bits: u32,
    pub b_cdi: Bits,
    pub params_hash: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub manifest_sha256: String,
    pub tool_version: String,
    pub spec: ExperimentSpec,
    pub configs: Vec<TrialConfig>,
    pub codebooks: Vec<CodebookRecord>,
    pub outputs: Vec<String>,
    pub workers: usize,
    pub wall_time_s: f64,
}

/// Where a run wrote its files.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub results: PathBuf,
    pub overlay: Option<PathBuf>,
    pub extra: Option<PathBuf>,
    pub manifest: PathBuf,
    pub manifest_sha256: String,
    /// Sweep rows, for sweep kinds.
    pub rows: Vec<SweepRow>,
}

/// Hash of the canonical inputs. The output location is not part of it.
pub fn manifest_hash(spec: &ExperimentSpec, configs: &[TrialConfig]) -> String {
    let mut spec = spec.clone();
    spec.output_path = None;
    let inputs = HashedInputs {
        tool_version: TOOL_VERSION,
        spec: &spec,
        configs,
    };
    let json = serde_json::to_vec(&inputs).expect("inputs serialize");
    hex::encode(Sha256::digest(&json))
}

fn stamped(hash: &str, body: &str) -> String {
    format!("# manifest_sha256={hash}\n{body}")
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Run `spec` and write `<stem>.results.csv`, `<stem>.analytic.csv` (sweeps),
/// `<stem>.argmin.csv` (figure6) and `<stem>.manifest.json` under `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, engine: &Engine, out_dir: &Path) -> Result<RunOutput> {
    spec.validate()?;
    let start = Instant::now();
    let stem = out_dir.join(spec.output_stem());
    let grid = Grid::for_spec(spec)?;
    let configs = if spec.kind.is_sweep() {
        grid.configs(spec)?
    } else {
        Vec::new()
    };
    let hash = manifest_hash(spec, &configs);

    let results = with_suffix(&stem, ".results.csv");
    let mut overlay = None;
    let mut extra = None;
    let mut rows = Vec::new();
    match spec.kind {
        ExperimentKind::ValidateDistributions => {
            let ks = validate_distributions(&spec.params()?, spec.n_trials as usize, spec.master_seed)?;
            write(&results, &stamped(&hash, &ks_csv(&ks)))?;
        }
        ExperimentKind::AllocateBits => {
            let total = grid.split.expect("allocate-bits has a split");
            let params = spec.params()?;
            let emp = spec
                .empirical
                .then_some((engine, spec.n_trials, spec.master_seed, spec.codebook));
            let report = allocate(&params, total, emp)?;
            let mut body = format!("{ALLOCATION_CSV_HEADER}\n");
            for r in report.csv_rows() {
                body.push_str(&r);
                body.push('\n');
            }
            write(&results, &stamped(&hash, &body))?;
        }
        _ => {
            rows = engine.sweep(&configs);
            write(&results, &stamped(&hash, &sweep_csv(&rows)))?;
            let mut body = format!("{OVERLAY_CSV_HEADER}\n");
            for c in &configs {
                body.push_str(&overlay_csv_row(c));
                body.push('\n');
            }
            let path = with_suffix(&stem, ".analytic.csv");
            write(&path, &stamped(&hash, &body))?;
            overlay = Some(path);
            if spec.kind == ExperimentKind::Figure6 {
                let path = with_suffix(&stem, ".argmin.csv");
                write(&path, &stamped(&hash, &argmin_csv(&rows)?))?;
                extra = Some(path);
            }
        }
    }

    let codebooks = engine
        .cached_codebooks()
        .iter()
        .filter(|cb| configs.iter().any(|c| c.params.digest() == cb.params_hash))
        .map(|cb| CodebookRecord {
            kind: serde_json::to_value(cb.mode).expect("kind serializes").as_str().unwrap_or_default().to_string(),
            a_bits: cb.a_bits,
            b_cdi: cb.b_cdi,
            params_hash: cb.params_hash.clone(),
            sha256: cb.digest(),
        })
        .collect();
    let manifest_path = with_suffix(&stem, ".manifest.json");
    let outputs = [Some(&results), overlay.as_ref(), extra.as_ref()]
        .into_iter()
        .flatten()
        .map(|p| p.display().to_string())
        .collect();
    let manifest = Manifest {
        manifest_sha256: hash.clone(),
        tool_version: TOOL_VERSION.to_string(),
        spec: spec.clone(),
        configs,
        codebooks,
        outputs,
        workers: engine.workers(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write(&manifest_path, &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    Ok(RunOutput {
        results,
        overlay,
        extra,
        manifest: manifest_path,
        manifest_sha256: hash,
        rows,
    })
}

pub const ARGMIN_CSV_HEADER: &str = "gamma_p_db,gamma_max_db,total,empirical_a,analytic_a,analytic_b_relaxed,trials";

/// Per `(γ_p, γ_max)` group of a figure6 sweep: the simulated best split
/// next to the closed-form one.
pub fn argmin_csv(rows: &[SweepRow]) -> Result<String> {
    let mut groups: Vec<(TrialConfig, Vec<(u32, cogfeed_core::OutageEstimate)>)> = Vec::new();
    for row in rows {
        let est = row.result.clone().map_err(Error::Config)?;
        let p = &row.config.params;
        let a = p.a_ipc.finite().expect("split rows have finite A");
        let key = |c: &TrialConfig| (c.params.gamma_p, c.params.p_max, c.params.antennas, c.mode, c.feedforward);
        match groups.iter_mut().find(|(c, _)| key(c) == key(&row.config)) {
            Some((_, v)) => v.push((a, est)),
            None => groups.push((row.config.clone(), vec![(a, est)])),
        }
    }
    let mut out = format!("{ARGMIN_CSV_HEADER}\n");
    for (cfg, ests) in &groups {
        let p = &cfg.params;
        let total = p.a_ipc.finite().unwrap_or(0) + p.b_cdi.finite().unwrap_or(0);
        let analytic = optimal_bit_allocation(p, total)?;
        out.push_str(
            &[
                fmt_float(linear_to_db(p.gamma_p)),
                fmt_float(linear_to_db(p.gamma_max())),
                total.to_string(),
                argmin_split(ests).to_string(),
                analytic.a_star.to_string(),
                fmt_float(analytic.b_relaxed),
                cfg.n_trials.to_string(),
            ]
            .join(","),
        );
        out.push('\n');
    }
    Ok(out)
}
