use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use cogfeed_cli::allocate::allocate;
use cogfeed_cli::validate::{validate_distributions, KS_CSV_HEADER};
use cogfeed_cli::{run_experiment, ExperimentSpec};
use cogfeed_core::sim::{default_workers, CodebookSettings, Engine};
use cogfeed_core::SystemParams;

#[derive(Parser)]
#[command(name = "cogfeed", version, about = "Cognitive beamforming with finite-rate feedback: outage experiments")]
struct Cli {
    /// Master seed; overrides the spec's `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "COGFEED_WORKERS")]
    workers: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON spec file.
    Run { spec: PathBuf },
    /// Split a total feedback budget between CDI and IPC bits.
    AllocateBits {
        #[arg(long)]
        total: u32,
        /// Also search the split by simulation.
        #[arg(long)]
        empirical: bool,
        /// Trials per split for --empirical.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 10.0)]
        gamma_p_db: f64,
        #[arg(long, default_value_t = 10.0)]
        gamma_max_db: f64,
        #[arg(long, default_value_t = 4)]
        antennas: usize,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
    },
    /// KS checks of the sampled channel and quantization laws.
    Validate {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

fn engine(workers: Option<usize>) -> Result<Engine> {
    Ok(Engine::new(workers.unwrap_or_else(default_workers))?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { spec } => {
            let mut s = ExperimentSpec::from_file(&spec)?;
            if let Some(seed) = cli.seed {
                s.master_seed = seed;
            }
            let engine = engine(cli.workers)?;
            let out = run_experiment(&s, &engine, &cli.out_dir).with_context(|| format!("running {}", spec.display()))?;
            println!("manifest {}", out.manifest_sha256);
            for p in [Some(&out.results), out.overlay.as_ref(), out.extra.as_ref(), Some(&out.manifest)]
                .into_iter()
                .flatten()
            {
                println!("wrote {}", p.display());
            }
            let failed = out.rows.iter().filter(|r| r.result.is_err()).count();
            if failed > 0 {
                eprintln!("{failed} configuration(s) failed; see the error column");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::AllocateBits {
            total,
            empirical,
            trials,
            gamma_p_db,
            gamma_max_db,
            antennas,
            lambda,
        } => {
            let mut params = SystemParams::default()
                .with_antennas(antennas)
                .with_gamma_p_db(gamma_p_db)
                .with_gamma_max_db(gamma_max_db);
            params.lambda = lambda;
            params.validate()?;
            let engine = engine(cli.workers)?;
            let emp = empirical.then_some((&engine, trials, cli.seed.unwrap_or(0), CodebookSettings::default()));
            print!("{}", allocate(&params, total, emp)?.text());
        }
        Command::Validate { samples } => {
            let rows = validate_distributions(&SystemParams::default(), samples, cli.seed.unwrap_or(0))?;
            println!("{KS_CSV_HEADER}");
            for r in &rows {
                println!("{}", r.csv());
            }
            if rows.iter().any(|r| !r.pass()) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
