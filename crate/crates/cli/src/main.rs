use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oy_lattice_cli::{output, registry, run, CliError, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "oy-lattice", version, about = "Lattice KPZ fluctuation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write CSV, JSON summary and manifest.
    Run {
        experiment: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        replicas: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the experiments and the claim each one checks.
    List,
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::List => {
            for e in &registry::REGISTRY {
                println!("{:<24} {}", e.name, e.claim);
            }
            Ok(true)
        }
        Command::Run {
            experiment,
            config,
            n,
            dt,
            replicas,
            seed,
            out,
            threads,
        } => {
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .map_err(|e| CliError::Config(vec![format!("threads: {e}")]))?;
            }
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => (registry::lookup(&experiment)?.defaults)(),
            };
            if cfg.experiment != experiment {
                return Err(CliError::Config(vec![format!(
                    "config is for {:?}, not {experiment:?}",
                    cfg.experiment
                )]));
            }
            cfg.apply(&Overrides { n, dt, replicas, seed, out });
            let outcome = run(&cfg)?;
            let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("results"));
            output::write_all(&dir, &cfg, &outcome.report, &outcome.rows)?;
            for c in &outcome.report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {:.6e} ({})", c.name, c.measured, c.threshold);
            }
            Ok(outcome.report.passed())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
