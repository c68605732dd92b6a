use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use netlpi::config::ExperimentConfig;
use netlpi::harness::{cmd_diagnose, cmd_plot, cmd_solve_exact, cmd_sweep, cmd_train, Overrides};

/// Output root for runs without `--out`; `runs` when unset.
const OUT_ENV: &str = "NETLPI_OUT";

#[derive(Parser)]
#[command(name = "netlpi", version, about = "Localized policy iteration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run LPI for every sweep point and seed; write per-run and aggregate CSVs.
    Train(Common),
    /// Solve the instance exactly and write the kappa-gap table.
    SolveExact(Common),
    /// Write interaction matrices, decay certificates and truncation errors.
    Diagnose(Common),
    /// Render aggregate CSVs into one SVG chart.
    Plot {
        /// Aggregate CSV files written by train or sweep.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "returns.svg")]
        out: PathBuf,
    },
    /// Train plus a summary CSV of final values and a chart of all points.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory. Defaults to $NETLPI_OUT (or `runs`) joined with the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run a single seed instead of the configured seed list.
    #[arg(long)]
    seed_override: Option<u64>,
    /// Cap on exact state and action enumeration.
    #[arg(long)]
    cap_override: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = ExperimentConfig::load(&self.config).with_context(|| format!("loading {}", self.config.display()))?;
        Overrides {
            seed: self.seed_override,
            cap: self.cap_override,
        }
        .apply(&mut cfg);
        let root = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"));
        let out = match (&self.out, &cfg.output) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => root.join(o),
            (None, None) => root,
        };
        Ok((cfg, out))
    }
}

fn report(out: &Path) {
    eprintln!("wrote {}", out.display());
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train(c) => {
            let (cfg, out) = c.load()?;
            for s in cmd_train(&cfg, &c.config, &out)? {
                let last = s.last();
                println!("{} final median {} (q25 {}, q75 {})", s.label, last.median, last.q25, last.q75);
            }
            report(&out);
        }
        Command::Sweep(c) => {
            let (cfg, out) = c.load()?;
            for s in cmd_sweep(&cfg, &c.config, &out)? {
                let last = s.last();
                println!("{} final median {} (q25 {}, q75 {})", s.label, last.median, last.q25, last.q75);
            }
            report(&out);
        }
        Command::SolveExact(c) => {
            let (cfg, out) = c.load()?;
            let s = cmd_solve_exact(&cfg, &c.config, &out)?;
            println!("objective {} certified {}", s.objective, s.certified);
            for g in &s.gaps {
                println!("kappa {} gap {}", g.kappa, g.gap);
            }
            report(&out);
        }
        Command::Diagnose(c) => {
            let (cfg, out) = c.load()?;
            cmd_diagnose(&cfg, &c.config, &out)?;
            report(&out);
        }
        Command::Plot { inputs, out } => {
            cmd_plot(&inputs, &out)?;
            report(&out);
        }
    }
    Ok(())
}
