use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cdelab::config::{Construction, ExperimentConfig};
use cdelab::runner::{self, Outcome};

#[derive(Parser)]
#[command(name = "cdelab", version, about = "Almost-chain constructions and extension-operator norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a generator family, verify it and write chain.json
    Build(Flags),
    /// Check the witness measures exactly against every generator
    VerifyWitness(Flags),
    /// Lower bound on the extension norm over depths
    Eta(Flags),
    /// Norm reduction of a measure family
    Reduce {
        #[command(flatten)]
        flags: Flags,
        /// Measure family JSON; generated from witnesses plus noise if omitted
        #[arg(long)]
        measures: Option<PathBuf>,
    },
    /// Chain liftings and falsifiers for budgets 1..=k-max
    Lift(Flags),
    /// Alternating witnesses, counting claims and eta over depths
    Sweep(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON config; flags given explicitly override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// dyadic41, factorial53 or a chain JSON file
    #[arg(long)]
    construction: Option<String>,
    #[arg(long)]
    generator_count: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_exceptional: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Flags {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        if let Some(c) = &self.construction {
            cfg.construction = c.parse::<Construction>()?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f.clone() { cfg.$f = v; })* };
        }
        set!(generator_count, depth, horizon, epsilon, delta, k_max, p_max, seed, max_exceptional, out_dir);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let outcome = match cli.command {
        Command::Build(f) => runner::cmd_build(&f.resolve()?)?,
        Command::VerifyWitness(f) => runner::cmd_verify_witness(&f.resolve()?)?,
        Command::Eta(f) => runner::cmd_eta(&f.resolve()?)?,
        Command::Reduce { flags, measures } => runner::cmd_reduce(&flags.resolve()?, measures.as_deref())?,
        Command::Lift(f) => runner::cmd_lift(&f.resolve()?)?,
        Command::Sweep(f) => runner::cmd_sweep(&f.resolve()?)?,
    };
    Ok(outcome)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            println!("{}", outcome.verdict.label());
            ExitCode::from(outcome.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
