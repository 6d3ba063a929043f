use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conebesov::experiments::{
    run_advise, run_analyze, run_cardinality_study, run_nterm, run_pencil, run_report, run_sample,
    run_verify_embedding, write_artifacts, ExperimentConfig, Outcome,
};
use conebesov::fieldio::read_field;
use conebesov::wavelet::Grid;

#[derive(Parser)]
#[command(name = "conebesov", version, about = "Regularity experiments on polyhedral cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WithField {
    #[command(flatten)]
    common: Common,
    /// Previously sampled field file; sampled from the config if absent.
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Edge and vertex pencil eigenvalues.
    Pencil(Common),
    /// Check regularity hypotheses and report admissible Besov smoothness.
    Advise(Common),
    /// Sample the configured function into a field file.
    Sample(Common),
    /// Wavelet coefficient summary and distance bins.
    Analyze(WithField),
    /// Best N-term error curve and fitted slope.
    Nterm(WithField),
    /// Dyadic bin cardinality study.
    Cardinality(Common),
    /// Compare measured adaptive and uniform rates with the prediction.
    Verify(Common),
    /// Pencil, advisor and optional verification with a manifest.
    Report(Common),
}

fn load(path: &Path) -> conebesov::Result<(ExperimentConfig, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| conebesov::Error::Config(format!("config is not UTF-8: {e}")))?;
    Ok((ExperimentConfig::from_json(&text)?, bytes))
}

fn field(cfg: &ExperimentConfig, path: Option<&Path>) -> conebesov::Result<Grid> {
    match path {
        Some(p) => read_field(std::io::BufReader::new(std::fs::File::open(p)?)),
        None => conebesov::experiments::sample_grid(cfg),
    }
}

fn finish(out: &Path, outcome: Outcome) -> conebesov::Result<Option<bool>> {
    write_artifacts(out, &outcome.artifacts)?;
    print!("{}", outcome.summary);
    if !outcome.summary.ends_with('\n') {
        println!();
    }
    Ok(outcome.verdict)
}

fn run(cli: Cli) -> conebesov::Result<Option<bool>> {
    match cli.command {
        Command::Pencil(c) => {
            let (cfg, _) = load(&c.config)?;
            finish(&c.out, run_pencil(&cfg)?.1)
        }
        Command::Advise(c) => {
            let (cfg, _) = load(&c.config)?;
            finish(&c.out, run_advise(&cfg)?.1)
        }
        Command::Sample(c) => {
            let (cfg, _) = load(&c.config)?;
            finish(&c.out, run_sample(&cfg)?.1)
        }
        Command::Analyze(c) => {
            let (cfg, _) = load(&c.common.config)?;
            let g = field(&cfg, c.field.as_deref())?;
            finish(&c.common.out, run_analyze(&cfg, &g)?)
        }
        Command::Nterm(c) => {
            let (cfg, _) = load(&c.common.config)?;
            let g = field(&cfg, c.field.as_deref())?;
            finish(&c.common.out, run_nterm(&cfg, &g)?)
        }
        Command::Cardinality(c) => {
            let (cfg, _) = load(&c.config)?;
            finish(&c.out, run_cardinality_study(&cfg)?.1)
        }
        Command::Verify(c) => {
            let (cfg, _) = load(&c.config)?;
            finish(&c.out, run_verify_embedding(&cfg)?.1)
        }
        Command::Report(c) => {
            let (cfg, bytes) = load(&c.config)?;
            let outcome = run_report(&cfg, &bytes, &c.out)?;
            print!("{}", outcome.summary);
            Ok(outcome.verdict)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Some(false)) => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
