//! `schurlab`: runs one spectral command from a JSON config and writes
//! `spectrum.csv`, `pseudospectrum.csv` (grids only) and `report.json`.
//!
//! Exit codes: 0 success or PASS, 2 verdict FAIL, 1 error.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::Parser;

use config::load_config;
use schurlab::verify::Verdict;

#[derive(Parser, Debug)]
#[command(
    name = "schurlab",
    version,
    about = "Block operator spectra through Schur complements"
)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override `key=value`, repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("tolerance `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn execute(args: &Args) -> Result<Option<Verdict>> {
    let mut cfg = load_config(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    for (k, v) in &args.tol {
        cfg.tolerances.insert(k.clone(), *v);
    }
    config::Tolerances::resolve(&cfg).map_err(|e| anyhow!("--tol: {e}"))?;

    let report = run::run(&cfg)?;
    output::write_all(&cfg.output_dir, &report)?;
    if !args.quiet {
        let verdict = report
            .verdict
            .map(|v| format!(" {v:?}").to_uppercase())
            .unwrap_or_default();
        println!("{} {}:{verdict}", report.command, report.model_tag);
        for (k, v) in &report.summary {
            println!("  {k} = {v}");
        }
        println!("  wrote {}", cfg.output_dir.display());
    }
    Ok(report.verdict)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(Some(Verdict::Fail)) => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
