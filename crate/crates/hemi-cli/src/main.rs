//! `hemi` command line: JSON in, JSON or CSV out.
//!
//! Exit status 0 when every check passes, 1 when one fails, 2 on bad input.

mod commands;
mod output;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hemi::Error;

#[derive(Parser, Debug)]
#[command(name = "hemi", version, about = "Entropy structures, hemi-metrics and their checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Input file, `-` for stdin, or inline JSON starting with `{`.
    #[arg(long, global = true)]
    pub input: Option<String>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = hemi::DEFAULT_SEED)]
    pub seed: u64,

    /// Relative tolerance for equality checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Significance level of distribution tests.
    #[arg(long, global = true, default_value_t = hemi::models::DEFAULT_LEVEL)]
    pub level: f64,

    /// Allow a coefficient a outside Ξ in `compare` and `fit`.
    #[arg(long, global = true)]
    pub exploration: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Axiom checks for an instance or a finite table.
    Check,
    /// m_G, M_G, Ξ, the sign and a_σ.
    Profile,
    /// ρ_a, ⟨·,·⟩_a and correlation class for element pairs.
    Compare,
    /// Entropy from a kernel, or the obstruction to one.
    Reconstruct,
    /// Embed a scoring rule and verify the embedding.
    Embed,
    /// Merge-law tests and entropy calibration for scale families.
    Simulate,
    /// Minimize ρ_a over a parametric family.
    Fit,
    /// Profiles and self-checks of the whole catalog.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

fn read_input(spec: Option<&str>) -> Result<Option<String>, Error> {
    match spec {
        None => Ok(None),
        Some(s) if s.trim_start().starts_with('{') => Ok(Some(s.to_string())),
        Some("-") => {
            let mut buf = String::new();
            io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Schema(format!("stdin: {e}")))?;
            Ok(Some(buf))
        }
        Some(path) => fs::read_to_string(path)
            .map(Some)
            .map_err(|e| Error::Schema(format!("{path}: {e}"))),
    }
}

fn input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Schema(_) | Error::Config(_) | Error::Domain(_) | Error::OutOfXi { .. } | Error::NoRelations
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = read_input(cli.input.as_deref()).and_then(|text| commands::run(&cli, text.as_deref()));
    match run {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &out.text),
                None => io::stdout().write_all(out.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if input_error(&e) { 2 } else { 1 })
        }
    }
}
