mod doc;
mod expr;
mod render;
mod report;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use hodge_inertia::oracles;

use render::Format;

/// Polygon and verdict reports for filtered (φ, N)-modules and their
/// strongly divisible lattices.
///
/// Exit status: 0 when every verdict holds, 1 when some verdict fails,
/// 2 on input or precision errors.
#[derive(Parser)]
#[command(name = "hodge-inertia", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one instance document and print its report.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Working p-adic precision, overriding ring.prec.
        #[arg(long)]
        prec: Option<u32>,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the family over a grid of primes, ramification indices and L values.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        prec: Option<u32>,
        /// ascii or json.
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render a JSON report.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized oracles.
    Oracle {
        #[arg(long, default_value_t = 20_240_607)]
        seed: u64,
        /// ascii or json.
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct OracleRow {
    name: String,
    cases: usize,
    failures: usize,
    first_failure: Option<String>,
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze {
            input,
            prec,
            format,
            out,
        } => {
            let doc = doc::parse_doc(&read(&input)?).with_context(|| format!("parsing {}", input.display()))?;
            let rep = report::analyze(&doc, prec)?;
            emit(&render::render(&rep, format)?, out.as_deref())?;
            Ok(rep.all_hold())
        }
        Command::Sweep {
            input,
            prec,
            format,
            out,
        } => {
            let doc = sweep::parse_sweep(&read(&input)?).with_context(|| format!("parsing {}", input.display()))?;
            let table = sweep::run_sweep(&doc, prec)?;
            let text = match format {
                Format::Ascii => sweep::ascii_table(&table),
                Format::Json => render::json(&table)?,
                Format::Svg => bail!("sweep output supports ascii and json only"),
            };
            emit(&text, out.as_deref())?;
            Ok(table.summary.failed == 0 && table.summary.errors == 0)
        }
        Command::Render { input, format, out } => {
            let rep = render::parse_report(&read(&input)?).with_context(|| format!("parsing {}", input.display()))?;
            emit(&render::render(&rep, format)?, out.as_deref())?;
            Ok(rep.all_hold())
        }
        Command::Oracle { seed, format, out } => {
            let outcomes = oracles::run_all(seed)?;
            let ok = outcomes.iter().all(|o| o.passed());
            let text = match format {
                Format::Ascii => outcomes.iter().map(|o| format!("{o}\n")).collect(),
                Format::Json => render::json(
                    &outcomes
                        .iter()
                        .map(|o| OracleRow {
                            name: o.name.clone(),
                            cases: o.cases,
                            failures: o.failures,
                            first_failure: o.first_failure.clone(),
                        })
                        .collect::<Vec<_>>(),
                )?,
                Format::Svg => bail!("oracle output supports ascii and json only"),
            };
            emit(&text, out.as_deref())?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
