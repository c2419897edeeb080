#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;

use std::env;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use growthlab::checks::DEFAULT_BASE_TOL;
use growthlab::report::csv_string;
use growthlab::{CheckOptions, Report};

use args::{Cli, Format};

const TOL_ENV: &str = "GROWTHLAB_TOL";

/// `--tol`, then `GROWTHLAB_TOL`, then the built-in default.
fn base_tolerance(flag: Option<f64>) -> Result<f64, String> {
    let tol = match (flag, env::var(TOL_ENV)) {
        (Some(t), _) => t,
        (None, Ok(text)) => text
            .trim()
            .parse()
            .map_err(|_| format!("{TOL_ENV}: `{text}` is not a number"))?,
        (None, Err(_)) => DEFAULT_BASE_TOL,
    };
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(format!("tol: {tol} must be finite and non-negative"));
    }
    Ok(tol)
}

fn render(report: &Report, format: Format) -> Result<String, String> {
    match format {
        Format::Json => report.to_json().map(|s| s + "\n").map_err(|e| e.to_string()),
        Format::Csv if !report.samples.is_empty() => csv_string(&report.samples).map_err(|e| e.to_string()),
        Format::Csv if !report.checks.is_empty() => csv_string(&report.checks).map_err(|e| e.to_string()),
        Format::Csv => Err(format!(
            "format: `{}` has no samples or checks to write as CSV; use --format json",
            report.command
        )),
    }
}

fn execute(cli: &Cli) -> Result<Report, String> {
    let opts = CheckOptions {
        base_tol: base_tolerance(cli.tol)?,
        ..CheckOptions::default()
    };
    let report = commands::run(&cli.command, &opts)?;
    let text = render(&report, cli.format)?;
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("output: cannot write {}: {e}", path.display()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string())?,
    }
    Ok(report)
}

fn main() -> ExitCode {
    let argv = match config::assemble(env::args().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: config: {}", e.0);
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(&cli) {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(report) => {
            for check in report.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "failed: {} (margin {}, tolerance {})",
                    check.name, check.margin, check.tolerance
                );
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
