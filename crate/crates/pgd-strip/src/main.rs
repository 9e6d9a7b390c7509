//! Experiment harness binary.
//!
//! `pgd-strip <study> [--config FILE] [overrides...]` runs one of the named
//! studies and writes a CSV of convergence records (or, for `dump-modes`,
//! the block mode shapes) to `--out` or stdout.
//!
//! Exit codes: 0 on success, 2 if any run failed to converge, 1 on
//! configuration or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use pgd_strip::cli::{
    csv_string, parse_config_for_study, run_experiment, ExperimentConfig, Study,
};
use pgd_strip::metrics::RunStatus;
use pgd_strip::{CaseId, Integration};

fn parse_study(s: &str) -> Result<Study, String> {
    s.parse()
}

fn parse_case(s: &str) -> Result<CaseId, String> {
    s.parse::<CaseId>().map_err(|e| e.to_string())
}

fn parse_integration(s: &str) -> Result<Integration, String> {
    match s.to_ascii_lowercase().as_str() {
        "full" => Ok(Integration::Full),
        "selective" => Ok(Integration::Selective),
        other => Err(format!(
            "`{other}` is not an integration rule (full|selective)"
        )),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "pgd-strip",
    about = "Separated-representation bending-strip experiments",
    after_help = "Exit codes: 0 success, 1 configuration or I/O error, \
                  2 at least one run did not converge."
)]
struct Cli {
    /// Study to run: locking, slenderness-sweep, compare-reference,
    /// dump-modes or limit-ode
    #[arg(value_parser = parse_study)]
    study: Study,

    /// Configuration file (`key = value` lines); study defaults if omitted
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output path (CSV, or the mode-shape dump for dump-modes);
    /// stdout if omitted
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override the slenderness grid
    #[arg(long, value_delimiter = ',', value_name = "S,..")]
    slenderness: Option<Vec<f64>>,

    /// Override the case list (SS-SP, SS-UP, CC-SP, CC-UP)
    #[arg(
        long = "case",
        value_delimiter = ',',
        value_parser = parse_case,
        value_name = "CASE,.."
    )]
    cases: Option<Vec<CaseId>>,

    /// Override the integration rule
    #[arg(long, value_parser = parse_integration, value_name = "full|selective")]
    integration: Option<Integration>,

    /// Override the greedy mode budget of compare-reference
    #[arg(long, value_name = "N")]
    modes: Option<usize>,

    /// Mesh the axial direction uniformly, without end refinement
    #[arg(long)]
    no_boundary_layer: bool,

    /// Solve grid points in parallel
    #[arg(long)]
    parallel: bool,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config_for_study(&text, cli.study)
                .map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ExperimentConfig::for_study(cli.study),
    };
    if let Some(s) = &cli.slenderness {
        cfg.slenderness = s.clone();
    }
    if let Some(c) = &cli.cases {
        cfg.cases = c.clone();
    }
    if let Some(i) = cli.integration {
        cfg.integration = i;
    }
    if let Some(m) = cli.modes {
        cfg.modes = m;
    }
    if cli.no_boundary_layer {
        cfg.boundary_layer = false;
    }
    if cli.parallel {
        cfg.parallel = true;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let cfg = build_config(&cli)?;
    let output = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let text = match output.mode_dump {
        Some(dump) => dump,
        None => csv_string(&output.records).map_err(|e| e.to_string())?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    let all_converged = output
        .records
        .iter()
        .all(|r| r.status == RunStatus::Converged);
    Ok(if all_converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // Usage errors share the configuration-error exit code.
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("pgd-strip: {msg}");
            ExitCode::from(1)
        }
    }
}
