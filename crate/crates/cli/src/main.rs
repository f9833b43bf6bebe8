//! Scenario-driven front end: parse a scenario file, run the spectrum /
//! evolution / equivalence pipeline, and emit reports and plot data.
//!
//! Exit codes: 0 success, 2 parse, 3 validation, 4 solver, 5 I/O.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod error;
mod report;
mod scenario;
mod selftest;

use error::CliResult;
use rotequiv::equivalence::{check_criterion, CriterionInput};

#[derive(Parser)]
#[command(
    name = "rotequiv",
    version,
    about = "Rotating-potential spectra, active/passive evolution, and equivalence verdicts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the analytic spectrum for a scenario.
    Spectrum(RunArgs),
    /// Evolve the initial state under both prescriptions.
    Evolve(RunArgs),
    /// Full pipeline: spectrum, both evolutions, verdicts, oracle checks.
    Compare(RunArgs),
    /// Spectral predictor only: stripped-energy degeneracy verdict.
    Criterion(RunArgs),
    /// Run the built-in oracle cross-check battery (needs no scenario).
    Selftest {
        /// Suppress the per-check report lines.
        #[arg(long)]
        quiet: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output prefix; overrides the scenario's [output] prefix. Files land
    /// at <prefix>.report.json, <prefix>.spectrum.csv, <prefix>.evolution.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Equivalence tolerance; overrides the scenario's value.
    #[arg(long)]
    tol: Option<f64>,
    /// Suppress stdout summaries (files are still written).
    #[arg(long)]
    quiet: bool,
}

impl RunArgs {
    fn prefix(&self, built: &scenario::Built) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| built.scenario.output.prefix.as_ref().map(PathBuf::from))
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Spectrum(args) => spectrum(args),
        Command::Evolve(args) => evolve(args),
        Command::Compare(args) => compare(args),
        Command::Criterion(args) => criterion(args),
        Command::Selftest { quiet } => selftest::run(quiet),
    }
}

fn spectrum(args: RunArgs) -> CliResult<()> {
    let built = report::load(&args.scenario)?;
    if !args.quiet {
        report::print_spectrum(&built);
    }
    if let Some(prefix) = args.prefix(&built) {
        let mut os = prefix.into_os_string();
        os.push(".spectrum.csv");
        let path = PathBuf::from(os);
        report::write_spectrum_csv(&path, &built)?;
        if !args.quiet {
            println!("wrote: {}", path.display());
        }
    }
    Ok(())
}

fn evolve(args: RunArgs) -> CliResult<()> {
    let built = report::load(&args.scenario)?;
    let (max_abs, max_td) = report::evolution_extremes(&built)?;
    if !args.quiet {
        println!(
            "evolved {} labels over {} times: max |active - passive| element {:.3e}, \
             max trace distance {:.3e}",
            built.labels.len(),
            built.times.len(),
            max_abs,
            max_td
        );
    }
    if let Some(prefix) = args.prefix(&built) {
        let mut os = prefix.into_os_string();
        os.push(".evolution.csv");
        let path = PathBuf::from(os);
        report::write_evolution_csv(&path, &built)?;
        if !args.quiet {
            println!("wrote: {}", path.display());
        }
    }
    Ok(())
}

fn compare(args: RunArgs) -> CliResult<()> {
    let (built, bundle) = report::run_scenario(&args.scenario, args.tol)?;
    let written = match args.prefix(&built) {
        Some(prefix) => report::emit_outputs(&built, &bundle, &prefix)?,
        None => Vec::new(),
    };
    if !args.quiet {
        report::print_summary(&bundle, &written);
    }
    Ok(())
}

fn criterion(args: RunArgs) -> CliResult<()> {
    let built = report::load(&args.scenario)?;
    let tol = built.equivalence_tol(args.tol);
    let input = CriterionInput::from_spectrum(built.spectrum.clone())?;
    let (verdict, spread) = check_criterion(&input, tol)?;
    if !args.quiet {
        println!(
            "criterion: {verdict}  (stripped-energy spread {spread:.3e}, tol {tol:.1e}, \
             effective rate {:.6})",
            input.omega_eff
        );
    }
    Ok(())
}
