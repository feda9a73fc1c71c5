use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod error;
mod output;
mod run;
mod scenarios;

use config::{Flags, Kind};
use error::CliError;

/// Solver and verification scenarios for the time-space fractional
/// Schrödinger equation.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
/// configuration or runtime error. FRACDISP_THREADS caps the worker threads.
#[derive(Parser)]
#[command(name = "fracdisp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_{α,b}(z) along every route.
    Mlf(Flags),
    /// Scan the oscillatory kernel K_t.
    Kernel(Flags),
    /// Apply a solution operator to a datum.
    Propagate(Flags),
    /// Solve the mild equation by Picard iteration.
    Solve(Flags),
    /// Norms of a datum and of its linear evolution.
    Norms(Flags),
    /// Run a pass/fail verification scenario.
    Verify {
        #[arg(value_enum)]
        check: VerifyCheck,
        #[command(flatten)]
        flags: Flags,
    },
    /// List scenarios, optionally filtered by module or scenario id.
    List { filter: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyCheck {
    Dispersive,
    DerivativeLoss,
    MlfDecay,
    Kernel,
    Smoothing,
    SmoothingBound,
    Picard,
    SelfSimilarity,
    BetaLt2,
    Asymptotic,
}

impl From<VerifyCheck> for Kind {
    fn from(c: VerifyCheck) -> Self {
        match c {
            VerifyCheck::Dispersive => Kind::VerifyDispersive,
            VerifyCheck::DerivativeLoss => Kind::VerifyDerivativeLoss,
            VerifyCheck::MlfDecay => Kind::VerifyMlfDecay,
            VerifyCheck::Kernel => Kind::VerifyKernel,
            VerifyCheck::Smoothing => Kind::VerifySmoothing,
            VerifyCheck::SmoothingBound => Kind::VerifySmoothingBound,
            VerifyCheck::Picard => Kind::VerifyPicard,
            VerifyCheck::SelfSimilarity => Kind::VerifySelfSimilarity,
            VerifyCheck::BetaLt2 => Kind::VerifyBetaLt2,
            VerifyCheck::Asymptotic => Kind::VerifyAsymptotic,
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FRACDISP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("FRACDISP_THREADS = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(command: Command) -> Result<bool, CliError> {
    let (kind, flags) = match command {
        Command::List { filter } => {
            print!("{}", scenarios::table(&scenarios::filtered(filter.as_deref())));
            return Ok(true);
        }
        Command::Mlf(f) => (Kind::MlfEval, f),
        Command::Kernel(f) => (Kind::Kernel, f),
        Command::Propagate(f) => (Kind::Propagate, f),
        Command::Solve(f) => (Kind::Solve, f),
        Command::Norms(f) => (Kind::Norms, f),
        Command::Verify { check, flags } => (check.into(), flags),
    };
    let cfg = flags.into_config(kind)?;
    init_threads()?;
    let outcome = run::run(&cfg)?;
    output::write_outputs(&cfg, &outcome)?;
    println!(
        "{}: {} - {} (outputs in {})",
        kind,
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.headline,
        cfg.output.display()
    );
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fracdisp: {e}");
            ExitCode::from(2)
        }
    }
}
