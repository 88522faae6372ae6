use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use diracsym::cli::{self, Mode, RunConfig, EXIT_CONFIG};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    VerifyTheorem,
    Sweep,
    ShowIntermediates,
    FtCheck,
    GaugeCheck,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::VerifyTheorem => Mode::VerifyTheorem,
            ModeArg::Sweep => Mode::Sweep,
            ModeArg::ShowIntermediates => Mode::ShowIntermediates,
            ModeArg::FtCheck => Mode::FtCheck,
            ModeArg::GaugeCheck => Mode::GaugeCheck,
        }
    }
}

/// Exact symbol calculus for the spectral projections of the massless Dirac
/// operator: theorem verification, generator sweeps, intermediate transcripts,
/// kernel quadrature checks and gauge checks.
///
/// Exit codes: 0 all checks pass, 1 theorem mismatch, 2 self-check failure,
/// 3 quadrature failure, 4 configuration error.
#[derive(Parser, Debug)]
#[command(name = "diracsym", version)]
struct Args {
    /// Mode to run; may instead be given as `mode = ...` in the config file.
    #[arg(value_enum)]
    mode: Option<ModeArg>,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON report path; the transcript is written next to it with extension `txt`.
    /// Without it the report goes to stdout (the transcript, for show-intermediates).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let mode = args.mode.map(Mode::from);
    let cfg = match (&args.config, mode) {
        (Some(path), _) => cli::load_config(path, mode),
        (None, Some(m)) => Ok(RunConfig::new(m)),
        (None, None) => {
            eprintln!("error: give a mode or --config");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let outcome = cli::run(&cfg);
    match args.out.as_ref().or(cfg.output.as_ref()) {
        Some(path) => {
            if let Err(e) = cli::write_outputs(&outcome, path) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG as u8);
            }
            eprintln!("{}", outcome.report["summary"]["line"].as_str().unwrap_or(""));
        }
        None if cfg.mode == Mode::ShowIntermediates => print!("{}", outcome.transcript),
        None => print!("{}", outcome.report_text()),
    }
    ExitCode::from(outcome.exit_code as u8)
}
