//! Command-line front end for the boxaffine solvers.
//!
//! Exit codes: 0 success, 2 usage error, 3 method disagreement or failed
//! validation, 4 solver failure.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::Path;

use clap::Parser;

use config::{load_file, resolve, Cli, Command, CommandKind, Format, Target};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Disagreement(String),
    Solver(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Disagreement(_) => EXIT_DISAGREEMENT,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Disagreement(m) => write!(f, "disagreement: {m}"),
            Failure::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("--out {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(args) => {
            let cfg = resolve(CommandKind::Spectrum, &args, &load_file(&args)?)?;
            let outcome = commands::spectrum(&cfg)?;
            let text = match cfg.format {
                Format::Json => outcome.report.to_json(),
                Format::Csv => commands::spectrum_csv(&outcome.report),
            };
            emit(&text, cfg.out.as_deref())?;
            match outcome.agreement_failed {
                Some(delta) => Err(Failure::Disagreement(format!(
                    "max relative delta between methods {delta:.3e} exceeds {:e}",
                    commands::AGREEMENT_THRESHOLD
                ))),
                None => Ok(()),
            }
        }
        Command::Potential(args) => {
            let file = load_file(&args.common)?;
            let cfg = resolve(CommandKind::Potential, &args.common, &file)?;
            let csv = commands::potential(
                &cfg,
                args.x_min.or(file.x_min),
                args.x_max.or(file.x_max),
                args.samples.or(file.samples),
            )?;
            emit(&csv, cfg.out.as_deref())
        }
        Command::CheckDerivatives(args) => {
            let file = load_file(&args.common)?;
            let cfg = resolve(CommandKind::CheckDerivatives, &args.common, &file)?;
            let target = args.target.or(file.target).unwrap_or(Target::Toy);
            let n = args.n.or(file.n).unwrap_or(1);
            let report = commands::check_derivatives(&cfg, target, n)?;
            let text = match cfg.format {
                Format::Json => report.to_json(),
                Format::Csv => commands::derivatives_csv(&report),
            };
            emit(&text, cfg.out.as_deref())
        }
        Command::Convergence(args) => {
            let file = load_file(&args.common)?;
            let cfg = resolve(CommandKind::Convergence, &args.common, &file)?;
            let report = commands::convergence(&cfg, args.sizes.or(file.sizes))?;
            let text = match cfg.format {
                Format::Json => report.to_json(),
                Format::Csv => commands::convergence_csv(&report),
            };
            emit(&text, cfg.out.as_deref())
        }
        Command::Validate(args) => {
            let outcome = commands::validate();
            match args.format {
                Some(Format::Json) => {
                    for line in &outcome.lines {
                        eprintln!("{line}");
                    }
                    emit(&outcome.report.to_json(), args.out.as_deref())?;
                }
                Some(Format::Csv) => return Err(Failure::Usage("validate supports --format json only".into())),
                None => emit(&(outcome.lines.join("\n") + "\n"), args.out.as_deref())?,
            }
            if outcome.all_passed {
                Ok(())
            } else {
                Err(Failure::Disagreement("acceptance suite has failing criteria".into()))
            }
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
