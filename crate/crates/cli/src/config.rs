//! Command-line and config-file parsing.
//!
//! Precedence is flag > config file > built-in default. The config file is
//! a flat JSON object whose keys are the long flag names without the leading
//! dashes (`"basis-size": 48`); underscore spellings are accepted as well.

use std::fs;
use std::path::{Path, PathBuf};

use boxaffine_core::ModelSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const DEFAULT_B: f64 = 1.0;
pub const DEFAULT_HBAR: f64 = 1.0;
pub const DEFAULT_W: f64 = 1.0;
pub const DEFAULT_LEVELS: usize = 6;
pub const DEFAULT_BASIS_SIZE: usize = 32;
pub const DEFAULT_GRID_SIZE: usize = 20001;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_LEVELS: usize = 12;
pub const MAX_GRID_SIZE: usize = 4_000_000;
pub const TOL_RANGE: (f64, f64) = (1e-10, 1e-3);
pub const MAX_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    CqBox,
    AqBox,
    HalfHo,
    AntiBox,
}

impl ModelName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::CqBox => "cq-box",
            ModelName::AqBox => "aq-box",
            ModelName::HalfHo => "half-ho",
            ModelName::AntiBox => "anti-box",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RayleighRitz,
    Shooting,
    Both,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::RayleighRitz => "rayleigh-ritz",
            Method::Shooting => "shooting",
            Method::Both => "both",
        }
    }

    pub fn uses_rayleigh_ritz(&self) -> bool {
        matches!(self, Method::RayleighRitz | Method::Both)
    }

    pub fn uses_shooting(&self) -> bool {
        matches!(self, Method::Shooting | Method::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Toy,
    CqEigenfunction,
}

#[derive(Debug, Parser)]
#[command(name = "boxaffine", version, about = "Canonical and affine particle-in-a-box spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues by Rayleigh-Ritz, shooting, or both.
    #[command(allow_negative_numbers = true)]
    Spectrum(CommonArgs),
    /// Sample the potential on a grid as CSV.
    #[command(allow_negative_numbers = true)]
    Potential(PotentialArgs),
    /// Weak second derivative and discrete divergence rate of a test function.
    #[command(allow_negative_numbers = true)]
    CheckDerivatives(DerivativeArgs),
    /// Basis-size and grid-refinement studies.
    #[command(allow_negative_numbers = true)]
    Convergence(ConvergenceArgs),
    /// Run the built-in acceptance suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    /// Box half-width.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Anti-box coupling.
    #[arg(long = "W")]
    pub w: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub basis_size: Option<usize>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Shooting energy tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DerivativeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub target: Option<Target>,
    /// Level of the canonical eigenfunction.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Ascending basis sizes for the Rayleigh-Ritz sweep.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flat config file contents.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub model: Option<ModelName>,
    pub b: Option<f64>,
    pub hbar: Option<f64>,
    #[serde(rename = "W", alias = "w")]
    pub w: Option<f64>,
    pub levels: Option<usize>,
    #[serde(alias = "basis_size")]
    pub basis_size: Option<usize>,
    #[serde(alias = "grid_size")]
    pub grid_size: Option<usize>,
    pub tol: Option<f64>,
    pub method: Option<Method>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    #[serde(alias = "x_min")]
    pub x_min: Option<f64>,
    #[serde(alias = "x_max")]
    pub x_max: Option<f64>,
    pub samples: Option<usize>,
    pub target: Option<Target>,
    pub n: Option<u32>,
    pub sizes: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("--config: cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))
    }
}

/// Which subcommand a configuration is resolved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Potential,
    CheckDerivatives,
    Convergence,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Potential => "potential",
            CommandKind::CheckDerivatives => "check-derivatives",
            CommandKind::Convergence => "convergence",
        }
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model_name: ModelName,
    pub model: ModelSpec,
    pub b: f64,
    pub hbar: f64,
    pub w: f64,
    pub levels: usize,
    pub basis_size: usize,
    pub grid_size: usize,
    pub tol: f64,
    pub method: Method,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn positive(flag: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("--{flag} must be a finite number > 0, got {v}")))
    }
}

pub fn load_file(common: &CommonArgs) -> Result<FileConfig, Failure> {
    match &common.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

/// Merges flags over `file` over defaults and checks every invariant.
pub fn resolve(kind: CommandKind, args: &CommonArgs, file: &FileConfig) -> Result<RunConfig, Failure> {
    let model_name = args.model.or(file.model).unwrap_or(ModelName::CqBox);
    let b = positive("b", args.b.or(file.b).unwrap_or(DEFAULT_B))?;
    let hbar = positive("hbar", args.hbar.or(file.hbar).unwrap_or(DEFAULT_HBAR))?;
    let w = args.w.or(file.w).unwrap_or(DEFAULT_W);
    if !(w.is_finite() && w >= 0.0) {
        return Err(usage(format!("--W must be a finite number >= 0, got {w}")));
    }
    let levels = args.levels.or(file.levels).unwrap_or(DEFAULT_LEVELS);
    if !(1..=MAX_LEVELS).contains(&levels) {
        return Err(usage(format!("--levels must be in 1..={MAX_LEVELS}, got {levels}")));
    }
    let basis_size = args.basis_size.or(file.basis_size).unwrap_or(DEFAULT_BASIS_SIZE);
    if !(1..=boxaffine_core::rayleigh_ritz::MAX_BASIS_SIZE).contains(&basis_size) {
        return Err(usage(format!(
            "--basis-size must be in 1..={}, got {basis_size}",
            boxaffine_core::rayleigh_ritz::MAX_BASIS_SIZE
        )));
    }
    let grid_size = args.grid_size.or(file.grid_size).unwrap_or(DEFAULT_GRID_SIZE);
    if !(boxaffine_core::shooting::MIN_GRID_POINTS..=MAX_GRID_SIZE).contains(&grid_size) {
        return Err(usage(format!(
            "--grid-size must be in {}..={MAX_GRID_SIZE}, got {grid_size}",
            boxaffine_core::shooting::MIN_GRID_POINTS
        )));
    }
    let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
    if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&tol) {
        return Err(usage(format!(
            "--tol must be in [{:e}, {:e}], got {tol:e}",
            TOL_RANGE.0, TOL_RANGE.1
        )));
    }
    if model_name == ModelName::AntiBox && kind != CommandKind::Potential {
        return Err(usage(format!("--model anti-box supports only `potential`, not `{}`", kind.as_str())));
    }
    let default_method = match model_name {
        ModelName::HalfHo => Method::Shooting,
        _ => Method::Both,
    };
    let method = args.method.or(file.method).unwrap_or(default_method);
    if model_name == ModelName::HalfHo && method.uses_rayleigh_ritz() && kind != CommandKind::Potential {
        return Err(usage(format!(
            "--method {} does not support half-ho; use --method shooting",
            method.as_str()
        )));
    }
    if method.uses_rayleigh_ritz() && levels > basis_size && kind == CommandKind::Spectrum {
        return Err(usage(format!("--levels ({levels}) exceeds --basis-size ({basis_size})")));
    }
    let format = args.format.or(file.format).unwrap_or(match kind {
        CommandKind::Potential => Format::Csv,
        _ => Format::Json,
    });
    let model = match model_name {
        ModelName::CqBox => ModelSpec::cq_box(b, hbar),
        ModelName::AqBox => ModelSpec::aq_box(b, hbar),
        ModelName::HalfHo => ModelSpec::half_harmonic(hbar),
        ModelName::AntiBox => ModelSpec::anti_box(b, hbar, w),
    }
    .map_err(|e| usage(e.to_string()))?;
    Ok(RunConfig {
        model_name,
        model,
        b,
        hbar,
        w,
        levels,
        basis_size,
        grid_size,
        tol,
        method,
        format,
        out: args.out.clone().or_else(|| file.out.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("boxaffine").chain(argv.iter().copied())).unwrap()
    }

    fn spectrum_args(argv: &[&str]) -> CommonArgs {
        match parse(argv).command {
            Command::Spectrum(a) => a,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn happy_path() {
        let a = spectrum_args(&["spectrum", "--model", "aq-box", "--b", "1", "--hbar", "1", "--method", "both", "--levels", "6"]);
        let cfg = resolve(CommandKind::Spectrum, &a, &FileConfig::default()).unwrap();
        assert_eq!(cfg.model_name, ModelName::AqBox);
        assert_eq!(cfg.method, Method::Both);
        assert_eq!(cfg.levels, 6);
        assert_eq!(cfg.basis_size, DEFAULT_BASIS_SIZE);
        assert_eq!(cfg.grid_size, DEFAULT_GRID_SIZE);
        assert_eq!(cfg.tol, DEFAULT_TOL);
    }

    #[test]
    fn negative_b_is_a_usage_error() {
        let a = spectrum_args(&["spectrum", "--b", "-1"]);
        let err = resolve(CommandKind::Spectrum, &a, &FileConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--b must be a finite number > 0"), "{err}");
    }

    #[test]
    fn anti_box_only_for_potential() {
        let a = spectrum_args(&["spectrum", "--model", "anti-box"]);
        let err = resolve(CommandKind::Spectrum, &a, &FileConfig::default()).unwrap_err();
        assert!(err.to_string().contains("anti-box supports only `potential`"));
        assert!(resolve(CommandKind::Potential, &a, &FileConfig::default()).is_ok());
    }

    #[test]
    fn unknown_model_lists_choices() {
        let err = Cli::try_parse_from(["boxaffine", "spectrum", "--model", "box"]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cq-box") && msg.contains("anti-box"), "{msg}");
    }

    #[test]
    fn half_ho_method_defaults_and_rules() {
        let a = spectrum_args(&["spectrum", "--model", "half-ho"]);
        let cfg = resolve(CommandKind::Spectrum, &a, &FileConfig::default()).unwrap();
        assert_eq!(cfg.method, Method::Shooting);
        let a = spectrum_args(&["spectrum", "--model", "half-ho", "--method", "both"]);
        assert_eq!(resolve(CommandKind::Spectrum, &a, &FileConfig::default()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn range_checks() {
        for argv in [
            vec!["spectrum", "--levels", "13"],
            vec!["spectrum", "--levels", "0"],
            vec!["spectrum", "--basis-size", "65"],
            vec!["spectrum", "--grid-size", "999"],
            vec!["spectrum", "--tol", "1e-12"],
            vec!["spectrum", "--hbar", "0"],
            vec!["spectrum", "--levels", "8", "--basis-size", "4"],
        ] {
            let a = spectrum_args(&argv);
            assert!(resolve(CommandKind::Spectrum, &a, &FileConfig::default()).is_err(), "{argv:?}");
        }
    }

    #[test]
    fn flags_override_config_file() {
        let file: FileConfig =
            serde_json::from_str(r#"{"model": "aq-box", "b": 2.0, "basis-size": 40, "grid_size": 30001, "W": 0.5}"#).unwrap();
        let a = spectrum_args(&["spectrum", "--b", "3"]);
        let cfg = resolve(CommandKind::Spectrum, &a, &file).unwrap();
        assert_eq!(cfg.model_name, ModelName::AqBox);
        assert_eq!(cfg.b, 3.0);
        assert_eq!(cfg.basis_size, 40);
        assert_eq!(cfg.grid_size, 30001);
        assert_eq!(cfg.w, 0.5);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"basis": 3}"#).is_err());
        assert!(serde_json::from_str::<FileConfig>(r#"{"model": "box"}"#).is_err());
    }
}
