//! Run configuration: command-line flags, `SOBSPEC_*` environment variables
//! and an optional TOML file, in that order of precedence.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;
use serde::{Deserialize, Serialize};
use sobspec_core::real::{self, DEFAULT_PRECISION, MIN_PRECISION};
use sobspec_core::spectral::{CustomRecurrence, Support};
use sobspec_core::{MeasureSpec, SobolevSpec};

use crate::error::CliError;

pub const DEFAULT_SIZE: usize = 20;
pub const DEFAULT_GUARD: usize = sobspec_core::pipeline::DEFAULT_GUARD;
pub const DEFAULT_TOLERANCE: &str = "1e-30";
pub const DEFAULT_OUT: &str = "sobspec-out";

#[derive(Debug, Parser)]
#[command(name = "sobspec", version, about = "Sobolev-type orthonormal polynomials and their recurrence matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Write every matrix and the scalar ledgers to the output directory.
    Generate,
    /// Check the factorization identities and write report.json.
    Verify,
    /// Compare the Laguerre alpha = 0, c = -1, M = N = 1 reference entries.
    ReproducePaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Laguerre,
    /// Recurrence coefficients read from `--recurrence`.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    #[arg(long, global = true, env = "SOBSPEC_MEASURE")]
    pub measure: Option<MeasureKind>,
    /// Laguerre parameter, alpha > -1.
    #[arg(long, global = true, env = "SOBSPEC_ALPHA", allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Point outside the interior of the support.
    #[arg(long, global = true, env = "SOBSPEC_C", allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Mass on f(c) g(c).
    #[arg(long = "M", global = true, env = "SOBSPEC_M", allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Mass on f'(c) g'(c).
    #[arg(long = "N", global = true, env = "SOBSPEC_N", allow_hyphen_values = true)]
    pub n: Option<String>,
    #[arg(long, global = true, env = "SOBSPEC_SIZE")]
    pub size: Option<usize>,
    /// Mantissa bits.
    #[arg(long, global = true, env = "SOBSPEC_PRECISION")]
    pub precision: Option<u32>,
    /// Extra rows built beyond `size` to absorb truncation.
    #[arg(long, global = true, env = "SOBSPEC_GUARD")]
    pub guard: Option<usize>,
    #[arg(long, global = true, env = "SOBSPEC_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "SOBSPEC_FORMAT")]
    pub format: Option<Format>,
    #[arg(long, global = true, env = "SOBSPEC_TOLERANCE")]
    pub tolerance: Option<String>,
    /// TOML file with any of the parameters above.
    #[arg(long, global = true, env = "SOBSPEC_CONFIG")]
    pub config: Option<PathBuf>,
    /// JSON file `{beta, gamma, mass, lower, upper}` for `--measure custom`.
    #[arg(long, global = true, env = "SOBSPEC_RECURRENCE")]
    pub recurrence: Option<PathBuf>,
}

/// A number written either as a string (kept verbatim) or a TOML/JSON number.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Text(String),
    Int(i64),
    Float(f64),
}

impl fmt::Display for NumberText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberText::Text(s) => f.write_str(s),
            NumberText::Int(v) => write!(f, "{v}"),
            NumberText::Float(v) => write!(f, "{v:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub measure: Option<MeasureKind>,
    pub alpha: Option<NumberText>,
    pub c: Option<NumberText>,
    #[serde(rename = "M")]
    pub m: Option<NumberText>,
    #[serde(rename = "N")]
    pub n: Option<NumberText>,
    pub size: Option<usize>,
    pub precision: Option<u32>,
    pub guard: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerance: Option<NumberText>,
    pub recurrence: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Invalid(format!("malformed config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub measure: MeasureKind,
    pub alpha: String,
    pub c: String,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "N")]
    pub n: String,
    pub size: usize,
    pub precision: u32,
    pub guard: usize,
    #[serde(skip)]
    pub out: PathBuf,
    pub format: Format,
    pub tolerance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<PathBuf>,
}

impl RunConfig {
    /// Flags and environment first, then the config file, then defaults.
    pub fn resolve(command: Command, params: Params) -> Result<Self, CliError> {
        let file = match &params.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let text = |flag: Option<String>, file: Option<NumberText>, default: &str| {
            flag.or_else(|| file.map(|v| v.to_string())).unwrap_or_else(|| default.to_string())
        };
        let cfg = RunConfig {
            command,
            measure: params.measure.or(file.measure).unwrap_or(MeasureKind::Laguerre),
            alpha: text(params.alpha, file.alpha, "0"),
            c: text(params.c, file.c, "-1"),
            m: text(params.m, file.m, "1"),
            n: text(params.n, file.n, "1"),
            size: params.size.or(file.size).unwrap_or(DEFAULT_SIZE),
            precision: params.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION),
            guard: params.guard.or(file.guard).unwrap_or(DEFAULT_GUARD),
            out: params.out.or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            format: params.format.or(file.format).unwrap_or(Format::Json),
            tolerance: text(params.tolerance, file.tolerance, DEFAULT_TOLERANCE),
            recurrence: params.recurrence.or(file.recurrence),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.size < 3 {
            return Err(CliError::Invalid(format!("size must be at least 3 (got {})", self.size)));
        }
        if self.precision < MIN_PRECISION {
            return Err(CliError::Invalid(format!(
                "precision must be at least {MIN_PRECISION} bits (got {})",
                self.precision
            )));
        }
        if self.guard < 2 {
            return Err(CliError::Invalid(format!("guard must be at least 2 (got {})", self.guard)));
        }
        if self.measure == MeasureKind::Custom && self.recurrence.is_none() {
            return Err(CliError::Invalid("--measure custom needs --recurrence".into()));
        }
        let tol = self.number("tolerance", &self.tolerance)?;
        if tol.is_sign_negative() {
            return Err(CliError::Invalid(format!("tolerance must be nonnegative (got {})", self.tolerance)));
        }
        Ok(())
    }

    pub fn number(&self, what: &str, text: &str) -> Result<Float, CliError> {
        parse_number(self.precision, what, text)
    }

    pub fn tolerance(&self) -> Result<Float, CliError> {
        self.number("tolerance", &self.tolerance)
    }

    pub fn measure_spec(&self) -> Result<MeasureSpec, CliError> {
        Ok(match self.measure {
            MeasureKind::Laguerre => MeasureSpec::laguerre(self.number("alpha", &self.alpha)?)?,
            MeasureKind::Custom => {
                let path = self.recurrence.as_deref().expect("validated");
                RecurrenceFile::load(path)?.into_measure(self.precision)?
            }
        })
    }

    pub fn sobolev_spec(&self) -> Result<SobolevSpec, CliError> {
        Ok(SobolevSpec::new(
            self.measure_spec()?,
            self.number("c", &self.c)?,
            self.number("M", &self.m)?,
            self.number("N", &self.n)?,
        )?)
    }
}

pub fn parse_number(prec: u32, what: &str, text: &str) -> Result<Float, CliError> {
    let v = real::parse(prec, text).ok_or_else(|| CliError::Invalid(format!("{what}: not a number: {text:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Invalid(format!("{what} must be finite (got {text})")));
    }
    Ok(v)
}

/// Monic recurrence coefficients of a custom measure.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceFile {
    pub beta: Vec<NumberText>,
    /// `gamma[0]` is ignored.
    pub gamma: Vec<NumberText>,
    pub mass: NumberText,
    pub lower: Option<NumberText>,
    pub upper: Option<NumberText>,
}

impl RecurrenceFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read recurrence {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("malformed recurrence {}: {e}", path.display())))
    }

    pub fn into_measure(self, prec: u32) -> Result<MeasureSpec, CliError> {
        let list = |what: &str, v: &[NumberText]| -> Result<Vec<Float>, CliError> {
            v.iter().map(|x| parse_number(prec, what, &x.to_string())).collect()
        };
        let bound = |v: &Option<NumberText>| v.as_ref().map(|x| parse_number(prec, "bound", &x.to_string())).transpose();
        let support = Support::new(bound(&self.lower)?, bound(&self.upper)?)?;
        let rec = CustomRecurrence {
            beta: list("beta", &self.beta)?,
            gamma: list("gamma", &self.gamma)?,
            mass: parse_number(prec, "mass", &self.mass.to_string())?,
        };
        Ok(MeasureSpec::custom(rec, support, None)?)
    }
}
