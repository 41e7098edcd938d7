//! Run configuration: command-line flags over a key=value config file over
//! built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (csv or json)")),
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Built-in eigenform (only `delta` is built in).
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// Coefficient file in "n a_n" format; overrides --form.
    #[arg(long = "coeff-file", global = true)]
    pub coeff_file: Option<PathBuf>,
    #[arg(long, global = true)]
    pub weight: Option<u32>,
    #[arg(long, global = true)]
    pub level: Option<u64>,
    /// Sign exponent P in Λ(s) = (−1)^P Λ(k − s).
    #[arg(long, global = true)]
    pub sign: Option<u8>,
    #[arg(long, global = true)]
    pub bits: Option<u32>,
    /// Number of Euler factors.
    #[arg(long = "N", global = true)]
    pub n_factors: Option<usize>,
    #[arg(long = "target-error", global = true)]
    pub target_error: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[arg(long = "cache-dir", env = "LAPPROX_CACHE_DIR", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// key=value file supplying defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Source {
    Builtin(String),
    File(PathBuf),
}

/// The configuration after precedence is applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub source: Source,
    pub weight: u32,
    pub level: u64,
    pub sign: u8,
    pub bits: u32,
    pub n_factors: usize,
    pub target_error: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub cache_dir: PathBuf,
}

pub const DEFAULT_BITS: u32 = 128;
pub const DEFAULT_TARGET: f64 = 1e-20;

fn default_cache_dir() -> PathBuf {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(x).join("lapprox");
    }
    match std::env::var_os("HOME") {
        Some(h) => PathBuf::from(h).join(".cache").join("lapprox"),
        None => PathBuf::from(".lapprox-cache"),
    }
}

/// Parses "key = value" lines; '#' starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        const KNOWN: [&str; 11] = [
            "form",
            "coeff-file",
            "weight",
            "level",
            "sign",
            "bits",
            "N",
            "target-error",
            "out",
            "format",
            "cache-dir",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}")))
        })
        .transpose()
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        Self::resolve_with(args, &file)
    }

    pub fn resolve_with(args: &CommonArgs, file: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let coeff_file = args.coeff_file.clone().or(from_file::<PathBuf>(file, "coeff-file")?);
        let form = args.form.clone().or(from_file::<String>(file, "form")?);
        let source = match (coeff_file, form) {
            (Some(p), _) => Source::File(p),
            (None, Some(f)) if f == "delta" => Source::Builtin(f),
            (None, Some(f)) => return Err(CliError::Usage(format!("unknown built-in form {f:?}"))),
            (None, None) => Source::Builtin("delta".into()),
        };
        let header = match &source {
            Source::File(p) => file_header(p),
            Source::Builtin(_) => None,
        };
        let weight = args
            .weight
            .or(from_file(file, "weight")?)
            .or(header.map(|h| h.weight))
            .unwrap_or(12);
        let level = args
            .level
            .or(from_file(file, "level")?)
            .or(header.map(|h| h.level))
            .unwrap_or(1);
        let sign = args
            .sign
            .or(from_file(file, "sign")?)
            .or(header.map(|h| h.sign_exponent))
            .unwrap_or(0);
        if matches!(source, Source::Builtin(_)) && (weight, level, sign) != (12, 1, 0) {
            return Err(CliError::Usage(
                "the built-in delta form has k=12, C=1, P=0; use --coeff-file for other forms".into(),
            ));
        }
        let bits = args.bits.or(from_file(file, "bits")?).unwrap_or(DEFAULT_BITS);
        let n_factors = args.n_factors.or(from_file(file, "N")?).unwrap_or(1);
        let target_error = args
            .target_error
            .or(from_file(file, "target-error")?)
            .unwrap_or(DEFAULT_TARGET);
        if !(target_error > 0.0 && target_error.is_finite()) {
            return Err(CliError::Usage(format!("target error {target_error} must be positive")));
        }
        let format = args.format.or(from_file(file, "format")?).unwrap_or(Format::Json);
        let out = args.out.clone().or(from_file(file, "out")?);
        let cache_dir = args
            .cache_dir
            .clone()
            .or(from_file(file, "cache-dir")?)
            .unwrap_or_else(default_cache_dir);
        Ok(Self {
            source,
            weight,
            level,
            sign,
            bits,
            n_factors,
            target_error,
            format,
            out,
            cache_dir,
        })
    }
}

fn file_header(p: &Path) -> Option<lapprox_core::eigenform::CacheHeader> {
    let text = std::fs::read_to_string(p).ok()?;
    lapprox_core::eigenform::CacheHeader::parse(text.lines().next()?)
}
