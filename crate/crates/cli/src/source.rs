//! Coefficient tables for the configured eigenform, through the cache.

use std::path::PathBuf;

use lapprox_core::eigenform::{
    delta_coefficients, load_coefficients, read_cached, write_coefficients, CacheHeader, CoefficientTable,
    EigenformSpec,
};
use lapprox_core::Error;
use serde::Serialize;

use crate::config::{RunConfig, Source};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheStatus {
    Hit,
    Miss,
    Uncached,
}

pub struct Loaded {
    pub spec: EigenformSpec,
    pub table: CoefficientTable,
    pub cache: CacheStatus,
}

pub fn spec_of(cfg: &RunConfig) -> Result<EigenformSpec, CliError> {
    EigenformSpec::new(cfg.weight, cfg.level, cfg.sign).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn cache_path(cfg: &RunConfig, form: &str) -> PathBuf {
    cfg.cache_dir
        .join(format!("{form}-k{}-C{}-P{}.coeffs", cfg.weight, cfg.level, cfg.sign))
}

/// A table with at least `n_max` coefficients (all of a file's coefficients
/// for file sources).
pub fn load(cfg: &RunConfig, n_max: usize) -> Result<Loaded, CliError> {
    let spec = spec_of(cfg)?;
    match &cfg.source {
        Source::File(p) => {
            let table = load_coefficients(p, &spec).map_err(|e| match e {
                Error::Io(m) => CliError::Io(format!("{}: {m}", p.display())),
                other => CliError::from(other),
            })?;
            Ok(Loaded {
                spec,
                table,
                cache: CacheStatus::Uncached,
            })
        }
        Source::Builtin(form) => {
            let path = cache_path(cfg, form);
            if let Some(table) = read_cached(&path, &spec, n_max) {
                return Ok(Loaded {
                    spec,
                    table,
                    cache: CacheStatus::Hit,
                });
            }
            let existing = std::fs::read_to_string(&path)
                .ok()
                .and_then(|t| t.lines().next().and_then(CacheHeader::parse));
            if let Some(h) = existing {
                if !h.matches(&spec) {
                    eprintln!(
                        "warning: cache {} does not match this form; regenerating",
                        path.display()
                    );
                }
            }
            let table = delta_coefficients(n_max)?;
            let keep_old = existing.is_some_and(|h| h.matches(&spec) && h.n_max >= n_max);
            if !keep_old {
                let written = std::fs::create_dir_all(&cfg.cache_dir)
                    .map_err(Error::from)
                    .and_then(|_| write_coefficients(&path, &table, &spec));
                if let Err(e) = written {
                    eprintln!("warning: could not write cache {}: {e}", path.display());
                }
            }
            Ok(Loaded {
                spec,
                table,
                cache: CacheStatus::Miss,
            })
        }
    }
}

/// Runs `f` with a table, growing a built-in table when a cutoff asks for
/// more coefficients than it holds.
pub fn with_table<T>(
    cfg: &RunConfig,
    initial: usize,
    mut f: impl FnMut(&Loaded) -> Result<T, Error>,
) -> Result<(T, Loaded), CliError> {
    let mut n = initial;
    for _ in 0..4 {
        let loaded = load(cfg, n)?;
        match f(&loaded) {
            Ok(v) => return Ok((v, loaded)),
            Err(Error::Cutoff { needed, .. }) if matches!(cfg.source, Source::Builtin(_)) => {
                n = n.max(needed) * 2;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(CliError::Numeric(format!("coefficient table kept growing past {n}")))
}
