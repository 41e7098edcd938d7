//! Λ, Λ_N and the error series via the incomplete-gamma expansion, with
//! certified truncation, derivatives and the Z-function.

pub mod bounds;
pub mod series;
pub mod zfunc;

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::BigReal;

pub use bounds::{certified_cutoff, first_term_bound, regime_start, rosser_first_term_bound, tail_bound};
pub use series::{error_series, lambda, lambda_N, lambda_full, lambda_term, weighted_series, SeriesTerm, Weights};
pub use zfunc::{derivative, z_function};

/// Evaluate Λ itself or the N-factor approximation Λ_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Approx(usize),
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Full => write!(f, "full"),
            Mode::Approx(n) => write!(f, "approx{n}"),
        }
    }
}

/// Target accuracy and truncation settings for series evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxConfig {
    n_factors: usize,
    target_abs_error: BigReal,
    n_cutoff_override: Option<usize>,
}

impl ApproxConfig {
    pub fn new(target_abs_error: f64) -> Result<Self> {
        Self::with_target(Float::with_val(64, target_abs_error))
    }

    pub fn with_target(target_abs_error: BigReal) -> Result<Self> {
        if !(target_abs_error.is_finite() && target_abs_error > 0) {
            return Err(Error::InvalidArgument("target error must be positive".into()));
        }
        Ok(Self {
            n_factors: 1,
            target_abs_error,
            n_cutoff_override: None,
        })
    }

    pub fn with_factors(mut self, n: usize) -> Self {
        self.n_factors = n;
        self
    }

    /// Sum exactly `n` terms instead of the certified cutoff.
    pub fn with_cutoff(mut self, n: usize) -> Self {
        self.n_cutoff_override = Some(n.max(1));
        self
    }

    /// The same settings with a different target.
    pub fn retargeted(&self, target: BigReal) -> Self {
        Self {
            target_abs_error: target,
            ..self.clone()
        }
    }

    pub fn n_factors(&self) -> usize {
        self.n_factors
    }

    pub fn target(&self) -> &BigReal {
        &self.target_abs_error
    }

    pub fn cutoff_override(&self) -> Option<usize> {
        self.n_cutoff_override
    }
}
