//! Zeros of Z and Z_N on the critical line: grid scan, refinement, order
//! classification and comparison against reference lists.

pub mod compare;
pub mod order;
pub mod refine;
pub mod scan;

use rug::Float;

use crate::approximation::{z_function, ApproxConfig, Mode};
use crate::eigenform::{CoefficientTable, EigenformSpec};
use crate::error::Result;
use crate::numerics::{BigReal, Estimate, PrecisionContext};

pub use compare::{compare_zero_lists, ZeroComparison, ZeroMatch};
pub use order::{
    classify_from_derivatives, classify_order, classify_order_of, local_minima_of, local_minimum_probe,
    MinimumCandidate,
};
pub use refine::{refine_zero, refine_zeros, ACCEPTANCE_FACTOR};
pub use scan::{scan_sign_changes, Bracket, Scan};

/// Everything needed to evaluate Z or Z_N.
#[derive(Debug, Clone, Copy)]
pub struct ZSource<'a> {
    pub mode: Mode,
    pub table: &'a CoefficientTable,
    pub spec: &'a EigenformSpec,
    pub cfg: &'a ApproxConfig,
    pub ctx: &'a PrecisionContext,
}

impl<'a> ZSource<'a> {
    pub fn new(
        mode: Mode,
        table: &'a CoefficientTable,
        spec: &'a EigenformSpec,
        cfg: &'a ApproxConfig,
        ctx: &'a PrecisionContext,
    ) -> Self {
        Self {
            mode,
            table,
            spec,
            cfg,
            ctx,
        }
    }

    pub fn z(&self, t: &BigReal) -> Result<Estimate<BigReal>> {
        z_function(t, self.mode, self.table, self.spec, self.cfg, self.ctx)
    }

    pub fn real(&self, t: f64) -> BigReal {
        Float::with_val(self.ctx.work_prec(), t)
    }
}

/// A refined zero of Z or Z_N.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub t: BigReal,
    pub mode: Mode,
    /// Width of the final bracket.
    pub refined_error: BigReal,
    pub order: u32,
    pub bracket: (BigReal, BigReal),
    /// Z(t) and its propagated error.
    pub z_value: f64,
    pub z_error: f64,
}

impl ZeroRecord {
    pub fn contains(&self, t: &BigReal) -> bool {
        *t >= self.bracket.0 && *t <= self.bracket.1
    }
}

/// Scan, refine every bracket to `tol` and, if `max_order` is given,
/// classify each zero from derivatives up to that order.
pub fn find_zeros(
    t_lo: &BigReal,
    t_hi: &BigReal,
    step: f64,
    tol: f64,
    max_order: Option<u32>,
    src: &ZSource,
) -> Result<Vec<ZeroRecord>> {
    let scan = scan_sign_changes(t_lo, t_hi, step, src)?;
    let mut zeros = refine_zeros(&scan.brackets, tol, src)?;
    if let Some(m) = max_order {
        for z in zeros.iter_mut() {
            z.order = classify_order(&z.t, z.refined_error.to_f64(), m, src)?;
        }
    }
    Ok(zeros)
}
