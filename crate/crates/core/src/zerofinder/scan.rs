use rayon::prelude::*;
use rug::Float;

use super::ZSource;
use crate::error::{Error, Result};
use crate::numerics::{BigReal, Estimate};

/// Consecutive grid points where Z changes sign, with the cached values.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub lo: BigReal,
    pub hi: BigReal,
    pub z_lo: Estimate<BigReal>,
    pub z_hi: Estimate<BigReal>,
}

impl Bracket {
    pub fn width(&self) -> BigReal {
        Float::with_val(self.lo.prec(), &self.hi - &self.lo)
    }
}

#[derive(Debug, Clone)]
pub struct Scan {
    pub grid: Vec<(BigReal, Estimate<BigReal>)>,
    pub brackets: Vec<Bracket>,
}

/// Z on t_lo, t_lo + step, ... (and t_hi), and the sign changes between
/// neighbours.
pub fn scan_sign_changes(t_lo: &BigReal, t_hi: &BigReal, step: f64, src: &ZSource) -> Result<Scan> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("scan step {step} must be positive")));
    }
    let prec = src.ctx.work_prec();
    if t_hi <= t_lo {
        return Ok(Scan {
            grid: Vec::new(),
            brackets: Vec::new(),
        });
    }
    let h = Float::with_val(prec, step);
    let span = Float::with_val(prec, t_hi - t_lo);
    let count = Float::with_val(prec, &span / &h)
        .floor()
        .to_integer()
        .and_then(|i| i.to_usize())
        .ok_or_else(|| Error::Resource("scan grid too large".into()))?;
    let mut ts: Vec<BigReal> = (0..=count)
        .map(|i| Float::with_val(prec, &h * i as u64) + t_lo)
        .collect();
    if ts.last().is_some_and(|t| t < t_hi) {
        ts.push(Float::with_val(prec, t_hi));
    }
    let values: Vec<Estimate<BigReal>> = ts.par_iter().map(|t| src.z(t)).collect::<Result<_>>()?;
    let grid: Vec<(BigReal, Estimate<BigReal>)> = ts.into_iter().zip(values).collect();
    let brackets = grid
        .windows(2)
        .filter(|w| {
            let (a, b) = (&w[0].1.value, &w[1].1.value);
            !a.is_zero() && !b.is_zero() && a.is_sign_positive() != b.is_sign_positive()
        })
        .map(|w| Bracket {
            lo: w[0].0.clone(),
            hi: w[1].0.clone(),
            z_lo: w[0].1.clone(),
            z_hi: w[1].1.clone(),
        })
        .collect();
    Ok(Scan { grid, brackets })
}
