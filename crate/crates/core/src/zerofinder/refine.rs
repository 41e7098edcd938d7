use rayon::prelude::*;
use rug::Float;

use super::scan::Bracket;
use super::{ZSource, ZeroRecord};
use crate::error::{Error, Result};
use crate::numerics::{BigReal, Estimate};

/// A refined point is accepted once |Z(t)| ≤ ACCEPTANCE_FACTOR × its
/// propagated evaluation error.
pub const ACCEPTANCE_FACTOR: f64 = 1e3;

const MAX_STEPS: usize = 600;

fn sign(z: &Estimate<BigReal>) -> Option<bool> {
    let v = z.value.to_f64().abs();
    if v <= z.abs_err || z.value.is_zero() {
        None
    } else {
        Some(z.value.is_sign_positive())
    }
}

fn accepted(z: &Estimate<BigReal>) -> bool {
    z.value.to_f64().abs() <= ACCEPTANCE_FACTOR * z.abs_err
}

/// Regula falsi point of [a, b] with the Illinois weights.
fn secant(a: &BigReal, b: &BigReal, za: &BigReal, zb: &BigReal) -> BigReal {
    let prec = a.prec();
    let num = Float::with_val(prec, a * zb) - Float::with_val(prec, b * za);
    let den = Float::with_val(prec, zb - za);
    num / den
}

/// Shrinks a sign-change bracket to width ≤ tol by bisection with secant
/// acceleration, then polishes until |Z(t)| is consistent with a zero.
pub fn refine_zero(bracket: &Bracket, tol: f64, src: &ZSource) -> Result<ZeroRecord> {
    let prec = src.ctx.work_prec();
    let tol_f = Float::with_val(prec, tol);
    let (mut a, mut b) = (bracket.lo.clone(), bracket.hi.clone());
    let (Some(sa), Some(sb)) = (sign(&bracket.z_lo), sign(&bracket.z_hi)) else {
        return Err(Error::Tolerance("bracket endpoints have unresolved signs".into()));
    };
    if sa == sb {
        return Err(Error::InvalidArgument("no sign change on the bracket".into()));
    }
    // Illinois weights: halve the retained endpoint's value when it sticks.
    let (mut wa, mut wb) = (bracket.z_lo.value.clone(), bracket.z_hi.value.clone());
    let mut last_side = 0i8;
    let mut bisect = false;
    let mut width = Float::with_val(prec, &b - &a);
    for _ in 0..MAX_STEPS {
        let c = if bisect {
            Float::with_val(prec, &a + &b) / 2u32
        } else {
            let c = secant(&a, &b, &wa, &wb);
            if c <= a || c >= b {
                Float::with_val(prec, &a + &b) / 2u32
            } else {
                c
            }
        };
        let zc = src.z(&c)?;
        if width <= tol_f && accepted(&zc) {
            return finish(c, zc, a, b, src);
        }
        match sign(&zc) {
            None => {
                // Z(c) is inside its own error band: probe both sides.
                let half = Float::with_val(prec, &tol_f / 2u32);
                let lo = Float::with_val(prec, &c - &half);
                let hi = Float::with_val(prec, &c + &half);
                let (zl, zh) = (src.z(&lo)?, src.z(&hi)?);
                return match (sign(&zl), sign(&zh)) {
                    (Some(x), Some(y)) if x != y => finish(c, zc, lo, hi, src),
                    _ => Err(Error::Tolerance(format!(
                        "Z cannot be resolved to width {tol:e} near t = {}; raise the precision",
                        c.to_f64()
                    ))),
                };
            }
            Some(sc) => {
                if sc == sa {
                    a = c;
                    wa = zc.value;
                    if last_side == 1 {
                        wb /= 2u32;
                    }
                    last_side = 1;
                } else {
                    b = c;
                    wb = zc.value;
                    if last_side == -1 {
                        wa /= 2u32;
                    }
                    last_side = -1;
                }
            }
        }
        let new_width = Float::with_val(prec, &b - &a);
        // fall back to bisection when a step fails to halve the bracket
        bisect = !bisect && Float::with_val(prec, &new_width * 2u32) > width;
        width = new_width;
        if width.is_zero() {
            break;
        }
    }
    Err(Error::Tolerance(format!(
        "refinement did not reach |Z| ≤ {ACCEPTANCE_FACTOR:e} × error within {MAX_STEPS} steps"
    )))
}

fn finish(t: BigReal, zt: Estimate<BigReal>, lo: BigReal, hi: BigReal, src: &ZSource) -> Result<ZeroRecord> {
    let prec = t.prec();
    Ok(ZeroRecord {
        refined_error: Float::with_val(prec, &hi - &lo),
        mode: src.mode,
        order: 1,
        bracket: (lo, hi),
        z_value: zt.value.to_f64(),
        z_error: zt.abs_err,
        t,
    })
}

/// Refines every bracket, in parallel.
pub fn refine_zeros(brackets: &[Bracket], tol: f64, src: &ZSource) -> Result<Vec<ZeroRecord>> {
    brackets.par_iter().map(|b| refine_zero(b, tol, src)).collect()
}
