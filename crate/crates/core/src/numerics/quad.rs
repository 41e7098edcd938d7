//! Adaptive Gauss–Legendre quadrature at arbitrary precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::{Complex, Float};

use super::precision::{abs_f64, BigComplex, Estimate, PrecisionContext};
use crate::error::{Error, Result};

type Rule = Arc<Vec<(Float, Float)>>;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize, prec: u32) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache").get(&(n, prec)) {
        return r.clone();
    }
    let wp = prec + 32;
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = ((i as f64 - 0.25) / (n as f64 + 0.5)) * std::f64::consts::PI;
        let mut x = Float::with_val(wp, guess.cos());
        let mut dp = Float::new(wp);
        for _ in 0..200 {
            // P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = Float::with_val(wp, 1);
            let mut p1 = x.clone();
            for k in 2..=n {
                let p2 = (Float::with_val(wp, &x * &p1) * (2 * k - 1) as u32
                    - Float::with_val(wp, &p0 * (k - 1) as u32))
                    / k as u32;
                p0 = p1;
                p1 = p2;
            }
            let one_minus = Float::with_val(wp, 1 - Float::with_val(wp, x.square_ref()));
            dp = Float::with_val(wp, &p0 - Float::with_val(wp, &x * &p1)) * n as u32 / &one_minus;
            let dx = Float::with_val(wp, &p1 / &dp);
            x -= &dx;
            if dx.is_zero() || dx.get_exp().unwrap_or(i32::MIN) < -(wp as i32) + 4 {
                break;
            }
        }
        let one_minus = Float::with_val(wp, 1 - Float::with_val(wp, x.square_ref()));
        let w = Float::with_val(wp, 2u32) / (one_minus * Float::with_val(wp, dp.square_ref()));
        rule.push((Float::with_val(prec, &x), Float::with_val(prec, &w)));
    }
    let rule = Arc::new(rule);
    cache.lock().expect("rule cache").insert((n, prec), rule.clone());
    rule
}

fn panel(
    f: &(dyn Fn(&Float) -> Result<BigComplex> + Sync),
    lo: &Float,
    hi: &Float,
    rule: &Rule,
    prec: u32,
) -> Result<BigComplex> {
    let half = Float::with_val(prec, hi - lo) / 2u32;
    let mid = Float::with_val(prec, hi + lo) / 2u32;
    let parts: Vec<BigComplex> = rule
        .par_iter()
        .map(|(x, w)| {
            let t = Float::with_val(prec, &half * x) + &mid;
            f(&t).map(|v| Complex::with_val(prec, v * w))
        })
        .collect::<Result<_>>()?;
    let mut acc = Complex::with_val(prec, 0);
    for p in parts {
        acc += p;
    }
    Ok(acc * half)
}

/// Points per panel used at a given precision.
pub fn panel_order(prec: u32) -> usize {
    ((prec / 8) as usize).clamp(16, 64)
}

/// ∫_lo^hi f(t) dt for a smooth complex-valued integrand.
///
/// Each panel is compared against its two halves and bisected until the
/// discrepancy falls below a share of `tol` proportional to its width.
pub fn integrate(
    f: &(dyn Fn(&Float) -> Result<BigComplex> + Sync),
    lo: &Float,
    hi: &Float,
    tol: f64,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    let prec = ctx.work_prec();
    let rule = gauss_legendre(panel_order(prec), prec);
    let total = Float::with_val(prec, hi - lo).to_f64().abs();
    if total == 0.0 {
        return Ok(Estimate::new(Complex::with_val(ctx.bits(), 0), 0.0));
    }
    let mut stack = vec![(
        Float::with_val(prec, lo),
        Float::with_val(prec, hi),
        panel(f, lo, hi, &rule, prec)?,
        0u32,
    )];
    let mut acc = Complex::with_val(prec, 0);
    let mut err = 0.0;
    let mut panels = 0usize;
    while let Some((a, b, whole, depth)) = stack.pop() {
        panels += 1;
        if panels > 20_000 {
            return Err(Error::Convergence("quadrature panel budget exhausted".into()));
        }
        let m = Float::with_val(prec, &a + &b) / 2u32;
        let left = panel(f, &a, &m, &rule, prec)?;
        let right = panel(f, &m, &b, &rule, prec)?;
        let split = Complex::with_val(prec, &left + &right);
        let diff = abs_f64(&Complex::with_val(prec, &split - &whole));
        let width = Float::with_val(prec, &b - &a).to_f64().abs();
        let share = tol * width / total;
        if diff <= share || depth >= 40 {
            if depth >= 40 && diff > share {
                return Err(Error::Convergence(format!(
                    "quadrature stalled on [{}, {}]",
                    a.to_f64(),
                    b.to_f64()
                )));
            }
            acc += split;
            err += diff;
        } else {
            stack.push((m.clone(), b, right, depth + 1));
            stack.push((a, m, left, depth + 1));
        }
    }
    Ok(Estimate::new(ctx.round(&acc), err))
}
