//! Derivatives of analytic functions from Cauchy's integral formula.

use rayon::prelude::*;
use rug::{ops::Pow, Complex, Float, Integer};

use super::precision::{abs_f64, BigComplex, BigReal, Estimate, PrecisionContext};
use crate::error::{Error, Result};

/// A complex function analytic on the region where it is sampled.
pub trait AnalyticFn: Sync {
    fn eval(&self, s: &BigComplex) -> Result<Estimate<BigComplex>>;
}

impl<F> AnalyticFn for F
where
    F: Fn(&BigComplex) -> Result<Estimate<BigComplex>> + Sync,
{
    fn eval(&self, s: &BigComplex) -> Result<Estimate<BigComplex>> {
        self(s)
    }
}

const MAX_POINTS: usize = 1 << 14;

/// n-th derivative at `s0` from the trapezoid rule on |s - s0| = radius.
///
/// Starts with `points` samples and doubles (reusing earlier samples) until
/// two successive estimates agree to 2^{-bits} of the sample scale
/// n!/r^n · max|f|, or to the propagated sample error if that is larger.
pub fn cauchy_derivative(
    f: &dyn AnalyticFn,
    s0: &BigComplex,
    order: u32,
    radius: &BigReal,
    points: usize,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    if points < 8 * (order as usize + 1) {
        return Err(Error::InvalidArgument(format!(
            "need at least {} points for order {order}, got {points}",
            8 * (order as usize + 1)
        )));
    }
    if !(radius.is_finite() && *radius > 0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let prec = ctx.work_prec();
    let n = order as i64;
    let two_pi = ctx.pi() * 2u32;

    let node = |j: usize, total: usize| -> BigComplex {
        let theta = Float::with_val(prec, &two_pi * j as u64) / total as u64;
        Complex::with_val(prec, (theta.clone().cos(), theta.sin()))
    };

    // samples[j] = f(s0 + r w_j), w_j = e^{2πij/total}
    let sample = |j: usize, total: usize| -> Result<(BigComplex, f64)> {
        let w = node(j, total);
        let s = Complex::with_val(prec, s0 + Complex::with_val(prec, &w * radius));
        let e = f.eval(&s)?;
        Ok((e.value, e.abs_err))
    };

    let mut total = points;
    let mut samples: Vec<(BigComplex, f64)> = (0..total)
        .into_par_iter()
        .map(|j| sample(j, total))
        .collect::<Result<_>>()?;

    let mut fact = Integer::from(1);
    for k in 1..=order {
        fact *= k;
    }
    let r_pow = Float::with_val(prec, radius.clone().pow(order));
    let scale_factor = Float::with_val(prec, &fact) / &r_pow;
    let scale_f64 = scale_factor.to_f64();

    let combine = |samples: &[(BigComplex, f64)]| -> (BigComplex, f64, f64) {
        let total = samples.len();
        let mut acc = Complex::with_val(prec, 0);
        let mut fmax = 0f64;
        let mut ferr = 0f64;
        for (j, (v, e)) in samples.iter().enumerate() {
            // w_j^{-n}
            let idx = ((total as i64 - (j as i64 * n) % total as i64) % total as i64) as usize;
            let w = node(idx, total);
            acc += Complex::with_val(prec, v * &w);
            fmax = fmax.max(abs_f64(v));
            ferr = ferr.max(*e);
        }
        acc *= &scale_factor;
        acc /= total as u64;
        (acc, fmax, ferr)
    };

    let (mut prev, mut fmax, mut ferr) = combine(&samples);
    loop {
        let next_total = 2 * total;
        if next_total > MAX_POINTS {
            return Err(Error::Convergence(format!(
                "Cauchy integral for order {order} did not settle within {MAX_POINTS} points"
            )));
        }
        let fresh: Vec<(BigComplex, f64)> = (0..total)
            .into_par_iter()
            .map(|j| sample(2 * j + 1, next_total))
            .collect::<Result<_>>()?;
        let mut merged = Vec::with_capacity(next_total);
        for (old, new) in samples.into_iter().zip(fresh) {
            merged.push(old);
            merged.push(new);
        }
        samples = merged;
        total = next_total;
        let (cur, fm, fe) = combine(&samples);
        fmax = fmax.max(fm);
        ferr = ferr.max(fe);
        let diff = abs_f64(&Complex::with_val(prec, &cur - &prev));
        let scale = scale_f64 * fmax;
        // Samples carry their own error; the estimates cannot settle below it.
        if diff <= ctx.eps() * scale + 2.0 * scale_f64 * ferr {
            let abs_err = diff + ctx.work_eps() * scale * 4.0 + scale_f64 * ferr;
            return Ok(Estimate::new(ctx.round(&cur), abs_err));
        }
        prev = cur;
    }
}
