use rug::{Complex, Float};

use super::series::lambda;
use super::{ApproxConfig, Mode};
use crate::eigenform::{CoefficientTable, EigenformSpec};
use crate::error::{Error, Result};
use crate::euler::GammaFactor;
use crate::numerics::{abs_f64, cauchy_derivative, BigComplex, BigReal, Estimate, PrecisionContext};

/// Z(t) = i^{−P} Λ(k/2 + it) / |g(k/2 + it)|, real for self-dual forms.
///
/// The series target is scaled by |g| so that the result meets the
/// configured target in Z units. A non-real quotient beyond the target is a
/// precision failure.
pub fn z_function(
    t: &BigReal,
    mode: Mode,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigReal>> {
    if !spec.chi().is_real() {
        return Err(Error::InvalidArgument(
            "Z(t) is real only for forms with a real character".into(),
        ));
    }
    let prec = ctx.work_prec();
    let s = Complex::with_val(prec, (Float::with_val(prec, spec.weight()) / 2u32, t));
    let g = GammaFactor::new(spec).eval(&s, ctx)?;
    let g_abs = Float::with_val(prec, g.value.abs_ref());
    let target = Float::with_val(64, cfg.target() * &g_abs);
    let lam = lambda(&s, mode, table, spec, &cfg.retargeted(target), ctx)?;
    let mut q = Complex::with_val(prec, &lam.value / &g_abs);
    if spec.sign_exponent() == 1 {
        // multiply by −i
        q = Complex::with_val(prec, (q.imag(), Float::with_val(prec, -q.real())));
    }
    let g_abs_f = Float::with_val(64, &g_abs);
    let err = (Float::with_val(64, lam.abs_err) / &g_abs_f).to_f64() + g.rel_err() * abs_f64(&q);
    let im = q.imag().to_f64().abs();
    if Float::with_val(64, im) > *cfg.target() {
        return Err(Error::Precision(format!(
            "Z({}) has imaginary residue {im:e} above the target; raise the precision",
            t.to_f64()
        )));
    }
    Ok(Estimate::new(ctx.round_real(q.real()), err))
}

/// d^n/ds^n of Λ or Λ_N at s0 by Cauchy's formula on a circle of radius ≤ 1/2.
pub fn derivative(
    s0: &BigComplex,
    order: u32,
    mode: Mode,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    if order == 0 {
        return lambda(s0, mode, table, spec, cfg, ctx);
    }
    let f = |s: &BigComplex| lambda(s, mode, table, spec, cfg, ctx);
    let radius = Float::with_val(ctx.work_prec(), 0.5);
    cauchy_derivative(&f, s0, order, &radius, 32 * (order as usize + 1), ctx)
}
