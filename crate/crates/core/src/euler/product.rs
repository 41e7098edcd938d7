use rug::{Complex, Float};

use super::local::{local_factor_eval, LocalFactor};
use crate::arith::first_primes;
use crate::eigenform::{CoefficientTable, EigenformSpec};
use crate::error::{Error, Result};
use crate::numerics::{abs_f64, gamma, BigComplex, Estimate, PrecisionContext};

/// g(s) = C^{s/2} (2π)^{−s} Γ(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaFactor {
    level: u64,
    weight: u32,
}

impl GammaFactor {
    pub fn new(spec: &EigenformSpec) -> Self {
        Self {
            level: spec.level(),
            weight: spec.weight(),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn eval(&self, s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
        let prec = ctx.work_prec();
        let g = gamma(s, ctx)?;
        let two_pi = ctx.pi() * 2u32;
        // exp(s (½ log C − log 2π))
        let log_base = Float::with_val(prec, Float::with_val(prec, self.level).ln() / 2u32) - two_pi.ln();
        let pre = Complex::with_val(prec, s * &log_base).exp();
        let value = Complex::with_val(prec, &g.value * &pre);
        let rel = g.rel_err() + ctx.work_eps() * (4.0 + abs_f64(s) * log_base.to_f64().abs());
        let abs_err = rel * abs_f64(&value);
        Ok(Estimate::new(ctx.round(&value), abs_err + ctx.eps() * abs_f64(&value)))
    }
}

pub fn gamma_factor_eval(s: &BigComplex, spec: &EigenformSpec, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
    GammaFactor::new(spec).eval(s, ctx)
}

/// Λ_N^Euler(s) = g(s) ∏_{p ≤ p_N} L_p(s), with the local factors prepared once.
#[derive(Debug, Clone)]
pub struct EulerProduct {
    gamma: GammaFactor,
    factors: Vec<LocalFactor>,
}

impl EulerProduct {
    pub fn new(
        spec: &EigenformSpec,
        table: &CoefficientTable,
        n_factors: usize,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let factors = first_primes(n_factors)
            .into_iter()
            .map(|p| LocalFactor::from_table(p, spec, table, ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            gamma: GammaFactor::new(spec),
            factors,
        })
    }

    pub fn factors(&self) -> &[LocalFactor] {
        &self.factors
    }

    pub fn gamma_factor(&self) -> &GammaFactor {
        &self.gamma
    }

    /// ∏ L_p(s) without the archimedean factor.
    pub fn finite_part(&self, s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
        let mut acc = ctx.complex(1);
        let mut rel = 0.0;
        for f in &self.factors {
            let v = local_factor_eval(f, s, ctx)?;
            rel += v.rel_err();
            acc *= &v.value;
        }
        let abs_err = (rel + ctx.work_eps() * self.factors.len() as f64) * abs_f64(&acc);
        Ok(Estimate::new(acc, abs_err))
    }

    pub fn eval(&self, s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
        let g = self.gamma.eval(s, ctx)?;
        let l = self.finite_part(s, ctx)?;
        let value = Complex::with_val(ctx.work_prec(), &g.value * &l.value);
        let rel = g.rel_err() + l.rel_err() + ctx.eps();
        let m = abs_f64(&value);
        Ok(Estimate::new(ctx.round(&value), rel * m))
    }
}

/// Λ_N^Euler(s). N = 0 gives g(s).
pub fn truncated_euler_eval(
    s: &BigComplex,
    n_factors: usize,
    spec: &EigenformSpec,
    table: &CoefficientTable,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    EulerProduct::new(spec, table, n_factors, ctx)?
        .eval(s, ctx)
        .map_err(|e| match e {
            Error::Pole(msg) => Error::Pole(format!("truncated Euler product: {msg}")),
            other => other,
        })
}
