use rayon::prelude::*;
use rug::{Complex, Float};

use super::bounds::{certified_cutoff, tail_bound};
use super::{ApproxConfig, Mode};
use crate::arith::{is_smooth, nth_prime};
use crate::eigenform::{CoefficientTable, EigenformSpec};
use crate::error::{Error, Result};
use crate::numerics::{abs_f64, upper_incomplete_gamma, BigComplex, BigReal, Estimate, PrecisionContext};

/// The pieces of the n-th summand: a^{−s}Γ(s, a) and a^{−(k−s)}Γ(k−s, a), a = 2πn/√C.
#[derive(Debug, Clone)]
pub struct SeriesTerm {
    pub n: usize,
    pub a_s: BigComplex,
    pub a_ks: BigComplex,
    pub abs_err: f64,
}

impl SeriesTerm {
    pub fn compute(s: &BigComplex, n: usize, spec: &EigenformSpec, ctx: &PrecisionContext) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("series index starts at 1".into()));
        }
        let prec = ctx.work_prec();
        let s = Complex::with_val(prec, s);
        let a = Float::with_val(prec, ctx.pi() * 2u32 * n as u64) / Float::with_val(prec, spec.level()).sqrt();
        let ln_a = Float::with_val(prec, a.ln_ref());
        let ks = Complex::with_val(prec, spec.weight() - &s);
        let piece = |z: &BigComplex| -> Result<(BigComplex, f64)> {
            let g = upper_incomplete_gamma(z, &a, ctx)?;
            let pow = (-Complex::with_val(prec, z * &ln_a)).exp();
            let v = Complex::with_val(prec, &g.value * &pow);
            let rel = g.rel_err() + ctx.work_eps() * (4.0 + abs_f64(z) * ln_a.to_f64().abs());
            let err = rel * abs_f64(&v);
            Ok((v, err))
        };
        let (a_s, e1) = piece(&s)?;
        let (a_ks, e2) = piece(&ks)?;
        Ok(Self {
            n,
            a_s,
            a_ks,
            abs_err: e1 + e2,
        })
    }

    /// a^{−s}Γ(s, a) + (−1)^P a^{−(k−s)}Γ(k−s, a)
    pub fn combined(&self, spec: &EigenformSpec) -> BigComplex {
        let prec = self.a_s.prec().0;
        if spec.sign_exponent() == 0 {
            Complex::with_val(prec, &self.a_s + &self.a_ks)
        } else {
            Complex::with_val(prec, &self.a_s - &self.a_ks)
        }
    }
}

pub fn lambda_term(
    s: &BigComplex,
    n: usize,
    spec: &EigenformSpec,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    let t = SeriesTerm::compute(s, n, spec, ctx)?;
    Ok(Estimate::new(t.combined(spec), t.abs_err))
}

/// Which coefficients enter the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weights {
    /// a_n
    All,
    /// b_n^{(N)}
    Smooth(usize),
    /// c_n^{(N)}
    Complement(usize),
}

impl Weights {
    fn keeps(&self, n: usize, p_n: u64) -> bool {
        match self {
            Weights::All => true,
            Weights::Smooth(_) => is_smooth(n as u64, p_n),
            Weights::Complement(_) => !is_smooth(n as u64, p_n),
        }
    }

    fn p_n(&self) -> u64 {
        match self {
            Weights::All => 0,
            Weights::Smooth(n) | Weights::Complement(n) => {
                if *n == 0 {
                    1
                } else {
                    nth_prime(*n)
                }
            }
        }
    }
}

impl From<Mode> for Weights {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Full => Weights::All,
            Mode::Approx(n) => Weights::Smooth(n),
        }
    }
}

/// Σ w_n · lambda_term(s, n) over the certified cutoff, with the tail bound
/// folded into the error.
pub fn weighted_series(
    s: &BigComplex,
    weights: Weights,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    target: &BigReal,
    cutoff_override: Option<usize>,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    let prec = ctx.work_prec();
    let cutoff = match cutoff_override {
        Some(n) => n,
        None => certified_cutoff(s, spec, target)?,
    };
    if cutoff > table.n_max() {
        return Err(Error::Cutoff {
            needed: cutoff,
            have: table.n_max(),
        });
    }
    let p_n = weights.p_n();
    let idx: Vec<usize> = (1..=cutoff)
        .filter(|&n| weights.keeps(n, p_n) && !table.get(n).is_zero())
        .collect();
    let parts: Vec<(BigComplex, f64)> = idx
        .par_iter()
        .map(|&n| {
            let t = SeriesTerm::compute(s, n, spec, ctx)?;
            let a_n = table.get(n).to_complex(prec);
            let v = Complex::with_val(prec, &a_n * t.combined(spec));
            Ok((v, abs_f64(&a_n) * t.abs_err))
        })
        .collect::<Result<_>>()?;
    let mut acc = Complex::with_val(prec, 0);
    let mut err = 0.0;
    let mut mag = 0.0;
    for (v, e) in parts {
        mag += abs_f64(&v);
        acc += v;
        err += e;
    }
    err += ctx.work_eps() * mag * (idx.len() as f64 + 1.0);
    // The tail of the masked sum is dominated by the tail of Σ|a_n||term|.
    let tail = if cutoff_override.is_some() {
        match tail_bound(cutoff + 1, s, spec) {
            Ok(b) => b.to_f64(),
            Err(_) => f64::INFINITY,
        }
    } else {
        tail_bound(cutoff + 1, s, spec)?.to_f64()
    };
    Ok(Estimate::new(ctx.round(&acc), err + tail))
}

fn certified(
    s: &BigComplex,
    weights: Weights,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    let v = weighted_series(s, weights, table, spec, cfg.target(), cfg.cutoff_override(), ctx)?;
    if cfg.cutoff_override().is_none() && Float::with_val(64, v.abs_err) > *cfg.target() {
        return Err(Error::Precision(format!(
            "error estimate {:e} exceeds the target {:e}; raise the precision",
            v.abs_err,
            cfg.target().to_f64()
        )));
    }
    Ok(v)
}

/// Λ(s) = Σ a_n lambda_term(s, n).
pub fn lambda_full(
    s: &BigComplex,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    certified(s, Weights::All, table, spec, cfg, ctx)
}

/// Λ_N(s) = Σ b_n^{(N)} lambda_term(s, n) with N = cfg.n_factors().
#[allow(non_snake_case)]
pub fn lambda_N(
    s: &BigComplex,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    certified(s, Weights::Smooth(cfg.n_factors()), table, spec, cfg, ctx)
}

/// Λ or Λ_N according to `mode`.
pub fn lambda(
    s: &BigComplex,
    mode: Mode,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    certified(s, mode.into(), table, spec, cfg, ctx)
}

/// Λ(s) − Λ_N(s) = Σ c_n^{(N)} lambda_term(s, n).
pub fn error_series(
    s: &BigComplex,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    n_factors: usize,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    certified(s, Weights::Complement(n_factors), table, spec, cfg, ctx)
}
