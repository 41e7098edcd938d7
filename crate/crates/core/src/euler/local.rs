use rug::{Complex, Float};

use crate::arith::is_prime;
use crate::eigenform::{CoefficientTable, EigenformSpec};
use crate::error::{Error, Result};
use crate::numerics::{abs_f64, BigComplex, BigReal, Estimate, PrecisionContext};

/// L_p(s) = (1 − a_p p^{−s} + χ(p) p^{k−1} p^{−2s})^{−1} with its reciprocal roots.
#[derive(Debug, Clone)]
pub struct LocalFactor {
    p: u64,
    weight: u32,
    a_p: BigComplex,
    chi_p: BigComplex,
    alpha1: BigComplex,
    alpha2: BigComplex,
    ln_p: BigReal,
}

impl LocalFactor {
    pub fn new(p: u64, a_p: BigComplex, chi_p: BigComplex, weight: u32, ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.work_prec();
        let a_p = Complex::with_val(prec, a_p);
        let chi_p = Complex::with_val(prec, chi_p);
        let (alpha1, alpha2) = local_roots(p, &a_p, &chi_p, weight, ctx)?;
        Ok(Self {
            p,
            weight,
            a_p,
            chi_p,
            alpha1,
            alpha2,
            ln_p: Float::with_val(prec, p).ln(),
        })
    }

    /// The factor at p built from a coefficient table; requires p ≤ n_max.
    pub fn from_table(p: u64, spec: &EigenformSpec, table: &CoefficientTable, ctx: &PrecisionContext) -> Result<Self> {
        if p as usize > table.n_max() {
            return Err(Error::InvalidArgument(format!(
                "a_{p} is beyond the table (n_max = {})",
                table.n_max()
            )));
        }
        let prec = ctx.work_prec();
        Self::new(
            p,
            table.get(p as usize).to_complex(prec),
            spec.chi().complex(p, prec),
            spec.weight(),
            ctx,
        )
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn a_p(&self) -> &BigComplex {
        &self.a_p
    }

    pub fn chi_p(&self) -> &BigComplex {
        &self.chi_p
    }

    pub fn roots(&self) -> (&BigComplex, &BigComplex) {
        (&self.alpha1, &self.alpha2)
    }

    pub fn ln_p(&self) -> &BigReal {
        &self.ln_p
    }

    /// Nonzero reciprocal roots (two for p ∤ C, at most one otherwise).
    pub fn nonzero_roots(&self) -> Vec<&BigComplex> {
        [&self.alpha1, &self.alpha2]
            .into_iter()
            .filter(|a| !a.is_zero())
            .collect()
    }

    /// p^{−s}
    pub fn p_pow_neg(&self, s: &BigComplex) -> BigComplex {
        let prec = s.prec().0.max(self.ln_p.prec());
        (-Complex::with_val(prec, s * &self.ln_p)).exp()
    }

    /// 1 − a_p x + χ(p) p^{k−1} x² at x = p^{−s}.
    pub fn denominator(&self, s: &BigComplex) -> BigComplex {
        let prec = s.prec().0.max(self.ln_p.prec());
        let x = self.p_pow_neg(s);
        let a = Complex::with_val(prec, &self.alpha1 * &x);
        let b = Complex::with_val(prec, &self.alpha2 * &x);
        Complex::with_val(prec, 1 - &a) * Complex::with_val(prec, 1 - &b)
    }
}

/// Roots of X² − a_p X + χ(p) p^{k−1}, larger magnitude first.
pub fn local_roots(
    p: u64,
    a_p: &BigComplex,
    chi_p: &BigComplex,
    weight: u32,
    ctx: &PrecisionContext,
) -> Result<(BigComplex, BigComplex)> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let prec = ctx.work_prec();
    let pk = Float::with_val(prec, Float::u_pow_u(p as u32, weight - 1));
    let c = Complex::with_val(prec, chi_p * &pk);
    let disc = Complex::with_val(prec, a_p.square_ref()) - Complex::with_val(prec, &c * 4u32);
    let root = disc.sqrt();
    let plus = Complex::with_val(prec, a_p + &root);
    let minus = Complex::with_val(prec, a_p - &root);
    let big = if abs_f64(&plus) >= abs_f64(&minus) { plus } else { minus } / 2u32;
    let small = if big.is_zero() {
        Complex::with_val(prec, 0)
    } else {
        Complex::with_val(prec, &c / &big)
    };

    if !chi_p.is_zero() {
        // Petersson: |α| = p^{(k−1)/2}
        let target = Float::with_val(prec, pk.sqrt_ref()).to_f64();
        let tol = (-(ctx.bits() as f64) / 2.0).exp2() * target;
        for a in [&big, &small] {
            let m = abs_f64(a);
            if (m - target).abs() > tol {
                return Err(Error::Tolerance(format!(
                    "|α| = {m:e} at p = {p} differs from p^((k-1)/2) = {target:e}"
                )));
            }
        }
    }
    Ok((big, small))
}

/// L_p(s) with a relative error estimate.
pub fn local_factor_eval(f: &LocalFactor, s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
    let prec = ctx.work_prec();
    let s = Complex::with_val(prec, s);
    let x = f.p_pow_neg(&s);
    let pole_tol = (-(ctx.bits() as f64) / 2.0).exp2() * f.ln_p.to_f64();
    for a in f.nonzero_roots() {
        let d = Complex::with_val(prec, 1 - Complex::with_val(prec, a * &x));
        if abs_f64(&d) < pole_tol {
            return Err(Error::Pole(format!(
                "L_{} has a pole within 2^-{} of s",
                f.p,
                ctx.bits() / 2
            )));
        }
    }
    let ax = Complex::with_val(prec, &f.a_p * &x);
    let pk = Float::with_val(prec, Float::u_pow_u(f.p as u32, f.weight - 1));
    let cx2 = Complex::with_val(prec, &f.chi_p * &pk) * Complex::with_val(prec, x.square_ref());
    let denom = Complex::with_val(prec, 1 - &ax) + &cx2;
    let scale = 1.0 + abs_f64(&ax) + abs_f64(&cx2);
    let dabs = abs_f64(&denom);
    let value = Complex::with_val(prec, denom.recip_ref());
    // Roundoff in x grows with |s| log p.
    let rel = ctx.work_eps() * scale * (8.0 + abs_f64(&s) * f.ln_p.to_f64()) / dabs;
    let abs_err = rel * abs_f64(&value);
    Ok(Estimate::new(value, abs_err))
}
