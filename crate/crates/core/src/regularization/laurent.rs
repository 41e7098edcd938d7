use rayon::prelude::*;
use rug::{ops::Pow, Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{abs_f64, AnalyticFn, BigComplex, PrecisionContext};

const START_POINTS: usize = 64;
const MAX_POINTS: usize = 1 << 13;

/// Σ_{m=1}^{order} ρ^{(−m)} (s − pole)^{−m}.
#[derive(Debug, Clone)]
pub struct PrincipalPart {
    pub pole: BigComplex,
    pub order: u32,
    /// ρ^{(−order)}, ..., ρ^{(−1)}
    pub coeffs: Vec<BigComplex>,
    /// Absolute error of each coefficient.
    pub errors: Vec<f64>,
    pub radius: f64,
    pub points: usize,
}

/// f64 summary of a principal part for reports.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipalPartSummary {
    pub re: f64,
    pub im: f64,
    pub order: u32,
    pub residue_abs: f64,
}

impl PrincipalPart {
    pub fn residue(&self) -> Option<&BigComplex> {
        self.coeffs.last()
    }

    /// ρ^{(−m)}
    pub fn coeff(&self, m: u32) -> Option<&BigComplex> {
        if m == 0 || m > self.order {
            return None;
        }
        self.coeffs.get((self.order - m) as usize)
    }

    pub fn eval(&self, s: &BigComplex) -> (BigComplex, f64) {
        let prec = s.prec().0.max(self.pole.prec().0);
        let d = Complex::with_val(prec, s - &self.pole);
        let inv = Complex::with_val(prec, d.recip_ref());
        let inv_abs = abs_f64(&inv);
        let mut pw = inv.clone();
        let mut acc = Complex::with_val(prec, 0);
        let mut err = 0.0;
        let mut scale = inv_abs;
        for (c, e) in self.coeffs.iter().zip(&self.errors).rev() {
            acc += Complex::with_val(prec, c * &pw);
            err += e * scale;
            pw *= &inv;
            scale *= inv_abs;
        }
        (acc, err)
    }

    pub fn summary(&self) -> PrincipalPartSummary {
        PrincipalPartSummary {
            re: self.pole.real().to_f64(),
            im: self.pole.imag().to_f64(),
            order: self.order,
            residue_abs: self.residue().map(abs_f64).unwrap_or(0.0),
        }
    }
}

/// Principal part of `f` at `pole` from trapezoid sums on |s − pole| = radius:
/// ρ^{(−m)} = (1/2πi)∮ f(s)(s − pole)^{m−1} ds.
///
/// `max_order` coefficients are measured; the order is the largest m whose
/// coefficient clears its own error estimate. The sample count doubles until
/// successive estimates agree to 2^{−bits+16} of the coefficient scale.
pub fn contour_principal_part(
    f: &dyn AnalyticFn,
    pole: &BigComplex,
    max_order: u32,
    radius: f64,
    ctx: &PrecisionContext,
) -> Result<PrincipalPart> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Separation(format!("no valid contour radius ({radius})")));
    }
    let prec = ctx.work_prec();
    let two_pi = ctx.pi() * 2u32;
    let r = Float::with_val(prec, radius);
    let node = |j: usize, total: usize| -> BigComplex {
        let theta = Float::with_val(prec, &two_pi * j as u64) / total as u64;
        Complex::with_val(prec, (theta.clone().cos(), theta.sin())) * &r
    };
    let sample = |j: usize, total: usize| -> Result<(BigComplex, f64)> {
        let z = node(j, total);
        let s = Complex::with_val(prec, pole + &z);
        let v = f.eval(&s)?;
        Ok((v.value, v.abs_err))
    };
    let orders = max_order.max(1) as usize;
    let combine = |samples: &[(BigComplex, f64)]| -> (Vec<BigComplex>, f64, f64) {
        let total = samples.len();
        let mut acc = vec![Complex::with_val(prec, 0); orders];
        let mut fmax = 0f64;
        let mut ferr = 0f64;
        for (j, (v, e)) in samples.iter().enumerate() {
            let z = node(j, total);
            let mut zp = Complex::with_val(prec, v * &z);
            for a in acc.iter_mut() {
                *a += &zp;
                zp *= &z;
            }
            fmax = fmax.max(abs_f64(v));
            ferr = ferr.max(*e);
        }
        for a in acc.iter_mut() {
            *a /= total as u64;
        }
        (acc, fmax, ferr)
    };

    let mut total = START_POINTS.max(16 * orders);
    let mut samples: Vec<(BigComplex, f64)> = (0..total)
        .into_par_iter()
        .map(|j| sample(j, total))
        .collect::<Result<_>>()?;
    let (mut prev, _, _) = combine(&samples);
    loop {
        let next_total = 2 * total;
        if next_total > MAX_POINTS {
            return Err(Error::Convergence(format!(
                "principal part at {} did not settle within {MAX_POINTS} points",
                pole.to_string_radix(10, Some(12))
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
        let (cur, fmax, ferr) = combine(&samples);
        let tol_scale = (-(ctx.bits() as f64) + 16.0).exp2();
        let mut settled = true;
        let mut errors = Vec::with_capacity(orders);
        for (m, (a, b)) in cur.iter().zip(&prev).enumerate() {
            let rm = radius.powi(m as i32 + 1);
            let diff = abs_f64(&Complex::with_val(prec, a - b));
            if diff > tol_scale * fmax * rm {
                settled = false;
            }
            errors.push(diff + (ferr + ctx.work_eps() * fmax * 4.0) * rm);
        }
        if settled {
            let mut order = 0usize;
            for (m, (c, e)) in cur.iter().zip(&errors).enumerate() {
                if abs_f64(c) > 64.0 * e {
                    order = m + 1;
                }
            }
            let order = order.max(1);
            return Ok(PrincipalPart {
                pole: pole.clone(),
                order: order as u32,
                coeffs: cur[..order].iter().rev().map(|c| ctx.round(c)).collect(),
                errors: errors[..order].iter().rev().copied().collect(),
                radius,
                points: total,
            });
        }
        prev = cur;
    }
}

/// Residue of Γ(s) at s = −n, (−1)^n / n!.
pub fn gamma_residue(n: u32, prec: u32) -> Float {
    let mut f = Float::with_val(prec, 1);
    for j in 2..=n {
        f *= j;
    }
    let r = f.recip();
    if n % 2 == 1 {
        -r
    } else {
        r
    }
}

/// (2π)^n C^{−n/2}, the archimedean weight of the residue at −n.
pub fn gamma_pole_weight(n: u32, level: u64, prec: u32) -> Float {
    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    let c = Float::with_val(prec, level).sqrt();
    Float::with_val(prec, two_pi / c).pow(n)
}
