//! Complex Γ by argument shift, Stirling's series and reflection.

use std::sync::{Mutex, OnceLock};

use rug::{Complex, Float, Integer, Rational};

use super::precision::{abs_f64, check_finite, BigComplex, Estimate, PrecisionContext};
use crate::error::{Error, Result};

/// Even-index Bernoulli numbers B_0, B_2, B_4, ... grown on demand.
fn bernoulli_even(count: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut all = cache.lock().expect("bernoulli cache poisoned");
    if all.len() < count {
        // Full table B_0..B_m via sum_{j<=m} C(m+1, j) B_j = 0.
        let top = 2 * count;
        let mut b: Vec<Rational> = Vec::with_capacity(top + 1);
        b.push(Rational::from(1));
        for m in 1..=top {
            if m > 1 && m % 2 == 1 {
                b.push(Rational::new());
                continue;
            }
            let mut acc = Rational::new();
            let mut binom = Integer::from(1);
            for (j, bj) in b.iter().enumerate() {
                // binom = C(m+1, j)
                if !bj.is_zero() {
                    acc += Rational::from(&binom * bj.numer()) / bj.denom().clone();
                }
                binom *= (m + 1 - j) as u32;
                binom /= (j + 1) as u32;
            }
            b.push(-acc / Integer::from(m + 1));
        }
        *all = b.into_iter().step_by(2).collect();
    }
    all[..count].to_vec()
}

/// Nearest nonpositive integer to `s` if it lies within 2^{-tol_bits}.
fn near_nonpositive_integer(s: &BigComplex, tol_bits: u32) -> Option<i64> {
    let re = s.real().to_f64();
    if !(re < 0.5) {
        return None;
    }
    let n = re.round();
    let prec = s.prec().0;
    let d = Complex::with_val(prec, s - Float::with_val(prec, n));
    let dist = Float::with_val(64, d.abs_ref());
    let tol = Float::with_val(64, Float::i_exp(1, -(tol_bits as i32)));
    if dist < tol {
        Some(n as i64)
    } else {
        None
    }
}

/// Stirling's series for ln Γ(z), Re(z) ≥ 1/2 after shifting.
/// Returns (value, absolute error of the logarithm).
fn ln_gamma_shifted(s: &BigComplex, prec: u32) -> Result<(BigComplex, f64)> {
    let eps = (-(prec as f64)).exp2();
    // 2π|z| ≳ prec·ln 2 keeps the optimal truncation below 2^{-prec}.
    let radius = 0.12 * prec as f64 + 4.0;
    let s_abs = abs_f64(s);
    let s_re = s.real().to_f64();
    let shift = if s_abs < radius {
        (radius - s_re).ceil().max(0.0) as u32
    } else {
        0
    };

    let mut z = Complex::with_val(prec, s);
    let mut prod = Complex::with_val(prec, 1);
    for _ in 0..shift {
        prod *= &z;
        z += 1;
    }

    let ln_z = Complex::with_val(prec, z.ln_ref());
    let half = Float::with_val(prec, 0.5);
    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    let mut lg = Complex::with_val(prec, &z - &half) * &ln_z;
    lg -= &z;
    lg += Float::with_val(prec, two_pi.ln()) / 2u32;

    let z_inv = Complex::with_val(prec, z.recip_ref());
    let z_inv2 = Complex::with_val(prec, z_inv.square_ref());
    let mut zpow = z_inv;
    let z_abs = abs_f64(&z);
    let max_terms = (std::f64::consts::PI * z_abs).floor().max(2.0) as usize;

    let scale = abs_f64(&lg).max(1.0);
    let mut err = f64::INFINITY;
    let mut count = 16usize;
    let mut j = 1usize;
    'outer: loop {
        let bern = bernoulli_even(count + 1);
        while j < bern.len() {
            let b = &bern[j];
            let denom = Integer::from((2 * j) * (2 * j - 1));
            let coeff = Float::with_val(prec, b) / Float::with_val(prec, &denom);
            let term = Complex::with_val(prec, &zpow * &coeff);
            let t_abs = abs_f64(&term);
            if t_abs < eps * scale {
                // Remainder is bounded by twice the first omitted term for Re z > 0.
                err = 2.0 * t_abs;
                break 'outer;
            }
            lg += &term;
            zpow *= &z_inv2;
            j += 1;
            if j > max_terms {
                break 'outer;
            }
        }
        count *= 2;
    }
    if !err.is_finite() {
        return Err(Error::Precision(format!(
            "Stirling series did not reach 2^-{prec} at |z| = {z_abs:.3}"
        )));
    }

    if shift > 0 {
        lg -= prod.ln();
    }
    let round = eps * (scale + shift as f64 + 8.0);
    Ok((lg, err + round))
}

/// Γ(s) at precision `prec`, with relative error. Rejects points within
/// 2^{-pole_bits} of a pole.
pub(crate) fn gamma_at(s: &BigComplex, prec: u32, pole_bits: u32) -> Result<(BigComplex, f64)> {
    check_finite(s, "gamma argument")?;
    if let Some(n) = near_nonpositive_integer(s, pole_bits) {
        return Err(Error::Pole(format!("Γ has a pole at s = {n}")));
    }
    let eps = (-(prec as f64)).exp2();
    let s = Complex::with_val(prec, s);
    if s.real().to_f64() < 0.5 {
        // Γ(s) = π / (sin(πs) Γ(1-s))
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        let one_minus = Complex::with_val(prec, 1 - &s);
        let (g1, rel1) = gamma_at(&one_minus, prec, pole_bits)?;
        let pis = Complex::with_val(prec, &s * &pi);
        let sin = Complex::with_val(prec, pis.sin_ref());
        let cos = Complex::with_val(prec, pis.cos_ref());
        let cot = abs_f64(&cos) / abs_f64(&sin);
        let rel_sin = eps * (abs_f64(&pis) + 1.0) * cot.max(1.0);
        let val = Complex::with_val(prec, pi / (sin * g1));
        check_finite(&val, "gamma")?;
        return Ok((val, rel1 + rel_sin + 4.0 * eps));
    }
    let (lg, lerr) = ln_gamma_shifted(&s, prec)?;
    let val = lg.exp();
    check_finite(&val, "gamma")?;
    // |Δ exp(x)| / exp(x) ≈ |Δx| for small errors.
    Ok((val, lerr * 1.01 + 2.0 * eps))
}

/// Γ(s) with a relative error at most 2^{-bits}.
pub fn gamma(s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
    let (val, rel) = gamma_at(s, ctx.work_prec(), ctx.bits() / 2)?;
    if rel > ctx.eps() {
        return Err(Error::Precision(format!(
            "Γ relative error estimate {rel:e} exceeds 2^-{}",
            ctx.bits()
        )));
    }
    let rounded = ctx.round(&val);
    let abs_err = (rel + ctx.eps()) * abs_f64(&rounded);
    Ok(Estimate::new(rounded, abs_err))
}

/// ln Γ(s) on the principal sheet of the Stirling expansion, for Re(s) ≥ 1/2.
/// Used where |Γ| under- or overflows an f64.
pub fn ln_gamma(s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
    if s.real().to_f64() < 0.5 {
        return Err(Error::InvalidArgument(
            "ln_gamma is provided for Re(s) >= 1/2 only".into(),
        ));
    }
    let (lg, err) = ln_gamma_shifted(s, ctx.work_prec())?;
    Ok(Estimate::new(ctx.round(&lg), err + ctx.eps() * abs_f64(&lg)))
}
