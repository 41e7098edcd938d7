//! Upper incomplete gamma Γ(s, a) for complex s and real a > 0.
//!
//! Two regimes: the Legendre continued fraction when a ≥ |s| + 1, and the
//! power series for γ(s, a) combined with Γ(s) otherwise. Either regime falls
//! back to the other if it fails to converge.

use rug::{Complex, Float};

use super::gamma::gamma_at;
use super::precision::{abs_f64, check_finite, BigComplex, BigReal, Estimate, PrecisionContext};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ContinuedFraction,
    Series,
}

/// e^{-a} a^s
fn prefactor(s: &BigComplex, a: &Float, prec: u32) -> BigComplex {
    let ln_a = Float::with_val(prec, a.ln_ref());
    let mut e = Complex::with_val(prec, s * &ln_a);
    e -= a;
    e.exp()
}

fn cf_budget(a: f64, prec: u32) -> usize {
    let l = prec as f64 * std::f64::consts::LN_2;
    (64.0 + l * l / (4.0 * a.max(1e-3)) + 4.0 * prec as f64).min(2.0e6) as usize
}

/// Modified Lentz evaluation of the Legendre continued fraction.
fn continued_fraction(s: &BigComplex, a: &Float, prec: u32) -> Result<(BigComplex, f64)> {
    let eps = (-(prec as f64)).exp2();
    let tiny = Float::with_val(prec, Float::i_exp(1, -(4 * prec as i32)));
    let budget = cf_budget(a.to_f64(), prec);

    let mut b = Complex::with_val(prec, a + Complex::with_val(prec, 1 - s));
    let mut c = Complex::with_val(prec, (Float::with_val(prec, tiny.recip_ref()), 0));
    let mut d = if b.is_zero() {
        Complex::with_val(prec, (Float::with_val(prec, tiny.recip_ref()), 0))
    } else {
        Complex::with_val(prec, b.recip_ref())
    };
    let mut h = d.clone();
    let mut last = f64::INFINITY;
    for i in 1..=budget {
        // a_i = -i (i - s)
        let mut an = Complex::with_val(prec, i as u32 - Complex::with_val(prec, s));
        an *= -(i as i64);
        b += 2u32;
        d = Complex::with_val(prec, &an * &d) + &b;
        if d.is_zero() {
            d = Complex::with_val(prec, (&tiny, 0));
        }
        c = Complex::with_val(prec, &an / &c) + &b;
        if c.is_zero() {
            c = Complex::with_val(prec, (&tiny, 0));
        }
        d.recip_mut();
        let del = Complex::with_val(prec, &d * &c);
        h *= &del;
        let dev = abs_f64(&Complex::with_val(prec, &del - 1u32));
        last = dev;
        if dev < eps {
            let val = prefactor(s, a, prec) * h;
            check_finite(&val, "incomplete gamma")?;
            return Ok((val, 4.0 * eps * (i as f64).sqrt() + dev));
        }
    }
    Err(Error::Convergence(format!(
        "continued fraction for Γ(s, {}) stalled at {last:e} after {budget} terms",
        a.to_f64()
    )))
}

/// Γ(s) - γ(s, a) with the power series for γ.
fn series(s: &BigComplex, a: &Float, prec: u32, pole_bits: u32) -> Result<(BigComplex, f64)> {
    let eps = (-(prec as f64)).exp2();
    let a_f = a.to_f64();
    let s_re = s.real().to_f64();
    let budget = (4.0 * a_f + 4.0 * prec as f64 + 64.0) as usize;

    let mut term = Complex::with_val(prec, s.recip_ref());
    let mut sum = term.clone();
    let mut denom = Complex::with_val(prec, s);
    let mut converged = false;
    let mut n = 0usize;
    while n < budget {
        n += 1;
        denom += 1u32;
        term *= a;
        term /= &denom;
        sum += &term;
        if (n as f64) > a_f - s_re && abs_f64(&term) < eps * abs_f64(&sum) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "power series for γ(s, {a_f}) did not converge in {budget} terms"
        )));
    }
    let lower = prefactor(s, a, prec) * sum;
    let (g, g_rel) = gamma_at(s, prec, pole_bits)?;
    let upper = Complex::with_val(prec, &g - &lower);
    check_finite(&upper, "incomplete gamma")?;
    let abs_err = abs_f64(&g) * (g_rel + eps) + abs_f64(&lower) * eps * (2.0 * n as f64 + 8.0);
    let mag = abs_f64(&upper);
    let rel = if mag == 0.0 { f64::INFINITY } else { abs_err / mag };
    Ok((upper, rel))
}

fn preferred_regime(s: &BigComplex, a: &Float) -> Regime {
    if a.to_f64() >= abs_f64(s) + 1.0 {
        Regime::ContinuedFraction
    } else {
        Regime::Series
    }
}

/// Distance from `s` to the nearest nonpositive integer (infinite if Re s ≥ 1/2).
fn pole_distance(s: &BigComplex) -> f64 {
    let re = s.real().to_f64();
    if re >= 0.5 {
        return f64::INFINITY;
    }
    let n = re.round();
    let d = Complex::with_val(64, s - Float::with_val(64, n));
    abs_f64(&d)
}

/// Γ(s, a) at precision `prec`; returns the value and its relative error.
pub(crate) fn upper_incomplete_gamma_at(
    s: &BigComplex,
    a: &BigReal,
    prec: u32,
    target_rel: f64,
    pole_bits: u32,
) -> Result<(BigComplex, f64, Regime)> {
    check_finite(s, "incomplete gamma argument")?;
    if !(a.is_finite() && *a > 0) {
        return Err(Error::InvalidArgument(format!(
            "Γ(s, a) needs a > 0, got {}",
            a.to_f64()
        )));
    }
    let near_pole = pole_distance(s) < (-((pole_bits) as f64)).exp2();
    let first = if near_pole {
        Regime::ContinuedFraction
    } else {
        preferred_regime(s, a)
    };

    let run = |regime: Regime| -> Result<(BigComplex, f64)> {
        match regime {
            Regime::ContinuedFraction => continued_fraction(s, a, prec),
            Regime::Series => {
                // Cancellation between Γ(s) and γ(s,a) costs bits; retry wider.
                let mut p = prec;
                let mut out = series(s, a, p, pole_bits)?;
                for _ in 0..4 {
                    if out.1 <= target_rel {
                        break;
                    }
                    let lost = (out.1 / target_rel).log2().ceil().max(0.0) as u32 + 16;
                    p += lost;
                    out = series(s, a, p, pole_bits)?;
                }
                Ok((Complex::with_val(prec, &out.0), out.1))
            }
        }
    };

    match run(first) {
        Ok((v, rel)) if rel <= target_rel => Ok((v, rel, first)),
        primary => {
            if near_pole {
                return primary.map(|(v, rel)| (v, rel, first));
            }
            let other = match first {
                Regime::ContinuedFraction => Regime::Series,
                Regime::Series => Regime::ContinuedFraction,
            };
            match (primary, run(other)) {
                (_, Ok((v, rel))) if rel <= target_rel => Ok((v, rel, other)),
                (Ok((v, rel)), Ok((v2, rel2))) => {
                    if rel <= rel2 {
                        Ok((v, rel, first))
                    } else {
                        Ok((v2, rel2, other))
                    }
                }
                (Ok((v, rel)), Err(_)) => Ok((v, rel, first)),
                (Err(_), Ok((v, rel))) => Ok((v, rel, other)),
                (Err(e1), Err(e2)) => Err(Error::Convergence(format!("neither regime converged: {e1}; {e2}"))),
            }
        }
    }
}

/// Γ(s, a) = ∫_a^∞ t^{s-1} e^{-t} dt for real a > 0.
pub fn upper_incomplete_gamma(s: &BigComplex, a: &BigReal, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
    let (val, rel, _) = upper_incomplete_gamma_at(s, a, ctx.work_prec(), ctx.eps(), ctx.bits() / 2)?;
    if rel > ctx.eps() {
        return Err(Error::Precision(format!(
            "Γ(s, a) relative error estimate {rel:e} exceeds 2^-{}",
            ctx.bits()
        )));
    }
    let rounded = ctx.round(&val);
    let abs_err = (rel + ctx.eps()) * abs_f64(&rounded);
    Ok(Estimate::new(rounded, abs_err))
}

/// Smallest m ≥ 0 such that t^{σ-1} < e^{t/2} for every t > m.
///
/// Beyond this point |Γ(s, a)| ≤ 2 e^{-a/2} for Re(s) = σ.
pub fn decay_threshold(sigma: f64) -> f64 {
    let e = sigma - 1.0;
    let h = |t: f64| e * t.ln() - t / 2.0;
    if e == 0.0 {
        return 0.0;
    }
    if e < 0.0 {
        // h decreases from +∞ to -∞; unique root below 1.
        let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return hi;
    }
    // e > 0: h rises to its maximum at t = 2e, then falls.
    if h(2.0 * e) < 0.0 {
        return 0.0;
    }
    let mut lo = 2.0 * e;
    let mut hi = 4.0 * e + 4.0;
    while h(hi) >= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    fn rel_diff(a: &BigComplex, b: &BigComplex) -> f64 {
        abs_f64(&Complex::with_val(a.prec(), a - b)) / abs_f64(b)
    }

    #[test]
    fn exponential_cases() {
        let c = ctx();
        for a in [1.0, 2.0 * std::f64::consts::PI, 0.25, 40.0] {
            let af = c.real(a);
            let g1 = upper_incomplete_gamma(&c.complex(1), &af, &c).unwrap().value;
            let e = Complex::with_val(c.work_prec(), (-af.clone()).exp());
            assert!(rel_diff(&g1, &e) < 4.0 * c.eps(), "a = {a}");

            let g2 = upper_incomplete_gamma(&c.complex(2), &af, &c).unwrap().value;
            let e2 = Complex::with_val(c.work_prec(), (-af.clone()).exp() * (af.clone() + 1u32));
            assert!(rel_diff(&g2, &e2) < 4.0 * c.eps(), "a = {a}");
        }
    }

    #[test]
    fn regimes_agree_on_overlap() {
        let c = ctx();
        let p = c.work_prec();
        let s = c.complex((3.5, -2.0));
        let a = c.real(7.5);
        let (cf, _) = continued_fraction(&s, &a, p).unwrap();
        let (se, _) = series(&s, &a, p, c.bits() / 2).unwrap();
        assert!(rel_diff(&cf, &se) < 1e3 * c.work_eps());
    }

    #[test]
    fn nonpositive_integer_order() {
        // Γ(0, a) = E1(a) is finite; check recurrence Γ(1,a) = 0·Γ(0,a) + e^{-a}.
        // and Γ(0,a) via the other identity Γ(1,a) = a^0 e^{-a} + 0.
        let c = ctx();
        let a = c.real(2.0);
        let g0 = upper_incomplete_gamma(&c.complex(0), &a, &c).unwrap().value;
        // E1(2) = 0.04890051070806111956723983691...
        let e1 = 0.048_900_510_708_061_12_f64;
        assert!((g0.real().to_f64() - e1).abs() < 1e-15);
        assert!(g0.imag().is_zero() || g0.imag().to_f64().abs() < 1e-40);

        // Γ(s+1, a) = s Γ(s, a) + a^s e^{-a} at s = -3
        let s = c.complex(-3);
        let gs = upper_incomplete_gamma(&s, &a, &c).unwrap().value;
        let gs1 = upper_incomplete_gamma(&c.complex(-2), &a, &c).unwrap().value;
        let rhs = Complex::with_val(c.work_prec(), &s * &gs) + prefactor(&s, &a, c.work_prec());
        assert!(rel_diff(&gs1, &rhs) < 1e-50);
    }

    #[test]
    fn small_a_limit() {
        let c = ctx();
        let s = c.complex((2.5, 1.0));
        let a = c.real(Float::i_exp(1, -300));
        let g = upper_incomplete_gamma(&s, &a, &c).unwrap().value;
        let full = super::super::gamma::gamma(&s, &c).unwrap().value;
        assert!(rel_diff(&g, &full) < 1e-50);
    }

    #[test]
    fn rejects_nonpositive_a() {
        let c = ctx();
        assert!(upper_incomplete_gamma(&c.complex(1), &c.real(0), &c).is_err());
        assert!(upper_incomplete_gamma(&c.complex(1), &c.real(-1), &c).is_err());
    }

    #[test]
    fn decay_threshold_definition() {
        for sigma in [-20.0, -3.0, 0.5, 1.0, 1.5, 2.0, 2.36, 3.0, 10.0, 20.0] {
            let m = decay_threshold(sigma);
            for k in 1..200 {
                let t = m + 1e-9 + k as f64 * 0.37;
                assert!((sigma - 1.0) * t.ln() < t / 2.0, "sigma = {sigma}, m = {m}, t = {t}");
            }
        }
        assert_eq!(decay_threshold(2.0), 0.0);
        assert!(decay_threshold(10.0) > 70.0);
    }
}
