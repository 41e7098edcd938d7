//! Independent oracles shared by the integration tests.
//!
//! Quadrature here is double-exponential (exp-sinh on half lines, tanh-sinh on
//! finite intervals) with a step-halving self check, entirely separate from the
//! library's special-function code.

#![allow(dead_code)]

use rug::ops::Pow;
use rug::{Complex, Float, Integer};

pub struct Quadrature {
    pub value: Complex,
    /// |S(h) − S(h/2)|
    pub step_change: f64,
}

fn trapezoid(f: &dyn Fn(&Float) -> Complex, lo: f64, hi: f64, h: f64, prec: u32, offset: f64) -> Complex {
    let mut acc = Complex::new(prec);
    let mut u = lo + offset;
    while u <= hi {
        acc += f(&Float::with_val(prec, u));
        u += h;
    }
    acc
}

fn halving(f: &dyn Fn(&Float) -> Complex, lo: f64, hi: f64, h: f64, prec: u32) -> Quadrature {
    let coarse = trapezoid(f, lo, hi, h, prec, 0.0);
    let odd = trapezoid(f, lo, hi, h, prec, h / 2.0);
    let fine = Complex::with_val(prec, &coarse + &odd) * (h / 2.0);
    let coarse = coarse * h;
    let step_change = Float::with_val(64, Complex::with_val(prec, &fine - &coarse).abs_ref()).to_f64();
    Quadrature {
        value: fine,
        step_change,
    }
}

/// ∫_a^∞ f(t) dt for f decaying at least like e^{−t}, with t = a + exp(u − e^{−u}).
pub fn half_line(f: impl Fn(&Float) -> Complex, a: &Float, h: f64, prec: u32) -> Quadrature {
    let g = |u: &Float| {
        let e = Float::with_val(prec, -u).exp();
        let x = Float::with_val(prec, u - &e).exp();
        let jac = Float::with_val(prec, &x * Float::with_val(prec, 1 + &e));
        let t = Float::with_val(prec, a + &x);
        f(&t) * jac
    };
    halving(&g, -5.5, 7.5, h, prec)
}

/// ∫_0^a f(t) dt with t = a / (1 + exp(−π sinh u)).
pub fn interval(f: impl Fn(&Float) -> Complex, a: &Float, h: f64, prec: u32) -> Quadrature {
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let g = |u: &Float| {
        let w = Float::with_val(prec, &pi * Float::with_val(prec, u.sinh_ref()));
        let e = Float::with_val(prec, -&w).exp();
        let denom = Float::with_val(prec, 1 + &e);
        let t = Float::with_val(prec, a / &denom);
        let jac = Float::with_val(prec, a * &e) * &pi * Float::with_val(prec, u.cosh_ref())
            / Float::with_val(prec, &denom * &denom);
        if t.is_zero() || jac.is_zero() {
            return Complex::new(prec);
        }
        f(&t) * jac
    };
    halving(&g, -5.2, 5.2, h, prec)
}

/// t^{s−1} e^{−t}
pub fn gamma_integrand(s: &Complex, prec: u32) -> impl Fn(&Float) -> Complex + '_ {
    move |t: &Float| {
        let lt = Complex::with_val(prec, Float::with_val(prec, t.ln_ref()));
        let e = Complex::with_val(prec, (s - Complex::with_val(prec, (1, 0))) * lt) - Complex::with_val(prec, t);
        e.exp()
    }
}

fn check(q: &Quadrature, scale: f64, rel: f64, what: &str) {
    assert!(
        q.step_change <= rel * scale,
        "{what}: quadrature oracle did not settle ({:e} vs {:e})",
        q.step_change,
        rel * scale
    );
}

/// Γ(s) = ∫_0^∞ t^{s+m−1} e^{−t} dt / (s(s+1)…(s+m−1)) with Re(s+m) ≥ 20.
pub fn gamma_oracle(s: &Complex, prec: u32) -> Complex {
    let m = (20.0 - s.real().to_f64()).ceil().max(0.0) as u32;
    let shifted = Complex::with_val(prec, s + m);
    let q = half_line(gamma_integrand(&shifted, prec), &Float::new(prec), 1.0 / 256.0, prec);
    let scale = Float::with_val(64, q.value.abs_ref()).to_f64();
    check(&q, scale, (-(prec as f64) + 64.0).exp2(), "gamma");
    let mut denom = Complex::with_val(prec, (1, 0));
    for j in 0..m {
        denom *= Complex::with_val(prec, s + j);
    }
    q.value / denom
}

/// Γ(s, a) = ∫_a^∞ t^{s−1} e^{−t} dt.
pub fn upper_oracle(s: &Complex, a: &Float, prec: u32) -> Complex {
    let q = half_line(gamma_integrand(s, prec), a, 1.0 / 256.0, prec);
    let scale = Float::with_val(64, q.value.abs_ref()).to_f64();
    check(&q, scale, (-(prec as f64) + 64.0).exp2(), "upper incomplete gamma");
    q.value
}

/// γ(s, a) = ∫_0^a t^{s−1} e^{−t} dt for Re s ≥ 1.
pub fn lower_oracle(s: &Complex, a: &Float, prec: u32) -> Complex {
    let q = interval(gamma_integrand(s, prec), a, 1.0 / 512.0, prec);
    let scale = Float::with_val(64, q.value.abs_ref()).to_f64();
    check(&q, scale, (-(prec as f64) + 64.0).exp2(), "lower incomplete gamma");
    q.value
}

/// ∫_1^∞ (t^{s−1} + (−1)^P t^{k−1−s}) e^{−2πnt/√C} dt.
pub fn series_term_oracle(s: &Complex, n: u64, weight: u32, level: u64, sign: i32, prec: u32) -> Complex {
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let rate = Float::with_val(prec, 2 * pi * n) / Float::with_val(prec, level).sqrt();
    let reflected = Complex::with_val(prec, weight - Complex::with_val(prec, s));
    let f = |t: &Float| {
        let lt = Complex::with_val(prec, Float::with_val(prec, t.ln_ref()));
        let one = Complex::with_val(prec, (1, 0));
        let a = Complex::with_val(prec, Complex::with_val(prec, s - &one) * &lt).exp();
        let b = Complex::with_val(prec, Complex::with_val(prec, &reflected - &one) * &lt).exp() * sign;
        (a + b) * Float::with_val(prec, -Float::with_val(prec, &rate * t)).exp()
    };
    let q = half_line(f, &Float::with_val(prec, 1), 1.0 / 256.0, prec);
    let scale = Float::with_val(64, q.value.abs_ref()).to_f64();
    check(&q, scale, (-(prec as f64) + 64.0).exp2(), "series term");
    q.value
}

/// Coefficients of q∏(1−q^m)^24 up to q^n by plain polynomial products.
pub fn tau_brute_force(n: usize) -> Vec<Integer> {
    let mut eta = vec![Integer::ZERO; n];
    eta[0] = Integer::from(1);
    for m in 1..n {
        for j in (m..n).rev() {
            let prev = eta[j - m].clone();
            eta[j] -= prev;
        }
    }
    let mut power = vec![Integer::ZERO; n];
    power[0] = Integer::from(1);
    for _ in 0..24 {
        let mut next = vec![Integer::ZERO; n];
        for (i, a) in power.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, b) in eta.iter().enumerate().take(n - i) {
                next[i + j] += Integer::from(a * b);
            }
        }
        power = next;
    }
    // q · (…): τ(j+1) = power[j]
    power
}

pub fn rel_diff(a: &Complex, b: &Complex) -> f64 {
    let prec = a.prec().0.max(b.prec().0);
    let d = Float::with_val(64, Complex::with_val(prec, a - b).abs_ref()).to_f64();
    let m = Float::with_val(64, b.abs_ref()).to_f64();
    if m == 0.0 {
        d
    } else {
        d / m
    }
}

pub fn abs_diff(a: &Complex, b: &Complex) -> f64 {
    let prec = a.prec().0.max(b.prec().0);
    Float::with_val(64, Complex::with_val(prec, a - b).abs_ref()).to_f64()
}

pub fn pow2(e: i32) -> f64 {
    2f64.pow(e)
}
