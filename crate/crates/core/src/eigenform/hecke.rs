use rug::{ops::Pow, Complex, Float, Integer};

use super::coeffs::CoefficientTable;
use super::spec::EigenformSpec;
use crate::arith::{gcd, is_prime, primes_up_to};
use crate::numerics::abs_f64;

/// Violations of the Hecke relations found in a coefficient table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HeckeReport {
    /// (m, n) coprime with a_{mn} ≠ a_m a_n.
    pub multiplicative: Vec<(u64, u64)>,
    /// (p, r) with a_{p^{r+1}} ≠ a_p a_{p^r} − χ(p) p^{k−1} a_{p^{r−1}}.
    pub prime_power: Vec<(u64, u32)>,
    /// Primes with |a_p| > 2 p^{(k−1)/2}.
    pub petersson: Vec<u64>,
}

impl HeckeReport {
    pub fn is_empty(&self) -> bool {
        self.multiplicative.is_empty() && self.prime_power.is_empty() && self.petersson.is_empty()
    }
}

/// Relative tolerance applied to tables that are not exact integers.
pub const DECIMAL_REL_TOL: f64 = 1e-20;

const CHECK_PREC: u32 = 256;

/// Checks multiplicativity, the prime-power recursion and the Petersson
/// bound on every index inside the table. Integer data with an integral
/// character is checked exactly.
pub fn hecke_consistency_check(table: &CoefficientTable, spec: &EigenformSpec) -> HeckeReport {
    let n_max = table.n_max() as u64;
    let k1 = spec.weight() - 1;
    let exact_chi = (0..spec.level()).all(|r| spec.chi().exact_value(r).is_some());
    let ints = if exact_chi { table.integers() } else { None };
    let mut report = HeckeReport::default();

    match &ints {
        Some(a) => {
            let at = |n: u64| &a[n as usize - 1];
            for m in 2..=n_max {
                for n in (m + 1)..=(n_max / m) {
                    if gcd(m, n) == 1 && *at(m * n) != Integer::from(at(m) * at(n)) {
                        report.multiplicative.push((m, n));
                    }
                }
            }
            for p in primes_up_to(n_max as usize) {
                let chi = spec.chi().exact_value(p).expect("integral character");
                let tw = Integer::from(p).pow(k1) * chi;
                let (mut prev, mut cur, mut r, mut q) = (Integer::from(1), at(p).clone(), 1u32, p);
                while let Some(next) = q.checked_mul(p).filter(|&x| x <= n_max) {
                    let expect = Integer::from(at(p) * &cur) - Integer::from(&tw * &prev);
                    if *at(next) != expect {
                        report.prime_power.push((p, r));
                    }
                    prev = cur;
                    cur = at(next).clone();
                    q = next;
                    r += 1;
                }
                // a_p² ≤ 4 p^{k−1}
                if Integer::from(at(p).square_ref()) > Integer::from(p).pow(k1) * 4u32 {
                    report.petersson.push(p);
                }
            }
        }
        None => {
            let a = table.to_complex(CHECK_PREC);
            let at = |n: u64| &a[n as usize - 1];
            let close = |x: &Complex, y: &Complex| {
                let d = abs_f64(&Complex::with_val(CHECK_PREC, x - y));
                d <= DECIMAL_REL_TOL * abs_f64(x).max(abs_f64(y)).max(1.0)
            };
            for m in 2..=n_max {
                for n in (m + 1)..=(n_max / m) {
                    if gcd(m, n) == 1 && !close(at(m * n), &Complex::with_val(CHECK_PREC, at(m) * at(n))) {
                        report.multiplicative.push((m, n));
                    }
                }
            }
            for p in primes_up_to(n_max as usize) {
                let chi = spec.chi().complex(p, CHECK_PREC);
                let pk = Float::with_val(CHECK_PREC, Float::u_pow_u(p as u32, k1));
                let tw = Complex::with_val(CHECK_PREC, &chi * &pk);
                let (mut prev, mut cur, mut r, mut q) = (Complex::with_val(CHECK_PREC, 1), at(p).clone(), 1u32, p);
                while let Some(next) = q.checked_mul(p).filter(|&x| x <= n_max) {
                    let expect =
                        Complex::with_val(CHECK_PREC, at(p) * &cur) - Complex::with_val(CHECK_PREC, &tw * &prev);
                    if !close(at(next), &expect) {
                        report.prime_power.push((p, r));
                    }
                    prev = cur;
                    cur = at(next).clone();
                    q = next;
                    r += 1;
                }
                let bound = 2.0 * (p as f64).powf(k1 as f64 / 2.0);
                if abs_f64(at(p)) > bound * (1.0 + DECIMAL_REL_TOL) {
                    report.petersson.push(p);
                }
            }
        }
    }
    debug_assert!(report.petersson.iter().all(|&p| is_prime(p)));
    report
}
