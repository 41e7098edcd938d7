mod common;

use common::*;
use lapprox_core::approximation::{
    first_term_bound, lambda_full, lambda_term, regime_start, tail_bound, z_function, ApproxConfig, Mode,
};
use lapprox_core::eigenform::{delta_coefficients, load_coefficients, write_coefficients, EigenformSpec};
use lapprox_core::numerics::{gamma, upper_incomplete_gamma, PrecisionContext};
use rug::{Complex, Float};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(128).unwrap()
}

#[test]
fn gamma_near_first_zero_ordinate() {
    let c = ctx();
    let s = c.complex((6.0, 9.2223794));
    let lib = gamma(&s, &c).unwrap();
    let q = gamma_oracle(&s, c.bits() + 128);
    assert!(rel_diff(&lib.value, &q) <= pow2(-(c.bits() as i32) + 16));
}

#[test]
fn incomplete_gamma_half_one() {
    let c = ctx();
    let s = c.complex((0.5, 0.0));
    let a = c.real(1);
    let lib = upper_incomplete_gamma(&s, &a, &c).unwrap();
    let q = upper_oracle(&s, &a, c.bits() + 128);
    assert!(rel_diff(&lib.value, &q) <= pow2(-(c.bits() as i32) + 16));
    // erfc(1)·√π
    let v = lib.value.real().to_f64();
    assert!((v - 0.278_805_585_280_661_4).abs() < 1e-15, "{v}");
}

#[test]
fn series_term_is_the_half_line_integral() {
    let c = ctx();
    let d = EigenformSpec::delta();
    for (re, im, n) in [(6.0, 0.0, 1u64), (6.0, 0.0, 3), (2.5, 7.0, 2), (9.0, -4.0, 1)] {
        let s = c.complex((re, im));
        let lib = lambda_term(&s, n as usize, &d, &c).unwrap();
        let q = series_term_oracle(&s, n, 12, 1, 1, c.bits() + 128);
        assert!(
            rel_diff(&lib.value, &q) <= pow2(-(c.bits() as i32) + 16),
            "s = {re}+{im}i, n = {n}"
        );
    }
}

#[test]
fn tau_matches_brute_force_expansion() {
    let brute = tau_brute_force(100);
    let first: Vec<i64> = brute[..6].iter().map(|x| x.to_i64().unwrap()).collect();
    assert_eq!(first, [1, -24, 252, -1472, 4830, -6048]);
    assert_eq!(brute[5], Integer::from(&brute[1] * &brute[2]));
    let lib = delta_coefficients(100).unwrap().integers().unwrap();
    assert_eq!(lib, brute);
}

#[test]
fn coefficient_file_round_trip() {
    let d = EigenformSpec::delta();
    let t = delta_coefficients(500).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("delta.txt");
    write_coefficients(&p, &t, &d).unwrap();
    assert_eq!(load_coefficients(&p, &d).unwrap().integers(), t.integers());
}

#[test]
fn tail_bound_dominates_partial_sums() {
    let c = ctx();
    let d = EigenformSpec::delta();
    let table = delta_coefficients(1100).unwrap();
    let s = c.complex((6.0, 0.0));
    assert!(matches!(tail_bound(5, &s, &d), Err(lapprox_core::Error::Regime(_))));
    for n_start in [6usize, 7, 10, 25] {
        let mut acc = Complex::new(c.work_prec());
        for n in n_start..=n_start + 1000 {
            let a = table.get(n).to_complex(c.work_prec());
            acc += a * lambda_term(&s, n, &d, &c).unwrap().value;
        }
        let bound = tail_bound(n_start, &s, &d).unwrap();
        assert!(Float::with_val(64, acc.abs_ref()) <= bound, "n_start = {n_start}");
    }
}

#[test]
fn first_term_bound_dominates_first_neglected_term() {
    let c = ctx();
    let d = EigenformSpec::delta();
    let table = delta_coefficients(40).unwrap();
    let s = c.complex((6.0, 0.0));
    let primes = [3usize, 5, 7, 11, 13, 17, 19, 23, 29, 31];
    for (n, &p) in (1..=10).zip(&primes) {
        let a = table.get(p).to_complex(c.work_prec());
        let term = a * lambda_term(&s, p, &d, &c).unwrap().value;
        let bound = match first_term_bound(n, &s, &d) {
            Err(lapprox_core::Error::Regime(_)) => {
                assert!(p < regime_start(6.0, &d), "N = {n}");
                continue;
            }
            other => other.unwrap(),
        };
        assert!(Float::with_val(64, term.abs_ref()) <= bound, "N = {n}");
    }
}

#[test]
fn z_at_zero_is_normalized_lambda_at_centre() {
    let c = ctx();
    let d = EigenformSpec::delta();
    let table = delta_coefficients(200).unwrap();
    let cfg = ApproxConfig::new(1e-30).unwrap();
    let z = z_function(&c.real(0), Mode::Full, &table, &d, &cfg, &c).unwrap();
    let l = lambda_full(&c.complex((6.0, 0.0)), &table, &d, &cfg, &c).unwrap();
    // g(6) = 5!/(2π)^6
    let two_pi: Float = Float::with_val(c.work_prec(), rug::float::Constant::Pi) * 2;
    let g6: Float = Float::with_val(c.work_prec(), 120) / two_pi.pow(6u32);
    assert!(*l.value.real() > 0);
    let expected = Float::with_val(c.work_prec(), l.value.real() / &g6);
    let diff = Float::with_val(64, &z.value - &expected).abs().to_f64();
    assert!(diff <= z.abs_err + 1e-30 / g6.to_f64(), "{diff:e}");
}

use rug::ops::Pow;
use rug::Integer;
