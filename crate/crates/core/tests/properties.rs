mod common;

use std::sync::OnceLock;

use common::*;
use lapprox_core::approximation::{certified_cutoff, lambda, tail_bound};
use lapprox_core::arith::{first_primes, is_smooth, nth_prime};
use lapprox_core::eigenform::{complement_series, delta_coefficients, smooth_subseries};
use lapprox_core::euler::{local_factor_eval, truncated_euler_eval, LocalFactor, PoleLattice};
use lapprox_core::numerics::{decay_threshold, gamma, upper_incomplete_gamma};
use lapprox_core::{ApproxConfig, CoefficientTable, EigenformSpec, Mode, PrecisionContext};
use proptest::prelude::*;
use rug::{Complex, Float};

fn ctx() -> &'static PrecisionContext {
    static C: OnceLock<PrecisionContext> = OnceLock::new();
    C.get_or_init(|| PrecisionContext::new(128).unwrap())
}

fn table() -> &'static CoefficientTable {
    static T: OnceLock<CoefficientTable> = OnceLock::new();
    T.get_or_init(|| delta_coefficients(2000).unwrap())
}

fn off_poles(re: f64, im: f64) -> bool {
    im.abs() > 0.01 || re > 0.01 || (re - re.round()).abs() > 0.01
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gamma_recurrence(r in 0.0f64..50.0, th in 0.0f64..std::f64::consts::TAU) {
        let (re, im) = (r * th.cos(), r * th.sin());
        prop_assume!(off_poles(re, im) && off_poles(re + 1.0, im));
        let c = ctx();
        let s = c.complex((re, im));
        let g = gamma(&s, c).unwrap().value;
        let s1 = Complex::with_val(c.work_prec(), &s + 1u32);
        let g1 = gamma(&s1, c).unwrap().value;
        let sg = Complex::with_val(c.work_prec(), &s * &g);
        prop_assert!(rel_diff(&sg, &g1) <= pow2(-(c.bits() as i32) + 4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gamma_splits_into_incomplete_parts(re in 1.0f64..10.0, im in -5.0f64..5.0, a in 0.5f64..10.0) {
        let c = ctx();
        let s = c.complex((re, im));
        let a = c.real(a);
        let upper = upper_incomplete_gamma(&s, &a, c).unwrap().value;
        let lower = lower_oracle(&s, &a, c.bits() + 128);
        let total = Complex::with_val(c.bits() + 128, &upper + &lower);
        let g = gamma(&s, c).unwrap().value;
        prop_assert!(rel_diff(&total, &g) <= pow2(-(c.bits() as i32) + 8));
    }

    #[test]
    fn incomplete_gamma_matches_quadrature(re in -10.0f64..20.0, im in -20.0f64..20.0, a in 0.5f64..40.0) {
        let c = ctx();
        let s = c.complex((re, im));
        let a = c.real(a);
        let lib = upper_incomplete_gamma(&s, &a, c).unwrap().value;
        prop_assert!(rel_diff(&lib, &upper_oracle(&s, &a, c.bits() + 128)) <= pow2(-(c.bits() as i32) + 16));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn incomplete_gamma_decay_bound(sigma in -20.0f64..20.0, im in -50.0f64..50.0, extra in 1.0f64..100.0) {
        let c = ctx();
        let a = decay_threshold(sigma) + extra;
        let v = upper_incomplete_gamma(&c.complex((sigma, im)), &c.real(a), c).unwrap();
        let bound = 2.0 * (-a / 2.0).exp();
        prop_assert!(abs_f(&v.value) <= bound, "{:e} > {:e}", abs_f(&v.value), bound);
    }

    #[test]
    fn raising_precision_keeps_digits(re in -15.0f64..25.0, im in -30.0f64..30.0, a in 1.0f64..30.0) {
        prop_assume!(off_poles(re, im));
        let lo = ctx();
        let hi = lo.raised(64);
        let s = lo.complex((re, im));
        let g_lo = gamma(&s, lo).unwrap();
        let g_hi = gamma(&s, &hi).unwrap();
        prop_assert!(abs_diff(&g_lo.value, &g_hi.value) <= g_lo.abs_err + g_hi.abs_err);
        let a = lo.real(a);
        let u_lo = upper_incomplete_gamma(&s, &a, lo).unwrap();
        let u_hi = upper_incomplete_gamma(&s, &a, &hi).unwrap();
        prop_assert!(abs_diff(&u_lo.value, &u_hi.value) <= u_lo.abs_err + u_hi.abs_err);
    }

    #[test]
    fn masks_partition_coefficients(n_factors in 1usize..12) {
        let t = table();
        let b = smooth_subseries(t, n_factors);
        let c = complement_series(t, n_factors);
        let p_n = nth_prime(n_factors);
        for (i, (bi, ci)) in b.iter().zip(&c).enumerate() {
            let n = i + 1;
            let a = t.get(n);
            if is_smooth(n as u64, p_n) {
                prop_assert!(bi == a && ci.is_zero());
            } else {
                prop_assert!(ci == a && bi.is_zero());
            }
        }
    }

    #[test]
    fn euler_product_is_associative(re in -10.0f64..20.0, im in -40.0f64..40.0, n in 0usize..8) {
        let c = ctx();
        let d = EigenformSpec::delta();
        let s = c.complex((re, im));
        let p = nth_prime(n + 1);
        let f = LocalFactor::from_table(p, &d, table(), c).unwrap();
        let (Ok(lhs), Ok(base), Ok(local)) = (
            truncated_euler_eval(&s, n + 1, &d, table(), c),
            truncated_euler_eval(&s, n, &d, table(), c),
            local_factor_eval(&f, &s, c),
        ) else {
            return Ok(());
        };
        let rhs = Complex::with_val(c.work_prec(), &base.value * &local.value);
        prop_assert!(abs_diff(&lhs.value, &rhs) <= lhs.abs_err + base.abs_err * abs_f(&local.value) + local.abs_err * abs_f(&base.value));
    }

    #[test]
    fn local_factor_is_periodic(re in -10.0f64..20.0, im in -40.0f64..40.0, idx in 0usize..6, shift in -5i32..5) {
        let c = ctx();
        let d = EigenformSpec::delta();
        let p = first_primes(6)[idx];
        let f = LocalFactor::from_table(p, &d, table(), c).unwrap();
        let s = c.complex((re, im));
        let period = Float::with_val(c.work_prec(), c.pi() * 2 * shift) / Float::with_val(c.work_prec(), p).ln();
        let shifted = Complex::with_val(c.work_prec(), &s + Complex::with_val(c.work_prec(), (0, &period)));
        let (Ok(v), Ok(w)) = (local_factor_eval(&f, &s, c), local_factor_eval(&f, &shifted, c)) else {
            return Ok(());
        };
        prop_assert!(abs_diff(&v.value, &w.value) <= 4.0 * (v.abs_err + w.abs_err) + pow2(-(c.bits() as i32) + 16) * abs_f(&v.value));
    }

    #[test]
    fn lattice_points_are_poles(idx in 0usize..10, n in -1000i64..1000) {
        let c = ctx();
        let d = EigenformSpec::delta();
        let p = first_primes(10)[idx];
        let f = LocalFactor::from_table(p, &d, table(), c).unwrap();
        let lattice = PoleLattice::new(&f, c);
        for (j, fam) in lattice.families().iter().enumerate() {
            let s = lattice.point(j, n);
            let x = f.p_pow_neg(&s);
            let one_minus = Complex::with_val(c.work_prec(), 1 - Complex::with_val(c.work_prec(), &fam.root * &x));
            prop_assert!(abs_f(&one_minus) <= pow2(-(c.bits() as i32) + 8));
        }
    }

    #[test]
    fn cutoff_meets_half_target(re in -15.0f64..27.0, im in -50.0f64..50.0, digits in 5i32..60) {
        let d = EigenformSpec::delta();
        let s = ctx().complex((re, im));
        let target = Float::with_val(64, 10f64.powi(-digits));
        let n = certified_cutoff(&s, &d, &target).unwrap();
        let tail = tail_bound(n + 1, &s, &d).unwrap();
        prop_assert!(tail <= Float::with_val(64, &target / 2u32));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn functional_equation_and_conjugation(r in 0.0f64..20.0, th in 0.0f64..std::f64::consts::TAU, n in 0usize..4) {
        let c = ctx();
        let d = EigenformSpec::delta();
        let target = 1e-25;
        let cfg = ApproxConfig::new(target).unwrap().with_factors(n.max(1));
        let mode = if n == 0 { Mode::Full } else { Mode::Approx(n) };
        let s = c.complex((6.0 + r * th.cos(), r * th.sin()));
        let refl = Complex::with_val(c.work_prec(), 12 - Complex::with_val(c.work_prec(), &s));
        let f = lambda(&s, mode, table(), &d, &cfg, c).unwrap();
        let g = lambda(&refl, mode, table(), &d, &cfg, c).unwrap();
        prop_assert!(abs_diff(&f.value, &g.value) <= 4.0 * target);
        let conj = Complex::with_val(c.work_prec(), s.conj_ref());
        let h = lambda(&conj, mode, table(), &d, &cfg, c).unwrap();
        let fc = Complex::with_val(c.work_prec(), f.value.conj_ref());
        prop_assert!(abs_diff(&h.value, &fc) <= 2.0 * target);
    }

    #[test]
    fn satake_roots_are_consistent(idx in 0usize..300) {
        let c = ctx();
        let d = EigenformSpec::delta();
        let p = first_primes(300)[idx];
        let t = delta_coefficients(p as usize).unwrap();
        let f = LocalFactor::from_table(p, &d, &t, c).unwrap();
        let (a1, a2) = f.roots();
        let tol = pow2(-(c.bits() as i32) + 8);
        let prec = c.work_prec();
        let scale = Float::with_val(prec, p).pow(11u32);
        let sum = Complex::with_val(prec, a1 + a2);
        prop_assert!(abs_diff(&sum, f.a_p()) <= tol * scale.to_f64().sqrt());
        let prod = Complex::with_val(prec, a1 * a2);
        prop_assert!(rel_diff(&prod, &Complex::with_val(prec, &scale)) <= tol);
        for a in [a1, a2] {
            let norm = Complex::with_val(prec, a.norm_ref());
            prop_assert!(rel_diff(&norm, &Complex::with_val(prec, &scale)) <= tol);
        }
        prop_assert!(abs_f(f.a_p()) <= 2.0 * scale.to_f64().sqrt());
    }
}

fn abs_f(z: &Complex) -> f64 {
    Float::with_val(64, z.abs_ref()).to_f64()
}

use rug::ops::Pow;
