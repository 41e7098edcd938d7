use std::sync::Mutex;

use rug::{Complex, Float};

use crate::approximation::{lambda_full, ApproxConfig};
use crate::eigenform::{CoefficientTable, EigenformSpec};
use crate::error::{Error, Result};
use crate::euler::EulerProduct;
use crate::numerics::quad::integrate;
use crate::numerics::{ln_gamma, BigComplex, Estimate, PrecisionContext};

/// Upper bound for ζ(x), x > 1.
fn zeta_upper(x: f64) -> f64 {
    let m = 32u32;
    let head: f64 = (1..m).map(|n| (n as f64).powf(-x)).sum();
    let mf = m as f64;
    head + mf.powf(-x) + mf.powf(1.0 - x) / (x - 1.0)
}

fn ln_abs_g(sigma: f64, t: f64, spec: &EigenformSpec) -> f64 {
    let c = PrecisionContext::with_guard(64, 16).expect("valid context");
    let lg = ln_gamma(&c.complex((sigma, t)), &c)
        .map(|e| e.value.real().to_f64())
        .unwrap_or(f64::INFINITY);
    lg + sigma * (0.5 * (spec.level() as f64).ln() - (2.0 * std::f64::consts::PI).ln())
}

/// Bound on the part of the integral with |t| > x, from
/// |Λ − Λ_N^Euler| ≤ 2ζ(σ − (k−1)/2)²|g| and |kernel| ≤ 2/(|t| − |Im s0|).
fn tail_beyond(x: f64, s0: (f64, f64), sigma: f64, spec: &EigenformSpec) -> f64 {
    let k = spec.weight() as f64;
    let z = zeta_upper(sigma - (k - 1.0) / 2.0);
    let scale = 2.0 * 2.0 * z * z / (2.0 * std::f64::consts::PI);
    let mut total = 0.0;
    let mut j = 0.0;
    loop {
        let t = x + j;
        let term = scale * ln_abs_g(sigma, t, spec).exp() * 2.0 / (t - s0.1.abs());
        total += term;
        if term <= 1e-6 * total || j > 1e4 {
            break;
        }
        j += 1.0;
    }
    total
}

/// Smallest integer ordinate beyond which the integrand contributes ≤ tol.
pub fn integral_extent(s0: &BigComplex, sigma: f64, spec: &EigenformSpec, tol: f64) -> f64 {
    let p = (s0.real().to_f64(), s0.imag().to_f64());
    let mut x = p.1.abs().ceil() + 2.0;
    while tail_beyond(x, p, sigma, spec) > tol && x < 1e5 {
        x += 1.0;
    }
    x
}

/// (1/2πi)∫_{Re s = σ} (Λ − Λ_N^Euler)(s) (1/(s − s0) + (−1)^P/(s − k + s0)) ds,
/// which equals Λ(s0) − Λ_N(s0).
///
/// Λ comes from the series engine, Λ_N^Euler from the Euler product. The
/// segment is [σ − iX, σ + iX] with X = `quad_extent` or, if absent, the
/// extent at which the integrand tail drops below a quarter of the target.
#[allow(clippy::too_many_arguments)]
pub fn error_integral(
    s0: &BigComplex,
    sigma: f64,
    n_factors: usize,
    quad_extent: Option<f64>,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    cfg: &ApproxConfig,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    let k = spec.weight() as f64;
    let re0 = s0.real().to_f64();
    let floor = re0.max(k - re0).max((k + 1.0) / 2.0);
    if !(sigma > floor) {
        return Err(Error::Regime(format!("σ = {sigma} must exceed {floor}")));
    }
    let tol = cfg.target().to_f64();
    let extent = match quad_extent {
        Some(x) if x > 0.0 => x,
        Some(x) => {
            return Err(Error::InvalidArgument(format!(
                "quadrature extent {x} must be positive"
            )))
        }
        None => integral_extent(s0, sigma, spec, tol / 4.0),
    };
    let tail = tail_beyond(extent, (re0, s0.imag().to_f64()), sigma, spec);

    let d = sigma - re0.max(k - re0);
    let kernel_mass = 4.0 * (extent / d).asinh() / (2.0 * std::f64::consts::PI);
    let inner = cfg.retargeted(Float::with_val(64, tol / 4.0 / kernel_mass));
    let euler = EulerProduct::new(spec, table, n_factors, ctx)?;
    let prec = ctx.work_prec();
    let ks0 = Complex::with_val(prec, spec.weight() - s0);
    let sample_err = Mutex::new(0f64);
    let two_pi = Float::with_val(prec, ctx.pi() * 2u32);

    let f = |t: &Float| -> Result<BigComplex> {
        let s = Complex::with_val(prec, (Float::with_val(prec, sigma), t));
        let full = lambda_full(&s, table, spec, &inner, ctx)?;
        let e = euler.eval(&s, ctx)?;
        let a = Complex::with_val(prec, &s - s0).recip();
        let b = Complex::with_val(prec, &s - &ks0).recip();
        let kern = if spec.sign() == 1 { a + b } else { a - b };
        let diff = Complex::with_val(prec, &full.value - &e.value);
        {
            let mut m = sample_err.lock().expect("sample error");
            *m = m.max(full.abs_err + e.abs_err);
        }
        Ok(Complex::with_val(prec, diff * kern) / &two_pi)
    };
    let lo = Float::with_val(prec, -extent);
    let hi = Float::with_val(prec, extent);
    let q = integrate(&f, &lo, &hi, tol / 4.0, ctx)?;
    let emax = *sample_err.lock().expect("sample error");
    Ok(Estimate::new(q.value, q.abs_err + tail + emax * kernel_mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximation::lambda_N;
    use crate::eigenform::delta_coefficients;
    use crate::numerics::abs_f64;

    #[test]
    fn zeta_bound_is_above() {
        // ζ(2) = π²/6, ζ(4) = π⁴/90
        let pi = std::f64::consts::PI;
        assert!(zeta_upper(2.0) >= pi * pi / 6.0 && zeta_upper(2.0) < pi * pi / 6.0 + 1e-3);
        assert!(zeta_upper(4.0) >= pi.powi(4) / 90.0);
    }

    #[test]
    fn regime_is_checked() {
        let c = PrecisionContext::new(96).unwrap();
        let t = delta_coefficients(100).unwrap();
        let cfg = ApproxConfig::new(1e-15).unwrap();
        let r = error_integral(&c.complex(6), 6.4, 2, None, &t, &EigenformSpec::delta(), &cfg, &c);
        assert!(matches!(r, Err(Error::Regime(_))));
    }

    #[test]
    fn matches_series_difference_and_is_sigma_independent() {
        let c = PrecisionContext::new(96).unwrap();
        let d = EigenformSpec::delta();
        let t = delta_coefficients(200).unwrap();
        let cfg = ApproxConfig::new(1e-15).unwrap().with_factors(2);
        let s0 = c.complex(6);
        let direct = {
            let a = lambda_full(&s0, &t, &d, &cfg, &c).unwrap().value;
            let b = lambda_N(&s0, &t, &d, &cfg, &c).unwrap().value;
            Complex::with_val(c.work_prec(), a - b)
        };
        let i8 = error_integral(&s0, 8.0, 2, None, &t, &d, &cfg, &c).unwrap();
        let i9 = error_integral(&s0, 9.0, 2, None, &t, &d, &cfg, &c).unwrap();
        let d8 = abs_f64(&Complex::with_val(c.work_prec(), &i8.value - &direct));
        let d89 = abs_f64(&Complex::with_val(c.work_prec(), &i8.value - &i9.value));
        assert!(d8 <= i8.abs_err + 2e-15, "{d8:e} (err {:e})", i8.abs_err);
        assert!(d89 <= i8.abs_err + i9.abs_err);
        assert!(i8.abs_err < 1e-14);
    }
}
