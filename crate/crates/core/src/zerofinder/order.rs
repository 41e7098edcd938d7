use rug::{Complex, Float};

use super::refine::ACCEPTANCE_FACTOR;
use super::scan::Scan;
use super::ZSource;
use crate::approximation::derivative;
use crate::error::{Error, Result};
use crate::euler::GammaFactor;
use crate::numerics::{abs_f64, cauchy_derivative, AnalyticFn, BigComplex, BigReal, Estimate, PrecisionContext};

/// A derivative counts as nonzero once it exceeds this multiple of its noise.
const SIGNAL_FACTOR: f64 = 1e6;

/// Order of a zero from f(s0), f'(s0), ..., f^{(M)}(s0).
///
/// The noise of f^{(j)} is its evaluation error plus |f^{(j+1)}|·delta, the
/// drift caused by s0 being known only to within delta. A derivative below
/// ACCEPTANCE_FACTOR × noise is zero, one above SIGNAL_FACTOR × noise is
/// not, anything between is ambiguous.
pub fn classify_from_derivatives(derivs: &[Estimate<BigComplex>], delta: f64) -> Result<u32> {
    for (j, d) in derivs.iter().enumerate() {
        let drift = derivs.get(j + 1).map(|n| abs_f64(&n.value) * delta).unwrap_or(0.0);
        let noise = d.abs_err + drift;
        let mag = abs_f64(&d.value);
        if mag > SIGNAL_FACTOR * noise {
            if j == 0 {
                return Err(Error::InvalidArgument(format!(
                    "value {mag:e} is far above its noise {noise:e}; not a zero"
                )));
            }
            return Ok(j as u32);
        }
        if mag > ACCEPTANCE_FACTOR * noise {
            return Err(Error::Ambiguity(format!(
                "derivative {j} has magnitude {mag:e} inside the noise band around {noise:e}"
            )));
        }
    }
    Err(Error::Ambiguity(format!(
        "no derivative up to order {} rises above the noise",
        derivs.len().saturating_sub(1)
    )))
}

/// Order of a zero of an arbitrary analytic function at s0.
pub fn classify_order_of(
    f: &dyn AnalyticFn,
    s0: &BigComplex,
    delta: f64,
    max_order: u32,
    ctx: &PrecisionContext,
) -> Result<u32> {
    let radius = Float::with_val(ctx.work_prec(), 0.5);
    let mut derivs = vec![f.eval(s0)?];
    for m in 1..=max_order {
        derivs.push(cauchy_derivative(f, s0, m, &radius, 32 * (m as usize + 1), ctx)?);
    }
    classify_from_derivatives(&derivs, delta)
}

/// Order of the zero of Λ (or Λ_N) at k/2 + i t0, t0 known to within delta.
pub fn classify_order(t0: &BigReal, delta: f64, max_order: u32, src: &ZSource) -> Result<u32> {
    let ctx = src.ctx;
    let prec = ctx.work_prec();
    let s0 = Complex::with_val(prec, (Float::with_val(prec, src.spec.weight()) / 2u32, t0));
    let g = GammaFactor::new(src.spec).eval(&s0, ctx)?;
    let target = Float::with_val(64, src.cfg.target() * Float::with_val(prec, g.value.abs_ref()));
    let cfg = src.cfg.retargeted(target);
    let derivs = (0..=max_order)
        .map(|m| derivative(&s0, m, src.mode, src.table, src.spec, &cfg, ctx))
        .collect::<Result<Vec<_>>>()?;
    classify_from_derivatives(&derivs, delta)
}

/// A local minimum of |Z| without a sign change, consistent with a zero.
#[derive(Debug, Clone)]
pub struct MinimumCandidate {
    pub t: BigReal,
    pub z: Estimate<BigReal>,
    pub order: u32,
}

/// Golden-section minima of |f| inside grid triples where |f| dips without
/// changing sign, kept when |f| at the minimum is consistent with zero.
pub fn local_minima_of(
    grid: &[(BigReal, Estimate<BigReal>)],
    f: &(dyn Fn(&BigReal) -> Result<Estimate<BigReal>> + Sync),
    tol: f64,
) -> Result<Vec<(BigReal, Estimate<BigReal>)>> {
    let mut out = Vec::new();
    for w in grid.windows(3) {
        let (v0, v1, v2) = (&w[0].1.value, &w[1].1.value, &w[2].1.value);
        let same = v0.is_sign_positive() == v1.is_sign_positive() && v1.is_sign_positive() == v2.is_sign_positive();
        let dip = v1.clone().abs() < v0.clone().abs() && v1.clone().abs() < v2.clone().abs();
        if !(same && dip) {
            continue;
        }
        let prec = w[0].0.prec();
        let ratio = Float::with_val(prec, 5).sqrt() - 1u32;
        let ratio = ratio / 2u32;
        let (mut a, mut b) = (w[0].0.clone(), w[2].0.clone());
        let mut c = Float::with_val(
            prec,
            &b - Float::with_val(prec, &ratio * Float::with_val(prec, &b - &a)),
        );
        let mut d = Float::with_val(
            prec,
            &a + Float::with_val(prec, &ratio * Float::with_val(prec, &b - &a)),
        );
        let mut fc = f(&c)?;
        let mut fd = f(&d)?;
        while Float::with_val(prec, &b - &a) > tol {
            if fc.value.clone().abs() < fd.value.clone().abs() {
                b = d;
                d = c;
                fd = fc;
                c = Float::with_val(
                    prec,
                    &b - Float::with_val(prec, &ratio * Float::with_val(prec, &b - &a)),
                );
                fc = f(&c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = Float::with_val(
                    prec,
                    &a + Float::with_val(prec, &ratio * Float::with_val(prec, &b - &a)),
                );
                fd = f(&d)?;
            }
        }
        let (t, v) = if fc.value.clone().abs() < fd.value.clone().abs() {
            (c, fc)
        } else {
            (d, fd)
        };
        if v.value.to_f64().abs() <= ACCEPTANCE_FACTOR * v.abs_err {
            out.push((t, v));
        }
    }
    Ok(out)
}

/// Even-order zeros missed by the sign-change scan: minima of |Z| on the
/// scan grid refined to `tol`, then classified.
pub fn local_minimum_probe(scan: &Scan, tol: f64, max_order: u32, src: &ZSource) -> Result<Vec<MinimumCandidate>> {
    let f = |t: &BigReal| src.z(t);
    local_minima_of(&scan.grid, &f, tol)?
        .into_iter()
        .map(|(t, z)| {
            let order = classify_order(&t, tol, max_order, src)?;
            Ok(MinimumCandidate { t, z, order })
        })
        .collect()
}
