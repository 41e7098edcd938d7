use rug::Float;

use crate::arith::nth_prime;
use crate::eigenform::EigenformSpec;
use crate::error::{Error, Result};
use crate::numerics::{decay_threshold, BigComplex, BigReal};

const BOUND_PREC: u32 = 64;

/// 2π/√C
fn step(spec: &EigenformSpec) -> f64 {
    2.0 * std::f64::consts::PI / (spec.level() as f64).sqrt()
}

/// Smallest a for which |Γ(s, a)|, |Γ(k − s, a)| ≤ 2e^{−a/2}.
fn regime_threshold(sigma: f64, spec: &EigenformSpec) -> f64 {
    decay_threshold(sigma).max(decay_threshold(spec.weight() as f64 - sigma))
}

/// Smallest n with 2πn/√C above the decay threshold at Re(s) = σ.
pub fn regime_start(sigma: f64, spec: &EigenformSpec) -> usize {
    let n = (regime_threshold(sigma, spec) / step(spec)).floor() as usize + 1;
    n.max(1)
}

/// ln of n^{(k+1)/2} · 2e^{−a/2} · (a^{−σ} + a^{σ−k}), a = 2πn/√C.
fn log_term(n: f64, sigma: f64, spec: &EigenformSpec) -> f64 {
    let k = spec.weight() as f64;
    let a = step(spec) * n;
    let la = a.ln();
    let (x, y) = (-sigma * la, (sigma - k) * la);
    let mx = x.max(y);
    let lsum = mx + ((x - mx).exp() + (y - mx).exp()).ln();
    (k + 1.0) / 2.0 * n.ln() + std::f64::consts::LN_2 - a / 2.0 + lsum
}

/// Certified bound on Σ_{n ≥ n_start} |a_n| |lambda_term(s, n)|, from
/// |a_n| ≤ d(n) n^{(k−1)/2} ≤ n^{(k+1)/2} and |Γ(s, a)| ≤ 2e^{−a/2}.
pub fn tail_bound(n_start: usize, s: &BigComplex, spec: &EigenformSpec) -> Result<BigReal> {
    let sigma = s.real().to_f64();
    let c = step(spec);
    let n0 = n_start.max(1);
    if c * n0 as f64 <= regime_threshold(sigma, spec) {
        return Err(Error::Regime(format!(
            "2πn/√C = {:.3} at n = {n0} does not exceed the decay threshold {:.3} for Re(s) = {sigma}",
            c * n0 as f64,
            regime_threshold(sigma, spec)
        )));
    }
    let k = spec.weight() as f64;
    let e_max = ((k + 1.0) / 2.0 - sigma).max((k + 1.0) / 2.0 + sigma - k).max(0.0);
    // term ratio t_{m+1}/t_m ≤ ((m+1)/m)^{e_max} e^{−c/2}, decreasing in m
    let log_ratio = |m: f64| e_max * (1.0 / m).ln_1p() - c / 2.0;
    let stop = -c / 4.0;
    let mut total = Float::with_val(BOUND_PREC, 0);
    let mut n = n0 as f64;
    loop {
        let lt = log_term(n, sigma, spec);
        let lr = log_ratio(n);
        if lr <= stop {
            let r = lr.exp();
            total += Float::with_val(BOUND_PREC, lt).exp() / (1.0 - r);
            break;
        }
        total += Float::with_val(BOUND_PREC, lt).exp();
        n += 1.0;
    }
    Ok(total)
}

/// Number of terms to sum so that the neglected tail is ≤ target/2.
pub fn certified_cutoff(s: &BigComplex, spec: &EigenformSpec, target: &BigReal) -> Result<usize> {
    if !(target.is_finite() && *target > 0) {
        return Err(Error::InvalidArgument("target error must be positive".into()));
    }
    let half = Float::with_val(BOUND_PREC, target) / 2u32;
    let start = regime_start(s.real().to_f64(), spec);
    let ok = |n: usize| -> Result<bool> { Ok(tail_bound(n, s, spec)? <= half) };
    if ok(start)? {
        return Ok(start - 1);
    }
    let mut lo = start;
    let mut hi = start * 2;
    while !ok(hi)? {
        lo = hi;
        hi *= 2;
        if hi > 1 << 40 {
            return Err(Error::Convergence("tail bound never reached the target".into()));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi - 1)
}

/// 4 e^{−πp/√C} p^{(k−1)/2} ((2πp/√C)^{−σ} + (2πp/√C)^{σ−k}) at p = p_{N+1}.
pub fn first_term_bound(n_factors: usize, s: &BigComplex, spec: &EigenformSpec) -> Result<BigReal> {
    let p = nth_prime(n_factors + 1);
    first_term_bound_at(p as f64, s.real().to_f64(), spec)
}

fn first_term_bound_at(p: f64, sigma: f64, spec: &EigenformSpec) -> Result<BigReal> {
    let k = spec.weight() as f64;
    let a = step(spec) * p;
    if a <= regime_threshold(sigma, spec) {
        return Err(Error::Regime(format!(
            "2πp/√C = {a:.3} does not exceed the decay threshold {:.3} for Re(s) = {sigma}",
            regime_threshold(sigma, spec)
        )));
    }
    let la = a.ln();
    let (x, y) = (-sigma * la, (sigma - k) * la);
    let mx = x.max(y);
    let lsum = mx + ((x - mx).exp() + (y - mx).exp()).ln();
    let lg = 4f64.ln() - a / 2.0 + (k - 1.0) / 2.0 * p.ln() + lsum;
    Ok(Float::with_val(BOUND_PREC, lg).exp())
}

/// The first-term bound with p_{N+1} replaced by Rosser's estimates
/// n log n < p_n < n (log n + log log n), valid for N ≥ 5 and 0 < σ < k.
pub fn rosser_first_term_bound(n_factors: usize, s: &BigComplex, spec: &EigenformSpec) -> Result<BigReal> {
    let sigma = s.real().to_f64();
    let k = spec.weight() as f64;
    if n_factors < 5 {
        return Err(Error::Regime(format!("Rosser's bounds need N ≥ 5, got {n_factors}")));
    }
    if !(sigma > 0.0 && sigma < k) {
        return Err(Error::Regime(format!("Rosser form needs 0 < Re(s) < k, got {sigma}")));
    }
    let n = (n_factors + 1) as f64;
    let lower = n * n.ln();
    let upper = n * (n.ln() + n.ln().ln());
    let c = step(spec);
    if c * lower <= regime_threshold(sigma, spec) {
        return Err(Error::Regime(format!(
            "2π(N+1)log(N+1)/√C does not exceed the decay threshold for Re(s) = {sigma}"
        )));
    }
    let la = (c * lower).ln();
    let (x, y) = (-sigma * la, (sigma - k) * la);
    let mx = x.max(y);
    let lsum = mx + ((x - mx).exp() + (y - mx).exp()).ln();
    let lg = 4f64.ln() - c * lower / 2.0 + (k - 1.0) / 2.0 * upper.ln() + lsum;
    Ok(Float::with_val(BOUND_PREC, lg).exp())
}
