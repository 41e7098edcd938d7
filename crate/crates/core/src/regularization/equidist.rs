use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::numerics::PrecisionContext;

/// Diophantine and distribution statistics of {n log q / log p}, 1 ≤ n ≤ M.
#[derive(Debug, Clone, Serialize)]
pub struct EquidistReport {
    pub p: u64,
    pub q: u64,
    pub m: u64,
    /// min n²·{n log q / log p}
    pub min_scaled: f64,
    pub argmin: u64,
    /// min n²·‖n log q / log p‖, distance to the nearest integer
    pub min_scaled_nearest: f64,
    pub argmin_nearest: u64,
    /// Star discrepancy of the fractional parts.
    pub discrepancy: f64,
}

pub fn equidist_probe(p: u64, q: u64, m: u64, ctx: &PrecisionContext) -> Result<EquidistReport> {
    if p == q {
        return Err(Error::InvalidArgument("p and q must differ".into()));
    }
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::InvalidArgument(format!("{p} and {q} must both be prime")));
    }
    if m < 1000 {
        return Err(Error::InvalidArgument(format!("sample length {m} is below 1000")));
    }
    let prec = ctx.work_prec();
    let x = Float::with_val(prec, q).ln() / Float::with_val(prec, p).ln();
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<(u64, u64)> = (0..m.div_ceil(CHUNK))
        .map(|c| (c * CHUNK + 1, ((c + 1) * CHUNK).min(m)))
        .collect();
    let parts: Vec<(Vec<f64>, (f64, u64), (f64, u64))> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut fr = Vec::with_capacity((hi - lo + 1) as usize);
            let mut best = (f64::INFINITY, 0);
            let mut best_near = (f64::INFINITY, 0);
            let mut nx = Float::with_val(prec, &x * lo);
            for n in lo..=hi {
                if n > lo {
                    nx += &x;
                }
                let f = Float::with_val(prec, nx.fract_ref());
                let near = Float::with_val(prec, 1 - &f).min(&f);
                let n2 = (n as f64) * (n as f64);
                let scaled = f.to_f64() * n2;
                let scaled_near = near.to_f64() * n2;
                if scaled < best.0 {
                    best = (scaled, n);
                }
                if scaled_near < best_near.0 {
                    best_near = (scaled_near, n);
                }
                fr.push(f.to_f64());
            }
            (fr, best, best_near)
        })
        .collect();
    let mut best = (f64::INFINITY, 0);
    let mut best_near = (f64::INFINITY, 0);
    let mut all = Vec::with_capacity(m as usize);
    for (fr, b, bn) in parts {
        if b.0 < best.0 {
            best = b;
        }
        if bn.0 < best_near.0 {
            best_near = bn;
        }
        all.extend(fr);
    }
    Ok(EquidistReport {
        p,
        q,
        m,
        min_scaled: best.0,
        argmin: best.1,
        min_scaled_nearest: best_near.0,
        argmin_nearest: best_near.1,
        discrepancy: star_discrepancy(&mut all),
    })
}

/// D* = max_i max(i/M − u_(i), u_(i) − (i−1)/M) over the sorted sample.
pub fn star_discrepancy(u: &mut [f64]) -> f64 {
    u.par_sort_unstable_by(f64::total_cmp);
    let m = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &v)| {
            let i = i as f64;
            ((i + 1.0) / m - v).max(v - i / m)
        })
        .fold(0.0, f64::max)
}
