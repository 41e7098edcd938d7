use rayon::prelude::*;
use serde::Serialize;

use super::ppsum::PrincipalPartSet;
use crate::arith::nth_prime;
use crate::eigenform::EigenformSpec;
use crate::error::{Error, Result};
use crate::euler::{enumerate_poles, PoleLattice};
use crate::numerics::{abs_f64, PrecisionContext};

/// Rectangle [σ₁, σ₂] × [τ₁, τ₂] kept at distance ≥ a from the finite-place
/// poles and ≥ b from the Γ-poles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseContour {
    pub sigma1: f64,
    pub sigma2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub a: f64,
    pub b: f64,
}

/// π / (2N log p_N + (4N + 2)π)
pub fn sparse_distance(n_factors: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let n = n_factors as f64;
    let lp = if n_factors == 0 {
        0.0
    } else {
        (nth_prime(n_factors) as f64).ln()
    };
    pi / (2.0 * n * lp + (4.0 * n + 2.0) * pi)
}

/// Ordinate in [lo, lo + 1] farthest from every value in `ords`.
fn widest_gap(ords: &[f64], lo: f64) -> (f64, f64) {
    let hi = lo + 1.0;
    let mut pts: Vec<f64> = ords.iter().copied().filter(|y| *y >= lo && *y <= hi).collect();
    pts.sort_by(f64::total_cmp);
    let dist = |y: f64| ords.iter().map(|o| (o - y).abs()).fold(f64::INFINITY, f64::min);
    let mut cands = vec![lo, hi];
    let mut edges = vec![lo];
    edges.extend(pts);
    edges.push(hi);
    for w in edges.windows(2) {
        cands.push((w[0] + w[1]) / 2.0);
    }
    cands
        .into_iter()
        .map(|y| (y, dist(y)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty")
}

pub fn sparse_contour(
    n_factors: usize,
    min_extent: f64,
    spec: &EigenformSpec,
    lattices: &[PoleLattice],
) -> Result<SparseContour> {
    let k = spec.weight() as f64;
    if !(min_extent > k) || !min_extent.is_finite() {
        return Err(Error::Search(format!(
            "contour extent {min_extent} must exceed k = {k}"
        )));
    }
    if lattices.len() != n_factors {
        return Err(Error::Search(format!(
            "{} pole lattices given for N = {n_factors}",
            lattices.len()
        )));
    }
    let a = sparse_distance(n_factors);
    let res: Vec<f64> = lattices
        .iter()
        .flat_map(|l| l.families().iter().map(|f| f.re.to_f64()))
        .collect();
    let clear = |x: f64| res.iter().all(|r| (r - x).abs() >= a);

    let mut ell = -(min_extent.ceil());
    while !clear(ell - 0.5) {
        ell -= 1.0;
    }
    let mut sigma2 = (min_extent.max(k + 1.0) + 0.5).floor() + 0.5;
    while !clear(sigma2) {
        sigma2 += 0.5;
    }

    let window = min_extent + 2.0;
    let ords: Vec<f64> = lattices
        .iter()
        .flat_map(|l| {
            enumerate_poles(l, window)
                .into_iter()
                .map(|p| p.location.imag().to_f64())
        })
        .collect();
    let (tau2, d2) = widest_gap(&ords, min_extent);
    let (tau1, d1) = widest_gap(&ords, -min_extent - 1.0);
    if d1.min(d2) < a {
        return Err(Error::Search(format!(
            "no ordinate at distance {a:.4} from the poles near ±{min_extent}"
        )));
    }
    Ok(SparseContour {
        sigma1: ell - 0.5,
        sigma2,
        tau1,
        tau2,
        a,
        b: 0.5,
    })
}

impl SparseContour {
    /// Points on the boundary, `per_side` on each edge, counterclockwise.
    pub fn samples(&self, per_side: usize) -> Vec<(f64, f64)> {
        let n = per_side.max(1);
        let corners = [
            (self.sigma1, self.tau1),
            (self.sigma2, self.tau1),
            (self.sigma2, self.tau2),
            (self.sigma1, self.tau2),
        ];
        let mut out = Vec::with_capacity(4 * n);
        for i in 0..4 {
            let (x0, y0) = corners[i];
            let (x1, y1) = corners[(i + 1) % 4];
            for j in 0..n {
                let u = j as f64 / n as f64;
                out.push((x0 + u * (x1 - x0), y0 + u * (y1 - y0)));
            }
        }
        out
    }

    /// Smallest distances from the boundary to the finite-place poles and to
    /// the nonpositive integers.
    pub fn clearances(&self, lattices: &[PoleLattice]) -> (f64, f64) {
        let reach = self.tau1.abs().max(self.tau2.abs()) + 2.0;
        let mut finite = f64::INFINITY;
        for l in lattices {
            for p in enumerate_poles(l, reach) {
                finite = finite.min(self.distance((p.location.real().to_f64(), p.location.imag().to_f64())));
            }
        }
        let mut gamma = f64::INFINITY;
        let mut n = 0.0;
        while -n >= self.sigma1 - 2.0 {
            gamma = gamma.min(self.distance((-n, 0.0)));
            n += 1.0;
        }
        (finite, gamma)
    }

    fn distance(&self, (x, y): (f64, f64)) -> f64 {
        let seg = |(x0, y0): (f64, f64), (x1, y1): (f64, f64)| {
            let (dx, dy) = (x1 - x0, y1 - y0);
            let u = (((x - x0) * dx + (y - y0) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            (x0 + u * dx - x).hypot(y0 + u * dy - y)
        };
        let c = [
            (self.sigma1, self.tau1),
            (self.sigma2, self.tau1),
            (self.sigma2, self.tau2),
            (self.sigma1, self.tau2),
        ];
        (0..4).map(|i| seg(c[i], c[(i + 1) % 4])).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, other: &SparseContour) -> bool {
        self.sigma1 <= other.sigma1 && self.sigma2 >= other.sigma2 && self.tau1 <= other.tau1 && self.tau2 >= other.tau2
    }
}

/// Empirical K in |Λ_N^pp(s)| ≤ K/(1 + |s|) on a contour.
#[derive(Debug, Clone, Serialize)]
pub struct PpBoundReport {
    pub k_estimate: f64,
    pub argmax: (f64, f64),
    pub samples: usize,
    /// Largest truncation-tail estimate seen, scaled like the K estimate.
    pub tail_allowance: f64,
}

pub fn pp_bound_probe(
    contour: &SparseContour,
    set: &PrincipalPartSet,
    per_side: usize,
    ctx: &PrecisionContext,
) -> Result<PpBoundReport> {
    let pts = contour.samples(per_side.max(16));
    let vals: Vec<((f64, f64), f64, f64)> = pts
        .par_iter()
        .map(|&(x, y)| {
            let s = ctx.complex((x, y));
            let v = set.principal_part_sum(&s, ctx)?;
            let w = 1.0 + x.hypot(y);
            Ok(((x, y), w * abs_f64(&v.value), w * set.tail_estimate(&s)))
        })
        .collect::<Result<_>>()?;
    let (argmax, k_estimate, _) = vals
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let tail_allowance = vals.iter().map(|v| v.2).fold(0.0, f64::max);
    Ok(PpBoundReport {
        k_estimate,
        argmax,
        samples: vals.len(),
        tail_allowance,
    })
}
