use rayon::prelude::*;
use rug::Complex;

use super::laurent::{contour_principal_part, PrincipalPart};
use crate::eigenform::{CoefficientTable, EigenformSpec};
use crate::error::{Error, Result};
use crate::euler::{enumerate_poles, local_factor_eval, EulerProduct, PoleLattice};
use crate::numerics::{abs_f64, ln_gamma, BigComplex, Estimate, PrecisionContext};

/// Where a pole of Λ_N^Euler comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSource {
    /// s = −n from Γ(s).
    Gamma(u32),
    /// Lattice point `index` of family `family` of L_p.
    Finite { p: u64, family: usize, index: i64 },
}

#[derive(Debug, Clone)]
struct Site {
    location: BigComplex,
    order: u32,
    source: PoleSource,
}

/// Poles closer than 2^{−bits/2} handled by one contour.
#[derive(Debug, Clone)]
pub struct PoleCluster {
    pub sources: Vec<PoleSource>,
    pub part: PrincipalPart,
}

/// The principal parts of Λ_N^Euler at every Γ-pole −n with n ≤ T and every
/// finite-place pole with |Im s⋆| ≤ T, plus envelopes for what lies beyond.
#[derive(Debug, Clone)]
pub struct PrincipalPartSet {
    n_factors: usize,
    truncation: f64,
    euler: EulerProduct,
    sign: i32,
    weight: u32,
    clusters: Vec<PoleCluster>,
    /// (location, |ρ| envelope) for poles beyond the truncation.
    tail_sites: Vec<((f64, f64), f64)>,
    pole_tol: f64,
}

fn lo_ctx() -> PrecisionContext {
    PrecisionContext::with_guard(64, 16).expect("valid context")
}

/// ln |g(s)| at low precision.
fn ln_abs_g(s: (f64, f64), spec: &EigenformSpec) -> f64 {
    let c = lo_ctx();
    let z = c.complex(s);
    let lg = ln_gamma(&z, &c)
        .map(|e| e.value.real().to_f64())
        .unwrap_or(f64::NEG_INFINITY);
    let two_pi = 2.0 * std::f64::consts::PI;
    lg + s.0 * (0.5 * (spec.level() as f64).ln() - two_pi.ln())
}

impl PrincipalPartSet {
    pub fn build(
        n_factors: usize,
        truncation: f64,
        table: &CoefficientTable,
        spec: &EigenformSpec,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        if !(truncation > 0.0) {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        let euler = EulerProduct::new(spec, table, n_factors, ctx)?;
        let lattices: Vec<PoleLattice> = euler.factors().iter().map(|f| PoleLattice::new(f, ctx)).collect();
        let max_spacing = lattices.iter().map(|l| l.spacing().to_f64()).fold(1.0, f64::max);
        let window = truncation + max_spacing + 1.0;

        let mut sites = Vec::new();
        let gamma_count = truncation.floor() as u32;
        for n in 0..=gamma_count + 1 {
            sites.push((
                Site {
                    location: ctx.complex(-(n as i64)),
                    order: 1,
                    source: PoleSource::Gamma(n),
                },
                n <= gamma_count,
            ));
        }
        for l in &lattices {
            for pole in enumerate_poles(l, window) {
                let inside = pole.location.imag().to_f64().abs() <= truncation;
                sites.push((
                    Site {
                        location: pole.location,
                        order: pole.order,
                        source: PoleSource::Finite {
                            p: pole.p,
                            family: pole.family,
                            index: pole.index,
                        },
                    },
                    inside,
                ));
            }
        }

        let pole_tol = (-(ctx.bits() as f64) / 2.0).exp2();
        let groups = cluster(
            &sites.iter().map(|(s, _)| s.location.clone()).collect::<Vec<_>>(),
            pole_tol,
        );
        let prec = ctx.work_prec();
        let f = |s: &BigComplex| euler.eval(s, ctx);

        let jobs: Vec<&Vec<usize>> = groups.iter().filter(|g| g.iter().any(|&i| sites[i].1)).collect();
        let clusters: Vec<PoleCluster> = jobs
            .par_iter()
            .map(|members| {
                let mut center = Complex::with_val(prec, 0);
                for &i in members.iter() {
                    center += &sites[i].0.location;
                }
                center /= members.len() as u32;
                let spread = members
                    .iter()
                    .map(|&i| abs_f64(&Complex::with_val(prec, &sites[i].0.location - &center)))
                    .fold(0.0, f64::max);
                let nearest = sites
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !members.contains(i))
                    .map(|(_, (s, _))| abs_f64(&Complex::with_val(prec, &s.location - &center)))
                    .fold(f64::INFINITY, f64::min);
                if nearest <= 2.0 * spread + pole_tol {
                    return Err(Error::Separation(format!(
                        "cluster at {} cannot be separated from its neighbours",
                        center.to_string_radix(10, Some(12))
                    )));
                }
                let radius = (spread + (nearest - spread) / 3.0).min(1.0);
                let order: u32 = members.iter().map(|&i| sites[i].0.order).sum();
                let part = contour_principal_part(&f, &center, order + 1, radius, ctx)?;
                Ok(PoleCluster {
                    sources: members.iter().map(|&i| sites[i].0.source).collect(),
                    part,
                })
            })
            .collect::<Result<_>>()?;

        let tail_sites = tail_envelope(
            &clusters,
            &lattices,
            truncation,
            gamma_count,
            spec,
            table,
            n_factors,
            ctx,
        )?;
        Ok(Self {
            n_factors,
            truncation,
            euler,
            sign: spec.sign(),
            weight: spec.weight(),
            clusters,
            tail_sites,
            pole_tol,
        })
    }

    pub fn n_factors(&self) -> usize {
        self.n_factors
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn clusters(&self) -> &[PoleCluster] {
        &self.clusters
    }

    pub fn euler(&self) -> &EulerProduct {
        &self.euler
    }

    /// Estimated |Σ over omitted poles of their principal parts at s|.
    pub fn tail_estimate(&self, s: &BigComplex) -> f64 {
        let (x, y) = (s.real().to_f64(), s.imag().to_f64());
        self.tail_sites
            .iter()
            .map(|((re, im), w)| w / ((re - x).hypot(im - y)).max(1e-300))
            .sum()
    }

    /// Λ_N^pp(s), truncated, with coefficient errors and the tail folded in.
    pub fn principal_part_sum(&self, s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
        let prec = ctx.work_prec();
        let mut acc = Complex::with_val(prec, 0);
        let mut err = 0.0;
        for c in &self.clusters {
            let d = abs_f64(&Complex::with_val(prec, s - &c.part.pole));
            if d <= self.pole_tol {
                return Err(Error::Pole(format!(
                    "s lies on a pole of the truncated Euler product ({:?})",
                    c.sources[0]
                )));
            }
            let (v, e) = c.part.eval(s);
            acc += v;
            err += e;
        }
        err += self.tail_estimate(s);
        Ok(Estimate::new(acc, err))
    }

    /// Λ_N^ingoing(s) = Λ_N^Euler(s) − Λ_N^pp(s).
    pub fn ingoing(&self, s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
        let e = self.euler.eval(s, ctx)?;
        let pp = self.principal_part_sum(s, ctx)?;
        let v = Complex::with_val(ctx.work_prec(), &e.value - &pp.value);
        Ok(Estimate::new(v, e.abs_err + pp.abs_err))
    }

    /// Λ_N(s) = Λ_N^ingoing(s) + (−1)^P Λ_N^ingoing(k − s).
    pub fn lambda_n(&self, s: &BigComplex, ctx: &PrecisionContext) -> Result<Estimate<BigComplex>> {
        let prec = ctx.work_prec();
        let ks = Complex::with_val(prec, self.weight - s);
        let a = self.ingoing(s, ctx)?;
        let b = self.ingoing(&ks, ctx)?;
        let v = if self.sign == 1 {
            Complex::with_val(prec, &a.value + &b.value)
        } else {
            Complex::with_val(prec, &a.value - &b.value)
        };
        Ok(Estimate::new(ctx.round(&v), a.abs_err + b.abs_err))
    }
}

/// Principal part of Λ_N^Euler at `s_star`, on a circle a third of the way
/// to the nearest other pole. Poles of other factors lying within 2^{−bits/2}
/// of `s_star` count as the same point; `order_hint` should cover their sum.
pub fn laurent_principal_part(
    s_star: &BigComplex,
    order_hint: u32,
    n_factors: usize,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    ctx: &PrecisionContext,
) -> Result<PrincipalPart> {
    let prec = ctx.work_prec();
    let euler = EulerProduct::new(spec, table, n_factors, ctx)?;
    let tol = (-(ctx.bits() as f64) / 2.0).exp2();
    let (x, y) = (s_star.real().to_f64(), s_star.imag().to_f64());
    let mut nearest = f64::INFINITY;
    let mut consider = |z: &BigComplex| {
        let d = abs_f64(&Complex::with_val(prec, z - s_star));
        if d > tol {
            nearest = nearest.min(d);
        }
    };
    let last_gamma = (-x).max(0.0).ceil() as i64 + 2;
    for n in 0..=last_gamma {
        consider(&ctx.complex(-n));
    }
    for f in euler.factors() {
        let l = PoleLattice::new(f, ctx);
        let w = y.abs() + l.spacing().to_f64() + 1.0;
        for pole in enumerate_poles(&l, w) {
            consider(&pole.location);
        }
    }
    if !(nearest > 4.0 * tol) {
        return Err(Error::Separation(format!(
            "no separating circle around {}",
            s_star.to_string_radix(10, Some(12))
        )));
    }
    let radius = (nearest / 3.0).min(1.0);
    let f = |s: &BigComplex| euler.eval(s, ctx);
    contour_principal_part(&f, s_star, order_hint.max(1) + 1, radius, ctx)
}

/// Groups of indices whose points chain together within `tol`.
fn cluster(points: &[BigComplex], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let coarse: Vec<(f64, f64)> = points.iter().map(|p| (p.real().to_f64(), p.imag().to_f64())).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (coarse[i].0 - coarse[j].0).abs() > 1e-6 || (coarse[i].1 - coarse[j].1).abs() > 1e-6 {
                continue;
            }
            let prec = points[i].prec().0;
            if abs_f64(&Complex::with_val(prec, &points[i] - &points[j])) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Envelopes for principal parts beyond the truncation: Γ-pole residues from
/// their closed form, finite-place ones from the measured ratio |ρ|/|g(s⋆)|
/// times |g(s⋆)|.
#[allow(clippy::too_many_arguments)]
fn tail_envelope(
    clusters: &[PoleCluster],
    lattices: &[PoleLattice],
    truncation: f64,
    gamma_count: u32,
    spec: &EigenformSpec,
    table: &CoefficientTable,
    n_factors: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<((f64, f64), f64)>> {
    let floor = -(ctx.bits() as f64 + 64.0) * std::f64::consts::LN_2;
    let mut out = Vec::new();

    let mut ratio: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in clusters {
        if !c.sources.iter().any(|s| matches!(s, PoleSource::Finite { .. })) {
            continue;
        }
        let loc = (c.part.pole.real().to_f64(), c.part.pole.imag().to_f64());
        let lg = ln_abs_g(loc, spec);
        let m = c.part.coeffs.iter().map(abs_f64).fold(0.0, f64::max);
        ratio = ratio.max(m.ln() - lg);
        scale = scale.max(m);
    }
    if scale > 0.0 {
        let log_floor = floor + scale.ln();
        let extra = 4.0 * (ctx.bits() as f64) * std::f64::consts::LN_2 / std::f64::consts::PI + 20.0;
        for l in lattices {
            for pole in enumerate_poles(l, truncation + extra) {
                let loc = (pole.location.real().to_f64(), pole.location.imag().to_f64());
                if loc.1.abs() <= truncation {
                    continue;
                }
                let lw = ratio + ln_abs_g(loc, spec);
                if lw > log_floor {
                    out.push((loc, lw.exp()));
                }
            }
        }
    }

    // |ρ_{−n}| = (2π)^n C^{−n/2} |∏ L_p(−n)| / n!
    let lo = lo_ctx();
    let euler_lo = EulerProduct::new(spec, table, n_factors, &lo)?;
    let base = (2.0 * std::f64::consts::PI / (spec.level() as f64).sqrt()).ln();
    let mut ln_fact: f64 = (1..=gamma_count).map(|j| (j as f64).ln()).sum();
    let mut n = gamma_count + 1;
    let mut below = 0;
    while below < 8 && n < gamma_count + 10_000 {
        ln_fact += (n as f64).ln();
        let s = lo.complex(-(n as i64));
        let mut lp = 0.0;
        for f in euler_lo.factors() {
            lp += match local_factor_eval(f, &s, &lo) {
                Ok(v) => abs_f64(&v.value).ln(),
                Err(_) => f64::INFINITY,
            };
        }
        let lw = n as f64 * base - ln_fact + lp;
        if lw > floor {
            out.push(((-(n as f64), 0.0), lw.exp()));
            below = 0;
        } else {
            below += 1;
        }
        n += 1;
    }
    Ok(out)
}

/// Smallest integer T ≥ 8 with T·|g((k−1)/2 + iT)| ≤ target/100.
pub fn default_truncation(spec: &EigenformSpec, target: f64) -> f64 {
    let re = (spec.weight() as f64 - 1.0) / 2.0;
    let goal = (target / 100.0).ln();
    let mut t: f64 = 8.0;
    while t.ln() + ln_abs_g((re, t), spec) > goal && t < 1e5 {
        t += 1.0;
    }
    t
}

/// Λ_N^pp(s) with a freshly built pole set.
pub fn principal_part_sum(
    s: &BigComplex,
    n_factors: usize,
    truncation: f64,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    PrincipalPartSet::build(n_factors, truncation, table, spec, ctx)?.principal_part_sum(s, ctx)
}

/// Λ_N(s) by subtracting principal parts and symmetrizing.
#[allow(non_snake_case)]
pub fn lambda_N_regularized(
    s: &BigComplex,
    n_factors: usize,
    truncation: f64,
    table: &CoefficientTable,
    spec: &EigenformSpec,
    ctx: &PrecisionContext,
) -> Result<Estimate<BigComplex>> {
    PrincipalPartSet::build(n_factors, truncation, table, spec, ctx)?.lambda_n(s, ctx)
}
