use rug::{Complex, Float};

use super::local::LocalFactor;
use crate::numerics::{BigComplex, BigReal, PrecisionContext};

/// One arithmetic progression of poles: Re s = re, Im s = base + n·spacing.
#[derive(Debug, Clone)]
pub struct PoleFamily {
    pub root: BigComplex,
    pub re: BigReal,
    pub base: BigReal,
    pub order: u32,
}

/// Poles of L_p on vertical lines, from s = log α_j / log p.
#[derive(Debug, Clone)]
pub struct PoleLattice {
    p: u64,
    spacing: BigReal,
    families: Vec<PoleFamily>,
    double_poles: bool,
}

/// A single pole of a local factor.
#[derive(Debug, Clone)]
pub struct Pole {
    pub p: u64,
    pub family: usize,
    pub index: i64,
    pub location: BigComplex,
    pub order: u32,
}

impl PoleLattice {
    /// Families from the principal logarithm, I_j ∈ (−π/log p, π/log p].
    /// Roots that agree to 2^{−bits/2} merge into one family of double poles.
    pub fn new(f: &LocalFactor, ctx: &PrecisionContext) -> Self {
        let prec = ctx.work_prec();
        let ln_p = f.ln_p();
        let spacing = Float::with_val(prec, ctx.pi() * 2u32) / ln_p;
        let mut families: Vec<PoleFamily> = f
            .nonzero_roots()
            .into_iter()
            .map(|a| {
                let lg = Complex::with_val(prec, a.ln_ref());
                PoleFamily {
                    root: a.clone(),
                    re: Float::with_val(prec, lg.real() / ln_p),
                    base: Float::with_val(prec, lg.imag() / ln_p),
                    order: 1,
                }
            })
            .collect();
        let tol = (-(ctx.bits() as f64) / 2.0).exp2();
        let mut double_poles = false;
        if families.len() == 2 {
            let dre = Float::with_val(prec, &families[0].re - &families[1].re).abs().to_f64();
            let dim = Float::with_val(prec, &families[0].base - &families[1].base);
            let wrapped = lattice_offset(&dim, &spacing).abs().to_f64();
            if dre <= tol && wrapped <= tol {
                families.truncate(1);
                families[0].order = 2;
                double_poles = true;
            }
        }
        Self {
            p: f.p(),
            spacing,
            families,
            double_poles,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// 2π / log p
    pub fn spacing(&self) -> &BigReal {
        &self.spacing
    }

    pub fn families(&self) -> &[PoleFamily] {
        &self.families
    }

    pub fn double_poles(&self) -> bool {
        self.double_poles
    }

    /// Lattice point n of family j.
    pub fn point(&self, family: usize, n: i64) -> BigComplex {
        let fam = &self.families[family];
        let prec = fam.base.prec();
        let im = Float::with_val(prec, &self.spacing * n) + &fam.base;
        Complex::with_val(prec, (&fam.re, im))
    }

    /// Index range n with |I_j + n·spacing| ≤ t.
    fn index_range(&self, family: usize, t: f64) -> std::ops::RangeInclusive<i64> {
        let base = self.families[family].base.to_f64();
        let d = self.spacing.to_f64();
        let lo = ((-t - base) / d).ceil() as i64;
        let hi = ((t - base) / d).floor() as i64;
        lo..=hi
    }
}

/// x reduced to (−d/2, d/2] modulo d.
fn lattice_offset(x: &BigReal, d: &BigReal) -> BigReal {
    let prec = x.prec();
    let q = Float::with_val(prec, x / d).round();
    Float::with_val(prec, x - Float::with_val(prec, &q * d))
}

/// All poles with |Im s| ≤ t, double where the two families coincide.
pub fn enumerate_poles(lattice: &PoleLattice, t: f64) -> Vec<Pole> {
    let mut out = Vec::new();
    for (j, fam) in lattice.families.iter().enumerate() {
        for n in lattice.index_range(j, t) {
            out.push(Pole {
                p: lattice.p,
                family: j,
                index: n,
                location: lattice.point(j, n),
                order: fam.order,
            });
        }
    }
    out.sort_by(|a, b| {
        a.location
            .imag()
            .partial_cmp(b.location.imag())
            .expect("finite ordinates")
    });
    out
}

/// A pole of L_p lying within tolerance of a pole of L_q.
#[derive(Debug, Clone)]
pub struct Coincidence {
    pub p: u64,
    pub q: u64,
    pub s_p: BigComplex,
    pub s_q: BigComplex,
    pub distance: f64,
}

/// Pairs of poles from distinct lattices within `tol` of each other and
/// with |Im s| ≤ t.
pub fn detect_coincident_poles(lattices: &[PoleLattice], t: f64, tol: f64) -> Vec<Coincidence> {
    let mut out = Vec::new();
    for (i, a) in lattices.iter().enumerate() {
        for b in &lattices[i + 1..] {
            for (ja, fa) in a.families.iter().enumerate() {
                for fb in b.families.iter() {
                    let prec = fa.re.prec().max(fb.re.prec());
                    let dre = Float::with_val(prec, &fa.re - &fb.re).abs().to_f64();
                    if dre > tol {
                        continue;
                    }
                    for n in a.index_range(ja, t) {
                        let s_p = a.point(ja, n);
                        let rel = Float::with_val(prec, s_p.imag() - &fb.base);
                        let m = Float::with_val(prec, &rel / &b.spacing).round();
                        let Some(m) = m.to_integer().and_then(|i| i.to_i64()) else {
                            continue;
                        };
                        let im_q = Float::with_val(prec, &b.spacing * m) + &fb.base;
                        if im_q.to_f64().abs() > t {
                            continue;
                        }
                        let s_q = Complex::with_val(prec, (&fb.re, im_q));
                        let distance = Complex::with_val(prec, &s_p - &s_q).abs().real().to_f64();
                        if distance <= tol {
                            out.push(Coincidence {
                                p: a.p,
                                q: b.p,
                                s_p,
                                s_q,
                                distance,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::abs_f64;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    fn delta_lattice(p: u64, a_p: i64) -> (LocalFactor, PoleLattice) {
        let c = ctx();
        let f = LocalFactor::new(p, c.complex(a_p), c.complex(1), 12, &c).unwrap();
        let l = PoleLattice::new(&f, &c);
        (f, l)
    }

    #[test]
    fn lattice_points_are_poles() {
        let c = ctx();
        for (p, a) in [(2, -24), (3, 252), (5, 4830)] {
            let (f, l) = delta_lattice(p, a);
            assert_eq!(l.families().len(), 2);
            assert!(!l.double_poles());
            let poles = enumerate_poles(&l, 60.0);
            for pole in &poles {
                assert!((pole.location.real().to_f64() - 5.5).abs() < 1e-40);
                let root = &l.families()[pole.family].root;
                let x = f.p_pow_neg(&pole.location);
                let d = Complex::with_val(c.work_prec(), 1 - Complex::with_val(c.work_prec(), root * &x));
                assert!(abs_f64(&d) <= (-(c.bits() as f64) + 8.0).exp2());
            }
            // 2 · (2T log p / 2π) ± 4
            let expect = 2.0 * 2.0 * 60.0 * (p as f64).ln() / (2.0 * std::f64::consts::PI);
            assert!((poles.len() as f64 - expect).abs() <= 4.0, "p={p}: {}", poles.len());
        }
    }

    #[test]
    fn base_ordinates_for_two_and_three() {
        let (_, l2) = delta_lattice(2, -24);
        let mut b: Vec<f64> = l2.families().iter().map(|f| f.base.to_f64()).collect();
        b.sort_by(f64::total_cmp);
        assert!((b[0] + 2.654).abs() < 1e-3 && (b[1] - 2.654).abs() < 1e-3);
        assert!((l2.spacing().to_f64() - 9.0647).abs() < 1e-3);
        let (_, l3) = delta_lattice(3, 252);
        let b3 = l3.families()[0].base.to_f64().abs();
        assert!((b3 - 1.1527).abs() < 1e-3);
    }

    #[test]
    fn residue_is_one_over_log_p() {
        // (1/2πi)∮ (1 − α p^{−s})^{−1} ds by the trapezoid rule on a small circle
        let c = ctx();
        let prec = c.work_prec();
        let (f, l) = delta_lattice(2, -24);
        let root = l.families()[0].root.clone();
        let r = 0.05;
        let m = 256u32;
        for n in [-2i64, 0, 3] {
            let s0 = l.point(0, n);
            let mut acc = Complex::with_val(prec, 0);
            for j in 0..m {
                let theta = Float::with_val(prec, c.pi() * 2u32 * j) / m;
                let w = Complex::with_val(prec, (theta.clone().cos(), theta.sin())) * r;
                let s = Complex::with_val(prec, &s0 + &w);
                let x = f.p_pow_neg(&s);
                let val = Complex::with_val(prec, 1 - Complex::with_val(prec, &root * &x)).recip();
                acc += val * w;
            }
            acc /= m;
            let expect = f.ln_p().clone().recip();
            let d = abs_f64(&Complex::with_val(prec, &acc - &expect));
            assert!(d < 1e-40, "n={n}: {d:e}");
        }
    }

    #[test]
    fn coincidences() {
        let c = ctx();
        let (_, l2) = delta_lattice(2, -24);
        let (_, l3) = delta_lattice(3, 252);
        let tol = (-(c.bits() as f64) / 2.0).exp2();
        let found = detect_coincident_poles(&[l2.clone(), l3], 100.0, tol);
        assert!(found.len() <= 4);
        assert!(detect_coincident_poles(std::slice::from_ref(&l2), 100.0, tol).is_empty());
        let same = detect_coincident_poles(&[l2.clone(), l2.clone()], 100.0, tol);
        let total = enumerate_poles(&l2, 100.0).len();
        // every point pairs with itself; points from one family never hit the other
        assert_eq!(same.len(), total);
    }

    #[test]
    fn repeated_root_gives_double_poles() {
        // a_p² = 4 p^{k−1}: p = 2, k = 2 with a_2 = 2√2
        let c = ctx();
        let a = Complex::with_val(c.work_prec(), Float::with_val(c.work_prec(), 8).sqrt());
        let f = LocalFactor::new(2, a, c.complex(1), 2, &c).unwrap();
        let l = PoleLattice::new(&f, &c);
        assert!(l.double_poles());
        assert_eq!(l.families().len(), 1);
        assert!(enumerate_poles(&l, 20.0).iter().all(|p| p.order == 2));
    }

    #[test]
    fn ramified_prime_single_family() {
        let c = ctx();
        let f = LocalFactor::new(11, c.complex(-1), c.complex(0), 2, &c).unwrap();
        let l = PoleLattice::new(&f, &c);
        assert_eq!(l.families().len(), 1);
        assert!(l.families()[0].re.to_f64().abs() < 1e-40);
    }
}
