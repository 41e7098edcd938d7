use rug::Float;

use crate::numerics::BigReal;

/// One row of a zero comparison; either side may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMatch {
    pub found: Option<BigReal>,
    pub reference: Option<BigReal>,
    /// found − reference
    pub diff: Option<BigReal>,
}

impl ZeroMatch {
    pub fn matched(&self) -> bool {
        self.diff.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroComparison {
    pub rows: Vec<ZeroMatch>,
}

impl ZeroComparison {
    pub fn unmatched(&self) -> usize {
        self.rows.iter().filter(|r| !r.matched()).count()
    }
}

/// Pairs each found zero with the nearest unused reference zero within
/// `window`, in order. Leftovers on either side become unmatched rows.
pub fn compare_zero_lists(found: &[BigReal], reference: &[BigReal], window: f64) -> ZeroComparison {
    let mut used = vec![false; reference.len()];
    let mut rows = Vec::new();
    for f in found {
        let best = reference
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, r)| (j, Float::with_val(f.prec().max(r.prec()), f - r)))
            .filter(|(_, d)| d.clone().abs() <= window)
            .min_by(|a, b| {
                a.1.clone()
                    .abs()
                    .partial_cmp(&b.1.clone().abs())
                    .expect("finite differences")
            });
        match best {
            Some((j, d)) => {
                used[j] = true;
                rows.push(ZeroMatch {
                    found: Some(f.clone()),
                    reference: Some(reference[j].clone()),
                    diff: Some(d),
                });
            }
            None => rows.push(ZeroMatch {
                found: Some(f.clone()),
                reference: None,
                diff: None,
            }),
        }
    }
    for (j, r) in reference.iter().enumerate() {
        if !used[j] {
            rows.push(ZeroMatch {
                found: None,
                reference: Some(r.clone()),
                diff: None,
            });
        }
    }
    ZeroComparison { rows }
}
