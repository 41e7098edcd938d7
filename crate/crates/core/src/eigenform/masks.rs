use rug::Integer;

use super::coeffs::{Coefficient, CoefficientTable};
use crate::arith::{nth_prime, smallest_prime_factors};

/// Flags the p_N-smooth indices 1..=n_max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubseriesMask {
    n_factors: usize,
    p_n: u64,
    smooth: Vec<bool>,
}

impl SubseriesMask {
    pub fn new(n_factors: usize, n_max: usize) -> Self {
        assert!(n_factors >= 1, "at least one Euler factor is required");
        let p_n = nth_prime(n_factors);
        let spf = smallest_prime_factors(n_max);
        let mut smooth = vec![false; n_max + 1];
        if n_max >= 1 {
            smooth[1] = true;
        }
        // n is smooth iff n / spf(n) is and spf(n) ≤ p_N; the largest prime
        // factor is inherited from the cofactor.
        let mut largest = vec![0u32; n_max + 1];
        for n in 2..=n_max {
            let p = spf[n];
            largest[n] = p.max(largest[n / p as usize]);
            smooth[n] = largest[n] as u64 <= p_n;
        }
        Self { n_factors, p_n, smooth }
    }

    pub fn n_factors(&self) -> usize {
        self.n_factors
    }

    pub fn p_n(&self) -> u64 {
        self.p_n
    }

    pub fn n_max(&self) -> usize {
        self.smooth.len() - 1
    }

    pub fn is_smooth(&self, n: usize) -> bool {
        self.smooth[n]
    }
}

fn masked(table: &CoefficientTable, n_factors: usize, keep_smooth: bool) -> Vec<Coefficient> {
    let mask = SubseriesMask::new(n_factors, table.n_max());
    table
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if mask.is_smooth(i + 1) == keep_smooth {
                c.clone()
            } else {
                Coefficient::Exact(Integer::new())
            }
        })
        .collect()
}

/// b_n^{(N)}: a_n on p_N-smooth n, zero elsewhere.
pub fn smooth_subseries(table: &CoefficientTable, n_factors: usize) -> Vec<Coefficient> {
    masked(table, n_factors, true)
}

/// c_n^{(N)} = a_n − b_n^{(N)}.
pub fn complement_series(table: &CoefficientTable, n_factors: usize) -> Vec<Coefficient> {
    masked(table, n_factors, false)
}
