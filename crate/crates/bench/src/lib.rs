//! Shared inputs for the benchmarks.

use lapprox_core::eigenform::{delta_coefficients, CoefficientTable, EigenformSpec};
use lapprox_core::numerics::PrecisionContext;

pub struct Fixture {
    pub ctx: PrecisionContext,
    pub spec: EigenformSpec,
    pub table: CoefficientTable,
}

impl Fixture {
    /// Δ with `n_max` coefficients at `bits` of precision.
    pub fn delta(bits: u32, n_max: usize) -> Self {
        Self {
            ctx: PrecisionContext::new(bits).expect("valid precision"),
            spec: EigenformSpec::delta(),
            table: delta_coefficients(n_max).expect("coefficients"),
        }
    }
}
