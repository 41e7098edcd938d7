//! Precision context and the special functions everything else consumes.

pub mod cauchy;
pub mod gamma;
pub mod incgamma;
pub mod precision;
pub mod quad;

pub use cauchy::{cauchy_derivative, AnalyticFn};
pub use gamma::{gamma, ln_gamma};
pub use incgamma::{decay_threshold, upper_incomplete_gamma, Regime};
pub use precision::{abs_f64, log2_abs, parse_real, to_decimal, BigComplex, BigReal, Estimate, PrecisionContext};
