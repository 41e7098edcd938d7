//! Fourier coefficients of eigenforms and their smooth/complement splits.

pub mod coeffs;
pub mod hecke;
pub mod masks;
pub mod spec;

pub use coeffs::{
    delta_coefficients, delta_coefficients_with_budget, format_coefficients, load_coefficients, parse_coefficients,
    read_cached, write_coefficients, CacheHeader, Coefficient, CoefficientSource, CoefficientTable,
};
pub use hecke::{hecke_consistency_check, HeckeReport};
pub use masks::{complement_series, smooth_subseries, SubseriesMask};
pub use spec::{Character, EigenformSpec};
