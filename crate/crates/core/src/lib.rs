//! Truncated Euler product approximations to completed L-functions of
//! Hecke cusp eigenforms.

pub mod approximation;
pub mod arith;
pub mod eigenform;
pub mod error;
pub mod euler;
pub mod numerics;
pub mod regularization;
pub mod zerofinder;

pub use approximation::{ApproxConfig, Mode};
pub use eigenform::{CoefficientTable, EigenformSpec};
pub use error::{Error, Result};
pub use numerics::{BigComplex, BigReal, Estimate, PrecisionContext};
pub use zerofinder::ZeroRecord;
