//! Local Euler factors, their pole lattices, the archimedean factor and
//! the truncated Euler product.

pub mod local;
pub mod poles;
pub mod product;

pub use local::{local_factor_eval, local_roots, LocalFactor};
pub use poles::{detect_coincident_poles, enumerate_poles, Coincidence, Pole, PoleFamily, PoleLattice};
pub use product::{gamma_factor_eval, truncated_euler_eval, EulerProduct, GammaFactor};
