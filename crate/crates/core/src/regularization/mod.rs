//! Principal parts of the truncated Euler product and the regularized Λ_N.

pub mod contour;
pub mod equidist;
pub mod integral;
pub mod laurent;
pub mod ppsum;

pub use contour::{pp_bound_probe, sparse_contour, sparse_distance, PpBoundReport, SparseContour};
pub use equidist::{equidist_probe, star_discrepancy, EquidistReport};
pub use integral::{error_integral, integral_extent};
pub use laurent::{contour_principal_part, gamma_pole_weight, gamma_residue, PrincipalPart, PrincipalPartSummary};
pub use ppsum::{
    default_truncation, lambda_N_regularized, laurent_principal_part, principal_part_sum, PoleCluster, PoleSource,
    PrincipalPartSet,
};
