//! First-excess operator calculus: the R-transform turning threshold-indexed
//! sequences into truncated generating-function data, its inverse D-operator
//! (truncated-coefficient partial summation), and the spot check of the
//! analytic first-excess functional against the exact lattice law.

pub mod identity;
pub mod series;

pub use identity::{identity_check, IdentityCheckConfig, IdentityReport, IdentityStatus};
pub use series::{
    d_inverse_1d, r_transform, r_transform_1d, r_transform_2d, Coeff, SequenceGrid, TruncatedSeries,
};
