//! Minimal dense real linear algebra: products, norms, elimination,
//! rank-revealing reduction, full-rank factorization, spectral diagnostics.
//!
//! Everything is `f64`, row-major, and immutable after construction. Inner
//! products accumulate strictly left to right — no reordering, no FMA — so
//! results are bit-reproducible across platforms. That contract is what keeps
//! iteration counts of the solver stable.
//!
//! Rank decisions use a relative pivot threshold (`DEFAULT_TOL` × the largest
//! absolute entry of the matrix being reduced). The threshold is a parameter
//! everywhere rank is decided; 1e-10 is this crate's choice of default, since
//! no canonical numerical rank criterion exists for the problem class.

mod matrix;
mod reduce;
mod spectral;

pub use matrix::{LalgError, Matrix, Vector};
pub use reduce::{
    full_rank_factorization, full_rank_factorization_with_column_order, gaussian_solve, invert,
    rref, solve_matrix, RankFactorization, Rref,
};
pub use spectral::{nilpotency_degree, spectral_radius_estimate};

/// Relative pivot threshold used for rank decisions unless overridden.
pub const DEFAULT_TOL: f64 = 1e-10;
