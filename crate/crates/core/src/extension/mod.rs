//! Univariate polynomials, multilinear extensions over the boolean cube, and
//! grid low-degree extensions.

mod grid;
mod mle;
mod poly;

pub use grid::{lagrange_basis_all, lagrange_basis_at, GridLdeState};
pub use mle::{chi_eval, chi_index, index_bits, mle_full_eval, num_vars, padded_table, MleEvalState};
pub use poly::{interpolate_consecutive, lagrange_interpolate, UnivariatePoly};
