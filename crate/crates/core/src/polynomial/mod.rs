//! Dense univariate and bivariate polynomials, characteristic polynomials of
//! the banded secular matrices, root finding and resultants.

mod bipoly;
mod poly;
mod resultant;
mod roots;

pub use bipoly::{BiPoly, Var};
pub use poly::Poly;
pub use resultant::{interpolate, resultant, sylvester};
pub use roots::{
    merge_split_roots, polish_real_root, real_filter, roots, roots_with, Root, RootSet, CLUSTER_RTOL, REAL_RTOL,
};

use crate::recurrence::QuadDiagonalMatrix;
use crate::scalar::Scalar;

/// `det(m - λI)` as a polynomial in `λ`, by the leading-minor recurrence
/// for Hessenberg band matrices. Exact for rational entries.
pub fn char_poly<T: Scalar>(m: &QuadDiagonalMatrix<T>) -> Poly<T> {
    let shifted = m.map(|v| Poly::constant(v.clone()));
    let shifted = shifted.with_diagonal(|v| v - Poly::x());
    shifted.determinant()
}

/// Exact determinant of a band matrix with entries in `(E, d)`.
pub fn det_bipoly<T: Scalar>(m: &QuadDiagonalMatrix<BiPoly<T>>) -> BiPoly<T> {
    m.determinant()
}
