//! Polynomial transformations of block encodings.
//!
//! Singular value transformation is applied at the SVD level: the block is
//! decomposed, its singular values are mapped through a bounded polynomial,
//! and the result is completed to a unitary with one extra qubit.

mod fpaa;
mod poly;
mod svt;

pub use fpaa::{chebyshev_t, FixedPoint};
pub use poly::{threshold_polynomial, BoundedPolynomial, Parity, ThresholdPolynomial};
pub use svt::{apply_svt, extended_layout, BlockEncoding, SvtUnitary};
