//! Exact arithmetic and linear algebra over small prime fields.
//!
//! Values are stored natively as `u32` residues; every modulus used in this
//! crate is a small prime (at most [`MAX_PRIME`]), so products fit in `u64`
//! without any big-number support.

mod element;
mod matrix;
mod rref;

pub use element::{field_arith, is_prime, ArithOp, FieldElement, PrimeField, MAX_PRIME};
pub use matrix::{inner_product, matvec, FpMatrix, FpVector};
pub use rref::{rref_with_pivots, RrefResult};
