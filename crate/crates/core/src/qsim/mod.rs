//! Dense mixed-radix statevector simulation.
//!
//! Wires carry a name and a dimension (field elements, index registers or
//! qubit flags). Oracle gates carry a label and every application is counted
//! in a [`QueryCounter`].

mod arith;
mod gate;
mod layout;
mod state;

pub use arith::{build_mv_neq_b, build_umv, build_umv_minus_b};
pub use gate::{check_unitary, oracle_from_matrix, oracle_from_vector, qft_matrix, CMatrix, Gate, GateKind, Operator};
pub use layout::{Layout, Wire};
pub use state::{sample_index, Circuit, QueryCounter, StateVector};
