//! Worst-case reduction for linear problems and its matrix-shift and large-field variants.

mod config;
mod oracles;
mod run;
mod variants;

pub use crate::avgcase::MatrixRule;
pub use config::{BandChoice, Mode, ReductionConfig};
pub use oracles::{alg_boost, derive_seed, threshold_degree, AlgRunner, Verifier};
pub use run::{run_reduction, AttemptRecord, EpochRecord, Outcome, Preparation, ReductionTrace, Reducer};
pub use variants::{large_field_reduce, matrix_shift_reduce, FieldOutcome, ShiftOutcome, TwoSidedAlg};
