pub mod error;
pub mod ff;
pub mod space;
pub mod fourier;
pub mod additive;
pub mod qsim;
pub mod qsvt;
pub mod avgcase;
pub mod qsub;
pub mod reduction;
pub mod harness;
