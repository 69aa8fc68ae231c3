//! Quantum subroutines: output verification, success flagging, the indicator oracle,
//! amplified sampling and Goldreich–Levin Fourier sampling.

mod flag;
mod gl;
mod indicator;
mod sample;
mod verified;
mod verify;

pub use flag::{planted_flag_oracle, FlagOracle};
pub use gl::{gl_circuit, gl_fourier_sample, learn_heavy_characters, multinomial_counts, required_shots, GlDistribution, LearnReport};
pub use indicator::{indicator_oracle, indicator_t_for, partition, partition_between, sampling_oracle, svt_oracle, IndicatorOracle, Partition};
pub use sample::{q_sample, q_sample_law, sample_schedule, SampleLaw};
pub use verified::{alg_verified, verified_cost, verified_flag_probability, verified_layout, VerifiedAlg};
pub use verify::{
    accept_probability, build_q_verify, mismatch_amplitude_bound, q_verify, verify_circuit, verify_cost, verify_layout, verify_schedule,
    VerifyCircuit, VerifyOutcome,
};

#[cfg(test)]
mod tests;
