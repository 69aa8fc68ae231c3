//! Planted average-case algorithms, their success profiles and threshold sets.

mod planted;
mod profile;

pub use planted::{complete_unitary, make_planted_alg, Instance, MatrixRule, PlantedAlg, Policy};
pub use profile::{
    check_band, coset_profile, default_k, footnote_adversary, half_space_profile, random_profile, random_threshold,
    spread_profile, threshold_set, verify_density, BandMode, BandReport, DensityReport, SuccessProfile, ThresholdPair,
};

#[cfg(test)]
mod tests;
