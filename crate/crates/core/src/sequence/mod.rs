//! Converging sequences, numerical discontinuity-jump estimates and the
//! suites of bound checks run on built-in families.

mod estimate;
pub mod families;
mod functional;
mod lift;
mod sample;
pub mod suites;

pub use estimate::{dj_estimate, ConvergenceReport, DjEstimate, Generator, StateSequence};
pub use families::{builtin_families, FamilyInfo};
pub use functional::Functional;
pub use lift::lift_by_purification;
pub use sample::{padded_distance, Correlated, Sample};
pub use suites::{suite_claim, suite_ids, suite_run, CheckRow, Relation, RowBasis, SuiteParams, SuiteReport};

/// Diagonal families: `n = 2⁴ … 2¹⁶`.
pub fn diagonal_grid() -> Vec<usize> {
    (4..=16).map(|k| 1usize << k).collect()
}

/// Families needing dense eigensolves: half-octave steps from 16 to 128,
/// so a window of 3 still has twice its length in points.
pub fn dense_grid() -> Vec<usize> {
    vec![16, 23, 32, 45, 64, 91, 128]
}

/// Fixed-dimension ramps: even powers `2⁴ … 2¹⁶`.
pub fn ramp_grid() -> Vec<usize> {
    (2..=8).map(|k| 1usize << (2 * k)).collect()
}

pub const DEFAULT_WINDOW: usize = 3;
