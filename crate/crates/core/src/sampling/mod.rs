//! Empirical matrix distributions, their two-sample comparison, and the
//! random-points surrogate for virtual continuity.
//!
//! All randomness comes from ChaCha streams keyed by `(seed, index)`, so
//! parallel execution does not change any result.

mod energy;
mod md;
mod random_points;

pub use energy::{compare_md, Comparison, DEFAULT_PERMUTATIONS};
pub use md::{sample_md, MDSample};
pub use random_points::{
    random_points_test, ClusterPartition, RandomPointsOutcome, RandomPointsParams,
};
