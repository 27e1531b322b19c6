//! Approximation of kernels in τ: step functions, finite-rank functions,
//! the defect profile and ε-net compactness evidence.
//!
//! A defect profile that decays to zero is consistent with virtual
//! continuity and one that stalls with its failure; on a finite grid
//! neither is a proof.

mod compact;
mod fit;
mod oracle;
mod rank;
mod step;

pub use compact::{compactness_certificate, CompactnessCertificate, CompactnessOutcome};
pub use fit::{
    defect_profile, fit_step, DefectEntry, DefectProfile, FitOptions, StepFit, WarmStart,
    DEFAULT_RESTARTS, EXHAUSTIVE_PAIRS, POLISH_MAX_CELLS,
};
pub use oracle::{fit_step_oracle, ORACLE_MAX_CLASSES, ORACLE_MAX_SIDE};
pub use rank::{finite_rank_fit, FiniteRankFunction, RankFit};
pub use step::{canonical_labels, eval_step, StepFunction};
