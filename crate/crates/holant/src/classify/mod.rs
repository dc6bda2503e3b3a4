//! Entanglement classification of ternary functions and the conservative
//! dichotomy classifier.

mod dichotomy;
mod ternary;

pub(crate) use ternary::cube_root;
pub use dichotomy::{classify_set, DichotomyReport, KChoice, OrthogonalCondition, Verdict};
pub use ternary::{
    classify_symmetric_ternary, classify_ternary, hyperdeterminant, recover_rank2, Rank2Split, TernaryClass,
    TernaryTag, HYPERDET_TOL,
};
