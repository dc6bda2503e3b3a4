//! Holant partition functions, holographic transformations and the
//! conservative dichotomy for Boolean holant problems.

pub mod classify;
pub mod error;
pub mod evaluation;
pub mod formulas;
pub mod generators;
pub mod grids;
pub mod numerics;
pub mod reductions;
pub mod signatures;
pub mod suites;
pub mod synthesis;

pub use error::{HolantError, Result};
