use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolantError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite floating point result")]
    NumericOverflow,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("arity {arity} exceeds the cap of {cap}")]
    ArityTooLarge { arity: usize, cap: usize },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("intermediate arity {arity} exceeds the contraction cap {cap}; raise the cap or use brute force")]
    CapExceeded { arity: usize, cap: usize },
    #[error("family precondition violated: {0}")]
    FamilyViolation(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("grid is not bipartite: {0}")]
    NotBipartite(String),
    #[error("rewrite rule not applicable: {0}")]
    RuleInapplicable(String),
    #[error("variable {0} is never used")]
    UnusedVariable(usize),
    #[error("degree {degree} too large (cap {cap})")]
    DegreeTooLarge { degree: usize, cap: usize },
    #[error("label violation: {0}")]
    LabelViolation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("parameter lands in an excluded set: {0}")]
    ParameterDegenerate(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

pub type Result<T> = std::result::Result<T, HolantError>;
