use thiserror::Error;

/// Run-time failures of a generator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid range: lo {lo} > hi {hi}")]
    InvalidRange { lo: i64, hi: i64 },
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("negative weight {0}")]
    NegativeWeight(i64),
    #[error("weighted union over an empty list of choices")]
    NoChoices,
    #[error("negative size {0}")]
    NegativeSize(i64),
    #[error("type mismatch at run time: {0}")]
    TypeMismatch(&'static str),
    #[error("cannot decode value: {0}")]
    Decode(String),
}

/// Failures while building or compiling a staged generator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StageError {
    #[error("weighted union over an empty list of choices")]
    NoChoices,
    #[error("recursive handle used outside its fixed point")]
    EscapedHandle,
    #[error("recursive call arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("variable v{0} used out of scope")]
    ScopeViolation(u32),
    #[error("variable v{0} bound more than once")]
    DuplicateBinder(u32),
    #[error("call to undefined definition {0}")]
    UnknownDef(usize),
    #[error("ill-formed program: {0}")]
    IllFormed(String),
}
