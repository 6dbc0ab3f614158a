use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KitError {
    #[error("task outputs are not pairwise disjoint: {0}")]
    OverlappingOutputs(String),

    #[error("task inputs are not pairwise disjoint: {0}")]
    OverlappingInputs(String),

    #[error("operands share substrate `{0}`")]
    SharedSubstrate(String),

    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),

    #[error("network contains a cycle through node `{0}`")]
    CycleDetected(String),

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("attributes are not pairwise disjoint: {0}")]
    NotDisjoint(String),

    #[error("invalid attribute: {0}")]
    InvalidAttribute(String),

    #[error("attribute `{0}` is not preparable")]
    NotPreparable(String),

    #[error("a computation variable needs at least two attributes, got {0}")]
    TooFewAttributes(usize),

    #[error("labels do not match attributes: {0}")]
    LabelMismatch(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("no fixed-point-free permutation exists on {0} label(s)")]
    NoFixedPointFreePermutation(usize),

    #[error("budget exceeded: requested {requested} states, bound is {bound} (covered {covered} model/variable pairs)")]
    BudgetExceeded {
        requested: usize,
        bound: usize,
        covered: usize,
    },

    #[error("not representable: {0}")]
    Unrepresentable(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("duplicate name `{0}`")]
    Duplicate(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid model ({invariant}): {detail}")]
    Validation {
        invariant: Invariant,
        detail: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

/// The model-file invariant a `Validation` error names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    Norm,
    UnresolvedName,
    Duplicate,
    Dimension,
    Kind,
    Disjointness,
    Labels,
}

impl std::fmt::Display for Invariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

impl From<std::io::Error> for KitError {
    fn from(e: std::io::Error) -> Self {
        KitError::Io(e.to_string())
    }
}

pub type KitResult<T> = Result<T, KitError>;
