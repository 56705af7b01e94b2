use thiserror::Error;

/// Errors raised while building or evaluating entropy instances.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a discrete space needs at least one atom")]
    EmptySpace,

    #[error("space mismatch: {0} atoms vs {1} atoms")]
    SpaceMismatch(usize, usize),

    #[error("atom {atom} is out of range for a space of {n} atoms")]
    AtomOutOfRange { atom: usize, n: usize },

    #[error("invalid mass {value} at atom {atom}")]
    InvalidMass { atom: usize, value: f64 },

    #[error("probability measure has total mass {0}, expected 1")]
    NotNormalized(f64),

    #[error("sub-probability measure has total mass {0} > 1")]
    ExceedsUnit(f64),

    #[error("not a μ-partition: {0}")]
    NotPartition(String),

    #[error("family is not finer than the cover: block {0} lies in no cover set")]
    NotFiner(usize),

    #[error("family does not cover the support: uncovered mass {0}")]
    NotCover(f64),

    #[error(
        "order {0} is invalid: must lie in (0, ∞) and differ from 1 (use `shannon` for order 1)"
    )]
    InvalidAlpha(f64),

    #[error("unknown functional {0:?}; expected `shannon`, `renyi:ALPHA` or `tsallis:ALPHA`")]
    UnknownFunctional(String),

    #[error("mass {0} lies outside [0, 1]")]
    MassOutOfRange(f64),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid division: {0}")]
    InvalidDivision(String),

    #[error("invalid HLP input: {0}")]
    InvalidHlpInput(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("search budget of {0} candidates exhausted before optimality was certified")]
    BudgetExceeded(u64),

    #[error("{0} assignments exceed the enumeration cap of {1}")]
    TooManyAssignments(u128, u128),

    #[error("unsupported functional {0:?} for this operation")]
    Unsupported(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
