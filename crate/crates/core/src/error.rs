use thiserror::Error;

/// Errors surfaced by the fallible operations of this crate. Invariant
/// violations that can only come from library bugs panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {0:?} as a dyadic rational (expected p or p/2^k)")]
    ParseDyadic(String),

    #[error("interval has nonpositive length")]
    EmptyInterval,

    #[error("interval is not inside the [0,1] range covered by the two grids")]
    CoverOutOfRange,

    #[error("field file: {0}")]
    FieldFormat(String),

    #[error("field resolution 2^-{field_n} is coarser than requested level {requested}")]
    ResolutionExceeded { field_n: u32, requested: u32 },

    #[error("parameter out of range: {0}")]
    BadParameter(String),

    #[error("enumerated family would exceed the configured cap of {cap} members")]
    FamilyCapExceeded { cap: usize },

    #[error("discretization failed: {0}")]
    DiscretizationFailed(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
