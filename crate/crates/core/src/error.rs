use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("instance has {found} values but the schema declares {expected} attributes")]
    ArityMismatch { expected: usize, found: usize },
    #[error("attribute `{attribute}`: value `{value}` is not in the declared value set")]
    UnknownNominalValue { attribute: String, value: String },
    #[error("attribute `{attribute}`: numeric value is not finite")]
    NonFiniteNumeric { attribute: String },
    #[error("attribute `{attribute}`: expected a {expected} value")]
    KindMismatch {
        attribute: String,
        expected: &'static str,
    },
    #[error("cannot build a grid from an empty value list")]
    EmptyValues,
    #[error("grid size must be at least 1")]
    InvalidGridSize,
    #[error("sigma must be positive and finite")]
    InvalidSigma,
    #[error("non-finite input to a membership function")]
    NonFiniteInput,
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("attribute `{attribute}` is not nominal")]
    NonNominalAttribute { attribute: String },
    #[error("numeric attribute `{attribute}` has no grid")]
    MissingGrid { attribute: String },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("hierarchy is empty")]
    EmptyHierarchy,
    #[error("invalid tree snapshot: {0}")]
    InvalidSnapshot(String),
    #[error("hierarchy audit failed: {0}")]
    Audit(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
