use std::fmt;

use thiserror::Error;

/// A single broken model invariant, reported by parameter validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Community `community` (0-based) has no members.
    EmptyCommunity { community: usize },
    /// A label falls outside `0..k`.
    LabelOutOfRange { node: usize, label: usize },
    AsymmetricP { row: usize, col: usize, diff: f64 },
    /// `sigma_min / sigma_max` of the connectivity matrix.
    RankDeficientP { ratio: f64 },
    UnnormalizedP { max_abs: f64 },
    NonpositiveTheta { node: usize, value: f64 },
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyCommunity { community } => {
                write!(f, "community {} is empty", community + 1)
            }
            Violation::LabelOutOfRange { node, label } => {
                write!(f, "node {node} has label {label} outside the community range")
            }
            Violation::AsymmetricP { row, col, diff } => {
                write!(f, "P is not symmetric at ({row},{col}), |P(k,l)-P(l,k)| = {diff:e}")
            }
            Violation::RankDeficientP { ratio } => {
                write!(f, "P is rank deficient (sigma_K/sigma_1 = {ratio:e})")
            }
            Violation::UnnormalizedP { max_abs } => {
                write!(f, "max |P(k,l)| must be 1, found {max_abs}")
            }
            Violation::NonpositiveTheta { node, value } => {
                write!(f, "theta({node}) = {value} is not positive")
            }
            Violation::DimensionMismatch { what, expected, found } => {
                write!(f, "{what}: expected {expected}, found {found}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("entry ({row},{col}) has mean {mean}, outside the support of the {distribution} distribution")]
    DistributionDomain {
        row: usize,
        col: usize,
        mean: f64,
        distribution: &'static str,
    },

    #[error("invalid distribution parameter: {0}")]
    InvalidDistribution(String),

    #[error("matrix is not symmetric at ({row},{col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix entry ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("requested {k} eigenpairs from a {n}x{n} matrix")]
    KOutOfRange { k: usize, n: usize },

    #[error("eigensolver did not converge within {0} iterations")]
    ConvergenceFailure(usize),

    #[error("k-means needs at least {k} points, got {n}")]
    TooFewPoints { n: usize, k: usize },

    #[error("invalid k-means configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("exhaustive permutation search supports K <= {max}, got K = {k}")]
    KTooLargeForExhaustive { k: usize, max: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("edge references unknown node id {0}")]
    DanglingEdge(i64),

    #[error("labels are not contiguous: {0}")]
    NonContiguousLabels(String),

    #[error("dataset {0} has no ground-truth labels")]
    MissingGroundTruth(String),

    #[error("sweep value {value} of {param}: {source}")]
    Sweep {
        param: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for errors caused by reading or writing files.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Sweep { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
