use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate interval [{lo}, {hi}]")]
    DegenerateInterval { lo: String, hi: String },
    #[error("interval [{lo}, {hi}] leaves the unit interval")]
    OutsideUnitInterval { lo: String, hi: String },
    #[error("ambient dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("cube touches the boundary of the unit cube: {0}")]
    TouchesBoundary(String),
    #[error("cubes {0} and {1} have overlapping interiors")]
    Overlap(usize, usize),
    #[error("complement disconnected")]
    ComplementDisconnected,
    #[error("no free path between the requested cubes")]
    NoPath,
    #[error("index sets do not match: {0}")]
    IndexMismatch(String),
    #[error("index {0} is not in the index set")]
    UnknownIndex(usize),
    #[error("sequence is not null: {0}")]
    NotNull(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid sub-domain witness: index {0} is not contained in its parent")]
    InvalidWitness(usize),
    #[error("schedules do not chain: stage {0} ends where stage {1} does not start")]
    ChainMismatch(usize, usize),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("fixed index {0} differs between source and target")]
    FixedMoved(usize),
    #[error("nonpositive amplitude")]
    NonpositiveAmplitude,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{lemma}: {source}")]
    Construction {
        lemma: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Wraps an error with the constructor that surfaced it.
    pub fn in_lemma(self, lemma: &'static str) -> Error {
        match self {
            e @ Error::Construction { .. } => e,
            e => Error::Construction {
                lemma,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
