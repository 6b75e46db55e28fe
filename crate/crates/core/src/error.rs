use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors raised by network construction, evaluation and search.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DuplicateLabel(String),
    ReservedLabel(String),
    UnknownEndpoint(String),
    DuplicateEdge { src: String, dst: String },
    WeightOutOfRange { src: String, dst: String, weight: f64 },
    WeightSumExceedsOne { node: String, sum: f64 },
    /// The network has a directed cycle among non-void nodes; carries one witness cycle.
    CyclicNetwork { cycle: Vec<String> },
    VoidInPermanentSet,
    VoidInSeedSet,
    VoidTarget,
    UnknownNode(String),
    MissingThreshold { expected: usize, found: usize },
    CellBudgetExceeded { budget: u64 },
    CandidateAlreadySeeded(String),
    SearchBudgetExceeded { required: u128, limit: u128 },
    NotFound,
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateLabel(l) => write!(f, "duplicate node label `{l}`"),
            Error::ReservedLabel(l) => write!(f, "label `{l}` is reserved"),
            Error::UnknownEndpoint(l) => write!(f, "edge endpoint `{l}` is not a declared node"),
            Error::DuplicateEdge { src, dst } => write!(f, "parallel edge {src} -> {dst}"),
            Error::WeightOutOfRange { src, dst, weight } => {
                write!(f, "edge {src} -> {dst} has weight {weight}, expected a value in (0, 1]")
            }
            Error::WeightSumExceedsOne { node, sum } => {
                write!(f, "outgoing weights of `{node}` sum to {sum} > 1")
            }
            Error::CyclicNetwork { cycle } => {
                write!(f, "network has a directed cycle: ")?;
                for (i, l) in cycle.iter().enumerate() {
                    if i > 0 {
                        write!(f, " -> ")?;
                    }
                    write!(f, "{l}")?;
                }
                if let Some(first) = cycle.first() {
                    write!(f, " -> {first}")?;
                }
                Ok(())
            }
            Error::VoidInPermanentSet => write!(f, "the void node cannot be a permanent seed"),
            Error::VoidInSeedSet => write!(f, "the void node cannot be seeded"),
            Error::VoidTarget => write!(f, "the void node cannot be amplified"),
            Error::UnknownNode(l) => write!(f, "unknown node `{l}`"),
            Error::MissingThreshold { expected, found } => {
                write!(f, "threshold configuration covers {found} nodes, network has {expected}")
            }
            Error::CellBudgetExceeded { budget } => {
                write!(f, "threshold cell enumeration exceeds the budget of {budget} cells")
            }
            Error::CandidateAlreadySeeded(l) => write!(f, "node `{l}` is already seeded"),
            Error::SearchBudgetExceeded { required, limit } => {
                write!(f, "exhaustive search needs {required} evaluations, limit is {limit}")
            }
            Error::NotFound => write!(f, "search exhausted without finding a witness"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
