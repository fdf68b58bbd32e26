use thiserror::Error;

/// Errors raised by the model checker.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument falls outside the domain of the operation (unknown
    /// candidate, voter or state, malformed vote, cyclic constraints).
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive search or expansion would exceed a configured cap.
    #[error("resource limit exceeded: {what} needs {needed}, limit is {limit}")]
    Resource {
        what: String,
        needed: u128,
        limit: u128,
    },

    /// Formula or scenario text could not be parsed.
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A scenario parsed but does not describe a valid knowledge profile.
    #[error("invalid scenario (line {line}): {message}")]
    Validation { line: usize, message: String },

    /// An operation precondition does not hold for the given model.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A public announcement was attempted with a formula false at the point.
    #[error("announcement failed: formula is false at the point `{point}`")]
    AnnouncementFailed { point: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        Error::Resource {
            what: what.into(),
            needed,
            limit,
        }
    }
}

/// Caps on exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest candidate count for which all m! ballots are enumerated.
    pub max_ballot_candidates: usize,
    /// Largest number of states an expansion may produce.
    pub max_states: usize,
    /// Largest number of profiles (m!)^n a generated defining formula may range over.
    pub max_formula_profiles: u128,
    /// Largest number of conditional profiles an equilibrium search may visit.
    pub max_search: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ballot_candidates: 6,
            max_states: 10_000,
            max_formula_profiles: 20_000,
            max_search: 2_000_000,
        }
    }
}
