use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Family parameters or a generic move-set list violate a construction bound.
    #[error("invalid parameters: {0}")]
    Parameter(String),
    /// A position does not fit the spec it is used with.
    #[error("invalid position: {0}")]
    Position(String),
    /// A move violates one of the legality invariants.
    #[error("illegal move: {0}")]
    IllegalMove(String),
    /// An operation was called on a game or position outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A search exceeded its configured budget. Never a wrong answer, only no answer.
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    /// A closed form and the position disagree in a way that should be impossible.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable machine-readable code, used in JSON error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "invalid_parameters",
            Error::Position(_) => "invalid_position",
            Error::IllegalMove(_) => "illegal_move",
            Error::Domain(_) => "domain",
            Error::Resource(_) => "resource_exhausted",
            Error::Inconsistent(_) => "internal",
        }
    }
}
