use thiserror::Error;

/// Errors raised by the library. Validation problems (bad input) and
/// numerical failures (non-convergence, degenerate geometry) are kept apart
/// so callers can map them to different exit statuses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("matrix {0} is not in the level-2 congruence group (det must be ±1, entries ≡ identity mod 2)")]
    NotInGamma2(String),
    #[error("matrix {matrix} is {kind}, a hyperbolic class is required")]
    NotHyperbolic { matrix: String, kind: String },
    #[error("integer overflow while multiplying class matrices")]
    Overflow,
    #[error("no positive conjugate found within {0} elementary moves")]
    ConjugatorSearchExhausted(usize),
    #[error("point is singular: all chart denominators vanish")]
    SingularPoint,
    #[error("degenerate conic slice: {0}")]
    DegenerateConic(String),
    #[error("orbit stayed bounded for the whole budget of {0} iterations")]
    BoundedAtBudget(usize),
    #[error("empty set: {0}")]
    Empty(String),
    #[error("substitution rejected: {0}")]
    Substitution(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::NotInGamma2(_)
                | Error::NotHyperbolic { .. }
                | Error::Substitution(_)
                | Error::DegenerateConic(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
