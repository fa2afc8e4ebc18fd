use thiserror::Error;

/// Which admissibility condition a coherent-state parameter violates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    /// `w·w <= 0`: the state is not normalizable.
    NonPositiveNorm { ww: f64 },
    /// `w⁰ <= 0`: `w` is timelike but backward pointing.
    BackwardTimelike { w0: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonPositiveNorm { ww } => write!(f, "w·w = {ww:e} is not positive"),
            Violation::BackwardTimelike { w0 } => write!(f, "w⁰ = {w0:e} is not positive"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular parameter: {what} (|value| = {modulus:e})")]
    SingularParameter { what: &'static str, modulus: f64 },

    #[error("inadmissible coherent-state parameter: {0}")]
    Inadmissible(Violation),

    #[error("matrix is not a proper rotation (deviation {deviation:e})")]
    NotRotation { deviation: f64 },

    #[error("series diverges: |lambda| = {modulus} >= 1")]
    DivergentSeries { modulus: f64 },

    #[error("{what} did not converge: tail estimate {estimate:e} exceeds {tolerance:e}")]
    NotConverged {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("Gauss-Laguerre root finding failed at node {index}")]
    RootFinding { index: usize },

    #[error("overflow evaluating {what} at x = {x}")]
    Overflow { what: &'static str, x: f64 },

    #[error("k and m are not orthogonal (k·m = {dot:e})")]
    NotOrthogonal { dot: f64 },

    #[error("trajectory sample at theta = {theta} is inadmissible: {violation}")]
    InadmissibleSample { theta: f64, violation: Violation },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::RootFinding { .. }
                | Error::Overflow { .. }
                | Error::InadmissibleSample { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
