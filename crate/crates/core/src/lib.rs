//! Quantum-probability tools for statistical modelling.
//!
//! - [`hilbert`]: Hermitian operators, spectral decompositions, operator functions.
//! - [`born`]: density operators and trace-rule probabilities.
//! - [`symmetry`]: finite group actions, orbits, permissible parameters.
//! - [`contrast`]: quantum and Bayesian priors for treatment contrasts.
//! - [`reduction`]: PLS and perceptron model reduction.
//! - [`io`]: JSON and CSV formats.
//!
//! ```
//! use qprior::contrast::{quantum_prior_binary, quantum_prior_binary_born, DirectionPair};
//!
//! let d = DirectionPair::treatment_example();
//! let closed = quantum_prior_binary(&d);
//! let born = quantum_prior_binary_born(&d).unwrap();
//! assert!((closed - 1.0 / 3.0).abs() < 1e-12);
//! assert!((closed - born).abs() < 1e-12);
//! ```

pub use nalgebra;

pub mod born;
pub mod contrast;
pub mod hilbert;
pub mod io;
pub mod reduction;
pub mod simulate;
pub mod symmetry;

use born::BornError;
use contrast::PriorError;
use hilbert::HilbertError;
use io::IoError;
use reduction::ReductionError;
use symmetry::SymmetryError;

/// Broad failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid flags or configuration.
    Config,
    /// Input data that cannot be used.
    Data,
    /// A numerical procedure failed on valid input.
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numeric => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct Error {
    pub kind: ErrorKind,
    pub message: String,
}

impl Error {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Config, message)
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Data, message)
    }

    /// Reclassifies anything except numerical failures, for errors raised
    /// while interpreting a particular input.
    pub fn as_kind(self, kind: ErrorKind) -> Self {
        match self.kind {
            ErrorKind::Numeric => self,
            _ => Self { kind, ..self },
        }
    }
}

impl From<HilbertError> for Error {
    fn from(e: HilbertError) -> Self {
        let kind = match e {
            HilbertError::EigensolverFailure { .. } | HilbertError::DomainError { .. } => {
                ErrorKind::Numeric
            }
            _ => ErrorKind::Data,
        };
        Error::new(kind, e.to_string())
    }
}

impl From<BornError> for Error {
    fn from(e: BornError) -> Self {
        match e {
            BornError::Hilbert(h) => h.into(),
            BornError::NumericOutOfRange { .. } | BornError::ComplexExpectation { .. } => {
                Error::new(ErrorKind::Numeric, e.to_string())
            }
            _ => Error::data(e.to_string()),
        }
    }
}

impl From<SymmetryError> for Error {
    fn from(e: SymmetryError) -> Self {
        Error::data(e.to_string())
    }
}

impl From<PriorError> for Error {
    fn from(e: PriorError) -> Self {
        match e {
            PriorError::Hilbert(h) => h.into(),
            PriorError::Born(b) => b.into(),
            PriorError::NoConditioningSamples => Error::new(ErrorKind::Numeric, e.to_string()),
            PriorError::NotConditionalDistribution { .. } => Error::data(e.to_string()),
            _ => Error::config(e.to_string()),
        }
    }
}

impl From<ReductionError> for Error {
    fn from(e: ReductionError) -> Self {
        let kind = match e {
            ReductionError::RankDeficient { .. } => ErrorKind::Numeric,
            ReductionError::KOutOfRange { .. }
            | ReductionError::MOutOfRange { .. }
            | ReductionError::UnknownActivation(_) => ErrorKind::Config,
            _ => ErrorKind::Data,
        };
        Error::new(kind, e.to_string())
    }
}

impl From<IoError> for Error {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Hilbert(h) => h.into(),
            IoError::Born(b) => b.into(),
            IoError::Symmetry(s) => s.into(),
            IoError::Prior(p) => p.into(),
            IoError::Csv { .. } => Error::data(e.to_string()),
            IoError::Read { .. } | IoError::Json(_) | IoError::Config(_) => {
                Error::config(e.to_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let rank: Error = ReductionError::RankDeficient {
            requested: 3,
            attainable: 2,
        }
        .into();
        assert_eq!(rank.kind.exit_code(), 4);
        assert_eq!(rank.clone().as_kind(ErrorKind::Data).kind, ErrorKind::Numeric);
        let csv: Error = IoError::Csv {
            line: 4,
            message: "x".into(),
        }
        .into();
        assert_eq!(csv.kind.exit_code(), 3);
        assert!(csv.message.contains("line 4"));
        let cfg: Error = IoError::Json("unknown field `x`".into()).into();
        assert_eq!(cfg.kind.exit_code(), 2);
        let group: Error = SymmetryError::NotAGroup("not closed".into()).into();
        assert_eq!(group.as_kind(ErrorKind::Config).kind.exit_code(), 2);
    }
}
