use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("variable x{index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("polynomial is not in the kernel of the derivation")]
    NotInKernel,

    #[error("derivation has no valid local nilpotency certificate")]
    UncertifiedInput,

    #[error("no inverse found with degree bound {bound} (not a proof of non-invertibility)")]
    NotInvertible { bound: u32 },

    #[error("Jacobian determinant is not a nonzero constant: {det}")]
    JacobianNotConstant { det: String },

    #[error("torus entries must be nonzero with product 1")]
    NotInTorus,

    #[error("x{variable} must not occur in {what}")]
    VariableDependenceViolation { variable: usize, what: String },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix determinant is {det}, expected 1")]
    DeterminantNotOne { det: String },

    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("polynomial size limit exceeded: {terms} terms (limit {limit})")]
    TermLimit { terms: usize, limit: usize },
}

impl Error {
    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            offset,
            message: message.into(),
        }
    }

    /// True for errors caused by malformed input rather than by a
    /// mathematical rejection.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::VariableOutOfRange { .. } | Error::ArityMismatch { .. }
        )
    }
}

pub(crate) fn check_arity(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected, found })
    }
}
