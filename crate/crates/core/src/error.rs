use thiserror::Error;

/// Library error type. `InvalidArgument` covers precondition violations and
/// carries the offending quantity by name; the solver variants mark honest
/// physical/numerical failure modes that callers may want to branch on.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two objects that must share a basis (density matrix, generators,
    /// spectrum) disagree.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// A requested bound state does not exist for the given parameters.
    #[error("no bound state: {0}")]
    NoBoundState(String),

    /// The quantization discriminant went negative; no normalizable solution.
    #[error("no bound solution: discriminant 1-4*H2 = {discriminant} < 0")]
    NoQuantizedSolution { discriminant: f64 },

    /// A wavefunction with non-integrable behaviour; carries the exponent
    /// that failed the integrability check.
    #[error("non-normalizable wavefunction: small-r exponent {exponent} <= -1/2")]
    NonNormalizable { exponent: f64 },

    /// An iterative routine failed to converge or was handed an unusable
    /// bracket/grid.
    #[error("solver failure: {0}")]
    SolverFailure(String),
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn basis_mismatch(msg: impl Into<String>) -> Self {
        Error::BasisMismatch(msg.into())
    }

    pub fn no_bound_state(msg: impl Into<String>) -> Self {
        Error::NoBoundState(msg.into())
    }

    pub fn solver_failure(msg: impl Into<String>) -> Self {
        Error::SolverFailure(msg.into())
    }
}
