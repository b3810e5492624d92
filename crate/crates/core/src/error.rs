use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scenario parameter violates its domain; `invariant` names the rule.
    #[error("invalid parameter `{name}` = {value}: {invariant}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        invariant: &'static str,
    },

    /// The spatial grid does not capture the probability mass.
    #[error("grid too small: {what} (captured {captured:.3e}, required {required:.3e})")]
    GridTooSmall {
        what: &'static str,
        captured: f64,
        required: f64,
    },

    /// Sampling is too coarse to integrate the fringes.
    #[error("grid under-resolved: integrated probability {captured:.9} exceeds 1 + {excess:.1e}")]
    GridUnderresolved { captured: f64, excess: f64 },

    /// A grid specification that is empty or not strictly increasing.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The propagation function is singular at t = 0.
    #[error("propagator singular at t = 0 (A(0) = 0); use the identity P(x, 0) = |alpha(x)|^2")]
    SingularTime,

    /// Adaptive quadrature ran out of budget.
    #[error(
        "quadrature did not converge within {budget} subintervals: estimate {estimate:.6e}, error bound {error_bound:.3e}"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        budget: usize,
    },

    /// The oracle produced a result whose imaginary residue is not negligible.
    #[error("oracle result not real: imaginary residue {residue:.3e} vs density {density:.3e}")]
    NonRealResult { residue: f64, density: f64 },

    /// The requested regime is outside what the implemented formulas describe.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(&'static str),

    /// A density-matrix operation was handed the wrong classical/interference part.
    #[error("density matrix part mismatch: expected {expected}, found {found}")]
    PartMismatch {
        expected: &'static str,
        found: &'static str,
    },
}

impl Error {
    /// Numerical failures as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::NonRealResult { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
