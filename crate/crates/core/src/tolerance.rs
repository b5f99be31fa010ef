use serde::{Deserialize, Serialize};

/// Numerical thresholds used by the checks.
///
/// Identity checks (`‖lhs − rhs‖ ≤ tol`) scale their threshold by
/// `max(1, magnitude)` of the operands involved, so inputs far from unit
/// scale are judged by relative floating error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entrywise `|x − x*|` accepted as self-adjoint.
    pub hermitian: f64,
    /// Eigenvalues within this distance are merged into one eigenspace;
    /// eigenvalues within it of a threshold `t` count as `≥ t`.
    pub eig: f64,
    /// Relative slack allowed on inequalities: `slack ≥ −rel·max(1, |rhs|)`.
    pub rel: f64,
    /// Trace identities such as `τ(E(x)) = τ(x)` and Boolean factorization.
    pub trace_identity: f64,
    /// Operator identities in ‖·‖₂ (module property, towers, martingale sums).
    pub operator_identity: f64,
    /// Variance additivity and mixed-moment factorization.
    pub moment_identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-12,
            eig: 1e-10,
            rel: 1e-9,
            trace_identity: 1e-12,
            operator_identity: 1e-10,
            moment_identity: 1e-9,
        }
    }
}

impl Tolerances {
    /// Every threshold set to `tol`. Used for negative controls and sweeps.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            hermitian: tol,
            eig: tol,
            rel: tol,
            trace_identity: tol,
            operator_identity: tol,
            moment_identity: tol,
        }
    }

    /// Replace the inequality and identity thresholds with `tol`, leaving the
    /// structural ones (hermitian, eig) at their defaults.
    pub fn with_check_tol(tol: f64) -> Self {
        Tolerances {
            rel: tol,
            trace_identity: tol,
            operator_identity: tol,
            moment_identity: tol,
            ..Tolerances::default()
        }
    }
}
