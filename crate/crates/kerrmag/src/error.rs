//! Error type shared by the solver and verification modules.

use thiserror::Error;

/// Failure modes of the physics and numerics layers.
///
/// Configuration-file and I/O errors are kept separate (see [`crate::config`]
/// and the binary) so that exit codes can distinguish them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative numerical routine failed to meet its tolerance.
    #[error("numerical failure in {context}: {detail}")]
    NumericalFailure {
        context: &'static str,
        detail: String,
    },

    /// The implicit threshold equation had no sign change in the searched
    /// interval.
    #[error(
        "no bistability threshold bracketed for delta = {delta_hz:.6e} Hz \
         (searched delta_m in [{lo_hz:.6e}, {hi_hz:.6e}] Hz)"
    )]
    NoThreshold { delta_hz: f64, lo_hz: f64, hi_hz: f64 },

    /// Time integration left the trust region (norm above 1e12 or non-finite).
    #[error("state diverged during integration: {0}")]
    Divergence(String),

    /// A state handed to the stability classifier is not a fixed point.
    #[error("not a fixed point: normalized residual {residual:.3e} exceeds {bound:.3e}")]
    InvalidFixedPoint { residual: f64, bound: f64 },

    /// A sweep sample had no dynamically stable root to track.
    #[error("no stable root at {axis} = {value:.6e}: {detail}")]
    NoStableRoot {
        axis: &'static str,
        value: f64,
        detail: String,
    },
}
