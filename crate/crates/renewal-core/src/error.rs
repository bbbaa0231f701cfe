//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Each variant carries enough
//! context to act on programmatically, and [`Error::code`] exposes a stable
//! UPPER_SNAKE identifier for machine-readable reporting (the CLI echoes it).

use crate::numkernel::SeriesValue;

/// Stable error type for all library operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A series evaluation hit its term cap before reaching the tolerance.
    /// The partial sum and its error estimate are preserved so the caller can
    /// decide whether the accuracy is still acceptable.
    #[error("series did not converge after {} terms (|remainder| ~ {:e}) in {context}", partial.terms_used, partial.abs_error_estimate)]
    NonConverged {
        partial: SeriesValue,
        context: &'static str,
    },

    /// Two sequences with different time-grid spacings were combined.
    #[error("time-step mismatch: {left} vs {right}")]
    StepMismatch { left: f64, right: f64 },

    /// Count composition requires the inner waiting law to have no mass at 0.
    #[error("inner sequence has mass {value_at_zero} at t=0; composition requires strictly positive steps")]
    InnerNotStrict { value_at_zero: f64 },

    /// Real powers of a series need a nonzero constant term.
    #[error("series has zero constant term; real powers are undefined")]
    ZeroConstantTerm,

    /// A branch series was requested outside its convergence domain.
    #[error("xi = {xi} is outside the {branch} branch domain ({domain})")]
    BranchDomain {
        xi: f64,
        branch: &'static str,
        domain: &'static str,
    },

    /// Kernel and panel horizons are incompatible.
    #[error("dimension mismatch: needed horizon {needed}, got {got}")]
    DimMismatch { needed: usize, got: usize },

    /// A log-log fit window contains a non-positive sample.
    #[error("sample at t = {t} is {value}; log-log fit requires strictly positive values")]
    NonpositiveSample { t: usize, value: f64 },

    /// Generalized waiting composition requires f(0) = 0.
    #[error("outer pmf has mass {value_at_zero} at t=0; composition requires f(0) = 0")]
    FNotStrict { value_at_zero: f64 },

    /// A convergence-study target time is not on the step grid.
    #[error("target time {t} is not an integer multiple of step {h}")]
    GridMismatch { t: f64, h: f64 },

    /// The graph is not connected.
    #[error("graph is not connected (node {unreached} unreachable from node 0)")]
    Disconnected { unreached: usize },

    /// The transition matrix has an eigenvalue at -1 (bipartite graph).
    #[error("transition spectrum reaches -1 (eigenvalue {eigenvalue}); graph is bipartite")]
    BipartiteSpectrum { eigenvalue: f64 },

    /// A walk panel was requested beyond the horizon of its inputs.
    #[error("horizon too short: needed {needed}, available {available}")]
    HorizonShort { needed: usize, available: usize },

    /// A closed form does not exist for the requested parameters.
    #[error("unsupported parameters: {message}")]
    UnsupportedParams { message: String },

    /// Inverse-CDF sampling would need a pmf table longer than the cap.
    #[error("waiting-time draw fell beyond the table cap {cap} (tabulated mass {tabulated_mass})")]
    TailCapExceeded { cap: usize, tabulated_mass: f64 },

    /// Parameters violate their domain constraints.
    #[error("invalid parameters: {message}")]
    InvalidParams { message: String },

    /// An edge list or adjacency structure is malformed.
    #[error("invalid graph: {message}")]
    InvalidGraph { message: String },
}

impl Error {
    /// Stable machine-readable identifier for this error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonConverged { .. } => "NON_CONVERGED",
            Error::StepMismatch { .. } => "STEP_MISMATCH",
            Error::InnerNotStrict { .. } => "INNER_NOT_STRICT",
            Error::ZeroConstantTerm => "ZERO_CONSTANT_TERM",
            Error::BranchDomain { .. } => "BRANCH_DOMAIN",
            Error::DimMismatch { .. } => "DIM_MISMATCH",
            Error::NonpositiveSample { .. } => "NONPOSITIVE_SAMPLE",
            Error::FNotStrict { .. } => "F_NOT_STRICT",
            Error::GridMismatch { .. } => "GRID_MISMATCH",
            Error::Disconnected { .. } => "DISCONNECTED",
            Error::BipartiteSpectrum { .. } => "BIPARTITE_SPECTRUM",
            Error::HorizonShort { .. } => "HORIZON_SHORT",
            Error::UnsupportedParams { .. } => "UNSUPPORTED_PARAMS",
            Error::TailCapExceeded { .. } => "TAIL_CAP_EXCEEDED",
            Error::InvalidParams { .. } => "INVALID_PARAMS",
            Error::InvalidGraph { .. } => "INVALID_GRAPH",
        }
    }

    pub(crate) fn invalid_params(message: impl Into<String>) -> Self {
        Error::InvalidParams {
            message: message.into(),
        }
    }

    pub(crate) fn invalid_graph(message: impl Into<String>) -> Self {
        Error::InvalidGraph {
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
