//! Discrete-time renewal processes of Prabhakar type.
//!
//! The crate is organized bottom-up:
//!
//! * [`numkernel`] — scalar special functions: Pochhammer symbols, generalized
//!   binomial coefficients, and the three-parameter Mittag-Leffler (Prabhakar)
//!   function with explicit error control.
//! * [`gfcalc`] — truncated causal-sequence algebra: convolution, convolution
//!   powers, real powers of a power series, fractional difference/integral
//!   weights, prefix sums, and count-composition of generating functions.
//! * [`counting`] — discrete-time counting processes: Prabhakar-type waiting
//!   pmf and state probabilities, memory kernels and Kolmogorov-Feller
//!   residuals, expected arrivals, tail-exponent fits, the Sibuya family, and
//!   generalized waiting-law composition.
//! * [`ctlimit`] — continuous-time reference formulas (Prabhakar waiting
//!   density, generalized fractional Poisson state probabilities, kernels,
//!   expected arrivals) and the well-scaled h → 0 convergence study.
//! * [`graph`] — undirected graphs, row-stochastic one-step transition
//!   matrices, Laplacians, and biorthonormal spectral decompositions.
//! * [`dtrw`] — discrete-time random walks on graphs subordinated to a
//!   counting process: Cox-series and spectral transition panels, walk
//!   Kolmogorov-Feller residuals, stationary approach, Sibuya walks,
//!   continuous-time walk limits, and relaxed initial conditions.
//! * [`simulate`] — seeded Monte Carlo: inverse-CDF waiting-time sampling with
//!   adaptive tables, counting-path and graph-walk simulation with
//!   reproducible per-path substreams.

pub mod counting;
pub mod ctlimit;
mod dd;
pub mod dtrw;
pub mod error;
pub mod gfcalc;
pub mod graph;
pub mod numkernel;
pub mod simulate;

pub use error::{Error, Result};
