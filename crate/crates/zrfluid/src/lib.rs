//! Exact fluid limits of condensing zero-range processes on finite graphs.
//!
//! A zero-range process moves `N` indistinguishable particles on a finite set
//! of sites: a particle leaves site `i` at rate `g(n) * r(i)` when `i` holds
//! `n` particles, and lands on `j` with probability `r(i, j) / r(i)`. When the
//! occupancy is rescaled by `N`, the empirical density converges to a
//! deterministic path on the probability simplex. For jump rates `g` with
//! `g(0) = 0`, `g(n) >= 1` and `g(n) -> 1`, that limit is piecewise linear and
//! can be computed exactly from the rate matrix alone. This crate does that
//! computation and cross-checks it against an event-driven simulation.
//!
//! The pieces, bottom up:
//!
//! * [`markov`] — validated rate matrices, stationary distributions, hitting
//!   probabilities, the trace (watched-set) rates, and net flows.
//! * [`absorbing`] — classification of flow-absorbing site sets, the minimal
//!   absorbing set containing a given support, and bottleneck sites.
//! * [`simplex`] — points of the probability simplex with clamped dust.
//! * [`fluid`] — the piecewise-linear limit path: velocities, exit times, the
//!   breakpoint recursion, and evaluation.
//! * [`reflect`] — the same path as an obliquely reflected linear drift: the
//!   cumulative regulator, a verifier for the reflection conditions, and
//!   recovery of rates from a routing matrix and a target drift.
//! * [`zrp`] — the stochastic process itself: jump-rate families, an exact
//!   event-driven sampler, rescaling, and convergence experiments.
//! * [`io`] — JSON model/experiment documents and CSV emission.
//!
//! # Example
//!
//! A three-site chain `0 <-> 1 <-> 2` where site 1 is twice as sticky:
//!
//! ```
//! use zrfluid::markov::RateMatrix;
//! use zrfluid::simplex::SimplexPoint;
//! use zrfluid::fluid::fluid_trajectory;
//! use zrfluid::DEFAULT_TOL;
//!
//! let r = RateMatrix::new(
//!     vec!["a".into(), "b".into(), "c".into()],
//!     vec![
//!         vec![0.0, 2.0, 0.0],
//!         vec![1.0, 0.0, 1.0],
//!         vec![0.0, 2.0, 0.0],
//!     ],
//! )
//! .unwrap();
//! let u = SimplexPoint::new(vec![1.0, 0.0, 0.0], DEFAULT_TOL).unwrap();
//! let path = fluid_trajectory(&r, &u, DEFAULT_TOL).unwrap();
//! // Mass drains from "a" into the sticky middle site and stays there.
//! assert_eq!(path.breakpoint_times(), &[0.0, 1.0]);
//! assert_eq!(path.terminal().values(), &[0.0, 1.0, 0.0]);
//! ```

pub mod absorbing;
pub mod error;
pub mod fluid;
pub mod io;
pub mod markov;
pub mod reflect;
pub mod simplex;
pub mod zrp;

pub use error::Error;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Default absolute tolerance for classification and consistency checks.
///
/// Comparisons between flow values are taken relative to the largest rate in
/// the matrix (`tol * scale`); comparisons between simplex coordinates or
/// probabilities use the tolerance as is.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Exhaustive subset enumeration refuses site sets larger than this.
pub const MAX_ENUMERATION_SITES: usize = 12;
