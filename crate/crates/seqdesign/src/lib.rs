//! Design of binary (±1) sequence sets with low aperiodic/periodic auto- and
//! cross-correlation over user-selected shift intervals.
//!
//! The optimizer relaxes the combinatorial design problem to a consensus
//! problem over the intersection of a box and an ℓp-sphere (which equals the
//! binary set), and solves it with a distributed-style ADMM whose three update
//! steps all have closed forms. A brute-force oracle certifies small
//! instances, and LFSR m-sequences provide the structured periodic baseline.
//!
//! Entry points:
//! - [`admm::solve`] runs the full solver and returns a [`admm::RunReport`].
//! - [`oracle::exhaustive_min`] returns the exact optimum for `N·M <= 26`.
//! - [`correlation`] holds the metric toolkit (ISL/PSL/ISLR/PSLR).

pub mod admm;
pub mod correlation;
pub mod error;
pub mod gradient;
pub mod oracle;
pub mod projection;
pub mod reference;
pub mod types;

pub use error::Error;
pub use types::{CorrelationMode, DesignTarget, PairLagIndex, SequenceSet, ShiftSpec};
