//! Qubit readout state discrimination on the IQ plane.
//!
//! The crate trains region-based discriminators (two circles or two
//! ellipses) that ignore shots landing in high-overlap zones, and compares
//! them against the usual Fisher linear discriminant fitted on calibration
//! runs. Training data comes from single-qubit rotation micro-benchmarks
//! whose exact |0⟩ probability is known, executed either on a synthetic
//! readout device ([`sim`]) or imported from captured raw IQ memory
//! ([`datastore`]).
//!
//! Pipeline:
//!
//! 1. [`qmath::generate_benchmarks`] draws bin-balanced rotation benchmarks.
//! 2. [`sim::simulate_dataset`] turns them into IQ shots plus calibration runs.
//! 3. [`discriminators::fit_linear`] builds the baseline, and
//!    [`annealer::anneal`] optimizes circle/ellipse parameters.
//! 4. [`metrics::summarize`] reports median, percentile and spread errors.

pub mod annealer;
pub mod datastore;
pub mod discriminators;
mod error;
pub mod metrics;
mod point;
pub mod qmath;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use point::IqPoint;
