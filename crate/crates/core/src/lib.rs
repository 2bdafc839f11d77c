//! Latency simulation and analytical bounds for erasure-coded and
//! split-and-replicate storage clusters.
//!
//! * [`dist`]: service-time laws, their moments and sub-exponential parameters.
//! * [`meanfield`]: large-system queue-length laws.
//! * [`bounds`]: closed-form latency bounds and zero-load gains.
//! * [`sim`]: deterministic discrete-event simulation of the dispatch policies.
//! * [`harness`]: sweeps, bound-vs-simulation comparisons and CSV output.

pub mod bounds;
pub mod dist;
pub mod error;
pub mod harness;
pub mod meanfield;
pub mod numeric;
pub mod sim;

pub use error::{Error, Result};
