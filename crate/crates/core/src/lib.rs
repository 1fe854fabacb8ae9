//! Cooperative spectrum sensing assignment across multiple channels.
//!
//! * [`sensing`]: domain types and exact Bayesian-fusion throughput.
//! * [`assign`]: matching-based assignment, the greedy reference matching and
//!   its `μ` bound, greedy/random baselines and a brute-force optimum.
//! * [`scenario`]: random instance generation, Product-Partition instances
//!   and the scenario file format.
//! * [`harness`]: Monte-Carlo sweeps, CSV output and plots.

pub mod assign;
pub mod error;
pub mod harness;
pub mod scenario;
pub mod sensing;

pub use error::{Error, Result};
