//! Sensing-set assignment algorithms.
//!
//! Every algorithm returns an [`AlgoResult`] whose `value` is the system
//! throughput of its (feasible) assignment, plus a per-algorithm trace.

mod baselines;
mod brute;
mod matching;
mod mgdy;
mod mwm;

pub use baselines::{greedy_baseline, random_baseline};
pub use brute::{brute_force_opt, brute_force_opt_with_cap, search_space_size, DEFAULT_BRUTE_FORCE_CAP};
pub use matching::{max_weight_matching, Matching};
pub use mgdy::{compute_mu, mgdy_assign, BoundReport};
pub use mwm::{
    mwm_assign, mwm_assign_with, Branch, CopyGraph, FillIn, MatchedEdge, MatchingObjective,
    MwmTrace, SuCopy,
};

use serde::Serialize;

use crate::sensing::{single_su_throughput, Assignment, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Mwm,
    MGdy,
    Greedy,
    Random,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Trace {
    Mwm(MwmTrace),
    MGdy {
        /// Channels filled with their group owner (step 3).
        owner_channels: usize,
        /// `(channel, su)` pairs from the leftover-copy step; `None` when no
        /// budget was left.
        leftover: Vec<(usize, Option<usize>)>,
    },
    Greedy {
        /// Rounds in which at least one copy was placed.
        rounds: usize,
    },
    Random {
        placed: usize,
        skipped: usize,
    },
    BruteForce {
        /// Number of feasible assignments examined.
        evaluated: u128,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgoResult {
    pub algorithm: Algorithm,
    pub assignment: Assignment,
    pub value: f64,
    pub trace: Trace,
}

/// `U_k({s_i})` for every SU (rows) and channel (columns).
pub(crate) fn single_throughputs(scenario: &Scenario) -> Vec<Vec<f64>> {
    (0..scenario.n())
        .map(|i| (0..scenario.m()).map(|k| single_su_throughput(i, k, scenario)).collect())
        .collect()
}
