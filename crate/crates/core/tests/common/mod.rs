//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's evaluation code; every value is
//! recomputed from the raw scenario parameters.

#![allow(dead_code)]

use coopsense_core::sensing::{Assignment, ChannelParams, Scenario, SuProfile};
use rand::Rng;

/// Two-outcome throughput of a lone SU, written out by hand.
pub fn closed_form_single(theta1: f64, theta2: f64, pf: f64, pm: f64) -> f64 {
    (theta1 * (1.0 - pf)).max(theta2 * pm) + (theta1 * pf).max(theta2 * (1.0 - pm))
}

/// Channel throughput by walking every report vector of `set`, coin-flip SUs
/// included. An unsensed channel is treated as occupied and yields `θ2`.
pub fn naive_channel_throughput(scenario: &Scenario, set: &[usize], k: usize) -> f64 {
    let c = scenario.channel(k);
    let (t1, t2) = (c.theta1(), c.theta2());
    if set.is_empty() {
        return t2;
    }
    let n = set.len();
    let mut total = 0.0;
    for y in 0..1usize << n {
        let mut idle = 1.0;
        let mut busy = 1.0;
        for (j, &i) in set.iter().enumerate() {
            let su = scenario.su(i);
            let says_busy = y >> j & 1 == 1;
            idle *= if says_busy { su.pf[k] } else { 1.0 - su.pf[k] };
            busy *= if says_busy { 1.0 - su.pm[k] } else { su.pm[k] };
        }
        total += (t1 * idle).max(t2 * busy);
    }
    total
}

pub fn naive_system_throughput(scenario: &Scenario, sets: &[Vec<usize>]) -> f64 {
    sets.iter()
        .enumerate()
        .map(|(k, s)| naive_channel_throughput(scenario, s, k))
        .sum()
}

/// Feasibility checked from scratch: SU indices in range, no SU twice on a
/// channel, no SU over budget.
pub fn is_feasible(scenario: &Scenario, assignment: &Assignment) -> bool {
    if assignment.sets().len() != scenario.m() {
        return false;
    }
    let mut load = vec![0usize; scenario.n()];
    for set in assignment.sets() {
        let mut seen = vec![false; scenario.n()];
        for &i in set {
            if i >= scenario.n() || seen[i] {
                return false;
            }
            seen[i] = true;
            load[i] += 1;
        }
    }
    load.iter()
        .enumerate()
        .all(|(i, &l)| l <= scenario.su(i).budget)
}

/// Best total weight over all matchings, by dynamic programming over the set
/// of used columns. Rows may stay unmatched.
pub fn exhaustive_matching(weights: &[Vec<f64>]) -> f64 {
    let cols = weights.first().map_or(0, Vec::len);
    let mut best = vec![f64::NEG_INFINITY; 1 << cols];
    best[0] = 0.0;
    for row in weights {
        let mut next = best.clone();
        for mask in 0..1usize << cols {
            if best[mask] == f64::NEG_INFINITY {
                continue;
            }
            for (c, &w) in row.iter().enumerate() {
                if mask >> c & 1 == 0 {
                    let to = mask | 1 << c;
                    next[to] = next[to].max(best[mask] + w);
                }
            }
        }
        best = next;
    }
    best.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Optimum by trying every feasible assignment with the naive evaluator.
/// Only for tiny instances.
pub fn naive_opt(scenario: &Scenario) -> f64 {
    let m = scenario.m();
    let choices: Vec<Vec<usize>> = scenario
        .sus()
        .iter()
        .map(|s| {
            (0..1usize << m)
                .filter(|mask| mask.count_ones() as usize <= s.budget)
                .collect()
        })
        .collect();
    let mut pick = vec![0usize; scenario.n()];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut sets = vec![Vec::new(); m];
        for (i, &p) in pick.iter().enumerate() {
            for (k, set) in sets.iter_mut().enumerate() {
                if choices[i][p] >> k & 1 == 1 {
                    set.push(i);
                }
            }
        }
        best = best.max(naive_system_throughput(scenario, &sets));
        let mut i = 0;
        loop {
            if i == pick.len() {
                return best;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

pub fn random_channel<R: Rng>(rng: &mut R) -> ChannelParams {
    ChannelParams {
        pi0: rng.random_range(0.05..0.95),
        gamma: rng.random_range(0.5..3.0),
    }
}

/// Error probabilities in `[0, 0.5]`, with roughly one entry in ten a coin flip.
pub fn random_probability<R: Rng>(rng: &mut R) -> (f64, f64) {
    if rng.random_bool(0.1) {
        (0.5, 0.5)
    } else {
        (rng.random_range(0.0..=0.5), rng.random_range(0.0..=0.5))
    }
}

/// A random instance with `n` SUs, `m` channels and budgets up to `l_max`,
/// bumped so that the budgets add up to at least `m`. Needs `n·min(l_max, m) ≥ m`.
pub fn random_scenario<R: Rng>(rng: &mut R, n: usize, m: usize, l_max: usize) -> Scenario {
    let channels = (0..m).map(|_| random_channel(rng)).collect();
    let cap = l_max.min(m);
    let mut budgets: Vec<usize> = (0..n).map(|_| rng.random_range(0..=cap)).collect();
    let mut i = 0;
    while budgets.iter().sum::<usize>() < m {
        if budgets[i] < cap {
            budgets[i] += 1;
        }
        i = (i + 1) % n;
    }
    let sus = budgets
        .into_iter()
        .map(|l| {
            let (pf, pm): (Vec<f64>, Vec<f64>) = (0..m).map(|_| random_probability(rng)).unzip();
            SuProfile::new(l, pf, pm)
        })
        .collect();
    Scenario::new(rng.random_range(0.0..0.5), channels, sus).expect("valid random scenario")
}
