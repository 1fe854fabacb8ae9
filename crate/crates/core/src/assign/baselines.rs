//! Greedy and random reference assignments used in the comparison sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{AlgoResult, Algorithm, Trace};
use crate::error::Result;
use crate::sensing::{system_throughput, Assignment, Scenario};

/// Round-based greedy: each channel ranks SUs by `P_m + P_f` (ascending, ties
/// by SU index). Every round visits the channels in a fresh random order and
/// lets each take one copy of its best-ranked SU that still has budget and
/// does not already sense it. Stops after a round that places nothing.
pub fn greedy_baseline<R: Rng>(scenario: &Scenario, mut rng: R) -> Result<AlgoResult> {
    let (n, m) = (scenario.n(), scenario.m());
    let prefs: Vec<Vec<usize>> = (0..m)
        .map(|k| {
            let mut order: Vec<usize> = (0..n).filter(|&i| scenario.su(i).budget > 0).collect();
            order.sort_by(|&a, &b| {
                let score = |i: usize| scenario.su(i).pm[k] + scenario.su(i).pf[k];
                score(a).total_cmp(&score(b)).then(a.cmp(&b))
            });
            order
        })
        .collect();

    let mut spare: Vec<usize> = scenario.sus().iter().map(|s| s.budget).collect();
    let mut assignment = Assignment::empty(m);
    let mut channels: Vec<usize> = (0..m).collect();
    let mut rounds = 0;
    loop {
        channels.shuffle(&mut rng);
        let mut placed = 0;
        for &k in &channels {
            let pick = prefs[k]
                .iter()
                .copied()
                .find(|&i| spare[i] > 0 && !assignment.contains(k, i));
            if let Some(i) = pick {
                assignment.insert(k, i);
                spare[i] -= 1;
                placed += 1;
            }
        }
        if placed == 0 {
            break;
        }
        rounds += 1;
    }

    let value = system_throughput(&assignment, scenario)?;
    Ok(AlgoResult {
        algorithm: Algorithm::Greedy,
        assignment,
        value,
        trace: Trace::Greedy { rounds },
    })
}

/// Shuffles all SU copies and sends each to a uniformly chosen channel the SU
/// does not already sense.
pub fn random_baseline<R: Rng>(scenario: &Scenario, mut rng: R) -> Result<AlgoResult> {
    let m = scenario.m();
    let mut copies: Vec<usize> = scenario
        .sus()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| std::iter::repeat_n(i, s.budget))
        .collect();
    copies.shuffle(&mut rng);

    let mut assignment = Assignment::empty(m);
    let (mut placed, mut skipped) = (0, 0);
    let mut eligible = Vec::with_capacity(m);
    for i in copies {
        eligible.clear();
        eligible.extend((0..m).filter(|&k| !assignment.contains(k, i)));
        if eligible.is_empty() {
            skipped += 1;
            continue;
        }
        let k = eligible[rng.random_range(0..eligible.len())];
        assignment.insert(k, i);
        placed += 1;
    }

    let value = system_throughput(&assignment, scenario)?;
    Ok(AlgoResult {
        algorithm: Algorithm::Random,
        assignment,
        value,
        trace: Trace::Random { placed, skipped },
    })
}
