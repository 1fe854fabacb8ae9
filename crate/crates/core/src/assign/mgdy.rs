//! The greedy reference matching `M_Gdy` and the quality parameter `μ`.
//!
//! Channels are grouped under the SU that senses them best, each SU takes the
//! top `min(l_i, r_i)` channels of its group ranked by `U_k^0`, and leftover
//! channels receive any unused copy. The resulting throughput is at least
//! `μ·Σ_k U_k^0`, where `μ = 1 + min_i λ_i(ρ_i - 1)`.

use serde::Serialize;

use super::{single_throughputs, AlgoResult, Algorithm, Trace};
use crate::error::Result;
use crate::sensing::{system_throughput, Assignment, Scenario};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// `U_k^0 = min_i U_k({s_i})` per channel.
    pub u0: Vec<f64>,
    /// `U_k^* = max_i U_k({s_i})` per channel.
    pub ustar: Vec<f64>,
    /// `C_i`: channels owned by each SU, sorted by `U_k^0` descending.
    pub groups: Vec<Vec<usize>>,
    /// `C_i^{l_i}`: the leading `min(l_i, r_i)` channels of each group.
    pub top: Vec<Vec<usize>>,
    /// `λ_i = min(l_i, r_i) / r_i`; `None` for an empty group.
    pub lambda: Vec<Option<f64>>,
    /// `ρ_i = min_{k ∈ C_i^{l_i}} U_k^* / U_k^0`; `None` when the top set has
    /// no channel with `U_k^0 > 0`.
    pub rho: Vec<Option<f64>>,
    pub mu: f64,
    /// `μ / 2`, the guaranteed fraction of the optimum.
    pub guarantee: f64,
}

impl BoundReport {
    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// `Σ_k U_k^0`.
    pub fn baseline(&self) -> f64 {
        self.u0.iter().sum()
    }

    /// `μ·Σ_k U_k^0`, the lower bound on the greedy matching's throughput.
    pub fn matching_bound(&self) -> f64 {
        self.mu * self.baseline()
    }
}

/// Groups, per-SU factors and `μ` for `scenario`.
///
/// Channel `k` belongs to the lowest-indexed SU attaining `U_k^*`; ties in the
/// within-group ordering go to the lower channel index. SUs with empty groups
/// do not take part in the minimum defining `μ`.
pub fn compute_mu(scenario: &Scenario) -> BoundReport {
    let single = single_throughputs(scenario);
    let (n, m) = (scenario.n(), scenario.m());

    let mut u0 = vec![f64::INFINITY; m];
    let mut ustar = vec![f64::NEG_INFINITY; m];
    let mut owner = vec![0usize; m];
    for (i, row) in single.iter().enumerate() {
        for k in 0..m {
            u0[k] = u0[k].min(row[k]);
            if row[k] > ustar[k] {
                ustar[k] = row[k];
                owner[k] = i;
            }
        }
    }

    let mut groups = vec![Vec::new(); n];
    for k in 0..m {
        groups[owner[k]].push(k);
    }
    for g in &mut groups {
        g.sort_by(|&a, &b| u0[b].total_cmp(&u0[a]).then(a.cmp(&b)));
    }

    let top: Vec<Vec<usize>> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| g[..scenario.su(i).budget.min(g.len())].to_vec())
        .collect();
    let lambda: Vec<Option<f64>> = groups
        .iter()
        .zip(&top)
        .map(|(g, t)| (!g.is_empty()).then(|| t.len() as f64 / g.len() as f64))
        .collect();
    let rho: Vec<Option<f64>> = top
        .iter()
        .map(|t| {
            t.iter()
                .filter(|&&k| u0[k] > 0.0)
                .map(|&k| ustar[k] / u0[k])
                .reduce(f64::min)
        })
        .collect();

    let mu = 1.0
        + lambda
            .iter()
            .zip(&rho)
            .filter_map(|(l, r)| l.map(|l| l * (r.unwrap_or(1.0) - 1.0)))
            .reduce(f64::min)
            .unwrap_or(0.0);

    BoundReport {
        u0,
        ustar,
        groups,
        top,
        lambda,
        rho,
        mu,
        guarantee: mu / 2.0,
    }
}

/// Builds `M_Gdy` and returns it together with its [`BoundReport`].
///
/// Leftover channels take a copy of the lowest-indexed SU with budget to
/// spare; once every budget is spent the remaining channels stay empty.
pub fn mgdy_assign(scenario: &Scenario) -> Result<(AlgoResult, BoundReport)> {
    let report = compute_mu(scenario);
    let m = scenario.m();
    let mut assignment = Assignment::empty(m);
    let mut spare: Vec<usize> = scenario.sus().iter().map(|s| s.budget).collect();

    let mut owner_channels = 0;
    for (i, channels) in report.top.iter().enumerate() {
        for &k in channels {
            assignment.insert(k, i);
            spare[i] -= 1;
            owner_channels += 1;
        }
    }

    let mut leftover = Vec::new();
    for k in 0..m {
        if !assignment.set(k).is_empty() {
            continue;
        }
        let pick = spare.iter().position(|&s| s > 0);
        if let Some(i) = pick {
            assignment.insert(k, i);
            spare[i] -= 1;
        }
        leftover.push((k, pick));
    }

    let value = system_throughput(&assignment, scenario)?;
    Ok((
        AlgoResult {
            algorithm: Algorithm::MGdy,
            assignment,
            value,
            trace: Trace::MGdy {
                owner_channels,
                leftover,
            },
        },
        report,
    ))
}
