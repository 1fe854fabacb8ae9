//! Matching-based assignment.
//!
//! Each SU `s_i` contributes `l_i` copies to a complete bipartite graph with
//! the channels; edge `(s_i^j, c_k)` weighs `U_k({s_i})`. A maximum-weight
//! matching seeds the sensing sets, leftover copies are placed greedily by
//! marginal gain, and the result is compared against piling every SU onto the
//! single best channel.
//!
//! By default the matching maximizes `U_k({s_i}) - θ2(k)`, the gain over
//! leaving channel `k` unsensed. When every channel can be matched the offset
//! is a constant and the matching is unchanged. With fewer copies than
//! channels it stops the matching from spending copies on channels whose
//! idle-time throughput barely depends on sensing.

use serde::Serialize;

use super::{matching, single_throughputs, AlgoResult, Algorithm, Trace};
use crate::error::Result;
use crate::sensing::{channel_throughput, system_throughput, Assignment, Scenario};

/// The `copy`-th copy of SU `su`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SuCopy {
    pub su: usize,
    pub copy: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchedEdge {
    pub copy: SuCopy,
    pub channel: usize,
    pub weight: f64,
}

/// Bipartite graph between SU copies and channels.
#[derive(Clone, Debug)]
pub struct CopyGraph {
    copies: Vec<SuCopy>,
    /// `U_k({s_i})`, indexed by SU then channel. Copies share their SU's row.
    su_weights: Vec<Vec<f64>>,
}

impl CopyGraph {
    /// SUs with a zero budget contribute no copies.
    pub fn build(scenario: &Scenario) -> Self {
        let copies = scenario
            .sus()
            .iter()
            .enumerate()
            .flat_map(|(su, p)| (0..p.budget).map(move |copy| SuCopy { su, copy }))
            .collect();
        Self {
            copies,
            su_weights: single_throughputs(scenario),
        }
    }

    pub fn copies(&self) -> &[SuCopy] {
        &self.copies
    }

    pub fn channel_count(&self) -> usize {
        self.su_weights.first().map_or(0, Vec::len)
    }

    pub fn weight(&self, copy: SuCopy, channel: usize) -> f64 {
        self.su_weights[copy.su][channel]
    }

    /// One row per copy, one column per channel.
    pub fn weight_matrix(&self) -> Vec<Vec<f64>> {
        self.copies
            .iter()
            .map(|c| self.su_weights[c.su].clone())
            .collect()
    }

    pub fn max_weight_matching(&self) -> Vec<MatchedEdge> {
        self.max_weight_matching_offset(&vec![0.0; self.channel_count()])
    }

    /// Matching that maximizes `Σ max(0, w(s_i^j, c_k) - offset[k])`.
    /// Reported edge weights are the unshifted `w`.
    pub fn max_weight_matching_offset(&self, offset: &[f64]) -> Vec<MatchedEdge> {
        let shifted: Vec<Vec<f64>> = self
            .copies
            .iter()
            .map(|c| {
                self.su_weights[c.su]
                    .iter()
                    .zip(offset)
                    .map(|(w, o)| (w - o).max(0.0))
                    .collect()
            })
            .collect();
        matching::max_weight_matching(&shifted)
            .pairs
            .into_iter()
            .map(|(row, channel)| {
                let copy = self.copies[row];
                MatchedEdge {
                    copy,
                    channel,
                    weight: self.weight(copy, channel),
                }
            })
            .collect()
    }
}

/// Placement of one unmatched copy during the greedy phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FillIn {
    pub copy: SuCopy,
    /// `None` when the SU already senses every channel; the copy is dropped.
    pub channel: Option<usize>,
    pub gain: f64,
}

/// What the matching phase maximizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingObjective {
    /// `Σ U_k({s_i}) - θ2(k)` over matched edges; zero-gain edges are
    /// released to the greedy phase.
    #[default]
    GainOverEmpty,
    /// `Σ U_k({s_i})` over matched edges, all of which are kept.
    SingleThroughput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Matching,
    SingleChannel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MwmTrace {
    pub objective: MatchingObjective,
    /// `Σ U_k({s_i})` over the kept matched edges.
    pub matching_weight: f64,
    /// System throughput of the matched sets alone.
    pub matching_value: f64,
    pub fill_ins: Vec<FillIn>,
    /// System throughput after the greedy phase.
    pub fill_in_value: f64,
    pub fallback_channel: usize,
    pub fallback_value: f64,
    pub branch: Branch,
}

pub fn mwm_assign(scenario: &Scenario) -> Result<AlgoResult> {
    mwm_assign_with(scenario, MatchingObjective::default())
}

pub fn mwm_assign_with(scenario: &Scenario, objective: MatchingObjective) -> Result<AlgoResult> {
    let m = scenario.m();
    let graph = CopyGraph::build(scenario);
    let edges = match objective {
        MatchingObjective::SingleThroughput => graph.max_weight_matching(),
        MatchingObjective::GainOverEmpty => {
            let theta2: Vec<f64> = scenario.channels().iter().map(|c| c.theta2()).collect();
            graph
                .max_weight_matching_offset(&theta2)
                .into_iter()
                .filter(|e| e.weight > theta2[e.channel])
                .collect()
        }
    };

    let mut assignment = Assignment::empty(m);
    let mut matched = vec![false; graph.copies().len()];
    let mut matching_weight = 0.0;
    for e in &edges {
        assignment.insert(e.channel, e.copy.su);
        matching_weight += e.weight;
        let row = graph.copies().binary_search(&e.copy).expect("matched copy exists");
        matched[row] = true;
    }
    let matching_value = system_throughput(&assignment, scenario)?;

    let mut current: Vec<f64> = (0..m)
        .map(|k| channel_throughput(assignment.set(k), k, scenario))
        .collect::<Result<_>>()?;
    let mut fill_ins = Vec::new();
    let unmatched = graph
        .copies()
        .iter()
        .zip(&matched)
        .filter(|(_, &hit)| !hit)
        .map(|(c, _)| *c);
    for copy in unmatched {
        let mut best: Option<(usize, f64, f64)> = None;
        for k in 0..m {
            if assignment.contains(k, copy.su) {
                continue;
            }
            let mut grown = assignment.set(k).to_vec();
            let pos = grown.partition_point(|&s| s < copy.su);
            grown.insert(pos, copy.su);
            let u = channel_throughput(&grown, k, scenario)?;
            let gain = u - current[k];
            if best.is_none_or(|(_, g, _)| gain > g) {
                best = Some((k, gain, u));
            }
        }
        match best {
            Some((k, gain, u)) => {
                assignment.insert(k, copy.su);
                current[k] = u;
                fill_ins.push(FillIn {
                    copy,
                    channel: Some(k),
                    gain,
                });
            }
            None => fill_ins.push(FillIn {
                copy,
                channel: None,
                gain: 0.0,
            }),
        }
    }
    let fill_in_value = system_throughput(&assignment, scenario)?;

    let sensing: Vec<usize> = (0..scenario.n())
        .filter(|&i| scenario.su(i).budget >= 1)
        .collect();
    let theta2_total: f64 = scenario.channels().iter().map(|c| c.theta2()).sum();
    let mut fallback: Option<(usize, f64)> = None;
    for k in 0..m {
        let u = channel_throughput(&sensing, k, scenario)?;
        let total = theta2_total - scenario.channel(k).theta2() + u;
        if fallback.is_none_or(|(_, best)| total > best) {
            fallback = Some((k, total));
        }
    }
    let (fallback_channel, _) = fallback.expect("at least one channel");
    let mut single = Assignment::empty(m);
    for &i in &sensing {
        single.insert(fallback_channel, i);
    }
    let fallback_value = system_throughput(&single, scenario)?;

    let (branch, assignment, value) = if fallback_value > fill_in_value {
        (Branch::SingleChannel, single, fallback_value)
    } else {
        (Branch::Matching, assignment, fill_in_value)
    };

    Ok(AlgoResult {
        algorithm: Algorithm::Mwm,
        assignment,
        value,
        trace: Trace::Mwm(MwmTrace {
            objective,
            matching_weight,
            matching_value,
            fill_ins,
            fill_in_value,
            fallback_channel,
            fallback_value,
            branch,
        }),
    })
}
