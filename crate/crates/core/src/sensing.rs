//! Domain types and exact evaluation of per-channel throughput under optimal
//! Bayesian fusion.
//!
//! A channel `k` sensed by a set of SUs `S_k` yields a binary report vector
//! `y`. For each outcome the controller compares `θ1(k)·P(y | idle)` with
//! `θ2(k)·P(y | busy)` and collects the larger term, declaring the channel
//! occupied on ties. Summing over all `2^|S_k|` outcomes gives `U_k(S_k)`;
//! an empty sensing set is never accessed and yields `θ2(k)`.

use crate::error::{check_probability, Error, Result};
use serde::{Deserialize, Serialize};

/// Largest sensing set evaluated by exhaustive enumeration unless overridden.
pub const DEFAULT_ENUMERATION_GUARD: usize = 20;

/// Hard ceiling for any guard; outcomes are indexed by a `u32` bitmask.
pub const MAX_ENUMERATION_GUARD: usize = 30;

/// Raw per-channel parameters as stored on disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Idle probability `π0(k)`.
    pub pi0: f64,
    /// Normalized PU capacity `γ(k)`.
    pub gamma: f64,
}

/// A licensed channel with its throughput weights.
///
/// `theta1 = (1 - T_c)·π0` and `theta2 = γ·(1 - π0)` are derived at
/// construction and cannot be set independently.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    index: usize,
    pi0: f64,
    gamma: f64,
    theta1: f64,
    theta2: f64,
}

impl Channel {
    pub fn new(index: usize, params: ChannelParams, t_c: f64) -> Result<Self> {
        check_probability(|| format!("channels[{index}].pi0"), params.pi0)?;
        if !(params.gamma >= 0.0 && params.gamma.is_finite()) {
            return Err(Error::OutOfRange {
                field: format!("channels[{index}].gamma"),
                value: params.gamma,
                range: "[0, inf)",
            });
        }
        check_t_c(t_c)?;
        Ok(Self {
            index,
            pi0: params.pi0,
            gamma: params.gamma,
            theta1: (1.0 - t_c) * params.pi0,
            theta2: params.gamma * (1.0 - params.pi0),
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Idle-side weight: SU throughput when the channel is correctly found idle.
    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    /// Busy-side weight: PU throughput when the channel is left alone.
    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn params(&self) -> ChannelParams {
        ChannelParams {
            pi0: self.pi0,
            gamma: self.gamma,
        }
    }

    /// `θ1 + θ2`, the most any sensing set can extract from this channel.
    pub fn cap(&self) -> f64 {
        self.theta1 + self.theta2
    }
}

fn check_t_c(t_c: f64) -> Result<()> {
    if (0.0..1.0).contains(&t_c) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            field: "t_c".into(),
            value: t_c,
            range: "[0, 1)",
        })
    }
}

/// One SU's sensing budget and per-channel error probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuProfile {
    /// Maximum number of channels this SU may sense (`l_i`).
    pub budget: usize,
    /// False-alarm probability per channel.
    pub pf: Vec<f64>,
    /// Misdetection probability per channel.
    pub pm: Vec<f64>,
}

impl SuProfile {
    pub fn new(budget: usize, pf: Vec<f64>, pm: Vec<f64>) -> Self {
        Self { budget, pf, pm }
    }

    /// An SU outside the sensing range of channel `k` reports a fair coin.
    pub fn set_out_of_range(&mut self, k: usize) {
        self.pf[k] = 0.5;
        self.pm[k] = 0.5;
    }

    /// True when the SU's report on `k` carries no information.
    pub fn is_coin_flip(&self, k: usize) -> bool {
        self.pf[k] == 0.5 && self.pm[k] == 0.5
    }
}

/// A full problem instance: `M` channels, `N` SUs and the control-slot fraction.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    t_c: f64,
    channels: Vec<Channel>,
    sus: Vec<SuProfile>,
}

impl Scenario {
    pub fn new(t_c: f64, channels: Vec<ChannelParams>, sus: Vec<SuProfile>) -> Result<Self> {
        check_t_c(t_c)?;
        if channels.is_empty() {
            return Err(Error::InvalidScenario("at least one channel is required".into()));
        }
        if sus.is_empty() {
            return Err(Error::InvalidScenario("at least one SU is required".into()));
        }
        let m = channels.len();
        let channels = channels
            .into_iter()
            .enumerate()
            .map(|(k, p)| Channel::new(k, p, t_c))
            .collect::<Result<Vec<_>>>()?;
        for (i, su) in sus.iter().enumerate() {
            if su.pf.len() != m || su.pm.len() != m {
                return Err(Error::InvalidScenario(format!(
                    "sus[{i}] has {} pf and {} pm entries, expected {m}",
                    su.pf.len(),
                    su.pm.len()
                )));
            }
            if su.budget > m {
                return Err(Error::OutOfRange {
                    field: format!("sus[{i}].budget"),
                    value: su.budget as f64,
                    range: "[0, M]",
                });
            }
            for k in 0..m {
                check_probability(|| format!("sus[{i}].pf[{k}]"), su.pf[k])?;
                check_probability(|| format!("sus[{i}].pm[{k}]"), su.pm[k])?;
            }
        }
        Ok(Self { t_c, channels, sus })
    }

    pub fn t_c(&self) -> f64 {
        self.t_c
    }

    /// Number of channels `M`.
    pub fn m(&self) -> usize {
        self.channels.len()
    }

    /// Number of SUs `N`.
    pub fn n(&self) -> usize {
        self.sus.len()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, k: usize) -> &Channel {
        &self.channels[k]
    }

    pub fn sus(&self) -> &[SuProfile] {
        &self.sus
    }

    pub fn su(&self, i: usize) -> &SuProfile {
        &self.sus[i]
    }

    pub fn l_max(&self) -> usize {
        self.sus.iter().map(|s| s.budget).max().unwrap_or(0)
    }

    pub fn total_budget(&self) -> usize {
        self.sus.iter().map(|s| s.budget).sum()
    }

    /// `Σ_k (θ1(k) + θ2(k))`, an upper bound on any assignment's throughput.
    pub fn upper_bound(&self) -> f64 {
        self.channels.iter().map(Channel::cap).sum()
    }
}

/// Sensing sets `S_1..S_M`, each kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    sets: Vec<Vec<usize>>,
}

impl Assignment {
    pub fn empty(m: usize) -> Self {
        Self {
            sets: vec![Vec::new(); m],
        }
    }

    pub fn from_sets(mut sets: Vec<Vec<usize>>) -> Result<Self> {
        for (k, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidAssignment(format!(
                    "SU {} appears twice in the sensing set of channel {k}",
                    w[0]
                )));
            }
        }
        Ok(Self { sets })
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, k: usize) -> &[usize] {
        &self.sets[k]
    }

    pub fn contains(&self, k: usize, su: usize) -> bool {
        self.sets[k].binary_search(&su).is_ok()
    }

    /// Adds `su` to channel `k`; returns false if it was already there.
    pub fn insert(&mut self, k: usize, su: usize) -> bool {
        match self.sets[k].binary_search(&su) {
            Ok(_) => false,
            Err(pos) => {
                self.sets[k].insert(pos, su);
                true
            }
        }
    }

    /// Number of channels `su` is assigned to sense.
    pub fn load(&self, su: usize) -> usize {
        self.sets.iter().filter(|s| s.binary_search(&su).is_ok()).count()
    }

    /// Checks shape and per-SU budget feasibility against `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if self.sets.len() != scenario.m() {
            return Err(Error::InvalidAssignment(format!(
                "{} sensing sets for {} channels",
                self.sets.len(),
                scenario.m()
            )));
        }
        let mut counts = vec![0usize; scenario.n()];
        for (k, set) in self.sets.iter().enumerate() {
            for w in set.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidAssignment(format!(
                        "sensing set of channel {k} is not strictly increasing"
                    )));
                }
            }
            for &i in set {
                if i >= scenario.n() {
                    return Err(Error::InvalidAssignment(format!(
                        "channel {k} references SU {i}, but there are only {}",
                        scenario.n()
                    )));
                }
                counts[i] += 1;
            }
        }
        for (i, &count) in counts.iter().enumerate() {
            let budget = scenario.su(i).budget;
            if count > budget {
                return Err(Error::Infeasible {
                    su: i,
                    count,
                    budget,
                });
            }
        }
        Ok(())
    }
}

/// Global decision on a channel for one report vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Idle,
    Occupied,
}

/// One report vector `y` over a sensing set with its two class likelihoods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservationOutcome {
    /// Bit `j` is the report of the `j`-th member of the set (1 = busy).
    pub y: u32,
    pub likelihood_idle: f64,
    pub likelihood_busy: f64,
}

impl ObservationOutcome {
    pub fn report(&self, j: usize) -> bool {
        self.y >> j & 1 == 1
    }

    /// The Bayesian decision for this outcome; ties go to occupied.
    pub fn decision(&self, channel: &Channel) -> Decision {
        if channel.theta2 * self.likelihood_busy >= channel.theta1 * self.likelihood_idle {
            Decision::Occupied
        } else {
            Decision::Idle
        }
    }

    /// This outcome's contribution to `U_k`.
    pub fn contribution(&self, channel: &Channel) -> f64 {
        best_side(
            channel.theta1 * self.likelihood_idle,
            channel.theta2 * self.likelihood_busy,
        )
    }
}

#[inline]
fn best_side(idle: f64, busy: f64) -> f64 {
    if busy >= idle {
        busy
    } else {
        idle
    }
}

/// Iterator over all `2^n` report vectors of a sensing set.
///
/// Each likelihood is computed directly as a product over the members, so
/// this path is independent of the table-based evaluation in
/// [`channel_throughput`].
pub struct Likelihoods {
    members: Vec<(f64, f64)>,
    next: u64,
    end: u64,
}

impl Iterator for Likelihoods {
    type Item = ObservationOutcome;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let y = self.next as u32;
        self.next += 1;
        let mut idle = 1.0;
        let mut busy = 1.0;
        for (j, &(pf, pm)) in self.members.iter().enumerate() {
            if y >> j & 1 == 1 {
                idle *= pf;
                busy *= 1.0 - pm;
            } else {
                idle *= 1.0 - pf;
                busy *= pm;
            }
        }
        Some(ObservationOutcome {
            y,
            likelihood_idle: idle,
            likelihood_busy: busy,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Likelihoods {}

/// Enumerates every report vector of `su_set` on channel `k`.
pub fn likelihoods(su_set: &[usize], k: usize, scenario: &Scenario) -> Result<Likelihoods> {
    likelihoods_guarded(su_set, k, scenario, DEFAULT_ENUMERATION_GUARD)
}

pub fn likelihoods_guarded(
    su_set: &[usize],
    k: usize,
    scenario: &Scenario,
    guard: usize,
) -> Result<Likelihoods> {
    if su_set.is_empty() {
        return Err(Error::InvalidAssignment(
            "likelihoods need a nonempty sensing set".into(),
        ));
    }
    let guard = guard.min(MAX_ENUMERATION_GUARD);
    if su_set.len() > guard {
        return Err(Error::SetTooLarge {
            size: su_set.len(),
            guard,
        });
    }
    let members = su_set
        .iter()
        .map(|&i| (scenario.su(i).pf[k], scenario.su(i).pm[k]))
        .collect();
    Ok(Likelihoods {
        members,
        next: 0,
        end: 1u64 << su_set.len(),
    })
}

/// `U_k(S_k)` under optimal Bayesian fusion.
pub fn channel_throughput(su_set: &[usize], k: usize, scenario: &Scenario) -> Result<f64> {
    channel_throughput_guarded(su_set, k, scenario, DEFAULT_ENUMERATION_GUARD)
}

/// Like [`channel_throughput`] with an explicit enumeration guard.
///
/// Members reporting a fair coin (`P_f = P_m = 1/2`) split every outcome into
/// two halves with the same decision, so they are dropped before enumeration
/// and do not count against the guard.
pub fn channel_throughput_guarded(
    su_set: &[usize],
    k: usize,
    scenario: &Scenario,
    guard: usize,
) -> Result<f64> {
    let channel = scenario.channel(k);
    if su_set.is_empty() {
        return Ok(channel.theta2);
    }
    let informative: Vec<(f64, f64)> = su_set
        .iter()
        .map(|&i| scenario.su(i))
        .filter(|su| !su.is_coin_flip(k))
        .map(|su| (su.pf[k], su.pm[k]))
        .collect();
    let guard = guard.min(MAX_ENUMERATION_GUARD);
    if informative.len() > guard {
        return Err(Error::SetTooLarge {
            size: informative.len(),
            guard,
        });
    }
    Ok(fused_throughput(&informative, channel.theta1, channel.theta2))
}

/// Sums the per-outcome Bayesian choice over likelihood tables built by
/// doubling: after processing member `j`, entry `y` holds the product over the
/// first `j + 1` members, with bit `j` set in the upper half.
fn fused_throughput(members: &[(f64, f64)], theta1: f64, theta2: f64) -> f64 {
    let Some((&(pf_last, pm_last), rest)) = members.split_last() else {
        return best_side(theta1, theta2);
    };
    let size = 1usize << rest.len();
    let mut idle = Vec::with_capacity(size);
    let mut busy = Vec::with_capacity(size);
    idle.push(1.0);
    busy.push(1.0);
    for &(pf, pm) in rest {
        let len = idle.len();
        for y in 0..len {
            let (a, b) = (idle[y], busy[y]);
            idle[y] = a * (1.0 - pf);
            busy[y] = b * pm;
            idle.push(a * pf);
            busy.push(b * (1.0 - pm));
        }
    }
    // The last member is folded straight into the sum.
    let mut total = 0.0;
    for (&a, &b) in idle.iter().zip(&busy) {
        total += best_side(theta1 * (a * (1.0 - pf_last)), theta2 * (b * pm_last));
    }
    for (&a, &b) in idle.iter().zip(&busy) {
        total += best_side(theta1 * (a * pf_last), theta2 * (b * (1.0 - pm_last)));
    }
    total
}

/// Closed form of `U_k({s_i})`:
/// `max{θ1(1-P_f), θ2·P_m} + max{θ1·P_f, θ2(1-P_m)}`.
pub fn single_su_throughput(i: usize, k: usize, scenario: &Scenario) -> f64 {
    let channel = scenario.channel(k);
    let su = scenario.su(i);
    let (pf, pm) = (su.pf[k], su.pm[k]);
    best_side(channel.theta1 * (1.0 - pf), channel.theta2 * pm)
        + best_side(channel.theta1 * pf, channel.theta2 * (1.0 - pm))
}

/// `Σ_k U_k(S_k)` for a feasible assignment.
pub fn system_throughput(assignment: &Assignment, scenario: &Scenario) -> Result<f64> {
    assignment.validate(scenario)?;
    assignment
        .sets()
        .iter()
        .enumerate()
        .map(|(k, set)| channel_throughput(set, k, scenario))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Back-solves channel parameters so that the derived weights hit the
    /// requested `θ1`, `θ2` (up to rounding).
    fn scenario_with(theta1: f64, theta2: f64, rows: &[(f64, f64)]) -> Scenario {
        let t_c = 0.0;
        let pi0 = theta1;
        let gamma = theta2 / (1.0 - pi0);
        let sus = rows
            .iter()
            .map(|&(pf, pm)| SuProfile::new(1, vec![pf], vec![pm]))
            .collect();
        Scenario::new(t_c, vec![ChannelParams { pi0, gamma }], sus).unwrap()
    }

    #[test]
    fn singleton_idle_likelihoods_are_complementary() {
        let s = scenario_with(0.4, 0.6, &[(0.1, 0.2)]);
        let out: Vec<_> = likelihoods(&[0], 0, &s).unwrap().collect();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].likelihood_idle, 0.9);
        assert_eq!(out[1].likelihood_idle, 0.1);
        assert_eq!(out[1].likelihood_busy, 0.8);
        assert!((out[0].likelihood_busy - 0.2).abs() < 1e-15);
    }

    #[test]
    fn two_su_idle_likelihoods() {
        let s = scenario_with(0.5, 0.5, &[(0.1, 0.1), (0.1, 0.1)]);
        let out: Vec<_> = likelihoods(&[0, 1], 0, &s).unwrap().collect();
        assert!((out[0b00].likelihood_idle - 0.81).abs() < 1e-15);
        assert!((out[0b11].likelihood_idle - 0.01).abs() < 1e-15);
    }

    #[test]
    fn empty_set_yields_theta2() {
        let s = scenario_with(0.4, 0.6, &[(0.1, 0.2)]);
        let u = channel_throughput(&[], 0, &s).unwrap();
        assert_eq!(u, s.channel(0).theta2());
    }

    #[test]
    fn one_su_hand_enumeration() {
        let s = scenario_with(0.4, 0.6, &[(0.1, 0.2)]);
        let u = channel_throughput(&[0], 0, &s).unwrap();
        assert!((u - 0.84).abs() < 1e-12, "{u}");
        assert_eq!(u, single_su_throughput(0, 0, &s));
    }

    #[test]
    fn two_su_hand_enumeration() {
        let s = scenario_with(0.5, 0.5, &[(0.1, 0.1), (0.1, 0.1)]);
        let u = channel_throughput(&[0, 1], 0, &s).unwrap();
        assert!((u - 0.9).abs() < 1e-12, "{u}");
    }

    #[test]
    fn perfect_and_useless_sensors() {
        let s = scenario_with(0.3, 0.7, &[(0.0, 0.0), (0.5, 0.5)]);
        let c = s.channel(0);
        assert!((single_su_throughput(0, 0, &s) - c.cap()).abs() < 1e-15);
        assert_eq!(single_su_throughput(1, 0, &s), c.theta1().max(c.theta2()));
        assert_eq!(
            channel_throughput(&[1], 0, &s).unwrap(),
            single_su_throughput(1, 0, &s)
        );
    }

    #[test]
    fn guard_is_enforced() {
        let rows = vec![(0.1, 0.2); 5];
        let s = scenario_with(0.4, 0.6, &rows);
        let set = [0, 1, 2, 3, 4];
        assert!(matches!(
            channel_throughput_guarded(&set, 0, &s, 4),
            Err(Error::SetTooLarge { size: 5, guard: 4 })
        ));
        assert!(matches!(
            likelihoods_guarded(&set, 0, &s, 4),
            Err(Error::SetTooLarge { .. })
        ));
        assert!(channel_throughput_guarded(&set, 0, &s, 5).is_ok());
    }

    #[test]
    fn coin_flips_do_not_count_against_guard() {
        let mut rows = vec![(0.5, 0.5); 25];
        rows.push((0.1, 0.2));
        let s = scenario_with(0.4, 0.6, &rows);
        let set: Vec<usize> = (0..26).collect();
        let u = channel_throughput(&set, 0, &s).unwrap();
        assert!((u - 0.84).abs() < 1e-12);
    }

    #[test]
    fn ties_decide_occupied() {
        let s = scenario_with(0.5, 0.5, &[(0.5, 0.5)]);
        for o in likelihoods(&[0], 0, &s).unwrap() {
            assert_eq!(o.decision(s.channel(0)), Decision::Occupied);
        }
    }

    #[test]
    fn infeasible_assignment_names_the_su() {
        let s = scenario_with(0.4, 0.6, &[(0.1, 0.2), (0.1, 0.2)]);
        let mut a = Assignment::empty(1);
        a.insert(0, 1);
        assert!(system_throughput(&a, &s).is_ok());
        let s0 = Scenario::new(
            s.t_c(),
            vec![s.channel(0).params()],
            vec![
                SuProfile::new(1, vec![0.1], vec![0.2]),
                SuProfile::new(0, vec![0.1], vec![0.2]),
            ],
        )
        .unwrap();
        match system_throughput(&a, &s0) {
            Err(Error::Infeasible { su, count, budget }) => {
                assert_eq!((su, count, budget), (1, 1, 0))
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_membership_is_rejected() {
        assert!(Assignment::from_sets(vec![vec![2, 0, 2]]).is_err());
        let a = Assignment::from_sets(vec![vec![2, 0]]).unwrap();
        assert_eq!(a.set(0), &[0, 2]);
    }

    #[test]
    fn scenario_validation_paths() {
        let err = Scenario::new(
            0.2,
            vec![ChannelParams { pi0: 0.5, gamma: 1.0 }],
            vec![SuProfile::new(1, vec![1.5], vec![0.1])],
        )
        .unwrap_err();
        assert!(err.to_string().contains("sus[0].pf[0]"), "{err}");
        assert!(Scenario::new(1.0, vec![ChannelParams { pi0: 0.5, gamma: 1.0 }], vec![]).is_err());
        let err = Scenario::new(
            0.2,
            vec![ChannelParams { pi0: 0.5, gamma: 1.0 }],
            vec![SuProfile::new(2, vec![0.1], vec![0.1])],
        )
        .unwrap_err();
        assert!(err.to_string().contains("sus[0].budget"), "{err}");
    }

    #[test]
    fn thetas_follow_parameters() {
        let c = Channel::new(3, ChannelParams { pi0: 0.25, gamma: 2.0 }, 0.2).unwrap();
        assert_eq!(c.theta1(), 0.8 * 0.25);
        assert_eq!(c.theta2(), 2.0 * 0.75);
        assert_eq!(c.index(), 3);
    }
}
