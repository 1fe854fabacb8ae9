//! Exhaustive optimum for small instances.

use super::{AlgoResult, Algorithm, Trace};
use crate::error::{Error, Result};
use crate::sensing::{channel_throughput, system_throughput, Assignment, Scenario};

/// Default bound on the number of feasible assignments examined. Covers
/// `N = 6`, `M = 4`, `l_i = 2` (11^6 = 1 771 561 assignments).
pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 2_000_000;

/// Active SUs (budget ≥ 1) are tracked in a dense lookup table of `2^n`
/// entries per channel.
const MAX_ACTIVE_SUS: usize = 22;

/// `Π_i Σ_{j ≤ l_i} C(M, j)`: the number of feasible assignments.
pub fn search_space_size(scenario: &Scenario) -> u128 {
    let m = scenario.m() as u128;
    scenario
        .sus()
        .iter()
        .map(|s| {
            let mut choices = 0u128;
            let mut binom = 1u128;
            for j in 0..=s.budget as u128 {
                choices += binom;
                binom = binom * (m - j) / (j + 1);
            }
            choices
        })
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

pub fn brute_force_opt(scenario: &Scenario) -> Result<AlgoResult> {
    brute_force_opt_with_cap(scenario, DEFAULT_BRUTE_FORCE_CAP)
}

/// Tries every feasible assignment (each SU independently picks a subset of
/// at most `l_i` channels) and keeps the first maximizer found.
pub fn brute_force_opt_with_cap(scenario: &Scenario, cap: u128) -> Result<AlgoResult> {
    let size = search_space_size(scenario);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    let m = scenario.m();
    let active: Vec<usize> = (0..scenario.n())
        .filter(|&i| scenario.su(i).budget > 0)
        .collect();
    if active.len() > MAX_ACTIVE_SUS || m > 64 {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }

    // Channel subsets each active SU may choose, as bitmasks over channels.
    let options: Vec<Vec<u64>> = active
        .iter()
        .map(|&i| {
            let budget = scenario.su(i).budget as u32;
            (0..1u64 << m).filter(|mask| mask.count_ones() <= budget).collect()
        })
        .collect();

    let mut search = Search {
        scenario,
        active: &active,
        options: &options,
        table: vec![vec![f64::NAN; 1 << active.len()]; m],
        members: vec![0u32; m],
        best_value: f64::NEG_INFINITY,
        best_members: vec![0u32; m],
        evaluated: 0,
    };
    search.descend(0)?;

    let sets = search
        .best_members
        .iter()
        .map(|&mask| members_of(mask, &active))
        .collect();
    let assignment = Assignment::from_sets(sets)?;
    let value = system_throughput(&assignment, scenario)?;
    Ok(AlgoResult {
        algorithm: Algorithm::BruteForce,
        assignment,
        value,
        trace: Trace::BruteForce {
            evaluated: search.evaluated,
        },
    })
}

fn members_of(mask: u32, active: &[usize]) -> Vec<usize> {
    active
        .iter()
        .enumerate()
        .filter(|(bit, _)| mask >> bit & 1 == 1)
        .map(|(_, &i)| i)
        .collect()
}

struct Search<'a> {
    scenario: &'a Scenario,
    active: &'a [usize],
    options: &'a [Vec<u64>],
    /// `U_k` memoized by the bitmask of active SUs sensing channel `k`.
    table: Vec<Vec<f64>>,
    /// Current bitmask of active SUs per channel.
    members: Vec<u32>,
    best_value: f64,
    best_members: Vec<u32>,
    evaluated: u128,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize) -> Result<()> {
        if depth == self.active.len() {
            return self.leaf();
        }
        let bit = 1u32 << depth;
        for idx in 0..self.options[depth].len() {
            let channels = self.options[depth][idx];
            for_each_bit(channels, |k| self.members[k] |= bit);
            self.descend(depth + 1)?;
            for_each_bit(channels, |k| self.members[k] &= !bit);
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        self.evaluated += 1;
        let mut total = 0.0;
        for k in 0..self.members.len() {
            let mask = self.members[k] as usize;
            let mut u = self.table[k][mask];
            if u.is_nan() {
                u = channel_throughput(&members_of(mask as u32, self.active), k, self.scenario)?;
                self.table[k][mask] = u;
            }
            total += u;
        }
        if total > self.best_value {
            self.best_value = total;
            self.best_members.copy_from_slice(&self.members);
        }
        Ok(())
    }
}

fn for_each_bit(mut mask: u64, mut f: impl FnMut(usize)) {
    while mask != 0 {
        f(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{single_su_throughput, ChannelParams, SuProfile};

    #[test]
    fn single_su_single_channel() {
        let s = Scenario::new(
            0.2,
            vec![ChannelParams { pi0: 0.4, gamma: 1.5 }],
            vec![SuProfile::new(1, vec![0.1], vec![0.2])],
        )
        .unwrap();
        let r = brute_force_opt(&s).unwrap();
        assert_eq!(r.value, single_su_throughput(0, 0, &s));
        assert!(r.value >= s.channel(0).theta2());
        assert_eq!(r.trace, Trace::BruteForce { evaluated: 2 });
    }

    #[test]
    fn search_space_counts() {
        let row = |l| SuProfile::new(l, vec![0.1; 4], vec![0.1; 4]);
        let s = Scenario::new(
            0.2,
            vec![ChannelParams { pi0: 0.4, gamma: 1.5 }; 4],
            vec![row(2), row(2), row(2), row(2), row(2), row(2)],
        )
        .unwrap();
        assert_eq!(search_space_size(&s), 11u128.pow(6));
        let s = Scenario::new(
            0.2,
            vec![ChannelParams { pi0: 0.4, gamma: 1.5 }; 4],
            vec![row(0), row(4), row(1)],
        )
        .unwrap();
        assert_eq!(search_space_size(&s), 16 * 5);
    }

    #[test]
    fn cap_is_enforced() {
        let row = SuProfile::new(2, vec![0.1; 4], vec![0.1; 4]);
        let s = Scenario::new(
            0.2,
            vec![ChannelParams { pi0: 0.4, gamma: 1.5 }; 4],
            vec![row.clone(), row.clone(), row],
        )
        .unwrap();
        assert!(matches!(
            brute_force_opt_with_cap(&s, 1000),
            Err(Error::SearchSpaceTooLarge { size: 1331, cap: 1000 })
        ));
        assert!(brute_force_opt_with_cap(&s, 1331).is_ok());
    }
}
