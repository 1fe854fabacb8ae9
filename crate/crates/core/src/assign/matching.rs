//! Exact maximum-weight bipartite matching.
//!
//! The weight matrix is padded to a square cost matrix with zero-weight dummy
//! entries and solved as a minimum-cost assignment (Hungarian method with
//! potentials, O(n^3)). Pairs landing on dummy rows or columns are dropped.

#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    /// `(row, column)` pairs, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the matched weights.
    pub total: f64,
}

/// Maximum-weight matching of a complete bipartite graph given as a
/// `rows × cols` matrix of nonnegative weights.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> Matching {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    debug_assert!(weights.iter().all(|r| r.len() == cols));
    let n = rows.max(cols);
    if rows == 0 || cols == 0 {
        return Matching {
            pairs: Vec::new(),
            total: 0.0,
        };
    }

    let w_max = weights
        .iter()
        .flatten()
        .copied()
        .fold(0.0_f64, f64::max);
    let cost = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            w_max - weights[i][j]
        } else {
            w_max
        }
    };

    // 1-based potentials; column 0 is the virtual root.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=n)
        .filter(|&j| owner[j] != 0)
        .map(|j| (owner[j] - 1, j - 1))
        .filter(|&(i, j)| i < rows && j < cols)
        .collect();
    pairs.sort_unstable();
    let total = pairs.iter().map(|&(i, j)| weights[i][j]).sum();
    Matching { pairs, total }
}
