//! Optimal block matching between two labellings (Hungarian method), used to
//! score recovered partitions against planted ones.

use alloc::vec;
use alloc::vec::Vec;

/// Assignment minimizing the total cost of a square `n x n` integer matrix.
/// Returns `col_of_row`.
pub fn min_cost_assignment(cost: &[i64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    // potentials and matching are 1-based with column 0 as a sentinel
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        if row_of_col[j] > 0 {
            col_of_row[row_of_col[j] - 1] = j - 1;
        }
    }
    col_of_row
}

/// Maps each predicted block to a true block so that the number of nodes on
/// which the two labellings agree is maximal. Predicted blocks left without a
/// partner (more predicted than true blocks) map to `None`.
pub fn match_blocks(
    predicted: &[u32],
    truth: &[u32],
    k_pred: usize,
    k_true: usize,
) -> Vec<Option<usize>> {
    assert_eq!(predicted.len(), truth.len());
    let s = k_pred.max(k_true).max(1);
    let mut overlap = vec![0i64; s * s];
    for (&p, &t) in predicted.iter().zip(truth) {
        overlap[p as usize * s + t as usize] += 1;
    }
    let cost: Vec<i64> = overlap.iter().map(|&c| -c).collect();
    min_cost_assignment(&cost, s)
        .into_iter()
        .take(k_pred)
        .map(|t| (t < k_true).then_some(t))
        .collect()
}

/// Fraction of nodes whose predicted block maps to their true block under
/// the optimal matching.
pub fn matched_accuracy(predicted: &[u32], truth: &[u32], k_pred: usize, k_true: usize) -> f64 {
    if predicted.is_empty() {
        return 1.0;
    }
    let map = match_blocks(predicted, truth, k_pred, k_true);
    let hits = predicted
        .iter()
        .zip(truth)
        .filter(|(&p, &t)| map[p as usize] == Some(t as usize))
        .count();
    hits as f64 / predicted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn relabelled_partition_matches_perfectly() {
        let truth = [0, 0, 1, 1, 2, 2];
        let pred = [2, 2, 0, 0, 1, 1];
        assert_eq!(
            match_blocks(&pred, &truth, 3, 3),
            vec![Some(1), Some(2), Some(0)]
        );
        assert_eq!(matched_accuracy(&pred, &truth, 3, 3), 1.0);
    }

    #[test]
    fn extra_predicted_blocks_are_unmatched() {
        let truth = [0, 0, 0, 1];
        let pred = [0, 2, 0, 1];
        assert_eq!(matched_accuracy(&pred, &truth, 3, 2), 0.75);
    }

    proptest! {
        #[test]
        fn hungarian_matches_brute_force(n in 1usize..6, seed in proptest::collection::vec(-50i64..50, 36)) {
            let cost: Vec<i64> = seed[..n * n].to_vec();
            let best = permutations(n)
                .into_iter()
                .map(|p| p.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum::<i64>())
                .min()
                .unwrap();
            let got = min_cost_assignment(&cost, n);
            let mut cols = got.clone();
            cols.sort();
            prop_assert_eq!(cols, (0..n).collect::<Vec<_>>());
            prop_assert_eq!(got.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum::<i64>(), best);
        }
    }
}
