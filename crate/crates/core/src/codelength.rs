//! Description-length arithmetic, in bits.
//!
//! The two-part cost of a partition is the code length of the graph given the
//! block densities (a sum of `pairs * H(density)` over blocks and block pairs)
//! plus the code length of the model itself: the partition, coded through the
//! relative block sizes, and the integer link count of every block pair.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{LinkData, Partition};

/// Entropy of Bernoulli(p) in bits, with `0 log 0 = 0`.
pub fn bernoulli_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability { value: p });
    }
    Ok(entropy(p))
}

#[inline]
pub(crate) fn entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * libm::log2(p) - (1.0 - p) * libm::log2(1.0 - p)
}

/// Universal code length of a non-negative integer: `log m + log log m + ...`
/// summed while the iterated logarithm stays strictly positive. `l*(0)` and
/// `l*(1)` are zero.
pub fn l_star(m: u64) -> f64 {
    let mut total = 0.0;
    if m < 2 {
        return total;
    }
    let mut x = libm::log2(m as f64);
    while x > 0.0 {
        total += x;
        x = libm::log2(x);
    }
    total
}

#[inline]
pub(crate) fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Sum that does not depend on the order of the terms, so relabelling blocks
/// reproduces code lengths bit for bit.
fn order_free_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// Link counts, observed-pair counts and densities of every block pair.
///
/// Matrices are `k x k`, row-major and symmetric. For a graph without missing
/// data `pairs` holds `C(n_a, 2)` on the diagonal and `n_a n_b` elsewhere;
/// with missing data it counts only the observed pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStats {
    pub k: usize,
    pub sizes: Vec<u64>,
    pub links: Vec<u64>,
    pub pairs: Vec<u64>,
    pub density: Vec<f64>,
}

impl BlockStats {
    #[inline]
    pub fn link_count(&self, a: usize, b: usize) -> u64 {
        self.links[a * self.k + b]
    }

    #[inline]
    pub fn pair_count(&self, a: usize, b: usize) -> u64 {
        self.pairs[a * self.k + b]
    }

    #[inline]
    pub fn density_of(&self, a: usize, b: usize) -> f64 {
        self.density[a * self.k + b]
    }

    /// Pair count of block pair `(a, b)` if no data were missing.
    pub fn full_pair_count(&self, a: usize, b: usize) -> u64 {
        if a == b {
            choose2(self.sizes[a])
        } else {
            self.sizes[a] * self.sizes[b]
        }
    }

    pub fn n(&self) -> u64 {
        self.sizes.iter().sum()
    }

    pub fn total_links(&self) -> u64 {
        (0..self.k)
            .flat_map(|a| (a..self.k).map(move |b| (a, b)))
            .map(|(a, b)| self.link_count(a, b))
            .sum()
    }
}

/// Block statistics of `partition` on `graph`.
///
/// `P1 = R^T D R` gives the links (halved on the diagonal), and for masked
/// data `R^T B R` gives the observed pairs the same way.
pub fn block_stats<G: LinkData + ?Sized>(graph: &G, partition: &Partition) -> Result<BlockStats> {
    let n = graph.node_count();
    if partition.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: partition.n(),
        });
    }
    let k = partition.k();
    let masks = partition.masks();
    let sizes = partition.block_sizes();
    let links_m = graph.links();

    let mut p1 = vec![0u64; k * k];
    let mut observed = graph.observed().map(|_| vec![0u64; k * k]);
    for i in 0..n {
        let a = partition.label(i);
        for (b, mask) in masks.iter().enumerate() {
            p1[a * k + b] += links_m.count_in(i, mask);
        }
        if let (Some(obs), Some(b_m)) = (observed.as_mut(), graph.observed()) {
            for (b, mask) in masks.iter().enumerate() {
                obs[a * k + b] += b_m.count_in(i, mask);
            }
        }
    }

    let mut links = p1;
    let mut pairs = vec![0u64; k * k];
    for a in 0..k {
        links[a * k + a] /= 2;
        for b in 0..k {
            pairs[a * k + b] = match &observed {
                Some(obs) if a == b => obs[a * k + a] / 2,
                Some(obs) => obs[a * k + b],
                None if a == b => choose2(sizes[a]),
                None => sizes[a] * sizes[b],
            };
        }
    }
    let density = links
        .iter()
        .zip(&pairs)
        .map(|(&e, &m)| if m > 0 { e as f64 / m as f64 } else { 0.0 })
        .collect();
    Ok(BlockStats {
        k,
        sizes,
        links,
        pairs,
        density,
    })
}

/// The five terms of the full code length: block-size codes, link-count
/// codes, partition code, within-block and between-block data codes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Eq1Terms {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
}

impl Eq1Terms {
    pub fn total(&self) -> f64 {
        self.l1 + self.l2 + self.l3 + self.l4 + self.l5
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeLengthReport {
    pub k: usize,
    /// Code length of the graph given the block model.
    pub data_bits: f64,
    /// Code length of the block model.
    pub model_bits: f64,
    /// `ceil(data_bits) + model_bits`.
    pub total_bits: f64,
    pub terms: Eq1Terms,
}

/// Two-part code length from block statistics.
///
/// With missing data the densities come from the observed pairs while the
/// pair multipliers stay the true block-pair sizes, so each missing entry is
/// charged the average cost of the observed entries of its block pair.
pub fn two_part_cost(stats: &BlockStats) -> CodeLengthReport {
    let k = stats.k;
    let n = stats.n() as f64;

    let mut within = Vec::with_capacity(k);
    let mut between = Vec::with_capacity(k * k / 2);
    let mut link_codes = Vec::with_capacity(k * (k + 1) / 2);
    for a in 0..k {
        within.push(stats.full_pair_count(a, a) as f64 * entropy(stats.density_of(a, a)));
        for b in a..k {
            if b > a {
                between.push(stats.full_pair_count(a, b) as f64 * entropy(stats.density_of(a, b)));
            }
            link_codes.push(l_star(stats.link_count(a, b)));
        }
    }
    let l4 = order_free_sum(within);
    let l5 = order_free_sum(between);
    let l2 = order_free_sum(link_codes);

    let l1 = order_free_sum(stats.sizes.iter().map(|&s| l_star(s)).collect());
    let l3 = n * order_free_sum(
        stats
            .sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let r = s as f64 / n;
                -r * libm::log2(r)
            })
            .collect(),
    );

    let data_bits = l4 + l5;
    // Partition code is the multinomial n·H(ξ). With two blocks it equals
    // Σ n_i·H(n_i/n); beyond two the per-block Bernoulli form rewards splits.
    let model_bits = l3 + l2;
    CodeLengthReport {
        k,
        data_bits,
        model_bits,
        total_bits: libm::ceil(data_bits) + model_bits,
        terms: Eq1Terms { l1, l2, l3, l4, l5 },
    }
}

/// Block statistics and code lengths of `partition` in one call.
pub fn eq1_report<G: LinkData + ?Sized>(
    graph: &G,
    partition: &Partition,
) -> Result<CodeLengthReport> {
    Ok(two_part_cost(&block_stats(graph, partition)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_sbm, Graph, MaskedGraph, SbmSpec};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn entropy_values() {
        assert_eq!(bernoulli_entropy(0.5).unwrap(), 1.0);
        assert_eq!(bernoulli_entropy(0.0).unwrap(), 0.0);
        assert_eq!(bernoulli_entropy(1.0).unwrap(), 0.0);
        // 2 - (3/4) log2 3
        assert!(close(
            bernoulli_entropy(0.25).unwrap(),
            0.811_278_124_459_132_8
        ));
        assert!(bernoulli_entropy(-0.1).is_err());
        assert!(bernoulli_entropy(1.1).is_err());
    }

    #[test]
    fn l_star_values() {
        assert_eq!(l_star(0), 0.0);
        assert_eq!(l_star(1), 0.0);
        assert_eq!(l_star(2), 1.0);
        assert_eq!(l_star(16), 7.0);
        // log2 6 = 2.58496, log2 2.58496 = 1.37014, log2 1.37014 = 0.45433
        assert!((l_star(6) - 4.409_432_696).abs() < 1e-8, "{}", l_star(6));
    }

    #[test]
    fn triangle_split() {
        let g = Graph::complete(3);
        let p = Partition::new(2, vec![0, 0, 1]).unwrap();
        let s = block_stats(&g, &p).unwrap();
        assert_eq!(s.sizes, vec![2, 1]);
        assert_eq!(s.links, vec![1, 2, 2, 0]);
        assert_eq!(s.density, vec![1.0, 1.0, 1.0, 0.0]);

        let r = two_part_cost(&s);
        assert_eq!(r.data_bits, 0.0);
        let two_thirds = 2.0 * entropy(2.0 / 3.0) + entropy(1.0 / 3.0);
        let expected_model = two_thirds + l_star(1) + l_star(2) + l_star(0);
        assert!(close(r.model_bits, expected_model));
        assert_eq!(r.terms.l4 + r.terms.l5, 0.0);
    }

    #[test]
    fn four_cycle_split() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = Partition::new(2, vec![0, 0, 1, 1]).unwrap();
        let s = block_stats(&g, &p).unwrap();
        assert_eq!(s.links, vec![1, 2, 2, 1]);
        assert_eq!(s.density, vec![1.0, 0.5, 0.5, 1.0]);
        assert_eq!(s.total_links(), 4);
    }

    #[test]
    fn single_block_density() {
        let spec = SbmSpec::planted(2, 7, 0.6, 0.3, 8).unwrap();
        let (g, _) = generate_sbm(&spec).unwrap();
        let s = block_stats(&g, &Partition::single_block(14)).unwrap();
        assert_eq!(s.links, vec![g.edge_count()]);
        assert_eq!(s.density[0], g.edge_count() as f64 / 91.0);
    }

    #[test]
    fn degenerate_costs() {
        let r = eq1_report(&Graph::edgeless(9), &Partition::single_block(9)).unwrap();
        assert_eq!((r.data_bits, r.model_bits, r.total_bits), (0.0, 0.0, 0.0));

        let r = eq1_report(&Graph::complete(4), &Partition::single_block(4)).unwrap();
        assert_eq!(r.data_bits, 0.0);
        assert_eq!(r.model_bits, l_star(6));
        assert_eq!(r.terms.l3, 0.0);
    }

    #[test]
    fn equal_bipartition_partition_code() {
        let labels = (0..100).map(|i| (i % 2) as u32).collect();
        let r = eq1_report(&Graph::edgeless(100), &Partition::new(2, labels).unwrap()).unwrap();
        assert_eq!(r.terms.l3, 100.0);
        assert_eq!(r.terms.l1, 2.0 * l_star(50));
    }

    #[test]
    fn partition_code_is_multinomial() {
        let g = Graph::edgeless(6);
        let p = Partition::new(3, vec![0, 0, 0, 1, 1, 2]).unwrap();
        let r = eq1_report(&g, &p).unwrap();
        let expected =
            -(3.0 * (0.5f64).log2() + 2.0 * (1.0f64 / 3.0).log2() + (1.0f64 / 6.0).log2());
        assert!(close(r.model_bits, expected));
        assert!(close(r.model_bits, r.terms.l3 + r.terms.l2));

        // splitting a block always costs partition bits
        let q = Partition::new(4, vec![0, 0, 3, 1, 1, 2]).unwrap();
        assert!(eq1_report(&g, &q).unwrap().model_bits > r.model_bits);
    }

    #[test]
    fn masked_reduces_to_unmasked() {
        let spec = SbmSpec::planted(3, 9, 0.7, 0.2, 21).unwrap();
        let (g, planted) = generate_sbm(&spec).unwrap();
        let m = MaskedGraph::from_graph(&g);
        assert_eq!(
            block_stats(&m, &planted).unwrap(),
            block_stats(&g, &planted).unwrap()
        );
        assert_eq!(
            eq1_report(&m, &planted).unwrap(),
            eq1_report(&g, &planted).unwrap()
        );
    }

    #[test]
    fn masked_uses_observed_pairs() {
        // path 0-1-2 with pair {0,2} unknown
        let m =
            MaskedGraph::from_ternary(&[vec![-1, 1, -1], vec![1, -1, 1], vec![-1, 1, -1]]).unwrap();
        let s = block_stats(&m, &Partition::single_block(3)).unwrap();
        assert_eq!((s.links[0], s.pairs[0], s.density[0]), (2, 2, 1.0));
        // density 1 costs nothing, whatever the multiplier
        assert_eq!(two_part_cost(&s).data_bits, 0.0);

        let m =
            MaskedGraph::from_ternary(&[vec![-1, 1, 0], vec![1, -1, -1], vec![0, -1, -1]]).unwrap();
        let s = block_stats(&m, &Partition::single_block(3)).unwrap();
        assert_eq!((s.links[0], s.pairs[0]), (1, 2));
        // three true pairs charged at H(1/2)
        assert_eq!(two_part_cost(&s).data_bits, 3.0);
    }

    #[test]
    fn planted_beats_single_block() {
        for seed in 0..5 {
            let spec = SbmSpec::planted(2, 32, 0.9, 0.1, seed).unwrap();
            let (g, planted) = generate_sbm(&spec).unwrap();
            let split = eq1_report(&g, &planted).unwrap().total_bits;
            let one = eq1_report(&g, &Partition::single_block(64))
                .unwrap()
                .total_bits;
            assert!(split < one, "seed {seed}: {split} vs {one}");
        }
    }

    #[test]
    fn rejects_size_mismatch() {
        assert!(block_stats(&Graph::edgeless(3), &Partition::single_block(4)).is_err());
    }
}
