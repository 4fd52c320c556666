//! Graphs, masked graphs, partitions and the synthetic block-model generator.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;

use crate::bits::{BitMatrix, BitSet};
use crate::error::{Error, Result};
use crate::rng;

/// Link data as seen by the block statistics, the solver and the classifier.
///
/// `links` is the adjacency matrix (or the observed-link matrix `D` when data
/// is missing). `observed` is the mask `B` of pairs whose link status is
/// known; `None` means every off-diagonal pair is known.
pub trait LinkData {
    fn node_count(&self) -> usize;
    fn links(&self) -> &BitMatrix;
    fn observed(&self) -> Option<&BitMatrix>;
}

/// Dense simple undirected graph with nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: BitMatrix,
}

impl Graph {
    pub fn edgeless(n: usize) -> Self {
        Graph {
            adj: BitMatrix::zeros(n),
        }
    }

    pub fn complete(n: usize) -> Self {
        Graph {
            adj: BitMatrix::off_diagonal_ones(n),
        }
    }

    /// Builds a graph from unordered pairs. Repeated pairs (in either
    /// orientation) collapse into one edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = BitMatrix::zeros(n);
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { node: u });
            }
            adj.set_sym(u, v, true);
        }
        Ok(Graph { adj })
    }

    /// Wraps an adjacency matrix after checking symmetry and the zero diagonal.
    pub fn from_adjacency(adj: BitMatrix) -> Result<Self> {
        if let Some(node) = (0..adj.dim()).find(|&i| adj.get(i, i)) {
            return Err(Error::SelfLoop { node });
        }
        let n = adj.dim();
        for i in 0..n {
            for j in i + 1..n {
                if adj.get(i, j) != adj.get(j, i) {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        Ok(Graph { adj })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.dim()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn edge_count(&self) -> u64 {
        self.adj.count_ones() / 2
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.adj.row_count(v)
    }

    /// Edges `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |u| {
            (u + 1..n)
                .filter(move |&v| self.adj.get(u, v))
                .map(move |v| (u, v))
        })
    }

    /// Subgraph induced by `nodes`; node `a` of the result is `nodes[a]`.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        Graph {
            adj: self.adj.induced(nodes),
        }
    }
}

impl LinkData for Graph {
    fn node_count(&self) -> usize {
        self.n()
    }
    fn links(&self) -> &BitMatrix {
        &self.adj
    }
    fn observed(&self) -> Option<&BitMatrix> {
        None
    }
}

/// Graph whose link status is unknown for some node pairs.
///
/// The ternary view has entries `-1` (missing), `0` and `1`, with `-1` on the
/// diagonal. `D` holds the observed links and `B` marks the observed pairs, so
/// `D <= B` entrywise and the diagonal of `B` is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedGraph {
    d: BitMatrix,
    b: BitMatrix,
}

impl MaskedGraph {
    /// Every off-diagonal pair observed.
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.n();
        MaskedGraph {
            d: graph.adj.clone(),
            b: BitMatrix::off_diagonal_ones(n),
        }
    }

    /// Parses a ternary matrix. Diagonal entries are overwritten with `-1`
    /// whatever the input holds.
    pub fn from_ternary<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for (row, r) in rows.iter().enumerate() {
            let len = r.as_ref().len();
            if len != n {
                return Err(Error::NotSquare { row, len, n });
            }
        }
        let mut d = BitMatrix::zeros(n);
        let mut b = BitMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let value = rows[i].as_ref()[j];
                if !(-1..=1).contains(&value) {
                    return Err(Error::InvalidEntry { i, j, value });
                }
                if i == j {
                    continue;
                }
                if j > i && value != rows[j].as_ref()[i] {
                    return Err(Error::Asymmetric { i, j });
                }
                // D = (A + |A|) / 2, B = (A - |A|) / 2 + 1
                d.set(i, j, (value + value.abs()) / 2 == 1);
                b.set(i, j, (value - value.abs()) / 2 + 1 == 1);
            }
        }
        Ok(MaskedGraph { d, b })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.d.dim()
    }

    /// Ternary entry: `-1` missing, otherwise the link indicator.
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> i8 {
        if !self.b.get(i, j) {
            -1
        } else {
            self.d.get(i, j) as i8
        }
    }

    pub fn data_matrix(&self) -> &BitMatrix {
        &self.d
    }

    pub fn mask(&self) -> &BitMatrix {
        &self.b
    }

    /// Number of unordered node pairs with unknown link status.
    pub fn missing_pairs(&self) -> u64 {
        let n = self.n() as u64;
        n * n.saturating_sub(1) / 2 - self.b.count_ones() / 2
    }

    pub fn observed_links(&self) -> u64 {
        self.d.count_ones() / 2
    }

    /// Masked subgraph induced by `nodes`; node `a` of the result is `nodes[a]`.
    pub fn induced(&self, nodes: &[usize]) -> MaskedGraph {
        MaskedGraph {
            d: self.d.induced(nodes),
            b: self.b.induced(nodes),
        }
    }
}

impl LinkData for MaskedGraph {
    fn node_count(&self) -> usize {
        self.n()
    }
    fn links(&self) -> &BitMatrix {
        &self.d
    }
    fn observed(&self) -> Option<&BitMatrix> {
        Some(&self.b)
    }
}

/// Assignment of nodes to blocks `0..k`.
///
/// Blocks may be empty; `is_valid` tells whether every block is used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    k: usize,
    labels: Vec<u32>,
}

impl Partition {
    pub fn new(k: usize, labels: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidBlockCount { k, n: labels.len() });
        }
        if let Some((node, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= k) {
            return Err(Error::LabelOutOfRange { node, label, k });
        }
        Ok(Partition { k, labels })
    }

    pub(crate) fn from_raw(k: usize, labels: Vec<u32>) -> Self {
        debug_assert!(labels.iter().all(|&l| (l as usize) < k));
        Partition { k, labels }
    }

    pub fn single_block(n: usize) -> Self {
        Partition {
            k: 1,
            labels: vec![0; n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn label(&self, node: usize) -> usize {
        self.labels[node] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<u32> {
        self.labels
    }

    pub fn block_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.k];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// True when no block is empty.
    pub fn is_valid(&self) -> bool {
        self.block_sizes().iter().all(|&s| s > 0)
    }

    pub fn nonempty_blocks(&self) -> usize {
        self.block_sizes().iter().filter(|&&s| s > 0).count()
    }

    /// Block membership as bit sets over the nodes.
    pub fn masks(&self) -> Vec<BitSet> {
        let mut masks = vec![BitSet::new(self.n()); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            masks[l as usize].insert(i);
        }
        masks
    }

    /// Renumbers blocks so that only non-empty ones remain, preserving
    /// their relative order. Returns the new partition and, for each new
    /// block, the old block index.
    pub fn compact(&self) -> (Partition, Vec<usize>) {
        let sizes = self.block_sizes();
        let mut old_of_new = Vec::new();
        let mut new_of_old = vec![u32::MAX; self.k];
        for (b, &s) in sizes.iter().enumerate() {
            if s > 0 {
                new_of_old[b] = old_of_new.len() as u32;
                old_of_new.push(b);
            }
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| new_of_old[l as usize])
            .collect();
        (
            Partition {
                k: old_of_new.len().max(1),
                labels,
            },
            old_of_new,
        )
    }

    /// Partition after renaming node `i` to `perm[i]`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Partition {
        let mut labels = vec![0; self.n()];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i];
        }
        Partition { k: self.k, labels }
    }

    /// Partition after renaming block `b` to `block_perm[b]`.
    pub fn permute_blocks(&self, block_perm: &[usize]) -> Partition {
        let labels = self
            .labels
            .iter()
            .map(|&l| block_perm[l as usize] as u32)
            .collect();
        Partition { k: self.k, labels }
    }
}

/// Parameters of a planted block model.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    /// Row-major `k x k` symmetric link probabilities.
    pub p: Vec<f64>,
    pub seed: u64,
}

impl SbmSpec {
    pub fn new(block_sizes: Vec<usize>, p: Vec<f64>, seed: u64) -> Result<Self> {
        let spec = SbmSpec {
            block_sizes,
            p,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `k` equal blocks with probability `within` on the diagonal and
    /// `across` elsewhere.
    pub fn planted(
        k: usize,
        block_size: usize,
        within: f64,
        across: f64,
        seed: u64,
    ) -> Result<Self> {
        let p = (0..k * k)
            .map(|i| if i / k == i % k { within } else { across })
            .collect();
        SbmSpec::new(vec![block_size; k], p, seed)
    }

    /// `k` equal blocks with i.i.d. Uniform(0,1) probabilities drawn for the
    /// upper triangle from `p_seed`.
    pub fn uniform_random(k: usize, block_size: usize, p_seed: u64, seed: u64) -> Result<Self> {
        let mut rng = rng::seeded(p_seed);
        let mut p = vec![0.0; k * k];
        for a in 0..k {
            for b in a..k {
                let x: f64 = rng.random();
                p[a * k + b] = x;
                p[b * k + a] = x;
            }
        }
        SbmSpec::new(vec![block_size; k], p, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 || self.block_sizes.contains(&0) {
            return Err(Error::InvalidBlockCount { k, n: self.n() });
        }
        if self.p.len() != k * k {
            return Err(Error::SizeMismatch {
                expected: k * k,
                found: self.p.len(),
            });
        }
        if let Some(&value) = self.p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidProbability { value });
        }
        for a in 0..k {
            for b in a + 1..k {
                if self.p[a * k + b] != self.p[b * k + a] {
                    return Err(Error::Asymmetric { i: a, j: b });
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn n(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    #[inline]
    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.k() + b]
    }

    /// Relative block sizes `|V_i| / N`.
    pub fn relative_sizes(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.block_sizes.iter().map(|&s| s as f64 / n).collect()
    }

    /// Nodes are laid out block by block: block 0 holds `0..sizes[0]`, etc.
    pub fn planted_partition(&self) -> Partition {
        let labels = self
            .block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| core::iter::repeat_n(b as u32, s))
            .collect();
        Partition::from_raw(self.k(), labels)
    }

    /// Pairs of blocks whose probability rows coincide. Such a model has
    /// redundant structure; this is a warning, not an error.
    pub fn redundant_rows(&self) -> Vec<(usize, usize)> {
        let k = self.k();
        let mut out = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                if self.p[a * k..(a + 1) * k] == self.p[b * k..(b + 1) * k] {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Draws a graph from the block model. Pairs are visited in row-major
/// upper-triangle order with one uniform draw each, so the output depends
/// only on `spec` (including its seed).
pub fn generate_sbm(spec: &SbmSpec) -> Result<(Graph, Partition)> {
    spec.validate()?;
    let n = spec.n();
    if n < 2 {
        return Err(Error::InvalidBlockCount { k: spec.k(), n });
    }
    let planted = spec.planted_partition();
    let mut rng = rng::seeded(spec.seed);
    let mut adj = BitMatrix::zeros(n);
    for i in 0..n {
        let bi = planted.label(i);
        for j in i + 1..n {
            let p = spec.prob(bi, planted.label(j));
            if rng.random::<f64>() < p {
                adj.set_sym(i, j, true);
            }
        }
    }
    Ok((Graph { adj }, planted))
}

/// Uniform node sample together with the induced subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    /// Original ids in increasing order; sample node `a` is `nodes[a]`.
    pub nodes: Vec<usize>,
    pub graph: Graph,
}

/// Draws `n0` distinct nodes uniformly without replacement.
pub fn uniform_sample(graph: &Graph, n0: usize, seed: u64) -> Result<Sample> {
    let n = graph.n();
    if n0 == 0 || n0 > n {
        return Err(Error::InvalidSampleSize { n0, n });
    }
    let mut rng = rng::seeded(seed);
    let mut nodes = index::sample(&mut rng, n, n0).into_vec();
    nodes.sort_unstable();
    let sub = graph.induced(&nodes);
    Ok(Sample { nodes, graph: sub })
}

/// Marks each unordered pair missing independently with probability `q`.
pub fn drop_links(graph: &Graph, q: f64, seed: u64) -> Result<MaskedGraph> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidProbability { value: q });
    }
    let n = graph.n();
    let mut masked = MaskedGraph::from_graph(graph);
    let mut rng = rng::seeded(seed);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < q {
                masked.b.set_sym(i, j, false);
                masked.d.set_sym(i, j, false);
            }
        }
    }
    debug_assert!(masked.b.is_symmetric() && masked.d.is_symmetric());
    Ok(masked)
}
