//! Greedy regular decomposition.
//!
//! `phi_step` moves every node at once to the block under which its links
//! are cheapest to encode given the current block densities. `argmax_k`
//! iterates that map from several random partitions and keeps the best local
//! optimum, and `greedy_mdl` scans the number of blocks for the shortest
//! two-part code.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::codelength::{block_stats, choose2, two_part_cost, CodeLengthReport};
use crate::error::{Error, Result};
use crate::graph::{LinkData, Partition};
use crate::rng;

/// Largest `k` scanned when no upper bound is configured.
pub const DEFAULT_K_CAP: usize = 25;
const MAX_INITIAL_DRAWS: usize = 1000;
const SPREAD_ATTEMPTS: usize = 10;
const LLOYD_ROUNDS: usize = 20;

/// How each restart picks its starting partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initialization {
    /// Uniformly random partition with no empty block.
    #[default]
    Uniform,
    /// `k` seed nodes chosen k-means++ style on the Hamming distance between
    /// adjacency rows; every node starts in the block of its nearest seed.
    Spread,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Independent random restarts per `k`.
    pub restarts: usize,
    /// Cap on reassignment rounds within one restart.
    pub max_inner_iters: usize,
    pub k_min: usize,
    /// Upper end of the scan; `None` means `min(n, 25)`.
    pub k_max: Option<usize>,
    pub stop_at_first_minimum: bool,
    pub seed: u64,
    /// Density floor used before taking logarithms; `None` picks
    /// [`default_epsilon`] for the graph size.
    pub epsilon: Option<f64>,
    pub init: Initialization,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 20,
            max_inner_iters: 100,
            k_min: 1,
            k_max: None,
            stop_at_first_minimum: false,
            seed: 0,
            epsilon: None,
            init: Initialization::Uniform,
        }
    }
}

impl SolverConfig {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k_min = k;
        self.k_max = Some(k);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    /// Checks the configuration against a graph of `n` nodes and returns the
    /// scan range and the density floor.
    pub fn resolve(&self, n: usize) -> Result<(usize, usize, f64)> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive"));
        }
        if self.max_inner_iters == 0 {
            return Err(Error::InvalidConfig("max_inner_iters must be positive"));
        }
        let k_max = self.k_max.unwrap_or(n.min(DEFAULT_K_CAP));
        if self.k_min == 0 || self.k_min > k_max || k_max > n {
            return Err(Error::InvalidConfig("k range must lie within [1, n]"));
        }
        let eps = self.epsilon.unwrap_or_else(|| default_epsilon(n));
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::InvalidConfig("epsilon must lie in (0, 0.5)"));
        }
        Ok((self.k_min, k_max, eps))
    }
}

/// `1 / (2 C(n, 2))`, below any non-zero empirical density of an `n`-node
/// graph, capped at 1/4 for tiny graphs.
pub fn default_epsilon(n: usize) -> f64 {
    let pairs = choose2(n as u64);
    if pairs == 0 {
        0.25
    } else {
        (1.0 / (2.0 * pairs as f64)).min(0.25)
    }
}

/// Block densities pushed into `[eps, 1 - eps]`, as row-major `k x k`
/// tables of `log2 p` and `log2 (1 - p)`.
pub(crate) fn clamped_logs(density: &[f64], eps: f64) -> (Vec<f64>, Vec<f64>) {
    density
        .iter()
        .map(|&p| {
            let p = p.clamp(eps, 1.0 - eps);
            (libm::log2(p), libm::log2(1.0 - p))
        })
        .unzip()
}

/// Row-major `n x k` matrix of per-node block costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub n: usize,
    pub k: usize,
    pub values: Vec<f64>,
}

impl CostMatrix {
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    /// Cheapest block of node `i`, first index on ties.
    pub fn argmin(&self, i: usize) -> (usize, f64) {
        let row = self.row(i);
        let mut best = (0, row[0]);
        for (a, &c) in row.iter().enumerate().skip(1) {
            if c < best.1 {
                best = (a, c);
            }
        }
        best
    }

    /// `sum_i min_a L[i][a]`.
    pub fn total_min(&self) -> f64 {
        (0..self.n).map(|i| self.argmin(i).1).sum()
    }

    pub fn assignment(&self) -> Partition {
        Partition::from_raw(
            self.k,
            (0..self.n).map(|i| self.argmin(i).0 as u32).collect(),
        )
    }
}

/// Cost, in bits, of coding node `i`'s link row under each block's densities:
/// `L[i][a] = -sum_{j != i} (a_ij log p[b_j][a] + (1 - a_ij) log(1 - p[b_j][a]))`.
///
/// With missing data only observed pairs are summed, and the partial sum over
/// block `b` is scaled up to the number of pairs node `i` has into `b`.
/// Blocks with no observed pair from `i` contribute nothing.
pub fn local_cost_matrix<G: LinkData + ?Sized>(
    graph: &G,
    partition: &Partition,
    eps: f64,
) -> Result<CostMatrix> {
    let stats = block_stats(graph, partition)?;
    let (n, k) = (partition.n(), partition.k());
    let (log_p, log_q) = clamped_logs(&stats.density, eps);
    let masks = partition.masks();
    let links = graph.links();
    let observed = graph.observed();

    let mut values = vec![0.0; n * k];
    for i in 0..n {
        let own = partition.label(i);
        let row = &mut values[i * k..(i + 1) * k];
        for (b, mask) in masks.iter().enumerate() {
            let full = stats.sizes[b] - (b == own) as u64;
            let seen = match observed {
                Some(obs) => obs.count_in(i, mask),
                None => full,
            };
            if seen == 0 {
                continue;
            }
            let e = links.count_in(i, mask) as f64;
            let non = (seen as f64) - e;
            let scale = if seen == full {
                1.0
            } else {
                full as f64 / seen as f64
            };
            for (a, cost) in row.iter_mut().enumerate() {
                let partial = -(e * log_p[b * k + a] + non * log_q[b * k + a]);
                *cost += partial * scale;
            }
        }
    }
    Ok(CostMatrix { n, k, values })
}

/// One simultaneous reassignment of every node to its cheapest block. The
/// result can contain empty blocks.
pub fn phi_step<G: LinkData + ?Sized>(
    graph: &G,
    partition: &Partition,
    eps: f64,
) -> Result<Partition> {
    Ok(local_cost_matrix(graph, partition, eps)?.assignment())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    FixedPoint,
    /// The map revisited an earlier partition.
    Cycle,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub partition: Partition,
    /// `sum_i min_a L(R)[i][a]` of the returned partition.
    pub cost: f64,
    /// Reassignment rounds performed.
    pub iterations: usize,
    pub termination: Termination,
}

/// Uniformly random partition with no empty block, by rejection. If that
/// keeps failing (k close to n) the first k nodes of a random permutation
/// seed one block each and the rest are uniform.
pub fn random_valid_partition(n: usize, k: usize, rng: &mut rng::Rng) -> Partition {
    let mut labels = vec![0u32; n];
    let mut sizes = vec![0usize; k];
    for _ in 0..MAX_INITIAL_DRAWS {
        sizes.fill(0);
        for l in labels.iter_mut() {
            *l = rng.random_range(0..k as u32);
            sizes[*l as usize] += 1;
        }
        if sizes.iter().all(|&s| s > 0) {
            return Partition::from_raw(k, labels);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (pos, &node) in order.iter().enumerate() {
        labels[node] = if pos < k {
            pos as u32
        } else {
            rng.random_range(0..k as u32)
        };
    }
    Partition::from_raw(k, labels)
}

fn neighbour_sums(links: &crate::bits::BitMatrix, x: &[f64], dim: usize) -> Vec<f64> {
    let n = links.dim();
    let mut out = vec![0.0; n * dim];
    for v in 0..n {
        let acc = &mut out[v * dim..(v + 1) * dim];
        for (wi, &word) in links.row(v).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let w = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                for (a, &b) in acc.iter_mut().zip(&x[w * dim..(w + 1) * dim]) {
                    *a += b;
                }
            }
        }
    }
    out
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Starting partition from a two-hop random projection of the adjacency
/// matrix: each node is embedded as `A A g` for random sign vectors `g`,
/// seeds are drawn k-means++ style and a few Lloyd rounds follow.
pub fn spread_partition<G: LinkData + ?Sized>(
    graph: &G,
    k: usize,
    rng: &mut rng::Rng,
) -> Partition {
    let n = graph.node_count();
    let dim = 2 * k;
    let signs: Vec<f64> = (0..n * dim)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let one_hop = neighbour_sums(graph.links(), &signs, dim);
    let x = neighbour_sums(graph.links(), &one_hop, dim);
    let mut best: Option<(f64, Vec<u32>)> = None;
    for _ in 0..SPREAD_ATTEMPTS {
        let (inertia, labels) = kmeans(&x, n, k, dim, rng);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    Partition::from_raw(k, best.expect("at least one attempt").1)
}

/// k-means++ seeding followed by Lloyd rounds; returns the inertia and labels.
fn kmeans(x: &[f64], n: usize, k: usize, dim: usize, rng: &mut rng::Rng) -> (f64, Vec<u32>) {
    let point = |v: usize| &x[v * dim..(v + 1) * dim];
    let mut centers: Vec<f64> = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centers.extend_from_slice(point(first));
    let mut nearest: Vec<f64> = (0..n).map(|v| sq_dist(point(v), point(first))).collect();
    while centers.len() < k * dim {
        let total: f64 = nearest.iter().sum();
        let mut pick = rng.random_range(0..n);
        if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            for (v, &w) in nearest.iter().enumerate() {
                if target < w {
                    pick = v;
                    break;
                }
                target -= w;
            }
        }
        centers.extend_from_slice(point(pick));
        for (v, near) in nearest.iter_mut().enumerate() {
            *near = near.min(sq_dist(point(v), point(pick)));
        }
    }

    let mut labels = vec![0u32; n];
    let mut inertia = 0.0;
    for round in 0..LLOYD_ROUNDS {
        inertia = 0.0;
        let mut changed = false;
        for (v, label) in labels.iter_mut().enumerate() {
            let mut best = (0, f64::INFINITY);
            for c in 0..k {
                let d = sq_dist(point(v), &centers[c * dim..(c + 1) * dim]);
                if d < best.1 {
                    best = (c, d);
                }
            }
            inertia += best.1;
            changed |= *label != best.0 as u32;
            *label = best.0 as u32;
        }
        if !changed && round > 0 {
            break;
        }
        let mut counts = vec![0usize; k];
        centers.iter_mut().for_each(|c| *c = 0.0);
        for (v, &label) in labels.iter().enumerate() {
            let c = label as usize;
            counts[c] += 1;
            for (a, &b) in centers[c * dim..(c + 1) * dim].iter_mut().zip(point(v)) {
                *a += b;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let v = rng.random_range(0..n);
                centers[c * dim..(c + 1) * dim].copy_from_slice(point(v));
            } else {
                centers[c * dim..(c + 1) * dim]
                    .iter_mut()
                    .for_each(|a| *a /= counts[c] as f64);
            }
        }
    }
    (inertia, labels)
}

/// A single restart: random valid start, then reassignment until a fixed
/// point, a revisited partition or the iteration cap. On a cycle or the cap
/// the cheapest partition seen is returned.
pub fn run_restart<G: LinkData + ?Sized>(
    graph: &G,
    k: usize,
    config: &SolverConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    let n = graph.node_count();
    if k == 0 || k > n {
        return Err(Error::InvalidBlockCount { k, n });
    }
    let (_, _, eps) = config.resolve(n)?;
    let mut rng = rng::substream(config.seed, k as u64, restart as u64);
    let mut current = match config.init {
        Initialization::Uniform => random_valid_partition(n, k, &mut rng),
        Initialization::Spread => spread_partition(graph, k, &mut rng),
    };
    let mut best: Option<(f64, Partition)> = None;
    let mut visited: Vec<Partition> = Vec::new();

    for iteration in 0..=config.max_inner_iters {
        let costs = local_cost_matrix(graph, &current, eps)?;
        let cost = costs.total_min();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, current.clone()));
        }
        let next = costs.assignment();
        if next == current {
            return Ok(RestartOutcome {
                partition: current,
                cost,
                iterations: iteration,
                termination: Termination::FixedPoint,
            });
        }
        let termination = if iteration == config.max_inner_iters {
            Some(Termination::IterationCap)
        } else if visited.contains(&next) {
            Some(Termination::Cycle)
        } else {
            None
        };
        if let Some(termination) = termination {
            let (cost, partition) = best.take().expect("at least one partition evaluated");
            return Ok(RestartOutcome {
                partition,
                cost,
                iterations: iteration + 1,
                termination,
            });
        }
        visited.push(core::mem::replace(&mut current, next));
    }
    unreachable!("loop returns by the iteration cap")
}

/// Result of the multi-restart search for one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedKFit {
    pub k: usize,
    pub partition: Partition,
    /// Cost of the selected restart.
    pub cost: f64,
    pub best_restart: usize,
    pub restart_costs: Vec<f64>,
    pub iterations: Vec<usize>,
    pub terminations: Vec<Termination>,
}

impl FixedKFit {
    /// Keeps the cheapest restart, the earliest one on ties.
    pub fn from_outcomes(k: usize, outcomes: Vec<RestartOutcome>) -> Result<Self> {
        let best = outcomes
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |acc, (m, o)| match acc {
                Some((_, c)) if c <= o.cost => acc,
                _ => Some((m, o.cost)),
            })
            .map(|(m, _)| m)
            .ok_or(Error::InvalidConfig("restarts must be positive"))?;
        let restart_costs = outcomes.iter().map(|o| o.cost).collect();
        let iterations = outcomes.iter().map(|o| o.iterations).collect();
        let terminations = outcomes.iter().map(|o| o.termination).collect();
        let chosen = outcomes
            .into_iter()
            .nth(best)
            .expect("index from the same list");
        Ok(FixedKFit {
            k,
            partition: chosen.partition,
            cost: chosen.cost,
            best_restart: best,
            restart_costs,
            iterations,
            terminations,
        })
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations.iter().sum()
    }
}

/// Best of `config.restarts` independent restarts for a fixed `k`.
pub fn argmax_k<G: LinkData + ?Sized>(
    graph: &G,
    k: usize,
    config: &SolverConfig,
) -> Result<FixedKFit> {
    let n = graph.node_count();
    if k == 0 || k > n {
        return Err(Error::InvalidBlockCount { k, n });
    }
    config.resolve(n)?;
    let outcomes = (0..config.restarts)
        .map(|m| run_restart(graph, k, config, m))
        .collect::<Result<Vec<_>>>()?;
    FixedKFit::from_outcomes(k, outcomes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEntry {
    pub k: usize,
    pub total_bits: f64,
    pub likelihood_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub k_star: usize,
    pub partition: Partition,
    pub report: CodeLengthReport,
    pub per_k: Vec<ScanEntry>,
    /// The winning `k`'s restarts.
    pub fit: FixedKFit,
    /// Reassignment rounds over the whole scan.
    pub iterations_used: usize,
    pub seed: u64,
    pub epsilon: f64,
}

/// Scans `k` upwards and keeps the partition with the shortest two-part
/// code, the smallest `k` on ties.
pub fn greedy_mdl<G: LinkData + ?Sized>(graph: &G, config: &SolverConfig) -> Result<FitResult> {
    greedy_mdl_with(graph, config, |k| argmax_k(graph, k, config))
}

/// [`greedy_mdl`] with a caller-supplied fixed-`k` search, so that drivers
/// can run the restarts in parallel.
pub fn greedy_mdl_with<G, F>(graph: &G, config: &SolverConfig, mut fit_k: F) -> Result<FitResult>
where
    G: LinkData + ?Sized,
    F: FnMut(usize) -> Result<FixedKFit>,
{
    let (k_lo, k_hi, epsilon) = config.resolve(graph.node_count())?;
    let mut per_k = Vec::new();
    let mut best: Option<(FixedKFit, CodeLengthReport)> = None;
    let mut iterations_used = 0;
    for k in k_lo..=k_hi {
        let fit = fit_k(k)?;
        iterations_used += fit.total_iterations();
        let report = two_part_cost(&block_stats(graph, &fit.partition)?);
        per_k.push(ScanEntry {
            k,
            total_bits: report.total_bits,
            likelihood_cost: fit.cost,
        });
        let best_total = best.as_ref().map(|(_, r)| r.total_bits);
        match best_total {
            Some(t) if report.total_bits >= t => {
                if config.stop_at_first_minimum && report.total_bits > t {
                    break;
                }
            }
            _ => best = Some((fit, report)),
        }
    }
    let (fit, report) = best.expect("scan range is non-empty");
    Ok(FitResult {
        k_star: fit.k,
        partition: fit.partition.clone(),
        report,
        per_k,
        fit,
        iterations_used,
        seed: config.seed,
        epsilon,
    })
}
