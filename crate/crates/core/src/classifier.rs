//! Out-of-sample classification.
//!
//! A block model fitted on a uniform node sample labels any further node from
//! its link counts into the sample blocks alone. The cost of placing node `v`
//! in block `a` is the code length of its links to the sample under row `a`
//! of the sample densities, and the node goes to the cheapest block. The same
//! decision can be written as a weighted Kullback-Leibler distance between the
//! node's observed densities and each density row.

use alloc::vec;
use alloc::vec::Vec;

use crate::codelength::block_stats;
use crate::error::{Error, Result};
use crate::graph::{LinkData, Partition};
use crate::solver::{clamped_logs, default_epsilon};

/// Block model of a fitted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    k: usize,
    sample_nodes: Vec<usize>,
    sample_labels: Vec<u32>,
    block_sizes: Vec<u64>,
    raw_density: Vec<f64>,
    epsilon: f64,
    density: Vec<f64>,
    log_p: Vec<f64>,
    log_q: Vec<f64>,
    /// `(node, label)` sorted by node for membership lookups.
    lookup: Vec<(usize, u32)>,
}

impl ClassifierModel {
    /// Assembles a model from stored parts. `raw_density` is the row-major
    /// `k x k` matrix of empirical sample densities.
    pub fn from_parts(
        k: usize,
        sample_nodes: Vec<usize>,
        sample_labels: Vec<u32>,
        raw_density: Vec<f64>,
        epsilon: f64,
    ) -> Result<Self> {
        if sample_nodes.len() != sample_labels.len() {
            return Err(Error::SizeMismatch {
                expected: sample_nodes.len(),
                found: sample_labels.len(),
            });
        }
        if raw_density.len() != k * k {
            return Err(Error::SizeMismatch {
                expected: k * k,
                found: raw_density.len(),
            });
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidConfig("epsilon must lie in (0, 0.5)"));
        }
        if let Some(&value) = raw_density.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability { value });
        }
        for a in 0..k {
            for b in a + 1..k {
                if raw_density[a * k + b] != raw_density[b * k + a] {
                    return Err(Error::Asymmetric { i: a, j: b });
                }
            }
        }
        let partition = Partition::new(k, sample_labels)?;
        let block_sizes = partition.block_sizes();
        if let Some(block) = block_sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyBlock { block });
        }
        let sample_labels = partition.into_labels();
        let mut lookup: Vec<(usize, u32)> = sample_nodes
            .iter()
            .copied()
            .zip(sample_labels.iter().copied())
            .collect();
        lookup.sort_unstable();
        if let Some(w) = lookup.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::NodeInSample { node: w[0].0 });
        }
        let density = raw_density
            .iter()
            .map(|p| p.clamp(epsilon, 1.0 - epsilon))
            .collect();
        let (log_p, log_q) = clamped_logs(&raw_density, epsilon);
        Ok(ClassifierModel {
            k,
            sample_nodes,
            sample_labels,
            block_sizes,
            raw_density,
            epsilon,
            density,
            log_p,
            log_q,
            lookup,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sample_size(&self) -> usize {
        self.sample_nodes.len()
    }

    pub fn sample_nodes(&self) -> &[usize] {
        &self.sample_nodes
    }

    pub fn sample_labels(&self) -> &[u32] {
        &self.sample_labels
    }

    pub fn block_sizes(&self) -> &[u64] {
        &self.block_sizes
    }

    /// `n_a / n0`.
    pub fn relative_sizes(&self) -> Vec<f64> {
        let n0 = self.sample_size() as f64;
        self.block_sizes.iter().map(|&s| s as f64 / n0).collect()
    }

    /// Empirical densities before clamping.
    pub fn raw_density(&self) -> &[f64] {
        &self.raw_density
    }

    /// Densities in `[eps, 1 - eps]`, used for classification.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Fitted label of `node` if it belongs to the sample.
    pub fn sample_label(&self, node: usize) -> Option<usize> {
        self.lookup
            .binary_search_by_key(&node, |&(v, _)| v)
            .ok()
            .map(|pos| self.lookup[pos].1 as usize)
    }
}

/// Model from a fitted sample. `sample_nodes[a]` is the id, in the full graph,
/// of node `a` of `sample_graph`.
pub fn build_model<G: LinkData + ?Sized>(
    sample_graph: &G,
    partition: &Partition,
    sample_nodes: &[usize],
) -> Result<ClassifierModel> {
    let n0 = sample_graph.node_count();
    if sample_nodes.len() != n0 {
        return Err(Error::SizeMismatch {
            expected: n0,
            found: sample_nodes.len(),
        });
    }
    if let Some(block) = partition.block_sizes().iter().position(|&s| s == 0) {
        return Err(Error::EmptyBlock { block });
    }
    let stats = block_stats(sample_graph, partition)?;
    ClassifierModel::from_parts(
        partition.k(),
        sample_nodes.to_vec(),
        partition.labels().to_vec(),
        stats.density,
        default_epsilon(n0),
    )
}

/// Links from one node into each sample block, and the number of sample
/// nodes per block the node's link status is known for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkProfile {
    pub links: Vec<u64>,
    pub pairs: Vec<u64>,
}

impl LinkProfile {
    /// Observed density `e_a / n_a` into block `a`; zero when nothing is known.
    pub fn density(&self, a: usize) -> f64 {
        if self.pairs[a] == 0 {
            0.0
        } else {
            self.links[a] as f64 / self.pairs[a] as f64
        }
    }
}

/// Counts the links from `node` into every sample block. On masked data only
/// observed pairs are counted.
pub fn link_profile<G: LinkData + ?Sized>(
    node: usize,
    graph: &G,
    model: &ClassifierModel,
) -> Result<LinkProfile> {
    let n = graph.node_count();
    if node >= n {
        return Err(Error::NodeOutOfRange { node, n });
    }
    if model.sample_label(node).is_some() {
        return Err(Error::NodeInSample { node });
    }
    let links_m = graph.links();
    let observed = graph.observed();
    let mut links = vec![0u64; model.k];
    let mut pairs = vec![0u64; model.k];
    for (&s, &label) in model.sample_nodes.iter().zip(&model.sample_labels) {
        if s >= n {
            return Err(Error::NodeOutOfRange { node: s, n });
        }
        if observed.is_some_and(|b| !b.get(node, s)) {
            continue;
        }
        pairs[label as usize] += 1;
        links[label as usize] += links_m.get(node, s) as u64;
    }
    Ok(LinkProfile { links, pairs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub block: usize,
    /// Score of every candidate block; lower is better.
    pub costs: Vec<f64>,
}

fn first_argmin(costs: Vec<f64>) -> Classification {
    let mut block = 0;
    for (a, &c) in costs.iter().enumerate().skip(1) {
        if c < costs[block] {
            block = a;
        }
    }
    Classification { block, costs }
}

fn check_profile(profile: &LinkProfile, k: usize) -> Result<()> {
    if profile.links.len() != k || profile.pairs.len() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            found: profile.links.len(),
        });
    }
    Ok(())
}

/// Maximum-likelihood block:
/// `C_a = sum_j -e_j log d[j][a] - (n_j - e_j) log(1 - d[j][a])`, in bits.
pub fn classify(profile: &LinkProfile, model: &ClassifierModel) -> Result<Classification> {
    let k = model.k;
    check_profile(profile, k)?;
    let costs = (0..k)
        .map(|a| {
            (0..k)
                .map(|j| {
                    let e = profile.links[j] as f64;
                    let non = (profile.pairs[j] - profile.links[j]) as f64;
                    -e * model.log_p[j * k + a] - non * model.log_q[j * k + a]
                })
                .sum()
        })
        .collect();
    Ok(first_argmin(costs))
}

/// Kullback-Leibler divergence from Bernoulli(p) to Bernoulli(q), in bits:
/// `q log(q/p) + (1-q) log((1-q)/(1-p))`.
pub fn kl_bernoulli(q: f64, p: f64) -> Result<f64> {
    for value in [q, p] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidProbability { value });
        }
    }
    if (p == 0.0 || p == 1.0) && q != p {
        return Err(Error::InvalidProbability { value: p });
    }
    Ok(kl(q, p))
}

#[inline]
fn kl(q: f64, p: f64) -> f64 {
    if q == p {
        return 0.0;
    }
    let mut d = 0.0;
    if q > 0.0 {
        d += q * libm::log2(q / p);
    }
    if q < 1.0 {
        d += (1.0 - q) * libm::log2((1.0 - q) / (1.0 - p));
    }
    d
}

/// Weights `n_i / sum n` of the blocks the profile has data for.
fn profile_weights(profile: &LinkProfile) -> Vec<f64> {
    let total: u64 = profile.pairs.iter().sum();
    profile
        .pairs
        .iter()
        .map(|&m| {
            if total == 0 {
                0.0
            } else {
                m as f64 / total as f64
            }
        })
        .collect()
}

/// The same decision as [`classify`], scored as
/// `sum_i r_i I(q_i : d[j][i])` over blocks `j`. The two scores differ by a
/// term that does not depend on the candidate block.
pub fn classify_kl(profile: &LinkProfile, model: &ClassifierModel) -> Result<Classification> {
    let k = model.k;
    check_profile(profile, k)?;
    let weights = profile_weights(profile);
    let costs = (0..k)
        .map(|j| {
            (0..k)
                .filter(|&i| profile.pairs[i] > 0)
                .map(|i| weights[i] * kl(profile.density(i), model.density[j * k + i]))
                .sum()
        })
        .collect();
    Ok(first_argmin(costs))
}

/// Classification under the generating model: true densities `p` (row-major
/// `k x k`) and true relative block sizes `r`.
pub fn classify_ideal(profile: &LinkProfile, p: &[f64], r: &[f64]) -> Result<Classification> {
    let k = r.len();
    check_profile(profile, k)?;
    if p.len() != k * k {
        return Err(Error::SizeMismatch {
            expected: k * k,
            found: p.len(),
        });
    }
    let mut costs = Vec::with_capacity(k);
    for j in 0..k {
        let mut score = 0.0;
        for i in (0..k).filter(|&i| profile.pairs[i] > 0) {
            score += r[i] * kl_bernoulli(profile.density(i), p[j * k + i])?;
        }
        costs.push(score);
    }
    Ok(first_argmin(costs))
}

/// Label of one node of the full graph: the fitted label for sample nodes,
/// the classifier's choice otherwise.
pub fn label_node<G: LinkData + ?Sized>(
    graph: &G,
    model: &ClassifierModel,
    node: usize,
) -> Result<u32> {
    match model.sample_label(node) {
        Some(label) => Ok(label as u32),
        None => Ok(classify(&link_profile(node, graph, model)?, model)?.block as u32),
    }
}

/// Labels every node of `graph`. Each out-of-sample node costs
/// `O(n0 + k^2)`, so the whole pass is linear in the number of nodes.
pub fn extend_partition<G: LinkData + ?Sized>(
    graph: &G,
    model: &ClassifierModel,
) -> Result<Partition> {
    let labels = (0..graph.node_count())
        .map(|v| label_node(graph, model, v))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(model.k, labels)
}
