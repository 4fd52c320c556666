//! Sampling experiments: how well does a model fitted on `n0` sample nodes
//! classify the rest of a planted block-model graph?
//!
//! Only the links a trial actually looks at are drawn: those among the
//! sample and those from each test node to the sample. Since the model's
//! pairs are independent this has the same distribution as generating the
//! whole graph first.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;

use crate::bits::BitMatrix;
use crate::classifier::{build_model, classify, classify_ideal, LinkProfile};
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition, SbmSpec};
use crate::matching::match_blocks;
use crate::rng;
use crate::solver::{self, argmax_k, greedy_mdl, SolverConfig};

/// Where the sample's block labels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleLabels {
    /// The generator's labels.
    Planted,
    /// A fit of the sample graph with the generator's `k`, matched to the
    /// planted labels afterwards.
    FixedK(SolverConfig),
    /// A full two-part MDL fit of the sample graph, scanning `k` over the
    /// configured range (capped at the sample size), matched to the planted
    /// labels afterwards. Blocks beyond the planted count match nothing.
    Mdl(SolverConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCurveConfig {
    pub spec: SbmSpec,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    /// Out-of-sample nodes classified per trial.
    pub instances: usize,
    pub labels: SampleLabels,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub correct: usize,
    pub total: usize,
    /// Test nodes where the sample classifier and the generator-model
    /// classifier agree. Counted in planted mode when every generator
    /// probability lies strictly inside (0, 1); `None` otherwise.
    pub agrees_with_ideal: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessPoint {
    pub n0: usize,
    pub trials: usize,
    pub correct: usize,
    pub total: usize,
    pub agrees_with_ideal: Option<usize>,
}

impl SuccessPoint {
    pub fn success_fraction(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    pub fn ideal_disagreement(&self) -> Option<f64> {
        self.agrees_with_ideal
            .map(|a| 1.0 - a as f64 / self.total as f64)
    }
}

fn block_of(cumulative: &[usize], node: usize) -> usize {
    cumulative.partition_point(|&end| end <= node)
}

/// One trial: draw a sample and `instances` further nodes, label the sample,
/// and count how many test nodes are classified into their planted block.
pub fn success_trial(
    spec: &SbmSpec,
    n0: usize,
    instances: usize,
    labels: &SampleLabels,
    seed: u64,
) -> Result<TrialOutcome> {
    spec.validate()?;
    let n = spec.n();
    let k = spec.k();
    if n0 == 0 || n0 + instances > n {
        return Err(Error::InvalidSampleSize { n0, n });
    }
    let cumulative: Vec<usize> = spec
        .block_sizes
        .iter()
        .scan(0, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    let mut rng = rng::seeded(seed);
    let drawn = index::sample(&mut rng, n, n0 + instances).into_vec();
    let truth: Vec<usize> = drawn.iter().map(|&v| block_of(&cumulative, v)).collect();
    let (sample_truth, test_truth) = truth.split_at(n0);

    let mut adj = BitMatrix::zeros(n0);
    for a in 0..n0 {
        for b in a + 1..n0 {
            if rng.random::<f64>() < spec.prob(sample_truth[a], sample_truth[b]) {
                adj.set_sym(a, b, true);
            }
        }
    }
    let sample_graph = Graph::from_adjacency(adj)?;

    // sample partition and, for each of its blocks, the planted block it stands for
    let (partition, to_truth): (Partition, Vec<Option<usize>>) = match labels {
        SampleLabels::Planted => {
            let planted = Partition::new(k, sample_truth.iter().map(|&t| t as u32).collect())?;
            let (compact, old) = planted.compact();
            (compact, old.into_iter().map(Some).collect())
        }
        SampleLabels::FixedK(config) | SampleLabels::Mdl(config) => {
            let config = config.clone().with_seed(rng::mix(seed, config.seed));
            let fitted = if let SampleLabels::FixedK(_) = labels {
                argmax_k(&sample_graph, k.min(n0), &config)?.partition
            } else {
                let k_max = config.k_max.unwrap_or(solver::DEFAULT_K_CAP).min(n0);
                let k_min = config.k_min.min(k_max);
                greedy_mdl(
                    &sample_graph,
                    &SolverConfig {
                        k_min,
                        k_max: Some(k_max),
                        ..config
                    },
                )?
                .partition
            };
            let (compact, _) = fitted.compact();
            let truth_labels: Vec<u32> = sample_truth.iter().map(|&t| t as u32).collect();
            let map = match_blocks(compact.labels(), &truth_labels, compact.k(), k);
            (compact, map)
        }
    };
    let model = build_model(&sample_graph, &partition, &drawn[..n0])?;
    let sizes = model.block_sizes().to_vec();
    let relative = spec.relative_sizes();

    let ideal_defined =
        matches!(labels, SampleLabels::Planted) && spec.p.iter().all(|&p| p > 0.0 && p < 1.0);
    let mut outcome = TrialOutcome {
        total: instances,
        correct: 0,
        agrees_with_ideal: ideal_defined.then_some(0),
    };
    let mut sample_rows = vec![0u64; k];
    for &t in test_truth {
        let mut links = vec![0u64; model.k()];
        sample_rows.fill(0);
        for (a, &s_truth) in sample_truth.iter().enumerate() {
            if rng.random::<f64>() < spec.prob(t, s_truth) {
                links[partition.label(a)] += 1;
                sample_rows[s_truth] += 1;
            }
        }
        let profile = LinkProfile {
            links,
            pairs: sizes.clone(),
        };
        let block = classify(&profile, &model)?.block;
        let predicted = to_truth[block];
        if predicted == Some(t) {
            outcome.correct += 1;
        }
        if let Some(agree) = outcome.agrees_with_ideal.as_mut() {
            // the ideal classifier sees the same links, grouped by planted block
            let mut planted_pairs = vec![0u64; k];
            for &s in sample_truth {
                planted_pairs[s] += 1;
            }
            let planted_profile = LinkProfile {
                links: sample_rows.clone(),
                pairs: planted_pairs,
            };
            let ideal = classify_ideal(&planted_profile, &spec.p, &relative)?.block;
            if predicted == Some(ideal) {
                *agree += 1;
            }
        }
    }
    Ok(outcome)
}

/// Success fraction for each sample size, summed over independent trials.
pub fn success_curve(config: &SuccessCurveConfig) -> Result<Vec<SuccessPoint>> {
    if config.trials == 0 || config.instances == 0 {
        return Err(Error::InvalidConfig(
            "trials and instances must be positive",
        ));
    }
    config
        .sample_sizes
        .iter()
        .map(|&n0| {
            let mut point = SuccessPoint {
                n0,
                trials: config.trials,
                correct: 0,
                total: 0,
                agrees_with_ideal: Some(0),
            };
            for trial in 0..config.trials {
                let seed = rng::mix(rng::mix(config.seed, n0 as u64), trial as u64);
                let o = success_trial(&config.spec, n0, config.instances, &config.labels, seed)?;
                point.correct += o.correct;
                point.total += o.total;
                point.agrees_with_ideal = point
                    .agrees_with_ideal
                    .zip(o.agrees_with_ideal)
                    .map(|(a, b)| a + b);
            }
            Ok(point)
        })
        .collect()
}
