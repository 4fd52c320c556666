//! Thread-parallel drivers. Every restart and every node draws from its own
//! seeded stream, so results do not depend on the thread count.

use rayon::prelude::*;

use regdec_core::experiment::{success_trial, SuccessCurveConfig, SuccessPoint};
use regdec_core::solver::run_restart;
use regdec_core::{
    greedy_mdl_with, label_node, ClassifierModel, FitResult, FixedKFit, LinkData, Partition,
    SolverConfig,
};

use crate::error::{Error, Result};

pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start thread pool: {e}")))
}

fn restarts<G: LinkData + Sync + ?Sized>(
    graph: &G,
    k: usize,
    config: &SolverConfig,
) -> regdec_core::Result<FixedKFit> {
    config.resolve(graph.node_count())?;
    let outcomes = (0..config.restarts)
        .into_par_iter()
        .map(|m| run_restart(graph, k, config, m))
        .collect::<regdec_core::Result<Vec<_>>>()?;
    FixedKFit::from_outcomes(k, outcomes)
}

pub fn argmax_k<G: LinkData + Sync + ?Sized>(
    graph: &G,
    k: usize,
    config: &SolverConfig,
) -> Result<FixedKFit> {
    Ok(restarts(graph, k, config)?)
}

pub fn greedy_mdl<G: LinkData + Sync + ?Sized>(
    graph: &G,
    config: &SolverConfig,
) -> Result<FitResult> {
    Ok(greedy_mdl_with(graph, config, |k| {
        restarts(graph, k, config)
    })?)
}

pub fn extend_partition<G: LinkData + Sync + ?Sized>(
    graph: &G,
    model: &ClassifierModel,
) -> Result<Partition> {
    let labels = (0..graph.node_count())
        .into_par_iter()
        .map(|v| label_node(graph, model, v))
        .collect::<regdec_core::Result<Vec<u32>>>()?;
    Ok(Partition::new(model.k(), labels)?)
}

/// Same points as the serial curve, with trials spread over threads.
pub fn success_curve(config: &SuccessCurveConfig) -> Result<Vec<SuccessPoint>> {
    if config.trials == 0 || config.instances == 0 {
        return Err(
            regdec_core::Error::InvalidConfig("trials and instances must be positive").into(),
        );
    }
    config
        .sample_sizes
        .iter()
        .map(|&n0| {
            let outcomes = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = regdec_core::rng::mix(
                        regdec_core::rng::mix(config.seed, n0 as u64),
                        trial as u64,
                    );
                    success_trial(&config.spec, n0, config.instances, &config.labels, seed)
                })
                .collect::<regdec_core::Result<Vec<_>>>()?;
            let mut point = SuccessPoint {
                n0,
                trials: config.trials,
                correct: 0,
                total: 0,
                agrees_with_ideal: Some(0),
            };
            for o in outcomes {
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
