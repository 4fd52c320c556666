//! Seeded experiments and their CSV tables.

use std::fmt::Write as _;

use regdec_core::experiment::SuccessPoint;
use regdec_core::matching::matched_accuracy;
use regdec_core::{drop_links, generate_sbm, FitResult, SbmSpec, SolverConfig};

use crate::error::Result;
use crate::parallel;

pub fn success_curve_csv(points: &[SuccessPoint]) -> String {
    let mut out = String::from("n0,trials,success_fraction\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.n0, p.trials, p.success_fraction());
    }
    out
}

/// Two-part MDL scan of one graph drawn from `spec`.
pub fn mdl_scan(spec: &SbmSpec, config: &SolverConfig) -> Result<FitResult> {
    let (graph, _) = generate_sbm(spec)?;
    parallel::greedy_mdl(&graph, config)
}

pub fn mdl_scan_csv(fit: &FitResult) -> String {
    let mut out = String::from("k,total_bits,likelihood_cost\n");
    for e in &fit.per_k {
        let _ = writeln!(out, "{},{},{}", e.k, e.total_bits, e.likelihood_cost);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub q: f64,
    pub missing_pairs: u64,
    pub accuracy: f64,
}

/// Fixed-`k` recovery of one planted graph as more and more pairs are
/// hidden. All levels share `mask_seed`, so a pair hidden at level `q` stays
/// hidden at every larger level.
pub fn missing_sweep(
    spec: &SbmSpec,
    qs: &[f64],
    config: &SolverConfig,
    mask_seed: u64,
) -> Result<Vec<SweepPoint>> {
    let (graph, planted) = generate_sbm(spec)?;
    let k = spec.k();
    qs.iter()
        .map(|&q| {
            let masked = drop_links(&graph, q, mask_seed)?;
            let fit = parallel::argmax_k(&masked, k, config)?;
            let accuracy = matched_accuracy(fit.partition.labels(), planted.labels(), k, k);
            Ok(SweepPoint {
                q,
                missing_pairs: masked.missing_pairs(),
                accuracy,
            })
        })
        .collect()
}

pub fn missing_sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("q,missing_pairs,accuracy\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.q, p.missing_pairs, p.accuracy);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_table() {
        let p = SuccessPoint {
            n0: 50,
            trials: 2,
            correct: 3,
            total: 4,
            agrees_with_ideal: None,
        };
        assert_eq!(
            success_curve_csv(&[p]),
            "n0,trials,success_fraction\n50,2,0.75\n"
        );
    }

    #[test]
    fn scan_finds_planted_blocks() {
        let spec = SbmSpec::planted(3, 20, 0.8, 0.1, 4).unwrap();
        let fit = mdl_scan(
            &spec,
            &SolverConfig {
                k_max: Some(5),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(fit.k_star, 3);
        let csv = mdl_scan_csv(&fit);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with("k,total_bits,likelihood_cost\n1,"));
    }

    #[test]
    fn sweep_masks_are_nested() {
        let spec = SbmSpec::planted(2, 20, 0.9, 0.1, 6).unwrap();
        let points = missing_sweep(&spec, &[0.0, 0.3, 0.6], &SolverConfig::default(), 1).unwrap();
        assert_eq!(points[0].missing_pairs, 0);
        assert!(points
            .windows(2)
            .all(|w| w[0].missing_pairs <= w[1].missing_pairs));
        assert_eq!(points[0].accuracy, 1.0);
        assert_eq!(missing_sweep_csv(&points).lines().count(), 4);
    }
}
