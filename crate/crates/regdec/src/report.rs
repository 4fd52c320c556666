//! JSON records written next to every output.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use regdec_core::{ClassifierModel, CodeLengthReport, FitResult};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeLengthRecord {
    pub k: usize,
    pub data_bits: f64,
    pub model_bits: f64,
    pub total_bits: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    #[serde(rename = "L3")]
    pub l3: f64,
    #[serde(rename = "L4")]
    pub l4: f64,
    #[serde(rename = "L5")]
    pub l5: f64,
}

impl From<&CodeLengthReport> for CodeLengthRecord {
    fn from(r: &CodeLengthReport) -> Self {
        CodeLengthRecord {
            k: r.k,
            data_bits: r.data_bits,
            model_bits: r.model_bits,
            total_bits: r.total_bits,
            l1: r.terms.l1,
            l2: r.terms.l2,
            l3: r.terms.l3,
            l4: r.terms.l4,
            l5: r.terms.l5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub k: usize,
    pub total_bits: f64,
    pub likelihood_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub manifest: String,
    pub k_star: usize,
    /// Blocks of the selected partition that hold at least one node.
    pub nonempty_blocks: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub report: CodeLengthRecord,
    pub per_k: Vec<ScanRecord>,
    pub best_restart: usize,
    pub restart_costs: Vec<f64>,
    pub iterations_used: usize,
}

impl FitRecord {
    pub fn new(fit: &FitResult, manifest: &str) -> Self {
        FitRecord {
            manifest: manifest.to_owned(),
            k_star: fit.k_star,
            nonempty_blocks: fit.partition.nonempty_blocks(),
            seed: fit.seed,
            epsilon: fit.epsilon,
            report: CodeLengthRecord::from(&fit.report),
            per_k: fit
                .per_k
                .iter()
                .map(|e| ScanRecord {
                    k: e.k,
                    total_bits: e.total_bits,
                    likelihood_cost: e.likelihood_cost,
                })
                .collect(),
            best_restart: fit.fit.best_restart,
            restart_costs: fit.fit.restart_costs.clone(),
            iterations_used: fit.iterations_used,
        }
    }
}

/// Stored classifier: sample nodes with their labels and the empirical
/// block densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub manifest: String,
    pub k: usize,
    pub epsilon: f64,
    pub sample_nodes: Vec<usize>,
    pub sample_labels: Vec<u32>,
    /// Row-major `k x k`.
    pub raw_density: Vec<f64>,
}

impl ModelRecord {
    pub fn new(model: &ClassifierModel, manifest: &str) -> Self {
        ModelRecord {
            manifest: manifest.to_owned(),
            k: model.k(),
            epsilon: model.epsilon(),
            sample_nodes: model.sample_nodes().to_vec(),
            sample_labels: model.sample_labels().to_vec(),
            raw_density: model.raw_density().to_vec(),
        }
    }

    pub fn to_model(&self) -> Result<ClassifierModel> {
        Ok(ClassifierModel::from_parts(
            self.k,
            self.sample_nodes.clone(),
            self.sample_labels.clone(),
            self.raw_density.clone(),
            self.epsilon,
        )?)
    }
}

/// What a command was run with and what it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub seed_generated: bool,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_owned(),
            parameters: BTreeMap::new(),
            seed: None,
            seed_generated: false,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(name.to_owned(), value);
        self
    }

    /// Runs `f` and records its wall time under `phase`.
    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings
            .insert(phase.to_owned(), start.elapsed().as_secs_f64());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use regdec_core::{eq1_report, Graph, Partition};

    #[test]
    fn code_length_keys() {
        let r = eq1_report(
            &Graph::complete(4),
            &Partition::new(2, vec![0, 0, 1, 1]).unwrap(),
        )
        .unwrap();
        let json = serde_json::to_value(CodeLengthRecord::from(&r)).unwrap();
        let keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        for key in [
            "k",
            "data_bits",
            "model_bits",
            "total_bits",
            "L1",
            "L2",
            "L3",
            "L4",
            "L5",
        ] {
            assert!(keys.contains(&key), "{key} missing from {keys:?}");
        }
        assert_eq!(json["L3"], 4.0);
    }

    #[test]
    fn model_round_trip() {
        let model = ClassifierModel::from_parts(
            2,
            vec![4, 9, 1],
            vec![0, 1, 1],
            vec![0.5, 0.2, 0.2, 1.0],
            0.01,
        )
        .unwrap();
        let text = serde_json::to_string(&ModelRecord::new(&model, "m.json")).unwrap();
        let back: ModelRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_model().unwrap(), model);
    }

    #[test]
    fn manifest_records_parameters_and_timings() {
        let mut m = RunManifest::new("fit");
        m.param("restarts", 20).param("masked", false);
        let v = m.timed("solve", || 7);
        assert_eq!(v, 7);
        assert_eq!(m.parameters["restarts"], 20);
        assert!(m.timings["solve"] >= 0.0);
    }
}
