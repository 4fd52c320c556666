//! Regular decomposition of dense simple graphs.
//!
//! The crate fits stochastic-block-model structure to a graph by minimizing a
//! two-part description length. Nodes are reassigned greedily to the block
//! under which their links are cheapest to encode, the fit is restarted from
//! several random partitions, and the number of blocks is chosen by scanning
//! `k` and keeping the shortest total code. Graphs with uniformly missing link
//! data are handled through an observation mask, and very large graphs can be
//! labelled by fitting a small uniform sample and classifying every remaining
//! node from its link counts into the sample blocks.
//!
//! Everything here is `no_std` + `alloc`. File formats, parallel drivers and
//! the command-line interface live in the `regdec` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bits;
pub mod classifier;
pub mod codelength;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod matching;
pub mod rng;
pub mod solver;

pub use classifier::{
    build_model, classify, classify_ideal, classify_kl, extend_partition, kl_bernoulli, label_node,
    link_profile, Classification, ClassifierModel, LinkProfile,
};
pub use codelength::{
    bernoulli_entropy, block_stats, eq1_report, l_star, two_part_cost, BlockStats,
    CodeLengthReport, Eq1Terms,
};
pub use error::{Error, Result};
pub use graph::{
    drop_links, generate_sbm, uniform_sample, Graph, LinkData, MaskedGraph, Partition, Sample,
    SbmSpec,
};
pub use solver::{
    argmax_k, greedy_mdl, greedy_mdl_with, local_cost_matrix, phi_step, CostMatrix, FitResult,
    FixedKFit, Initialization, RestartOutcome, SolverConfig, Termination,
};
