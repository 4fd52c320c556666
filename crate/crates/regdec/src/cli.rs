//! Command-line interface.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use regdec_core::experiment::{SampleLabels, SuccessCurveConfig};
use regdec_core::solver::Initialization;
use regdec_core::{
    build_model, drop_links, generate_sbm, rng, uniform_sample, LinkData, Partition, SbmSpec,
    SolverConfig,
};

use crate::error::Result;
use crate::io::{self, LoadedGraph};
use crate::report::{FitRecord, ModelRecord, RunManifest};
use crate::{experiment, parallel, render};

#[derive(Debug, Parser)]
#[command(
    name = "regdec",
    version,
    about = "Block-model fitting of dense graphs by two-part MDL"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random choice. Generated and logged when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; all available cores by default.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a graph from a stochastic block model.
    Generate(GenerateArgs),
    /// Fit a partition, scanning the number of blocks.
    Fit(FitArgs),
    /// Label every node of a graph with a stored sample model.
    Classify(ClassifyArgs),
    /// Run a seeded experiment and write its CSV table.
    Experiment(ExperimentArgs),
    /// Write the adjacency matrix, sorted by block, as a PGM image.
    Render(RenderArgs),
}

/// Block model given either by a JSON file or by equal block sizes and
/// densities. Without `--within`/`--across` every block-pair probability is
/// drawn uniformly from (0, 1).
#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// JSON file with `block_sizes` and row-major `p`.
    #[arg(long, conflicts_with_all = ["k", "block_size", "within", "across"])]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub block_size: Option<usize>,
    #[arg(long, requires = "across")]
    pub within: Option<f64>,
    #[arg(long, requires = "within")]
    pub across: Option<f64>,
    /// Seed of the random probability matrix; defaults to the run seed.
    #[arg(long)]
    pub p_seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpecFile {
    block_sizes: Vec<usize>,
    p: Vec<f64>,
}

impl ModelArgs {
    fn spec(&self, seed: u64, default_k: usize, default_size: usize) -> Result<SbmSpec> {
        if let Some(path) = &self.spec {
            let file: SpecFile = io::read_json(path)?;
            return Ok(SbmSpec::new(file.block_sizes, file.p, seed)?);
        }
        let k = self.k.unwrap_or(default_k);
        let size = self.block_size.unwrap_or(default_size);
        Ok(match (self.within, self.across) {
            (Some(w), Some(a)) => SbmSpec::planted(k, size, w, a, seed)?,
            _ => SbmSpec::uniform_random(k, size, self.p_seed.unwrap_or(seed), seed)?,
        })
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Hide each pair independently with this probability and write a
    /// ternary CSV instead of an edge list.
    #[arg(long)]
    pub missing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Uniform,
    Spread,
}

impl From<InitArg> for Initialization {
    fn from(a: InitArg) -> Self {
        match a {
            InitArg::Uniform => Initialization::Uniform,
            InitArg::Spread => Initialization::Spread,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    /// Largest k scanned; min(n, 25) by default.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Fit this k only.
    #[arg(long, conflicts_with_all = ["k_min", "k_max"])]
    pub fixed_k: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 100)]
    pub max_inner_iters: usize,
    /// End the scan at the first k whose total exceeds the best so far.
    #[arg(long)]
    pub stop_at_first_min: bool,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    pub init: InitArg,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> SolverConfig {
        let (k_min, k_max) = match self.fixed_k {
            Some(k) => (k, Some(k)),
            None => (self.k_min, self.k_max),
        };
        SolverConfig {
            restarts: self.restarts,
            max_inner_iters: self.max_inner_iters,
            k_min,
            k_max,
            stop_at_first_minimum: self.stop_at_first_min,
            seed,
            epsilon: None,
            init: self.init.into(),
        }
    }

    fn record(&self, m: &mut RunManifest) {
        m.param("k_min", self.k_min)
            .param("k_max", self.k_max)
            .param("fixed_k", self.fixed_k)
            .param("restarts", self.restarts)
            .param("max_inner_iters", self.max_inner_iters)
            .param("stop_at_first_min", self.stop_at_first_min)
            .param("init", format!("{:?}", self.init).to_lowercase());
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Use the observation mask of a ternary CSV. Without it unknown pairs
    /// count as non-links.
    #[arg(long)]
    pub masked: bool,
    /// Fit a uniform sample of this many nodes and classify the rest.
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub model: PathBuf,
    pub graph: PathBuf,
    #[arg(long)]
    pub masked: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    pub kind: ExperimentKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelsArg {
    Planted,
    FixedK,
    Mdl,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentKind {
    /// Classification success against sample size.
    SuccessCurve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 150, 200, 300])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Out-of-sample nodes classified per trial.
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Where sample labels come from.
        #[arg(long, value_enum, default_value_t = LabelsArg::Planted)]
        labels: LabelsArg,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Per-k code lengths of one planted graph.
    MdlScan {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Fixed-k recovery as more pairs are hidden.
    MissingSweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.2, 0.4, 0.6])]
        q: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub graph: PathBuf,
    pub labels: PathBuf,
    /// Output image; `render.pgm` in the output directory by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = render::MAX_SIDE)]
    pub max_side: usize,
}

struct Run<'a> {
    out_dir: &'a Path,
    manifest: RunManifest,
}

impl Run<'_> {
    fn manifest_name(&self) -> String {
        format!("{}.manifest.json", self.manifest.command)
    }

    fn tag(&self) -> Vec<String> {
        vec![format!("manifest: {}", self.manifest_name())]
    }

    fn output(&mut self, name: &str) -> PathBuf {
        let path = self.out_dir.join(name);
        self.manifest.outputs.push(path.display().to_string());
        path
    }

    fn input(&mut self, path: &Path) {
        self.manifest.inputs.push(path.display().to_string());
    }

    fn finish(self) -> Result<()> {
        io::write_json(&self.out_dir.join(self.manifest_name()), &self.manifest)
    }
}

fn resolve_seed(seed: Option<u64>, manifest: &mut RunManifest) -> u64 {
    let seed = seed.unwrap_or_else(|| {
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos() as u64);
        let s = rng::mix(nanos, std::process::id() as u64);
        eprintln!("seed {s} (generated)");
        manifest.seed_generated = true;
        s
    });
    manifest.seed = Some(seed);
    seed
}

fn record_model(m: &mut RunManifest, model: &ModelArgs, spec: &SbmSpec) {
    m.param(
        "spec_file",
        model.spec.as_ref().map(|p| p.display().to_string()),
    )
    .param("block_sizes", &spec.block_sizes)
    .param("p", &spec.p)
    .param("p_seed", model.p_seed);
}

fn generate(common: &Common, args: &GenerateArgs) -> Result<()> {
    let mut run = Run {
        out_dir: &common.out_dir,
        manifest: RunManifest::new("generate"),
    };
    let seed = resolve_seed(common.seed, &mut run.manifest);
    let spec = args.model.spec(seed, 1, 10)?;
    record_model(&mut run.manifest, &args.model, &spec);
    run.manifest.param("missing", args.missing);
    let (graph, planted) = run.manifest.timed("generate", || generate_sbm(&spec))?;
    let tag = run.tag();
    match args.missing {
        Some(q) => {
            let masked = drop_links(&graph, q, rng::mix(seed, 0x6d61_736b))?;
            let path = run.output("graph.csv");
            io::write_graph(&path, &LoadedGraph::Masked(masked), &tag)?;
        }
        None => {
            let path = run.output("graph.edges");
            io::write_graph(&path, &LoadedGraph::Plain(graph), &tag)?;
        }
    }
    let path = run.output("planted.labels");
    io::write_file(&path, io::format_labels(planted.labels(), &tag))?;
    run.finish()
}

fn load(path: &Path, masked: bool) -> Result<LoadedGraph> {
    let g = io::read_graph(path)?;
    Ok(match (masked, g.is_masked()) {
        (true, _) => LoadedGraph::Masked(g.into_masked()),
        (false, true) => LoadedGraph::Plain(g.unmasked()),
        (false, false) => g,
    })
}

fn fit(common: &Common, args: &FitArgs) -> Result<()> {
    let mut run = Run {
        out_dir: &common.out_dir,
        manifest: RunManifest::new("fit"),
    };
    let seed = resolve_seed(common.seed, &mut run.manifest);
    run.input(&args.graph);
    args.solver.record(&mut run.manifest);
    run.manifest
        .param("masked", args.masked)
        .param("sample", args.sample);
    let graph = run
        .manifest
        .timed("read", || load(&args.graph, args.masked))?;
    let n = graph.node_count();

    let sample_nodes: Vec<usize> = match args.sample {
        Some(n0) => uniform_sample(&graph.unmasked(), n0, rng::mix(seed, 0x7361_6d70))?.nodes,
        None => (0..n).collect(),
    };
    let sub = if args.sample.is_some() {
        graph.induced(&sample_nodes)
    } else {
        graph.clone()
    };
    let config = args.solver.config(seed);
    let result = run
        .manifest
        .timed("fit", || parallel::greedy_mdl(&sub, &config))?;

    println!("{:>4} {:>16} {:>16}", "k", "total_bits", "likelihood");
    for e in &result.per_k {
        let mark = if e.k == result.k_star { " *" } else { "" };
        println!(
            "{:>4} {:>16.3} {:>16.3}{mark}",
            e.k, e.total_bits, e.likelihood_cost
        );
    }

    let (compact, _) = result.partition.compact();
    let model = build_model(&sub, &compact, &sample_nodes)?;
    let labels = match args.sample {
        Some(_) => run
            .manifest
            .timed("classify", || parallel::extend_partition(&graph, &model))?,
        None => compact.clone(),
    };
    let tag = run.tag();
    let manifest_name = run.manifest_name();
    let path = run.output("fit.json");
    io::write_json(&path, &FitRecord::new(&result, &manifest_name))?;
    let path = run.output("model.json");
    io::write_json(&path, &ModelRecord::new(&model, &manifest_name))?;
    let path = run.output("fit.labels");
    io::write_file(&path, io::format_labels(labels.labels(), &tag))?;
    run.finish()
}

fn classify(common: &Common, args: &ClassifyArgs) -> Result<()> {
    let mut run = Run {
        out_dir: &common.out_dir,
        manifest: RunManifest::new("classify"),
    };
    run.input(&args.model);
    run.input(&args.graph);
    run.manifest.param("masked", args.masked);
    let record: ModelRecord = io::read_json(&args.model)?;
    let model = record.to_model()?;
    let graph = load(&args.graph, args.masked)?;
    let n = graph.node_count();
    if let Some(&node) = model.sample_nodes().iter().find(|&&v| v >= n) {
        return Err(regdec_core::Error::NodeOutOfRange { node, n }.into());
    }
    let start = Instant::now();
    let labels = parallel::extend_partition(&graph, &model)?;
    let secs = start.elapsed().as_secs_f64();
    run.manifest.timings.insert("classify".into(), secs);
    let outside = n - model.sample_size();
    run.manifest.param("classified_nodes", outside);
    println!(
        "classified {outside} nodes in {secs:.4} s ({:.1} ns per node)",
        if outside > 0 {
            secs * 1e9 / outside as f64
        } else {
            0.0
        }
    );
    let tag = run.tag();
    let path = run.output("classify.labels");
    io::write_file(&path, io::format_labels(labels.labels(), &tag))?;
    run.finish()
}

fn experiment_cmd(common: &Common, args: &ExperimentArgs) -> Result<()> {
    match &args.kind {
        ExperimentKind::SuccessCurve {
            model,
            sizes,
            trials,
            instances,
            labels,
            restarts,
        } => {
            let mut run = Run {
                out_dir: &common.out_dir,
                manifest: RunManifest::new("success-curve"),
            };
            let seed = resolve_seed(common.seed, &mut run.manifest);
            let spec = model.spec(seed, 10, 1000)?;
            record_model(&mut run.manifest, model, &spec);
            run.manifest
                .param("sizes", sizes)
                .param("trials", trials)
                .param("instances", instances)
                .param("labels", format!("{labels:?}"))
                .param("restarts", restarts);
            let solver = SolverConfig {
                restarts: *restarts,
                seed,
                ..Default::default()
            };
            let labels = match labels {
                LabelsArg::Planted => SampleLabels::Planted,
                LabelsArg::FixedK => SampleLabels::FixedK(solver),
                LabelsArg::Mdl => SampleLabels::Mdl(solver),
            };
            let config = SuccessCurveConfig {
                spec,
                sample_sizes: sizes.clone(),
                trials: *trials,
                instances: *instances,
                labels,
                seed,
            };
            let points = run
                .manifest
                .timed("run", || parallel::success_curve(&config))?;
            let csv = experiment::success_curve_csv(&points);
            print!("{csv}");
            let path = run.output("success_curve.csv");
            io::write_file(&path, csv)?;
            run.finish()
        }
        ExperimentKind::MdlScan { model, solver } => {
            let mut run = Run {
                out_dir: &common.out_dir,
                manifest: RunManifest::new("mdl-scan"),
            };
            let seed = resolve_seed(common.seed, &mut run.manifest);
            let spec = model.spec(seed, 4, 100)?;
            record_model(&mut run.manifest, model, &spec);
            solver.record(&mut run.manifest);
            let mut config = solver.config(seed);
            if solver.fixed_k.is_none() && solver.k_max.is_none() {
                config.k_max = Some(2 * spec.k());
            }
            let fit = run
                .manifest
                .timed("run", || experiment::mdl_scan(&spec, &config))?;
            let csv = experiment::mdl_scan_csv(&fit);
            print!("{csv}");
            println!("k* = {}", fit.k_star);
            let path = run.output("mdl_scan.csv");
            io::write_file(&path, csv)?;
            run.finish()
        }
        ExperimentKind::MissingSweep { model, q, restarts } => {
            let mut run = Run {
                out_dir: &common.out_dir,
                manifest: RunManifest::new("missing-sweep"),
            };
            let seed = resolve_seed(common.seed, &mut run.manifest);
            let spec = model.spec(seed, 5, 120)?;
            record_model(&mut run.manifest, model, &spec);
            run.manifest.param("q", q).param("restarts", restarts);
            let config = SolverConfig {
                restarts: *restarts,
                seed,
                ..Default::default()
            };
            let points = run.manifest.timed("run", || {
                experiment::missing_sweep(&spec, q, &config, rng::mix(seed, 0x6d61_736b))
            })?;
            let csv = experiment::missing_sweep_csv(&points);
            print!("{csv}");
            let path = run.output("missing_sweep.csv");
            io::write_file(&path, csv)?;
            run.finish()
        }
    }
}

fn render_cmd(common: &Common, args: &RenderArgs) -> Result<()> {
    let mut run = Run {
        out_dir: &common.out_dir,
        manifest: RunManifest::new("render"),
    };
    run.input(&args.graph);
    run.input(&args.labels);
    run.manifest.param("max_side", args.max_side);
    let graph = io::read_graph(&args.graph)?;
    let labels: Partition = io::read_labels(&args.labels, graph.node_count())?;
    let image = render::render(&graph, &labels, args.max_side)?;
    let path = match &args.out {
        Some(p) => {
            run.manifest.outputs.push(p.display().to_string());
            p.clone()
        }
        None => run.output("render.pgm"),
    };
    io::write_file(&path, image.to_pgm(&run.tag()))?;
    run.finish()
}

pub fn run(cli: &Cli) -> Result<()> {
    let pool = parallel::thread_pool(cli.common.threads)?;
    pool.install(|| match &cli.command {
        Command::Generate(a) => generate(&cli.common, a),
        Command::Fit(a) => fit(&cli.common, a),
        Command::Classify(a) => classify(&cli.common, a),
        Command::Experiment(a) => experiment_cmd(&cli.common, a),
        Command::Render(a) => render_cmd(&cli.common, a),
    })
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
