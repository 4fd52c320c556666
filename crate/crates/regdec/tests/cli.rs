use std::fs;
use std::path::{Path, PathBuf};

use regdec::cli::main_with;
use regdec::io::{self, LoadedGraph};
use regdec::render::{self, MISSING};
use regdec::report::{FitRecord, ModelRecord};
use regdec_core::matching::matched_accuracy;
use regdec_core::{build_model, generate_sbm, uniform_sample, Graph, LinkData, Partition, SbmSpec};

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["regdec"];
    full.extend_from_slice(args);
    main_with(full)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cliques(count: usize, size: usize) -> Graph {
    let mut edges = Vec::new();
    for c in 0..count {
        for u in 0..size {
            for v in u + 1..size {
                edges.push((c * size + u, c * size + v));
            }
        }
    }
    Graph::from_edges(count * size, edges).unwrap()
}

fn write_graph(dir: &Path, name: &str, g: LoadedGraph) -> PathBuf {
    let path = dir.join(name);
    io::write_graph(&path, &g, &[]).unwrap();
    path
}

fn labels_of(path: &Path, n: usize) -> Partition {
    io::read_labels(path, n).unwrap()
}

#[test]
fn generate_single_full_block() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate",
        "--k",
        "1",
        "--block-size",
        "5",
        "--within",
        "1",
        "--across",
        "0",
    ];
    assert_eq!(
        run(&[&args[..], &["--seed", "1", "--out-dir", s(dir.path())]].concat()),
        0
    );
    let g = io::read_graph(&dir.path().join("graph.edges"))
        .unwrap()
        .unmasked();
    assert_eq!((g.n(), g.edge_count()), (5, 10));
    let text = fs::read_to_string(dir.path().join("planted.labels")).unwrap();
    assert!(text.starts_with("# manifest: generate.manifest.json\nnode_id,block\n"));
    let manifest: serde_json::Value =
        io::read_json(&dir.path().join("generate.manifest.json")).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn generate_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let code = run(&[
            "generate",
            "--k",
            "10",
            "--block-size",
            "100",
            "--seed",
            "7",
            "--out-dir",
            s(dir.path()),
        ]);
        assert_eq!(code, 0);
    }
    for name in ["graph.edges", "planted.labels"] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let text = fs::read_to_string(a.path().join("graph.edges")).unwrap();
    assert!(text.contains("# nodes 1000\n"));
    let manifest: serde_json::Value =
        io::read_json(&a.path().join("generate.manifest.json")).unwrap();
    assert_eq!(manifest["parameters"]["p"].as_array().unwrap().len(), 100);
}

#[test]
fn fit_two_cliques_selects_two_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.edges", LoadedGraph::Plain(cliques(2, 8)));
    let out = dir.path().join("out");
    let code = run(&[
        "fit",
        s(&graph),
        "--k-min",
        "1",
        "--k-max",
        "4",
        "--seed",
        "3",
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let record: FitRecord = io::read_json(&out.join("fit.json")).unwrap();
    assert_eq!(record.k_star, 2);
    assert_eq!(record.per_k.len(), 4);
    assert_eq!(record.manifest, "fit.manifest.json");
    let labels = labels_of(&out.join("fit.labels"), 16);
    let truth: Vec<u32> = (0..16).map(|v| v / 8).collect();
    assert_eq!(
        matched_accuracy(labels.labels(), &truth, labels.k(), 2),
        1.0
    );

    // rendering the fit shows as many diagonal blocks as selected
    assert_eq!(
        run(&[
            "render",
            s(&graph),
            s(&out.join("fit.labels")),
            "--out-dir",
            s(&out)
        ]),
        0
    );
    let pgm = fs::read(out.join("render.pgm")).unwrap();
    let header = b"P5\n# manifest: render.manifest.json\n16 16\n255\n";
    assert!(pgm.starts_with(header));
    let image = render::render(&cliques(2, 8), &labels, render::MAX_SIDE).unwrap();
    assert_eq!(&pgm[header.len()..], &image.pixels[..]);
    assert_eq!(render::diagonal_runs(&image), record.k_star);
}

#[test]
fn fit_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SbmSpec::planted(3, 20, 0.7, 0.1, 2).unwrap();
    let graph = write_graph(
        dir.path(),
        "g.edges",
        LoadedGraph::Plain(generate_sbm(&spec).unwrap().0),
    );
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(threads);
        let code = run(&[
            "fit",
            s(&graph),
            "--k-max",
            "5",
            "--seed",
            "9",
            "--threads",
            threads,
            "--out-dir",
            s(&out),
        ]);
        assert_eq!(code, 0);
        outputs.push([
            fs::read(out.join("fit.json")).unwrap(),
            fs::read(out.join("fit.labels")).unwrap(),
        ]);
    }
    assert_eq!(outputs[0], outputs[1]);
}

fn planted_instance(dir: &Path, missing: Option<&str>) -> (PathBuf, Partition) {
    let mut args = vec![
        "generate",
        "--k",
        "10",
        "--block-size",
        "100",
        "--seed",
        "11",
        "--out-dir",
        s(dir),
    ];
    if let Some(q) = missing {
        args.extend_from_slice(&["--missing", q]);
    }
    assert_eq!(run(&args), 0);
    let name = if missing.is_some() {
        "graph.csv"
    } else {
        "graph.edges"
    };
    (dir.join(name), labels_of(&dir.join("planted.labels"), 1000))
}

#[test]
fn fit_recovers_uniform_density_instance() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, planted) = planted_instance(dir.path(), None);
    let out = dir.path().join("fit");
    let args = [
        "fit",
        s(&graph),
        "--fixed-k",
        "10",
        "--restarts",
        "20",
        "--init",
        "spread",
        "--seed",
        "5",
    ];
    assert_eq!(run(&[&args[..], &["--out-dir", s(&out)]].concat()), 0);
    let fitted = labels_of(&out.join("fit.labels"), 1000);
    let acc = matched_accuracy(fitted.labels(), planted.labels(), fitted.k(), 10);
    assert!(acc >= 0.99, "accuracy {acc}");
}

#[test]
fn fit_recovers_instance_with_missing_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, planted) = planted_instance(dir.path(), Some("0.3"));
    let masked = io::read_graph(&graph).unwrap();
    assert!(masked.is_masked());
    let out = dir.path().join("fit");
    let args = [
        "fit",
        s(&graph),
        "--masked",
        "--fixed-k",
        "10",
        "--init",
        "spread",
        "--seed",
        "5",
    ];
    assert_eq!(run(&[&args[..], &["--out-dir", s(&out)]].concat()), 0);
    let fitted = labels_of(&out.join("fit.labels"), 1000);
    let acc = matched_accuracy(fitted.labels(), planted.labels(), fitted.k(), 10);
    assert!(acc >= 0.95, "accuracy {acc}");

    assert_eq!(
        run(&[
            "render",
            s(&graph),
            s(&out.join("fit.labels")),
            "--out-dir",
            s(&out)
        ]),
        0
    );
    let image = render::render(&masked, &fitted, render::MAX_SIDE).unwrap();
    let LoadedGraph::Masked(m) = &masked else {
        unreachable!()
    };
    for (r, &u) in image.order.iter().enumerate().step_by(37) {
        for (c, &v) in image.order.iter().enumerate() {
            assert_eq!(image.pixel(r, c) == MISSING, !m.mask().get(u, v));
        }
    }
}

#[test]
fn classify_with_whole_graph_model_echoes_fit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SbmSpec::planted(3, 15, 0.8, 0.1, 4).unwrap();
    let graph = write_graph(
        dir.path(),
        "g.edges",
        LoadedGraph::Plain(generate_sbm(&spec).unwrap().0),
    );
    let out = dir.path().join("fit");
    assert_eq!(
        run(&[
            "fit",
            s(&graph),
            "--k-max",
            "4",
            "--seed",
            "1",
            "--out-dir",
            s(&out)
        ]),
        0
    );
    let model = out.join("model.json");
    assert_eq!(
        run(&["classify", s(&model), s(&graph), "--out-dir", s(&out)]),
        0
    );
    let fitted = fs::read_to_string(out.join("fit.labels")).unwrap();
    let classified = fs::read_to_string(out.join("classify.labels")).unwrap();
    let body = |t: &str| {
        t.lines()
            .filter(|l| !l.starts_with('#'))
            .map(str::to_owned)
            .collect::<Vec<_>>()
    };
    assert_eq!(body(&fitted), body(&classified));
}

#[test]
fn classify_from_sample_model() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SbmSpec::uniform_random(10, 200, 3, 3).unwrap();
    let (g, planted) = generate_sbm(&spec).unwrap();
    let graph = write_graph(dir.path(), "g.edges", LoadedGraph::Plain(g.clone()));
    let sample = uniform_sample(&g, 200, 8).unwrap();
    let labels = Partition::new(
        10,
        sample.nodes.iter().map(|&v| planted.labels()[v]).collect(),
    )
    .unwrap();
    let (labels, _) = labels.compact();
    let model = build_model(&sample.graph, &labels, &sample.nodes).unwrap();
    let model_path = dir.path().join("model.json");
    io::write_json(&model_path, &ModelRecord::new(&model, "none")).unwrap();
    assert_eq!(
        run(&[
            "classify",
            s(&model_path),
            s(&graph),
            "--out-dir",
            s(dir.path())
        ]),
        0
    );
    let out = labels_of(&dir.path().join("classify.labels"), g.n());
    let acc = matched_accuracy(out.labels(), planted.labels(), out.k(), 10);
    assert!(acc >= 0.99, "accuracy {acc}");
}

#[test]
fn fit_on_a_sample_labels_every_node() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SbmSpec::planted(3, 100, 0.7, 0.1, 6).unwrap();
    let (g, planted) = generate_sbm(&spec).unwrap();
    let graph = write_graph(dir.path(), "g.edges", LoadedGraph::Plain(g));
    let out = dir.path().join("fit");
    assert_eq!(
        run(&[
            "fit",
            s(&graph),
            "--sample",
            "60",
            "--k-max",
            "5",
            "--seed",
            "2",
            "--out-dir",
            s(&out)
        ]),
        0
    );
    let labels = labels_of(&out.join("fit.labels"), 300);
    assert!(matched_accuracy(labels.labels(), planted.labels(), labels.k(), 3) >= 0.99);
    let model: ModelRecord = io::read_json(&out.join("model.json")).unwrap();
    assert_eq!(model.sample_nodes.len(), 60);
}

#[test]
fn classify_rejects_model_outside_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(dir.path(), "g.edges", LoadedGraph::Plain(cliques(2, 3)));
    let model =
        regdec_core::ClassifierModel::from_parts(1, vec![0, 40], vec![0, 0], vec![0.5], 0.1)
            .unwrap();
    let path = dir.path().join("model.json");
    io::write_json(&path, &ModelRecord::new(&model, "none")).unwrap();
    assert_eq!(
        run(&["classify", s(&path), s(&graph), "--out-dir", s(dir.path())]),
        2
    );
}

#[test]
fn experiments_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    let code = run(&[
        "experiment",
        "success-curve",
        "--k",
        "4",
        "--block-size",
        "100",
        "--sizes",
        "8,40",
        "--trials",
        "3",
        "--instances",
        "50",
        "--seed",
        "1",
        "--out-dir",
        d,
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("success_curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n0,trials,success_fraction"));
    let fractions: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(fractions.len(), 2);
    assert!(fractions[1] >= fractions[0]);

    let code = run(&[
        "experiment",
        "mdl-scan",
        "--k",
        "3",
        "--block-size",
        "30",
        "--within",
        "0.8",
        "--across",
        "0.1",
        "--seed",
        "2",
        "--out-dir",
        d,
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("mdl_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    let totals: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let best = totals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0
        + 1;
    assert_eq!(best, 3);

    let code = run(&[
        "experiment",
        "missing-sweep",
        "--k",
        "3",
        "--block-size",
        "30",
        "--within",
        "0.8",
        "--across",
        "0.1",
        "--q",
        "0,0.3,0.6",
        "--seed",
        "3",
        "--out-dir",
        d,
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("missing_sweep.csv")).unwrap();
    assert!(csv.starts_with("q,missing_pairs,accuracy\n0,0,"));
    assert!(dir.path().join("missing-sweep.manifest.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["fit"]), 1);
    assert_eq!(run(&["fit", "x.edges", "--restarts", "many"]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
    assert_eq!(
        run(&["fit", s(&dir.path().join("absent.edges")), "--out-dir", d]),
        2
    );
    let bad = dir.path().join("bad.edges");
    fs::write(&bad, "0 1\n1 1\n").unwrap();
    assert_eq!(run(&["fit", s(&bad), "--seed", "1", "--out-dir", d]), 2);
    let graph = write_graph(dir.path(), "g.edges", LoadedGraph::Plain(cliques(2, 3)));
    assert_eq!(
        run(&[
            "fit",
            s(&graph),
            "--restarts",
            "0",
            "--seed",
            "1",
            "--out-dir",
            d
        ]),
        2
    );
    let labels = dir.path().join("short.labels");
    fs::write(&labels, "node_id,block\n0,0\n").unwrap();
    assert_eq!(run(&["render", s(&graph), s(&labels), "--out-dir", d]), 2);
}

#[test]
fn missing_seed_is_generated_and_logged() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&[
            "generate",
            "--k",
            "2",
            "--block-size",
            "3",
            "--out-dir",
            s(dir.path())
        ]),
        0
    );
    let manifest: serde_json::Value =
        io::read_json(&dir.path().join("generate.manifest.json")).unwrap();
    assert_eq!(manifest["seed_generated"], true);
    assert!(manifest["seed"].is_u64());
    let g = io::read_graph(&dir.path().join("graph.edges")).unwrap();
    assert_eq!(g.node_count(), 6);
}
