//! Text formats.
//!
//! * Edge list: one `u v` pair per line (whitespace or comma separated),
//!   `#` starts a comment. A `# nodes N` line fixes the node count, otherwise
//!   it is one more than the largest id seen.
//! * Ternary CSV: an `n x n` matrix of `-1` (unknown), `0` and `1`.
//! * Label file: header `node_id,block`, then one `node,block` line per node.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use regdec_core::bits::BitMatrix;
use regdec_core::{Graph, LinkData, MaskedGraph, Partition};

use crate::error::{Error, Result};

pub const LABEL_HEADER: &str = "node_id,block";

/// A graph read from disk, with or without an observation mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedGraph {
    Plain(Graph),
    Masked(MaskedGraph),
}

impl LoadedGraph {
    pub fn is_masked(&self) -> bool {
        matches!(self, LoadedGraph::Masked(_))
    }

    /// Treats unknown pairs as non-links.
    pub fn unmasked(&self) -> Graph {
        match self {
            LoadedGraph::Plain(g) => g.clone(),
            LoadedGraph::Masked(m) => Graph::from_adjacency(m.data_matrix().clone())
                .expect("observed links form a simple graph"),
        }
    }

    pub fn into_masked(self) -> MaskedGraph {
        match self {
            LoadedGraph::Plain(g) => MaskedGraph::from_graph(&g),
            LoadedGraph::Masked(m) => m,
        }
    }

    pub fn induced(&self, nodes: &[usize]) -> LoadedGraph {
        match self {
            LoadedGraph::Plain(g) => LoadedGraph::Plain(g.induced(nodes)),
            LoadedGraph::Masked(m) => LoadedGraph::Masked(m.induced(nodes)),
        }
    }
}

impl LinkData for LoadedGraph {
    fn node_count(&self) -> usize {
        match self {
            LoadedGraph::Plain(g) => g.node_count(),
            LoadedGraph::Masked(m) => m.node_count(),
        }
    }

    fn links(&self) -> &BitMatrix {
        match self {
            LoadedGraph::Plain(g) => g.links(),
            LoadedGraph::Masked(m) => m.links(),
        }
    }

    fn observed(&self) -> Option<&BitMatrix> {
        match self {
            LoadedGraph::Plain(g) => g.observed(),
            LoadedGraph::Masked(m) => m.observed(),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, field: Option<&str>) -> Result<T> {
    let field = field.ok_or_else(|| Error::parse(path, line, "missing field"))?;
    field
        .parse()
        .map_err(|_| Error::parse(path, line, format!("not a valid number: {field:?}")))
}

pub fn parse_edge_list(path: &Path, text: &str) -> Result<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(at) => (&raw[..at], Some(&raw[at + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut words = c.split_whitespace();
            if words.next() == Some("nodes") {
                declared = Some(parse_field::<usize>(path, line, words.next())?);
            }
        }
        let mut it = fields(body);
        let Some(first) = it.next() else { continue };
        let u: usize = parse_field(path, line, Some(first))?;
        let v: usize = parse_field(path, line, it.next())?;
        if it.next().is_some() {
            return Err(Error::parse(path, line, "expected two node ids"));
        }
        if u == v {
            return Err(Error::parse(path, line, format!("self-loop at node {u}")));
        }
        edges.push((u, v, line));
    }
    let n = match declared {
        Some(n) => n,
        None => edges
            .iter()
            .map(|&(u, v, _)| u.max(v) + 1)
            .max()
            .unwrap_or(0),
    };
    if let Some(&(u, v, line)) = edges.iter().find(|&&(u, v, _)| u.max(v) >= n) {
        return Err(Error::parse(
            path,
            line,
            format!("edge ({u}, {v}) outside {n} nodes"),
        ));
    }
    Ok(Graph::from_edges(
        n,
        edges.into_iter().map(|(u, v, _)| (u, v)),
    )?)
}

pub fn parse_ternary(path: &Path, text: &str) -> Result<MaskedGraph> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let row = fields(body)
            .map(|f| parse_field(path, idx + 1, Some(f)))
            .collect::<Result<Vec<i64>>>()?;
        rows.push(row);
    }
    Ok(MaskedGraph::from_ternary(&rows)?)
}

/// Reads a graph: files ending in `.csv` are ternary matrices, anything else
/// is an edge list.
pub fn read_graph(path: &Path) -> Result<LoadedGraph> {
    let text = read_to_string(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        Ok(LoadedGraph::Masked(parse_ternary(path, &text)?))
    } else {
        Ok(LoadedGraph::Plain(parse_edge_list(path, &text)?))
    }
}

fn comment_lines(out: &mut String, comments: &[String]) {
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
}

pub fn format_edge_list(graph: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    comment_lines(&mut out, comments);
    let _ = writeln!(out, "# nodes {}", graph.n());
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn format_ternary(graph: &MaskedGraph, comments: &[String]) -> String {
    let mut out = String::new();
    comment_lines(&mut out, comments);
    let n = graph.n();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", graph.raw(i, j));
        }
        out.push('\n');
    }
    out
}

pub fn write_graph(path: &Path, graph: &LoadedGraph, comments: &[String]) -> Result<()> {
    match graph {
        LoadedGraph::Plain(g) => write_file(path, format_edge_list(g, comments)),
        LoadedGraph::Masked(m) => write_file(path, format_ternary(m, comments)),
    }
}

pub fn format_labels(labels: &[u32], comments: &[String]) -> String {
    let mut out = String::with_capacity(labels.len() * 8 + 32);
    comment_lines(&mut out, comments);
    out.push_str(LABEL_HEADER);
    out.push('\n');
    for (node, block) in labels.iter().enumerate() {
        let _ = writeln!(out, "{node},{block}");
    }
    out
}

/// Parses a label file covering nodes `0..n`. The block count is one more
/// than the largest label.
pub fn parse_labels(path: &Path, text: &str, n: usize) -> Result<Partition> {
    let mut labels: Vec<Option<u32>> = vec![None; n];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() || body == LABEL_HEADER {
            continue;
        }
        let mut it = fields(body);
        let node: usize = parse_field(path, line, it.next())?;
        let block: u32 = parse_field(path, line, it.next())?;
        if node >= n {
            return Err(Error::parse(
                path,
                line,
                format!("node {node} outside {n} nodes"),
            ));
        }
        if labels[node].replace(block).is_some() {
            return Err(Error::parse(
                path,
                line,
                format!("node {node} labelled twice"),
            ));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(node, l)| {
            l.ok_or_else(|| Error::parse(path, 0, format!("no label for node {node}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let k = labels.iter().max().map_or(1, |&m| m as usize + 1);
    Ok(Partition::new(k, labels)?)
}

pub fn read_labels(path: &Path, n: usize) -> Result<Partition> {
    parse_labels(path, &read_to_string(path)?, n)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_to_string(path)?)?)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text)
}
