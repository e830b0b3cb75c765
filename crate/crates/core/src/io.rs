//! Edge-list and signal text formats.
//!
//! Edge list: UTF-8, one edge per line, whitespace-separated `u v [w]`.
//! Blank lines and lines whose first non-blank character is `#` are skipped.
//! Labels are arbitrary tokens. When every label parses as a non-negative
//! integer, vertices are ordered numerically; otherwise lexicographically.
//! The dense id of a vertex is its position in that order, so a file that
//! already uses ids `0..n` loads with the identity label map.
//!
//! For undirected loads, a pair listed in both orientations (or repeated) is
//! merged when the weights agree and rejected otherwise.
//!
//! Signal: one decimal float per line, line `i` holding the value of vertex
//! `i`. Blank and `#` lines are skipped.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Directedness, Edge, Graph, GraphError, GraphSignal};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: self-loop on vertex {label}")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: edge {u} {v} repeated with a different weight")]
    ConflictingDuplicate { line: usize, u: String, v: String },
    #[error("edge list is empty")]
    NoEdges,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub directedness: Directedness,
    /// Read the optional third column. When false every weight is 1.
    pub weighted: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { directedness: Directedness::Undirected, weighted: false }
    }
}

/// A loaded graph together with the original label of every dense id.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })
}

pub fn load_edge_list(path: impl AsRef<Path>, options: LoadOptions) -> Result<LabeledGraph, LoadError> {
    parse_edge_list(&read(path.as_ref())?, options)
}

pub fn parse_edge_list(text: &str, options: LoadOptions) -> Result<LabeledGraph, LoadError> {
    struct Raw<'a> {
        line: usize,
        u: &'a str,
        v: &'a str,
        w: f64,
    }

    let mut raw = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(LoadError::Malformed {
                line,
                message: format!("expected `u v [w]`, found {} fields", fields.len()),
            });
        }
        let w = match fields.get(2) {
            Some(tok) if options.weighted => tok
                .parse::<f64>()
                .map_err(|_| LoadError::Malformed { line, message: format!("weight `{tok}` is not a number") })?,
            _ => 1.0,
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(LoadError::Malformed { line, message: format!("weight {w} must be positive") });
        }
        if fields[0] == fields[1] {
            return Err(LoadError::SelfLoop { line, label: fields[0].to_string() });
        }
        raw.push(Raw { line, u: fields[0], v: fields[1], w });
    }
    if raw.is_empty() {
        return Err(LoadError::NoEdges);
    }

    let mut labels: Vec<&str> = raw.iter().flat_map(|r| [r.u, r.v]).collect();
    let numeric = labels.iter().all(|l| l.parse::<u64>().is_ok());
    if numeric {
        labels.sort_by_key(|l| l.parse::<u64>().unwrap());
        labels.dedup_by_key(|l| l.parse::<u64>().unwrap());
    } else {
        labels.sort_unstable();
        labels.dedup();
    }
    let index: BTreeMap<&str, usize> = if numeric {
        // "07" and "7" name the same vertex
        let by_value: BTreeMap<u64, usize> = labels.iter().enumerate().map(|(i, l)| (l.parse().unwrap(), i)).collect();
        raw.iter().flat_map(|r| [r.u, r.v]).map(|l| (l, by_value[&l.parse::<u64>().unwrap()])).collect()
    } else {
        labels.iter().enumerate().map(|(i, l)| (*l, i)).collect()
    };

    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for r in &raw {
        let (mut u, mut v) = (index[r.u], index[r.v]);
        if u == v {
            return Err(LoadError::SelfLoop { line: r.line, label: r.u.to_string() });
        }
        if options.directedness == Directedness::Undirected && u > v {
            std::mem::swap(&mut u, &mut v);
        }
        if let Some(&w) = merged.get(&(u, v)) {
            if w != r.w {
                return Err(LoadError::ConflictingDuplicate { line: r.line, u: r.u.to_string(), v: r.v.to_string() });
            }
        }
        merged.insert((u, v), r.w);
    }

    let graph =
        Graph::new(labels.len(), options.directedness, merged.into_iter().map(|((u, v), w)| Edge::weighted(u, v, w)))?;
    Ok(LabeledGraph { graph, labels: labels.into_iter().map(str::to_string).collect() })
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<GraphSignal, LoadError> {
    parse_signal(&read(path.as_ref())?)
}

pub fn parse_signal(text: &str) -> Result<GraphSignal, LoadError> {
    let mut values = Vec::new();
    for (line, content) in content_lines(text) {
        let v: f64 = content
            .parse()
            .map_err(|_| LoadError::Malformed { line, message: format!("`{content}` is not a number") })?;
        if !v.is_finite() {
            return Err(LoadError::Malformed { line, message: "value is not finite".into() });
        }
        values.push(v);
    }
    Ok(GraphSignal::new(values)?)
}

/// Loads a signal and checks it against `graph`.
pub fn load_signal_for(path: impl AsRef<Path>, graph: &Graph) -> Result<GraphSignal, LoadError> {
    let signal = load_signal(path)?;
    Ok(GraphSignal::for_graph(graph, signal.into_inner())?)
}

/// Serialises a graph in the edge-list format. Weights are written only when
/// the graph is weighted. Floats use Rust's shortest round-trip formatting.
pub fn format_edge_list(graph: &Graph) -> String {
    let weighted = graph.is_weighted();
    let mut out =
        format!("# {} graph, {} vertices, {} edges\n", graph.directedness(), graph.n_vertices(), graph.n_edges());
    for e in graph.edges() {
        if weighted {
            out.push_str(&format!("{} {} {}\n", e.source, e.target, e.weight));
        } else {
            out.push_str(&format!("{} {}\n", e.source, e.target));
        }
    }
    out
}

pub fn format_signal(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected() -> LoadOptions {
        LoadOptions::default()
    }

    #[test]
    fn parses_a_path() {
        let lg = parse_edge_list("0 1\n1 2\n", undirected()).unwrap();
        assert_eq!(lg.graph, Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(lg.labels, vec!["0", "1", "2"]);
    }

    #[test]
    fn self_loop_is_rejected() {
        let err = parse_edge_list("0 1\n2 2\n", undirected()).unwrap_err();
        assert!(matches!(err, LoadError::SelfLoop { line: 2, .. }), "{err}");
    }

    #[test]
    fn weights_are_read_when_asked() {
        let opts = LoadOptions { weighted: true, ..undirected() };
        let lg = parse_edge_list("0 1 0.5\n", opts).unwrap();
        assert_eq!(lg.graph.edges()[0].weight, 0.5);
        let lg = parse_edge_list("0 1 0.5\n", undirected()).unwrap();
        assert_eq!(lg.graph.edges()[0].weight, 1.0);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = parse_edge_list("# header\n0 1\n\n1\n", undirected()).unwrap_err();
        assert!(matches!(err, LoadError::Malformed { line: 4, .. }), "{err}");
        let opts = LoadOptions { weighted: true, ..undirected() };
        let err = parse_edge_list("0 1 x\n", opts).unwrap_err();
        assert!(matches!(err, LoadError::Malformed { line: 1, .. }));
        let err = parse_edge_list("0 1 -2\n", opts).unwrap_err();
        assert!(matches!(err, LoadError::Malformed { line: 1, .. }));
        assert!(matches!(parse_edge_list("# nothing\n", undirected()), Err(LoadError::NoEdges)));
    }

    #[test]
    fn labels_are_reindexed() {
        let lg = parse_edge_list("10 30\n30 20\n", undirected()).unwrap();
        assert_eq!(lg.labels, vec!["10", "20", "30"]);
        assert_eq!(lg.graph, Graph::undirected(3, &[(0, 2), (1, 2)]).unwrap());

        let lg = parse_edge_list("bob alice\ncarol bob\n", undirected()).unwrap();
        assert_eq!(lg.labels, vec!["alice", "bob", "carol"]);
        assert_eq!(lg.graph.n_edges(), 2);
    }

    #[test]
    fn symmetric_listings_merge() {
        let lg = parse_edge_list("0 1\n1 0\n1 2\n", undirected()).unwrap();
        assert_eq!(lg.graph.n_edges(), 2);
        let opts = LoadOptions { weighted: true, ..undirected() };
        assert!(matches!(
            parse_edge_list("0 1 1\n1 0 2\n", opts),
            Err(LoadError::ConflictingDuplicate { line: 2, .. })
        ));
        let directed = LoadOptions { directedness: Directedness::Directed, weighted: false };
        assert_eq!(parse_edge_list("0 1\n1 0\n", directed).unwrap().graph.n_edges(), 2);
    }

    #[test]
    fn signals_parse_and_validate() {
        let s = parse_signal("1.5\n# c\n-2e-3\n\n4\n").unwrap();
        assert_eq!(s.values(), &[1.5, -0.002, 4.0]);
        assert!(matches!(parse_signal("1\nabc\n"), Err(LoadError::Malformed { line: 2, .. })));
        assert!(matches!(parse_signal("inf\n"), Err(LoadError::Malformed { line: 1, .. })));
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g =
            Graph::new(3, Directedness::Undirected, [Edge::weighted(0, 1, 0.25), Edge::weighted(1, 2, 3.0)]).unwrap();
        let gp = dir.path().join("g.txt");
        fs::write(&gp, format_edge_list(&g)).unwrap();
        let opts = LoadOptions { weighted: true, ..undirected() };
        assert_eq!(load_edge_list(&gp, opts).unwrap().graph, g);

        let sp = dir.path().join("x.txt");
        let values = vec![0.1, 1.0 / 3.0, -7.25];
        fs::write(&sp, format_signal(&values)).unwrap();
        assert_eq!(load_signal_for(&sp, &g).unwrap().values(), values.as_slice());

        fs::write(&sp, "1\n2\n").unwrap();
        assert!(matches!(
            load_signal_for(&sp, &g),
            Err(LoadError::Graph(GraphError::SignalLength { expected: 3, got: 2 }))
        ));
        assert!(matches!(load_signal(dir.path().join("missing")), Err(LoadError::Io { .. })));
    }
}
