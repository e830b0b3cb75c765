//! Vertex centralities, each returned as a signal indexed by vertex id.
//!
//! Distance-based measures (betweenness, closeness, harmonic) use hop counts
//! and ignore edge weights. Degree, eigenvector and PageRank use weights.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::MeasureError;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CentralityKind {
    Eigenvector,
    Betweenness,
    Closeness,
    Harmonic,
    Degree,
    Pagerank,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 6] = [
        CentralityKind::Eigenvector,
        CentralityKind::Betweenness,
        CentralityKind::Closeness,
        CentralityKind::Harmonic,
        CentralityKind::Degree,
        CentralityKind::Pagerank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CentralityKind::Eigenvector => "eigenvector",
            CentralityKind::Betweenness => "betweenness",
            CentralityKind::Closeness => "closeness",
            CentralityKind::Harmonic => "harmonic",
            CentralityKind::Degree => "degree",
            CentralityKind::Pagerank => "pagerank",
        }
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CentralityKind {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CentralityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| MeasureError::UnknownCentrality(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralityOptions {
    pub max_iterations: usize,
    /// Max-norm change between power iterates at which eigenvector
    /// centrality stops.
    pub eigenvector_tol: f64,
    pub damping: f64,
    /// L1 change between iterates at which PageRank stops.
    pub pagerank_tol: f64,
}

impl Default for CentralityOptions {
    fn default() -> Self {
        CentralityOptions { max_iterations: 100_000, eigenvector_tol: 1e-10, damping: 0.85, pagerank_tol: 1e-12 }
    }
}

pub fn centrality(graph: &Graph, kind: CentralityKind, options: &CentralityOptions) -> Result<Vec<f64>, MeasureError> {
    graph.require_undirected()?;
    match kind {
        CentralityKind::Degree => Ok((0..graph.n_vertices()).map(|v| graph.strength(v)).collect()),
        CentralityKind::Eigenvector => eigenvector(graph, options),
        CentralityKind::Pagerank => pagerank(graph, options),
        CentralityKind::Closeness => closeness(graph),
        CentralityKind::Harmonic => Ok(harmonic(graph)),
        CentralityKind::Betweenness => Ok(betweenness(graph)),
    }
}

/// Power iteration on `A + I`: same eigenvectors as `A`, but the Perron
/// eigenvalue strictly dominates, so bipartite graphs converge too.
fn eigenvector(graph: &Graph, options: &CentralityOptions) -> Result<Vec<f64>, MeasureError> {
    let n = graph.n_vertices();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..options.max_iterations {
        let ax = graph.adjacency_apply(&x);
        let mut next: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a + b).collect();
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if change < options.eigenvector_tol {
            // all-positive start keeps iterates nonnegative; clear -0.0
            return Ok(x.into_iter().map(|v| v.max(0.0)).collect());
        }
    }
    Err(MeasureError::NoConvergence { kind: "eigenvector", iterations: options.max_iterations })
}

fn pagerank(graph: &Graph, options: &CentralityOptions) -> Result<Vec<f64>, MeasureError> {
    let n = graph.n_vertices();
    let nf = n as f64;
    let d = options.damping;
    let strength: Vec<f64> = (0..n).map(|v| graph.strength(v)).collect();
    let mut x = vec![1.0 / nf; n];
    for _ in 0..options.max_iterations {
        // undirected graphs here have no dangling vertices
        let share: Vec<f64> = x.iter().zip(&strength).map(|(a, s)| a / s).collect();
        let next: Vec<f64> = (0..n)
            .map(|v| {
                let inflow: f64 =
                    graph.neighbors(v).iter().zip(graph.neighbor_weights(v)).map(|(&u, &w)| w * share[u]).sum();
                (1.0 - d) / nf + d * inflow
            })
            .collect();
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < options.pagerank_tol {
            return Ok(x);
        }
    }
    Err(MeasureError::NoConvergence { kind: "pagerank", iterations: options.max_iterations })
}

fn bfs_distances(graph: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.n_vertices()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        for &w in graph.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `(n - 1) / sum_v dist(u, v)`.
fn closeness(graph: &Graph) -> Result<Vec<f64>, MeasureError> {
    let n = graph.n_vertices();
    (0..n)
        .into_par_iter()
        .map(|u| {
            let dist = bfs_distances(graph, u);
            let total: Option<usize> = dist.iter().copied().sum();
            match total {
                Some(0) => Ok(0.0),
                Some(t) => Ok((n - 1) as f64 / t as f64),
                None => Err(MeasureError::Disconnected("closeness")),
            }
        })
        .collect()
}

/// `sum_{v != u} 1 / dist(u, v)`, unreachable vertices contributing 0.
fn harmonic(graph: &Graph) -> Vec<f64> {
    (0..graph.n_vertices())
        .into_par_iter()
        .map(|u| bfs_distances(graph, u).iter().filter_map(|d| d.filter(|&d| d > 0).map(|d| 1.0 / d as f64)).sum())
        .collect()
}

const BRANDES_CHUNK: usize = 32;

/// Brandes accumulation over hop-count shortest paths, normalised by
/// `(n - 1)(n - 2) / 2` (the number of vertex pairs excluding the vertex).
///
/// Sources are processed in fixed chunks in parallel and the chunk sums are
/// added in source order, so the result does not depend on thread count.
fn betweenness(graph: &Graph) -> Vec<f64> {
    let n = graph.n_vertices();
    if n < 3 {
        return vec![0.0; n];
    }
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(BRANDES_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            for &s in chunk {
                accumulate_from(graph, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    // each unordered pair was counted from both ends
    let scale = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
    total.into_iter().map(|b| b * scale).collect()
}

fn accumulate_from(graph: &Graph, source: usize, acc: &mut [f64]) {
    let n = graph.n_vertices();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    sigma[source] = 1.0;
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in graph.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = order.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != source {
            acc[w] += delta[w];
        }
    }
}
