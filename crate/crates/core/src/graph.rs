//! Graph representation and the walk-average kernel.
//!
//! A [`Graph`] stores its edges canonically and keeps a CSR out-adjacency
//! (targets sorted ascending) for the mat-vec kernels. For undirected graphs
//! every edge appears in both endpoint rows.
//!
//! The walk average of a signal `x` over `s` steps is `D A^s x` with
//! `D_ii = 1 / sum_j (A^s)_ij`. It is computed with `s` sparse mat-vecs on `x`
//! and on the all-ones vector; `A^s` is never formed.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {w}")]
    BadWeight { u: usize, v: usize, w: f64 },
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("signal has {got} values but the graph has {expected} vertices")]
    SignalLength { expected: usize, got: usize },
    #[error("signal value at vertex {0} is not finite")]
    NonFiniteSignal(usize),
    #[error("operation requires an undirected graph")]
    RequiresUndirected,
    #[error("no valid embedding rows: every vertex lacks a walk of length {0}")]
    EmptyRestriction(usize),
    #[error("walk normalisation underflowed at vertex {0}")]
    Underflow(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Directedness {
    Undirected,
    Directed,
}

impl fmt::Display for Directedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directedness::Undirected => f.write_str("undirected"),
            Directedness::Directed => f.write_str("directed"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(source: usize, target: usize) -> Self {
        Edge { source, target, weight: 1.0 }
    }

    pub fn weighted(source: usize, target: usize, weight: f64) -> Self {
        Edge { source, target, weight }
    }
}

/// Immutable simple graph with dense 0-based vertex ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directedness: Directedness,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds and validates a graph.
    ///
    /// Undirected edges are canonicalised to `source < target`; giving both
    /// orientations of the same pair is a duplicate. Undirected graphs may not
    /// contain isolated vertices. Directed graphs may (they simply never reach
    /// the restriction set).
    pub fn new<I>(n: usize, directedness: Directedness, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut canonical: Vec<Edge> = Vec::new();
        for e in edges {
            let Edge { source: u, target: v, weight: w } = e;
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::BadWeight { u, v, w });
            }
            let (s, t) = match directedness {
                Directedness::Undirected if u > v => (v, u),
                _ => (u, v),
            };
            canonical.push(Edge::weighted(s, t, w));
        }
        canonical.sort_by_key(|e| (e.source, e.target));
        for pair in canonical.windows(2) {
            if pair[0].source == pair[1].source && pair[0].target == pair[1].target {
                return Err(GraphError::DuplicateEdge(pair[0].source, pair[0].target));
            }
        }

        let mut degree = vec![0usize; n];
        for e in &canonical {
            degree[e.source] += 1;
            if directedness == Directedness::Undirected {
                degree[e.target] += 1;
            }
        }
        if directedness == Directedness::Undirected {
            if let Some(v) = degree.iter().position(|&d| d == 0) {
                return Err(GraphError::IsolatedVertex(v));
            }
        }

        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        let mut place = |from: usize, to: usize, w: f64| {
            targets[cursor[from]] = to;
            weights[cursor[from]] = w;
            cursor[from] += 1;
        };
        for e in &canonical {
            place(e.source, e.target, e.weight);
            if directedness == Directedness::Undirected {
                place(e.target, e.source, e.weight);
            }
        }
        for v in 0..n {
            let range = offsets[v]..offsets[v + 1];
            let mut row: Vec<(usize, f64)> =
                targets[range.clone()].iter().copied().zip(weights[range.clone()].iter().copied()).collect();
            row.sort_by_key(|&(t, _)| t);
            for (slot, (t, w)) in range.zip(row) {
                targets[slot] = t;
                weights[slot] = w;
            }
        }

        Ok(Graph { n, directedness, edges: canonical, offsets, targets, weights })
    }

    /// Unweighted undirected graph from vertex pairs.
    pub fn undirected(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Graph::new(n, Directedness::Undirected, pairs.iter().map(|&(u, v)| Edge::new(u, v)))
    }

    /// Unweighted directed graph from arcs.
    pub fn directed(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Graph::new(n, Directedness::Directed, arcs.iter().map(|&(u, v)| Edge::new(u, v)))
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn is_directed(&self) -> bool {
        self.directedness == Directedness::Directed
    }

    /// True when any edge weight differs from 1.
    pub fn is_weighted(&self) -> bool {
        self.edges.iter().any(|e| e.weight != 1.0)
    }

    /// Canonical edge list, sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-neighbours of `v` (all neighbours when undirected), ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Weights aligned with [`Graph::neighbors`].
    pub fn neighbor_weights(&self, v: usize) -> &[f64] {
        &self.weights[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Weighted out-degree (row sum of W).
    pub fn strength(&self, v: usize) -> f64 {
        self.neighbor_weights(v).iter().sum()
    }

    /// `y = A x` (or `W x`).
    pub fn adjacency_apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.adjacency_apply_into(x, &mut out);
        out
    }

    fn adjacency_apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (v, slot) in out.iter_mut().enumerate() {
            let range = self.offsets[v]..self.offsets[v + 1];
            *slot = self.targets[range.clone()].iter().zip(&self.weights[range]).map(|(&t, &w)| w * x[t]).sum();
        }
    }

    /// Weakly connected when directed.
    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn component_count(&self) -> usize {
        let mut undirected: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            undirected[e.source].push(e.target);
            undirected[e.target].push(e.source);
        }
        let mut seen = vec![false; self.n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in &undirected[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }

    /// Induced subgraph on `keep` (ascending vertex ids), relabelled densely.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Graph, GraphError> {
        let mut relabel = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| relabel[e.source] != usize::MAX && relabel[e.target] != usize::MAX)
            .map(|e| Edge::weighted(relabel[e.source], relabel[e.target], e.weight));
        Graph::new(keep.len(), self.directedness, edges)
    }

    /// `D A^steps x`, the row-normalised walk average of `x`.
    ///
    /// Rows with no walk of length `steps` are reported as undefined in the
    /// returned [`WalkAverage`]; this only happens for directed graphs.
    pub fn walk_average(&self, x: &[f64], steps: usize) -> Result<WalkAverage, GraphError> {
        self.check_signal(x)?;
        let mut walker = Walker::new(self, x);
        walker.advance(steps);
        walker.snapshot()
    }

    /// Vertices that have a walk of every length `k * delay`, `k = 0..m`.
    ///
    /// Since a walk of length `s + 1` contains one of length `s`, this is the
    /// set of vertices with a walk of length `(m - 1) * delay`.
    pub fn restriction_set(&self, m: usize, delay: usize) -> Result<Vec<usize>, GraphError> {
        let length = m.saturating_sub(1) * delay;
        let reach = self.has_walk_of_length(length);
        let rows: Vec<usize> = (0..self.n).filter(|&v| reach[v]).collect();
        if rows.is_empty() {
            return Err(GraphError::EmptyRestriction(length));
        }
        Ok(rows)
    }

    fn has_walk_of_length(&self, length: usize) -> Vec<bool> {
        let mut reach = vec![true; self.n];
        for _ in 0..length {
            let next: Vec<bool> = (0..self.n).map(|v| self.neighbors(v).iter().any(|&t| reach[t])).collect();
            if next == reach {
                break;
            }
            reach = next;
        }
        reach
    }

    /// Dense combinatorial Laplacian `Deg - W`.
    pub fn combinatorial_laplacian(&self) -> Result<DMatrix<f64>, GraphError> {
        self.require_undirected()?;
        let mut lap = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            lap[(e.source, e.target)] -= e.weight;
            lap[(e.target, e.source)] -= e.weight;
            lap[(e.source, e.source)] += e.weight;
            lap[(e.target, e.target)] += e.weight;
        }
        Ok(lap)
    }

    /// Sparse `Δ x` for the combinatorial Laplacian.
    pub fn laplacian_apply(&self, x: &[f64]) -> Result<Vec<f64>, GraphError> {
        self.require_undirected()?;
        self.check_signal(x)?;
        let ax = self.adjacency_apply(x);
        Ok((0..self.n).map(|v| self.strength(v) * x[v] - ax[v]).collect())
    }

    /// Random-walk normalised Laplacian `(I - Deg^{-1} W) x`.
    ///
    /// With this normalisation the one-step walk average equals `x - Lx`.
    pub fn normalized_laplacian_apply(&self, x: &[f64]) -> Result<Vec<f64>, GraphError> {
        self.require_undirected()?;
        self.check_signal(x)?;
        let ax = self.adjacency_apply(x);
        Ok((0..self.n).map(|v| x[v] - ax[v] / self.strength(v)).collect())
    }

    pub(crate) fn require_undirected(&self) -> Result<(), GraphError> {
        match self.directedness {
            Directedness::Undirected => Ok(()),
            Directedness::Directed => Err(GraphError::RequiresUndirected),
        }
    }

    pub(crate) fn check_signal(&self, x: &[f64]) -> Result<(), GraphError> {
        if x.len() != self.n {
            return Err(GraphError::SignalLength { expected: self.n, got: x.len() });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(GraphError::NonFiniteSignal(i));
        }
        Ok(())
    }
}

/// Result of [`Graph::walk_average`].
#[derive(Debug, Clone, PartialEq)]
pub struct WalkAverage {
    /// Walk averages; `0.0` where the row is undefined.
    pub values: Vec<f64>,
    /// `defined[i]` iff `sum_j (A^steps)_ij != 0`.
    pub defined: Vec<bool>,
}

impl WalkAverage {
    /// Values, or an error naming the first undefined row.
    pub fn into_values(self) -> Result<Vec<f64>, GraphError> {
        match self.defined.iter().position(|d| !d) {
            Some(v) => Err(GraphError::EmptyRestriction(v)),
            None => Ok(self.values),
        }
    }
}

// Past this magnitude both accumulators are rescaled by the same power of two,
// which is exact and leaves every ratio bit-identical.
const RESCALE_ABOVE: f64 = 1.157_920_892_373_162e77; // 2^256
const RESCALE_BELOW: f64 = 8.636_168_555_094_445e-78; // 2^-256

/// Incremental walk propagation of a signal and the all-ones vector.
pub(crate) struct Walker<'g> {
    graph: &'g Graph,
    numer: Vec<f64>,
    denom: Vec<f64>,
    reach: Vec<bool>,
    scratch: Vec<f64>,
    steps: usize,
}

impl<'g> Walker<'g> {
    pub(crate) fn new(graph: &'g Graph, x: &[f64]) -> Self {
        let n = graph.n;
        Walker { graph, numer: x.to_vec(), denom: vec![1.0; n], reach: vec![true; n], scratch: vec![0.0; n], steps: 0 }
    }

    pub(crate) fn steps(&self) -> usize {
        self.steps
    }

    pub(crate) fn advance(&mut self, steps: usize) {
        let g = self.graph;
        for _ in 0..steps {
            g.adjacency_apply_into(&self.numer, &mut self.scratch);
            std::mem::swap(&mut self.numer, &mut self.scratch);
            g.adjacency_apply_into(&self.denom, &mut self.scratch);
            std::mem::swap(&mut self.denom, &mut self.scratch);
            let reach: Vec<bool> = (0..g.n).map(|v| g.neighbors(v).iter().any(|&t| self.reach[t])).collect();
            self.reach = reach;
            self.rescale();
            self.steps += 1;
        }
    }

    fn rescale(&mut self) {
        let max = self.denom.iter().fold(0.0f64, |a, &b| a.max(b));
        if max == 0.0 || (RESCALE_BELOW..=RESCALE_ABOVE).contains(&max) {
            return;
        }
        let exponent = max.log2().floor() as i32;
        let factor = 2.0f64.powi(-exponent);
        for v in self.numer.iter_mut().chain(self.denom.iter_mut()) {
            *v *= factor;
        }
    }

    pub(crate) fn value(&self, v: usize) -> Result<f64, GraphError> {
        let d = self.denom[v];
        if d == 0.0 {
            return Err(GraphError::Underflow(v));
        }
        Ok(self.numer[v] / d)
    }

    pub(crate) fn snapshot(&self) -> Result<WalkAverage, GraphError> {
        let mut values = vec![0.0; self.graph.n];
        for (v, slot) in values.iter_mut().enumerate() {
            if self.reach[v] {
                *slot = self.value(v)?;
            }
        }
        Ok(WalkAverage { values, defined: self.reach.clone() })
    }
}

/// Real values indexed by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal(Vec<f64>);

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GraphError::NonFiniteSignal(i));
        }
        Ok(GraphSignal(values))
    }

    /// Like [`GraphSignal::new`] but also checks the length against `graph`.
    pub fn for_graph(graph: &Graph, values: Vec<f64>) -> Result<Self, GraphError> {
        graph.check_signal(&values)?;
        Ok(GraphSignal(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for GraphSignal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}
