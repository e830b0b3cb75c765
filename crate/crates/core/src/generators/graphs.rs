use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use super::{param, GeneratorError};
use crate::graph::{Directedness, Edge, Graph};

/// What [`rgg`] does when a draw leaves some vertex without neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsolatedPolicy {
    /// Redraw all points, up to `max_attempts` draws in total.
    #[default]
    Retry,
    /// Keep the draw and drop isolated vertices (and their coordinates).
    Prune,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RggOptions {
    pub on_isolated: IsolatedPolicy,
    pub max_attempts: usize,
}

impl Default for RggOptions {
    fn default() -> Self {
        RggOptions { on_isolated: IsolatedPolicy::Retry, max_attempts: 100 }
    }
}

/// A random geometric graph with the coordinates of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricGraph {
    pub graph: Graph,
    /// `coords[i]` is the point of vertex `i` in `[0, 1]^d`.
    pub coords: Vec<Vec<f64>>,
    pub radius: f64,
    pub dim: usize,
}

/// Random geometric graph: `n` i.i.d. uniform points in `[0, 1]^d`, an edge
/// between every pair at Euclidean distance strictly below `radius`.
///
/// Neighbour search bins points into a grid of cell side `>= radius` and only
/// compares points in adjacent cells.
pub fn rgg<R: Rng + ?Sized>(
    n: usize,
    dim: usize,
    radius: f64,
    options: RggOptions,
    rng: &mut R,
) -> Result<GeometricGraph, GeneratorError> {
    param(n >= 2, || format!("rgg needs n >= 2, got {n}"))?;
    param(dim >= 1, || "rgg needs d >= 1".into())?;
    param(radius > 0.0 && radius.is_finite(), || format!("rgg radius must be positive, got {radius}"))?;
    param(options.max_attempts >= 1, || "max_attempts must be at least 1".into())?;

    for _ in 0..options.max_attempts {
        let coords: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
        let pairs = geometric_pairs(&coords, radius);
        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let isolated = degree.contains(&0);
        match (isolated, options.on_isolated) {
            (false, _) => {
                let graph = Graph::undirected(n, &pairs)?;
                return Ok(GeometricGraph { graph, coords, radius, dim });
            }
            (true, IsolatedPolicy::Retry) => continue,
            (true, IsolatedPolicy::Prune) => {
                let keep: Vec<usize> = (0..n).filter(|&v| degree[v] > 0).collect();
                if keep.len() < 2 {
                    return Err(GeneratorError::NothingLeft);
                }
                let mut relabel = vec![usize::MAX; n];
                for (new, &old) in keep.iter().enumerate() {
                    relabel[old] = new;
                }
                let pairs: Vec<(usize, usize)> = pairs.iter().map(|&(u, v)| (relabel[u], relabel[v])).collect();
                let graph = Graph::undirected(keep.len(), &pairs)?;
                let coords = keep.iter().map(|&v| coords[v].clone()).collect();
                return Ok(GeometricGraph { graph, coords, radius, dim });
            }
        }
    }
    Err(GeneratorError::IsolatedAfterRetries(options.max_attempts))
}

fn within(a: &[f64], b: &[f64], r2: f64) -> bool {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() < r2
}

/// All pairs `u < v` closer than `radius`, sorted.
fn geometric_pairs(coords: &[Vec<f64>], radius: f64) -> Vec<(usize, usize)> {
    let n = coords.len();
    let dim = coords.first().map_or(0, Vec::len);
    let r2 = radius * radius;
    let cells_per_axis = (1.0 / radius).floor().max(1.0) as usize;

    // a grid only pays off when there are several cells per axis and the
    // 3^d neighbourhood stays small
    if cells_per_axis < 3 || dim > 4 {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if within(&coords[u], &coords[v], r2) {
                    pairs.push((u, v));
                }
            }
        }
        return pairs;
    }

    let cell_of = |p: &[f64]| -> Vec<usize> {
        p.iter().map(|&x| ((x * cells_per_axis as f64) as usize).min(cells_per_axis - 1)).collect()
    };
    let mut grid: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (v, p) in coords.iter().enumerate() {
        grid.entry(cell_of(p)).or_default().push(v);
    }

    let offsets: Vec<Vec<isize>> = (0..3usize.pow(dim as u32))
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let o = (code % 3) as isize - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();

    let mut pairs = Vec::new();
    for u in 0..n {
        let home = cell_of(&coords[u]);
        for off in &offsets {
            let cell: Option<Vec<usize>> = home
                .iter()
                .zip(off)
                .map(|(&c, &o)| {
                    let c = c as isize + o;
                    (0..cells_per_axis as isize).contains(&c).then_some(c as usize)
                })
                .collect();
            let Some(cell) = cell else { continue };
            if let Some(members) = grid.get(&cell) {
                for &v in members {
                    if v > u && within(&coords[u], &coords[v], r2) {
                        pairs.push((u, v));
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Watts–Strogatz small world.
///
/// Starts from the ring lattice where every vertex links to its `k` nearest
/// neighbours on each side (`k = 1` is the cycle, mean degree `2k`). Each
/// lattice edge `(i, i + j)` is visited in order `j = 1..=k`, `i = 0..n` and,
/// with probability `p`, its far endpoint is replaced by a uniformly chosen
/// vertex that is neither `i` nor already adjacent to `i`. When no such
/// vertex exists the edge is kept. The edge count is always `n * k`.
pub fn watts_strogatz<R: Rng + ?Sized>(n: usize, k: usize, p: f64, rng: &mut R) -> Result<Graph, GeneratorError> {
    param(n >= 3, || format!("watts_strogatz needs n >= 3, got {n}"))?;
    param(k >= 1 && 2 * k < n, || format!("watts_strogatz needs 1 <= k <= (n-1)/2, got k={k}, n={n}"))?;
    param((0.0..=1.0).contains(&p), || format!("rewiring probability {p} outside [0, 1]"))?;

    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=k {
            let t = (i + j) % n;
            adj[i].insert(t);
            adj[t].insert(i);
        }
    }
    for j in 1..=k {
        for i in 0..n {
            let t = (i + j) % n;
            // the draw happens for every lattice edge so the stream layout
            // does not depend on p
            let rewire = rng.random::<f64>() < p;
            if !rewire || !adj[i].contains(&t) || adj[i].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != i && !adj[i].contains(&w) {
                    break w;
                }
            };
            adj[i].remove(&t);
            adj[t].remove(&i);
            adj[i].insert(w);
            adj[w].insert(i);
        }
    }
    let pairs: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
        .collect();
    Ok(Graph::undirected(n, &pairs)?)
}

/// Arcs `(i, i + 1)` for `i = 0..n-1`.
pub fn directed_path(n: usize) -> Result<Graph, GeneratorError> {
    param(n >= 2, || format!("directed_path needs n >= 2, got {n}"))?;
    Ok(Graph::new(n, Directedness::Directed, (0..n - 1).map(|i| Edge::new(i, i + 1)))?)
}

pub fn path(n: usize) -> Result<Graph, GeneratorError> {
    param(n >= 2, || format!("path needs n >= 2, got {n}"))?;
    Ok(Graph::new(n, Directedness::Undirected, (0..n - 1).map(|i| Edge::new(i, i + 1)))?)
}

pub fn cycle(n: usize) -> Result<Graph, GeneratorError> {
    param(n >= 3, || format!("cycle needs n >= 3, got {n}"))?;
    Ok(Graph::new(n, Directedness::Undirected, (0..n).map(|i| Edge::new(i, (i + 1) % n)))?)
}

/// Vertex 0 joined to `n - 1` leaves.
pub fn star(n: usize) -> Result<Graph, GeneratorError> {
    param(n >= 2, || format!("star needs n >= 2, got {n}"))?;
    Ok(Graph::new(n, Directedness::Undirected, (1..n).map(|i| Edge::new(0, i)))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::SeedSequence;
    use proptest::prelude::*;

    #[test]
    fn canonical_structures() {
        let dp = directed_path(3).unwrap();
        assert!(dp.is_directed());
        assert_eq!(dp.edges(), &[Edge::new(0, 1), Edge::new(1, 2)]);
        assert_eq!(cycle(3).unwrap(), Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap());
        assert_eq!(path(2).unwrap(), Graph::undirected(2, &[(0, 1)]).unwrap());
        assert_eq!(star(4).unwrap().out_degree(0), 3);
        assert!(cycle(2).is_err());
        assert!(path(1).is_err());
    }

    #[test]
    fn rgg_with_large_radius_is_complete() {
        let mut rng = SeedSequence::new(1).rng("graph", 0);
        for d in 1..=3 {
            let gg = rgg(20, d, (d as f64).sqrt() + 1e-9, RggOptions::default(), &mut rng).unwrap();
            assert_eq!(gg.graph.n_edges(), 20 * 19 / 2);
        }
    }

    #[test]
    fn rgg_is_deterministic() {
        let seq = SeedSequence::new(99);
        let a = rgg(300, 2, 0.12, RggOptions::default(), &mut seq.rng("graph", 0)).unwrap();
        let b = rgg(300, 2, 0.12, RggOptions::default(), &mut seq.rng("graph", 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rgg_isolated_policies() {
        let seq = SeedSequence::new(5);
        let tight = RggOptions { on_isolated: IsolatedPolicy::Retry, max_attempts: 3 };
        assert_eq!(rgg(500, 2, 0.01, tight, &mut seq.rng("graph", 0)), Err(GeneratorError::IsolatedAfterRetries(3)));
        let prune = RggOptions { on_isolated: IsolatedPolicy::Prune, max_attempts: 1 };
        let gg = rgg(500, 2, 0.05, prune, &mut seq.rng("graph", 0)).unwrap();
        assert!(gg.graph.n_vertices() < 500);
        assert_eq!(gg.coords.len(), gg.graph.n_vertices());
        for e in gg.graph.edges() {
            assert!(within(&gg.coords[e.source], &gg.coords[e.target], 0.05 * 0.05));
        }
    }

    #[test]
    fn rgg_mean_degree_tracks_density() {
        // n * pi * r^2 ignores the boundary, so the observed mean is lower
        let (n, r) = (1500usize, 0.06f64);
        let expected = n as f64 * std::f64::consts::PI * r * r;
        let seq = SeedSequence::new(2024);
        let prune = RggOptions { on_isolated: IsolatedPolicy::Prune, max_attempts: 1 };
        for i in 0..20 {
            let gg = rgg(n, 2, r, prune, &mut seq.rng("graph", i)).unwrap();
            let mean = 2.0 * gg.graph.n_edges() as f64 / n as f64;
            assert!((mean - expected).abs() < 0.25 * expected, "mean degree {mean} vs {expected}");
        }
    }

    #[test]
    fn watts_strogatz_lattice() {
        let mut rng = SeedSequence::new(0).rng("graph", 0);
        assert_eq!(watts_strogatz(10, 1, 0.0, &mut rng).unwrap(), cycle(10).unwrap());
        let g = watts_strogatz(6, 2, 0.0, &mut rng).unwrap();
        assert!((0..6).all(|v| g.out_degree(v) == 4));
        assert!(watts_strogatz(6, 3, 0.1, &mut rng).is_err());
        assert!(watts_strogatz(6, 0, 0.1, &mut rng).is_err());
        assert!(watts_strogatz(6, 1, 1.5, &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn grid_search_matches_all_pairs(seed in any::<u64>(), n in 2usize..200, r in 0.02f64..0.5, d in 1usize..4) {
            let mut rng = SeedSequence::new(seed).rng("graph", 0);
            let coords: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rand::Rng::random::<f64>(&mut rng)).collect()).collect();
            let mut brute = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let dist: f64 = coords[u].iter().zip(&coords[v]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    if dist < r {
                        brute.push((u, v));
                    }
                }
            }
            prop_assert_eq!(geometric_pairs(&coords, r), brute);
        }

        #[test]
        fn watts_strogatz_preserves_edge_count(seed in any::<u64>(), n in 5usize..60, k in 1usize..4, p in 0.0f64..=1.0) {
            prop_assume!(2 * k < n);
            let mut rng = SeedSequence::new(seed).rng("graph", 0);
            let g = watts_strogatz(n, k, p, &mut rng).unwrap();
            prop_assert_eq!(g.n_edges(), n * k);
            prop_assert!((0..n).all(|v| g.out_degree(v) >= k));
        }
    }
}
