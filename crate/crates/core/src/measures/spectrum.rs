use std::cmp::Ordering;

use nalgebra::SymmetricEigen;

use super::MeasureError;
use crate::graph::Graph;

/// Largest vertex count [`laplacian_spectrum`] accepts.
pub const DEFAULT_DENSE_LIMIT: usize = 4000;

/// Eigenvalues closer than this (relative to `max(1, lambda_max)`) are
/// treated as one eigenspace when canonicalising the basis.
const DEGENERACY_RTOL: f64 = 1e-9;

/// Coordinates are compared after rounding to this grid when ordering
/// vectors inside a degenerate eigenspace.
const ORDER_GRID: f64 = 1e-9;

/// Eigenpairs of the combinatorial Laplacian, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// `x^T Δ x = sum over edges of w (x_u - x_v)^2`.
pub fn smoothness(graph: &Graph, x: &[f64]) -> Result<f64, MeasureError> {
    graph.require_undirected()?;
    graph.check_signal(x)?;
    Ok(graph
        .edges()
        .iter()
        .map(|e| {
            let d = x[e.source] - x[e.target];
            e.weight * d * d
        })
        .sum())
}

/// `lambda_i / lambda_max`, clamped to `[0, 1]`. `index` is 0-based.
pub fn normalized_smoothness(spectrum: &Spectrum, index: usize) -> Result<f64, MeasureError> {
    let n = spectrum.len();
    if index >= n {
        return Err(MeasureError::IndexOutOfRange { index, n });
    }
    let top = spectrum.max_eigenvalue();
    if top <= 0.0 {
        return Err(MeasureError::ZeroSpectrum);
    }
    Ok((spectrum.eigenvalues[index] / top).clamp(0.0, 1.0))
}

pub fn laplacian_spectrum(graph: &Graph) -> Result<Spectrum, MeasureError> {
    laplacian_spectrum_with_limit(graph, DEFAULT_DENSE_LIMIT)
}

/// Full dense eigendecomposition of the combinatorial Laplacian.
///
/// The basis is made reproducible: every eigenvector's first coordinate of
/// magnitude above `1e-10` is made positive, and vectors inside a degenerate
/// eigenspace are ordered lexicographically by rounded coordinates. The
/// basis of a degenerate eigenspace is still whatever the solver returned.
pub fn laplacian_spectrum_with_limit(graph: &Graph, limit: usize) -> Result<Spectrum, MeasureError> {
    let n = graph.n_vertices();
    if n > limit {
        return Err(MeasureError::TooLarge { n, limit });
    }
    let lap = graph.combinatorial_laplacian()?;
    let eig = SymmetricEigen::new(lap);

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            if v.iter().find(|x| x.abs() > 1e-10).is_some_and(|&x| x < 0.0) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            (eig.eigenvalues[i], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let top = pairs.last().map_or(0.0, |p| p.0);
    let tol = DEGENERACY_RTOL * top.abs().max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= tol {
            end += 1;
        }
        if end - start > 1 {
            let mut values: Vec<f64> = pairs[start..end].iter().map(|p| p.0).collect();
            values.sort_by(f64::total_cmp);
            pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
            for (p, v) in pairs[start..end].iter_mut().zip(values) {
                p.0 = v;
            }
        }
        start = end;
    }

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(Spectrum { eigenvalues, eigenvectors })
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / ORDER_GRID).round().total_cmp(&(y / ORDER_GRID).round()))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path, rgg, RggOptions, SeedSequence};
    use std::f64::consts::PI;

    fn cycle_eigenvalues(n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|j| 2.0 - 2.0 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn smoothness_basics() {
        let g = path(2).unwrap();
        assert_eq!(smoothness(&g, &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(smoothness(&cycle(5).unwrap(), &[3.0; 5]).unwrap(), 0.0);
        assert!(smoothness(&g, &[1.0]).is_err());
    }

    #[test]
    fn path2_spectrum() {
        let s = laplacian_spectrum(&path(2).unwrap()).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-14);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cycle_spectrum_closed_form() {
        for n in [5usize, 8, 13, 64] {
            let s = laplacian_spectrum(&cycle(n).unwrap()).unwrap();
            for (a, b) in s.eigenvalues.iter().zip(cycle_eigenvalues(n)) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn cycle8_normalized_smoothness() {
        let s = laplacian_spectrum(&cycle(8).unwrap()).unwrap();
        let expected = cycle_eigenvalues(8);
        for i in 0..8 {
            let got = normalized_smoothness(&s, i).unwrap();
            assert!((got - expected[i] / 4.0).abs() < 1e-12);
        }
        assert_eq!(normalized_smoothness(&s, 7).unwrap(), 1.0);
        assert!(normalized_smoothness(&s, 0).unwrap() < 1e-12);
        assert!(normalized_smoothness(&s, 8).is_err());
    }

    #[test]
    fn eigenpairs_reconstruct_the_laplacian() {
        let seq = SeedSequence::new(17);
        let gg = rgg(60, 2, 0.3, RggOptions::default(), &mut seq.rng("graph", 0)).unwrap();
        let g = gg.graph;
        let s = laplacian_spectrum(&g).unwrap();
        let top = s.max_eigenvalue();
        let lap = g.combinatorial_laplacian().unwrap();
        let mut rebuilt = nalgebra::DMatrix::<f64>::zeros(60, 60);
        for (lambda, f) in s.eigenvalues.iter().zip(&s.eigenvectors) {
            let v = nalgebra::DVector::from_column_slice(f);
            rebuilt += *lambda * &v * v.transpose();
            let norm: f64 = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-10);
            let residual = g.laplacian_apply(f).unwrap();
            let worst = residual.iter().zip(f).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-8 * top);
            assert!((smoothness(&g, f).unwrap() - lambda).abs() < 1e-8 * top);
        }
        assert!((rebuilt - lap).norm() < 1e-6);
        if g.is_connected() {
            assert!(s.eigenvalues[0].abs() < 1e-8);
            assert!(s.eigenvalues[1] > 1e-8);
        }
    }

    #[test]
    fn basis_is_reproducible() {
        let g = cycle(12).unwrap();
        let a = laplacian_spectrum(&g).unwrap();
        let b = laplacian_spectrum(&g).unwrap();
        assert_eq!(a, b);
        for f in &a.eigenvectors {
            let first = f.iter().find(|x| x.abs() > 1e-10).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn limits() {
        let g = cycle(10).unwrap();
        assert_eq!(laplacian_spectrum_with_limit(&g, 5), Err(MeasureError::TooLarge { n: 10, limit: 5 }));
        let dg = crate::generators::directed_path(3).unwrap();
        assert!(laplacian_spectrum(&dg).is_err());
    }
}
