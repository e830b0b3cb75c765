//! Dispersion entropy of graph signals and of time series.
//!
//! Both estimators share the class map (Gaussian CDF followed by
//! `round(c * u + 0.5)`), the pattern encoding and the normalised Shannon
//! entropy. They differ only in how embedding rows are formed: walk averages
//! over the graph for [`dispersion_entropy_graph`], delayed samples for
//! [`classical_de`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use libm::erfc;
use thiserror::Error;

use crate::graph::{Graph, GraphError, Walker};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("embedding dimension must be at least 2 (got {0})")]
    EmbeddingDim(usize),
    #[error("delay must be at least 1 (got {0})")]
    Delay(usize),
    #[error("class count must be at least 2 (got {0})")]
    Classes(usize),
    #[error("{classes}^{m} patterns do not fit in a 64-bit pattern id")]
    TooManyPatterns { classes: usize, m: usize },
    #[error("class {class} outside 1..={classes}")]
    ClassOutOfRange { class: usize, classes: usize },
    #[error("series of length {len} is too short: need at least {need} samples")]
    SeriesTooShort { len: usize, need: usize },
    #[error("signal is empty")]
    EmptySignal,
    #[error("unknown map function `{0}`")]
    UnknownMap(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Maps a real value to a class in `1..=c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MapFunction {
    /// Normal CDF with the signal's mean and standard deviation.
    #[default]
    Ncdf,
}

impl fmt::Display for MapFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapFunction::Ncdf => f.write_str("ncdf"),
        }
    }
}

impl FromStr for MapFunction {
    type Err = EntropyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ncdf" => Ok(MapFunction::Ncdf),
            other => Err(EntropyError::UnknownMap(other.to_string())),
        }
    }
}

/// Where the map function takes its mean and standard deviation from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ColumnStats {
    /// Statistics of the input signal, applied to every embedding column.
    #[default]
    Signal,
    /// Statistics recomputed for each embedding column over its rows.
    PerColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EntropyParams {
    embedding_dim: usize,
    delay: usize,
    classes: usize,
    pub map: MapFunction,
    pub stats: ColumnStats,
}

impl EntropyParams {
    pub fn new(embedding_dim: usize, delay: usize, classes: usize) -> Result<Self, EntropyError> {
        if embedding_dim < 2 {
            return Err(EntropyError::EmbeddingDim(embedding_dim));
        }
        if delay < 1 {
            return Err(EntropyError::Delay(delay));
        }
        if classes < 2 {
            return Err(EntropyError::Classes(classes));
        }
        let fits = u32::try_from(embedding_dim).ok().and_then(|m| (classes as u64).checked_pow(m)).is_some();
        if !fits {
            return Err(EntropyError::TooManyPatterns { classes, m: embedding_dim });
        }
        Ok(EntropyParams { embedding_dim, delay, classes, map: MapFunction::Ncdf, stats: ColumnStats::Signal })
    }

    pub fn with_stats(mut self, stats: ColumnStats) -> Self {
        self.stats = stats;
        self
    }

    /// `m`
    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    /// `L`
    pub fn delay(&self) -> usize {
        self.delay
    }

    /// `c`
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// `c^m`
    pub fn pattern_count(&self) -> u64 {
        (self.classes as u64).pow(self.embedding_dim as u32)
    }
}

/// Signals whose population standard deviation is below this fraction of
/// their largest magnitude are treated as constant.
pub const CONSTANT_RTOL: f64 = 1e-12;

/// Mean and population standard deviation used by the class map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalStats {
    pub mean: f64,
    /// Zero for (numerically) constant signals.
    pub std_dev: f64,
}

impl SignalStats {
    pub fn of(values: &[f64]) -> Result<Self, EntropyError> {
        if values.is_empty() {
            return Err(EntropyError::EmptySignal);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let std_dev = var.sqrt();
        let std_dev = if std_dev <= CONSTANT_RTOL * scale { 0.0 } else { std_dev };
        Ok(SignalStats { mean, std_dev })
    }
}

/// Standard normal CDF of `(x - mean) / std_dev`.
pub fn normal_cdf(x: f64, mean: f64, std_dev: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (std_dev * std::f64::consts::SQRT_2))
}

/// Class of one value: `round(c * NCDF(x) + 0.5)` clamped to `1..=c`,
/// rounding half away from zero. A zero standard deviation sends every value
/// to the middle class `ceil((c + 1) / 2)`.
pub fn ncdf_class(x: f64, stats: SignalStats, classes: usize) -> usize {
    if stats.std_dev == 0.0 {
        return (classes + 2) / 2;
    }
    let u = normal_cdf(x, stats.mean, stats.std_dev);
    let raw = (classes as f64 * u + 0.5).round();
    (raw.max(1.0) as usize).min(classes)
}

/// Element-wise [`ncdf_class`].
pub fn ncdf_map(values: &[f64], stats: SignalStats, classes: usize) -> Vec<usize> {
    values.iter().map(|&x| ncdf_class(x, stats, classes)).collect()
}

/// Pattern id `sum_j (class_j - 1) * c^j`, in `0..c^m`.
pub fn pattern_of_row(row: &[usize], classes: usize) -> Result<u64, EntropyError> {
    let mut id = 0u64;
    let mut place = 1u64;
    for &class in row {
        if class < 1 || class > classes {
            return Err(EntropyError::ClassOutOfRange { class, classes });
        }
        id += (class as u64 - 1) * place;
        place = place.saturating_mul(classes as u64);
    }
    Ok(id)
}

/// Inverse of [`pattern_of_row`].
pub fn row_of_pattern(mut id: u64, classes: usize, m: usize) -> Vec<usize> {
    let c = classes as u64;
    (0..m)
        .map(|_| {
            let class = (id % c) as usize + 1;
            id /= c;
            class
        })
        .collect()
}

/// Observed dispersion patterns and their counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispersionHistogram {
    counts: BTreeMap<u64, usize>,
    total_rows: usize,
    classes: usize,
    embedding_dim: usize,
}

impl DispersionHistogram {
    pub fn new(classes: usize, embedding_dim: usize) -> Self {
        DispersionHistogram { counts: BTreeMap::new(), total_rows: 0, classes, embedding_dim }
    }

    pub fn record(&mut self, pattern: u64) {
        *self.counts.entry(pattern).or_insert(0) += 1;
        self.total_rows += 1;
    }

    pub fn counts(&self) -> &BTreeMap<u64, usize> {
        &self.counts
    }

    pub fn total_rows(&self) -> usize {
        self.total_rows
    }

    /// Number of distinct observed patterns.
    pub fn support(&self) -> usize {
        self.counts.len()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    /// `-sum p ln p / ln(c^m)` over observed patterns, clamped to `[0, 1]`.
    pub fn normalized_entropy(&self) -> f64 {
        if self.total_rows == 0 {
            return 0.0;
        }
        let total = self.total_rows as f64;
        let h: f64 = self
            .counts
            .values()
            .map(|&count| {
                let p = count as f64 / total;
                -p * p.ln()
            })
            .sum();
        let value = h / (self.embedding_dim as f64 * (self.classes as f64).ln());
        // a single pattern gives -0.0
        if value <= 0.0 {
            0.0
        } else {
            value.min(1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    pub value: f64,
    pub histogram: DispersionHistogram,
    /// Number of embedding rows: `|V|`, `|V*|`, or `n - (m - 1) L`.
    pub restriction_size: usize,
}

/// Dispersion entropy of a graph signal.
///
/// Column `k` of the embedding matrix is the walk average `D A^{kL} x`, with
/// the normaliser recomputed for every `k`. Rows are restricted to vertices
/// having walks of every needed length (all vertices of an undirected graph).
/// With [`ColumnStats::Signal`] the class map uses the mean and standard
/// deviation of the whole input signal for every column.
pub fn dispersion_entropy_graph(
    graph: &Graph,
    signal: &[f64],
    params: &EntropyParams,
) -> Result<EntropyResult, EntropyError> {
    graph.check_signal(signal)?;
    let m = params.embedding_dim;
    let rows = graph.restriction_set(m, params.delay)?;
    let signal_stats = SignalStats::of(signal)?;

    let mut walker = Walker::new(graph, signal);
    let mut classes = vec![vec![0usize; m]; rows.len()];
    let mut column = vec![0.0; rows.len()];
    for k in 0..m {
        walker.advance(k * params.delay - walker.steps());
        for (slot, &v) in column.iter_mut().zip(&rows) {
            *slot = walker.value(v)?;
        }
        let stats = match params.stats {
            ColumnStats::Signal => signal_stats,
            ColumnStats::PerColumn => SignalStats::of(&column)?,
        };
        for (row, &y) in classes.iter_mut().zip(&column) {
            row[k] = ncdf_class(y, stats, params.classes);
        }
    }
    Ok(histogram_result(&classes, params, rows.len()))
}

/// Classical dispersion entropy of a time series: rows
/// `(x_i, x_{i+L}, ..., x_{i+(m-1)L})` for `i = 0..n-(m-1)L`.
pub fn classical_de(series: &[f64], params: &EntropyParams) -> Result<EntropyResult, EntropyError> {
    let m = params.embedding_dim;
    let span = (m - 1) * params.delay;
    if series.len() < span + 1 {
        return Err(EntropyError::SeriesTooShort { len: series.len(), need: span + 1 });
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(GraphError::NonFiniteSignal(i).into());
    }
    let n_rows = series.len() - span;
    let signal_stats = SignalStats::of(series)?;
    let rows: Vec<Vec<usize>> = match params.stats {
        ColumnStats::Signal => {
            let z = ncdf_map(series, signal_stats, params.classes);
            (0..n_rows).map(|i| (0..m).map(|k| z[i + k * params.delay]).collect()).collect()
        }
        ColumnStats::PerColumn => {
            let mut rows = vec![vec![0usize; m]; n_rows];
            for k in 0..m {
                let col = &series[k * params.delay..k * params.delay + n_rows];
                let stats = SignalStats::of(col)?;
                for (row, &y) in rows.iter_mut().zip(col) {
                    row[k] = ncdf_class(y, stats, params.classes);
                }
            }
            rows
        }
    };
    Ok(histogram_result(&rows, params, n_rows))
}

fn histogram_result(rows: &[Vec<usize>], params: &EntropyParams, n_rows: usize) -> EntropyResult {
    let mut histogram = DispersionHistogram::new(params.classes, params.embedding_dim);
    for row in rows {
        // classes come from ncdf_class and are always in range
        histogram.record(pattern_of_row(row, params.classes).expect("class in range"));
    }
    EntropyResult { value: histogram.normalized_entropy(), histogram, restriction_size: n_rows }
}
