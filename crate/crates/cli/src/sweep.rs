//! Sweep execution: graph points × realizations × signals × entropy grid.
//!
//! Every `(graph point, realization)` pair is an independent task. Its graph
//! is drawn from the stream `("graph", realization)` and every signal from a
//! fresh `("signal", realization)` stream, so all grid points of one
//! realization share their random numbers. Tasks run in parallel and are
//! collected in task order, which makes the output independent of scheduling.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use graphent::entropy::EntropyParams;
use graphent::generators::{
    cycle, logistic_signal, mix_signal, rgg, sine_signal, uniform_signal, watts_strogatz, wiener_signal,
    GeometricGraph, LogisticParams, RggOptions, SeedSequence,
};
use graphent::measures::{centrality, laplacian_spectrum, normalized_smoothness, CentralityKind, CentralityOptions};
use graphent::{dispersion_entropy_graph, Graph};
use rayon::prelude::*;

use crate::config::{Experiment, GraphSpec, SignalSpec, StatsMode, SweepConfig};
use crate::CliError;

pub const GRAPH_STREAM: &str = "graph";
pub const SIGNAL_STREAM: &str = "signal";

pub const CSV_COLUMNS: [&str; 23] = [
    "experiment",
    "realization",
    "model",
    "n",
    "d",
    "r",
    "k",
    "rewire_p",
    "process",
    "f",
    "p",
    "logistic_r",
    "cycles",
    "item",
    "m",
    "L",
    "c",
    "column_stats",
    "entropy",
    "support",
    "rows",
    "smoothness",
    "error",
];

/// One graph of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphPoint {
    Rgg { n: usize, d: usize, r: f64, options: RggOptions },
    WattsStrogatz { n: usize, k: usize, p: f64 },
    Cycle { n: usize },
}

impl GraphPoint {
    pub fn expand(spec: &GraphSpec) -> Vec<GraphPoint> {
        match spec {
            GraphSpec::Rgg { n, d, r, on_isolated, max_attempts } => r
                .iter()
                .map(|&r| GraphPoint::Rgg {
                    n: *n,
                    d: *d,
                    r,
                    options: RggOptions { on_isolated: (*on_isolated).into(), max_attempts: *max_attempts },
                })
                .collect(),
            GraphSpec::WattsStrogatz { n, k, p } => {
                k.iter().flat_map(|&k| p.iter().map(move |&p| GraphPoint::WattsStrogatz { n: *n, k, p })).collect()
            }
            GraphSpec::Cycle { n } => vec![GraphPoint::Cycle { n: *n }],
        }
    }

    pub fn build(&self, seq: &SeedSequence, realization: usize) -> Result<(Graph, Option<GeometricGraph>), CliError> {
        let mut rng = seq.rng(GRAPH_STREAM, realization as u64);
        match *self {
            GraphPoint::Rgg { n, d, r, options } => {
                let gg = rgg(n, d, r, options, &mut rng)?;
                Ok((gg.graph.clone(), Some(gg)))
            }
            GraphPoint::WattsStrogatz { n, k, p } => Ok((watts_strogatz(n, k, p, &mut rng)?, None)),
            GraphPoint::Cycle { n } => Ok((cycle(n)?, None)),
        }
    }

    fn cells(&self) -> [String; 6] {
        let e = String::new;
        match *self {
            GraphPoint::Rgg { n, d, r, .. } => ["rgg".into(), n.to_string(), d.to_string(), r.to_string(), e(), e()],
            GraphPoint::WattsStrogatz { n, k, p } => {
                ["watts-strogatz".into(), n.to_string(), e(), e(), k.to_string(), p.to_string()]
            }
            GraphPoint::Cycle { n } => ["cycle".into(), n.to_string(), e(), e(), e(), e()],
        }
    }
}

/// One signal process of the sweep grid, with all its parameters fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalPoint {
    Mix { f: f64, p: f64 },
    Sine { cycles: f64 },
    Wiener,
    Logistic(LogisticParams),
    Uniform,
    LaplacianEigenvectors,
    Centrality(CentralityKind),
}

impl SignalPoint {
    pub fn expand(specs: &[SignalSpec]) -> Vec<SignalPoint> {
        let mut out = Vec::new();
        for spec in specs {
            match spec {
                SignalSpec::Mix { f, p } => {
                    for &f in f {
                        for &p in p {
                            out.push(SignalPoint::Mix { f, p });
                        }
                    }
                }
                SignalSpec::Sine { cycles } => out.push(SignalPoint::Sine { cycles: *cycles }),
                SignalSpec::Wiener => out.push(SignalPoint::Wiener),
                SignalSpec::Logistic { r, x0, burn_in } => out
                    .extend(r.iter().map(|&r| SignalPoint::Logistic(LogisticParams { r, x0: *x0, burn_in: *burn_in }))),
                SignalSpec::Uniform => out.push(SignalPoint::Uniform),
                SignalSpec::LaplacianEigenvectors => out.push(SignalPoint::LaplacianEigenvectors),
                SignalSpec::Centrality { measures } => out.extend(measures.iter().map(|&k| SignalPoint::Centrality(k))),
            }
        }
        out
    }

    fn cells(&self) -> [String; 5] {
        let e = String::new;
        match *self {
            SignalPoint::Mix { f, p } => ["mix".into(), f.to_string(), p.to_string(), e(), e()],
            SignalPoint::Sine { cycles } => ["sine".into(), e(), e(), e(), cycles.to_string()],
            SignalPoint::Wiener => ["wiener".into(), e(), e(), e(), e()],
            SignalPoint::Logistic(lp) => ["logistic".into(), e(), e(), lp.r.to_string(), e()],
            SignalPoint::Uniform => ["uniform".into(), e(), e(), e(), e()],
            SignalPoint::LaplacianEigenvectors => ["laplacian-eigenvector".into(), e(), e(), e(), e()],
            SignalPoint::Centrality(_) => ["centrality".into(), e(), e(), e(), e()],
        }
    }
}

/// A signal to evaluate: its label in the `item` column and the values.
struct Item {
    label: String,
    values: Vec<f64>,
    smoothness: Option<f64>,
}

/// One output line.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub experiment: Experiment,
    pub realization: usize,
    pub graph: GraphPoint,
    pub signal: SignalPoint,
    pub item: String,
    pub m: usize,
    pub delay: usize,
    pub c: usize,
    pub column_stats: StatsMode,
    pub outcome: Result<Outcome, String>,
    pub smoothness: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub entropy: f64,
    pub support: usize,
    pub rows: usize,
}

impl SweepRow {
    pub fn entropy(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|o| o.entropy)
    }

    /// Parameter cells identifying the grid point, in CSV order, without the
    /// realization.
    fn key(&self) -> Vec<String> {
        let mut key = vec![self.experiment.to_string()];
        key.extend(self.graph.cells());
        key.extend(self.signal.cells());
        key.push(self.item.clone());
        key.extend([self.m.to_string(), self.delay.to_string(), self.c.to_string(), self.column_stats.to_string()]);
        key
    }

    pub fn record(&self, wall_time: bool) -> Vec<String> {
        let mut rec = self.key();
        rec.insert(1, self.realization.to_string());
        match &self.outcome {
            Ok(o) => rec.extend([o.entropy.to_string(), o.support.to_string(), o.rows.to_string()]),
            Err(_) => rec.extend([String::new(), String::new(), String::new()]),
        }
        rec.push(self.smoothness.map(|s| s.to_string()).unwrap_or_default());
        rec.push(self.outcome.as_ref().err().cloned().unwrap_or_default());
        if wall_time {
            rec.push(format!("{:.3}", self.wall_ms));
        }
        rec
    }
}

/// Runs the whole sweep. Only configuration problems are errors; failures of
/// individual grid points become rows with a non-empty `error` cell.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let params = cfg.entropy.params()?;
    let graphs = GraphPoint::expand(&cfg.graph);
    let signals = SignalPoint::expand(&cfg.signals);
    let seq = SeedSequence::new(cfg.master_seed);

    let tasks: Vec<(GraphPoint, usize)> =
        graphs.iter().flat_map(|&g| (0..cfg.realizations).map(move |r| (g, r))).collect();
    let rows = tasks
        .par_iter()
        .map(|&(gp, realization)| run_task(cfg, &seq, gp, realization, &signals, &params))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(rows)
}

fn run_task(
    cfg: &SweepConfig,
    seq: &SeedSequence,
    gp: GraphPoint,
    realization: usize,
    signals: &[SignalPoint],
    params: &[EntropyParams],
) -> Vec<SweepRow> {
    let row = |signal: SignalPoint, item: String, p: &EntropyParams, outcome, smoothness, wall_ms| SweepRow {
        experiment: cfg.experiment,
        realization,
        graph: gp,
        signal,
        item,
        m: p.embedding_dim(),
        delay: p.delay(),
        c: p.classes(),
        column_stats: cfg.entropy.column_stats,
        outcome,
        smoothness,
        wall_ms,
    };

    let built = gp.build(seq, realization);
    let mut out = Vec::new();
    for &sp in signals {
        let items = match &built {
            Ok((graph, gg)) => make_items(sp, graph, gg.as_ref(), seq, realization),
            Err(e) => Err(e.to_string()),
        };
        match items {
            Ok(items) => {
                let graph = &built.as_ref().expect("items imply a graph").0;
                for it in items {
                    for p in params {
                        let start = Instant::now();
                        let outcome = dispersion_entropy_graph(graph, &it.values, p)
                            .map(|r| Outcome {
                                entropy: r.value,
                                support: r.histogram.support(),
                                rows: r.restriction_size,
                            })
                            .map_err(|e| e.to_string());
                        let ms = start.elapsed().as_secs_f64() * 1e3;
                        out.push(row(sp, it.label.clone(), p, outcome, it.smoothness, ms));
                    }
                }
            }
            Err(message) => {
                let label = match sp {
                    SignalPoint::Centrality(k) => k.name().to_string(),
                    _ => String::new(),
                };
                for p in params {
                    out.push(row(sp, label.clone(), p, Err(message.clone()), None, 0.0));
                }
            }
        }
    }
    out
}

fn make_items(
    sp: SignalPoint,
    graph: &Graph,
    gg: Option<&GeometricGraph>,
    seq: &SeedSequence,
    realization: usize,
) -> Result<Vec<Item>, String> {
    let n = graph.n_vertices();
    let mut rng = seq.rng(SIGNAL_STREAM, realization as u64);
    let single = |values: Result<Vec<f64>, graphent::generators::GeneratorError>| {
        values.map(|values| vec![Item { label: String::new(), values, smoothness: None }]).map_err(|e| e.to_string())
    };
    match sp {
        SignalPoint::Mix { f, p } => match gg {
            Some(gg) => single(mix_signal(gg, p, f, &mut rng)),
            None => Err("the mix process needs a geometric graph".into()),
        },
        SignalPoint::Sine { cycles } => single(sine_signal(n, cycles)),
        SignalPoint::Wiener => single(wiener_signal(n, &mut rng)),
        SignalPoint::Logistic(lp) => single(logistic_signal(n, lp)),
        SignalPoint::Uniform => single(uniform_signal(n, &mut rng)),
        SignalPoint::Centrality(kind) => centrality(graph, kind, &CentralityOptions::default())
            .map(|values| vec![Item { label: kind.name().into(), values, smoothness: None }])
            .map_err(|e| e.to_string()),
        SignalPoint::LaplacianEigenvectors => {
            let spectrum = laplacian_spectrum(graph).map_err(|e| e.to_string())?;
            spectrum
                .eigenvectors
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    Ok(Item {
                        label: (i + 1).to_string(),
                        values: f.clone(),
                        smoothness: Some(normalized_smoothness(&spectrum, i).map_err(|e| e.to_string())?),
                    })
                })
                .collect()
        }
    }
}

/// CSV text for `rows`, header first.
pub fn to_csv(rows: &[SweepRow], wall_time: bool) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    if wall_time {
        header.push("wall_ms");
    }
    let csv_err = |e: csv::Error| CliError::Numeric(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.record(wall_time)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `contents` to a temporary file beside `path` and renames it over
/// `path`, so readers never see a partial file.
pub fn write_atomically(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Input(format!("cannot create a file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Input(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Mean and spread of one grid point over its realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// Parameter cells, as in the CSV without `realization`.
    pub key: Vec<String>,
    /// Realizations with a value.
    pub count: usize,
    pub errors: usize,
    /// `NaN` when every realization failed.
    pub mean: f64,
    /// Sample standard deviation; 0 for a single realization.
    pub std_dev: f64,
}

/// Groups rows by grid point in order of first appearance.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut index: HashMap<Vec<String>, usize> = HashMap::new();
    let mut groups: Vec<(Vec<String>, Vec<f64>, usize)> = Vec::new();
    for row in rows {
        let key = row.key();
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new(), 0));
            groups.len() - 1
        });
        match row.entropy() {
            Some(v) => groups[slot].1.push(v),
            None => groups[slot].2 += 1,
        }
    }
    groups
        .into_iter()
        .map(|(key, values, errors)| {
            let count = values.len();
            let mean = values.iter().sum::<f64>() / count as f64;
            let std_dev = if count > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
            } else {
                0.0
            };
            SummaryRow { key, count, errors, mean, std_dev }
        })
        .collect()
}

/// Plain-text table of the summary: varying parameter columns, then
/// `mean ± std` and the realization count.
pub fn format_summary(summary: &[SummaryRow]) -> String {
    let header: Vec<&str> = CSV_COLUMNS.iter().copied().filter(|c| *c != "realization").collect();
    let width = header.len().min(summary.first().map_or(0, |s| s.key.len()));
    let varying: Vec<usize> = (0..width)
        .filter(|&j| {
            summary.iter().any(|s| !s.key[j].is_empty()) && summary.iter().any(|s| s.key[j] != summary[0].key[j])
        })
        .collect();
    let mut out = String::new();
    if let Some(first) = summary.first() {
        let fixed: Vec<String> = (0..width)
            .filter(|j| !varying.contains(j) && !first.key[*j].is_empty())
            .map(|j| format!("{}={}", header[j], first.key[j]))
            .collect();
        let _ = writeln!(out, "# {}", fixed.join(" "));
    }
    let mut line: Vec<String> = varying.iter().map(|&j| header[j].to_string()).collect();
    line.extend(["mean".into(), "std".into(), "count".into(), "errors".into()]);
    let _ = writeln!(out, "{}", line.join("\t"));
    for s in summary {
        let mut line: Vec<String> = varying.iter().map(|&j| s.key[j].clone()).collect();
        line.extend([format!("{:.6}", s.mean), format!("{:.6}", s.std_dev), s.count.to_string(), s.errors.to_string()]);
        let _ = writeln!(out, "{}", line.join("\t"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{EntropyGrid, OnIsolated};
    use std::path::PathBuf;

    fn small(experiment: Experiment) -> SweepConfig {
        let mut cfg = SweepConfig::default_for(experiment);
        cfg.realizations = 2;
        match &mut cfg.graph {
            GraphSpec::Rgg { n, .. } | GraphSpec::WattsStrogatz { n, .. } | GraphSpec::Cycle { n } => *n = 60,
        }
        cfg
    }

    #[test]
    fn row_count_is_grid_times_realizations() {
        let cfg = small(Experiment::MixNoise);
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 11 * 2);
        assert!(rows.iter().all(|r| r.outcome.is_ok()));
    }

    #[test]
    fn summary_means_match_rows() {
        let cfg = small(Experiment::SmallworldP);
        let rows = run_sweep(&cfg).unwrap();
        let summary = summarize(&rows);
        assert_eq!(summary.len(), rows.len() / 2);
        for s in &summary {
            let vals: Vec<f64> = rows.iter().filter(|r| r.key() == s.key).filter_map(|r| r.entropy()).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((mean - s.mean).abs() < 1e-12);
        }
        assert!(format_summary(&summary).lines().count() == summary.len() + 2);
    }

    #[test]
    fn failures_become_rows() {
        let cfg = SweepConfig {
            experiment: Experiment::RggRadius,
            graph: GraphSpec::Rgg { n: 50, d: 2, r: vec![0.001, 0.5], on_isolated: OnIsolated::Retry, max_attempts: 2 },
            signals: vec![SignalSpec::Uniform],
            entropy: EntropyGrid { m: vec![2], delay: vec![1], c: vec![3], column_stats: StatsMode::Signal },
            realizations: 2,
            master_seed: 1,
            output: PathBuf::from("unused.csv"),
            record_wall_time: false,
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[..2].iter().all(|r| r.outcome.is_err()));
        assert!(rows[2..].iter().all(|r| r.outcome.is_ok()));
        let text = to_csv(&rows, false).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("isolated"));
    }

    #[test]
    fn wall_time_column_is_optional() {
        let cfg = small(Experiment::Centrality);
        let rows = run_sweep(&cfg).unwrap();
        let plain = to_csv(&rows, false).unwrap();
        let timed = to_csv(&rows, true).unwrap();
        assert!(!plain.lines().next().unwrap().contains("wall_ms"));
        assert!(timed.lines().next().unwrap().ends_with(",wall_ms"));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomically(&path, "a\n").unwrap();
        write_atomically(&path, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
