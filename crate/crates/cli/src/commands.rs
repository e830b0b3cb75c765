//! Argument definitions and the implementation of every subcommand.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphent::entropy::{ColumnStats, EntropyParams, EntropyResult};
use graphent::generators::{
    cycle, directed_path, logistic_signal, mix_signal, path, rgg, sine_signal, star, uniform_signal, watts_strogatz,
    wiener_signal, GeometricGraph, IsolatedPolicy, LogisticParams, RggOptions, SeedSequence,
};
use graphent::io::{format_edge_list, format_signal, load_edge_list, load_signal, load_signal_for, LoadOptions};
use graphent::measures::{centrality, laplacian_spectrum, normalized_smoothness, CentralityKind, CentralityOptions};
use graphent::{classical_de, dispersion_entropy_graph, Directedness, Graph};

use crate::config::{Experiment, SweepConfig};
use crate::sweep::{format_summary, run_sweep, summarize, to_csv, write_atomically, GRAPH_STREAM, SIGNAL_STREAM};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "graphent", version, about = "Dispersion entropy of graph signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispersion entropy of a signal file on an edge-list graph.
    Entropy(EntropyArgs),
    /// Classical dispersion entropy of a time series file.
    De(DeArgs),
    /// Generate a graph or a signal.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a parameter sweep described by a JSON config.
    Sweep(SweepArgs),
    /// Laplacian eigenvectors as signals: smoothness and entropy per eigenvector.
    Spectrum(SpectrumArgs),
    /// Entropy of centrality measures used as signals.
    Centrality(CentralityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatsArg {
    Signal,
    PerColumn,
}

impl From<StatsArg> for ColumnStats {
    fn from(s: StatsArg) -> Self {
        match s {
            StatsArg::Signal => ColumnStats::Signal,
            StatsArg::PerColumn => ColumnStats::PerColumn,
        }
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Embedding dimension.
    #[arg(short = 'm', long = "embedding-dim")]
    pub m: usize,
    /// Delay.
    #[arg(short = 'L', long = "delay")]
    pub delay: usize,
    /// Number of classes.
    #[arg(short = 'c', long = "classes")]
    pub c: usize,
    /// Mean and deviation of the class map: from the whole signal, or per
    /// embedding column.
    #[arg(long, value_enum, default_value = "signal")]
    pub column_stats: StatsArg,
}

impl ParamArgs {
    fn params(&self) -> Result<EntropyParams, CliError> {
        Ok(EntropyParams::new(self.m, self.delay, self.c)?.with_stats(self.column_stats.into()))
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Embedding dimensions, comma separated.
    #[arg(short = 'm', long = "embedding-dim", value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    /// Delays, comma separated.
    #[arg(short = 'L', long = "delay", value_delimiter = ',', required = true)]
    pub delay: Vec<usize>,
    /// Class counts, comma separated.
    #[arg(short = 'c', long = "classes", value_delimiter = ',', required = true)]
    pub c: Vec<usize>,
    #[arg(long, value_enum, default_value = "signal")]
    pub column_stats: StatsArg,
}

impl GridArgs {
    fn params(&self) -> Result<Vec<EntropyParams>, CliError> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &l in &self.delay {
                for &c in &self.c {
                    out.push(EntropyParams::new(m, l, c)?.with_stats(self.column_stats.into()));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Signal file, one value per vertex.
    #[arg(long)]
    pub signal: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Read edges as arcs `u -> v`.
    #[arg(long)]
    pub directed: bool,
    /// Read the third column as an edge weight.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Args)]
pub struct DeArgs {
    /// Series file, one value per line.
    #[arg(long)]
    pub signal: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Rgg,
    WattsStrogatz,
    Cycle,
    Path,
    DirectedPath,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IsolatedArg {
    Retry,
    Prune,
}

/// A generated graph. Every model needs `--n`; `rgg` also needs `--r`,
/// `watts-strogatz` needs `--k` and `--rewire-p`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long)]
    pub n: Option<usize>,
    /// RGG dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// RGG radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// Watts-Strogatz neighbours per side.
    #[arg(long)]
    pub k: Option<usize>,
    /// Watts-Strogatz rewiring probability.
    #[arg(long = "rewire-p")]
    pub rewire_p: Option<f64>,
    /// Master seed; the graph is drawn from its `graph` stream, index 0.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "retry")]
    pub on_isolated: IsolatedArg,
    #[arg(long, default_value_t = 100)]
    pub max_attempts: usize,
}

fn need<T>(value: Option<T>, flag: &str, model: Model) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("--{flag} is required for model {model:?}")))
}

impl ModelArgs {
    pub fn build(&self) -> Result<(Graph, Option<GeometricGraph>), CliError> {
        let model = self.model.ok_or_else(|| CliError::Input("either --graph or --model is required".into()))?;
        let n = need(self.n, "n", model)?;
        let mut rng = SeedSequence::new(self.seed).rng(GRAPH_STREAM, 0);
        Ok(match model {
            Model::Rgg => {
                let on_isolated = match self.on_isolated {
                    IsolatedArg::Retry => IsolatedPolicy::Retry,
                    IsolatedArg::Prune => IsolatedPolicy::Prune,
                };
                let options = RggOptions { on_isolated, max_attempts: self.max_attempts };
                let gg = rgg(n, self.d, need(self.r, "r", model)?, options, &mut rng)?;
                (gg.graph.clone(), Some(gg))
            }
            Model::WattsStrogatz => {
                let k = need(self.k, "k", model)?;
                let p = need(self.rewire_p, "rewire-p", model)?;
                (watts_strogatz(n, k, p, &mut rng)?, None)
            }
            Model::Cycle => (cycle(n)?, None),
            Model::Path => (path(n)?, None),
            Model::DirectedPath => (directed_path(n)?, None),
            Model::Star => (star(n)?, None),
        })
    }
}

/// Where a command gets its graph: an edge-list file or a generator.
#[derive(Debug, Args)]
pub struct GraphSourceArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "model")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub weighted: bool,
    #[command(flatten)]
    pub model: ModelArgs,
}

impl GraphSourceArgs {
    pub fn load(&self) -> Result<Graph, CliError> {
        match &self.graph {
            Some(path) => load_graph(path, self.directed, self.weighted),
            None => Ok(self.model.build()?.0),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Write a graph in edge-list format.
    Graph(GenGraphArgs),
    /// Write a signal, one value per line.
    Signal(GenSignalArgs),
}

#[derive(Debug, Args)]
pub struct GenGraphArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// For `rgg`, also write vertex coordinates, one whitespace-separated
    /// point per line.
    #[arg(long)]
    pub coords_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Process {
    Mix,
    Sine,
    Wiener,
    Logistic,
    Uniform,
}

#[derive(Debug, Args)]
pub struct GenSignalArgs {
    #[arg(long, value_enum)]
    pub process: Process,
    /// Signal length; for `mix` it is the number of coordinate lines.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coordinate file written by `gen graph --coords-out` (mix only).
    #[arg(long)]
    pub coords: Option<PathBuf>,
    /// Mix frequency in radians per unit length.
    #[arg(long)]
    pub f: Option<f64>,
    /// Mix noise probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Sine cycles over the whole index range.
    #[arg(long, default_value_t = 10.0)]
    pub cycles: f64,
    /// Logistic parameter.
    #[arg(long = "logistic-r")]
    pub logistic_r: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    pub x0: f64,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    /// Master seed; the signal is drawn from its `signal` stream, index 0.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep config.
    #[arg(long, required_unless_present = "print_default_config")]
    pub config: Option<PathBuf>,
    /// Overrides the config's output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the default config of an experiment and exit.
    #[arg(long, value_name = "EXPERIMENT", conflicts_with = "config")]
    pub print_default_config: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: GraphSourceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[command(flatten)]
    pub source: GraphSourceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Measures to evaluate, comma separated; all six when absent.
    #[arg(long, value_delimiter = ',')]
    pub measures: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_graph(path: &Path, directed: bool, weighted: bool) -> Result<Graph, CliError> {
    let directedness = if directed { Directedness::Directed } else { Directedness::Undirected };
    Ok(load_edge_list(path, LoadOptions { directedness, weighted })?.graph)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomically(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

pub fn format_result(r: &EntropyResult) -> String {
    format!("entropy {:.12}\nrows {}\npatterns {}\n", r.value, r.restriction_size, r.histogram.support())
}

/// Runs a parsed command, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Entropy(a) => {
            let params = a.params.params()?;
            let graph = load_graph(&a.graph, a.directed, a.weighted)?;
            let signal = load_signal_for(&a.signal, &graph)?;
            let r = dispersion_entropy_graph(&graph, &signal, &params)?;
            emit(out, None, &format_result(&r))
        }
        Command::De(a) => {
            let params = a.params.params()?;
            let series = load_signal(&a.signal)?;
            let r = classical_de(&series, &params)?;
            emit(out, None, &format_result(&r))
        }
        Command::Gen(GenCommand::Graph(a)) => gen_graph(a, out),
        Command::Gen(GenCommand::Signal(a)) => gen_signal(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Spectrum(a) => spectrum(a, out),
        Command::Centrality(a) => centralities(a, out),
    }
}

fn gen_graph(a: GenGraphArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (graph, gg) = a.model.build()?;
    if let Some(path) = &a.coords_out {
        let gg = gg.ok_or_else(|| CliError::Input("--coords-out needs --model rgg".into()))?;
        let text: String =
            gg.coords.iter().map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n").collect();
        write_atomically(path, &text)?;
    }
    emit(out, a.out.as_deref(), &format_edge_list(&graph))
}

/// Reads coordinates written by `gen graph --coords-out`.
pub fn parse_coords(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut coords = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let point: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let point = point.map_err(|_| CliError::Input(format!("coordinates line {}: not a number", i + 1)))?;
        if coords.first().is_some_and(|p: &Vec<f64>| p.len() != point.len()) {
            return Err(CliError::Input(format!("coordinates line {}: dimension changes", i + 1)));
        }
        coords.push(point);
    }
    if coords.is_empty() {
        return Err(CliError::Input("coordinate file is empty".into()));
    }
    Ok(coords)
}

fn gen_signal(a: GenSignalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut rng = SeedSequence::new(a.seed).rng(SIGNAL_STREAM, 0);
    let length = || a.n.ok_or_else(|| CliError::Input("--n is required".into()));
    let values = match a.process {
        Process::Mix => {
            let coords_path = a.coords.as_ref().ok_or_else(|| CliError::Input("mix needs --coords".into()))?;
            let coords = parse_coords(&std::fs::read_to_string(coords_path)?)?;
            let dim = coords[0].len();
            let n = coords.len();
            // Only the coordinates are read by the signal; a path stands in
            // for the graph.
            let gg = GeometricGraph { graph: path(n.max(2))?, coords, radius: 0.0, dim };
            let f = a.f.ok_or_else(|| CliError::Input("mix needs --f".into()))?;
            let p = a.p.ok_or_else(|| CliError::Input("mix needs --p".into()))?;
            mix_signal(&gg, p, f, &mut rng)?
        }
        Process::Sine => sine_signal(length()?, a.cycles)?,
        Process::Wiener => wiener_signal(length()?, &mut rng)?,
        Process::Logistic => {
            let r = a.logistic_r.ok_or_else(|| CliError::Input("logistic needs --logistic-r".into()))?;
            logistic_signal(length()?, LogisticParams { r, x0: a.x0, burn_in: a.burn_in })?
        }
        Process::Uniform => uniform_signal(length()?, &mut rng)?,
    };
    emit(out, a.out.as_deref(), &format_signal(&values))
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(name) = &a.print_default_config {
        let experiment: Experiment = name.parse()?;
        return emit(out, None, &(SweepConfig::default_for(experiment).to_json() + "\n"));
    }
    let path = a.config.as_ref().expect("clap requires --config");
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = SweepConfig::from_json(&text)?;
    if let Some(o) = a.out {
        cfg.output = o;
    }
    let rows = run_sweep(&cfg)?;
    write_atomically(&cfg.output, &to_csv(&rows, cfg.record_wall_time)?)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    let mut text = format_summary(&summarize(&rows));
    let _ = writeln!(text, "{} rows ({} failed) written to {}", rows.len(), failed, cfg.output.display());
    emit(out, None, &text)
}

fn csv_text(header: &[&str], records: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Numeric(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in records {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn entropy_cells(graph: &Graph, signal: &[f64], p: &EntropyParams) -> [String; 3] {
    match dispersion_entropy_graph(graph, signal, p) {
        Ok(r) => [r.value.to_string(), r.histogram.support().to_string(), String::new()],
        Err(e) => [String::new(), String::new(), e.to_string()],
    }
}

pub const SPECTRUM_COLUMNS: [&str; 9] =
    ["i", "eigenvalue", "normalized_smoothness", "m", "L", "c", "entropy", "support", "error"];

fn spectrum(a: SpectrumArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = a.grid.params()?;
    let graph = a.source.load()?;
    let spec = laplacian_spectrum(&graph)?;
    let mut records = Vec::new();
    for (i, f) in spec.eigenvectors.iter().enumerate() {
        let smooth = normalized_smoothness(&spec, i)?;
        for p in &params {
            let mut rec = vec![
                (i + 1).to_string(),
                spec.eigenvalues[i].to_string(),
                smooth.to_string(),
                p.embedding_dim().to_string(),
                p.delay().to_string(),
                p.classes().to_string(),
            ];
            rec.extend(entropy_cells(&graph, f, p));
            records.push(rec);
        }
    }
    emit(out, a.out.as_deref(), &csv_text(&SPECTRUM_COLUMNS, &records)?)
}

pub const CENTRALITY_COLUMNS: [&str; 7] = ["measure", "m", "L", "c", "entropy", "support", "error"];

fn centralities(a: CentralityArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = a.grid.params()?;
    let kinds: Vec<CentralityKind> = if a.measures.is_empty() {
        CentralityKind::ALL.to_vec()
    } else {
        a.measures.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let graph = a.source.load()?;
    let options = CentralityOptions::default();
    let mut records = Vec::new();
    for kind in kinds {
        let signal = centrality(&graph, kind, &options);
        for p in &params {
            let mut rec = vec![
                kind.name().to_string(),
                p.embedding_dim().to_string(),
                p.delay().to_string(),
                p.classes().to_string(),
            ];
            match &signal {
                Ok(x) => rec.extend(entropy_cells(&graph, x, p)),
                Err(e) => rec.extend([String::new(), String::new(), e.to_string()]),
            }
            records.push(rec);
        }
    }
    emit(out, a.out.as_deref(), &csv_text(&CENTRALITY_COLUMNS, &records)?)
}
