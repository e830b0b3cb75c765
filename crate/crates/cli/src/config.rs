//! Sweep configuration: one JSON document, every field explicit.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use graphent::entropy::{ColumnStats, EntropyParams};
use graphent::generators::IsolatedPolicy;
use graphent::measures::CentralityKind;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    MixNoise,
    MixFrequency,
    RggRadius,
    SmallworldP,
    SmallworldK,
    Spectrum,
    Centrality,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::MixNoise,
        Experiment::MixFrequency,
        Experiment::RggRadius,
        Experiment::SmallworldP,
        Experiment::SmallworldK,
        Experiment::Spectrum,
        Experiment::Centrality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::MixNoise => "mix-noise",
            Experiment::MixFrequency => "mix-frequency",
            Experiment::RggRadius => "rgg-radius",
            Experiment::SmallworldP => "smallworld-p",
            Experiment::SmallworldK => "smallworld-k",
            Experiment::Spectrum => "spectrum",
            Experiment::Centrality => "centrality",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnIsolated {
    Retry,
    Prune,
}

impl From<OnIsolated> for IsolatedPolicy {
    fn from(o: OnIsolated) -> Self {
        match o {
            OnIsolated::Retry => IsolatedPolicy::Retry,
            OnIsolated::Prune => IsolatedPolicy::Prune,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Rgg { n: usize, d: usize, r: Vec<f64>, on_isolated: OnIsolated, max_attempts: usize },
    WattsStrogatz { n: usize, k: Vec<usize>, p: Vec<f64> },
    Cycle { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalSpec {
    /// Coordinate sinusoid mixed with noise; needs an `rgg` graph.
    Mix {
        f: Vec<f64>,
        p: Vec<f64>,
    },
    /// `sin(2 pi cycles i / n)` over the vertex index.
    Sine {
        cycles: f64,
    },
    Wiener,
    Logistic {
        r: Vec<f64>,
        x0: f64,
        burn_in: usize,
    },
    Uniform,
    /// Every Laplacian eigenvector of the graph.
    LaplacianEigenvectors,
    Centrality {
        #[serde(with = "measure_names")]
        measures: Vec<CentralityKind>,
    },
}

mod measure_names {
    use graphent::measures::CentralityKind;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(kinds: &[CentralityKind], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(kinds.iter().map(|k| k.name()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CentralityKind>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|name| name.parse().map_err(D::Error::custom)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatsMode {
    Signal,
    PerColumn,
}

impl From<StatsMode> for ColumnStats {
    fn from(s: StatsMode) -> Self {
        match s {
            StatsMode::Signal => ColumnStats::Signal,
            StatsMode::PerColumn => ColumnStats::PerColumn,
        }
    }
}

impl fmt::Display for StatsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatsMode::Signal => "signal",
            StatsMode::PerColumn => "per-column",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyGrid {
    pub m: Vec<usize>,
    #[serde(rename = "L")]
    pub delay: Vec<usize>,
    pub c: Vec<usize>,
    pub column_stats: StatsMode,
}

impl EntropyGrid {
    /// Every `(m, L, c)` combination, `m` outermost.
    pub fn params(&self) -> Result<Vec<EntropyParams>, CliError> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &l in &self.delay {
                for &c in &self.c {
                    let p = EntropyParams::new(m, l, c)
                        .map_err(|e| CliError::Input(e.to_string()))?
                        .with_stats(self.column_stats.into());
                    out.push(p);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub graph: GraphSpec,
    pub signals: Vec<SignalSpec>,
    pub entropy: EntropyGrid,
    pub realizations: usize,
    pub master_seed: u64,
    pub output: PathBuf,
    /// Adds a `wall_ms` column. Timings differ between runs, so the CSV is
    /// only byte-reproducible with this off.
    pub record_wall_time: bool,
}

fn nonempty<T>(items: &[T], what: &str) -> Result<(), CliError> {
    if items.is_empty() {
        Err(CliError::Input(format!("{what} grid is empty")))
    } else {
        Ok(())
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad sweep config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.realizations < 1 {
            return Err(CliError::Input("realizations must be at least 1".into()));
        }
        nonempty(&self.signals, "signals")?;
        nonempty(&self.entropy.m, "m")?;
        nonempty(&self.entropy.delay, "L")?;
        nonempty(&self.entropy.c, "c")?;
        self.entropy.params()?;
        match &self.graph {
            GraphSpec::Rgg { r, .. } => nonempty(r, "r")?,
            GraphSpec::WattsStrogatz { k, p, .. } => {
                nonempty(k, "k")?;
                nonempty(p, "p")?;
            }
            GraphSpec::Cycle { .. } => {}
        }
        for s in &self.signals {
            match s {
                SignalSpec::Mix { f, p } => {
                    nonempty(f, "f")?;
                    nonempty(p, "p")?;
                    if !matches!(self.graph, GraphSpec::Rgg { .. }) {
                        return Err(CliError::Input("the mix process needs an rgg graph".into()));
                    }
                }
                SignalSpec::Logistic { r, .. } => nonempty(r, "logistic r")?,
                SignalSpec::Centrality { measures } => nonempty(measures, "measures")?,
                _ => {}
            }
        }
        Ok(())
    }

    /// Desk-scale defaults for each experiment.
    pub fn default_for(experiment: Experiment) -> SweepConfig {
        let rgg = |r: Vec<f64>| GraphSpec::Rgg { n: 500, d: 2, r, on_isolated: OnIsolated::Prune, max_attempts: 100 };
        let grid =
            |m: Vec<usize>, c: Vec<usize>| EntropyGrid { m, delay: vec![1], c, column_stats: StatsMode::PerColumn };
        let time_signals = || {
            vec![
                SignalSpec::Uniform,
                SignalSpec::Logistic { r: vec![3.3, 3.7], x0: 0.4, burn_in: 1000 },
                SignalSpec::Wiener,
                SignalSpec::Sine { cycles: 10.0 },
            ]
        };
        let (graph, signals, entropy) = match experiment {
            Experiment::MixNoise => (
                rgg(vec![0.08]),
                vec![SignalSpec::Mix { f: vec![2.0 * PI], p: (0..=10).map(|i| i as f64 / 10.0).collect() }],
                grid(vec![3], vec![3]),
            ),
            Experiment::MixFrequency => (
                rgg(vec![0.08]),
                vec![SignalSpec::Mix { f: vec![1.5 * PI, 2.0 * PI, 4.0 * PI, 8.0 * PI, 16.0 * PI], p: vec![0.0, 0.2] }],
                grid(vec![3], vec![3]),
            ),
            Experiment::RggRadius => (
                rgg(vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3]),
                vec![SignalSpec::Mix { f: vec![4.0 * PI], p: vec![0.0] }],
                grid(vec![2], vec![2, 3, 4]),
            ),
            Experiment::SmallworldP => (
                GraphSpec::WattsStrogatz { n: 500, k: vec![1], p: vec![0.0, 0.25, 0.5, 0.75, 1.0] },
                time_signals(),
                grid(vec![3], vec![3]),
            ),
            Experiment::SmallworldK => (
                GraphSpec::WattsStrogatz { n: 500, k: (1..=6).collect(), p: vec![0.05] },
                time_signals(),
                grid(vec![3], vec![3]),
            ),
            Experiment::Spectrum => (
                GraphSpec::Rgg { n: 300, d: 2, r: vec![0.15], on_isolated: OnIsolated::Retry, max_attempts: 100 },
                vec![SignalSpec::LaplacianEigenvectors],
                grid(vec![2], vec![2, 3, 4]),
            ),
            Experiment::Centrality => (
                GraphSpec::WattsStrogatz { n: 500, k: vec![3], p: vec![0.1] },
                vec![SignalSpec::Centrality { measures: CentralityKind::ALL.to_vec() }],
                grid(vec![3], vec![3]),
            ),
        };
        SweepConfig {
            experiment,
            graph,
            signals,
            entropy,
            realizations: if experiment == Experiment::Spectrum { 1 } else { 10 },
            master_seed: 20_240_601,
            output: PathBuf::from(format!("{}.csv", experiment.name())),
            record_wall_time: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        for e in Experiment::ALL {
            let cfg = SweepConfig::default_for(e);
            cfg.validate().unwrap();
            let back = SweepConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn rejects_empty_grids_and_bad_combinations() {
        let mut cfg = SweepConfig::default_for(Experiment::MixNoise);
        cfg.entropy.c.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default_for(Experiment::MixNoise);
        cfg.realizations = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default_for(Experiment::SmallworldP);
        cfg.signals = vec![SignalSpec::Mix { f: vec![1.0], p: vec![0.0] }];
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default_for(Experiment::MixNoise);
        cfg.entropy.m = vec![1];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn missing_fields_are_errors() {
        let text = r#"{"experiment": "mix-noise", "realizations": 1}"#;
        assert!(matches!(SweepConfig::from_json(text), Err(CliError::Input(_))));
        let mut value: serde_json::Value =
            serde_json::from_str(&SweepConfig::default_for(Experiment::Spectrum).to_json()).unwrap();
        value["surprise"] = serde_json::json!(1);
        assert!(SweepConfig::from_json(&value.to_string()).is_err());
    }
}
