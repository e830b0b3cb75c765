use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use graphent_cli::config::{Experiment, SweepConfig};

fn graphent(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphent")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn entropy_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn entropy_on_a_directed_path_equals_de() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let series = "9\n8\n1\n12\n5\n-3\n1.5\n8.04\n2.99\n4\n-1\n10\n";
    write(d, "x.txt", series);
    let o = graphent(&["gen", "graph", "--model", "directed-path", "--n", "12", "--out", "dp.txt"], d);
    assert!(o.status.success());
    let graph = graphent(
        &["entropy", "--graph", "dp.txt", "--signal", "x.txt", "--directed", "-m", "2", "-L", "1", "-c", "3"],
        d,
    );
    let de = graphent(&["de", "--signal", "x.txt", "-m", "2", "-L", "1", "-c", "3"], d);
    assert!(graph.status.success() && de.status.success());
    assert_eq!(stdout(&graph), stdout(&de));
    assert_eq!(entropy_line(&de), "entropy 0.840251032309");
    assert!(stdout(&de).contains("rows 11\n"));
}

#[test]
fn constant_signal_prints_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.txt", "0 1\n1 2\n2 3\n3 0\n");
    write(d, "x.txt", "2.5\n2.5\n2.5\n2.5\n");
    let o = graphent(&["entropy", "--graph", "g.txt", "--signal", "x.txt", "-m", "3", "-L", "1", "-c", "4"], d);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "entropy 0.000000000000\nrows 4\npatterns 1\n");
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.txt", "0 1\n1 2\n");
    write(d, "short.txt", "1\n2\n");
    write(d, "loop.txt", "0 1\n2 2\n");
    write(d, "x.txt", "1\n2\n3\n");
    let cases: [&[&str]; 5] = [
        &["entropy", "--graph", "g.txt", "--signal", "short.txt", "-m", "2", "-L", "1", "-c", "3"],
        &["entropy", "--graph", "loop.txt", "--signal", "x.txt", "-m", "2", "-L", "1", "-c", "3"],
        &["entropy", "--graph", "g.txt", "--signal", "x.txt", "-m", "1", "-L", "1", "-c", "3"],
        &["entropy", "--graph", "missing.txt", "--signal", "x.txt", "-m", "2", "-L", "1", "-c", "3"],
        &["entropy", "--graph", "g.txt", "-m", "2"],
    ];
    for args in cases {
        let o = graphent(args, d);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn empty_restriction_set_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "dp.txt", "0 1\n1 2\n");
    write(d, "x.txt", "1\n2\n3\n");
    let o = graphent(
        &["entropy", "--graph", "dp.txt", "--directed", "--signal", "x.txt", "-m", "4", "-L", "1", "-c", "3"],
        d,
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn mix_noise_sweep_writes_110_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = graphent(&["sweep", "--print-default-config", "mix-noise"], d);
    assert!(o.status.success());
    let cfg = SweepConfig::from_json(&stdout(&o)).unwrap();
    assert_eq!(cfg, SweepConfig::default_for(Experiment::MixNoise));
    write(d, "mix.json", &stdout(&o));
    let o = graphent(&["sweep", "--config", "mix.json", "--out", "mix.csv"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.join("mix.csv")).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 110);
    for r in &rows {
        let e: f64 = r[18].parse().unwrap();
        assert!((0.0..=1.0).contains(&e));
        assert_eq!(&r[22], "");
    }
    let summary = stdout(&o);
    assert!(summary.contains("110 rows (0 failed)"));
    // one summary line per noise level
    assert_eq!(summary.lines().filter(|l| l.split('\t').count() == 5).count(), 12);
}

#[test]
fn bad_sweep_configs_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut cfg = SweepConfig::default_for(Experiment::MixNoise);
    cfg.entropy.m.clear();
    write(d, "empty.json", &cfg.to_json());
    write(d, "junk.json", "{ not json");
    for name in ["empty.json", "junk.json", "missing.json"] {
        let o = graphent(&["sweep", "--config", name], d);
        assert_eq!(o.status.code(), Some(2), "{name}");
    }
    assert_eq!(graphent(&["sweep", "--print-default-config", "nope"], d).status.code(), Some(2));
}

#[test]
fn smallworld_cycle_rows_match_a_direct_computation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut cfg = SweepConfig::default_for(Experiment::SmallworldP);
    cfg.realizations = 2;
    if let graphent_cli::config::GraphSpec::WattsStrogatz { p, .. } = &mut cfg.graph {
        *p = vec![0.0];
    }
    write(d, "sw.json", &cfg.to_json());
    assert!(graphent(&["sweep", "--config", "sw.json", "--out", "sw.csv"], d).status.success());
    let rows = csv_rows(&std::fs::read_to_string(d.join("sw.csv")).unwrap());

    // at p = 0 the graph is the cycle, so the logistic rows must equal the
    // entropy of the same series on an explicit cycle
    let ring = graphent::generators::cycle(500).unwrap();
    let params = cfg.entropy.params().unwrap();
    for r in rows.iter().filter(|r| &r[8] == "logistic") {
        let lr: f64 = r[11].parse().unwrap();
        let x = graphent::generators::logistic_signal(500, graphent::generators::LogisticParams::new(lr)).unwrap();
        let expected = graphent::dispersion_entropy_graph(&ring, &x, &params[0]).unwrap().value;
        assert_eq!(r[18].parse::<f64>().unwrap(), expected);
    }
}

#[test]
fn spectrum_of_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphent(&["spectrum", "--model", "cycle", "--n", "64", "-m", "2", "-L", "1", "-c", "2,3"], dir.path());
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 128);
    let mut closed: Vec<f64> = (0..64).map(|j| (2.0 - 2.0 * (2.0 * PI * j as f64 / 64.0).cos()) / 4.0).collect();
    closed.sort_by(f64::total_cmp);
    for r in &rows {
        let i: usize = r[0].parse().unwrap();
        let s: f64 = r[2].parse().unwrap();
        assert!((s - closed[i - 1]).abs() < 1e-10);
    }
    assert!(rows[0][2].parse::<f64>().unwrap() < 1e-12);
    assert_eq!(&rows[0][6], "0");
    assert_eq!(&rows[127][2], "1");
}

#[test]
fn centrality_command() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ring = graphent(&["centrality", "--model", "cycle", "--n", "50", "-m", "2", "-L", "1", "-c", "3"], d);
    let rows = csv_rows(&stdout(&ring));
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| &r[4] == "0"));

    let star = graphent(
        &["centrality", "--model", "star", "--n", "6", "-m", "2", "-L", "1", "-c", "2", "--measures", "degree"],
        d,
    );
    let rows = csv_rows(&stdout(&star));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][4].parse::<f64>().unwrap() > 0.0);

    write(d, "two.txt", "0 1\n2 3\n3 4\n");
    let o = graphent(&["centrality", "--graph", "two.txt", "-m", "2", "-L", "1", "-c", "2"], d);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let closeness = rows.iter().find(|r| &r[0] == "closeness").unwrap();
    assert!(closeness[6].contains("connected"));
    assert!(rows.iter().filter(|r| &r[0] != "closeness").all(|r| r[6].is_empty()));
}

#[test]
fn generated_mix_signal_feeds_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = graphent(
        &[
            "gen",
            "graph",
            "--model",
            "rgg",
            "--n",
            "200",
            "--r",
            "0.15",
            "--seed",
            "3",
            "--out",
            "g.txt",
            "--coords-out",
            "xy.txt",
        ],
        d,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = graphent(
        &[
            "gen",
            "signal",
            "--process",
            "mix",
            "--coords",
            "xy.txt",
            "--f",
            "6.283185307179586",
            "--p",
            "0",
            "--out",
            "s.txt",
        ],
        d,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let values: Vec<f64> =
        std::fs::read_to_string(d.join("s.txt")).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    let coords: Vec<Vec<f64>> = std::fs::read_to_string(d.join("xy.txt"))
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    for (v, c) in values.iter().zip(&coords) {
        let s: f64 = c.iter().map(|x| (2.0 * PI * x).sin()).sum();
        assert!((v - s).abs() < 1e-15);
    }
    let o = graphent(&["entropy", "--graph", "g.txt", "--signal", "s.txt", "-m", "3", "-L", "1", "-c", "3"], d);
    assert!(o.status.success());
    assert!(stdout(&o).contains("rows 200\n"));

    let again = graphent(&["gen", "signal", "--process", "wiener", "--n", "5", "--seed", "9"], d);
    let twice = graphent(&["gen", "signal", "--process", "wiener", "--n", "5", "--seed", "9"], d);
    assert_eq!(again.stdout, twice.stdout);
    assert_eq!(stdout(&again).lines().next(), Some("0"));
    let logistic = graphent(&["gen", "signal", "--process", "logistic", "--n", "4"], d);
    assert_eq!(logistic.status.code(), Some(2));
}
