use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ceda::genlab::{sample, ExampleId, GeneratorSpec};
use ceda::{crosstab, CategoricalSeries, Categorizer, Column, EntropyReport};
use tempfile::TempDir;

fn ceda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ceda"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn simulate(dir: &TempDir, example: &str, n: usize, seed: u64) -> PathBuf {
    let p = dir.path().join(format!("{example}.csv"));
    let out = ceda(&[
        "simulate",
        "--example",
        example,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        p.to_str().unwrap(),
    ]);
    stdout(&out);
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const EX1_CONFIG: &str = r#"{
  "response": ["Y"],
  "categorize": {
    "default": {"kind": "quantile", "k": 10, "low": 0.05, "high": 0.95},
    "columns": {"V1": {"kind": "passthrough"}}
  }
}"#;

#[test]
fn simulated_example1_round_trips_bitwise() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex1", 20_000, 3);
    let cfg = write(&dir, "ex1.json", EX1_CONFIG);
    let text = stdout(&ceda(&[
        "measure",
        "--config",
        s(&cfg),
        "--input",
        s(&csv),
        "--seed",
        "3",
        "--format",
        "json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let from_cli: EntropyReport<f64> =
        serde_json::from_value(doc["reports"][0]["report"].clone()).unwrap();
    assert_eq!(doc["reports"][0]["subset"], "V1");

    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex1, 20_000, 3)).unwrap();
    let y = d.categorize("Y", &Categorizer::quantile(10), 0).unwrap();
    let v1: &CategoricalSeries = match d.column("V1").unwrap() {
        Column::Categorical(s) => s,
        Column::Numeric(_) => unreachable!(),
    };
    let in_memory = EntropyReport::<f64>::from_table(&crosstab(&[v1], &y).unwrap());
    assert_eq!(from_cli, in_memory);
    assert_eq!(from_cli.mi.to_bits(), in_memory.mi.to_bits());
    assert!((in_memory.mi - 0.113).abs() < 0.01);
}

#[test]
fn measure_tsv_layout() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex1", 2000, 1);
    let cfg = write(&dir, "ex1.json", EX1_CONFIG);
    let text = stdout(&ceda(&["measure", "--config", s(&cfg), "--input", s(&csv)]));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# ceda measure config_digest="));
    assert!(lines[0].ends_with(" seed=0"));
    assert_eq!(
        lines[1],
        "subset\tN\trows\tcols\tavg_cell\tH_Y\tH_Y_given_A\tMI"
    );
    let row: Vec<&str> = lines[2].split('\t').collect();
    assert_eq!(&row[..4], &["V1", "2000", "2", "12"]);
    assert_eq!(lines.len(), 3);
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex4", 3000, 7);
    let run = |threads: &str, cmd: &str| {
        stdout(&ceda(&[
            cmd,
            "--input",
            s(&csv),
            "--response",
            "Y",
            "--replicates",
            "100",
            "--seed",
            "7",
            "--threads",
            threads,
        ]))
    };
    for cmd in ["null", "select"] {
        let one = run("1", cmd);
        assert_eq!(one, run("1", cmd));
        assert_eq!(one, run("2", cmd));
        assert_eq!(one, run("8", cmd));
        let digest = one.lines().next().unwrap();
        assert!(digest.contains("config_digest=") && digest.contains("seed=7"));
    }
}

#[test]
fn json_reports_embed_digest_and_seed() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex4", 2000, 2);
    let text = stdout(&ceda(&[
        "select",
        "--input",
        s(&csv),
        "--response",
        "Y",
        "--replicates",
        "50",
        "--seed",
        "2",
        "--format",
        "json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["command"], "select");
    assert_eq!(doc["seed"], 2);
    assert_eq!(doc["config_digest"].as_str().unwrap().len(), 64);
    for key in ["chief", "alternatives", "interactions"] {
        assert!(doc["report"].get(key).is_some(), "{key}");
    }
}

#[test]
fn select_on_example4_names_x1_and_the_x2_x3_pair() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex4", 10_000, 7);
    let text = stdout(&ceda(&[
        "select",
        "--input",
        s(&csv),
        "--response",
        "Y",
        "--seed",
        "7",
        "--replicates",
        "200",
        "--format",
        "json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let confirmed: Vec<(String, String)> = doc["report"]["confirmed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let subset: Vec<&str> = c["subset"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_str().unwrap())
                .collect();
            (
                subset.join("_"),
                c["classification"].as_str().unwrap().to_owned(),
            )
        })
        .collect();
    assert_eq!(
        confirmed,
        vec![
            ("X1".to_string(), "order-1 major factor".to_string()),
            ("X2_X3".to_string(), "interaction".to_string())
        ]
    );
}

#[test]
fn max_order_zero_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex4", 200, 1);
    let out = ceda(&[
        "select",
        "--input",
        s(&csv),
        "--response",
        "Y",
        "--max-order",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_column_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex4", 200, 1);
    let out = ceda(&["measure", "--input", s(&csv), "--response", "Z"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unparsable_cell_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("Y,X1,X2\n");
    for i in 0..30 {
        let x2 = if i == 16 {
            "n/a".to_string()
        } else {
            format!("{}", i * 2)
        };
        text.push_str(&format!("{i},{},{x2}\n", i % 5));
    }
    let csv = write(&dir, "bad.csv", &text);
    let out = ceda(&["measure", "--input", s(&csv), "--response", "Y"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 17, column \"X2\""), "{err}");
}

#[test]
fn bins_emit_and_replay_reproduce_the_categorization() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex4", 1500, 4);
    let cfg = write(
        &dir,
        "bins.json",
        r#"{"response": ["Y"], "categorize": {"columns": {"X2": {"kind": "kmeans", "k": 6}}}}"#,
    );
    let schemes = dir.path().join("schemes.json");
    stdout(&ceda(&[
        "bins",
        "--config",
        s(&cfg),
        "--input",
        s(&csv),
        "--seed",
        "4",
        "--out",
        s(&schemes),
    ]));
    let replay = stdout(&ceda(&[
        "bins",
        "--config",
        s(&cfg),
        "--input",
        s(&csv),
        "--replay",
        s(&schemes),
    ]));
    let mut rows = csv::Reader::from_reader(replay.as_bytes());
    let header: Vec<String> = rows.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header, vec!["Y", "X1", "X2", "X3", "X4"]);
    let labels: Vec<Vec<u32>> = rows
        .records()
        .map(|r| r.unwrap().iter().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(labels.len(), 1500);

    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex4, 1500, 4)).unwrap();
    let x1 = d.categorize("X1", &Categorizer::quantile(10), 0).unwrap();
    let x1_replayed: Vec<u32> = labels.iter().map(|r| r[1]).collect();
    assert_eq!(x1.labels(), x1_replayed.as_slice());
    let x2_replayed: Vec<u32> = labels.iter().map(|r| r[2]).collect();
    assert!(x2_replayed.iter().all(|&l| l < 6));

    // Replaying twice gives the same bytes.
    let again = stdout(&ceda(&[
        "bins",
        "--config",
        s(&cfg),
        "--input",
        s(&csv),
        "--replay",
        s(&schemes),
    ]));
    assert_eq!(replay, again);
}

#[test]
fn grid_and_null_run_on_example3() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir, "ex3_rho", 4000, 5);
    let cfg = write(
        &dir,
        "grid.json",
        r#"{"response": ["Y"], "covariates": ["X"], "y_ladder": [12, 22], "x_ladder": [12], "replicates": 50}"#,
    );
    let text = stdout(&ceda(&["grid", "--config", s(&cfg), "--input", s(&csv)]));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert!(text.contains("confirmed"));
}

#[test]
fn simulate_is_reproducible() {
    let a = stdout(&ceda(&[
        "simulate",
        "--example",
        "ex6",
        "--n",
        "50",
        "--seed",
        "9",
    ]));
    let b = stdout(&ceda(&[
        "simulate",
        "--example",
        "ex6",
        "--n",
        "50",
        "--seed",
        "9",
    ]));
    assert_eq!(a, b);
    assert!(a.starts_with("Y,X1,X2,X3,X4,X5,X6,X7,X8,X9,X10\n"));
    let bad = ceda(&["simulate", "--example", "ex9"]);
    assert_ne!(bad.status.code(), Some(0));
}
