//! Subcommand bodies. Each returns the report text; the caller writes it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ceda::genlab::{sample, ExampleId, GeneratorSpec};
use ceda::protocol::subset_label;
use ceda::{
    apply_bins, build_ledger, c1_test, crosstab, kmeans_fit, null_band, quantile_bins,
    select_major_factors, BinningScheme, CategoricalSeries, Categorizer, Column, Dataset,
    EntropyReport, KMeansConfig, KMeansModel, NoisePool, PointMatrix, SeedStream, Statistic,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::ingest::{categorize_column, response_series};

fn header(command: &str, config: &RunConfig) -> String {
    format!(
        "# ceda {command} config_digest={} seed={}\n",
        config.digest(),
        config.seed
    )
}

fn envelope(command: &str, config: &RunConfig, body: serde_json::Value) -> CliResult<String> {
    let mut doc = json!({
        "command": command,
        "config_digest": config.digest(),
        "seed": config.seed,
    });
    if let (Some(d), serde_json::Value::Object(b)) = (doc.as_object_mut(), body) {
        d.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

fn requested_subsets(dataset: &Dataset<f64>, config: &RunConfig) -> Vec<Vec<String>> {
    if config.subsets.is_empty() {
        dataset
            .covariate_names()
            .into_iter()
            .map(|c| vec![c])
            .collect()
    } else {
        config.subsets.clone()
    }
}

fn subset_series(
    dataset: &Dataset<f64>,
    config: &RunConfig,
    subsets: &[Vec<String>],
) -> CliResult<BTreeMap<String, CategoricalSeries>> {
    let mut out = BTreeMap::new();
    for name in subsets.iter().flatten() {
        if dataset.responses().contains(name) {
            return Err(CliError::Config(format!(
                "subset member \"{name}\" is a response column"
            )));
        }
        if !out.contains_key(name) {
            out.insert(name.clone(), categorize_column(dataset, name, config)?);
        }
    }
    Ok(out)
}

fn table_for(
    series: &BTreeMap<String, CategoricalSeries>,
    subset: &[String],
    y: &CategoricalSeries,
) -> CliResult<ceda::ContingencyTable> {
    let refs: Vec<&CategoricalSeries> = subset.iter().map(|n| &series[n]).collect();
    Ok(crosstab(&refs, y)?)
}

pub fn measure(dataset: &Dataset<f64>, config: &RunConfig) -> CliResult<String> {
    let y = response_series(dataset, config)?;
    let subsets = requested_subsets(dataset, config);
    let series = subset_series(dataset, config, &subsets)?;
    let mut reports = Vec::new();
    for s in &subsets {
        let table = table_for(&series, s, &y)?;
        reports.push((subset_label(s), EntropyReport::<f64>::from_table(&table)));
    }
    match config.format {
        Format::Json => envelope(
            "measure",
            config,
            json!({ "reports": reports.iter().map(|(s, r)| json!({ "subset": s, "report": r })).collect::<Vec<_>>() }),
        ),
        Format::Tsv => {
            let mut out = header("measure", config);
            out.push_str("subset\tN\trows\tcols\tavg_cell\tH_Y\tH_Y_given_A\tMI\n");
            for (s, r) in &reports {
                let _ = writeln!(
                    out,
                    "{s}\t{}\t{}\t{}\t{:.3}\t{:.6}\t{:.6}\t{:.6}",
                    r.total, r.rows, r.cols, r.avg_cell_count, r.h_y, r.h_y_given_a, r.mi
                );
            }
            Ok(out)
        }
    }
}

pub fn null(dataset: &Dataset<f64>, config: &RunConfig) -> CliResult<String> {
    let y = response_series(dataset, config)?;
    let subsets = requested_subsets(dataset, config);
    let series = subset_series(dataset, config, &subsets)?;
    let root = SeedStream::new(config.seed).child_str("null");
    let mut rows = Vec::new();
    for s in &subsets {
        let label = subset_label(s);
        log::info!(
            "null band for {label} with {} replicates",
            config.replicates
        );
        let table = table_for(&series, s, &y)?;
        let report = EntropyReport::<f64>::from_table(&table);
        let band = null_band::<f64>(
            &table,
            Statistic::MutualInformation,
            config.replicates,
            root.child_str(&label),
        )?;
        let verdict = c1_test(report.mi, &band);
        rows.push((label, report, verdict));
    }
    match config.format {
        Format::Json => envelope(
            "null",
            config,
            json!({ "subsets": rows.iter().map(|(s, r, v)| json!({ "subset": s, "report": r, "verdict": v })).collect::<Vec<_>>() }),
        ),
        Format::Tsv => {
            let mut out = header("null", config);
            out.push_str(
                "subset\tN\trows\tcols\tMI\tB\tmean\tsd\tq025\tq975\tc1_status\texcess_sd\n",
            );
            for (s, r, v) in &rows {
                let b = &v.band;
                let _ = writeln!(
                    out,
                    "{s}\t{}\t{}\t{}\t{:.6}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{:.2}",
                    r.total,
                    r.rows,
                    r.cols,
                    r.mi,
                    b.replicates,
                    b.mean,
                    b.sd,
                    b.q025,
                    b.q975,
                    v.status.as_str(),
                    v.excess_sd
                );
            }
            Ok(out)
        }
    }
}

pub fn grid(dataset: &Dataset<f64>, config: &RunConfig) -> CliResult<String> {
    let [response] = dataset.responses() else {
        return Err(CliError::Config(
            "grid needs exactly one response column".into(),
        ));
    };
    let covariates = dataset.covariate_names();
    let [covariate] = covariates.as_slice() else {
        return Err(CliError::Config(
            "grid needs exactly one covariate column".into(),
        ));
    };
    let y = dataset.numeric(response)?;
    let x = dataset.numeric(covariate)?;
    log::info!(
        "grid {}x{} cells with {} replicates each",
        config.y_ladder.len(),
        config.x_ladder.len(),
        config.replicates
    );
    let cells = ceda::mi_grid(
        y,
        x,
        &config.y_ladder,
        &config.x_ladder,
        config.replicates,
        config.seed,
    )?;
    match config.format {
        Format::Json => envelope(
            "grid",
            config,
            json!({ "response": response, "covariate": covariate, "cells": cells }),
        ),
        Format::Tsv => {
            let mut out = header("grid", config);
            out.push_str(
                "k_y\tk_x\tN\tavg_cell\tH_Y\tH_Y_given_X\tMI\tq025\tq975\tc1_status\texcess_sd\n",
            );
            for c in &cells {
                let r = &c.report;
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{:.3}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{:.2}",
                    c.k_y,
                    c.k_x,
                    r.total,
                    r.avg_cell_count,
                    r.h_y,
                    r.h_y_given_a,
                    r.mi,
                    c.verdict.band.q025,
                    c.verdict.band.q975,
                    c.verdict.status.as_str(),
                    c.verdict.excess_sd
                );
            }
            Ok(out)
        }
    }
}

pub fn select(dataset: &Dataset<f64>, config: &RunConfig) -> CliResult<String> {
    let y = response_series(dataset, config)?;
    let names = dataset.covariate_names();
    if let Some(f) = config.noise_features.iter().find(|f| !names.contains(f)) {
        return Err(CliError::Config(format!(
            "noise feature \"{f}\" is not a covariate"
        )));
    }
    let covariates = names
        .iter()
        .map(|n| Ok((n.clone(), categorize_column(dataset, n, config)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let masses = config
        .categorize
        .default
        .nominal_masses()
        .unwrap_or_else(|| {
            let k = covariates
                .iter()
                .map(|(_, s)| s.cardinality())
                .max()
                .unwrap_or(2)
                .max(2) as usize;
            vec![1.0 / k as f64; k]
        });
    let pool = NoisePool::synthetic(
        dataset.len(),
        masses,
        config.noise_replicates,
        SeedStream::new(config.seed).child_str("noise"),
    )?;
    log::info!(
        "building ledger over {} covariates up to order {}",
        names.len(),
        config.max_order
    );
    let ledger = build_ledger(&covariates, &y, &pool, &config.ledger_config())?;
    log::info!(
        "ledger holds {} subsets; selecting major factors",
        ledger.entries.len()
    );
    let report = select_major_factors(&ledger, Some(dataset))?;

    match config.format {
        Format::Json => envelope(
            "select",
            config,
            json!({ "ledger": ledger, "report": report }),
        ),
        Format::Tsv => {
            let mut out = header("select", config);
            out.push_str(&ledger.to_tsv());
            out.push_str("\nsubset\tclassification\tce_drop\tsce_star_drop\n");
            for c in &report.confirmed {
                let gain = c
                    .sce_star_drop
                    .map_or("NA".to_string(), |g| format!("{g:.6}"));
                let _ = writeln!(
                    out,
                    "{}\t{}\t{:.6}\t{gain}",
                    subset_label(&c.subset),
                    c.classification.as_str(),
                    c.ce_drop
                );
            }
            out.push_str("\npair\trelation\tcoexistence_ratio\tinteraction_ratio\n");
            let ratio = |r: Option<f64>| r.map_or("NA".to_string(), |v| format!("{v:.4}"));
            for r in &report.relations {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    subset_label(&r.pair),
                    r.classification.as_str(),
                    ratio(r.coexistence_ratio),
                    ratio(r.interaction_ratio)
                );
            }
            out.push_str("\nrole\tfeatures\tmembers\tscore\tcriterion\n");
            let collections = report
                .chief
                .iter()
                .map(|c| ("chief", c))
                .chain(report.alternatives.iter().map(|c| ("alternative", c)));
            for (role, c) in collections {
                let members: Vec<String> = c.members.iter().map(|m| subset_label(m)).collect();
                let criterion = serde_json::to_value(c.criterion)?;
                let _ = writeln!(
                    out,
                    "{role}\t{}\t{}\t{:.6}\t{}",
                    subset_label(&c.features),
                    members.join(" "),
                    c.score,
                    criterion.as_str().unwrap_or_default()
                );
            }
            Ok(out)
        }
    }
}

/// Writes a simulated dataset as CSV with a header row.
pub fn simulate(example: ExampleId, n: Option<usize>, config: &RunConfig) -> CliResult<String> {
    let spec = GeneratorSpec::new(
        example,
        n.unwrap_or_else(|| example.default_n()),
        config.seed,
    )
    .with_params(config.generator);
    spec.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let data = sample::<f64>(&spec)?;
    let names: Vec<&str> = data.names().collect();
    let columns = names
        .iter()
        .map(|n| data.column(n))
        .collect::<ceda::Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&names)
        .map_err(|e| CliError::Data(e.to_string()))?;
    for i in 0..data.len() {
        let row = columns.iter().map(|c| match c {
            Column::Numeric(v) => v[i].to_string(),
            Column::Categorical(s) => s.category_name(s.labels()[i]),
        });
        w.write_record(row)
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Data(e.to_string()))
}

/// A fitted categorization for one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Quantile(BinningScheme<f64>),
    Kmeans(KMeansModel<f64>),
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScheme {
    pub column: String,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub config_digest: String,
    pub seed: u64,
    pub schemes: Vec<ColumnScheme>,
}

/// Fits one scheme per loaded column.
pub fn bins_emit(dataset: &Dataset<f64>, config: &RunConfig) -> CliResult<String> {
    let mut schemes = Vec::new();
    for name in dataset.names() {
        let scheme = match dataset.column(name)? {
            Column::Categorical(s) => Scheme::Categorical {
                levels: (0..s.cardinality()).map(|c| s.category_name(c)).collect(),
            },
            Column::Numeric(v) => match config.directive(name) {
                Categorizer::Quantile { k, low, high } => {
                    Scheme::Quantile(quantile_bins(v, k, low, high)?)
                }
                Categorizer::KMeans { k } => {
                    let seed = SeedStream::new(config.seed)
                        .child_str("categorize")
                        .child_str(name)
                        .key();
                    let pts = PointMatrix::new(v.clone(), v.len(), 1)?;
                    Scheme::Kmeans(kmeans_fit(&pts, &KMeansConfig::new(k, seed))?)
                }
                Categorizer::Passthrough => {
                    unreachable!("passthrough columns are ingested as categorical")
                }
            },
        };
        schemes.push(ColumnScheme {
            column: name.to_owned(),
            scheme,
        });
    }
    let file = SchemeFile {
        config_digest: config.digest(),
        seed: config.seed,
        schemes,
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

/// Applies stored schemes and writes the category labels as CSV.
pub fn bins_replay(dataset: &Dataset<f64>, file: &SchemeFile) -> CliResult<String> {
    let mut columns = Vec::new();
    for cs in &file.schemes {
        let labels: Vec<String> = match (&cs.scheme, dataset.column(&cs.column)?) {
            (Scheme::Quantile(b), Column::Numeric(v)) => apply_bins(v, b)?
                .labels()
                .iter()
                .map(u32::to_string)
                .collect(),
            (Scheme::Kmeans(m), Column::Numeric(v)) => {
                let pts = PointMatrix::new(v.clone(), v.len(), 1)?;
                m.assign(&pts)?
                    .labels()
                    .iter()
                    .map(u32::to_string)
                    .collect()
            }
            (Scheme::Categorical { levels }, Column::Categorical(s)) => s
                .labels()
                .iter()
                .map(|&l| {
                    let name = s.category_name(l);
                    levels
                        .iter()
                        .position(|x| *x == name)
                        .map(|p| p.to_string())
                        .ok_or_else(|| {
                            CliError::Data(format!(
                                "column \"{}\": unseen level `{name}`",
                                cs.column
                            ))
                        })
                })
                .collect::<CliResult<_>>()?,
            _ => {
                return Err(CliError::Config(format!(
                    "scheme for column \"{}\" does not match its type",
                    cs.column
                )))
            }
        };
        columns.push(labels);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(file.schemes.iter().map(|s| s.column.as_str()))
        .map_err(csv_err)?;
    for i in 0..dataset.len() {
        w.write_record(columns.iter().map(|c| c[i].as_str()))
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Data(e.to_string()))
}
