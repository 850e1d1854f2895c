//! CSV ingestion and per-column categorization.

use std::path::Path;

use ceda::{
    fuse_features, product_categories, CategoricalSeries, Categorizer, Column, Dataset,
    PointMatrix, SeedStream,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Reads the response and covariate columns named in `config`.
///
/// Columns whose directive is `passthrough` keep their tokens as labels; all
/// others must parse as finite decimals. Errors name the 1-based data row and
/// the column.
pub fn ingest_csv(path: &Path, config: &RunConfig) -> CliResult<Dataset<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();

    let named = config
        .response
        .iter()
        .chain(&config.covariates)
        .chain(&config.noise_features);
    for name in named {
        if !header.contains(name) {
            return Err(CliError::Config(format!(
                "column \"{name}\" not found in {}",
                path.display()
            )));
        }
    }
    let wanted: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            config.response.contains(h)
                || config.covariates.is_empty()
                || config.covariates.contains(h)
        })
        .map(|(i, _)| i)
        .collect();

    let mut tokens: Vec<Vec<String>> = vec![Vec::new(); wanted.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("row {}: {e}", row + 1)))?;
        for (slot, &i) in wanted.iter().enumerate() {
            tokens[slot].push(record[i].trim().to_owned());
        }
    }
    if tokens.first().is_none_or(Vec::is_empty) {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }

    let mut dataset = Dataset::new();
    for (slot, &i) in wanted.iter().enumerate() {
        let name = &header[i];
        let column = if config.is_categorical(name) {
            Column::Categorical(CategoricalSeries::from_tokens(&tokens[slot])?)
        } else {
            let values = tokens[slot]
                .iter()
                .enumerate()
                .map(|(row, t)| match t.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(CliError::Data(format!(
                        "row {}, column \"{name}\": cannot parse `{t}` as a number",
                        row + 1
                    ))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            Column::Numeric(values)
        };
        dataset.push(name.clone(), column)?;
    }
    let responses: Vec<&str> = config.response.iter().map(String::as_str).collect();
    if !responses.is_empty() {
        dataset.set_responses(&responses)?;
    }
    Ok(dataset)
}

fn column_seed(config: &RunConfig, name: &str) -> u64 {
    SeedStream::new(config.seed)
        .child_str("categorize")
        .child_str(name)
        .key()
}

pub fn categorize_column(
    dataset: &Dataset<f64>,
    name: &str,
    config: &RunConfig,
) -> CliResult<CategoricalSeries> {
    Ok(dataset.categorize(name, &config.directive(name), column_seed(config, name))?)
}

/// One categorical response. Several response columns are fused jointly by
/// K-means when the response directive is `kmeans`, otherwise as the product
/// of their individual categories.
pub fn response_series(dataset: &Dataset<f64>, config: &RunConfig) -> CliResult<CategoricalSeries> {
    let names = dataset.responses();
    if names.is_empty() {
        return Err(CliError::Config(
            "at least one response column is required".into(),
        ));
    }
    if let [single] = names {
        return categorize_column(dataset, single, config);
    }
    match config.directive(&names[0]) {
        Categorizer::KMeans { k } => {
            let cols = names
                .iter()
                .map(|n| dataset.numeric(n))
                .collect::<ceda::Result<Vec<_>>>()?;
            let pts = PointMatrix::from_columns(&cols)?;
            Ok(fuse_features(&pts, k, column_seed(config, "response"))?)
        }
        _ => {
            let parts = names
                .iter()
                .map(|n| categorize_column(dataset, n, config))
                .collect::<CliResult<Vec<_>>>()?;
            let refs: Vec<&CategoricalSeries> = parts.iter().collect();
            Ok(product_categories(&refs)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn csv(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn config(response: &[&str]) -> RunConfig {
        RunConfig {
            response: response.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn toy_csv() {
        let f = csv("Y,V1\n0.5,a\n1.5,b\n2.5,a\n");
        let mut c = config(&["Y"]);
        c.categorize
            .columns
            .insert("V1".into(), Categorizer::Passthrough);
        let d = ingest_csv(f.path(), &c).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.names().count(), 2);
        assert_eq!(d.numeric("Y").unwrap(), &[0.5, 1.5, 2.5]);
        assert!(matches!(d.column("V1").unwrap(), Column::Categorical(s) if s.cardinality() == 2));
    }

    #[test]
    fn bad_token_names_row_and_column() {
        let mut text = String::from("Y,X1,X2\n");
        for i in 0..20 {
            let x2 = if i == 16 {
                "abc".to_string()
            } else {
                i.to_string()
            };
            text.push_str(&format!("{i},{i},{x2}\n"));
        }
        let f = csv(&text);
        let err = ingest_csv(f.path(), &config(&["Y"])).unwrap_err();
        assert!(matches!(err, CliError::Data(_)));
        let msg = err.to_string();
        assert!(msg.contains("row 17, column \"X2\""), "{msg}");
    }

    #[test]
    fn ragged_rows_rejected() {
        let f = csv("Y,X\n1,2\n3\n");
        assert!(matches!(
            ingest_csv(f.path(), &config(&["Y"])),
            Err(CliError::Data(_))
        ));
    }

    #[test]
    fn missing_column_is_config_error() {
        let f = csv("Y,X\n1,2\n");
        let mut c = config(&["Y"]);
        c.covariates = vec!["Z".into()];
        assert!(matches!(ingest_csv(f.path(), &c), Err(CliError::Config(_))));
    }

    #[test]
    fn product_response_fusion() {
        let f = csv("Y1,Y2,X\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n0,0,5\n");
        let mut c = config(&["Y1", "Y2"]);
        c.categorize.response = Some(Categorizer::Passthrough);
        let d = ingest_csv(f.path(), &c).unwrap();
        let y = response_series(&d, &c).unwrap();
        assert_eq!(y.occupied(), 4);
        assert_eq!(d.covariate_names(), vec!["X".to_string()]);
    }
}
