use crate::error::{CedaError, Result};
use crate::tabulate::{index_tuples, CategoricalSeries};

/// One category per occupied tuple of the input series, ranked
/// lexicographically. Names join the component names with `_`.
pub fn product_categories(series_list: &[&CategoricalSeries]) -> Result<CategoricalSeries> {
    if series_list.is_empty() {
        return Err(CedaError::EmptyInput);
    }
    let index = index_tuples(series_list)?;
    let names = index
        .keys
        .iter()
        .map(|k| {
            k.iter()
                .zip(series_list)
                .map(|(&c, s)| s.category_name(c))
                .collect::<Vec<_>>()
                .join("_")
        })
        .collect();
    CategoricalSeries::new(index.row_of, index.keys.len() as u32)?.with_names(names)
}
