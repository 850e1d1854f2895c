//! Published figures that no criterion covers on its own.

use ceda::genlab::{sample, theoretical_ex1, ExampleId, GeneratorSpec};
use ceda::{
    conditional_entropy, crosstab, fuse_features, CategoricalSeries, Categorizer, Dataset,
    PointMatrix, SeedStream,
};

use crate::Outcome;

fn fuse(d: &Dataset<f64>, names: &[&str], k: usize, seed: u64) -> CategoricalSeries {
    let cols: Vec<&[f64]> = names.iter().map(|n| d.numeric(n).unwrap()).collect();
    fuse_features(&PointMatrix::from_columns(&cols).unwrap(), k, seed).unwrap()
}

/// Mixture information of the two-population example by quadrature.
pub fn mixture_information() -> Outcome {
    let (h, c, i) = theoretical_ex1();
    Outcome::new(
        "R1",
        "Two-normal mixture information",
        (i - 0.1132).abs() <= 5e-4,
        format!("H[Y]={h:.5}, H[Y|V1]={c:.5}, I={i:.5} vs 0.1132 +/- 0.0005"),
    )
}

/// Fused `X234` against a 12-cluster response at N=1000, k=12.
pub fn example5_fused_entropy() -> Outcome {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex5, 1000, 1)).unwrap();
    let stream = SeedStream::new(1).child_str("example5");
    let y = fuse(&d, &["Y"], 12, stream.child_str("Y").key());
    let x = fuse(
        &d,
        &["X2", "X3", "X4"],
        12,
        stream.child_str("X234").child(12).key(),
    );
    let ce = conditional_entropy::<f64>(&crosstab(&[&x], &y).unwrap());
    Outcome::new(
        "R2",
        "Example-5 fused entropy at k=12",
        (ce - 2.345).abs() <= 0.03,
        format!("H[Y|X234]={ce:.4} vs 2.345 +/- 0.03"),
    )
}

/// Fused `X123` against the 22-bin response at N=1e5.
pub fn example6_fused_entropy() -> Outcome {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex6, 100_000, 1)).unwrap();
    let y = d.categorize("Y", &Categorizer::quantile(20), 0).unwrap();
    let key = SeedStream::new(1)
        .child_str("example6")
        .child_str("X1_X2_X3")
        .key();
    let x = fuse(&d, &["X1", "X2", "X3"], 22, key);
    let ce = conditional_entropy::<f64>(&crosstab(&[&x], &y).unwrap());
    Outcome::new(
        "R3",
        "Example-6 fused entropy of X1..X3",
        (ce - 1.93).abs() <= 0.05,
        format!("H[Y|X123]={ce:.4} vs 1.93 +/- 0.05"),
    )
}
