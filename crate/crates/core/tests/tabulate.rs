use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use ceda::genlab::{sample, ExampleId, GeneratorSpec};
use ceda::tabulate::{joint_entropy, row_margin_entropy};
use ceda::{
    apply_bins, column_margin_entropy, conditional_entropy, crosstab, mutual_information,
    per_column_row_entropy, quantile_bins, CategoricalSeries, Column, ContingencyTable,
    EntropyReport,
};
use proptest::prelude::*;
use statrs::distribution::{Categorical, ContinuousCDF, Normal};
use statrs::statistics::Distribution;

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Plug-in entropy straight from probabilities.
fn plug_in(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    -counts
        .iter()
        .map(|&c| xlogx(c as f64 / n as f64))
        .sum::<f64>()
}

fn table_strategy(
    max_rows: usize,
    max_cols: usize,
) -> impl Strategy<Value = (usize, usize, Vec<u64>)> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(0u64..40, r * c).prop_map(move |mut v| {
            for row in 0..r {
                if v[row * c..(row + 1) * c].iter().all(|&x| x == 0) {
                    v[row * c] = 1;
                }
            }
            (r, c, v)
        })
    })
}

fn build(r: usize, c: usize, counts: Vec<u64>) -> ContingencyTable {
    ContingencyTable::from_counts(counts, r, c).unwrap()
}

#[test]
fn margin_entropy_matches_categorical_distribution() {
    let counts = [3u64, 7, 0, 12, 5];
    let t = build(1, 5, counts.to_vec());
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let oracle = Categorical::new(&probs).unwrap().entropy().unwrap();
    assert_abs_diff_eq!(column_margin_entropy::<f64>(&t), oracle, epsilon = 1e-12);
}

#[test]
fn small_examples() {
    let t = crosstab(
        &[&CategoricalSeries::from_labels(vec![0, 0, 1, 1]).unwrap()],
        &CategoricalSeries::from_labels(vec![0, 1, 0, 1]).unwrap(),
    )
    .unwrap();
    assert_eq!(t.counts(), &[1, 1, 1, 1]);
    assert_eq!(t.total(), 4);

    let t = crosstab(
        &[&CategoricalSeries::from_labels(vec![0, 0, 0]).unwrap()],
        &CategoricalSeries::from_labels(vec![0, 0, 0]).unwrap(),
    )
    .unwrap();
    assert_eq!((t.rows(), t.cols(), t.counts()), (1, 1, &[3u64][..]));

    let t = ContingencyTable::from_rows(&[&[5, 5], &[5, 5]]).unwrap();
    assert_abs_diff_eq!(conditional_entropy::<f64>(&t), 2f64.ln(), epsilon = 1e-15);
    assert_eq!(mutual_information::<f64>(&t), 0.0);
    let t = ContingencyTable::from_rows(&[&[10, 0], &[0, 10]]).unwrap();
    assert_eq!(conditional_entropy::<f64>(&t), 0.0);

    let t = ContingencyTable::from_rows(&[&[1, 4], &[1, 0]]).unwrap();
    let per = per_column_row_entropy::<f64>(&t);
    assert_abs_diff_eq!(per[0].1, 2f64.ln(), epsilon = 1e-15);
    assert_eq!(per[1].1, 0.0);
}

/// Example-1 sample: binned Y, the table's column sums equal a single-pass
/// tally, and the entropies sit near the published values.
#[test]
fn example1_table_and_entropies() {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex1, 20_000, 11)).unwrap();
    let y = d.numeric("Y").unwrap();
    let scheme = quantile_bins(y, 10, 0.05, 0.95).unwrap();
    let ys = apply_bins(y, &scheme).unwrap();
    let Column::Categorical(v) = d.column("V1").unwrap() else {
        panic!("V1 must be categorical")
    };
    let t = crosstab(&[v], &ys).unwrap();
    assert_eq!((t.rows(), t.cols()), (2, 12));

    let mut tally = vec![0u64; 12];
    for &val in y {
        let bin = scheme.edges.iter().filter(|&&e| e < val).count();
        tally[bin] += 1;
    }
    assert_eq!(t.col_sums(), tally);

    let r = EntropyReport::<f64>::from_table(&t);
    assert!((r.h_y - 2.4135).abs() < 0.02, "H[Y] = {}", r.h_y);
    assert!(
        (r.h_y_given_a - 2.3011).abs() < 0.02,
        "H[Y|V1] = {}",
        r.h_y_given_a
    );
    assert!((r.mi - 0.1124).abs() < 0.01, "I = {}", r.mi);
}

/// Per-bin mixing entropy tracks the analytic posterior of the population label.
#[test]
fn example1_column_mixing_follows_posterior() {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex1, 20_000, 3)).unwrap();
    let y = d.numeric("Y").unwrap();
    let scheme = quantile_bins(y, 10, 0.05, 0.95).unwrap();
    let ys = apply_bins(y, &scheme).unwrap();
    let Column::Categorical(v) = d.column("V1").unwrap() else {
        panic!("V1 must be categorical")
    };
    let t = crosstab(&[v], &ys).unwrap();
    let per = per_column_row_entropy::<f64>(&t);

    // Posterior P(V1 = 1 | bin) from the normal CDFs, mapped to a binary entropy.
    let n0 = Normal::new(0.0, 1.0).unwrap();
    let n1 = Normal::new(1.0, 1.0).unwrap();
    let mut bounds = vec![f64::NEG_INFINITY];
    bounds.extend(&scheme.edges);
    bounds.push(f64::INFINITY);
    for (c, h) in per {
        let (a, b) = (bounds[c], bounds[c + 1]);
        let p0 = n0.cdf(b) - n0.cdf(a);
        let p1 = n1.cdf(b) - n1.cdf(a);
        let q = p1 / (p0 + p1);
        let oracle = -(xlogx(q) + xlogx(1.0 - q));
        assert!((h - oracle).abs() < 0.05, "bin {c}: {h} vs {oracle}");
    }
}

#[test]
fn crosstab_matches_map_tally() {
    let a = CategoricalSeries::from_labels(vec![2, 0, 1, 2, 2, 0, 1, 1, 0, 2]).unwrap();
    let b = CategoricalSeries::from_labels(vec![1, 1, 0, 0, 1, 1, 1, 0, 0, 1]).unwrap();
    let y = CategoricalSeries::new(vec![0, 1, 2, 0, 1, 2, 0, 1, 2, 0], 4).unwrap();
    let t = crosstab(&[&a, &b], &y).unwrap();
    let mut tally: BTreeMap<(u32, u32), Vec<u64>> = BTreeMap::new();
    for i in 0..10 {
        tally
            .entry((a.labels()[i], b.labels()[i]))
            .or_insert_with(|| vec![0; 4])[y.labels()[i] as usize] += 1;
    }
    assert_eq!(t.rows(), tally.len());
    assert_eq!(t.cols(), 4);
    for (r, (key, counts)) in tally.iter().enumerate() {
        assert_eq!(t.row_keys()[r], vec![key.0, key.1]);
        assert_eq!(t.row(r), counts.as_slice());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Refining rows never raises the conditional entropy.
    #[test]
    fn refinement_never_raises_ce((r, c, counts) in table_strategy(8, 6), merge in proptest::collection::vec(0usize..3, 8)) {
        let fine = build(r, c, counts.clone());
        let groups = 3.min(r);
        let mut coarse = vec![0u64; groups * c];
        for row in 0..r {
            let g = merge[row] % groups;
            for col in 0..c {
                coarse[g * c + col] += counts[row * c + col];
            }
        }
        let coarse: Vec<u64> = coarse.chunks(c).filter(|row| row.iter().any(|&x| x > 0)).flatten().copied().collect();
        let coarse = build(coarse.len() / c, c, coarse);
        prop_assert!(conditional_entropy::<f64>(&fine) <= conditional_entropy::<f64>(&coarse) + 1e-12);
        prop_assert!(mutual_information::<f64>(&fine) + 1e-12 >= mutual_information::<f64>(&coarse));
    }

    #[test]
    fn mi_joint_representation((r, c, counts) in table_strategy(10, 10)) {
        let t = build(r, c, counts.clone());
        let rows: Vec<u64> = counts.chunks(c).map(|x| x.iter().sum()).collect();
        let cols: Vec<u64> = (0..c).map(|j| (0..r).map(|i| counts[i * c + j]).sum()).collect();
        let direct = plug_in(&cols) + plug_in(&rows) - plug_in(&counts);
        let mi = mutual_information::<f64>(&t);
        prop_assert!((mi - direct.max(0.0)).abs() < 1e-10, "{} vs {}", mi, direct);
        let tt = t.transpose();
        prop_assert!((mutual_information::<f64>(&tt) - mi).abs() < 1e-10);
        prop_assert!((joint_entropy::<f64>(&t) - plug_in(&counts)).abs() < 1e-10);
        prop_assert!((row_margin_entropy::<f64>(&t) - plug_in(&rows)).abs() < 1e-10);
    }

    #[test]
    fn entropies_bounded_and_non_negative((r, c, counts) in table_strategy(10, 10)) {
        let t = build(r, c, counts);
        let rep = EntropyReport::<f64>::from_table(&t);
        prop_assert!(rep.h_y.is_finite() && rep.h_y_given_a.is_finite() && rep.mi.is_finite());
        prop_assert!(rep.h_y_given_a >= 0.0);
        prop_assert!(rep.mi >= 0.0);
        prop_assert!(rep.h_y_given_a <= rep.h_y);
        prop_assert!(rep.h_y <= (c as f64).ln() + 1e-12);
        prop_assert_eq!(rep.mi, rep.h_y - rep.h_y_given_a);
    }

    #[test]
    fn merging_two_rows_never_raises_mi((r, c, counts) in table_strategy(8, 6), pick in (0usize..8, 0usize..8)) {
        prop_assume!(r >= 2);
        let (a, b) = (pick.0 % r, pick.1 % r);
        prop_assume!(a != b);
        let t = build(r, c, counts.clone());
        let mut merged = Vec::new();
        for row in 0..r {
            if row == b {
                continue;
            }
            let mut v = counts[row * c..(row + 1) * c].to_vec();
            if row == a {
                for (x, y) in v.iter_mut().zip(&counts[b * c..(b + 1) * c]) {
                    *x += y;
                }
            }
            merged.extend(v);
        }
        let m = build(r - 1, c, merged);
        prop_assert!(mutual_information::<f64>(&m) <= mutual_information::<f64>(&t) + 1e-12);
    }

    #[test]
    fn f32_tracks_f64((r, c, counts) in table_strategy(10, 10)) {
        let t = build(r, c, counts);
        let a = EntropyReport::<f64>::from_table(&t);
        let b = EntropyReport::<f32>::from_table(&t);
        prop_assert!((a.h_y - f64::from(b.h_y)).abs() < 1e-4);
        prop_assert!((a.h_y_given_a - f64::from(b.h_y_given_a)).abs() < 1e-4);
        prop_assert!((a.mi - f64::from(b.mi)).abs() < 1e-4);
    }

    #[test]
    fn table_invariants(labels in proptest::collection::vec((0u32..5, 0u32..3, 0u32..4), 1..200)) {
        let a = CategoricalSeries::new(labels.iter().map(|l| l.0).collect(), 5).unwrap();
        let b = CategoricalSeries::new(labels.iter().map(|l| l.1).collect(), 3).unwrap();
        let y = CategoricalSeries::new(labels.iter().map(|l| l.2).collect(), 4).unwrap();
        let t = crosstab(&[&a, &b], &y).unwrap();
        prop_assert_eq!(t.total(), labels.len() as u64);
        prop_assert_eq!(t.counts().iter().sum::<u64>(), t.total());
        prop_assert_eq!(t.cols(), 4);
        prop_assert!(t.row_sums().iter().all(|&s| s > 0));
        prop_assert_eq!(t.col_sums().iter().sum::<u64>(), t.total());
        // Refining by a second feature never raises H[Y|A].
        let ta = crosstab(&[&a], &y).unwrap();
        prop_assert!(conditional_entropy::<f64>(&t) <= conditional_entropy::<f64>(&ta) + 1e-12);
    }
}
