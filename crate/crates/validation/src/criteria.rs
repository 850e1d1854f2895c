//! One study per acceptance criterion.

use ceda::genlab::{
    compound_symmetry, gaussian_entropy, sample, ExampleId, GeneratorParams, GeneratorSpec,
};
use ceda::{
    build_ledger, c1_test, column_margin_entropy, conditional_entropy, crosstab, fuse_features,
    mi_grid, mimic_table, mutual_information, null_band, select_major_factors, C1Status,
    CategoricalSeries, Categorizer, Classification, Column, ContingencyTable, Dataset, Ledger,
    LedgerConfig, NoisePool, PointMatrix, SeedStream, Statistic,
};
use rand::Rng;

use crate::Outcome;

const LADDER: [usize; 4] = [12, 22, 32, 102];

fn population(d: &Dataset<f64>) -> &CategoricalSeries {
    match d.column("V1") {
        Ok(Column::Categorical(s)) => s,
        _ => panic!("generated data carries a categorical V1"),
    }
}

fn fuse(d: &Dataset<f64>, names: &[&str], k: usize, seed: u64) -> CategoricalSeries {
    let cols: Vec<&[f64]> = names.iter().map(|n| d.numeric(n).unwrap()).collect();
    fuse_features(&PointMatrix::from_columns(&cols).unwrap(), k, seed).unwrap()
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Categorizes the response and every covariate with one quantile ladder.
fn categorized(
    d: &Dataset<f64>,
    k: usize,
) -> (CategoricalSeries, Vec<(String, CategoricalSeries)>) {
    let cat = Categorizer::quantile(k);
    let y = d.categorize("Y", &cat, 0).unwrap();
    let covs = d
        .covariate_names()
        .into_iter()
        .map(|n| {
            let s = d.categorize(&n, &cat, 0).unwrap();
            (n, s)
        })
        .collect();
    (y, covs)
}

fn ledger(d: &Dataset<f64>, k: usize, seed: u64, max_order: usize, noise: &[&str]) -> Ledger<f64> {
    let (y, covs) = categorized(d, k);
    let masses = Categorizer::quantile(k).nominal_masses().unwrap();
    let pool = NoisePool::synthetic(
        d.len(),
        masses,
        100,
        SeedStream::new(seed).child_str("noise"),
    )
    .unwrap();
    let cfg = LedgerConfig::<f64> {
        max_order,
        seed,
        noise_features: noise.iter().map(|s| (*s).to_owned()).collect(),
        ..Default::default()
    };
    build_ledger(&covs, &y, &pool, &cfg).unwrap()
}

/// Gaussian differential entropies against their published values.
pub fn gaussian_oracle() -> Outcome {
    let cases = [
        (compound_symmetry(1, 0.0), 1.4189),
        (compound_symmetry(4, 0.5), 5.0942),
        (compound_symmetry(4, 0.7), 4.4355),
    ];
    let values: Vec<f64> = cases
        .iter()
        .map(|(m, _)| gaussian_entropy(m).unwrap())
        .collect();
    let passed = values
        .iter()
        .zip(&cases)
        .all(|(v, (_, want))| (v - want).abs() < 5e-4);
    Outcome::new(
        "1",
        "Gaussian entropy oracle",
        passed,
        format!("{} vs [1.4189, 5.0942, 4.4355]", fmt_list(&values)),
    )
}

/// Example-1 over seeds 1..20 at three bin counts.
pub fn example1_reproduction() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for k in [10, 20, 30] {
        let mut mis = Vec::new();
        let mut confirmed = 0;
        for seed in 1..=20u64 {
            let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex1, 20_000, seed)).unwrap();
            let y = d.categorize("Y", &Categorizer::quantile(k), 0).unwrap();
            let t = crosstab(&[population(&d)], &y).unwrap();
            let mi = mutual_information::<f64>(&t);
            let stream = SeedStream::new(seed).child_str("example1").child(k as u64);
            let band = null_band::<f64>(&t, Statistic::MutualInformation, 1000, stream).unwrap();
            if c1_test(mi, &band).status == C1Status::Confirmed {
                confirmed += 1;
            }
            mis.push(mi);
        }
        let mean = mis.iter().sum::<f64>() / mis.len() as f64;
        passed &= (mean - 0.113).abs() <= 0.01 && confirmed == 20;
        parts.push(format!("K={k}: mean I {mean:.4}, confirmed {confirmed}/20"));
    }
    Outcome::new("2", "Example-1 reproduction", passed, parts.join("; "))
}

/// Growth of the binned response entropy when interior bins double and triple.
pub fn scale_relation() -> Outcome {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex1, 20_000, 1)).unwrap();
    let h = |k: usize| {
        let y = d.categorize("Y", &Categorizer::quantile(k), 0).unwrap();
        column_margin_entropy::<f64>(&crosstab(&[population(&d)], &y).unwrap())
    };
    let (h10, h20, h30) = (h(10), h(20), h(30));
    let gap2 = h20 - h10 - 2f64.ln();
    let gap3 = h30 - h10 - 3f64.ln();
    Outcome::new(
        "3",
        "Scale relation",
        gap2.abs() < 0.1 && gap3.abs() < 0.1,
        format!(
            "H(22)-H(12)={:.4} (ln2 gap {gap2:+.4}), H(32)-H(12)={:.4} (ln3 gap {gap3:+.4})",
            h20 - h10,
            h30 - h10
        ),
    )
}

/// Example-2* mixtures against a moment-matched normal.
pub fn example2star_discrimination() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for setting in [1u8, 2] {
        let mut counts = Vec::new();
        for k in LADDER {
            let mut confirmed = 0;
            for seed in 1..=20u64 {
                let params = GeneratorParams {
                    setting,
                    ..Default::default()
                };
                let spec = GeneratorSpec::new(ExampleId::Ex2Star, 20_000, seed).with_params(params);
                let d = sample::<f64>(&spec).unwrap();
                let stream = SeedStream::new(seed)
                    .child_str("example2star")
                    .child(k as u64);
                let y = fuse(&d, &["Y1", "Y2"], k, stream.child_str("kmeans").key());
                let t = crosstab(&[population(&d)], &y).unwrap();
                let band =
                    null_band::<f64>(&t, Statistic::MutualInformation, 1000, stream).unwrap();
                if c1_test(mutual_information::<f64>(&t), &band).status == C1Status::Confirmed {
                    confirmed += 1;
                }
            }
            let ok = if setting == 1 {
                20 - confirmed >= 18
            } else {
                confirmed >= 18
            };
            passed &= ok;
            counts.push(format!("K={k}:{confirmed}/20"));
        }
        parts.push(format!("setting {setting} confirmed {}", counts.join(" ")));
    }
    Outcome::new("4", "Example-2* discrimination", passed, parts.join("; "))
}

/// Example-3 grids over the four-rung cluster ladder.
pub fn example3_grid() -> Outcome {
    let grid = |example: ExampleId, rho: f64, seed: u64, ladder: &[usize]| {
        let params = GeneratorParams {
            rho,
            ..Default::default()
        };
        let d =
            sample::<f64>(&GeneratorSpec::new(example, 20_000, seed).with_params(params)).unwrap();
        mi_grid(
            d.numeric("Y").unwrap(),
            d.numeric("X").unwrap(),
            ladder,
            ladder,
            1000,
            SeedStream::new(seed).child_str(example.as_str()).key(),
        )
        .unwrap()
    };
    let mut parts = Vec::new();

    let cells = grid(ExampleId::Ex3Rho, 0.5, 1, &LADDER);
    let dependent = cells
        .iter()
        .filter(|c| c.verdict.status == C1Status::Confirmed)
        .count();
    parts.push(format!("rho=0.5 confirmed {dependent}/16"));

    let mut false_hits = 0;
    let mut total = 0;
    for seed in 1..=50 {
        for c in grid(ExampleId::Ex3Rho, 0.0, seed, &LADDER[..3]) {
            total += 1;
            if c.verdict.status == C1Status::Confirmed {
                false_hits += 1;
            }
        }
    }
    let rate = f64::from(false_hits) / f64::from(total);
    parts.push(format!("rho=0 rate {rate:.3} ({false_hits}/{total})"));

    let mut sines_ok = true;
    for example in [ExampleId::Ex3HalfSine, ExampleId::Ex3FullSine] {
        let cells = grid(example, 0.0, 1, &LADDER);
        let confirmed = cells
            .iter()
            .filter(|c| c.verdict.status == C1Status::Confirmed)
            .count();
        let ratios: Vec<f64> = cells
            .iter()
            .map(|c| c.report.mi / c.verdict.band.q975)
            .collect();
        let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let weakest = cells
            .iter()
            .zip(&ratios)
            .find(|(_, r)| **r == min_ratio)
            .map(|(c, _)| format!("{}x{}", c.k_y, c.k_x))
            .unwrap_or_default();
        let below = ratios.iter().filter(|r| **r <= 5.0).count();
        sines_ok &= confirmed == 16 && below == 0;
        parts.push(format!(
            "{example} confirmed {confirmed}/16, I/q975 min {min_ratio:.2} at {weakest}, {below} cells at or under 5x"
        ));
    }
    Outcome::new(
        "5",
        "Example-3 grid",
        dependent == 16 && rate <= 0.10 && sines_ok,
        parts.join("; "),
    )
}

/// Example-4 protocol over seeds 1..10.
pub fn example4_protocol() -> Outcome {
    let mut good = 0;
    let mut misses = Vec::new();
    for seed in 1..=10u64 {
        let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex4, 10_000, seed)).unwrap();
        let l = ledger(&d, 10, seed, 2, &[]);
        let report = select_major_factors(&l, Some(&d)).unwrap();
        let confirmed: Vec<(String, Classification)> = report
            .confirmed
            .iter()
            .map(|c| (c.subset.join("_"), c.classification))
            .collect();
        let expected = vec![
            ("X1".to_owned(), Classification::OrderOne),
            ("X2_X3".to_owned(), Classification::Interaction),
        ];
        let gain = |pair: &[&str]| {
            let e = l.get_names(pair).unwrap();
            match (e.sce_star_drop, &e.gain_band) {
                (Some(g), Some(b)) => Some(g > b.q975),
                _ => None,
            }
        };
        let ok = confirmed == expected
            && gain(&["X1", "X2"]) == Some(false)
            && gain(&["X2", "X3"]) == Some(true);
        if ok {
            good += 1;
        } else {
            misses.push(format!("seed {seed}: {confirmed:?}"));
        }
    }
    let mut detail = format!("{good}/10 seeds give {{X1 order-1, X2_X3 interaction}}");
    if !misses.is_empty() {
        detail.push_str(&format!(" (misses: {})", misses.join("; ")));
    }
    Outcome::new("6", "Example-4 protocol", good >= 9, detail)
}

/// Example-5 at N=1000: sparse triplet tables, fused route through K-means.
pub fn example5_curse_escape() -> Outcome {
    let seed = 1;
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex5, 1000, seed)).unwrap();
    let l = ledger(&d, 10, seed, 3, &[]);
    let triplets_unreliable = l.order(3).count() == 4 && l.order(3).all(|e| !e.reliable);

    let stream = SeedStream::new(seed).child_str("example5");
    let y = fuse(&d, &["Y"], 12, stream.child_str("Y").key());
    let mut below = 0;
    let mut excess = Vec::new();
    let mut observed = Vec::new();
    for k in [12, 36, 72, 144] {
        let x = fuse(
            &d,
            &["X2", "X3", "X4"],
            k,
            stream.child_str("X234").child(k as u64).key(),
        );
        let t = crosstab(&[&x], &y).unwrap();
        let ce = conditional_entropy::<f64>(&t);
        let band = null_band::<f64>(
            &t,
            Statistic::ConditionalEntropy,
            100,
            stream.child_str("band").child(k as u64),
        )
        .unwrap();
        let v = c1_test(ce, &band);
        if v.status == C1Status::BelowBand {
            below += 1;
        }
        excess.push(v.excess_sd.abs());
        observed.push(ce);
    }
    let growing = excess.windows(2).all(|w| w[1] > w[0]);
    Outcome::new(
        "7",
        "Example-5 curse escape",
        triplets_unreliable && below == 4 && growing,
        format!(
            "order-3 unreliable: {triplets_unreliable}; H[Y|X234] {} below q025 at {below}/4; |excess_sd| {}",
            fmt_list(&observed),
            fmt_list(&excess)
        ),
    )
}

/// Example-6 at N=1e5 with the 22-bin ladder.
pub fn example6_structure() -> Outcome {
    let seed = 1;
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex6, 100_000, seed)).unwrap();
    let l = ledger(&d, 20, seed, 2, &["X7", "X8", "X9", "X10"]);
    let ce = |f: &str| l.get_names(&[f]).unwrap().ce;
    let tier: Vec<f64> = ["X1", "X2", "X3"].iter().map(|f| ce(f)).collect();
    let rest: Vec<f64> = ["X4", "X5", "X7", "X8", "X9", "X10"]
        .iter()
        .map(|f| ce(f))
        .collect();
    let tier_max = tier.iter().copied().fold(f64::MIN, f64::max);
    let tier_min = tier.iter().copied().fold(f64::MAX, f64::min);
    let rest_min = rest.iter().copied().fold(f64::MAX, f64::min);
    let ordering = ce("X6") < tier_min && tier_max < rest_min;

    let report = select_major_factors(&l, Some(&d)).unwrap();
    let relation = |a: &str, b: &str| {
        report
            .relations
            .iter()
            .find(|r| r.pair[0] == a && r.pair[1] == b)
            .map(|r| r.classification)
    };
    let eco = relation("X1", "X2") == Some(Classification::Ecological);
    let nonco = relation("X1", "X6") == Some(Classification::NonCoexistent);
    let chief = report
        .chief
        .as_ref()
        .map(|c| c.features.clone())
        .unwrap_or_default();
    let alternatives: Vec<Vec<String>> = report
        .alternatives
        .iter()
        .map(|c| c.features.clone())
        .collect();
    let chief_ok = chief == ["X1", "X2", "X3"];
    let alt_ok = alternatives == [vec!["X4", "X5", "X6"]];

    let y = d.categorize("Y", &Categorizer::quantile(20), 0).unwrap();
    let stream = SeedStream::new(seed).child_str("example6");
    let fused: Vec<f64> = [["X1", "X2", "X3"], ["X4", "X5", "X6"], ["X7", "X8", "X9"]]
        .iter()
        .map(|names| {
            let x = fuse(&d, names, 22, stream.child_str(&names.join("_")).key());
            conditional_entropy::<f64>(&crosstab(&[&x], &y).unwrap())
        })
        .collect();
    let fused_ok = fused[0] < fused[1] && fused[1] < fused[2];

    Outcome::new(
        "8",
        "Example-6 structure",
        ordering && eco && nonco && chief_ok && alt_ok && fused_ok,
        format!(
            "CE X6 {:.4} < X1..X3 {} < rest from {rest_min:.4}: {ordering}; (X1,X2) ecological: {eco}; \
             (X1,X6) non-coexistent: {nonco}; chief {chief:?}; alternatives {alternatives:?}; \
             fused X123/X456/X789 {}",
            ce("X6"),
            fmt_list(&tier),
            fmt_list(&fused)
        ),
    )
}

fn entropy_of(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<f64> = counts.into_iter().map(|c| c as f64).collect();
    let n: f64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / n) * (c / n).ln())
        .sum()
}

fn random_series(rng: &mut impl Rng, n: usize, k: u32) -> CategoricalSeries {
    CategoricalSeries::new((0..n).map(|_| rng.random_range(0..k)).collect(), k).unwrap()
}

/// Refinement, MI representation, mimic margins, false confirmation, threading.
pub fn property_suites() -> Outcome {
    let root = SeedStream::new(9);
    let mut rng = root.child_str("tables").rng(0);
    let mut refinement = true;
    let mut representation = true;
    for _ in 0..1000 {
        let n = rng.random_range(20..400);
        let (ka, kb, ky) = (
            rng.random_range(1..6),
            rng.random_range(1..6),
            rng.random_range(2..6),
        );
        let a = random_series(&mut rng, n, ka);
        let b = random_series(&mut rng, n, kb);
        let y = random_series(&mut rng, n, ky);
        let ta = crosstab(&[&a], &y).unwrap();
        let tab = crosstab(&[&a, &b], &y).unwrap();
        let h_y = column_margin_entropy::<f64>(&ta);
        let ce_a = conditional_entropy::<f64>(&ta);
        let ce_ab = conditional_entropy::<f64>(&tab);
        refinement &= ce_ab <= ce_a + 1e-12 && ce_a <= h_y + 1e-12;

        let mi = mutual_information::<f64>(&ta);
        let joint = entropy_of(ta.counts().iter().copied())
            - entropy_of(ta.row_sums())
            - entropy_of(ta.col_sums());
        representation &= mi >= 0.0 && (mi + joint).abs() <= 1e-10;
    }

    let t = ContingencyTable::from_rows(&[&[12, 3, 0, 5], &[1, 9, 4, 2], &[6, 6, 6, 1]]).unwrap();
    let m = 5000;
    let mut sums = vec![0f64; t.counts().len()];
    let mut margins = true;
    let mut mrng = root.child_str("mimic").rng(0);
    for _ in 0..m {
        let x = mimic_table(&t, &mut mrng);
        margins &= x.col_sums() == t.col_sums();
        for (s, &c) in sums.iter_mut().zip(x.counts()) {
            *s += c as f64;
        }
    }
    let (rows, cols, n) = (t.row_sums(), t.col_sums(), t.total() as f64);
    for r in 0..t.rows() {
        for c in 0..t.cols() {
            let p = rows[r] as f64 / n;
            let sd = (cols[c] as f64 * p * (1.0 - p) / m as f64).sqrt();
            let mean = sums[r * t.cols() + c] / m as f64;
            margins &= (mean - cols[c] as f64 * p).abs() <= 3.0 * sd + 1e-12;
        }
    }

    let trials = 200;
    let mut false_hits = 0;
    for i in 0..trials {
        let mut trng = root.child_str("independence").child(i).rng(0);
        let a = random_series(&mut trng, 2000, 5);
        let y = random_series(&mut trng, 2000, 6);
        let table = crosstab(&[&a], &y).unwrap();
        let band = null_band::<f64>(
            &table,
            Statistic::MutualInformation,
            1000,
            root.child_str("band").child(i),
        )
        .unwrap();
        if c1_test(mutual_information::<f64>(&table), &band).status == C1Status::Confirmed {
            false_hits += 1;
        }
    }
    let rate = f64::from(false_hits) / trials as f64;

    let one = on_threads(1);
    let deterministic = one == on_threads(2) && one == on_threads(8);

    Outcome::new(
        "9",
        "Property suites",
        refinement && representation && margins && rate <= 0.07 && deterministic,
        format!(
            "refinement {refinement}; MI representation {representation}; mimic margins {margins}; \
             false confirmation {rate:.3}; thread determinism {deterministic}"
        ),
    )
}

fn pipeline() -> String {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex4, 3000, 5)).unwrap();
    let l = ledger(&d, 10, 5, 2, &[]);
    let report = select_major_factors(&l, Some(&d)).unwrap();
    let grid = mi_grid(
        d.numeric("Y").unwrap(),
        d.numeric("X1").unwrap(),
        &[12, 22],
        &[12],
        100,
        5,
    )
    .unwrap();
    serde_json::to_string(&(l.to_tsv(), &l, &report, &grid)).unwrap()
}

fn on_threads(n: usize) -> String {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .unwrap()
        .install(pipeline)
}
