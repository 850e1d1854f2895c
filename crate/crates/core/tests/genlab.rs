use std::f64::consts::{LN_2, PI};

use ceda::genlab::{
    compound_symmetry, gaussian_entropy, sample, theoretical_ex1, theoretical_two_normal,
    two_normal_mixture_entropy, ExampleId, GeneratorParams, GeneratorSpec, MvNormal,
};
use ceda::{
    c1_test, crosstab, null_band, C1Status, Categorizer, CedaError, Column, Dataset, SeedStream,
    Statistic,
};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Continuous, Normal};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn cov(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (a.len() - 1) as f64
}

fn corr(a: &[f64], b: &[f64]) -> f64 {
    cov(a, b) / (cov(a, a) * cov(b, b)).sqrt()
}

fn population(d: &Dataset<f64>) -> Vec<u32> {
    match d.column("V1").unwrap() {
        Column::Categorical(s) => s.labels().to_vec(),
        Column::Numeric(_) => panic!("V1 must be categorical"),
    }
}

/// Sample covariance of the response columns restricted to one population.
fn population_cov(d: &Dataset<f64>, names: &[&str], pop: u32) -> DMatrix<f64> {
    let labels = population(d);
    let cols: Vec<Vec<f64>> = names
        .iter()
        .map(|n| {
            d.numeric(n)
                .unwrap()
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == pop)
                .map(|(v, _)| *v)
                .collect()
        })
        .collect();
    DMatrix::from_fn(names.len(), names.len(), |i, j| cov(&cols[i], &cols[j]))
}

#[test]
fn univariate_entropy() {
    let h = gaussian_entropy(&DMatrix::identity(1, 1)).unwrap();
    assert!((h - 0.5 * (2.0 * PI * std::f64::consts::E).ln()).abs() < 1e-12);
    assert!((h - 1.4189).abs() < 5e-4);
    let h4 = gaussian_entropy(&DMatrix::from_element(1, 1, 4.0)).unwrap();
    assert!((h4 - h - 2.0_f64.ln()).abs() < 1e-12);
}

/// `det` of compound symmetry is `(1-ρ)^(d-1) (1+(d-1)ρ)`.
#[test]
fn compound_symmetry_entropy() {
    for (rho, paper) in [(0.5_f64, 5.0942), (0.7, 4.4355)] {
        let det = (1.0 - rho).powi(3) * (1.0 + 3.0 * rho);
        let oracle = 0.5 * det.ln() + 2.0 * (1.0 + (2.0 * PI).ln());
        let h = gaussian_entropy(&compound_symmetry(4, rho)).unwrap();
        assert!((h - oracle).abs() < 1e-10);
        assert!((h - paper).abs() < 5e-4, "{h}");
    }
}

#[test]
fn entropy_rejects_non_pd() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 1.5, 1.0]);
    assert_eq!(gaussian_entropy(&m), Err(CedaError::NotPositiveDefinite));
    assert!(MvNormal::new(&[0.0, 0.0], m).is_err());
    assert!(gaussian_entropy(&DMatrix::zeros(2, 3)).is_err());
}

/// Trapezoid rule over statrs densities on a fine grid.
fn mixture_entropy_oracle(gap: f64) -> f64 {
    let a = Normal::new(0.0, 1.0).unwrap();
    let b = Normal::new(gap, 1.0).unwrap();
    let (lo, hi) = (gap.min(0.0) - 10.0, gap.max(0.0) + 10.0);
    let steps = 200_000;
    let h = (hi - lo) / steps as f64;
    (0..=steps)
        .map(|i| {
            let y = lo + i as f64 * h;
            let f = 0.5 * a.pdf(y) + 0.5 * b.pdf(y);
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            if f > 0.0 {
                -w * f * f.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>()
        * h
}

#[test]
fn mixture_entropy_matches_quadrature_oracle() {
    for gap in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let h = two_normal_mixture_entropy(gap);
        let oracle = mixture_entropy_oracle(gap);
        assert!((h - oracle).abs() < 1e-7, "gap {gap}: {h} vs {oracle}");
    }
}

#[test]
fn mixture_information_limits() {
    let (h, c, i) = theoretical_two_normal(0.0);
    assert!(i.abs() < 1e-9 && (h - c).abs() < 1e-9);
    let (_, _, i) = theoretical_two_normal(40.0);
    assert!((i - LN_2).abs() < 1e-6, "{i}");
    let mut last = 0.0;
    for gap in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let (_, _, i) = theoretical_two_normal(gap);
        assert!(i > last && i < LN_2);
        last = i;
    }
}

#[test]
fn example1_theory() {
    let (h, c, i) = theoretical_ex1();
    assert!((c - 1.4189).abs() < 5e-4);
    assert!((h - mixture_entropy_oracle(1.0)).abs() < 1e-7);
    assert!((i - (h - c)).abs() < 1e-15);
}

#[test]
fn example1_layout() {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex1, 20_000, 1)).unwrap();
    assert_eq!(d.len(), 20_000);
    let labels = population(&d);
    assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 10_000);
    let y = d.numeric("Y").unwrap();
    assert!(mean(&y[..10_000]).abs() < 0.05);
    assert!((mean(&y[10_000..]) - 1.0).abs() < 0.05);
    assert!((cov(&y[..10_000], &y[..10_000]) - 1.0).abs() < 0.05);
}

#[test]
fn example2_sample_covariance_converges() {
    let params = GeneratorParams {
        dim: 4,
        ..Default::default()
    };
    let d =
        sample::<f64>(&GeneratorSpec::new(ExampleId::Ex2, 20_000, 2).with_params(params)).unwrap();
    let names = ["Y1", "Y2", "Y3", "Y4"];
    for (pop, rho) in [(0, 0.5), (1, 0.7)] {
        let dist = (population_cov(&d, &names, pop) - compound_symmetry(4, rho)).norm();
        assert!(dist < 0.05, "population {pop}: {dist}");
    }
}

/// Both populations share one mean vector and covariance matrix.
#[test]
fn example2star_populations_share_moments() {
    let oracles = [
        DMatrix::from_row_slice(2, 2, &[1.25, 0.0, 0.0, 1.0]),
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
    ];
    for (setting, oracle) in [1u8, 2].into_iter().zip(oracles) {
        let params = GeneratorParams {
            setting,
            ..Default::default()
        };
        let d =
            sample::<f64>(&GeneratorSpec::new(ExampleId::Ex2Star, 40_000, 3).with_params(params))
                .unwrap();
        for pop in [0, 1] {
            let dist = (population_cov(&d, &["Y1", "Y2"], pop) - &oracle).norm();
            assert!(dist < 0.08, "setting {setting}, population {pop}: {dist}");
        }
        let y2 = d.numeric("Y2").unwrap();
        let shift = if setting == 1 { 0.5 } else { 0.0 };
        assert!((mean(&y2[..20_000]) - shift).abs() < 0.03);
        assert!((mean(&y2[20_000..]) - shift).abs() < 0.03);
    }
}

#[test]
fn example3_correlations() {
    let params = GeneratorParams {
        rho: 0.5,
        ..Default::default()
    };
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex3Rho, 20_000, 4).with_params(params))
        .unwrap();
    assert!((corr(d.numeric("Y").unwrap(), d.numeric("X").unwrap()) - 0.5).abs() < 0.02);

    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex3FullSine, 20_000, 4)).unwrap();
    let r = corr(d.numeric("Y").unwrap(), d.numeric("X").unwrap());
    assert!(r.abs() < 0.03, "{r}");

    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex3HalfSine, 20_000, 4)).unwrap();
    let x = d.numeric("X").unwrap();
    assert!(x.iter().all(|v| (0.0..1.0).contains(v)));
}

/// `Var(X6) = (5 + 20c + σ²) / 9` and `Cov(X6, X1) = (1 + 4c) / 3` for off-diagonal `c`.
#[test]
fn example6_moments() {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex6, 100_000, 5)).unwrap();
    let c = 0.2;
    let var_x6 = (5.0 + 20.0 * c + 0.01) / 9.0;
    let cov_x61 = (1.0 + 4.0 * c) / 3.0;
    let x6 = d.numeric("X6").unwrap();
    let x1 = d.numeric("X1").unwrap();
    assert!((cov(x6, x6) - var_x6).abs() < 0.02, "{}", cov(x6, x6));
    let r = corr(x6, x1);
    assert!(r > 0.0);
    assert!((r - cov_x61 / var_x6.sqrt()).abs() < 0.01, "{r}");
    let var_y = 3.0 + 6.0 * c + 0.01;
    assert!((cov(d.numeric("Y").unwrap(), d.numeric("Y").unwrap()) - var_y).abs() < 0.05);
    assert_eq!(d.covariate_names().len(), 10);
}

/// The fourth covariate of Example-4 does not enter the response.
#[test]
fn example4_x4_stays_in_the_noise_band() {
    let d = sample::<f64>(&GeneratorSpec::new(ExampleId::Ex4, 10_000, 6)).unwrap();
    let cat = Categorizer::quantile(10);
    let y = d.categorize("Y", &cat, 0).unwrap();
    let x4 = d.categorize("X4", &cat, 0).unwrap();
    let t = crosstab(&[&x4], &y).unwrap();
    let band = null_band::<f64>(&t, Statistic::MutualInformation, 500, SeedStream::new(6)).unwrap();
    let mi = ceda::mutual_information::<f64>(&t);
    assert_ne!(c1_test(mi, &band).status, C1Status::Confirmed);
}

#[test]
fn generators_are_reproducible() {
    for example in ExampleId::ALL {
        let spec = GeneratorSpec::new(example, 500, 9);
        let a = sample::<f64>(&spec).unwrap();
        assert_eq!(a, sample::<f64>(&spec).unwrap(), "{example}");
        let other = sample::<f64>(&GeneratorSpec::new(example, 500, 10)).unwrap();
        assert_ne!(a, other, "{example}");
        let single = sample::<f32>(&spec).unwrap();
        let (ya, yb) = (
            a.numeric(&a.responses()[0]).unwrap(),
            single.numeric(&a.responses()[0]).unwrap(),
        );
        assert!(ya
            .iter()
            .zip(yb)
            .all(|(x, y)| (*x as f32 - y).abs() <= 1e-6 * x.abs().max(1.0) as f32));
    }
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(sample::<f64>(&GeneratorSpec::new(ExampleId::Ex4, 0, 1)).is_err());
    let bad_rho = GeneratorParams {
        rho: -1.0,
        ..Default::default()
    };
    assert!(
        sample::<f64>(&GeneratorSpec::new(ExampleId::Ex3Rho, 10, 1).with_params(bad_rho)).is_err()
    );
    let bad_setting = GeneratorParams {
        setting: 3,
        ..Default::default()
    };
    assert!(
        sample::<f64>(&GeneratorSpec::new(ExampleId::Ex2Star, 10, 1).with_params(bad_setting))
            .is_err()
    );
    let bad_cs = GeneratorParams {
        dim: 4,
        rho0: -0.5,
        ..Default::default()
    };
    assert_eq!(
        sample::<f64>(&GeneratorSpec::new(ExampleId::Ex2, 10, 1).with_params(bad_cs)),
        Err(CedaError::NotPositiveDefinite)
    );
}

#[test]
fn mvnormal_moments() {
    let cov_m = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
    let mvn = MvNormal::new(&[1.0, -1.0], cov_m.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let draws: Vec<Vec<f64>> = (0..50_000).map(|_| mvn.sample(&mut rng)).collect();
    let a: Vec<f64> = draws.iter().map(|d| d[0]).collect();
    let b: Vec<f64> = draws.iter().map(|d| d[1]).collect();
    assert!((mean(&a) - 1.0).abs() < 0.03 && (mean(&b) + 1.0).abs() < 0.03);
    assert!((cov(&a, &b) - 0.6).abs() < 0.03);
    assert!((cov(&a, &a) - 2.0).abs() < 0.05);
}
