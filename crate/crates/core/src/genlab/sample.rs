use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::oracle::compound_symmetry;
use super::spec::{ExampleId, GeneratorSpec};
use crate::dataset::{Column, Dataset};
use crate::error::{CedaError, Result};
use crate::rng::{SeedStream, StreamRng};
use crate::scalar::Real;
use crate::tabulate::CategoricalSeries;

/// Draws from `N(mean, cov)` through the Cholesky factor of `cov`.
pub struct MvNormal {
    mean: DVector<f64>,
    chol: DMatrix<f64>,
}

impl MvNormal {
    pub fn new(mean: &[f64], cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(CedaError::LengthMismatch {
                expected: mean.len(),
                actual: cov.nrows(),
            });
        }
        let chol = cov.cholesky().ok_or(CedaError::NotPositiveDefinite)?;
        Ok(Self {
            mean: DVector::from_column_slice(mean),
            chol: chol.l(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        (&self.mean + &self.chol * z).iter().copied().collect()
    }
}

fn normal(rng: &mut StreamRng) -> f64 {
    rng.sample(StandardNormal)
}

fn columns_to_dataset<F: Real>(names: &[String], cols: Vec<Vec<f64>>) -> Result<Dataset<F>> {
    let mut d = Dataset::new();
    for (name, col) in names.iter().zip(cols) {
        d.push(
            name.clone(),
            Column::Numeric(col.into_iter().map(F::lit).collect()),
        )?;
    }
    Ok(d)
}

fn push_population<F: Real>(d: &mut Dataset<F>, labels: Vec<u32>) -> Result<()> {
    d.push(
        "V1",
        Column::Categorical(CategoricalSeries::new(labels, 2)?),
    )
}

/// Draws one dataset. Columns are `Y` (or `Y1..Ym`) followed by the
/// covariates `V1` or `X1..Xp`; the `Y` columns are designated as responses.
pub fn sample<F: Real>(spec: &GeneratorSpec) -> Result<Dataset<F>> {
    spec.validate()?;
    let p = spec.params;
    let n = spec.n;
    let mut rng = SeedStream::new(spec.seed)
        .child_str(spec.example.as_str())
        .rng(0);
    let sigma = p.noise_scale;

    let mut d = match spec.example {
        ExampleId::Ex1 => {
            let half = n / 2;
            let mut y = Vec::with_capacity(n);
            let mut v = Vec::with_capacity(n);
            for i in 0..n {
                let pop = u32::from(i >= half);
                y.push(normal(&mut rng) + if pop == 1 { p.gap } else { 0.0 });
                v.push(pop);
            }
            let mut d = columns_to_dataset(&["Y".into()], vec![y])?;
            push_population(&mut d, v)?;
            d
        }
        ExampleId::Ex2 => {
            let m = p.dim;
            let pops = [
                MvNormal::new(&vec![0.0; m], compound_symmetry(m, p.rho0))?,
                MvNormal::new(&vec![0.0; m], compound_symmetry(m, p.rho1))?,
            ];
            two_population(n, m, &mut rng, |rng, pop| pops[pop].sample(rng))?
        }
        ExampleId::Ex2Star => {
            let (a, b, single) = if p.setting == 1 {
                (
                    [0.5, 0.5],
                    [-0.5, 0.5],
                    MvNormal::new(
                        &[0.0, 0.5],
                        DMatrix::from_row_slice(2, 2, &[1.25, 0.0, 0.0, 1.0]),
                    )?,
                )
            } else {
                (
                    [-1.0, -1.0],
                    [1.0, 1.0],
                    MvNormal::new(
                        &[0.0, 0.0],
                        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
                    )?,
                )
            };
            let comp_a = MvNormal::new(&a, DMatrix::identity(2, 2))?;
            let comp_b = MvNormal::new(&b, DMatrix::identity(2, 2))?;
            two_population(n, 2, &mut rng, |rng, pop| {
                if pop == 0 {
                    if rng.random::<bool>() {
                        comp_a.sample(rng)
                    } else {
                        comp_b.sample(rng)
                    }
                } else {
                    single.sample(rng)
                }
            })?
        }
        ExampleId::Ex3Rho => {
            let mvn = MvNormal::new(
                &[0.0, 0.0],
                DMatrix::from_row_slice(2, 2, &[1.0, p.rho, p.rho, 1.0]),
            )?;
            let (mut y, mut x) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let s = mvn.sample(&mut rng);
                y.push(s[0]);
                x.push(s[1]);
            }
            columns_to_dataset(&["Y".into(), "X".into()], vec![y, x])?
        }
        ExampleId::Ex3HalfSine | ExampleId::Ex3FullSine => {
            let full = spec.example == ExampleId::Ex3FullSine;
            let (mut y, mut x) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let u: f64 = rng.random();
                let signal = if full {
                    (2.0 * std::f64::consts::PI * u + std::f64::consts::FRAC_PI_2).sin()
                } else {
                    (std::f64::consts::PI * u).sin()
                };
                x.push(u);
                y.push(signal + sigma * normal(&mut rng));
            }
            columns_to_dataset(&["Y".into(), "X".into()], vec![y, x])?
        }
        ExampleId::Ex4 | ExampleId::Ex5 => {
            let mut x: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 4];
            let mut y = Vec::with_capacity(n);
            for _ in 0..n {
                let u: [f64; 4] = std::array::from_fn(|_| rng.random());
                let phase = if spec.example == ExampleId::Ex4 {
                    u[1] + u[2]
                } else {
                    u[1] + u[2] + u[3]
                };
                y.push(
                    u[0] + (2.0 * std::f64::consts::PI * phase).sin() + sigma * normal(&mut rng),
                );
                for (col, v) in x.iter_mut().zip(u) {
                    col.push(v);
                }
            }
            let mut names = vec!["Y".to_owned()];
            names.extend((1..=4).map(|i| format!("X{i}")));
            let mut cols = vec![y];
            cols.extend(x);
            columns_to_dataset(&names, cols)?
        }
        ExampleId::Ex6 => {
            let base = MvNormal::new(&[0.0; 9], compound_symmetry(9, p.base_cov))?;
            let mut x: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 10];
            let mut y = Vec::with_capacity(n);
            for _ in 0..n {
                let b = base.sample(&mut rng);
                // b[0..5] are X1..X5, b[5..9] are X7..X10.
                let x6 = (b[..5].iter().sum::<f64>() + sigma * normal(&mut rng)) / 3.0;
                y.push(b[0] + b[1] + b[2] + sigma * normal(&mut rng));
                for j in 0..5 {
                    x[j].push(b[j]);
                }
                x[5].push(x6);
                for j in 5..9 {
                    x[j + 1].push(b[j]);
                }
            }
            let mut names = vec!["Y".to_owned()];
            names.extend((1..=10).map(|i| format!("X{i}")));
            let mut cols = vec![y];
            cols.extend(x);
            columns_to_dataset(&names, cols)?
        }
    };

    let responses: Vec<String> = d
        .names()
        .filter(|n| *n == "Y" || n.starts_with('Y'))
        .map(str::to_owned)
        .collect();
    let refs: Vec<&str> = responses.iter().map(String::as_str).collect();
    d.set_responses(&refs)?;
    Ok(d)
}

/// First half population 0, second half population 1.
fn two_population<F: Real>(
    n: usize,
    m: usize,
    rng: &mut StreamRng,
    mut draw: impl FnMut(&mut StreamRng, usize) -> Vec<f64>,
) -> Result<Dataset<F>> {
    let half = n / 2;
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); m];
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let pop = usize::from(i >= half);
        for (c, x) in cols.iter_mut().zip(draw(rng, pop)) {
            c.push(x);
        }
        v.push(pop as u32);
    }
    let names: Vec<String> = if m == 1 {
        vec!["Y".into()]
    } else {
        (1..=m).map(|i| format!("Y{i}")).collect()
    };
    let mut d = columns_to_dataset(&names, cols)?;
    push_population(&mut d, v)?;
    Ok(d)
}
