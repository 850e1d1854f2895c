use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CedaError, Result};
use crate::rng::SeedStream;
use crate::scalar::{mean_sd, Real};
use crate::tabulate::CategoricalSeries;

/// Row-major `N x d` matrix of points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMatrix<F> {
    data: Vec<F>,
    n: usize,
    d: usize,
}

impl<F: Real> PointMatrix<F> {
    pub fn new(data: Vec<F>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(CedaError::EmptyInput);
        }
        if data.len() != n * d {
            return Err(CedaError::LengthMismatch {
                expected: n * d,
                actual: data.len(),
            });
        }
        Ok(Self { data, n, d })
    }

    /// Stacks equal-length columns side by side.
    pub fn from_columns(columns: &[&[F]]) -> Result<Self> {
        let d = columns.len();
        let n = columns.first().map_or(0, |c| c.len());
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(CedaError::LengthMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(data, n, d)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[F] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct KMeansConfig<F> {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub rel_tol: F,
    /// Scale each coordinate to unit sample variance before clustering.
    pub standardize: bool,
    /// Relabel clusters so centroids are in lexicographic order.
    pub order_labels: bool,
}

impl<F: Real> KMeansConfig<F> {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iter: 300,
            rel_tol: F::lit(1e-6),
            standardize: false,
            order_labels: true,
        }
    }
}

/// Fitted clustering. Centroids live in the working (possibly standardized)
/// coordinates; `scale` maps raw points into them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct KMeansModel<F> {
    pub centroids: Vec<Vec<F>>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale: Option<Vec<(F, F)>>,
    #[serde(skip)]
    pub assignments: Option<CategoricalSeries>,
    pub inertia: F,
    pub iterations_run: usize,
    pub inertia_history: Vec<F>,
}

#[inline]
fn sq_dist<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(F::zero(), |s, v| s + v)
}

/// Nearest centroid; ties go to the lowest index.
#[inline]
fn nearest<F: Real>(p: &[F], centroids: &[Vec<F>]) -> (u32, F) {
    let mut best = 0u32;
    let mut best_d = F::infinity();
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best_d {
            best_d = d;
            best = j as u32;
        }
    }
    (best, best_d)
}

fn assign_all<F: Real>(pts: &PointMatrix<F>, centroids: &[Vec<F>]) -> Vec<(u32, F)> {
    (0..pts.rows())
        .into_par_iter()
        .map(|i| nearest(pts.point(i), centroids))
        .collect()
}

fn seed_plus_plus<F: Real>(pts: &PointMatrix<F>, k: usize, stream: SeedStream) -> Vec<Vec<F>> {
    let mut rng = stream.rng(0);
    let n = pts.rows();
    let first = rng.random_range(0..n);
    let mut centroids = vec![pts.point(first).to_vec()];
    let mut d2: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sq_dist(pts.point(i), &centroids[0]).as_f64())
        .collect();
    let mut chosen = vec![false; n];
    chosen[first] = true;
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    pick = Some(i);
                    break;
                }
            }
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap_or(0))
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        let c = pts.point(pick).to_vec();
        d2.par_iter_mut().enumerate().for_each(|(i, w)| {
            let d = sq_dist(pts.point(i), &c).as_f64();
            if d < *w {
                *w = d;
            }
        });
        centroids.push(c);
    }
    centroids
}

/// Lloyd's algorithm from k-means++ seeding.
pub fn kmeans_fit<F: Real>(
    points: &PointMatrix<F>,
    config: &KMeansConfig<F>,
) -> Result<KMeansModel<F>> {
    let k = config.k;
    if k == 0 {
        return Err(CedaError::invalid("k must be at least 1"));
    }
    if k > points.rows() {
        return Err(CedaError::invalid(format!(
            "k = {k} exceeds the number of points ({})",
            points.rows()
        )));
    }
    if let Some(index) = points.data.iter().position(|v| !v.is_finite()) {
        return Err(CedaError::NonFinite { index });
    }

    let scale = config.standardize.then(|| column_scale(points));
    let owned;
    let pts = match &scale {
        Some(s) => {
            owned = rescale(points, s);
            &owned
        }
        None => points,
    };
    let (n, d) = (pts.rows(), pts.dim());

    let mut centroids = seed_plus_plus(pts, k, SeedStream::new(config.seed).child_str("kmeans++"));
    let mut labels: Vec<u32> = Vec::new();
    let mut history: Vec<F> = Vec::new();
    let mut iterations = 0;

    loop {
        let assigned = assign_all(pts, &centroids);
        let inertia = assigned.iter().fold(F::zero(), |s, a| s + a.1);
        let new_labels: Vec<u32> = assigned.iter().map(|a| a.0).collect();
        iterations += 1;

        let unchanged = new_labels == labels;
        let converged = match history.last() {
            Some(&prev) if prev > F::zero() => (prev - inertia) / prev < config.rel_tol,
            Some(_) => true,
            None => false,
        };
        history.push(inertia);
        labels = new_labels;
        if unchanged || converged || iterations >= config.max_iter {
            break;
        }

        let mut sums = vec![F::zero(); k * d];
        let mut sizes = vec![0u64; k];
        for (i, &l) in labels.iter().enumerate() {
            let l = l as usize;
            sizes[l] += 1;
            for (s, &x) in sums[l * d..(l + 1) * d].iter_mut().zip(pts.point(i)) {
                *s = *s + x;
            }
        }
        let mut dist: Vec<F> = assigned.iter().map(|a| a.1).collect();
        for j in 0..k {
            if sizes[j] > 0 {
                let m = F::from_count(sizes[j]);
                for (c, &s) in centroids[j].iter_mut().zip(&sums[j * d..(j + 1) * d]) {
                    *c = s / m;
                }
            } else {
                let far = (0..n)
                    .fold((0usize, F::neg_infinity()), |best, i| {
                        if dist[i] > best.1 {
                            (i, dist[i])
                        } else {
                            best
                        }
                    })
                    .0;
                centroids[j] = pts.point(far).to_vec();
                dist[far] = F::zero();
            }
        }
    }

    if config.order_labels {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            centroids[a]
                .iter()
                .zip(&centroids[b])
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                .find(|o| o.is_ne())
                .unwrap_or(a.cmp(&b))
        });
        let mut remap = vec![0u32; k];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as u32;
        }
        centroids = order.iter().map(|&o| centroids[o].clone()).collect();
        for l in labels.iter_mut() {
            *l = remap[*l as usize];
        }
    }

    Ok(KMeansModel {
        centroids,
        seed: config.seed,
        scale,
        assignments: Some(CategoricalSeries::new(labels, k as u32)?),
        inertia: *history.last().unwrap_or(&F::zero()),
        iterations_run: iterations,
        inertia_history: history,
    })
}

fn column_scale<F: Real>(pts: &PointMatrix<F>) -> Vec<(F, F)> {
    (0..pts.dim())
        .map(|j| {
            let col: Vec<F> = (0..pts.rows()).map(|i| pts.point(i)[j]).collect();
            let (m, s) = mean_sd(&col);
            (m, if s > F::zero() { s } else { F::one() })
        })
        .collect()
}

fn rescale<F: Real>(pts: &PointMatrix<F>, scale: &[(F, F)]) -> PointMatrix<F> {
    let data = pts
        .data
        .chunks_exact(pts.d)
        .flat_map(|p| p.iter().zip(scale).map(|(&x, &(m, s))| (x - m) / s))
        .collect();
    PointMatrix {
        data,
        n: pts.n,
        d: pts.d,
    }
}

impl<F: Real> KMeansModel<F> {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Assigns new points to the fitted centroids.
    pub fn assign(&self, points: &PointMatrix<F>) -> Result<CategoricalSeries> {
        let dim = self.centroids.first().map_or(0, |c| c.len());
        if points.dim() != dim {
            return Err(CedaError::LengthMismatch {
                expected: dim,
                actual: points.dim(),
            });
        }
        let owned;
        let pts = match &self.scale {
            Some(s) => {
                owned = rescale(points, s);
                &owned
            }
            None => points,
        };
        let labels = assign_all(pts, &self.centroids)
            .into_iter()
            .map(|a| a.0)
            .collect();
        CategoricalSeries::new(labels, self.k() as u32)
    }
}

/// Fuses the columns of `matrix` into one categorical variable by K-means.
pub fn fuse_features<F: Real>(
    matrix: &PointMatrix<F>,
    k: usize,
    seed: u64,
) -> Result<CategoricalSeries> {
    let model = kmeans_fit(matrix, &KMeansConfig::new(k, seed))?;
    model.assignments.ok_or(CedaError::EmptyInput)
}
