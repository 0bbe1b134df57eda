//! Exact t-SNE into two dimensions.
//!
//! Items are processed in a canonical order derived from their content (the
//! embedding vector, or the sorted row of the distance matrix) so that
//! permuting the input permutes the output and nothing else.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Point2;
use crate::error::{Error, Result};
use crate::similarity::DistanceMatrix;

#[derive(Debug, Clone, Copy)]
pub enum ProjectionInput<'a> {
    /// Feature vectors compared by Euclidean distance.
    Vectors(&'a [Vec<f64>]),
    /// A precomputed symmetric distance matrix.
    Distances(&'a DistanceMatrix),
}

impl ProjectionInput<'_> {
    fn len(&self) -> usize {
        match self {
            ProjectionInput::Vectors(v) => v.len(),
            ProjectionInput::Distances(m) => m.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsneParams {
    pub perplexity: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for TsneParams {
    fn default() -> Self {
        TsneParams {
            perplexity: 10.0,
            iterations: 1000,
            seed: 42,
        }
    }
}

const EARLY_EXAGGERATION: f64 = 12.0;
const EXAGGERATION_ITERS: usize = 250;
const INITIAL_MOMENTUM: f64 = 0.5;
const FINAL_MOMENTUM: f64 = 0.8;
const MIN_GAIN: f64 = 0.01;

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Squared pairwise distances, plus a content key per item.
fn squared_distances(input: &ProjectionInput<'_>) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    match input {
        ProjectionInput::Vectors(vectors) => {
            let dim = vectors[0].len();
            if vectors.iter().any(|v| v.len() != dim) {
                return Err(Error::Config("projection vectors differ in length".into()));
            }
            let d2 = vectors
                .iter()
                .map(|a| {
                    vectors
                        .iter()
                        .map(|b| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
                        .collect()
                })
                .collect();
            Ok((d2, vectors.to_vec()))
        }
        ProjectionInput::Distances(m) => {
            let d2 = m
                .values
                .iter()
                .map(|row| row.iter().map(|d| d * d).collect())
                .collect();
            let keys = m
                .values
                .iter()
                .map(|row| {
                    let mut r = row.clone();
                    r.sort_by(f64::total_cmp);
                    r
                })
                .collect();
            Ok((d2, keys))
        }
    }
}

/// Conditional affinities for one row, with the Gaussian precision found by
/// bisection so that the row's perplexity matches the target.
fn row_affinities(d2: &[f64], i: usize, target_entropy: f64) -> Vec<f64> {
    let n = d2.len();
    let min = d2
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let mut beta = 1.0;
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut p = vec![0.0; n];
    for _ in 0..200 {
        let mut sum = 0.0;
        for j in 0..n {
            p[j] = if j == i { 0.0 } else { (-(d2[j] - min) * beta).exp() };
            sum += p[j];
        }
        let mut weighted = 0.0;
        for j in 0..n {
            p[j] /= sum;
            weighted += p[j] * (d2[j] - min);
        }
        // H = log(sum) + beta * E[d] (natural log, shifted distances).
        let entropy = sum.ln() + beta * weighted;
        let diff = entropy - target_entropy;
        if diff.abs() < 1e-10 {
            break;
        }
        if diff > 0.0 {
            lo = beta;
            beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
        } else {
            hi = beta;
            beta = (beta + lo) / 2.0;
        }
    }
    p
}

fn tsne(d2: &[Vec<f64>], params: &TsneParams) -> Vec<Point2> {
    let n = d2.len();
    let target = params.perplexity.ln();
    let cond: Vec<Vec<f64>> = (0..n).map(|i| row_affinities(&d2[i], i, target)).collect();
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i][j] = ((cond[i][j] + cond[j][i]) / (2.0 * n as f64)).max(1e-12);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<Point2> = (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    let mut update = vec![[0.0f64; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let learning_rate = (n as f64 / EARLY_EXAGGERATION / 4.0).max(50.0);
    let mut num = vec![vec![0.0; n]; n];

    for iter in 0..params.iterations {
        let exaggeration = if iter < EXAGGERATION_ITERS { EARLY_EXAGGERATION } else { 1.0 };
        let momentum = if iter < EXAGGERATION_ITERS { INITIAL_MOMENTUM } else { FINAL_MOMENTUM };

        let mut z = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                let q = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i][j] = q;
                num[j][i] = q;
                z += 2.0 * q;
            }
        }
        for i in 0..n {
            let mut grad = [0.0; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = num[i][j];
                let force = (exaggeration * p[i][j] - q / z) * q;
                grad[0] += force * (y[i][0] - y[j][0]);
                grad[1] += force * (y[i][1] - y[j][1]);
            }
            for d in 0..2 {
                let g = 4.0 * grad[d];
                gains[i][d] = if (g > 0.0) != (update[i][d] > 0.0) {
                    gains[i][d] + 0.2
                } else {
                    (gains[i][d] * 0.8).max(MIN_GAIN)
                };
                update[i][d] = momentum * update[i][d] - learning_rate * gains[i][d] * g;
            }
        }
        for (yi, u) in y.iter_mut().zip(&update) {
            yi[0] += u[0];
            yi[1] += u[1];
        }
    }
    y
}

/// Center at the origin and scale uniformly into `[-1, 1]²`.
fn fit_unit_square(points: &mut [Point2]) {
    let n = points.len() as f64;
    let mean = [
        points.iter().map(|p| p[0]).sum::<f64>() / n,
        points.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    for p in points.iter_mut() {
        p[0] -= mean[0];
        p[1] -= mean[1];
    }
    let extent = points
        .iter()
        .flat_map(|p| [p[0].abs(), p[1].abs()])
        .fold(0.0, f64::max);
    if extent > 0.0 {
        for p in points.iter_mut() {
            p[0] = (p[0] / extent).clamp(-1.0, 1.0);
            p[1] = (p[1] / extent).clamp(-1.0, 1.0);
        }
    }
}

/// Project items into 2D with t-SNE. Deterministic for a given seed.
pub fn project_2d(input: ProjectionInput<'_>, params: &TsneParams) -> Result<Vec<Point2>> {
    let n = input.len();
    if n < 3 {
        return Err(Error::TooFewItems { found: n });
    }
    if !(params.perplexity > 0.0 && params.perplexity < n as f64) {
        return Err(Error::Config(format!(
            "perplexity {} must be positive and below the item count {n}",
            params.perplexity
        )));
    }
    let (d2, keys) = squared_distances(&input)?;
    if d2.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Config("projection distances must be finite".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lexicographic(&keys[a], &keys[b]).then(a.cmp(&b)));
    let canonical: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| d2[i][j]).collect())
        .collect();

    let mut projected = tsne(&canonical, params);
    fit_unit_square(&mut projected);

    let mut out = vec![[0.0; 2]; n];
    for (pos, &original) in order.iter().enumerate() {
        out[original] = projected[pos];
    }
    Ok(out)
}
