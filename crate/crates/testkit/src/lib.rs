//! Reference implementations used only by tests.
//!
//! Nothing here calls into `vsplit-core`: each oracle computes its answer by
//! a different route than the production code (covariance
//! eigendecomposition instead of SVD, per-time products instead of a sweep,
//! edge comparisons instead of index arithmetic).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// PCA by eigendecomposition of the sample covariance matrix.
pub struct OraclePca {
    pub mean: Vec<f64>,
    /// Eigenvectors, descending eigenvalue.
    pub components: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
}

impl OraclePca {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let p = rows[0].len();
        let mean: Vec<f64> = (0..p)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let mut cov = DMatrix::<f64>::zeros(p, p);
        for r in rows {
            for i in 0..p {
                for j in 0..p {
                    cov[(i, j)] += (r[i] - mean[i]) * (r[j] - mean[j]);
                }
            }
        }
        cov /= (n - 1) as f64;
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        Self {
            components: order
                .iter()
                .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
                .collect(),
            variances: order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect(),
            mean,
        }
    }

    pub fn score(&self, row: &[f64], component: usize) -> f64 {
        row.iter()
            .zip(&self.mean)
            .zip(&self.components[component])
            .map(|((x, m), w)| (x - m) * w)
            .sum()
    }
}

/// Per-feature population variance with the `n − 1` denominator, summed.
pub fn total_variance(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len() as f64;
    let p = rows[0].len();
    (0..p)
        .map(|j| {
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / (n - 1.0)
        })
        .sum()
}

/// Kaplan–Meier by direct evaluation: at each distinct event time the
/// survival probability is recomputed as a fresh product over all event
/// times up to it. Events at time zero lower the initial point.
pub fn km_oracle(records: &[(f64, bool)]) -> Vec<(f64, f64)> {
    let mut event_times: Vec<f64> = records.iter().filter(|r| r.1).map(|r| r.0).collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();
    let factor = |t: f64| {
        let deaths = records.iter().filter(|r| r.1 && r.0 == t).count() as f64;
        let at_risk = records.iter().filter(|r| r.0 >= t).count() as f64;
        1.0 - deaths / at_risk
    };
    let survival_at = |t: f64| -> f64 {
        event_times
            .iter()
            .filter(|&&e| e <= t)
            .map(|&e| factor(e))
            .product()
    };
    let mut steps = vec![(0.0, survival_at(0.0))];
    for &t in &event_times {
        if t > 0.0 {
            steps.push((t, survival_at(t)));
        }
    }
    steps
}

/// Features whose absolute mean difference reaches the population standard
/// deviation of all differences; nothing when that deviation is zero.
pub fn importance_oracle(mu_a: &[f64], mu_b: &[f64]) -> (f64, Vec<usize>) {
    let n = mu_a.len() as f64;
    let d: Vec<f64> = mu_a.iter().zip(mu_b).map(|(a, b)| a - b).collect();
    let mu_d = d.iter().sum::<f64>() / n;
    let sigma = (d.iter().map(|x| (x - mu_d) * (x - mu_d)).sum::<f64>() / n).sqrt();
    let selected = if sigma > 0.0 {
        d.iter()
            .enumerate()
            .filter(|(_, x)| x.abs() >= sigma)
            .map(|(i, _)| i)
            .collect()
    } else {
        Vec::new()
    };
    (sigma, selected)
}

/// Group-by binning: a value belongs to bin `k` when
/// `edges[k] ≤ v < edges[k+1]`, with the last bin closed on the right.
pub fn bin_members(coords: &[f64], edges: &[f64]) -> Vec<Vec<usize>> {
    let n_bins = edges.len() - 1;
    (0..n_bins)
        .map(|k| {
            coords
                .iter()
                .enumerate()
                .filter(|(_, &v)| {
                    v >= edges[k] && (v < edges[k + 1] || (k == n_bins - 1 && v <= edges[k + 1]))
                })
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| StandardNormal.sample(rng)).collect())
        .collect()
}

/// Samples drawn from isotropic unit Gaussians around `centers`, cycling
/// through the centers so groups are equal-sized (up to one).
pub fn gaussian_clusters(rng: &mut impl Rng, n: usize, centers: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % centers.len();
        let row = centers[c]
            .iter()
            .map(|&mu| mu + Distribution::<f64>::sample(&StandardNormal, rng))
            .collect::<Vec<f64>>();
        rows.push(row);
        labels.push(c);
    }
    (rows, labels)
}

/// Four groups at the corners of a rectangle spanned by two feature blocks:
/// features 0..10 carry ±`a`, features 10..20 carry ±`b`, the remaining
/// features are pure noise.
pub fn four_corner_centers(p: usize, a: f64, b: f64) -> Vec<Vec<f64>> {
    let corner = |sa: f64, sb: f64| -> Vec<f64> {
        (0..p)
            .map(|j| match j {
                0..=9 => sa * a,
                10..=19 => sb * b,
                _ => 0.0,
            })
            .collect()
    };
    vec![
        corner(1.0, 1.0),
        corner(1.0, -1.0),
        corner(-1.0, 1.0),
        corner(-1.0, -1.0),
    ]
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Index of the nearest point by Euclidean distance.
pub fn nearest(point: (f64, f64), candidates: &[(f64, f64)]) -> usize {
    let d = |c: &(f64, f64)| (c.0 - point.0).powi(2) + (c.1 - point.1).powi(2);
    (0..candidates.len())
        .min_by(|&a, &b| d(&candidates[a]).total_cmp(&d(&candidates[b])))
        .expect("non-empty")
}

pub fn centroid(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    (
        points.iter().map(|p| p.0).sum::<f64>() / n,
        points.iter().map(|p| p.1).sum::<f64>() / n,
    )
}
