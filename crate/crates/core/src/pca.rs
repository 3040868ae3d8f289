//! PCA on sample/feature subsets of an expression matrix.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::ExpressionMatrix;
use crate::linalg;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcaError {
    #[error("PCA needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("PCA needs at least 2 features, got {0}")]
    TooFewFeatures(usize),
    #[error("component pair ({pc_x}, {pc_y}) is invalid for a basis with {n_components} components")]
    BadComponentIndex {
        pc_x: usize,
        pc_y: usize,
        n_components: usize,
    },
    #[error("index {0} is out of range")]
    OutOfRange(usize),
}

impl PcaError {
    pub fn name(&self) -> &'static str {
        match self {
            PcaError::TooFewSamples(_) => "TooFewSamples",
            PcaError::TooFewFeatures(_) => "TooFewFeatures",
            PcaError::BadComponentIndex { .. } => "BadComponentIndex",
            PcaError::OutOfRange(_) => "OutOfRange",
        }
    }
}

/// Frozen PCA fit: mean, orthonormal components and explained variances for
/// one sample/feature subset.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis<T> {
    feature_subset: Vec<usize>,
    mean: Vec<T>,
    components: Vec<Vec<T>>,
    variances: Vec<T>,
    n_samples_fit: usize,
}

/// Fits PCA with a thin SVD of the centered data.
///
/// There are `min(n − 1, p)` components, ordered by descending variance.
/// Each component's entry of largest magnitude is non-negative (first such
/// entry on ties). Identical rows produce a valid basis whose variances are
/// all zero; see [`PcaBasis::is_degenerate`].
pub fn fit_pca<T: Scalar>(
    matrix: &ExpressionMatrix<T>,
    samples: &[usize],
    features: &[usize],
) -> Result<PcaBasis<T>, PcaError> {
    let n = samples.len();
    let p = features.len();
    if n < 3 {
        return Err(PcaError::TooFewSamples(n));
    }
    if p < 2 {
        return Err(PcaError::TooFewFeatures(p));
    }
    if let Some(&bad) = samples.iter().find(|&&s| s >= matrix.n_samples()) {
        return Err(PcaError::OutOfRange(bad));
    }
    if let Some(&bad) = features.iter().find(|&&f| f >= matrix.n_features()) {
        return Err(PcaError::OutOfRange(bad));
    }

    let first = samples[0];
    let identical = samples
        .iter()
        .all(|&s| features.iter().all(|&f| matrix.value(s, f) == matrix.value(first, f)));
    let mean: Vec<T> = if identical {
        features.iter().map(|&f| matrix.value(first, f)).collect()
    } else {
        features
            .iter()
            .map(|&f| matrix.feature_mean(f, samples))
            .collect()
    };

    let centered: Vec<Vec<T>> = features
        .iter()
        .zip(&mean)
        .map(|(&f, &mu)| samples.iter().map(|&s| matrix.value(s, f) - mu).collect())
        .collect();
    let svd = linalg::right_svd(centered, n);

    let k = (n - 1).min(p);
    let denom = <T as Scalar>::from_usize(n - 1);
    let mut components = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    for (sigma, mut vector) in svd.singular.into_iter().zip(svd.vectors).take(k) {
        apply_sign_convention(&mut vector);
        components.push(vector);
        variances.push((sigma * sigma / denom).max(T::zero()));
    }
    Ok(PcaBasis {
        feature_subset: features.to_vec(),
        mean,
        components,
        variances,
        n_samples_fit: n,
    })
}

fn apply_sign_convention<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < T::zero()) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// `Σ_k (row[subset[k]] − mean[k]) · axis[k]`, shared by every projection
/// path so that split-time and classify-time coordinates agree bit for bit.
pub(crate) fn centered_dot<T: Scalar>(
    fetch: &impl Fn(usize) -> Option<T>,
    subset: &[usize],
    mean: &[T],
    axis: &[T],
) -> Option<T> {
    let mut acc = T::zero();
    for ((&f, &mu), &w) in subset.iter().zip(mean).zip(axis) {
        acc = acc + (fetch(f)? - mu) * w;
    }
    Some(acc)
}

impl<T: Scalar> PcaBasis<T> {
    pub fn feature_subset(&self) -> &[usize] {
        &self.feature_subset
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn components(&self) -> &[Vec<T>] {
        &self.components
    }

    pub fn variances(&self) -> &[T] {
        &self.variances
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn n_samples_fit(&self) -> usize {
        self.n_samples_fit
    }

    pub fn is_degenerate(&self) -> bool {
        self.variances.iter().all(|v| *v == T::zero())
    }

    /// Fraction of the total variance carried by each component.
    pub fn explained_ratio(&self) -> Vec<T> {
        let total: T = self.variances.iter().copied().sum();
        self.variances
            .iter()
            .map(|&v| if total > T::zero() { v / total } else { T::zero() })
            .collect()
    }

    pub fn check_pair(&self, pc_x: usize, pc_y: usize) -> Result<(), PcaError> {
        let n_components = self.n_components();
        if pc_x == pc_y || pc_x >= n_components || pc_y >= n_components {
            return Err(PcaError::BadComponentIndex {
                pc_x,
                pc_y,
                n_components,
            });
        }
        Ok(())
    }

    /// Coordinate of a full-width row on one component.
    pub fn score(&self, row: &[T], component: usize) -> T {
        centered_dot(
            &|f| row.get(f).copied(),
            &self.feature_subset,
            &self.mean,
            &self.components[component],
        )
        .expect("row covers the basis features")
    }

    /// Projects samples (not necessarily the fitting set) onto two components.
    pub fn project(
        &self,
        matrix: &ExpressionMatrix<T>,
        samples: &[usize],
        pc_x: usize,
        pc_y: usize,
    ) -> Result<Projection2D<T>, PcaError> {
        self.check_pair(pc_x, pc_y)?;
        if let Some(&bad) = samples.iter().find(|&&s| s >= matrix.n_samples()) {
            return Err(PcaError::OutOfRange(bad));
        }
        let coords = samples
            .iter()
            .map(|&s| {
                let row = matrix.row(s);
                (self.score(row, pc_x), self.score(row, pc_y))
            })
            .collect();
        Ok(Projection2D {
            pc_x,
            pc_y,
            samples: samples.to_vec(),
            sample_ids: samples
                .iter()
                .map(|&s| matrix.sample_ids()[s].clone())
                .collect(),
            coords,
        })
    }

    /// Biplot vectors for each basis feature: component entries scaled by
    /// the square root of the component variance, plus the raw entries.
    pub fn loadings(&self, pc_x: usize, pc_y: usize) -> Result<Loadings<T>, PcaError> {
        self.check_pair(pc_x, pc_y)?;
        let sx = self.variances[pc_x].sqrt();
        let sy = self.variances[pc_y].sqrt();
        let cx = &self.components[pc_x];
        let cy = &self.components[pc_y];
        let features = self
            .feature_subset
            .iter()
            .enumerate()
            .map(|(k, &feature)| FeatureLoading {
                feature,
                vector: (cx[k] * sx, cy[k] * sy),
                raw: (cx[k], cy[k]),
            })
            .collect();
        Ok(Loadings {
            pc_x,
            pc_y,
            features,
        })
    }
}

/// Samples placed on a pair of components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection2D<T> {
    pub pc_x: usize,
    pub pc_y: usize,
    /// Matrix row indices, parallel to `coords`.
    #[serde(skip)]
    pub samples: Vec<usize>,
    pub sample_ids: Vec<String>,
    pub coords: Vec<(T, T)>,
}

impl<T: Scalar> Projection2D<T> {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// `(min_x, max_x, min_y, max_y)`; `None` when empty.
    pub fn extent(&self) -> Option<(T, T, T, T)> {
        let (&(x0, y0), rest) = self.coords.split_first()?;
        Some(rest.iter().fold((x0, x0, y0, y0), |(a, b, c, d), &(x, y)| {
            (a.min(x), b.max(x), c.min(y), d.max(y))
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureLoading<T> {
    /// Matrix feature index.
    pub feature: usize,
    pub vector: (T, T),
    pub raw: (T, T),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Loadings<T> {
    pub pc_x: usize,
    pub pc_y: usize,
    pub features: Vec<FeatureLoading<T>>,
}
