use std::cmp::Ordering;

use serde::Serialize;

use super::ViewError;
use crate::data::ExpressionMatrix;
use crate::pca::{PcaBasis, Projection2D};
use crate::scalar::Scalar;

pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Heatmap aligned with one projection axis: equal-width bins along the
/// axis, one row per basis feature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedHeatmap<T> {
    pub axis: Axis,
    /// Component shown on this axis.
    pub pc: usize,
    /// `n_bins + 1` edges from the minimum to the maximum coordinate.
    pub edges: Vec<T>,
    pub counts: Vec<usize>,
    /// Sorted by descending absolute eigenvector entry.
    pub features: Vec<BinnedFeature<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedFeature<T> {
    pub feature: usize,
    pub name: String,
    /// Entry of this feature in the axis component.
    pub eigen: T,
    /// Mean per bin; `None` marks an empty bin.
    pub cells: Vec<Option<T>>,
}

/// Bin holding `v`: the last `k` with `edges[k] ≤ v`, clamped to the
/// valid range, so the maximum lands in the final bin.
pub fn bin_index<T: Scalar>(v: T, edges: &[T]) -> usize {
    let n_bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[n_bins]);
    let width = hi - lo;
    if width <= T::zero() || width.is_nan() {
        return 0;
    }
    let guess = ((v - lo) / width * <T as Scalar>::from_usize(n_bins))
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(n_bins - 1);
    let mut k = guess;
    while k > 0 && v < edges[k] {
        k -= 1;
    }
    while k + 1 < n_bins && v >= edges[k + 1] {
        k += 1;
    }
    k
}

pub fn binned_heatmap<T: Scalar>(
    projection: &Projection2D<T>,
    matrix: &ExpressionMatrix<T>,
    basis: &PcaBasis<T>,
    axis: Axis,
    n_bins: usize,
) -> Result<BinnedHeatmap<T>, ViewError> {
    if n_bins == 0 {
        return Err(ViewError::BadBinCount);
    }
    let (min_x, max_x, min_y, max_y) = projection.extent().ok_or(ViewError::EmptyProjection)?;
    let (pc, lo, hi) = match axis {
        Axis::X => (projection.pc_x, min_x, max_x),
        Axis::Y => (projection.pc_y, min_y, max_y),
    };
    let coord = |i: usize| match axis {
        Axis::X => projection.coords[i].0,
        Axis::Y => projection.coords[i].1,
    };
    let step = (hi - lo) / <T as Scalar>::from_usize(n_bins);
    let mut edges: Vec<T> = (0..n_bins)
        .map(|k| lo + step * <T as Scalar>::from_usize(k))
        .collect();
    edges.push(hi);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_bins];
    for (i, &s) in projection.samples.iter().enumerate() {
        members[bin_index(coord(i), &edges)].push(s);
    }
    let counts = members.iter().map(Vec::len).collect();

    let component = &basis.components()[pc];
    let mut order: Vec<usize> = (0..basis.feature_subset().len()).collect();
    order.sort_by(|&a, &b| {
        component[b]
            .abs()
            .partial_cmp(&component[a].abs())
            .unwrap_or(Ordering::Equal)
    });
    let features = order
        .into_iter()
        .map(|k| {
            let feature = basis.feature_subset()[k];
            BinnedFeature {
                feature,
                name: matrix.feature_names()[feature].clone(),
                eigen: component[k],
                cells: members
                    .iter()
                    .map(|bin| {
                        (!bin.is_empty()).then(|| matrix.feature_mean(feature, bin))
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(BinnedHeatmap {
        axis,
        pc,
        edges,
        counts,
        features,
    })
}
