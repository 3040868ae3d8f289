use std::cmp::Ordering;

use serde::Serialize;

use crate::data::ExpressionMatrix;
use crate::partition::{NodeId, PartitionTree};
use crate::scalar::Scalar;

/// Samples as columns grouped into leaf bands; features as rows grouped into
/// one band per split plus a residual band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapLayout<T> {
    pub columns: Vec<String>,
    pub column_bands: Vec<ColumnBand>,
    pub rows: Vec<String>,
    pub row_bands: Vec<RowBand>,
    /// `values[row][column]`.
    pub values: Vec<Vec<T>>,
    #[serde(skip)]
    pub column_samples: Vec<usize>,
    #[serde(skip)]
    pub row_features: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnBand {
    pub cluster: NodeId,
    pub color: usize,
    /// Column index range `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub span: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowBand {
    /// Node whose split claimed these features; `None` for the residual band.
    pub split: Option<NodeId>,
    pub start: usize,
    pub end: usize,
    pub span: [f64; 2],
}

pub fn heatmap_overview<T: Scalar>(tree: &PartitionTree<T>, matrix: &ExpressionMatrix<T>) -> HeatmapLayout<T> {
    let n = matrix.n_samples();
    let p = matrix.n_features();

    let mut column_samples = Vec::with_capacity(n);
    let mut column_bands = Vec::new();
    for leaf in tree.leaves() {
        let node = tree.node(leaf).expect("leaf");
        let start = column_samples.len();
        column_samples.extend(node.members.iter().copied());
        let end = column_samples.len();
        column_bands.push(ColumnBand {
            cluster: leaf,
            color: node.color,
            start,
            end,
            span: [start as f64 / n as f64, end as f64 / n as f64],
        });
    }

    let mut claimed = vec![false; p];
    let mut row_features = Vec::with_capacity(p);
    let mut row_bands = Vec::new();
    for node in tree.splits_in_order() {
        let Some(report) = &node.important else { continue };
        let mut band: Vec<usize> = report.selected.iter().copied().filter(|&f| !claimed[f]).collect();
        if band.is_empty() {
            continue;
        }
        let key = |f: usize| report.mu_a[f].max(report.mu_b[f]);
        band.sort_by(|&a, &b| key(b).partial_cmp(&key(a)).unwrap_or(Ordering::Equal));
        for &f in &band {
            claimed[f] = true;
        }
        let start = row_features.len();
        row_features.extend(band);
        row_bands.push(RowBand {
            split: Some(node.id),
            start,
            end: row_features.len(),
            span: [0.0, 0.0],
        });
    }
    let start = row_features.len();
    row_features.extend((0..p).filter(|&f| !claimed[f]));
    if row_features.len() > start {
        row_bands.push(RowBand {
            split: None,
            start,
            end: row_features.len(),
            span: [0.0, 0.0],
        });
    }
    for band in &mut row_bands {
        band.span = [band.start as f64 / p as f64, band.end as f64 / p as f64];
    }

    let values = row_features
        .iter()
        .map(|&f| column_samples.iter().map(|&s| matrix.value(s, f)).collect())
        .collect();
    HeatmapLayout {
        columns: column_samples.iter().map(|&s| matrix.sample_ids()[s].clone()).collect(),
        column_bands,
        rows: row_features.iter().map(|&f| matrix.feature_names()[f].clone()).collect(),
        row_bands,
        values,
        column_samples,
        row_features,
    }
}
