use std::collections::BTreeSet;

use serde::Serialize;

use super::{Rgb, ViewError, NO_LABEL, PALETTE};
use crate::data::{ClinicalTable, ExpressionMatrix};
use crate::scalar::Scalar;

/// Prior classification shown over the projection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overlay {
    /// Alphabetical by label.
    pub legend: Vec<LegendEntry>,
    pub points: Vec<OverlayPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendEntry {
    pub label: String,
    pub color: Rgb,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlayPoint {
    pub sample_id: String,
    pub label: String,
    pub color: Rgb,
}

pub fn overlay_labels<T: Scalar>(
    clinical: &ClinicalTable<T>,
    matrix: &ExpressionMatrix<T>,
    samples: &[usize],
) -> Result<Overlay, ViewError> {
    if !clinical.has_labels() {
        return Err(ViewError::NoLabels);
    }
    let label_of = |s: usize| clinical.label(s).unwrap_or(NO_LABEL);
    let labels: BTreeSet<&str> = samples.iter().map(|&s| label_of(s)).collect();
    let labels: Vec<&str> = labels.into_iter().collect();
    let color_of = |label: &str| {
        let k = labels.binary_search(&label).expect("label collected above");
        PALETTE[k % PALETTE.len()]
    };
    let points: Vec<OverlayPoint> = samples
        .iter()
        .map(|&s| OverlayPoint {
            sample_id: matrix.sample_ids()[s].clone(),
            label: label_of(s).to_owned(),
            color: color_of(label_of(s)),
        })
        .collect();
    let legend = labels
        .iter()
        .map(|&label| LegendEntry {
            label: label.to_owned(),
            color: color_of(label),
            count: points.iter().filter(|p| p.label == label).count(),
        })
        .collect();
    Ok(Overlay { legend, points })
}
