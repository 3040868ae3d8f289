//! Layout-ready descriptions of the four linked views.
//!
//! Everything here is a pure function of a tree/matrix snapshot. Spans and
//! positions are normalized to `[0, 1]`; rendering is left to the client.

mod binned;
mod color;
mod compare;
mod heatmap;
mod hierarchy;
mod overlay;

use thiserror::Error;

pub use binned::{bin_index, binned_heatmap, Axis, BinnedFeature, BinnedHeatmap, DEFAULT_BINS};
pub use color::{point_colors, DivergingScale, Rgb, DEFAULT_CMAX, PALETTE};
pub use compare::{adjusted_rand_index, compare_labelings, Comparison};
pub use heatmap::{heatmap_overview, ColumnBand, HeatmapLayout, RowBand};
pub use hierarchy::{hierarchy_layout, ColorSegment, HierarchyEdge, HierarchyLayout, HierarchyNode};
pub use overlay::{overlay_labels, LegendEntry, Overlay, OverlayPoint};

/// Label shown for samples without a prior classification.
pub const NO_LABEL: &str = "none";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("no feature selected")]
    NoFeatureSelected,
    #[error("no sample carries a prior label")]
    NoLabels,
    #[error("labelings cover different samples: {0}")]
    UniverseMismatch(String),
    #[error("projection is empty")]
    EmptyProjection,
    #[error("bin count must be at least 1")]
    BadBinCount,
    #[error("index {0} is out of range")]
    OutOfRange(usize),
}

impl ViewError {
    pub fn name(&self) -> &'static str {
        match self {
            ViewError::NoFeatureSelected => "NoFeatureSelected",
            ViewError::NoLabels => "NoLabels",
            ViewError::UniverseMismatch(_) => "UniverseMismatch",
            ViewError::EmptyProjection => "EmptyProjection",
            ViewError::BadBinCount => "BadBinCount",
            ViewError::OutOfRange(_) => "OutOfRange",
        }
    }
}
