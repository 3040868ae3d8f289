//! Iterative PCA partitioning of expression data.
//!
//! An analyst repeatedly fits PCA to the samples of one cluster, draws a
//! divider line in a two-component projection and splits the cluster. The
//! resulting binary tree is an explicit classifier: every split stores the
//! frozen projection plane and line, plus the features whose between-side
//! mean difference stands out. Survival curves, heatmaps and Sankey layouts
//! summarize the current clusters.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, which is what the service and
//! CLI use.

pub mod data;
mod linalg;
pub mod model;
pub mod partition;
pub mod pca;
pub mod scalar;
pub mod session;
pub mod survival;
pub mod viewmodel;

pub use data::{
    load_clinical, load_expression, parse_clinical, parse_expression, zscore_normalize, DataError, DatasetSummary,
    LoadOptions, Orientation,
};
pub use model::{export_model, import_model, ModelDocument, ModelError, MODEL_SCHEMA};
pub use partition::{important_features, NodeId, PartitionError, ROOT};
pub use pca::{fit_pca, PcaError};
pub use scalar::Scalar;
pub use session::{parse_script, write_script, Command, LineSpec, ScriptError, SessionError, SessionOptions};
pub use survival::{kaplan_meier, CurveKey, SurvivalError, SurvivalRecord};

pub type ExpressionMatrix = data::ExpressionMatrix<f64>;
pub type ClinicalTable = data::ClinicalTable<f64>;
pub type ClinicalRecord = data::ClinicalRecord<f64>;
pub type PcaBasis = pca::PcaBasis<f64>;
pub type Projection2D = pca::Projection2D<f64>;
pub type Loadings = pca::Loadings<f64>;
pub type DividerLine = partition::DividerLine<f64>;
pub type SplitPlane = partition::SplitPlane<f64>;
pub type PartitionTree = partition::PartitionTree<f64>;
pub type PartitionNode = partition::PartitionNode<f64>;
pub type ImportantFeatureReport = partition::ImportantFeatureReport<f64>;
pub type SurvivalCurve = survival::SurvivalCurve<f64>;
pub type ClusterCurves = survival::ClusterCurves<f64>;
pub type HeatmapLayout = viewmodel::HeatmapLayout<f64>;
pub type BinnedHeatmap = viewmodel::BinnedHeatmap<f64>;
pub type Session = session::Session<f64>;
pub type ProjectionView = session::ProjectionView<f64>;
pub type SplitOutcome = session::SplitOutcome<f64>;
