//! Single-analyst session: the dataset, the partition tree, a PCA cache and
//! a revision counter. Both the HTTP service and script replay drive the tree
//! through this type, so they produce identical models.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{ClinicalTable, ExpressionMatrix};
use crate::model::{export_model, import_model, ModelDocument, ModelError};
use crate::partition::{DividerLine, ImportantFeatureReport, NodeId, PartitionError, PartitionTree};
use crate::pca::{fit_pca, Loadings, PcaBasis, PcaError, Projection2D};
use crate::scalar::Scalar;
use crate::survival::{curves_for_clusters, ClusterCurves, SurvivalError};
use crate::viewmodel::{
    binned_heatmap, heatmap_overview, hierarchy_layout, overlay_labels, Axis, BinnedHeatmap, DivergingScale,
    HeatmapLayout, HierarchyLayout, Overlay, ViewError, DEFAULT_BINS, DEFAULT_CMAX,
};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("stale revision {given} (current {current})")]
    StaleRevision { given: u64, current: u64 },
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    View(#[from] ViewError),
    #[error(transparent)]
    Survival(#[from] SurvivalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SessionError {
    pub fn name(&self) -> &'static str {
        match self {
            SessionError::UnknownNode(_) => "UnknownNode",
            SessionError::UnknownFeature(_) => "UnknownFeature",
            SessionError::StaleRevision { .. } => "StaleRevision",
            SessionError::Partition(PartitionError::UnknownNode(_)) => "UnknownNode",
            SessionError::Partition(e) => e.name(),
            SessionError::Pca(e) => e.name(),
            SessionError::View(e) => e.name(),
            SessionError::Survival(e) => e.name(),
            SessionError::Model(e) => e.name(),
        }
    }

    pub fn is_unknown_node(&self) -> bool {
        matches!(
            self,
            SessionError::UnknownNode(_) | SessionError::Partition(PartitionError::UnknownNode(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub point: [f64; 2],
    pub normal: [f64; 2],
}

/// One recorded analyst action. Serialized as a JSON object per line:
/// `{"op":"split","node":"n0","pcx":0,"pcy":1,"features":[],"line":{...}}`
/// or `{"op":"prune","node":"n1"}`. Empty `features` means all features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Command {
    Split {
        node: String,
        pcx: usize,
        pcy: usize,
        #[serde(default)]
        features: Vec<String>,
        line: LineSpec,
    },
    Prune {
        node: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("script command {index}: {message}")]
pub struct ScriptError {
    /// 1-based command number.
    pub index: usize,
    pub message: String,
}

/// Parses a line-delimited script; blank lines and `#` comments are skipped.
pub fn parse_script(text: &str) -> Result<Vec<Command>, ScriptError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cmd = serde_json::from_str(line).map_err(|e| ScriptError {
            index: out.len() + 1,
            message: e.to_string(),
        })?;
        out.push(cmd);
    }
    Ok(out)
}

pub fn write_script(commands: &[Command]) -> String {
    let mut s = String::new();
    for c in commands {
        s.push_str(&serde_json::to_string(c).expect("command serializes"));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionOptions {
    pub bins: usize,
    pub cmax: f64,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            cmax: DEFAULT_CMAX,
        }
    }
}

/// Everything the projection panel shows for one node.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionView<T> {
    pub node: NodeId,
    pub features: Vec<String>,
    pub projection: Projection2D<T>,
    pub bins_x: BinnedHeatmap<T>,
    pub bins_y: BinnedHeatmap<T>,
    pub loadings: Loadings<T>,
    pub variances: Vec<T>,
    pub explained_ratio: Vec<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitOutcome<T> {
    pub positive: NodeId,
    pub negative: NodeId,
    pub revision: u64,
    pub important: Option<ImportantFeatureReport<T>>,
    pub selected_features: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PruneOutcome {
    pub node: NodeId,
    pub removed: Vec<NodeId>,
    pub leaves: usize,
    pub revision: u64,
}

type BasisKey = (NodeId, Vec<usize>);

pub struct Session<T> {
    matrix: Arc<ExpressionMatrix<T>>,
    clinical: Arc<ClinicalTable<T>>,
    tree: PartitionTree<T>,
    cache: Mutex<HashMap<BasisKey, Arc<PcaBasis<T>>>>,
    revision: u64,
    options: SessionOptions,
}

impl<T: Scalar> Session<T> {
    pub fn new(
        matrix: ExpressionMatrix<T>,
        clinical: ClinicalTable<T>,
        options: SessionOptions,
    ) -> Result<Self, SessionError> {
        let tree = PartitionTree::create_root(&matrix)?;
        Ok(Self {
            matrix: Arc::new(matrix),
            clinical: Arc::new(clinical),
            tree,
            cache: Mutex::new(HashMap::new()),
            revision: 0,
            options,
        })
    }

    pub fn matrix(&self) -> &ExpressionMatrix<T> {
        &self.matrix
    }

    pub fn clinical(&self) -> &ClinicalTable<T> {
        &self.clinical
    }

    pub fn tree(&self) -> &PartitionTree<T> {
        &self.tree
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn options(&self) -> SessionOptions {
        self.options
    }

    pub fn check_revision(&self, given: u64) -> Result<(), SessionError> {
        if given != self.revision {
            return Err(SessionError::StaleRevision {
                given,
                current: self.revision,
            });
        }
        Ok(())
    }

    pub fn node_id(&self, token: &str) -> Result<NodeId, SessionError> {
        let id: NodeId = token
            .parse()
            .map_err(|_| SessionError::UnknownNode(token.to_owned()))?;
        if !self.tree.contains(id) {
            return Err(SessionError::UnknownNode(token.to_owned()));
        }
        Ok(id)
    }

    /// Feature names to indices; an empty list selects every feature.
    pub fn resolve_features(&self, names: &[String]) -> Result<Vec<usize>, SessionError> {
        if names.is_empty() {
            return Ok((0..self.matrix.n_features()).collect());
        }
        names
            .iter()
            .map(|n| {
                self.matrix
                    .feature_index(n)
                    .ok_or_else(|| SessionError::UnknownFeature(n.clone()))
            })
            .collect()
    }

    /// PCA fitted on a node's members, cached per (node, feature subset).
    pub fn basis(&self, node: NodeId, features: &[usize]) -> Result<Arc<PcaBasis<T>>, SessionError> {
        let key = (node, features.to_vec());
        if let Some(b) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(b));
        }
        let members = &self.tree.node(node)?.members;
        let basis = Arc::new(fit_pca(&self.matrix, members, features)?);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&basis));
        Ok(basis)
    }

    pub fn cached_bases(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    pub fn projection_view(
        &self,
        node: NodeId,
        pcx: usize,
        pcy: usize,
        feature_names: &[String],
    ) -> Result<ProjectionView<T>, SessionError> {
        let features = self.resolve_features(feature_names)?;
        let basis = self.basis(node, &features)?;
        let members = &self.tree.node(node)?.members;
        let projection = basis.project(&self.matrix, members, pcx, pcy)?;
        let bins_x = binned_heatmap(&projection, &self.matrix, &basis, Axis::X, self.options.bins)?;
        let bins_y = binned_heatmap(&projection, &self.matrix, &basis, Axis::Y, self.options.bins)?;
        let loadings = basis.loadings(pcx, pcy)?;
        Ok(ProjectionView {
            node,
            features: features
                .iter()
                .map(|&f| self.matrix.feature_names()[f].clone())
                .collect(),
            projection,
            bins_x,
            bins_y,
            loadings,
            variances: basis.variances().to_vec(),
            explained_ratio: basis.explained_ratio(),
        })
    }

    pub fn split(
        &mut self,
        node: NodeId,
        pcx: usize,
        pcy: usize,
        feature_names: &[String],
        line: LineSpec,
    ) -> Result<SplitOutcome<T>, SessionError> {
        let features = self.resolve_features(feature_names)?;
        let basis = self.basis(node, &features)?;
        let line = DividerLine::new(
            (T::from_f64_lossy(line.point[0]), T::from_f64_lossy(line.point[1])),
            (T::from_f64_lossy(line.normal[0]), T::from_f64_lossy(line.normal[1])),
        )?;
        let (positive, negative) = self
            .tree
            .apply_split(&self.matrix, node, &basis, pcx, pcy, line)?;
        self.revision += 1;
        let important = self.tree.node(node)?.important.clone();
        let selected_features = important
            .as_ref()
            .map(|r| {
                r.selected
                    .iter()
                    .map(|&f| self.matrix.feature_names()[f].clone())
                    .collect()
            })
            .unwrap_or_default();
        Ok(SplitOutcome {
            positive,
            negative,
            revision: self.revision,
            important,
            selected_features,
        })
    }

    pub fn prune(&mut self, node: NodeId) -> Result<PruneOutcome, SessionError> {
        let removed = self.tree.prune(node)?;
        self.cache
            .lock()
            .expect("cache lock")
            .retain(|(id, _), _| !removed.contains(id));
        self.revision += 1;
        Ok(PruneOutcome {
            node,
            removed,
            leaves: self.tree.leaves().len(),
            revision: self.revision,
        })
    }

    /// Applies a recorded command. Returns the new revision.
    pub fn apply(&mut self, command: &Command) -> Result<u64, SessionError> {
        match command {
            Command::Split {
                node,
                pcx,
                pcy,
                features,
                line,
            } => {
                let id = self.node_id(node)?;
                Ok(self.split(id, *pcx, *pcy, features, *line)?.revision)
            }
            Command::Prune { node } => {
                let id = self.node_id(node)?;
                Ok(self.prune(id)?.revision)
            }
        }
    }

    /// Runs a script, stopping at the first failing command.
    pub fn replay(&mut self, commands: &[Command]) -> Result<(), ScriptError> {
        for (i, c) in commands.iter().enumerate() {
            self.apply(c).map_err(|e| ScriptError {
                index: i + 1,
                message: format!("{}: {e}", e.name()),
            })?;
        }
        Ok(())
    }

    pub fn export(&self) -> ModelDocument {
        export_model(&self.tree, &self.matrix)
    }

    pub fn import(&mut self, doc: &ModelDocument) -> Result<u64, SessionError> {
        self.tree = import_model(doc, &self.matrix)?;
        self.cache.lock().expect("cache lock").clear();
        self.revision += 1;
        Ok(self.revision)
    }

    pub fn hierarchy(&self) -> HierarchyLayout {
        hierarchy_layout(&self.tree, self.matrix.feature_names())
    }

    pub fn heatmap(&self) -> HeatmapLayout<T> {
        heatmap_overview(&self.tree, &self.matrix)
    }

    pub fn survival(&self) -> Result<ClusterCurves<T>, SessionError> {
        Ok(curves_for_clusters(&self.tree, &self.clinical)?)
    }

    pub fn overlay(&self) -> Result<Overlay, SessionError> {
        let all: Vec<usize> = (0..self.matrix.n_samples()).collect();
        Ok(overlay_labels(&self.clinical, &self.matrix, &all)?)
    }

    pub fn color_scale(&self) -> DivergingScale {
        DivergingScale::new(self.options.cmax)
    }

    /// Classifies rows given with their own feature names.
    pub fn classify_rows(&self, feature_names: &[String], rows: &[Vec<T>]) -> Result<Vec<NodeId>, SessionError> {
        let lookup: HashMap<usize, usize> = feature_names
            .iter()
            .enumerate()
            .filter_map(|(col, name)| self.matrix.feature_index(name).map(|f| (f, col)))
            .collect();
        rows.iter()
            .map(|row| {
                Ok(self
                    .tree
                    .classify_with(|f| lookup.get(&f).and_then(|&c| row.get(c)).copied())?)
            })
            .collect()
    }
}
