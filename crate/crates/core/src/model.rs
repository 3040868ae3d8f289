//! Versioned JSON model document (`vis-split-model/1`).
//!
//! A document carries, per split, only what classification needs: the
//! feature subset by name, the basis mean, the two used components, their
//! indices and the divider line. Member lists are never required; importing
//! re-derives membership by classifying the target matrix.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::ExpressionMatrix;
use crate::partition::{DividerLine, NodeId, PartitionError, PartitionTree, SplitPlane, SplitRule, ROOT};
use crate::scalar::Scalar;

pub const MODEL_SCHEMA: &str = "vis-split-model/1";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unsupported model schema {found:?} (expected {MODEL_SCHEMA:?})")]
    SchemaVersionMismatch { found: String },
    #[error("feature {0:?} is not present in the expression matrix")]
    UnresolvableFeature(String),
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

impl ModelError {
    pub fn name(&self) -> &'static str {
        match self {
            ModelError::SchemaVersionMismatch { .. } => "SchemaVersionMismatch",
            ModelError::UnresolvableFeature(_) => "UnresolvableFeature",
            ModelError::Malformed(_) => "MalformedModel",
            ModelError::Json(_) => "MalformedModel",
            ModelError::Partition(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub version: String,
    pub features: Vec<String>,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub parent: Option<String>,
    pub color: usize,
    pub members_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub important: Option<Vec<ImportantRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_avg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub sequence: usize,
    pub feature_subset: Vec<String>,
    pub mean: Vec<f64>,
    pub comp_x: Vec<f64>,
    pub comp_y: Vec<f64>,
    pub pc_x: usize,
    pub pc_y: usize,
    pub line: LineRecord,
    pub positive: String,
    pub negative: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineRecord {
    pub point: [f64; 2],
    pub normal: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportantRecord {
    pub feature: String,
    pub mu_a: f64,
    pub mu_b: f64,
}

impl ModelDocument {
    /// Pretty-printed JSON with a trailing newline. Floats are written in
    /// shortest round-trip form, so parsing restores them bit for bit.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn n_rules(&self) -> usize {
        self.nodes.iter().filter(|n| n.rule.is_some()).count()
    }
}

pub fn export_model<T: Scalar>(tree: &PartitionTree<T>, matrix: &ExpressionMatrix<T>) -> ModelDocument {
    let names = matrix.feature_names();
    let to_f64 = |v: &[T]| v.iter().map(|x| x.to_f64_lossless()).collect::<Vec<_>>();
    let nodes = tree
        .nodes()
        .map(|node| {
            let rule = node.rule.as_ref().map(|r| RuleRecord {
                sequence: r.sequence,
                feature_subset: r.plane.feature_subset.iter().map(|&f| names[f].clone()).collect(),
                mean: to_f64(&r.plane.mean),
                comp_x: to_f64(&r.plane.axis_x),
                comp_y: to_f64(&r.plane.axis_y),
                pc_x: r.plane.pc_x,
                pc_y: r.plane.pc_y,
                line: LineRecord {
                    point: [r.line.point().0.to_f64_lossless(), r.line.point().1.to_f64_lossless()],
                    normal: [r.line.normal().0.to_f64_lossless(), r.line.normal().1.to_f64_lossless()],
                },
                positive: r.positive.to_string(),
                negative: r.negative.to_string(),
            });
            let important = node.important.as_ref().map(|rep| {
                rep.selected
                    .iter()
                    .map(|&f| ImportantRecord {
                        feature: names[f].clone(),
                        mu_a: rep.mu_a[f].to_f64_lossless(),
                        mu_b: rep.mu_b[f].to_f64_lossless(),
                    })
                    .collect()
            });
            NodeRecord {
                id: node.id.to_string(),
                parent: node.parent.map(|p| p.to_string()),
                color: node.color,
                members_count: node.members.len(),
                rule,
                important,
                sigma_avg: node.important.as_ref().map(|r| r.sigma_avg.to_f64_lossless()),
                members: None,
            }
        })
        .collect();
    ModelDocument {
        version: MODEL_SCHEMA.to_owned(),
        features: names.to_vec(),
        nodes,
    }
}

fn parse_id(s: &str) -> Result<NodeId, ModelError> {
    s.parse()
        .map_err(|_| ModelError::Malformed(format!("bad node id {s:?}")))
}

/// Rebuilds a tree against `matrix`. Rule features are resolved by name;
/// membership and feature-importance reports are recomputed from the data.
pub fn import_model<T: Scalar>(
    doc: &ModelDocument,
    matrix: &ExpressionMatrix<T>,
) -> Result<PartitionTree<T>, ModelError> {
    if doc.version != MODEL_SCHEMA {
        return Err(ModelError::SchemaVersionMismatch {
            found: doc.version.clone(),
        });
    }
    let index: HashMap<&str, usize> = matrix
        .feature_names()
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_str(), i))
        .collect();

    let mut records: HashMap<NodeId, &NodeRecord> = HashMap::new();
    for rec in &doc.nodes {
        if records.insert(parse_id(&rec.id)?, rec).is_some() {
            return Err(ModelError::Malformed(format!("node {} listed twice", rec.id)));
        }
    }
    let root = records
        .get(&ROOT)
        .ok_or_else(|| ModelError::Malformed("document has no root node n0".into()))?;
    if root.parent.is_some() {
        return Err(ModelError::Malformed("root node has a parent".into()));
    }

    let mut tree = PartitionTree::create_root(matrix)?;
    let mut rules: Vec<(NodeId, &RuleRecord)> = Vec::new();
    for (&id, rec) in &records {
        if let Some(rule) = &rec.rule {
            rules.push((id, rule));
        }
    }
    rules.sort_by_key(|(id, r)| (r.sequence, *id));

    for (id, r) in rules {
        let feature_subset = r
            .feature_subset
            .iter()
            .map(|name| {
                index
                    .get(name.as_str())
                    .copied()
                    .ok_or_else(|| ModelError::UnresolvableFeature(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let width = feature_subset.len();
        if r.mean.len() != width || r.comp_x.len() != width || r.comp_y.len() != width {
            return Err(ModelError::Malformed(format!(
                "rule on {id} has vectors of inconsistent length"
            )));
        }
        let from = |v: &[f64]| v.iter().map(|&x| T::from_f64_lossy(x)).collect::<Vec<_>>();
        let plane = SplitPlane {
            feature_subset,
            mean: from(&r.mean),
            axis_x: from(&r.comp_x),
            axis_y: from(&r.comp_y),
            pc_x: r.pc_x,
            pc_y: r.pc_y,
        };
        let line = DividerLine::new(
            (T::from_f64_lossy(r.line.point[0]), T::from_f64_lossy(r.line.point[1])),
            (T::from_f64_lossy(r.line.normal[0]), T::from_f64_lossy(r.line.normal[1])),
        )?;
        let positive = parse_id(&r.positive)?;
        let negative = parse_id(&r.negative)?;
        let color_of = |child: NodeId| -> Result<usize, ModelError> {
            let rec = records
                .get(&child)
                .ok_or_else(|| ModelError::Malformed(format!("child {child} of {id} is missing")))?;
            if rec.parent.as_deref() != Some(id.to_string().as_str()) {
                return Err(ModelError::Malformed(format!("{child} does not name {id} as parent")));
            }
            Ok(rec.color)
        };
        let colors = (color_of(positive)?, color_of(negative)?);
        if !tree.contains(id) {
            return Err(ModelError::Malformed(format!(
                "rule on {id} precedes the split that creates it"
            )));
        }
        tree.restore_split(
            matrix,
            id,
            SplitRule {
                plane,
                line,
                positive,
                negative,
                sequence: r.sequence,
            },
            colors,
        )?;
    }
    if tree.nodes().count() != records.len() {
        return Err(ModelError::Malformed(
            "document contains nodes that are not reachable from the root".into(),
        ));
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::fit_pca;

    fn dataset() -> ExpressionMatrix<f64> {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let x = i as f64;
                vec![x, (x * 0.7).sin(), (x * 1.3).cos(), if i < 6 { -2.0 } else { 2.0 }]
            })
            .collect();
        ExpressionMatrix::new(
            (0..12).map(|i| format!("s{i}")).collect(),
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            rows,
        )
        .unwrap()
    }

    fn split_tree(m: &ExpressionMatrix<f64>) -> PartitionTree<f64> {
        let mut tree = PartitionTree::create_root(m).unwrap();
        let all: Vec<usize> = (0..m.n_samples()).collect();
        let b = fit_pca(m, &all, &[0, 1, 3]).unwrap();
        let line = DividerLine::new((0.3, 0.0), (1.0, 0.0)).unwrap();
        let (pos, _) = tree.apply_split(m, ROOT, &b, 0, 1, line).unwrap();
        let members = tree.node(pos).unwrap().members.clone();
        let b2 = fit_pca(m, &members, &[0, 1, 2, 3]).unwrap();
        let line2 = DividerLine::new((0.0, 0.0), (0.6, 0.8)).unwrap();
        tree.apply_split(m, pos, &b2, 0, 1, line2).unwrap();
        tree
    }

    #[test]
    fn round_trip_preserves_assignment_and_bytes() {
        let m = dataset();
        let tree = split_tree(&m);
        let doc = export_model(&tree, &m);
        assert_eq!(doc.n_rules(), 2);
        let text = doc.to_json();
        let back = import_model(&ModelDocument::from_json(&text).unwrap(), &m).unwrap();
        assert_eq!(back.assignment(), tree.assignment());
        assert_eq!(export_model(&back, &m).to_json(), text);
    }

    #[test]
    fn single_leaf_has_no_rules() {
        let m = dataset();
        let tree = PartitionTree::create_root(&m).unwrap();
        let doc = export_model(&tree, &m);
        assert_eq!(doc.n_rules(), 0);
        assert_eq!(doc.nodes.len(), 1);
        let back = import_model(&doc, &m).unwrap();
        assert_eq!(back.leaves(), vec![ROOT]);
    }

    #[test]
    fn rejects_unknown_feature_and_version() {
        let m = dataset();
        let mut doc = export_model(&split_tree(&m), &m);
        doc.version = "vis-split-model/2".into();
        assert!(matches!(
            import_model(&doc, &m),
            Err(ModelError::SchemaVersionMismatch { .. })
        ));
        doc.version = MODEL_SCHEMA.into();
        doc.nodes[0].rule.as_mut().unwrap().feature_subset[0] = "nope".into();
        let err = import_model(&doc, &m).unwrap_err();
        assert_eq!(err.name(), "UnresolvableFeature");
    }
}
