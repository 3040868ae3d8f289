use std::collections::HashMap;

use serde::Serialize;

use crate::partition::{NodeId, PartitionTree, ROOT};
use crate::scalar::Scalar;

/// Top-down Sankey description of the partition tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyLayout {
    pub n_samples: usize,
    pub max_depth: usize,
    /// Pre-order, positive child before negative.
    pub nodes: Vec<HierarchyNode>,
    pub edges: Vec<HierarchyEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub depth: usize,
    /// Horizontal extent `[start, end)`; width is the member fraction.
    pub span: [f64; 2],
    pub members: usize,
    pub color: usize,
    pub is_leaf: bool,
    /// One strip per leaf cluster below (or at) this node.
    pub segments: Vec<ColorSegment>,
    /// Important features of the split made at this node.
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorSegment {
    pub cluster: NodeId,
    pub color: usize,
    pub span: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyEdge {
    pub parent: NodeId,
    pub child: NodeId,
    pub width: f64,
    pub span: [f64; 2],
}

pub fn hierarchy_layout<T: Scalar>(tree: &PartitionTree<T>, feature_names: &[String]) -> HierarchyLayout {
    let n = tree.n_samples() as f64;
    let frac = |offset: usize, len: usize| [offset as f64 / n, (offset + len) as f64 / n];

    // Integer offsets keep the tiling exact: a child's span is carved from
    // its parent's sample range.
    let mut offsets: HashMap<NodeId, usize> = HashMap::from([(ROOT, 0)]);
    let order = tree.preorder();
    for &id in &order {
        let node = tree.node(id).expect("live node");
        if let Some((pos, neg)) = node.children() {
            let start = offsets[&id];
            let pos_len = tree.node(pos).expect("child").members.len();
            offsets.insert(pos, start);
            offsets.insert(neg, start + pos_len);
        }
    }

    let leaves = tree.leaves();
    let mut nodes = Vec::with_capacity(order.len());
    let mut edges = Vec::new();
    let mut max_depth = 0;
    for &id in &order {
        let node = tree.node(id).expect("live node");
        let start = offsets[&id];
        let len = node.members.len();
        max_depth = max_depth.max(node.depth);
        let segments = leaves
            .iter()
            .filter(|leaf| {
                let o = offsets[*leaf];
                let l = tree.node(**leaf).expect("leaf").members.len();
                o >= start && o + l <= start + len && is_descendant(tree, **leaf, id)
            })
            .map(|&leaf| {
                let l = tree.node(leaf).expect("leaf");
                ColorSegment {
                    cluster: leaf,
                    color: l.color,
                    span: frac(offsets[&leaf], l.members.len()),
                }
            })
            .collect();
        let labels = node
            .important
            .as_ref()
            .map(|r| r.selected.iter().map(|&f| feature_names[f].clone()).collect())
            .unwrap_or_default();
        if let Some(parent) = node.parent {
            edges.push(HierarchyEdge {
                parent,
                child: id,
                width: len as f64 / n,
                span: frac(start, len),
            });
        }
        nodes.push(HierarchyNode {
            id,
            parent: node.parent,
            depth: node.depth,
            span: frac(start, len),
            members: len,
            color: node.color,
            is_leaf: node.is_leaf(),
            segments,
            labels,
        });
    }
    HierarchyLayout {
        n_samples: tree.n_samples(),
        max_depth,
        nodes,
        edges,
    }
}

fn is_descendant<T: Scalar>(tree: &PartitionTree<T>, node: NodeId, ancestor: NodeId) -> bool {
    let mut cur = Some(node);
    while let Some(id) = cur {
        if id == ancestor {
            return true;
        }
        cur = tree.node(id).ok().and_then(|n| n.parent);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_spans_everything() {
        let tree = PartitionTree::<f64>::with_samples(5).unwrap();
        let layout = hierarchy_layout(&tree, &[]);
        assert_eq!(layout.nodes.len(), 1);
        assert_eq!(layout.nodes[0].span, [0.0, 1.0]);
        assert_eq!(layout.nodes[0].segments.len(), 1);
        assert!(layout.edges.is_empty());
    }
}
