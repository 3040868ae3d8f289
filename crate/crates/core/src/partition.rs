//! The binary partition tree built from divider-line splits.
//!
//! Every internal node freezes the plane it was split in (feature subset,
//! mean and the two chosen components) together with the divider line, so
//! the tree classifies unseen samples without refitting anything.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::data::ExpressionMatrix;
use crate::pca::{centered_dot, PcaBasis, PcaError};
use crate::scalar::Scalar;

/// Size of the categorical cluster palette.
pub const PALETTE_SIZE: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("dataset has no samples")]
    EmptyDataset,
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("node {0} is not a leaf")]
    NotALeaf(NodeId),
    #[error("node {0} is not internal")]
    NotInternal(NodeId),
    #[error("split would leave one side empty ({positive} positive, {negative} negative)")]
    EmptySide { positive: usize, negative: usize },
    #[error("node has {0} members; a split needs at least 3")]
    TooFewMembers(usize),
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("row has no value for feature {0}")]
    MissingFeature(usize),
    #[error("divider normal must be a nonzero finite vector")]
    BadLine,
    #[error(transparent)]
    Pca(#[from] PcaError),
}

impl PartitionError {
    pub fn name(&self) -> &'static str {
        match self {
            PartitionError::EmptyDataset => "EmptyDataset",
            PartitionError::UnknownNode(_) => "UnknownNode",
            PartitionError::NotALeaf(_) => "NotALeaf",
            PartitionError::NotInternal(_) => "NotInternal",
            PartitionError::EmptySide { .. } => "EmptySide",
            PartitionError::TooFewMembers(_) => "TooFewMembers",
            PartitionError::EmptyCluster => "EmptyCluster",
            PartitionError::MissingFeature(_) => "MissingFeature",
            PartitionError::BadLine => "BadLine",
            PartitionError::Pca(e) => e.name(),
        }
    }
}

/// Node token. The root is `n0`; each split allocates the next two tokens,
/// positive child first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl FromStr for NodeId {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('n')
            .and_then(|rest| rest.parse().ok())
            .map(NodeId)
            .ok_or_else(|| PartitionError::UnknownNode(s.to_owned()))
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Line in a PC plane; samples with `(p − point)·normal ≥ 0` are positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DividerLine<T> {
    point: (T, T),
    normal: (T, T),
}

impl<T: Scalar> DividerLine<T> {
    /// A normal that is already unit length (within 1e-12) is kept bit for
    /// bit; anything else is normalized.
    pub fn new(point: (T, T), normal: (T, T)) -> Result<Self, PartitionError> {
        let len = (normal.0 * normal.0 + normal.1 * normal.1).sqrt();
        if !len.is_finite() || len == T::zero() || !point.0.is_finite() || !point.1.is_finite() {
            return Err(PartitionError::BadLine);
        }
        let tol = T::from_f64_lossy(1e-12).max(T::epsilon() * (T::one() + T::one()));
        let normal = if (len - T::one()).abs() <= tol {
            normal
        } else {
            (normal.0 / len, normal.1 / len)
        };
        Ok(Self { point, normal })
    }

    /// Line through `point` whose positive side lies towards `toward`.
    pub fn separating(point: (T, T), toward: (T, T)) -> Result<Self, PartitionError> {
        Self::new(point, (toward.0 - point.0, toward.1 - point.1))
    }

    pub fn point(&self) -> (T, T) {
        self.point
    }

    pub fn normal(&self) -> (T, T) {
        self.normal
    }

    pub fn signed_distance(&self, (x, y): (T, T)) -> T {
        (x - self.point.0) * self.normal.0 + (y - self.point.1) * self.normal.1
    }

    /// Ties (distance exactly zero) go to the positive side.
    pub fn is_positive(&self, coord: (T, T)) -> bool {
        self.signed_distance(coord) >= T::zero()
    }
}

/// The two components a split was drawn on, frozen with the basis mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlane<T> {
    pub feature_subset: Vec<usize>,
    pub mean: Vec<T>,
    pub axis_x: Vec<T>,
    pub axis_y: Vec<T>,
    pub pc_x: usize,
    pub pc_y: usize,
}

impl<T: Scalar> SplitPlane<T> {
    pub fn from_basis(basis: &PcaBasis<T>, pc_x: usize, pc_y: usize) -> Result<Self, PcaError> {
        basis.check_pair(pc_x, pc_y)?;
        Ok(Self {
            feature_subset: basis.feature_subset().to_vec(),
            mean: basis.mean().to_vec(),
            axis_x: basis.components()[pc_x].clone(),
            axis_y: basis.components()[pc_y].clone(),
            pc_x,
            pc_y,
        })
    }

    /// Projects a row given as a feature accessor.
    pub fn project_with(&self, fetch: &impl Fn(usize) -> Option<T>) -> Result<(T, T), PartitionError> {
        let missing = || {
            let f = self
                .feature_subset
                .iter()
                .copied()
                .find(|&f| fetch(f).is_none())
                .unwrap_or(0);
            PartitionError::MissingFeature(f)
        };
        let x = centered_dot(fetch, &self.feature_subset, &self.mean, &self.axis_x).ok_or_else(missing)?;
        let y = centered_dot(fetch, &self.feature_subset, &self.mean, &self.axis_y).ok_or_else(missing)?;
        Ok((x, y))
    }

    pub fn project_row(&self, row: &[T]) -> Result<(T, T), PartitionError> {
        self.project_with(&|f| row.get(f).copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRule<T> {
    pub plane: SplitPlane<T>,
    pub line: DividerLine<T>,
    pub positive: NodeId,
    pub negative: NodeId,
    /// Order in which splits were made, starting at 0.
    pub sequence: usize,
}

/// Between-cluster mean differences for every feature and the features whose
/// absolute difference reaches the population standard deviation of all
/// differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportantFeatureReport<T> {
    pub mu_a: Vec<T>,
    pub mu_b: Vec<T>,
    /// Signed `mu_a − mu_b`.
    pub d: Vec<T>,
    pub mu_d: T,
    pub sigma_avg: T,
    /// Feature indices with `|d| ≥ sigma_avg`, ascending. Empty when
    /// `sigma_avg` is zero.
    pub selected: Vec<usize>,
}

impl<T: Scalar> ImportantFeatureReport<T> {
    pub fn from_means(mu_a: Vec<T>, mu_b: Vec<T>) -> Self {
        let d: Vec<T> = mu_a.iter().zip(&mu_b).map(|(&a, &b)| a - b).collect();
        let n = <T as Scalar>::from_usize(d.len().max(1));
        let mu_d = d.iter().copied().sum::<T>() / n;
        let sigma_avg = (d.iter().map(|&x| (x - mu_d) * (x - mu_d)).sum::<T>() / n).sqrt();
        let selected = if sigma_avg > T::zero() {
            (0..d.len()).filter(|&i| d[i].abs() >= sigma_avg).collect()
        } else {
            Vec::new()
        };
        Self {
            mu_a,
            mu_b,
            d,
            mu_d,
            sigma_avg,
            selected,
        }
    }
}

/// Feature-importance report between two sample sets over all features.
pub fn important_features<T: Scalar>(
    matrix: &ExpressionMatrix<T>,
    members_a: &[usize],
    members_b: &[usize],
) -> Result<ImportantFeatureReport<T>, PartitionError> {
    if members_a.is_empty() || members_b.is_empty() {
        return Err(PartitionError::EmptyCluster);
    }
    let means = |members: &[usize]| -> Vec<T> {
        (0..matrix.n_features())
            .map(|f| matrix.feature_mean(f, members))
            .collect()
    };
    Ok(ImportantFeatureReport::from_means(means(members_a), means(members_b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionNode<T> {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub depth: usize,
    /// Sample indices, ascending.
    pub members: Vec<usize>,
    pub rule: Option<SplitRule<T>>,
    pub important: Option<ImportantFeatureReport<T>>,
    pub color: usize,
}

impl<T> PartitionNode<T> {
    pub fn is_leaf(&self) -> bool {
        self.rule.is_none()
    }

    pub fn children(&self) -> Option<(NodeId, NodeId)> {
        self.rule.as_ref().map(|r| (r.positive, r.negative))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTree<T> {
    nodes: BTreeMap<NodeId, PartitionNode<T>>,
    n_samples: usize,
    next_id: u32,
    next_sequence: usize,
}

pub const ROOT: NodeId = NodeId(0);

impl<T: Scalar> PartitionTree<T> {
    /// Single-leaf tree holding every sample of the matrix.
    pub fn create_root(matrix: &ExpressionMatrix<T>) -> Result<Self, PartitionError> {
        Self::with_samples(matrix.n_samples())
    }

    pub(crate) fn with_samples(n_samples: usize) -> Result<Self, PartitionError> {
        if n_samples == 0 {
            return Err(PartitionError::EmptyDataset);
        }
        let root = PartitionNode {
            id: ROOT,
            parent: None,
            depth: 0,
            members: (0..n_samples).collect(),
            rule: None,
            important: None,
            color: 0,
        };
        Ok(Self {
            nodes: BTreeMap::from([(ROOT, root)]),
            n_samples,
            next_id: 1,
            next_sequence: 0,
        })
    }

    pub fn root(&self) -> &PartitionNode<T> {
        &self.nodes[&ROOT]
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn node(&self, id: NodeId) -> Result<&PartitionNode<T>, PartitionError> {
        self.nodes
            .get(&id)
            .ok_or_else(|| PartitionError::UnknownNode(id.to_string()))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    /// All live nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &PartitionNode<T>> + '_ {
        self.nodes.values()
    }

    /// Pre-order walk, positive child before negative.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![ROOT];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Some((pos, neg)) = self.nodes[&id].children() {
                stack.push(neg);
                stack.push(pos);
            }
        }
        out
    }

    /// Leaves from left to right (positive side first at every split).
    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder()
            .into_iter()
            .filter(|id| self.nodes[id].is_leaf())
            .collect()
    }

    /// Internal nodes ordered by when they were split.
    pub fn splits_in_order(&self) -> Vec<&PartitionNode<T>> {
        let mut internal: Vec<_> = self.nodes.values().filter(|n| !n.is_leaf()).collect();
        internal.sort_by_key(|n| n.rule.as_ref().map_or(usize::MAX, |r| r.sequence));
        internal
    }

    /// Leaf id per sample index.
    pub fn assignment(&self) -> Vec<NodeId> {
        let mut out = vec![ROOT; self.n_samples];
        for leaf in self.leaves() {
            for &s in &self.nodes[&leaf].members {
                out[s] = leaf;
            }
        }
        out
    }

    fn fresh_color(&self, taken: &[usize]) -> usize {
        let mut used = [false; PALETTE_SIZE];
        for c in self.nodes.values().map(|n| n.color).chain(taken.iter().copied()) {
            if c < PALETTE_SIZE {
                used[c] = true;
            }
        }
        used.iter()
            .position(|u| !u)
            .unwrap_or(self.next_id as usize % PALETTE_SIZE)
    }

    /// Splits a leaf with a divider drawn in the plane of `basis`'s
    /// components `pc_x`, `pc_y`. Returns `(positive, negative)` child ids.
    pub fn apply_split(
        &mut self,
        matrix: &ExpressionMatrix<T>,
        node: NodeId,
        basis: &PcaBasis<T>,
        pc_x: usize,
        pc_y: usize,
        line: DividerLine<T>,
    ) -> Result<(NodeId, NodeId), PartitionError> {
        let plane = SplitPlane::from_basis(basis, pc_x, pc_y)?;
        self.split_with_plane(matrix, node, plane, line)
    }

    pub fn split_with_plane(
        &mut self,
        matrix: &ExpressionMatrix<T>,
        node: NodeId,
        plane: SplitPlane<T>,
        line: DividerLine<T>,
    ) -> Result<(NodeId, NodeId), PartitionError> {
        let target = self.node(node)?;
        if !target.is_leaf() {
            return Err(PartitionError::NotALeaf(node));
        }
        if target.members.len() < 3 {
            return Err(PartitionError::TooFewMembers(target.members.len()));
        }
        let (positive, negative) = self.divide(matrix, &target.members, &plane, &line)?;
        if positive.is_empty() || negative.is_empty() {
            return Err(PartitionError::EmptySide {
                positive: positive.len(),
                negative: negative.len(),
            });
        }
        let pos_id = NodeId(self.next_id);
        let neg_id = NodeId(self.next_id + 1);
        let pos_color = self.fresh_color(&[]);
        let neg_color = self.fresh_color(&[pos_color]);
        let sequence = self.next_sequence;
        self.attach(
            matrix,
            node,
            SplitRule {
                plane,
                line,
                positive: pos_id,
                negative: neg_id,
                sequence,
            },
            (positive, negative),
            (pos_color, neg_color),
        );
        Ok((pos_id, neg_id))
    }

    fn divide(
        &self,
        matrix: &ExpressionMatrix<T>,
        members: &[usize],
        plane: &SplitPlane<T>,
        line: &DividerLine<T>,
    ) -> Result<(Vec<usize>, Vec<usize>), PartitionError> {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for &s in members {
            let coord = plane.project_row(matrix.row(s))?;
            if line.is_positive(coord) {
                positive.push(s);
            } else {
                negative.push(s);
            }
        }
        Ok((positive, negative))
    }

    fn attach(
        &mut self,
        matrix: &ExpressionMatrix<T>,
        node: NodeId,
        rule: SplitRule<T>,
        (positive, negative): (Vec<usize>, Vec<usize>),
        (pos_color, neg_color): (usize, usize),
    ) {
        let important = important_features(matrix, &positive, &negative).ok();
        let depth = self.nodes[&node].depth + 1;
        let (pos_id, neg_id) = (rule.positive, rule.negative);
        for (id, members, color) in [(pos_id, positive, pos_color), (neg_id, negative, neg_color)] {
            self.nodes.insert(
                id,
                PartitionNode {
                    id,
                    parent: Some(node),
                    depth,
                    members,
                    rule: None,
                    important: None,
                    color,
                },
            );
        }
        self.next_id = self.next_id.max(neg_id.0.max(pos_id.0) + 1);
        self.next_sequence = self.next_sequence.max(rule.sequence + 1);
        let target = self.nodes.get_mut(&node).expect("node exists");
        target.rule = Some(rule);
        target.important = important;
    }

    /// Rebuilds a split from stored parts without the interactive
    /// preconditions; either side may end up empty on foreign data.
    pub(crate) fn restore_split(
        &mut self,
        matrix: &ExpressionMatrix<T>,
        node: NodeId,
        rule: SplitRule<T>,
        colors: (usize, usize),
    ) -> Result<(), PartitionError> {
        let target = self.node(node)?;
        if !target.is_leaf() {
            return Err(PartitionError::NotALeaf(node));
        }
        for id in [rule.positive, rule.negative] {
            if self.nodes.contains_key(&id) {
                return Err(PartitionError::UnknownNode(format!("{id} defined twice")));
            }
        }
        let sides = self.divide(matrix, &target.members, &rule.plane, &rule.line)?;
        self.attach(matrix, node, rule, sides, colors);
        Ok(())
    }

    /// Leaf reached by a sample whose features are read through `fetch`.
    pub fn classify_with(&self, fetch: impl Fn(usize) -> Option<T>) -> Result<NodeId, PartitionError> {
        let mut current = ROOT;
        loop {
            let node = &self.nodes[&current];
            let Some(rule) = &node.rule else {
                return Ok(current);
            };
            let coord = rule.plane.project_with(&fetch)?;
            current = if rule.line.is_positive(coord) {
                rule.positive
            } else {
                rule.negative
            };
        }
    }

    /// Leaf reached by a row indexed like the dataset's features.
    pub fn classify(&self, row: &[T]) -> Result<NodeId, PartitionError> {
        self.classify_with(|f| row.get(f).copied())
    }

    /// Turns an internal node back into a leaf, dropping its subtree.
    /// Returns the removed node ids.
    pub fn prune(&mut self, node: NodeId) -> Result<Vec<NodeId>, PartitionError> {
        let target = self.node(node)?;
        if target.is_leaf() {
            return Err(PartitionError::NotInternal(node));
        }
        let mut removed = Vec::new();
        let mut stack: Vec<NodeId> = target.children().into_iter().flat_map(|(a, b)| [a, b]).collect();
        while let Some(id) = stack.pop() {
            if let Some(n) = self.nodes.remove(&id) {
                if let Some((a, b)) = n.children() {
                    stack.push(a);
                    stack.push(b);
                }
                removed.push(id);
            }
        }
        removed.sort();
        let target = self.nodes.get_mut(&node).expect("node exists");
        target.rule = None;
        target.important = None;
        Ok(removed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::fit_pca;

    fn line_matrix(xs: &[f64]) -> ExpressionMatrix<f64> {
        // second feature carries small distinct noise so PCA has two axes
        let rows = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| vec![x, 0.01 * ((i % 3) as f64 - 1.0)])
            .collect();
        ExpressionMatrix::new(
            (0..xs.len()).map(|i| format!("s{i}")).collect(),
            vec!["a".into(), "b".into()],
            rows,
        )
        .unwrap()
    }

    fn fitted(m: &ExpressionMatrix<f64>) -> PcaBasis<f64> {
        fit_pca(m, &(0..m.n_samples()).collect::<Vec<_>>(), &[0, 1]).unwrap()
    }

    #[test]
    fn derived_importance_example() {
        let r = ImportantFeatureReport::from_means(vec![5.0, 2.0, 1.0], vec![1.0, 1.0, 0.0]);
        assert_eq!(r.d, vec![4.0, 1.0, 1.0]);
        assert_eq!(r.mu_d, 2.0);
        assert!((r.sigma_avg - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.selected, vec![0]);
    }

    #[test]
    fn identical_clusters_select_nothing() {
        let r = ImportantFeatureReport::from_means(vec![1.0, 2.0], vec![1.0, 2.0]);
        assert_eq!(r.sigma_avg, 0.0);
        assert!(r.selected.is_empty());
    }

    #[test]
    fn importance_needs_members() {
        let m = line_matrix(&[1.0, 2.0, 3.0]);
        assert_eq!(important_features(&m, &[], &[0]), Err(PartitionError::EmptyCluster));
    }

    #[test]
    fn split_by_sign_of_first_component() {
        let m = line_matrix(&[-2.0, -1.0, 1.0, 2.0]);
        let mut tree = PartitionTree::create_root(&m).unwrap();
        let b = fitted(&m);
        let line = DividerLine::new((0.0, 0.0), (1.0, 0.0)).unwrap();
        let (pos, neg) = tree.apply_split(&m, ROOT, &b, 0, 1, line).unwrap();
        assert_eq!((pos, neg), (NodeId(1), NodeId(2)));
        assert_eq!(tree.node(pos).unwrap().members, vec![2, 3]);
        assert_eq!(tree.node(neg).unwrap().members, vec![0, 1]);
        assert_eq!(tree.node(pos).unwrap().color, 1);
        assert_eq!(tree.node(neg).unwrap().color, 2);
        assert!(tree.root().important.is_some());
    }

    #[test]
    fn tie_goes_positive() {
        let m = line_matrix(&[-1.0, 0.0, 1.0]);
        let b = fitted(&m);
        let mut tree = PartitionTree::create_root(&m).unwrap();
        let x_mid = b.score(m.row(1), 0);
        let line = DividerLine::new((x_mid, 0.0), (1.0, 0.0)).unwrap();
        let (pos, _) = tree.apply_split(&m, ROOT, &b, 0, 1, line).unwrap();
        assert!(tree.node(pos).unwrap().members.contains(&1));
    }

    #[test]
    fn split_errors_leave_tree_unchanged() {
        let m = line_matrix(&[-2.0, -1.0, 1.0, 2.0]);
        let b = fitted(&m);
        let mut tree = PartitionTree::create_root(&m).unwrap();
        let before = tree.clone();
        let outside = DividerLine::new((100.0, 0.0), (1.0, 0.0)).unwrap();
        assert!(matches!(
            tree.apply_split(&m, ROOT, &b, 0, 1, outside),
            Err(PartitionError::EmptySide { positive: 0, negative: 4 })
        ));
        assert_eq!(tree, before);

        let line = DividerLine::new((0.0, 0.0), (1.0, 0.0)).unwrap();
        tree.apply_split(&m, ROOT, &b, 0, 1, line).unwrap();
        assert_eq!(tree.apply_split(&m, ROOT, &b, 0, 1, line), Err(PartitionError::NotALeaf(ROOT)));
        assert_eq!(
            tree.apply_split(&m, NodeId(1), &b, 0, 1, line),
            Err(PartitionError::TooFewMembers(2))
        );
    }

    #[test]
    fn classify_matches_membership() {
        let m = line_matrix(&[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0]);
        let b = fitted(&m);
        let mut tree = PartitionTree::create_root(&m).unwrap();
        assert_eq!(tree.classify(m.row(0)).unwrap(), ROOT);
        let line = DividerLine::new((0.0, 0.0), (1.0, 0.0)).unwrap();
        tree.apply_split(&m, ROOT, &b, 0, 1, line).unwrap();
        for (s, leaf) in tree.assignment().into_iter().enumerate() {
            assert_eq!(tree.classify(m.row(s)).unwrap(), leaf);
        }
        assert_eq!(tree.classify(&[1.0]), Err(PartitionError::MissingFeature(1)));
    }

    #[test]
    fn prune_restores_leaf() {
        let m = line_matrix(&[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0]);
        let b = fitted(&m);
        let mut tree = PartitionTree::create_root(&m).unwrap();
        let original = tree.clone();
        assert_eq!(tree.prune(ROOT), Err(PartitionError::NotInternal(ROOT)));
        let line = DividerLine::new((0.0, 0.0), (1.0, 0.0)).unwrap();
        tree.apply_split(&m, ROOT, &b, 0, 1, line).unwrap();
        let removed = tree.prune(ROOT).unwrap();
        assert_eq!(removed, vec![NodeId(1), NodeId(2)]);
        assert_eq!(tree.leaves(), original.leaves());
        assert_eq!(tree.root().members, original.root().members);
        assert!(tree.root().important.is_none());
    }

    #[test]
    fn colors_are_recycled_after_prune() {
        let m = line_matrix(&[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0]);
        let b = fitted(&m);
        let mut tree = PartitionTree::create_root(&m).unwrap();
        let line = DividerLine::new((0.0, 0.0), (1.0, 0.0)).unwrap();
        tree.apply_split(&m, ROOT, &b, 0, 1, line).unwrap();
        tree.prune(ROOT).unwrap();
        let (p, n) = tree.apply_split(&m, ROOT, &b, 0, 1, line).unwrap();
        assert_eq!((p, n), (NodeId(3), NodeId(4)));
        assert_eq!(tree.node(p).unwrap().color, 1);
        assert_eq!(tree.node(n).unwrap().color, 2);
    }

    #[test]
    fn node_tokens() {
        assert_eq!("n12".parse::<NodeId>().unwrap(), NodeId(12));
        assert!("x1".parse::<NodeId>().is_err());
        assert_eq!(NodeId(3).to_string(), "n3");
    }

    #[test]
    fn divider_normalizes() {
        let l = DividerLine::new((0.0, 0.0), (3.0, 4.0)).unwrap();
        assert_eq!(l.normal(), (0.6, 0.8));
        assert_eq!(DividerLine::new((0.0, 0.0), (0.0, 0.0)), Err(PartitionError::BadLine));
    }

    #[test]
    fn empty_dataset() {
        assert_eq!(
            PartitionTree::<f64>::with_samples(0).unwrap_err(),
            PartitionError::EmptyDataset
        );
    }
}
