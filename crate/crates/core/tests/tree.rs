use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;
use vsplit_core::data::ClinicalRecord;
use vsplit_core::partition::NodeId;
use vsplit_core::{DividerLine, PartitionTree};
use vsplit_core::viewmodel::{
    adjusted_rand_index, bin_index, binned_heatmap, compare_labelings, heatmap_overview, hierarchy_layout,
    overlay_labels, Axis,
};
use vsplit_core::{export_model, fit_pca, import_model, ClinicalTable, ExpressionMatrix, ModelDocument, ROOT};
use vsplit_testkit::{bin_members, centroid, four_corner_centers, gaussian_clusters, names, nearest, rng};

fn corners(n: usize, seed: u64) -> (ExpressionMatrix, Vec<usize>) {
    let mut g = rng(seed);
    let (rows, labels) = gaussian_clusters(&mut g, n, &four_corner_centers(24, 6.0, 3.0));
    (ExpressionMatrix::new(names("s", n), names("g", 24), rows).unwrap(), labels)
}

/// Splits `node` along the first component at the midpoint between the two
/// planted groups' centroids.
fn bisect(tree: &mut PartitionTree, m: &ExpressionMatrix, node: NodeId, labels: &[usize]) -> (NodeId, NodeId) {
    let members = tree.node(node).unwrap().members.clone();
    let features: Vec<usize> = (0..m.n_features()).collect();
    let basis = fit_pca(m, &members, &features).unwrap();
    let proj = basis.project(m, &members, 0, 1).unwrap();
    let mut groups: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for (i, &s) in members.iter().enumerate() {
        groups.entry(labels[s]).or_default().push(proj.coords[i]);
    }
    let cs: Vec<(f64, f64)> = groups.values().map(|pts| centroid(pts)).collect();
    // split the centroids by sign of the first coordinate relative to their mean
    let mid_x = cs.iter().map(|c| c.0).sum::<f64>() / cs.len() as f64;
    let line = DividerLine::new((mid_x, 0.0), (1.0, 0.0)).unwrap();
    tree.apply_split(m, node, &basis, 0, 1, line).unwrap()
}

#[test]
fn prune_mid_tree_drops_subtree_leaves() {
    let (m, labels) = corners(200, 1);
    let mut tree = PartitionTree::create_root(&m).unwrap();
    let (a, b) = bisect(&mut tree, &m, ROOT, &labels);
    let (a1, _) = bisect(&mut tree, &m, a, &labels);
    bisect(&mut tree, &m, b, &labels);
    // third split below a1 is not possible on a pure cluster with a clean
    // centroid gap, so split a1 anywhere inside its cloud
    let members = tree.node(a1).unwrap().members.clone();
    let basis = fit_pca(&m, &members, &(0..24).collect::<Vec<_>>()).unwrap();
    tree.apply_split(&m, a1, &basis, 0, 1, DividerLine::new((0.0, 0.0), (1.0, 0.0)).unwrap())
        .unwrap();
    assert_eq!(tree.leaves().len(), 5);

    let subtree_leaves = 3; // a → {a1 → 2 leaves, a2}
    let removed = tree.prune(a).unwrap();
    assert_eq!(removed.len(), 4);
    assert_eq!(tree.leaves().len(), 5 - (subtree_leaves - 1));
    assert_eq!(tree.node(a).unwrap().members.len(), 100);
}

#[test]
fn held_out_samples_follow_nearest_centroid() {
    let mut g = rng(10);
    let centers = vec![vec![4.0, 4.0, 0.0, 1.0], vec![-4.0, -3.0, 1.0, 0.0]];
    let (rows, labels) = gaussian_clusters(&mut g, 100, &centers);
    let m = ExpressionMatrix::new(names("s", 100), names("g", 4), rows).unwrap();
    let all: Vec<usize> = (0..100).collect();
    let basis = fit_pca(&m, &all, &[0, 1, 2, 3]).unwrap();
    let proj = basis.project(&m, &all, 0, 1).unwrap();
    let group = |c: usize| -> Vec<(f64, f64)> {
        (0..100).filter(|&s| labels[s] == c).map(|s| proj.coords[s]).collect()
    };
    let c0 = centroid(&group(0));
    let c1 = centroid(&group(1));
    let mid = ((c0.0 + c1.0) / 2.0, (c0.1 + c1.1) / 2.0);
    let mut tree = PartitionTree::create_root(&m).unwrap();
    let (pos, neg) = tree
        .apply_split(&m, ROOT, &basis, 0, 1, DividerLine::separating(mid, c0).unwrap())
        .unwrap();

    let (held, _) = gaussian_clusters(&mut g, 200, &centers);
    for row in held {
        let leaf = tree.classify(&row).unwrap();
        let coord = (basis.score(&row, 0), basis.score(&row, 1));
        let expected = if nearest(coord, &[c0, c1]) == 0 { pos } else { neg };
        assert_eq!(leaf, expected);
    }
}

#[test]
fn hierarchy_spans_for_balanced_tree() {
    let (m, labels) = corners(400, 2);
    let mut tree = PartitionTree::create_root(&m).unwrap();
    let (a, b) = bisect(&mut tree, &m, ROOT, &labels);
    bisect(&mut tree, &m, a, &labels);
    bisect(&mut tree, &m, b, &labels);
    let layout = hierarchy_layout(&tree, m.feature_names());
    let leaves: Vec<_> = layout.nodes.iter().filter(|n| n.is_leaf).collect();
    assert_eq!(leaves.len(), 4);
    for leaf in &leaves {
        assert!((leaf.span[1] - leaf.span[0] - 0.25).abs() < 1e-12);
    }
    let total: f64 = leaves.iter().map(|l| l.span[1] - l.span[0]).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let root = &layout.nodes[0];
    assert_eq!(root.segments.len(), 4);
    assert!(!root.labels.is_empty());
    assert_eq!(layout.edges.len(), 6);
}

#[test]
fn heatmap_overlap_goes_to_earlier_band() {
    let (m, labels) = corners(200, 3);
    let mut tree = PartitionTree::create_root(&m).unwrap();
    let (a, _) = bisect(&mut tree, &m, ROOT, &labels);
    bisect(&mut tree, &m, a, &labels);
    let first = tree.root().important.clone().unwrap();
    let second = tree.node(a).unwrap().important.clone().unwrap();
    let overlap: Vec<usize> = second
        .selected
        .iter()
        .copied()
        .filter(|f| first.selected.contains(f))
        .collect();

    let h = heatmap_overview(&tree, &m);
    assert_eq!(h.row_bands[0].split, Some(ROOT));
    let band0 = &h.row_features[h.row_bands[0].start..h.row_bands[0].end];
    assert_eq!(band0.len(), first.selected.len());
    for f in &overlap {
        assert!(band0.contains(f));
    }
    if h.row_bands.len() > 2 {
        let band1 = &h.row_features[h.row_bands[1].start..h.row_bands[1].end];
        assert!(band1.iter().all(|f| !first.selected.contains(f)));
    }
    // band 0 is ordered by descending max of the two side means
    let key = |f: usize| first.mu_a[f].max(first.mu_b[f]);
    assert!(band0.windows(2).all(|w| key(w[0]) >= key(w[1])));

    let mut rows = h.row_features.clone();
    rows.sort();
    assert_eq!(rows, (0..24).collect::<Vec<_>>());
    let mut cols = h.column_samples.clone();
    cols.sort();
    assert_eq!(cols, (0..200).collect::<Vec<_>>());
}

#[test]
fn binned_means_match_group_by_oracle() {
    // 7×7 grid of points in two features; the remaining features are
    // arbitrary functions of position
    let mut rows = Vec::new();
    for i in 0..7 {
        for j in 0..7 {
            let (x, y) = (i as f64, j as f64 * 0.5);
            rows.push(vec![x, y, x * y, (x - y).sin()]);
        }
    }
    let n = rows.len();
    let m = ExpressionMatrix::new(names("s", n), names("g", 4), rows.clone()).unwrap();
    let all: Vec<usize> = (0..n).collect();
    let basis = fit_pca(&m, &all, &[0, 1, 2, 3]).unwrap();
    let proj = basis.project(&m, &all, 0, 1).unwrap();
    for (axis, n_bins) in [(Axis::X, 5), (Axis::Y, 8), (Axis::X, 1), (Axis::Y, 20)] {
        let h = binned_heatmap(&proj, &m, &basis, axis, n_bins).unwrap();
        let coords: Vec<f64> = proj
            .coords
            .iter()
            .map(|c| if axis == Axis::X { c.0 } else { c.1 })
            .collect();
        let groups = bin_members(&coords, &h.edges);
        assert_eq!(h.counts.iter().sum::<usize>(), n);
        for (k, g) in groups.iter().enumerate() {
            assert_eq!(h.counts[k], g.len());
            for feat in &h.features {
                match &feat.cells[k] {
                    None => assert!(g.is_empty()),
                    Some(v) => {
                        let want = g.iter().map(|&s| rows[s][feat.feature]).sum::<f64>() / g.len() as f64;
                        assert_eq!(*v, want);
                    }
                }
            }
        }
        for w in h.features.windows(2) {
            assert!(w[0].eigen.abs() >= w[1].eigen.abs());
        }
    }
}

#[test]
fn binning_edge_cases() {
    let rows = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]];
    let m = ExpressionMatrix::new(names("s", 3), names("g", 2), rows).unwrap();
    let all = vec![0, 1, 2];
    let basis = fit_pca(&m, &all, &[0, 1]).unwrap();
    let proj = basis.project(&m, &all, 0, 1).unwrap();
    let h = binned_heatmap(&proj, &m, &basis, Axis::X, 4).unwrap();
    assert_eq!(h.counts, vec![3, 0, 0, 0]);
    assert!(h.features[0].cells[1..].iter().all(Option::is_none));

    let rows = vec![vec![-1.0, 1.0], vec![1.0, 3.0], vec![0.0, 2.0]];
    let m = ExpressionMatrix::new(names("s", 3), vec!["a".into(), "b".into()], rows).unwrap();
    let basis = fit_pca(&m, &[0, 1, 2], &[0, 1]).unwrap();
    let proj = basis.project(&m, &[0, 1], 0, 1).unwrap();
    let h = binned_heatmap(&proj, &m, &basis, Axis::X, 2).unwrap();
    let b = h.features.iter().find(|f| f.name == "b").unwrap();
    assert_eq!(b.cells, vec![Some(1.0), Some(3.0)]);
    assert_eq!(bin_index(h.edges[2], &h.edges), 1);
}

#[test]
fn overlay_legend_is_alphabetical_and_stable() {
    let labels = ["BRCA_LumA", "BRCA_LumB", "BRCA_Basal", "BRCA_Her2", "BRCA_Normal", ""];
    let n = 12;
    let rows = (0..n).map(|i| vec![i as f64, 0.0]).collect();
    let m = ExpressionMatrix::new(names("s", n), names("g", 2), rows).unwrap();
    let clinical = ClinicalTable::from_records(
        (0..n)
            .map(|i| {
                Some(ClinicalRecord {
                    time: 1.0,
                    event: false,
                    label: Some(labels[i % 6].to_string()).filter(|l| !l.is_empty()),
                })
            })
            .collect(),
    );
    let all: Vec<usize> = (0..n).collect();
    let o = overlay_labels(&clinical, &m, &all).unwrap();
    let legend: Vec<&str> = o.legend.iter().map(|e| e.label.as_str()).collect();
    assert_eq!(
        legend,
        vec!["BRCA_Basal", "BRCA_Her2", "BRCA_LumA", "BRCA_LumB", "BRCA_Normal", "none"]
    );
    assert_eq!(o, overlay_labels(&clinical, &m, &all).unwrap());

    let single = ClinicalTable::from_records(
        (0..n)
            .map(|_| Some(ClinicalRecord { time: 1.0, event: false, label: Some("x".into()) }))
            .collect(),
    );
    assert_eq!(overlay_labels(&single, &m, &all).unwrap().legend.len(), 1);
    assert!(overlay_labels(&ClinicalTable::empty(n), &m, &all).is_err());
}

#[test]
fn ari_symmetry_and_renaming() {
    let mut g = rng(12);
    for _ in 0..100 {
        let n = g.random_range(2..80);
        let a: Vec<u8> = (0..n).map(|_| g.random_range(0..4)).collect();
        let b: Vec<u8> = (0..n).map(|_| g.random_range(0..5)).collect();
        let renamed: Vec<u8> = a.iter().map(|x| 10 + (3 - x)).collect();
        let ab = adjusted_rand_index(&a, &b);
        assert!((ab - adjusted_rand_index(&b, &a)).abs() < 1e-12);
        assert!((ab - adjusted_rand_index(&renamed, &b)).abs() < 1e-12);
        assert_eq!(adjusted_rand_index(&a, &renamed), 1.0);
    }
    let a: BTreeMap<String, String> = (0..6).map(|i| (format!("s{i}"), format!("c{}", i % 2))).collect();
    let cmp = compare_labelings(&a, &a).unwrap();
    assert_eq!(cmp.ari, 1.0);
    assert_eq!(cmp.table, vec![vec![3, 0], vec![0, 3]]);
}

#[test]
fn model_round_trip_on_corners() {
    let (m, labels) = corners(300, 4);
    let mut tree = PartitionTree::create_root(&m).unwrap();
    let (a, b) = bisect(&mut tree, &m, ROOT, &labels);
    bisect(&mut tree, &m, a, &labels);
    bisect(&mut tree, &m, b, &labels);
    let text = export_model(&tree, &m).to_json();
    let back = import_model(&ModelDocument::from_json(&text).unwrap(), &m).unwrap();
    assert_eq!(back.assignment(), tree.assignment());
    assert_eq!(export_model(&back, &m).to_json(), text);
}

#[derive(Debug, Clone)]
enum Step {
    Split { leaf: usize, offset: f64, angle: f64 },
    Prune { node: usize },
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        3 => (0usize..16, -1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(leaf, offset, angle)| Step::Split { leaf, offset, angle }),
        1 => (0usize..16).prop_map(|node| Step::Prune { node }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_and_classification_invariants(seed in any::<u64>(), steps in prop::collection::vec(step(), 1..10)) {
        let (m, _) = corners(60, seed);
        let features: Vec<usize> = (0..m.n_features()).collect();
        let mut tree = PartitionTree::create_root(&m).unwrap();
        for s in steps {
            match s {
                Step::Split { leaf, offset, angle } => {
                    let leaves = tree.leaves();
                    let id = leaves[leaf % leaves.len()];
                    let members = tree.node(id).unwrap().members.clone();
                    if members.len() < 3 { continue; }
                    let basis = fit_pca(&m, &members, &features).unwrap();
                    let line = DividerLine::new((offset, 0.0), (angle.cos(), angle.sin())).unwrap();
                    let before = tree.clone();
                    if tree.apply_split(&m, id, &basis, 0, 1, line).is_err() {
                        prop_assert_eq!(&tree, &before);
                    }
                }
                Step::Prune { node } => {
                    let internal: Vec<NodeId> = tree.nodes().filter(|n| !n.is_leaf()).map(|n| n.id).collect();
                    if internal.is_empty() { continue; }
                    tree.prune(internal[node % internal.len()]).unwrap();
                }
            }
            let mut seen = vec![false; m.n_samples()];
            for leaf in tree.leaves() {
                for &s in &tree.node(leaf).unwrap().members {
                    prop_assert!(!seen[s]);
                    seen[s] = true;
                    prop_assert_eq!(tree.classify(m.row(s)).unwrap(), leaf);
                }
            }
            prop_assert!(seen.iter().all(|&x| x));
            for node in tree.nodes() {
                if let Some((p, q)) = node.children() {
                    let mut joined = tree.node(p).unwrap().members.clone();
                    joined.extend(&tree.node(q).unwrap().members);
                    joined.sort();
                    prop_assert_eq!(&joined, &node.members);
                }
            }
            let layout = hierarchy_layout(&tree, m.feature_names());
            let width: f64 = layout.nodes.iter().filter(|n| n.is_leaf).map(|n| n.span[1] - n.span[0]).sum();
            prop_assert!((width - 1.0).abs() < 1e-12);
        }
    }
}
