use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use serde::Serialize;

use super::ViewError;

/// Contingency table between two labelings of the same samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub labels_a: Vec<String>,
    pub labels_b: Vec<String>,
    /// `table[i][j]` counts samples labeled `labels_a[i]` and `labels_b[j]`.
    pub table: Vec<Vec<usize>>,
    pub ari: f64,
}

/// Compares two sample → label maps over the same sample universe.
pub fn compare_labelings(
    a: &BTreeMap<String, String>,
    b: &BTreeMap<String, String>,
) -> Result<Comparison, ViewError> {
    if a.len() != b.len() || a.keys().any(|k| !b.contains_key(k)) {
        let only_a = a.keys().find(|k| !b.contains_key(*k));
        let only_b = b.keys().find(|k| !a.contains_key(*k));
        return Err(ViewError::UniverseMismatch(format!(
            "first-only sample {only_a:?}, second-only sample {only_b:?}"
        )));
    }
    let labels_a: Vec<String> = a.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let labels_b: Vec<String> = b.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut table = vec![vec![0usize; labels_b.len()]; labels_a.len()];
    let mut xs = Vec::with_capacity(a.len());
    let mut ys = Vec::with_capacity(a.len());
    for (sample, la) in a {
        let lb = &b[sample];
        let i = labels_a.binary_search(la).expect("collected");
        let j = labels_b.binary_search(lb).expect("collected");
        table[i][j] += 1;
        xs.push(i);
        ys.push(j);
    }
    Ok(Comparison {
        ari: adjusted_rand_index(&xs, &ys),
        labels_a,
        labels_b,
        table,
    })
}

fn pairs(n: u64) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Permutation-adjusted Rand index of two aligned labelings. Returns 1.0
/// when both labelings are trivially identical in structure (the adjusted
/// formula is 0/0 there).
pub fn adjusted_rand_index<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must be aligned");
    let mut joint: HashMap<(&A, &B), u64> = HashMap::new();
    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = joint.values().map(|&n| pairs(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| pairs(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| pairs(n)).sum();
    let total = pairs(a.len() as u64);
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}
