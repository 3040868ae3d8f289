//! Kaplan–Meier product-limit curves per leaf cluster plus a baseline.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::data::ClinicalTable;
use crate::partition::{NodeId, PartitionTree};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurvivalError {
    #[error("no survival records")]
    EmptyInput,
    #[error("survival time must be finite and non-negative")]
    NegativeTime,
    #[error("no sample has clinical data")]
    NoClinicalData,
}

impl SurvivalError {
    pub fn name(&self) -> &'static str {
        match self {
            SurvivalError::EmptyInput => "EmptyInput",
            SurvivalError::NegativeTime => "NegativeTime",
            SurvivalError::NoClinicalData => "NoClinicalData",
        }
    }
}

/// Right-censored observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalRecord<T> {
    pub time: T,
    pub event: bool,
}

/// Product-limit estimate as exact steps `(time, probability)`.
///
/// The first step is at time 0. Deaths at a time are applied before
/// censorings at the same time, so subjects censored at `t` are still at risk
/// at `t`. Events at time 0 lower the first step instead of adding a second
/// one at the same time.
pub fn kaplan_meier<T: Scalar>(records: &[SurvivalRecord<T>]) -> Result<Vec<(T, T)>, SurvivalError> {
    if records.is_empty() {
        return Err(SurvivalError::EmptyInput);
    }
    if records.iter().any(|r| r.time < T::zero() || !r.time.is_finite()) {
        return Err(SurvivalError::NegativeTime);
    }
    let mut sorted: Vec<SurvivalRecord<T>> = records.to_vec();
    sorted.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap_or(Ordering::Equal));

    let mut steps = vec![(T::zero(), T::one())];
    let mut at_risk = sorted.len();
    let mut survival = T::one();
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].time;
        let mut deaths = 0usize;
        let mut leaving = 0usize;
        while i < sorted.len() && sorted[i].time == t {
            if sorted[i].event {
                deaths += 1;
            }
            leaving += 1;
            i += 1;
        }
        if deaths > 0 {
            let ratio = <T as Scalar>::from_usize(deaths) / <T as Scalar>::from_usize(at_risk);
            survival = (survival * (T::one() - ratio)).max(T::zero());
            if t == T::zero() {
                steps[0].1 = survival;
            } else {
                steps.push((t, survival));
            }
        }
        at_risk -= leaving;
    }
    Ok(steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKey {
    Cluster(NodeId),
    Baseline,
}

impl fmt::Display for CurveKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKey::Cluster(id) => id.fmt(f),
            CurveKey::Baseline => f.write_str("BASELINE"),
        }
    }
}

impl Serialize for CurveKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve<T> {
    pub cluster: CurveKey,
    /// Palette slot of the leaf; `None` for the baseline.
    pub color: Option<usize>,
    pub n_at_risk_initial: usize,
    /// Members without clinical data.
    pub skipped: usize,
    pub steps: Vec<(T, T)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterCurves<T> {
    pub clusters: Vec<SurvivalCurve<T>>,
    pub baseline: SurvivalCurve<T>,
}

fn curve_for<T: Scalar>(
    key: CurveKey,
    color: Option<usize>,
    members: impl Iterator<Item = usize>,
    clinical: &ClinicalTable<T>,
) -> Result<SurvivalCurve<T>, SurvivalError> {
    let mut records = Vec::new();
    let mut skipped = 0;
    for s in members {
        match clinical.get(s) {
            Some(r) => records.push(SurvivalRecord {
                time: r.time,
                event: r.event,
            }),
            None => skipped += 1,
        }
    }
    let steps = if records.is_empty() {
        vec![(T::zero(), T::one())]
    } else {
        kaplan_meier(&records)?
    };
    Ok(SurvivalCurve {
        cluster: key,
        color,
        n_at_risk_initial: records.len(),
        skipped,
        steps,
    })
}

/// One curve per current leaf, in left-to-right leaf order, plus the
/// whole-dataset baseline.
pub fn curves_for_clusters<T: Scalar>(
    tree: &PartitionTree<T>,
    clinical: &ClinicalTable<T>,
) -> Result<ClusterCurves<T>, SurvivalError> {
    let baseline = curve_for(CurveKey::Baseline, None, 0..tree.n_samples(), clinical)?;
    if baseline.n_at_risk_initial == 0 {
        return Err(SurvivalError::NoClinicalData);
    }
    let clusters = tree
        .leaves()
        .into_iter()
        .map(|id| {
            let node = tree.node(id).expect("leaf exists");
            curve_for(
                CurveKey::Cluster(id),
                Some(node.color),
                node.members.iter().copied(),
                clinical,
            )
        })
        .collect::<Result<_, _>>()?;
    Ok(ClusterCurves { clusters, baseline })
}
