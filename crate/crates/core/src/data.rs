//! Expression matrix and clinical table ingestion.
//!
//! Files are delimiter-separated text, UTF-8, with identifiers in the first
//! row and first column. The delimiter is a tab if the first line contains
//! one and a comma otherwise.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited text: {0}")]
    Csv(#[from] csv::Error),
    #[error("file is empty")]
    EmptyFile,
    #[error("non-numeric cell {cell:?} at line {line}, column {column}")]
    Parse {
        line: usize,
        column: usize,
        cell: String,
    },
    #[error("duplicate identifier {id:?}")]
    DuplicateId { id: String },
    #[error("line {line} has {found} cells, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("missing or non-finite value at line {line}, column {column}")]
    NonFinite { line: usize, column: usize },
    #[error("clinical row references sample {id:?} that is not in the expression matrix")]
    UnknownSample { id: String },
    #[error("sample {id:?} has negative survival time")]
    NegativeTime { id: String },
    #[error("clinical file lacks required column {0:?}")]
    MissingColumn(&'static str),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

impl DataError {
    pub fn name(&self) -> &'static str {
        match self {
            DataError::Io { .. } => "Io",
            DataError::Csv(_) => "ParseError",
            DataError::EmptyFile => "EmptyFile",
            DataError::Parse { .. } => "ParseError",
            DataError::DuplicateId { .. } => "DuplicateId",
            DataError::RaggedRow { .. } => "RaggedRow",
            DataError::NonFinite { .. } => "NonFinite",
            DataError::UnknownSample { .. } => "UnknownSample",
            DataError::NegativeTime { .. } => "NegativeTime",
            DataError::MissingColumn(_) => "MissingColumn",
            DataError::Shape(_) => "Shape",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    #[default]
    SamplesAsRows,
    FeaturesAsRows,
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "samples-as-rows" | "samples" => Ok(Orientation::SamplesAsRows),
            "features-as-rows" | "features" => Ok(Orientation::FeaturesAsRows),
            other => Err(format!(
                "unknown orientation {other:?} (expected samples-as-rows or features-as-rows)"
            )),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::SamplesAsRows => "samples-as-rows",
            Orientation::FeaturesAsRows => "features-as-rows",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub orientation: Orientation,
    /// Replace missing or non-finite cells with the mean of the finite
    /// values of the same feature instead of failing.
    pub impute_mean: bool,
}

/// Dense samples × features matrix with identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix<T> {
    sample_ids: Vec<String>,
    feature_names: Vec<String>,
    values: Vec<T>,
}

impl<T: Scalar> ExpressionMatrix<T> {
    /// Builds a matrix from row-major values, validating identifiers,
    /// shape and finiteness.
    pub fn new(
        sample_ids: Vec<String>,
        feature_names: Vec<String>,
        rows: Vec<Vec<T>>,
    ) -> Result<Self, DataError> {
        if rows.len() != sample_ids.len() {
            return Err(DataError::Shape(format!(
                "{} sample ids but {} rows",
                sample_ids.len(),
                rows.len()
            )));
        }
        let width = feature_names.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(DataError::RaggedRow {
                    line: i + 1,
                    expected: width,
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DataError::NonFinite {
                        line: i + 1,
                        column: j + 1,
                    });
                }
            }
            values.extend(row);
        }
        check_unique(&sample_ids)?;
        check_unique(&feature_names)?;
        Ok(Self {
            sample_ids,
            feature_names,
            values,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, sample: usize) -> &[T] {
        let w = self.n_features();
        &self.values[sample * w..(sample + 1) * w]
    }

    pub fn value(&self, sample: usize, feature: usize) -> T {
        self.values[sample * self.n_features() + feature]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.n_samples()).map(move |s| self.row(s))
    }

    pub fn sample_index(&self, id: &str) -> Option<usize> {
        self.sample_ids.iter().position(|s| s == id)
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    /// Mean of one feature over a set of samples.
    pub fn feature_mean(&self, feature: usize, samples: &[usize]) -> T {
        crate::scalar::mean(samples.iter().map(|&s| self.value(s, feature)))
    }

    /// Writes the canonical tab-separated form (samples as rows). Values use
    /// the shortest representation that parses back to the same bits.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "sample_id")?;
        for f in &self.feature_names {
            write!(out, "\t{f}")?;
        }
        writeln!(out)?;
        for (s, id) in self.sample_ids.iter().enumerate() {
            write!(out, "{id}")?;
            for v in self.row(s) {
                write!(out, "\t{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("identifiers are UTF-8")
    }
}

fn check_unique(ids: &[String]) -> Result<(), DataError> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(DataError::DuplicateId { id: id.clone() });
        }
    }
    Ok(())
}

fn detect_delimiter(text: &str) -> u8 {
    let first = text.lines().next().unwrap_or("");
    if first.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

fn read_records(text: &str) -> Result<Vec<Vec<String>>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(detect_delimiter(text))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        out.push(record.iter().map(str::to_owned).collect());
    }
    Ok(out)
}

fn is_missing_token(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na" | "N/A" | "NaN" | "nan" | "NAN")
}

/// Parses a body cell. `Ok(None)` marks a missing or non-finite value.
fn parse_cell<T: Scalar>(cell: &str, line: usize, column: usize) -> Result<Option<T>, DataError> {
    if is_missing_token(cell) {
        return Ok(None);
    }
    match cell.parse::<T>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(_) => Err(DataError::Parse {
            line,
            column,
            cell: cell.to_owned(),
        }),
    }
}

pub fn load_expression<T: Scalar>(
    path: impl AsRef<Path>,
    options: LoadOptions,
) -> Result<ExpressionMatrix<T>, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_expression(&text, options)
}

pub fn parse_expression<T: Scalar>(
    text: &str,
    options: LoadOptions,
) -> Result<ExpressionMatrix<T>, DataError> {
    let records = read_records(text)?;
    let (header, body) = records.split_first().ok_or(DataError::EmptyFile)?;
    let column_ids: Vec<String> = header[1..].to_vec();
    let width = header.len();

    let mut row_ids = Vec::with_capacity(body.len());
    // Cells in file layout; None = missing, position kept for error reporting.
    let mut grid: Vec<Vec<Option<T>>> = Vec::with_capacity(body.len());
    for (i, record) in body.iter().enumerate() {
        let line = i + 2;
        if record.len() != width {
            return Err(DataError::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        row_ids.push(record[0].clone());
        let cells = record[1..]
            .iter()
            .enumerate()
            .map(|(j, c)| parse_cell::<T>(c, line, j + 2))
            .collect::<Result<Vec<_>, _>>()?;
        grid.push(cells);
    }
    check_unique(&row_ids)?;
    check_unique(&column_ids)?;

    let (sample_ids, feature_names) = match options.orientation {
        Orientation::SamplesAsRows => (row_ids, column_ids),
        Orientation::FeaturesAsRows => (column_ids, row_ids),
    };
    let n_samples = sample_ids.len();
    let n_features = feature_names.len();
    // Maps canonical (sample, feature) to the file location of the cell.
    let locate = |s: usize, f: usize| match options.orientation {
        Orientation::SamplesAsRows => (s, f),
        Orientation::FeaturesAsRows => (f, s),
    };

    let mut values = vec![T::zero(); n_samples * n_features];
    for f in 0..n_features {
        let mut fill = None;
        for s in 0..n_samples {
            let (r, c) = locate(s, f);
            match grid[r][c] {
                Some(v) => values[s * n_features + f] = v,
                None if options.impute_mean => {
                    if fill.is_none() {
                        let finite: Vec<T> = (0..n_samples)
                            .filter_map(|s2| {
                                let (r2, c2) = locate(s2, f);
                                grid[r2][c2]
                            })
                            .collect();
                        if finite.is_empty() {
                            return Err(DataError::NonFinite {
                                line: r + 2,
                                column: c + 2,
                            });
                        }
                        fill = Some(crate::scalar::mean(finite));
                    }
                    values[s * n_features + f] = fill.unwrap_or_else(T::zero);
                }
                None => {
                    return Err(DataError::NonFinite {
                        line: r + 2,
                        column: c + 2,
                    })
                }
            }
        }
    }
    Ok(ExpressionMatrix {
        sample_ids,
        feature_names,
        values,
    })
}

/// Result of [`zscore_normalize`].
#[derive(Debug, Clone)]
pub struct Normalized<T> {
    pub matrix: ExpressionMatrix<T>,
    /// Features with zero variance, mapped to all zeros.
    pub degenerate: Vec<String>,
}

/// Per-feature standardization to mean 0 and population standard
/// deviation 1.
pub fn zscore_normalize<T: Scalar>(matrix: &ExpressionMatrix<T>) -> Normalized<T> {
    let n = matrix.n_samples();
    let p = matrix.n_features();
    let mut out = matrix.clone();
    let mut degenerate = Vec::new();
    if n == 0 {
        return Normalized {
            matrix: out,
            degenerate,
        };
    }
    let nf = <T as Scalar>::from_usize(n);
    for f in 0..p {
        let column: Vec<T> = (0..n).map(|s| matrix.value(s, f)).collect();
        let mean = column.iter().copied().sum::<T>() / nf;
        let var = column.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / nf;
        let sd = var.sqrt();
        let scale = column
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()));
        let floor = T::epsilon() * scale * <T as Scalar>::from_usize(16);
        if sd <= floor {
            degenerate.push(matrix.feature_names[f].clone());
            for s in 0..n {
                out.values[s * p + f] = T::zero();
            }
        } else {
            for (s, &x) in column.iter().enumerate() {
                out.values[s * p + f] = (x - mean) / sd;
            }
        }
    }
    Normalized {
        matrix: out,
        degenerate,
    }
}

/// One sample's survival information.
#[derive(Debug, Clone, PartialEq)]
pub struct ClinicalRecord<T> {
    /// Days from diagnosis to event or censoring.
    pub time: T,
    /// `true` for an observed event, `false` for right-censoring.
    pub event: bool,
    pub label: Option<String>,
}

/// Clinical rows aligned with the samples of an [`ExpressionMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClinicalTable<T> {
    records: Vec<Option<ClinicalRecord<T>>>,
    has_label_column: bool,
}

impl<T: Scalar> ClinicalTable<T> {
    /// Table with no clinical information for any of `n_samples` samples.
    pub fn empty(n_samples: usize) -> Self {
        Self {
            records: vec![None; n_samples],
            has_label_column: false,
        }
    }

    pub fn from_records(records: Vec<Option<ClinicalRecord<T>>>) -> Self {
        let has_label_column = records
            .iter()
            .any(|r| r.as_ref().is_some_and(|r| r.label.is_some()));
        Self {
            records,
            has_label_column,
        }
    }

    pub fn get(&self, sample: usize) -> Option<&ClinicalRecord<T>> {
        self.records.get(sample).and_then(Option::as_ref)
    }

    pub fn n_samples(&self) -> usize {
        self.records.len()
    }

    pub fn n_with_clinical(&self) -> usize {
        self.records.iter().filter(|r| r.is_some()).count()
    }

    pub fn has_labels(&self) -> bool {
        self.has_label_column && self.records.iter().flatten().any(|r| r.label.is_some())
    }

    pub fn label(&self, sample: usize) -> Option<&str> {
        self.get(sample).and_then(|r| r.label.as_deref())
    }

    pub fn label_histogram(&self) -> BTreeMap<String, usize> {
        let mut hist = BTreeMap::new();
        if !self.has_labels() {
            return hist;
        }
        for s in 0..self.records.len() {
            let label = self.label(s).unwrap_or(crate::viewmodel::NO_LABEL);
            *hist.entry(label.to_owned()).or_insert(0) += 1;
        }
        hist
    }
}

pub fn load_clinical<T: Scalar>(
    path: impl AsRef<Path>,
    matrix: &ExpressionMatrix<T>,
) -> Result<ClinicalTable<T>, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_clinical(&text, matrix)
}

pub fn parse_clinical<T: Scalar>(
    text: &str,
    matrix: &ExpressionMatrix<T>,
) -> Result<ClinicalTable<T>, DataError> {
    let records = read_records(text)?;
    let (header, body) = records.split_first().ok_or(DataError::EmptyFile)?;
    let find = |name: &'static str| header.iter().position(|h| h == name);
    let id_col = find("sample_id").ok_or(DataError::MissingColumn("sample_id"))?;
    let time_col = find("time_days").ok_or(DataError::MissingColumn("time_days"))?;
    let event_col = find("event").ok_or(DataError::MissingColumn("event"))?;
    let label_col = find("label");

    let index: HashMap<&str, usize> = matrix
        .sample_ids()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut table = vec![None; matrix.n_samples()];
    for (i, record) in body.iter().enumerate() {
        let line = i + 2;
        if record.len() != header.len() {
            return Err(DataError::RaggedRow {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let id = &record[id_col];
        let &sample = index
            .get(id.as_str())
            .ok_or_else(|| DataError::UnknownSample { id: id.clone() })?;
        if table[sample].is_some() {
            return Err(DataError::DuplicateId { id: id.clone() });
        }
        let time: T = record[time_col].parse().map_err(|_| DataError::Parse {
            line,
            column: time_col + 1,
            cell: record[time_col].clone(),
        })?;
        if !time.is_finite() {
            return Err(DataError::NonFinite {
                line,
                column: time_col + 1,
            });
        }
        if time < T::zero() {
            return Err(DataError::NegativeTime { id: id.clone() });
        }
        let event = match record[event_col].as_str() {
            "1" | "true" | "TRUE" => true,
            "0" | "false" | "FALSE" => false,
            other => {
                return Err(DataError::Parse {
                    line,
                    column: event_col + 1,
                    cell: other.to_owned(),
                })
            }
        };
        let label = label_col
            .map(|c| record[c].clone())
            .filter(|l| !l.is_empty());
        table[sample] = Some(ClinicalRecord { time, event, label });
    }
    Ok(ClinicalTable {
        records: table,
        has_label_column: label_col.is_some(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_with_clinical: usize,
    pub label_histogram: BTreeMap<String, usize>,
    pub normalization_applied: bool,
    /// Zero-variance features reported by normalization.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DatasetSummary {
    pub fn describe<T: Scalar>(
        matrix: &ExpressionMatrix<T>,
        clinical: &ClinicalTable<T>,
        normalization_applied: bool,
        degenerate: &[String],
    ) -> Self {
        Self {
            n_samples: matrix.n_samples(),
            n_features: matrix.n_features(),
            n_with_clinical: clinical.n_with_clinical(),
            label_histogram: clinical.label_histogram(),
            normalization_applied,
            warnings: degenerate
                .iter()
                .map(|f| format!("feature {f:?} has zero variance"))
                .collect(),
        }
    }
}
