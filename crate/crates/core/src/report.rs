//! Pipeline artifacts on disk: couples and drift reports as JSON Lines,
//! per-couple and aggregate tables as CSV.
//!
//! Column orders are fixed (they are part of the output contract):
//!
//! - per-couple CSV: publication, supplement, provenance, score, year,
//!   supplement_kind, size_p, size_d, intersection, symdiff, jaccard,
//!   kendall_tau, first_author_preserved, last_author_preserved,
//!   max_displacement
//! - aggregate CSV: year, supplement_kind, n_couples, mean_size_p,
//!   median_size_p, mean_size_d, median_size_d, mean_jaccard,
//!   median_jaccard, share_symdiff_zero, share_first_author_preserved,
//!   mean_tau
//!
//! Absent values (no score, no year, tau undefined) are empty CSV fields and
//! `null` in JSON. All writers emit LF line endings.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::config::GroupBy;
use crate::couples::LinkedCouple;
use crate::drift::DriftReport;
use crate::model::ProductKind;

/// Failure while reading or writing a pipeline artifact. Artifacts are this
/// tool's own outputs, so a malformed line is fatal, with its position.
#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn io_at(path: &Path) -> impl Fn(io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write items as JSON Lines, one object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), ArtifactError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_at(path))?);
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(|e| ArtifactError::Io {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
        out.write_all(b"\n").map_err(io_at(path))?;
    }
    out.flush().map_err(io_at(path))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ArtifactError> {
    let file = File::open(path).map_err(io_at(path))?;
    let mut items = Vec::new();
    for (number, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_at(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|source| ArtifactError::Parse {
            path: path.to_path_buf(),
            line: number + 1,
            source,
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn read_couples(path: &Path) -> Result<Vec<LinkedCouple>, ArtifactError> {
    read_jsonl(path)
}

pub fn read_reports(path: &Path) -> Result<Vec<DriftReport>, ArtifactError> {
    read_jsonl(path)
}

#[derive(Serialize)]
struct CoupleRow<'a> {
    publication: &'a str,
    supplement: &'a str,
    provenance: &'a str,
    score: Option<f64>,
    year: Option<i32>,
    supplement_kind: &'a str,
    size_p: usize,
    size_d: usize,
    intersection: usize,
    symdiff: usize,
    jaccard: f64,
    kendall_tau: Option<f64>,
    first_author_preserved: bool,
    last_author_preserved: bool,
    max_displacement: f64,
}

impl<'a> From<&'a DriftReport> for CoupleRow<'a> {
    fn from(report: &'a DriftReport) -> Self {
        CoupleRow {
            publication: report.couple.publication.value(),
            supplement: report.couple.supplement.value(),
            provenance: report.couple.provenance.as_str(),
            score: report.couple.score,
            year: report.year,
            supplement_kind: report.supplement_kind.as_str(),
            size_p: report.overlap.size_p,
            size_d: report.overlap.size_d,
            intersection: report.overlap.intersection,
            symdiff: report.overlap.symdiff,
            jaccard: report.overlap.jaccard,
            kendall_tau: report.order.kendall_tau,
            first_author_preserved: report.order.first_author_preserved,
            last_author_preserved: report.order.last_author_preserved,
            max_displacement: report.order.max_displacement,
        }
    }
}

fn csv_at(path: &Path) -> impl Fn(csv::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// One CSV row per drift report, in input order.
pub fn write_report_csv(path: &Path, reports: &[DriftReport]) -> Result<(), ArtifactError> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_at(path))?;
    for report in reports {
        writer
            .serialize(CoupleRow::from(report))
            .map_err(csv_at(path))?;
    }
    writer.flush().map_err(io_at(path))
}

/// One aggregate table row; key fields are empty when not grouped on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub year: Option<i32>,
    pub supplement_kind: Option<ProductKind>,
    pub n_couples: usize,
    pub mean_size_p: f64,
    pub median_size_p: f64,
    pub mean_size_d: f64,
    pub median_size_d: f64,
    pub mean_jaccard: f64,
    pub median_jaccard: f64,
    pub share_symdiff_zero: f64,
    pub share_first_author_preserved: f64,
    /// Mean over couples whose tau is defined; empty when none is.
    pub mean_tau: Option<f64>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Group reports and compute one row per non-empty group, sorted by
/// (year, kind).
pub fn aggregate_reports(reports: &[DriftReport], group_by: GroupBy) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(Option<i32>, Option<ProductKind>), Vec<&DriftReport>> =
        BTreeMap::new();
    for report in reports {
        let key = match group_by {
            GroupBy::Year => (report.year, None),
            GroupBy::Kind => (None, Some(report.supplement_kind)),
            GroupBy::YearKind => (report.year, Some(report.supplement_kind)),
        };
        groups.entry(key).or_default().push(report);
    }
    groups
        .into_iter()
        .map(|((year, kind), members)| {
            let n = members.len();
            let sizes_p: Vec<f64> = members.iter().map(|r| r.overlap.size_p as f64).collect();
            let sizes_d: Vec<f64> = members.iter().map(|r| r.overlap.size_d as f64).collect();
            let jaccards: Vec<f64> = members.iter().map(|r| r.overlap.jaccard).collect();
            let taus: Vec<f64> = members.iter().filter_map(|r| r.order.kendall_tau).collect();
            let share = |predicate: &dyn Fn(&&&DriftReport) -> bool| {
                members.iter().filter(predicate).count() as f64 / n as f64
            };
            AggregateRow {
                year,
                supplement_kind: kind,
                n_couples: n,
                mean_size_p: mean(&sizes_p),
                median_size_p: median(&sizes_p),
                mean_size_d: mean(&sizes_d),
                median_size_d: median(&sizes_d),
                mean_jaccard: mean(&jaccards),
                median_jaccard: median(&jaccards),
                share_symdiff_zero: share(&|r| r.overlap.symdiff == 0),
                share_first_author_preserved: share(&|r| r.order.first_author_preserved),
                mean_tau: if taus.is_empty() {
                    None
                } else {
                    Some(mean(&taus))
                },
            }
        })
        .collect()
}

pub fn write_aggregate_csv(path: &Path, rows: &[AggregateRow]) -> Result<(), ArtifactError> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_at(path))?;
    for row in rows {
        writer.serialize(row).map_err(csv_at(path))?;
    }
    writer.flush().map_err(io_at(path))
}
