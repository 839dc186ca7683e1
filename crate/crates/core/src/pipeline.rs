//! Stage orchestration: one `run_*` function per CLI verb.
//!
//! Each function reads its inputs from the paths in [`Settings`], does the
//! work, writes its outputs, and returns a summary of what happened for the
//! frontend to print. Stages communicate only through checkpoint files
//! (couples, reports), so any stage can be re-run from existing
//! intermediates and the pipeline stays deterministic end to end.
//!
//! Non-fatal conditions (rejected dump lines, skipped couples) are counted
//! in the summaries; [`PipelineError`] is reserved for failures that abort
//! the stage before its outputs are complete.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Settings};
use crate::couples::{select_declared_couples, LinkedCouple, Provenance};
use crate::drift::analyze_couple;
use crate::index::{GraphIndex, IndexStats};
use crate::ingest::{open_dump, read_products, read_relations, IngestStats};
use crate::model::{Relation, ResearchProduct};
use crate::report::{
    aggregate_reports, read_couples, read_reports, write_aggregate_csv, write_jsonl,
    write_report_csv, AggregateRow, ArtifactError,
};
use crate::retrofit::{
    calibrate_interval, declared_pairs, retrofit_by_similarity, retrofit_simple, CalibrationError,
    SimilarityInterval,
};

/// Fatal stage failure.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("missing required input: set `{0}` in the config file or pass --{0}")]
    MissingInput(&'static str),
    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl PipelineError {
    /// Process exit code: 3 for a calibration underflow (the run can be
    /// retried with `simple_only`), 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Calibration(_) => 3,
            _ => 2,
        }
    }
}

fn read_dump_products(path: &Path) -> Result<(Vec<ResearchProduct>, IngestStats), PipelineError> {
    let at = |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = open_dump(path).map_err(at)?;
    read_products(reader).map_err(at)
}

fn read_dump_relations(path: &Path) -> Result<(Vec<Relation>, IngestStats), PipelineError> {
    let at = |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = open_dump(path).map_err(at)?;
    read_relations(reader).map_err(at)
}

fn load_index(
    settings: &Settings,
) -> Result<(GraphIndex, IngestStats, IngestStats), PipelineError> {
    let products = settings
        .products
        .as_deref()
        .ok_or(PipelineError::MissingInput("products"))?;
    let relations = settings
        .relations
        .as_deref()
        .ok_or(PipelineError::MissingInput("relations"))?;
    let (products, product_stats) = read_dump_products(products)?;
    let (relations, relation_stats) = read_dump_relations(relations)?;
    Ok((
        GraphIndex::build(products, relations),
        product_stats,
        relation_stats,
    ))
}

/// What the couples stage did.
#[derive(Debug)]
pub struct CouplesRun {
    pub product_stats: IngestStats,
    pub relation_stats: IngestStats,
    pub index_stats: IndexStats,
    /// Exclusion reason → count, from declared-couple selection.
    pub exclusions: BTreeMap<String, u64>,
    pub couples_written: usize,
}

/// Select declared couples from the dumps and write the couples file.
pub fn run_couples(settings: &Settings) -> Result<CouplesRun, PipelineError> {
    settings.validate()?;
    let (index, product_stats, relation_stats) = load_index(settings)?;
    let selection = select_declared_couples(&index);
    write_jsonl(&settings.couples, &selection.couples)?;
    Ok(CouplesRun {
        product_stats,
        relation_stats,
        index_stats: index.stats().clone(),
        exclusions: selection.exclusions,
        couples_written: selection.couples.len(),
    })
}

/// What the retrofit stage did.
#[derive(Debug)]
pub struct RetrofitRun {
    /// Declared couples carried over from the existing couples file.
    pub declared: usize,
    pub simple_added: usize,
    /// Decision label → count from the shared-author heuristic.
    pub simple_counters: BTreeMap<String, u64>,
    /// Absent when `simple_only` is set.
    pub interval: Option<SimilarityInterval>,
    pub similarity_added: usize,
    pub similarity_counters: BTreeMap<String, u64>,
    pub total_written: usize,
}

/// Extend the couples file with retrofitted couples.
///
/// The file is rewritten as declared couples (in their existing order)
/// followed by simple then similarity retrofits, so re-running the stage is
/// idempotent: earlier retrofits are recomputed, never duplicated.
pub fn run_retrofit(settings: &Settings) -> Result<RetrofitRun, PipelineError> {
    settings.validate()?;
    let (index, _, _) = load_index(settings)?;
    let existing = read_couples(&settings.couples)?;
    let declared: Vec<LinkedCouple> = existing
        .into_iter()
        .filter(|c| c.provenance == Provenance::Declared)
        .collect();

    let matcher = settings.matcher();
    let simple = retrofit_simple(&index, matcher, settings.window_days);

    let mut interval = None;
    let mut similarity_added = 0;
    let mut similarity_counters = BTreeMap::new();
    let mut couples: Vec<LinkedCouple> = declared.clone();
    couples.extend(simple.couples.iter().cloned());

    if !settings.simple_only {
        let params = settings.similarity_params();
        let band = calibrate_interval(&declared, &index, settings.k, &params)?;
        let mut exclude = declared_pairs(&index);
        exclude.extend(declared.iter().map(LinkedCouple::pair));
        exclude.extend(simple.couples.iter().map(LinkedCouple::pair));
        let similarity = retrofit_by_similarity(&index, &band, &params, &exclude);
        similarity_added = similarity.couples.len();
        similarity_counters = similarity.counters;
        couples.extend(similarity.couples);
        interval = Some(band);
    }

    write_jsonl(&settings.couples, &couples)?;
    Ok(RetrofitRun {
        declared: declared.len(),
        simple_added: simple.couples.len(),
        simple_counters: simple.counters,
        interval,
        similarity_added,
        similarity_counters,
        total_written: couples.len(),
    })
}

/// What the analyze stage did.
#[derive(Debug)]
pub struct AnalyzeRun {
    pub product_stats: IngestStats,
    pub couples_read: usize,
    pub analyzed: usize,
    /// Skip reason → count for couples that could not be analyzed.
    pub skipped: BTreeMap<String, u64>,
}

/// Compute one drift report per analyzable couple; write JSON Lines + CSV.
pub fn run_analyze(settings: &Settings) -> Result<AnalyzeRun, PipelineError> {
    settings.validate()?;
    let products = settings
        .products
        .as_deref()
        .ok_or(PipelineError::MissingInput("products"))?;
    let (products, product_stats) = read_dump_products(products)?;
    let index = GraphIndex::build(products, []);
    let couples = read_couples(&settings.couples)?;
    let matcher = settings.matcher();

    let results: Vec<_> = couples
        .par_iter()
        .map(|couple| analyze_couple(couple, &index, matcher))
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    let mut skipped: BTreeMap<String, u64> = BTreeMap::new();
    for result in results {
        match result {
            Ok(report) => reports.push(report),
            Err(err) => *skipped.entry(err.reason().to_string()).or_default() += 1,
        }
    }

    write_jsonl(&settings.reports, &reports)?;
    write_report_csv(&settings.reports_csv, &reports)?;
    Ok(AnalyzeRun {
        product_stats,
        couples_read: couples.len(),
        analyzed: reports.len(),
        skipped,
    })
}

/// What the report stage did.
#[derive(Debug)]
pub struct ReportRun {
    pub reports_read: usize,
    pub rows: Vec<AggregateRow>,
}

/// Aggregate drift reports into the grouped summary table.
pub fn run_report(settings: &Settings) -> Result<ReportRun, PipelineError> {
    settings.validate()?;
    let reports = read_reports(&settings.reports)?;
    let rows = aggregate_reports(&reports, settings.group_by);
    write_aggregate_csv(&settings.aggregate, &rows)?;
    Ok(ReportRun {
        reports_read: reports.len(),
        rows,
    })
}
