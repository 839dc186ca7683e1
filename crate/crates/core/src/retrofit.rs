//! Retrofitting of missed supplement couples from citation edges.
//!
//! Aggregated graphs often carry a plain `Cites`/`References` edge where an
//! `IsSupplementedBy` edge belongs. Two heuristics recover those pairs:
//!
//! 1. *simple* — the records share at least one matched author and their
//!    dates fall within a configurable window (default 183 days, "six
//!    months");
//! 2. *by similarity* — each record becomes a feature vector (normalized
//!    title trigrams, author keys, date) and a candidate is retrofitted when
//!    its pairwise similarity falls inside an interval calibrated on the
//!    declared couples (mean ± k·stddev).
//!
//! Candidates are restricted to existing citation edges between a
//! publication and a dataset/software record; there is no all-pairs search.
//! Retrofit output never repeats a declared pair, and the two heuristics
//! never repeat each other.

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::couples::{LinkedCouple, Provenance};
use crate::index::GraphIndex;
use crate::model::{fold_text, ProductId, ProductKind, ResearchProduct};
use crate::namematch::NameMatcher;

/// Minimum number of usable declared couples for calibration.
pub const MIN_CALIBRATION_SAMPLE: usize = 30;

/// Comparable projection of one product: what two records "about the same
/// work" have in common even when identifiers differ.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub date: Option<NaiveDate>,
    /// Character 3-grams of the normalized title (spaces included).
    pub title_trigrams: HashSet<String>,
    /// Normalized `"family|first-given-initial"` keys.
    pub author_keys: HashSet<String>,
}

/// Similarity band of declared couples; candidates inside it are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityInterval {
    pub lower: f64,
    pub upper: f64,
    pub sample_size: usize,
    pub mean: f64,
    pub stddev: f64,
}

/// Weights and decay constant of the similarity combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityParams {
    pub weight_title: f64,
    pub weight_authors: f64,
    pub weight_date: f64,
    /// e-folding time of the date component, in days.
    pub tau_days: f64,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        SimilarityParams {
            weight_title: 0.5,
            weight_authors: 0.3,
            weight_date: 0.2,
            tau_days: 90.0,
        }
    }
}

/// Couples found by one heuristic plus its decision counters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RetrofitOutcome {
    /// Sorted by (publication, supplement).
    pub couples: Vec<LinkedCouple>,
    /// Decision label → count, one decision per candidate pair.
    pub counters: BTreeMap<String, u64>,
}

impl RetrofitOutcome {
    fn count(&mut self, label: &str) {
        *self.counters.entry(label.to_string()).or_insert(0) += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("product {0} has an empty title")]
    MissingTitle(ProductId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error(
        "only {usable} declared couples with usable features (need {MIN_CALIBRATION_SAMPLE}); \
         similarity retrofitting cannot be calibrated on this corpus"
    )]
    CalibrationUnderflow { usable: usize },
}

/// Normalize a title for trigram extraction: same text folding as author
/// names, everything outside `[a-z0-9'-]` squeezed to single spaces.
pub fn normalize_title(title: &str) -> String {
    let folded = fold_text(title);
    let mapped: String = folded
        .chars()
        .map(|c| {
            if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '\'' || c == '-' {
                c
            } else {
                ' '
            }
        })
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Sliding character 3-grams, spaces included; empty below 3 characters.
pub fn title_trigrams(normalized: &str) -> HashSet<String> {
    let chars: Vec<char> = normalized.chars().collect();
    if chars.len() < 3 {
        return HashSet::new();
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// Project a product onto its feature vector.
pub fn feature_vector(x: &ResearchProduct) -> Result<FeatureVector, FeatureError> {
    if x.title.trim().is_empty() {
        return Err(FeatureError::MissingTitle(x.id.clone()));
    }
    Ok(FeatureVector {
        date: x.date,
        title_trigrams: title_trigrams(&normalize_title(&x.title)),
        author_keys: x.authors.iter().map(|a| a.author_key()).collect(),
    })
}

/// Jaccard overlap with J(∅,∅) = 1: two records with nothing to compare are
/// indistinguishable, not dissimilar.
fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    intersection as f64 / union as f64
}

/// Weighted feature similarity in [0,1]: title trigram Jaccard, author key
/// Jaccard, and exponential date decay. A missing date on either side zeroes
/// the date component; title and author evidence still count.
pub fn similarity(a: &FeatureVector, b: &FeatureVector, params: &SimilarityParams) -> f64 {
    let date_component = match (a.date, b.date) {
        (Some(da), Some(db)) => {
            let delta = (da - db).num_days().abs() as f64;
            (-delta / params.tau_days).exp()
        }
        _ => 0.0,
    };
    params.weight_title * jaccard(&a.title_trigrams, &b.title_trigrams)
        + params.weight_authors * jaccard(&a.author_keys, &b.author_keys)
        + params.weight_date * date_component
}

/// True iff both dates are present and at most `window_days` apart
/// (inclusive). Absent dates fail; the caller counts them.
pub fn temporal_proximity(p: &ResearchProduct, d: &ResearchProduct, window_days: i64) -> bool {
    match (p.date, d.date) {
        (Some(a), Some(b)) => (a - b).num_days().abs() <= window_days,
        _ => false,
    }
}

/// Candidate (publication, supplement) pairs: canonical citation edges with
/// one publication endpoint and one dataset/software endpoint, oriented
/// publication-first, deduplicated, sorted. Edge-level skip reasons land in
/// `counters`.
fn candidate_pairs(
    index: &GraphIndex,
    counters: &mut BTreeMap<String, u64>,
) -> Vec<(ProductId, ProductId)> {
    let mut count = |label: &str| {
        *counters.entry(label.to_string()).or_insert(0) += 1;
    };
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for edge in index.citation_edges() {
        count("edges_scanned");
        let (source, target) = match (index.get(&edge.source), index.get(&edge.target)) {
            (Some(s), Some(t)) => (s, t),
            _ => {
                count("dangling_edge");
                continue;
            }
        };
        let pair = if source.kind == ProductKind::Publication && target.kind.is_supplement_kind() {
            (source.id.clone(), target.id.clone())
        } else if target.kind == ProductKind::Publication && source.kind.is_supplement_kind() {
            (target.id.clone(), source.id.clone())
        } else {
            count("kind_mismatch");
            continue;
        };
        if seen.insert(pair.clone()) {
            pairs.push(pair);
        } else {
            count("duplicate_pair");
        }
    }
    pairs.sort();
    counters.insert("candidates".to_string(), pairs.len() as u64);
    pairs
}

/// Pairs already tied by a declared supplement edge.
pub fn declared_pairs(index: &GraphIndex) -> HashSet<(ProductId, ProductId)> {
    index
        .supplement_edges()
        .map(|e| (e.source.clone(), e.target.clone()))
        .collect()
}

/// The shared-author + temporal-window heuristic.
///
/// Emits `retrofitted_simple` couples for candidates whose author lists
/// share at least one matched author under `matcher` and whose dates fall
/// within `window_days`. Declared pairs are never re-emitted.
pub fn retrofit_simple(
    index: &GraphIndex,
    matcher: NameMatcher,
    window_days: i64,
) -> RetrofitOutcome {
    let mut outcome = RetrofitOutcome::default();
    let candidates = candidate_pairs(index, &mut outcome.counters);
    let declared = declared_pairs(index);

    enum Decision {
        Emit(LinkedCouple),
        Skip(&'static str),
    }

    let decisions: Vec<Decision> = candidates
        .par_iter()
        .map(|pair| {
            if declared.contains(pair) {
                return Decision::Skip("already_declared");
            }
            let publication = index.get(&pair.0).expect("candidate endpoints resolve");
            let supplement = index.get(&pair.1).expect("candidate endpoints resolve");
            if publication.date.is_none() || supplement.date.is_none() {
                return Decision::Skip("missing_date");
            }
            if !temporal_proximity(publication, supplement, window_days) {
                return Decision::Skip("outside_window");
            }
            let alignment = matcher.align(&publication.authors, &supplement.authors);
            if alignment.matches.is_empty() {
                return Decision::Skip("no_shared_author");
            }
            Decision::Emit(LinkedCouple {
                publication: pair.0.clone(),
                supplement: pair.1.clone(),
                provenance: Provenance::RetrofittedSimple,
                score: None,
            })
        })
        .collect();

    for decision in decisions {
        match decision {
            Decision::Emit(couple) => {
                outcome.count("emitted");
                outcome.couples.push(couple);
            }
            Decision::Skip(label) => outcome.count(label),
        }
    }
    outcome
}

fn population_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, variance.sqrt())
}

/// Interval from raw similarity values: mean ± k·(population) stddev,
/// clamped to [0,1].
fn interval_from_similarities(similarities: &[f64], k: f64) -> SimilarityInterval {
    let (mean, stddev) = population_moments(similarities);
    SimilarityInterval {
        lower: (mean - k * stddev).max(0.0),
        upper: (mean + k * stddev).min(1.0),
        sample_size: similarities.len(),
        mean,
        stddev,
    }
}

/// Calibrate the similarity band on the declared couples.
///
/// A couple is usable when both endpoints resolve and yield feature vectors.
/// Fails with `CalibrationUnderflow` below [`MIN_CALIBRATION_SAMPLE`] usable
/// couples.
pub fn calibrate_interval(
    declared: &[LinkedCouple],
    index: &GraphIndex,
    k: f64,
    params: &SimilarityParams,
) -> Result<SimilarityInterval, CalibrationError> {
    let similarities: Vec<f64> = declared
        .par_iter()
        .filter_map(|couple| {
            let publication = index.get(&couple.publication)?;
            let supplement = index.get(&couple.supplement)?;
            let fp = feature_vector(publication).ok()?;
            let fd = feature_vector(supplement).ok()?;
            Some(similarity(&fp, &fd, params))
        })
        .collect();
    if similarities.len() < MIN_CALIBRATION_SAMPLE {
        return Err(CalibrationError::CalibrationUnderflow {
            usable: similarities.len(),
        });
    }
    Ok(interval_from_similarities(&similarities, k))
}

/// The calibrated-similarity heuristic.
///
/// Scores every candidate pair not in `exclude` (declared pairs plus pairs
/// already retrofitted by the simple heuristic) and emits
/// `retrofitted_similarity` couples whose similarity lies inside the
/// interval, score attached.
pub fn retrofit_by_similarity(
    index: &GraphIndex,
    interval: &SimilarityInterval,
    params: &SimilarityParams,
    exclude: &HashSet<(ProductId, ProductId)>,
) -> RetrofitOutcome {
    let mut outcome = RetrofitOutcome::default();
    let candidates = candidate_pairs(index, &mut outcome.counters);

    let open: Vec<&(ProductId, ProductId)> = candidates
        .iter()
        .filter(|pair| {
            if exclude.contains(*pair) {
                outcome.count("already_linked");
                false
            } else {
                true
            }
        })
        .collect();

    // Feature vectors per unique endpoint, computed once.
    let mut ids: Vec<&ProductId> = open.iter().flat_map(|(p, d)| [p, d]).collect();
    ids.sort();
    ids.dedup();
    let features: HashMap<&ProductId, Option<FeatureVector>> = ids
        .par_iter()
        .map(|id| (*id, index.get(id).and_then(|x| feature_vector(x).ok())))
        .collect();

    enum Decision {
        Emit(LinkedCouple),
        Skip(&'static str),
    }

    let decisions: Vec<Decision> = open
        .par_iter()
        .map(|pair| {
            let (Some(Some(fp)), Some(Some(fd))) = (features.get(&pair.0), features.get(&pair.1))
            else {
                return Decision::Skip("missing_features");
            };
            let score = similarity(fp, fd, params);
            if score < interval.lower {
                Decision::Skip("below_interval")
            } else if score > interval.upper {
                Decision::Skip("above_interval")
            } else {
                Decision::Emit(LinkedCouple {
                    publication: pair.0.clone(),
                    supplement: pair.1.clone(),
                    provenance: Provenance::RetrofittedSimilarity,
                    score: Some(score),
                })
            }
        })
        .collect();

    for decision in decisions {
        match decision {
            Decision::Emit(couple) => {
                outcome.count("emitted");
                outcome.couples.push(couple);
            }
            Decision::Skip(label) => outcome.count(label),
        }
    }
    outcome
}
