//! Per-couple authorship drift metrics: cardinality, composition, ordering.
//!
//! Everything is computed from an [`AuthorAlignment`], so composition metrics
//! respect fuzzy name matching. Order metrics use matched authors only —
//! rank comparison requires presence on both sides; unmatched authors show
//! up in the composition numbers instead.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::couples::LinkedCouple;
use crate::index::GraphIndex;
use crate::model::{AuthorName, ProductId, ProductKind};
use crate::namematch::{AuthorAlignment, NameMatcher};

/// Set-level comparison of the two author lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapStats {
    pub size_p: usize,
    pub size_d: usize,
    /// Number of matched pairs.
    pub intersection: usize,
    /// |p_only| + |d_only|; always size_p + size_d − 2·intersection.
    pub symdiff: usize,
    /// intersection / |union|, defined 1 when both lists are empty.
    pub jaccard: f64,
}

/// Rank-level comparison over matched authors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderStats {
    /// Kendall tau over matched pairs' ranks; absent when fewer than two
    /// authors matched.
    pub kendall_tau: Option<f64>,
    /// The rank-1 author of p is matched to the rank-1 author of d.
    pub first_author_preserved: bool,
    /// Analogous for the final ranks.
    pub last_author_preserved: bool,
    /// Max |normalized rank_p − normalized rank_d| over matches; ranks are
    /// normalized to [0,1] by (rank−1)/(len−1), 0 for single-author lists.
    pub max_displacement: f64,
}

/// Full drift analysis of one couple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub couple: LinkedCouple,
    pub overlap: OverlapStats,
    pub order: OrderStats,
    pub alignment: AuthorAlignment,
    /// Publication year, when the publication record carries a date.
    pub year: Option<i32>,
    pub supplement_kind: ProductKind,
}

/// Why a couple could not be analyzed. Non-fatal: callers count and skip.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("couple endpoint {0} is not in the index")]
    UnresolvableEndpoint(ProductId),
    #[error("couple endpoint {0} has an empty author list")]
    AuthorlessEndpoint(ProductId),
}

impl AnalyzeError {
    /// Stable label for skip accounting.
    pub fn reason(&self) -> &'static str {
        match self {
            AnalyzeError::UnresolvableEndpoint(_) => "missing_endpoint",
            AnalyzeError::AuthorlessEndpoint(_) => "authorless",
        }
    }
}

/// Composition metrics of an alignment.
pub fn overlap_stats(alignment: &AuthorAlignment) -> OverlapStats {
    let intersection = alignment.matches.len();
    let size_p = intersection + alignment.p_only.len();
    let size_d = intersection + alignment.d_only.len();
    let symdiff = alignment.p_only.len() + alignment.d_only.len();
    let union = size_p + size_d - intersection;
    let jaccard = if union == 0 {
        1.0
    } else {
        intersection as f64 / union as f64
    };
    OverlapStats {
        size_p,
        size_d,
        intersection,
        symdiff,
        jaccard,
    }
}

/// Order metrics of an alignment over the two lists it was computed from.
pub fn order_stats(
    alignment: &AuthorAlignment,
    a_p: &[AuthorName],
    a_d: &[AuthorName],
) -> OrderStats {
    let pairs: Vec<(u32, u32)> = alignment.matches.iter().map(|&(p, d, _)| (p, d)).collect();
    let first_author_preserved = pairs.contains(&(1, 1));
    let last_author_preserved =
        !a_p.is_empty() && !a_d.is_empty() && pairs.contains(&(a_p.len() as u32, a_d.len() as u32));
    let normalized = |rank: u32, len: usize| {
        if len <= 1 {
            0.0
        } else {
            (rank - 1) as f64 / (len - 1) as f64
        }
    };
    let max_displacement = pairs
        .iter()
        .map(|&(p, d)| (normalized(p, a_p.len()) - normalized(d, a_d.len())).abs())
        .fold(0.0, f64::max);
    OrderStats {
        kendall_tau: kendall_tau(&pairs),
        first_author_preserved,
        last_author_preserved,
        max_displacement,
    }
}

/// Kendall tau (no-tie variant) over matched rank pairs; `None` below two
/// pairs. Ranks on each side are densified to 1..m before comparison.
fn kendall_tau(pairs: &[(u32, u32)]) -> Option<f64> {
    let m = pairs.len();
    if m < 2 {
        return None;
    }
    let densify = |ranks: Vec<u32>| -> Vec<usize> {
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        ranks
            .iter()
            .map(|r| sorted.binary_search(r).expect("rank present") + 1)
            .collect()
    };
    let p = densify(pairs.iter().map(|&(p, _)| p).collect());
    let d = densify(pairs.iter().map(|&(_, d)| d).collect());
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..m {
        for j in (i + 1)..m {
            let sign = (p[i] as i64 - p[j] as i64).signum() * (d[i] as i64 - d[j] as i64).signum();
            if sign > 0 {
                concordant += 1;
            } else if sign < 0 {
                discordant += 1;
            }
        }
    }
    let total = (m * (m - 1) / 2) as f64;
    Some((concordant - discordant) as f64 / total)
}

/// Align both author lists of a couple and compute both stat blocks.
pub fn analyze_couple(
    couple: &LinkedCouple,
    index: &GraphIndex,
    matcher: NameMatcher,
) -> Result<DriftReport, AnalyzeError> {
    let resolve = |id: &ProductId| {
        index
            .get(id)
            .ok_or_else(|| AnalyzeError::UnresolvableEndpoint(id.clone()))
    };
    let publication = resolve(&couple.publication)?;
    let supplement = resolve(&couple.supplement)?;
    for endpoint in [publication, supplement] {
        if endpoint.authors.is_empty() {
            return Err(AnalyzeError::AuthorlessEndpoint(endpoint.id.clone()));
        }
    }
    let alignment = matcher.align(&publication.authors, &supplement.authors);
    let overlap = overlap_stats(&alignment);
    let order = order_stats(&alignment, &publication.authors, &supplement.authors);
    Ok(DriftReport {
        couple: couple.clone(),
        overlap,
        order,
        alignment,
        year: publication.year(),
        supplement_kind: supplement.kind,
    })
}
