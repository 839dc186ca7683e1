//! Selection of declared publication↔supplement couples from the index.
//!
//! One couple per canonical `IsSupplementedBy` edge whose endpoints resolve
//! and have the right kinds. A publication supplemented by many datasets
//! yields one couple per dataset: the unit of analysis is the pair, not the
//! star. Products with empty author lists still form couples — they are
//! flagged and counted here, and skipped later by drift metrics; silently
//! dropping them would bias the comparison.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::index::GraphIndex;
use crate::model::ProductId;

/// How a couple entered the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Declared,
    RetrofittedSimple,
    RetrofittedSimilarity,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Declared => "declared",
            Provenance::RetrofittedSimple => "retrofitted_simple",
            Provenance::RetrofittedSimilarity => "retrofitted_similarity",
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A publication↔supplement pairing with its provenance.
///
/// `score` carries the feature similarity for `retrofitted_similarity`
/// couples and is absent otherwise. Serializes as one JSON Lines object
/// `{publication, supplement, provenance, score?}` for checkpointing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkedCouple {
    pub publication: ProductId,
    pub supplement: ProductId,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub score: Option<f64>,
}

impl LinkedCouple {
    pub fn pair(&self) -> (ProductId, ProductId) {
        (self.publication.clone(), self.supplement.clone())
    }
}

/// Selected couples plus per-reason exclusion and flag counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CoupleSelection {
    /// Sorted by (publication, supplement); pairs are unique.
    pub couples: Vec<LinkedCouple>,
    /// Reason → count. "missing_endpoint" and "wrong_kind" edges are
    /// excluded; "authorless" couples are included but flagged.
    pub exclusions: BTreeMap<String, u64>,
}

impl CoupleSelection {
    fn count(&mut self, reason: &str) {
        *self.exclusions.entry(reason.to_string()).or_insert(0) += 1;
    }
}

/// Select all declared couples from the index's supplement edges.
///
/// Selection is total: violations are counted and excluded, never raised.
/// Output order is deterministic regardless of edge order.
pub fn select_declared_couples(index: &GraphIndex) -> CoupleSelection {
    let mut selection = CoupleSelection::default();
    for edge in index.supplement_edges() {
        let (publication, supplement) = match (index.get(&edge.source), index.get(&edge.target)) {
            (Some(p), Some(d)) => (p, d),
            _ => {
                selection.count("missing_endpoint");
                continue;
            }
        };
        if publication.kind != crate::model::ProductKind::Publication
            || !supplement.kind.is_supplement_kind()
        {
            selection.count("wrong_kind");
            continue;
        }
        if publication.authors.is_empty() || supplement.authors.is_empty() {
            selection.count("authorless");
        }
        selection.couples.push(LinkedCouple {
            publication: publication.id.clone(),
            supplement: supplement.id.clone(),
            provenance: Provenance::Declared,
            score: None,
        });
    }
    selection.couples.sort_by_key(LinkedCouple::pair);
    selection
}
