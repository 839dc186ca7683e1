//! Pairwise author distance and one-to-one author-list alignment.
//!
//! Datasets frequently restate a publication's authors with a different
//! layout — initials added or dropped, "Given Family" instead of
//! "Family, Given" — so plain string equality undercounts shared authors.
//! The distance here works on normalized names: persistent identifiers
//! short-circuit when both sides carry one, family names tolerate a single
//! edit, and given names match when one side merely extends the other or
//! abbreviates tokens to initials.
//!
//! Alignment is greedy minimum-distance matching. Author lists are short, so
//! greedy is near-optimal, and its tie-breaking (ascending distance, then
//! both ranks) makes the output fully deterministic. Optimal assignment
//! could be swapped in behind the same contract.

use serde::{Deserialize, Serialize};

use crate::model::AuthorName;

/// Default match threshold: admits initial extensions and single-typo
/// family matches while rejecting different given names.
pub const DEFAULT_THRESHOLD: f64 = 0.25;

/// One-to-one partial matching between two ordered author lists.
///
/// Ranks are 1-based list positions. Every rank of either list appears
/// exactly once across `matches` and its `*_only` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorAlignment {
    /// Matched pairs `(rank_p, rank_d, distance)`, sorted by `rank_p`.
    pub matches: Vec<(u32, u32, f64)>,
    /// Ranks in the publication list left unmatched, ascending.
    pub p_only: Vec<u32>,
    /// Ranks in the supplement list left unmatched, ascending.
    pub d_only: Vec<u32>,
}

/// Matching policy: strict normalized equality, or the fuzzy distance with a
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NameMatcher {
    /// Two names match iff their normalized full forms are equal. Used to
    /// quantify what fuzzy matching recovers.
    Exact,
    /// Match iff `author_distance ≤ threshold`.
    Fuzzy { threshold: f64 },
}

impl Default for NameMatcher {
    fn default() -> Self {
        NameMatcher::Fuzzy {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl NameMatcher {
    pub fn threshold(&self) -> f64 {
        match self {
            NameMatcher::Exact => 0.0,
            NameMatcher::Fuzzy { threshold } => *threshold,
        }
    }

    /// Distance under this policy, in [0,1].
    pub fn distance(&self, a: &AuthorName, b: &AuthorName) -> f64 {
        match self {
            NameMatcher::Exact => {
                if a.family == b.family && a.given_tokens == b.given_tokens {
                    0.0
                } else {
                    1.0
                }
            }
            NameMatcher::Fuzzy { .. } => author_distance(a, b),
        }
    }

    /// Align two author lists one-to-one; see [`match_author_lists`].
    pub fn align(&self, a_p: &[AuthorName], a_d: &[AuthorName]) -> AuthorAlignment {
        let threshold = self.threshold();
        let mut candidates: Vec<(f64, u32, u32)> = Vec::new();
        for (i, a) in a_p.iter().enumerate() {
            for (j, b) in a_d.iter().enumerate() {
                let d = self.distance(a, b);
                if d <= threshold {
                    candidates.push((d, (i + 1) as u32, (j + 1) as u32));
                }
            }
        }
        candidates.sort_by(|x, y| x.partial_cmp(y).expect("distances are finite"));

        let mut p_used = vec![false; a_p.len()];
        let mut d_used = vec![false; a_d.len()];
        let mut matches = Vec::new();
        for (d, rank_p, rank_d) in candidates {
            let (i, j) = ((rank_p - 1) as usize, (rank_d - 1) as usize);
            if !p_used[i] && !d_used[j] {
                p_used[i] = true;
                d_used[j] = true;
                matches.push((rank_p, rank_d, d));
            }
        }
        matches.sort_by_key(|&(rank_p, _, _)| rank_p);

        let unused = |used: &[bool]| {
            used.iter()
                .enumerate()
                .filter(|(_, &u)| !u)
                .map(|(i, _)| (i + 1) as u32)
                .collect::<Vec<u32>>()
        };
        AuthorAlignment {
            matches,
            p_only: unused(&p_used),
            d_only: unused(&d_used),
        }
    }
}

/// Distance between two normalized author names, in [0,1].
///
/// Persistent identifiers, when present on both sides, decide alone (0 on
/// equality, 1 otherwise). Family names differing by more than one edit
/// give 1. Otherwise the result is a given-name component strictly below
/// one: 0 for equal token sequences, 0 when one sequence merely extends the
/// other or tokens reduce to matching initials ("christopher p" vs
/// "christopher"), otherwise a scaled token edit distance.
pub fn author_distance(a: &AuthorName, b: &AuthorName) -> f64 {
    if let (Some(pa), Some(pb)) = (&a.pid, &b.pid) {
        return if pa == pb { 0.0 } else { 1.0 };
    }
    if levenshtein(&a.family, &b.family) > 1 {
        return 1.0;
    }
    given_component(&a.given_tokens, &b.given_tokens)
}

/// Two given-name tokens denote the same name part: equal, or one is a
/// single-letter initial of the other.
fn tokens_compatible(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    let initial_of = |short: &str, long: &str| {
        short.chars().count() == 1 && short.chars().next() == long.chars().next()
    };
    initial_of(a, b) || initial_of(b, a)
}

/// Given-name component in [0,1).
fn given_component(a: &[String], b: &[String]) -> f64 {
    let prefix = a.len().min(b.len());
    let compatible_prefix = (0..prefix).all(|i| tokens_compatible(&a[i], &b[i]));
    if compatible_prefix {
        // Covers equality and pure extension by extra tokens/initials.
        return 0.0;
    }
    let max_len = a.len().max(b.len());
    token_edit_distance(a, b) as f64 / (max_len as f64 + 1.0)
}

/// Levenshtein distance over token sequences, with compatible tokens
/// substituting for free.
fn token_edit_distance(a: &[String], b: &[String]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, ta) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, tb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(!tokens_compatible(ta, tb));
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Character-level Levenshtein distance.
fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Align two author lists one-to-one under a distance threshold.
///
/// Greedy selection over candidate pairs in ascending
/// `(distance, rank_p, rank_d)` order; a pair is taken when both ranks are
/// still free. The result is a partial injection: unmatched ranks land in
/// `p_only`/`d_only`.
pub fn match_author_lists(
    a_p: &[AuthorName],
    a_d: &[AuthorName],
    threshold: f64,
) -> AuthorAlignment {
    NameMatcher::Fuzzy { threshold }.align(a_p, a_d)
}
