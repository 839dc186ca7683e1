//! Author name normalization.
//!
//! Matching depends on a deterministic, locale-independent normal form:
//! Unicode compatibility decomposition, diacritics stripped (é→e) rather
//! than transliterated per-language, case-folded. Both dominant
//! bibliographic layouts are resolved to `(family, given_tokens)`: a comma
//! splits family/given, otherwise the last whitespace token is the family
//! name. Hyphenated family names stay intact as one token.

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// One entry of a product's ordered author list.
///
/// `raw` is preserved byte-exact for reporting; `family` and `given_tokens`
/// are normalization output (lowercase letters, hyphens, apostrophes only).
/// `rank` is the 1-based list position, unset on names normalized outside a
/// list context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorName {
    pub raw: String,
    pub family: String,
    pub given_tokens: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rank: Option<u32>,
}

impl AuthorName {
    pub fn with_rank(mut self, rank: u32) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn with_pid(mut self, pid: Option<&str>) -> Self {
        self.pid = pid.and_then(normalize_pid);
        self
    }

    /// Normalized `"family, given …"` rendering; normalizing it again is a
    /// fixed point.
    pub fn normalized_full(&self) -> String {
        format!("{}, {}", self.family, self.given_tokens.join(" "))
    }

    /// Blocking key `"family|g"` with the first given-name initial (empty
    /// when there are no given tokens).
    pub fn author_key(&self) -> String {
        let initial = self
            .given_tokens
            .first()
            .and_then(|t| t.chars().next())
            .map(|c| c.to_string())
            .unwrap_or_default();
        format!("{}|{}", self.family, initial)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NameError {
    #[error("author name is empty")]
    EmptyName,
    #[error("no alphabetic content survives normalization: {0:?}")]
    UnparsableName(String),
}

/// Normalize a raw author name string; `rank` is left unset.
///
/// Trailing single letters, with or without periods, become one-letter
/// initial tokens ("Tomasz I." → `["tomasz", "i"]`). Multi-word family parts
/// collapse to a single hyphenated token so the family is always one token.
pub fn normalize_name(raw: &str) -> Result<AuthorName, NameError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(NameError::EmptyName);
    }
    let folded = fold_text(trimmed);

    let (family_words, given_words): (Vec<&str>, Vec<&str>) =
        if let Some((fam, given)) = folded.split_once(',') {
            (name_words(fam), name_words(given))
        } else {
            let words = name_words(&folded);
            match words.split_last() {
                Some((last, rest)) => (vec![*last], rest.to_vec()),
                None => (Vec::new(), Vec::new()),
            }
        };

    let family = family_words
        .iter()
        .filter_map(|w| clean_token(w))
        .collect::<Vec<_>>()
        .join("-");
    let given_tokens: Vec<String> = given_words.iter().filter_map(|w| clean_token(w)).collect();

    if family.is_empty() && given_tokens.is_empty() {
        return Err(NameError::UnparsableName(raw.to_string()));
    }

    Ok(AuthorName {
        raw: raw.to_string(),
        family,
        given_tokens,
        pid: None,
        rank: None,
    })
}

/// Split on whitespace and periods, so "J.R." yields two initial tokens.
fn name_words(part: &str) -> Vec<&str> {
    part.split(|c: char| c.is_whitespace() || c == '.')
        .filter(|w| !w.is_empty())
        .collect()
}

/// Keep letters, hyphens, apostrophes; trim punctuation off the ends.
fn clean_token(word: &str) -> Option<String> {
    let kept: String = word
        .chars()
        .filter(|c| c.is_alphabetic() || *c == '-' || *c == '\'')
        .collect();
    let trimmed = kept.trim_matches(|c| c == '-' || c == '\'');
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_string())
    }
}

/// Unicode-fold a string: map letters NFKD does not decompose, compatibility
/// decompose, strip combining marks, lowercase.
pub fn fold_text(s: &str) -> String {
    s.chars()
        .map(substitute_undecomposable)
        .collect::<String>()
        .nfkd()
        .filter(|c| !is_combining_mark(*c))
        .collect::<String>()
        .to_lowercase()
}

/// Letters that are distinct code points rather than base+mark combinations,
/// plus typographic quote/dash variants.
fn substitute_undecomposable(c: char) -> char {
    match c {
        'Ł' => 'L',
        'ł' => 'l',
        'Ø' => 'O',
        'ø' => 'o',
        'Æ' => 'A',
        'æ' => 'a',
        'Å' => 'A',
        'å' => 'a',
        'ß' => 's',
        'Ð' | 'Đ' => 'D',
        'ð' | 'đ' => 'd',
        'Þ' => 'T',
        'þ' => 't',
        '\u{2018}' | '\u{2019}' | '\u{02BC}' | '\u{02B9}' => '\'',
        '\u{2013}' | '\u{2014}' => '-',
        _ => c,
    }
}

/// Normalize a persistent identifier (e.g. ORCID): lowercase, resolver
/// prefixes stripped. Returns `None` if nothing remains.
pub fn normalize_pid(raw: &str) -> Option<String> {
    let mut value = raw.trim().to_lowercase();
    for prefix in [
        "https://orcid.org/",
        "http://orcid.org/",
        "orcid.org/",
        "orcid:",
    ] {
        if let Some(rest) = value.strip_prefix(prefix) {
            value = rest.trim_start().to_string();
            break;
        }
    }
    if value.is_empty() {
        None
    } else {
        Some(value)
    }
}

/// Heuristic flag for organizational (non-person) authors: no comma layout
/// and more than four whitespace tokens. Such names are still normalized
/// like persons; the flag only feeds ingestion accounting.
pub fn suspected_organization(raw: &str) -> bool {
    !raw.contains(',') && raw.split_whitespace().count() > 4
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comma_layout_with_trailing_initial() {
        let n = normalize_name("Michalak, Tomasz I.").unwrap();
        assert_eq!(n.family, "michalak");
        assert_eq!(n.given_tokens, vec!["tomasz", "i"]);
        assert_eq!(n.raw, "Michalak, Tomasz I.");
        assert_eq!(n.rank, None);
    }

    #[test]
    fn already_lowercase_comma_layout() {
        let n = normalize_name("corkum, christopher").unwrap();
        assert_eq!(n.family, "corkum");
        assert_eq!(n.given_tokens, vec!["christopher"]);
    }

    #[test]
    fn single_token_degenerate() {
        let n = normalize_name("X").unwrap();
        assert_eq!(n.family, "x");
        assert!(n.given_tokens.is_empty());
    }

    #[test]
    fn given_family_layout() {
        let n = normalize_name("Tomasz I. Michalak").unwrap();
        assert_eq!(n.family, "michalak");
        assert_eq!(n.given_tokens, vec!["tomasz", "i"]);
    }

    #[test]
    fn diacritics_stripped_not_transliterated() {
        let n = normalize_name("Gärcía-Núñez, José").unwrap();
        assert_eq!(n.family, "garcia-nunez");
        assert_eq!(n.given_tokens, vec!["jose"]);
        let n = normalize_name("Kowalczyk, Łukasz").unwrap();
        assert_eq!(n.given_tokens, vec!["lukasz"]);
    }

    #[test]
    fn hyphenated_family_kept_as_one_token() {
        let n = normalize_name("Smith-Jones, Ann").unwrap();
        assert_eq!(n.family, "smith-jones");
    }

    #[test]
    fn multiword_family_collapses_to_one_token() {
        let n = normalize_name("van der Berg, Jan").unwrap();
        assert_eq!(n.family, "van-der-berg");
        assert_eq!(n.given_tokens, vec!["jan"]);
    }

    #[test]
    fn apostrophes_survive() {
        let n = normalize_name("O'Brien, Pat").unwrap();
        assert_eq!(n.family, "o'brien");
        let n = normalize_name("O\u{2019}Brien, Pat").unwrap();
        assert_eq!(n.family, "o'brien");
    }

    #[test]
    fn empty_and_unparsable() {
        assert_eq!(normalize_name("   "), Err(NameError::EmptyName));
        assert!(matches!(
            normalize_name("123 456"),
            Err(NameError::UnparsableName(_))
        ));
        assert!(matches!(
            normalize_name(","),
            Err(NameError::UnparsableName(_))
        ));
    }

    #[test]
    fn normalization_idempotent_on_rendered_output() {
        for raw in [
            "Michalak, Tomasz I.",
            "Tomasz I. Michalak",
            "van der Berg, Jan",
            "O'Brien, Pat",
            "X",
        ] {
            let n = normalize_name(raw).unwrap();
            let again = normalize_name(&n.normalized_full()).unwrap();
            assert_eq!(again.family, n.family, "family drifted for {raw:?}");
            assert_eq!(
                again.given_tokens, n.given_tokens,
                "givens drifted for {raw:?}"
            );
        }
    }

    #[test]
    fn author_key_uses_first_given_initial() {
        let n = normalize_name("Corkum, Christopher P.").unwrap();
        assert_eq!(n.author_key(), "corkum|c");
        let n = normalize_name("X").unwrap();
        assert_eq!(n.author_key(), "x|");
    }

    #[test]
    fn pid_normalization() {
        assert_eq!(
            normalize_pid("https://orcid.org/0000-0002-1825-0097"),
            Some("0000-0002-1825-0097".to_string())
        );
        assert_eq!(normalize_pid("  "), None);
        assert_eq!(
            normalize_pid("0000-0001-5109-3700"),
            Some("0000-0001-5109-3700".to_string())
        );
    }

    #[test]
    fn org_suspect_heuristic() {
        assert!(suspected_organization(
            "Regional Consortium for Marine Biodiversity Data Services"
        ));
        assert!(!suspected_organization("Keller, Paula"));
        assert!(!suspected_organization("Paula Keller"));
    }
}
