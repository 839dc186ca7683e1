//! Domain types shared by all pipeline stages.
//!
//! Everything here is immutable after construction and safe to share across
//! threads; the operations are pure functions.

mod date;
mod name;

pub use date::{complete_date, max_plausible_date, parse_dump_date, DateError};
pub use name::{
    fold_text, normalize_name, normalize_pid, suspected_organization, AuthorName, NameError,
};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A case-normalized product identifier with a detected scheme label.
///
/// The value is lowercased, trimmed, and stripped of DOI resolver prefixes,
/// so identifiers match case-insensitively (DOIs are case-insensitive by
/// standard). Serializes as the bare value string; the scheme is re-detected
/// on deserialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductId {
    scheme: String,
    value: String,
}

/// Resolver prefixes stripped from DOI-valued identifiers.
const DOI_PREFIXES: &[&str] = &[
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi.org/",
    "dx.doi.org/",
    "doi:",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdError {
    #[error("identifier is empty")]
    Empty,
}

impl ProductId {
    /// Parse a raw identifier string into its canonical form.
    pub fn parse(raw: &str) -> Result<Self, IdError> {
        let mut value = raw.trim().to_lowercase();
        for prefix in DOI_PREFIXES {
            if let Some(rest) = value.strip_prefix(prefix) {
                value = rest.trim_start().to_string();
                break;
            }
        }
        if value.is_empty() {
            return Err(IdError::Empty);
        }
        let scheme = detect_scheme(&value).to_string();
        Ok(ProductId { scheme, value })
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn value(&self) -> &str {
        &self.value
    }
}

/// Scheme detection is heuristic: DOI shape, then OpenAIRE's `prefix|ns::hash`
/// shape, else an opaque label.
fn detect_scheme(value: &str) -> &'static str {
    if value.starts_with("10.") && value.contains('/') {
        "doi"
    } else if value.contains("::") {
        "openaire"
    } else {
        "other"
    }
}

impl fmt::Display for ProductId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

impl Serialize for ProductId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.value)
    }
}

impl<'de> Deserialize<'de> for ProductId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        ProductId::parse(&raw).map_err(serde::de::Error::custom)
    }
}

/// Kind of research product; unknown kind labels map to `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    Publication,
    Dataset,
    Software,
    Other,
}

impl ProductKind {
    pub fn from_label(label: &str) -> Self {
        match label.trim().to_ascii_lowercase().as_str() {
            "publication" => ProductKind::Publication,
            "dataset" => ProductKind::Dataset,
            "software" => ProductKind::Software,
            _ => ProductKind::Other,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ProductKind::Publication => "publication",
            ProductKind::Dataset => "dataset",
            ProductKind::Software => "software",
            ProductKind::Other => "other",
        }
    }

    /// Datasets and software can stand as the supplement side of a couple.
    pub fn is_supplement_kind(&self) -> bool {
        matches!(self, ProductKind::Dataset | ProductKind::Software)
    }
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One publication/dataset/software record from the dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResearchProduct {
    pub id: ProductId,
    pub kind: ProductKind,
    pub title: String,
    pub date: Option<chrono::NaiveDate>,
    /// Ordered author list; ranks are 1-based list positions. May be empty
    /// (flagged downstream, never silently dropped).
    pub authors: Vec<AuthorName>,
    pub subjects: Option<Vec<String>>,
}

impl ResearchProduct {
    pub fn year(&self) -> Option<i32> {
        use chrono::Datelike;
        self.date.map(|d| d.year())
    }
}

/// Semantics of a directed relation between two products.
///
/// The label set is closed; unknown labels are preserved as `Other` and
/// counted by ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationSemantics {
    IsSupplementTo,
    IsSupplementedBy,
    Cites,
    IsCitedBy,
    References,
    IsReferencedBy,
    Other(String),
}

impl RelationSemantics {
    pub fn from_label(label: &str) -> Self {
        match label.trim().to_ascii_lowercase().as_str() {
            "issupplementto" => RelationSemantics::IsSupplementTo,
            "issupplementedby" => RelationSemantics::IsSupplementedBy,
            "cites" => RelationSemantics::Cites,
            "iscitedby" => RelationSemantics::IsCitedBy,
            "references" => RelationSemantics::References,
            "isreferencedby" => RelationSemantics::IsReferencedBy,
            _ => RelationSemantics::Other(label.trim().to_string()),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            RelationSemantics::IsSupplementTo => "IsSupplementTo",
            RelationSemantics::IsSupplementedBy => "IsSupplementedBy",
            RelationSemantics::Cites => "Cites",
            RelationSemantics::IsCitedBy => "IsCitedBy",
            RelationSemantics::References => "References",
            RelationSemantics::IsReferencedBy => "IsReferencedBy",
            RelationSemantics::Other(label) => label,
        }
    }

    /// Citation-style relations carrying no supplement semantics.
    pub fn is_vanilla_citation(&self) -> bool {
        matches!(
            self,
            RelationSemantics::Cites
                | RelationSemantics::IsCitedBy
                | RelationSemantics::References
                | RelationSemantics::IsReferencedBy
        )
    }
}

impl fmt::Display for RelationSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for RelationSemantics {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for RelationSemantics {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Ok(RelationSemantics::from_label(&raw))
    }
}

/// Directed typed edge between two product identifiers. Invariant:
/// `source != target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub source: ProductId,
    pub target: ProductId,
    pub semantics: RelationSemantics,
}

/// Flip inverse semantics to a canonical direction.
///
/// `IsSupplementTo(d→p)` becomes `IsSupplementedBy(p→d)`; `IsCitedBy` and
/// `IsReferencedBy` likewise flip to `Cites` and `References`. Canonical
/// relations are returned unchanged. Idempotent; preserves the unordered
/// endpoint pair.
pub fn canonicalize_relation(r: Relation) -> Relation {
    let flipped = |semantics| Relation {
        source: r.target.clone(),
        target: r.source.clone(),
        semantics,
    };
    match r.semantics {
        RelationSemantics::IsSupplementTo => flipped(RelationSemantics::IsSupplementedBy),
        RelationSemantics::IsCitedBy => flipped(RelationSemantics::Cites),
        RelationSemantics::IsReferencedBy => flipped(RelationSemantics::References),
        _ => r,
    }
}
