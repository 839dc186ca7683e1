//! Streaming ingestion of product and relation dumps.
//!
//! Both dumps are JSON Lines, one object per line, optionally gzip-compressed
//! (detected by magic bytes). Malformed lines never abort a run: they are
//! skipped and counted with a reason, and the accounting identity
//! `lines_read = records_emitted + records_rejected` holds for every input,
//! including random bytes. Only an unreadable stream is fatal.
//!
//! Wire schemas (no other fields accepted):
//!
//! - products:  `{"id", "kind", "title", "date"?, "authors": [{"name", "pid"?}], "subjects"?}`
//! - relations: `{"source", "target", "semantics"}`
//!
//! Author rank is implied by array order.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};

use crate::model::{
    canonicalize_relation, normalize_name, parse_dump_date, suspected_organization, ProductId,
    ProductKind, Relation, RelationSemantics, ResearchProduct,
};

/// Exact accounting of one dump read.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub lines_read: u64,
    pub records_emitted: u64,
    pub records_rejected: u64,
    /// Reject reason label → count. Blank lines count as rejected ("blank").
    pub reject_reasons: BTreeMap<String, u64>,
    /// Counted-but-not-rejected observations, e.g. suspected organizational
    /// author strings and unknown relation semantics labels.
    pub notes: BTreeMap<String, u64>,
}

impl IngestStats {
    fn reject(&mut self, reason: &str) {
        self.records_rejected += 1;
        *self.reject_reasons.entry(reason.to_string()).or_insert(0) += 1;
    }

    fn note(&mut self, key: String) {
        *self.notes.entry(key).or_insert(0) += 1;
    }

    /// `lines_read = records_emitted + records_rejected`
    pub fn is_balanced(&self) -> bool {
        self.lines_read == self.records_emitted + self.records_rejected
    }
}

impl fmt::Display for IngestStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lines_read={} emitted={} rejected={}",
            self.lines_read, self.records_emitted, self.records_rejected
        )?;
        if !self.reject_reasons.is_empty() {
            write!(f, " rejects=")?;
            fmt_counts(f, &self.reject_reasons)?;
        }
        if !self.notes.is_empty() {
            write!(f, " notes=")?;
            fmt_counts(f, &self.notes)?;
        }
        Ok(())
    }
}

fn fmt_counts(f: &mut fmt::Formatter<'_>, counts: &BTreeMap<String, u64>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, (k, v)) in counts.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{k}: {v}")?;
    }
    write!(f, "}}")
}

/// Wire form of one products line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProduct {
    pub id: String,
    pub kind: String,
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub date: Option<String>,
    pub authors: Vec<RawAuthor>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subjects: Option<Vec<String>>,
}

/// Wire form of one author entry; rank is implied by array order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAuthor {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pid: Option<String>,
}

/// Wire form of one relations line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRelation {
    pub source: String,
    pub target: String,
    pub semantics: String,
}

/// Open a dump file, transparently decompressing gzip (by magic bytes).
pub fn open_dump(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    let file = std::fs::File::open(path)?;
    let mut reader = BufReader::new(file);
    let magic = reader.fill_buf()?;
    if magic.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::new(GzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Byte-line splitter that tolerates invalid UTF-8 and a missing final
/// newline.
struct ByteLines<R> {
    inner: R,
    done: bool,
}

impl<R: BufRead> ByteLines<R> {
    fn new(inner: R) -> Self {
        ByteLines { inner, done: false }
    }

    fn next_line(&mut self) -> io::Result<Option<Vec<u8>>> {
        if self.done {
            return Ok(None);
        }
        let mut buf = Vec::new();
        let n = self.inner.read_until(b'\n', &mut buf)?;
        if n == 0 {
            self.done = true;
            return Ok(None);
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
        }
        Ok(Some(buf))
    }
}

enum LineOutcome<T> {
    Emit(T),
    Reject(&'static str),
}

/// Classify a serde_json failure: broken JSON vs. well-formed JSON that does
/// not match the schema.
fn classify_json_error(err: &serde_json::Error) -> &'static str {
    if err.is_data() {
        "schema"
    } else {
        "bad_json"
    }
}

fn parse_line<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T, &'static str> {
    let text = std::str::from_utf8(bytes).map_err(|_| "invalid_utf8")?;
    serde_json::from_str(text).map_err(|e| classify_json_error(&e))
}

fn is_blank(bytes: &[u8]) -> bool {
    bytes.iter().all(|b| b.is_ascii_whitespace())
}

/// Streaming reader over a products dump.
///
/// Iterates `io::Result<ResearchProduct>` in input order; a yielded `Err` is
/// fatal and ends the stream. Accounting accumulates in [`IngestStats`],
/// complete once the iterator is exhausted.
pub struct ProductReader<R> {
    lines: ByteLines<R>,
    stats: IngestStats,
    max_date: NaiveDate,
}

impl<R: BufRead> ProductReader<R> {
    pub fn new(reader: R) -> Self {
        ProductReader {
            lines: ByteLines::new(reader),
            stats: IngestStats::default(),
            max_date: crate::model::max_plausible_date(),
        }
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    pub fn into_stats(self) -> IngestStats {
        self.stats
    }

    fn convert(&mut self, raw: RawProduct) -> LineOutcome<ResearchProduct> {
        let id = match ProductId::parse(&raw.id) {
            Ok(id) => id,
            Err(_) => return LineOutcome::Reject("bad_id"),
        };
        let date = match &raw.date {
            Some(s) => match parse_dump_date(s, self.max_date) {
                Ok(d) => Some(d),
                Err(_) => return LineOutcome::Reject("bad_date"),
            },
            None => None,
        };
        let mut authors = Vec::with_capacity(raw.authors.len());
        for (i, entry) in raw.authors.iter().enumerate() {
            match normalize_name(&entry.name) {
                Ok(name) => {
                    if suspected_organization(&entry.name) {
                        self.stats.note("suspect_org_author".to_string());
                    }
                    authors.push(
                        name.with_pid(entry.pid.as_deref())
                            .with_rank((i + 1) as u32),
                    );
                }
                Err(_) => return LineOutcome::Reject("bad_author"),
            }
        }
        LineOutcome::Emit(ResearchProduct {
            id,
            kind: ProductKind::from_label(&raw.kind),
            title: raw.title,
            date,
            authors,
            subjects: raw.subjects,
        })
    }
}

impl<R: BufRead> Iterator for ProductReader<R> {
    type Item = io::Result<ResearchProduct>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let bytes = match self.lines.next_line() {
                Ok(Some(bytes)) => bytes,
                Ok(None) => return None,
                Err(e) => {
                    self.lines.done = true;
                    return Some(Err(e));
                }
            };
            self.stats.lines_read += 1;
            if is_blank(&bytes) {
                self.stats.reject("blank");
                continue;
            }
            let outcome = match parse_line::<RawProduct>(&bytes) {
                Ok(raw) => self.convert(raw),
                Err(reason) => LineOutcome::Reject(reason),
            };
            match outcome {
                LineOutcome::Emit(product) => {
                    self.stats.records_emitted += 1;
                    return Some(Ok(product));
                }
                LineOutcome::Reject(reason) => self.stats.reject(reason),
            }
        }
    }
}

/// Streaming reader over a relations dump. Emitted relations are
/// canonicalized; self-loops are rejected; unknown semantics labels are
/// emitted as `Other` and counted in the notes.
pub struct RelationReader<R> {
    lines: ByteLines<R>,
    stats: IngestStats,
}

impl<R: BufRead> RelationReader<R> {
    pub fn new(reader: R) -> Self {
        RelationReader {
            lines: ByteLines::new(reader),
            stats: IngestStats::default(),
        }
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    pub fn into_stats(self) -> IngestStats {
        self.stats
    }

    fn convert(&mut self, raw: RawRelation) -> LineOutcome<Relation> {
        let source = match ProductId::parse(&raw.source) {
            Ok(id) => id,
            Err(_) => return LineOutcome::Reject("bad_id"),
        };
        let target = match ProductId::parse(&raw.target) {
            Ok(id) => id,
            Err(_) => return LineOutcome::Reject("bad_id"),
        };
        if source == target {
            return LineOutcome::Reject("self_loop");
        }
        let semantics = RelationSemantics::from_label(&raw.semantics);
        if let RelationSemantics::Other(label) = &semantics {
            self.stats.note(format!("other_semantics:{label}"));
        }
        LineOutcome::Emit(canonicalize_relation(Relation {
            source,
            target,
            semantics,
        }))
    }
}

impl<R: BufRead> Iterator for RelationReader<R> {
    type Item = io::Result<Relation>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let bytes = match self.lines.next_line() {
                Ok(Some(bytes)) => bytes,
                Ok(None) => return None,
                Err(e) => {
                    self.lines.done = true;
                    return Some(Err(e));
                }
            };
            self.stats.lines_read += 1;
            if is_blank(&bytes) {
                self.stats.reject("blank");
                continue;
            }
            let outcome = match parse_line::<RawRelation>(&bytes) {
                Ok(raw) => self.convert(raw),
                Err(reason) => LineOutcome::Reject(reason),
            };
            match outcome {
                LineOutcome::Emit(relation) => {
                    self.stats.records_emitted += 1;
                    return Some(Ok(relation));
                }
                LineOutcome::Reject(reason) => self.stats.reject(reason),
            }
        }
    }
}

/// Drain a products stream eagerly.
pub fn read_products<R: BufRead>(reader: R) -> io::Result<(Vec<ResearchProduct>, IngestStats)> {
    let mut products = ProductReader::new(reader);
    let mut out = Vec::new();
    for item in &mut products {
        out.push(item?);
    }
    Ok((out, products.into_stats()))
}

/// Drain a relations stream eagerly.
pub fn read_relations<R: BufRead>(reader: R) -> io::Result<(Vec<Relation>, IngestStats)> {
    let mut relations = RelationReader::new(reader);
    let mut out = Vec::new();
    for item in &mut relations {
        out.push(item?);
    }
    Ok((out, relations.into_stats()))
}
