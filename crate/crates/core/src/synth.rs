//! Seeded synthetic corpus generator with planted ground truth.
//!
//! Produces dump files in the wire schema plus a truth record of which
//! publication↔dataset pairs were planted, so retrofit recall/precision can
//! be measured against a known answer. Planted supplements restate a subset
//! of the publication's authors under harmless variations (initials added,
//! dropped or abbreviated, layout flipped), embed the publication title
//! behind an "additional file" prefix, and sit within a small date offset —
//! the same signal profile on declared links (used for calibration) and on
//! supplement-like citation links (what retrofitting must recover).
//!
//! Everything is drawn from one ChaCha8 stream, so a seed fully determines
//! the corpus byte-for-byte.

use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::{RawAuthor, RawProduct, RawRelation};

const FAMILIES: &[&str] = &[
    "Abbott",
    "Bergmann",
    "Castellano",
    "Dufour",
    "Eriksen",
    "Fontana",
    "Grigoriev",
    "Hoffmann",
    "Ibanez",
    "Jankowski",
    "Kowalczyk",
    "Lindgren",
    "Moreau",
    "Novak",
    "Olsson",
    "Petrova",
    "Quintero",
    "Rasmussen",
    "Santoro",
    "Takahashi",
    "Ullmann",
    "Vasquez",
    "Wagner",
    "Xu",
    "Yamamoto",
    "Zielinski",
    "Almeida",
    "Brandt",
    "Cervantes",
    "Dimitrov",
    "Egorov",
    "Fischer",
    "Galloway",
    "Haugen",
    "Ivanova",
    "Jensen",
    "Keller",
    "Lombardi",
    "Meyer",
    "Nilsson",
];

const GIVENS: &[&str] = &[
    "Anna", "Boris", "Clara", "Daniel", "Elena", "Filip", "Greta", "Henrik", "Irene", "Jakob",
    "Katrin", "Lukas", "Marta", "Nils", "Olga", "Pavel", "Rosa", "Stefan", "Teresa", "Viktor",
    "Wanda", "Xenia", "Yuri", "Zofia",
];

const WORDS: &[&str] = &[
    "analysis",
    "assembly",
    "atmospheric",
    "bacterial",
    "behavioral",
    "carbon",
    "cellular",
    "climate",
    "clinical",
    "coastal",
    "cognitive",
    "comparative",
    "coral",
    "cortical",
    "demographic",
    "dynamics",
    "ecosystem",
    "expression",
    "field",
    "flux",
    "gene",
    "genomic",
    "glacial",
    "gradient",
    "growth",
    "imaging",
    "immune",
    "isotope",
    "larval",
    "longitudinal",
    "marine",
    "measurements",
    "membrane",
    "metabolic",
    "microbial",
    "migration",
    "modeling",
    "molecular",
    "monitoring",
    "neural",
    "nutrient",
    "observations",
    "oceanic",
    "patterns",
    "phenotype",
    "plasma",
    "population",
    "profiles",
    "protein",
    "regional",
    "response",
    "sampling",
    "seasonal",
    "sediment",
    "sequencing",
    "signaling",
    "soil",
    "spectral",
    "survey",
    "thermal",
    "tissue",
    "transport",
    "variability",
    "vegetation",
];

/// Knobs of one corpus. Counts are exact: the generator emits precisely
/// these many records and edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    /// Publication records.
    pub publications: usize,
    /// Datasets tied to a publication by a declared supplement edge.
    pub declared_links: usize,
    /// Datasets tied to a publication only by a citation edge — the planted
    /// retrofit targets (shared authors, dates ≤ 150 days apart).
    pub supplement_like_cites: usize,
    /// Datasets with no planted link; targets of noise citations.
    pub extra_datasets: usize,
    /// Publication→dataset citation edges with no planted relationship.
    pub noise_cites: usize,
    /// Publication→publication citation edges.
    pub pub_pub_cites: usize,
    /// Fraction of planted supplements emitted as kind=software.
    pub software_share: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            publications: 3_000,
            declared_links: 1_000,
            supplement_like_cites: 200,
            extra_datasets: 500,
            noise_cites: 1_500,
            pub_pub_cites: 2_000,
            software_share: 0.25,
        }
    }
}

impl SynthConfig {
    pub fn total_products(&self) -> usize {
        self.publications + self.declared_links + self.supplement_like_cites + self.extra_datasets
    }

    pub fn total_relations(&self) -> usize {
        self.declared_links + self.supplement_like_cites + self.noise_cites + self.pub_pub_cites
    }
}

/// Planted (publication id, supplement id) pairs, as written to the dump.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub declared: Vec<(String, String)>,
    pub supplement_like: Vec<(String, String)>,
}

/// One generated corpus: dump records in write order plus the truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub products: Vec<RawProduct>,
    pub relations: Vec<RawRelation>,
    pub truth: SynthTruth,
}

#[derive(Clone)]
struct AuthorSpec {
    family: &'static str,
    given: &'static str,
    middle: Option<char>,
    pid: Option<String>,
}

impl AuthorSpec {
    fn render(&self) -> String {
        match self.middle {
            Some(m) => format!("{}, {} {}.", self.family, self.given, m),
            None => format!("{}, {}", self.family, self.given),
        }
    }
}

struct PubRecord {
    id: String,
    title: String,
    date: NaiveDate,
    authors: Vec<AuthorSpec>,
}

fn base_date(rng: &mut ChaCha8Rng) -> NaiveDate {
    let origin = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
    origin + chrono::Duration::days(rng.gen_range(0..5110))
}

fn title(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(6..=12);
    (0..n)
        .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn orcid(rng: &mut ChaCha8Rng) -> String {
    format!(
        "0000-000{}-{:04}-{:04}",
        rng.gen_range(1..=2),
        rng.gen_range(0..10_000),
        rng.gen_range(0..10_000)
    )
}

fn author_pool(rng: &mut ChaCha8Rng) -> Vec<AuthorSpec> {
    let count = rng.gen_range(2..=8);
    let combos = rand::seq::index::sample(rng, FAMILIES.len() * GIVENS.len(), count);
    combos
        .iter()
        .map(|combo| AuthorSpec {
            family: FAMILIES[combo / GIVENS.len()],
            given: GIVENS[combo % GIVENS.len()],
            middle: if rng.gen_bool(0.3) {
                Some((b'a' + rng.gen_range(0..26u8)) as char)
            } else {
                None
            },
            pid: if rng.gen_bool(0.1) {
                Some(orcid(rng))
            } else {
                None
            },
        })
        .collect()
}

/// Restate an author as a supplement record would: same person, possibly a
/// different rendering. Every variant normalizes to match the original at
/// distance 0.
fn restated(rng: &mut ChaCha8Rng, author: &AuthorSpec) -> RawAuthor {
    let name = match rng.gen_range(0..4u8) {
        // verbatim
        0 => author.render(),
        // middle initial dropped (or kept verbatim when there is none)
        1 => format!("{}, {}", author.family, author.given),
        // given name abbreviated to its initial
        2 => format!(
            "{}, {}.",
            author.family,
            author.given.chars().next().unwrap()
        ),
        // layout flipped
        _ => match author.middle {
            Some(m) => format!("{} {}. {}", author.given, m, author.family),
            None => format!("{} {}", author.given, author.family),
        },
    };
    RawAuthor {
        name,
        pid: if author.pid.is_some() && rng.gen_bool(0.5) {
            author.pid.clone()
        } else {
            None
        },
    }
}

fn raw_authors(authors: &[AuthorSpec]) -> Vec<RawAuthor> {
    authors
        .iter()
        .map(|a| RawAuthor {
            name: a.render(),
            pid: a.pid.clone(),
        })
        .collect()
}

fn supplement_product(
    rng: &mut ChaCha8Rng,
    id: String,
    parent: &PubRecord,
    seq: usize,
    max_offset_days: i64,
    software_share: f64,
) -> RawProduct {
    // At least half of the publication's authors reappear, publication
    // order mostly preserved.
    let keep = rng.gen_range(parent.authors.len().div_ceil(2)..=parent.authors.len());
    let picked = rand::seq::index::sample(rng, parent.authors.len(), keep);
    let mut indices: Vec<usize> = picked.iter().collect();
    indices.sort_unstable();
    if rng.gen_bool(0.3) {
        indices.shuffle(rng);
    }
    let authors: Vec<RawAuthor> = indices
        .iter()
        .map(|&i| restated(rng, &parent.authors[i]))
        .collect();
    let offset = rng.gen_range(-max_offset_days..=max_offset_days);
    let date = parent.date + chrono::Duration::days(offset);
    let kind = if rng.gen_bool(software_share) {
        "software"
    } else {
        "dataset"
    };
    let title = if kind == "software" {
        format!(
            "software package {}: analysis code of {}",
            seq % 9 + 1,
            parent.title
        )
    } else {
        format!(
            "additional file {}: table s{} of {}",
            seq % 9 + 1,
            seq % 9 + 1,
            parent.title
        )
    };
    RawProduct {
        id,
        kind: kind.to_string(),
        title,
        date: Some(date.format("%Y-%m-%d").to_string()),
        authors,
        subjects: None,
    }
}

/// Generate one corpus from the config's seed.
pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut products: Vec<RawProduct> = Vec::with_capacity(config.total_products());
    let mut relations: Vec<RawRelation> = Vec::with_capacity(config.total_relations());
    let mut truth = SynthTruth::default();

    let pubs: Vec<PubRecord> = (0..config.publications)
        .map(|i| PubRecord {
            id: format!("10.5555/synth.p{i:06}"),
            title: title(&mut rng),
            date: base_date(&mut rng),
            authors: author_pool(&mut rng),
        })
        .collect();
    for record in &pubs {
        products.push(RawProduct {
            id: record.id.clone(),
            kind: "publication".to_string(),
            title: record.title.clone(),
            date: Some(record.date.format("%Y-%m-%d").to_string()),
            authors: raw_authors(&record.authors),
            subjects: None,
        });
    }

    // Declared supplements: dataset product + IsSupplementedBy edge (half
    // stated from the dataset side as IsSupplementTo).
    for i in 0..config.declared_links {
        let parent = &pubs[rng.gen_range(0..pubs.len())];
        let id = format!("10.5555/synth.d{i:06}");
        products.push(supplement_product(
            &mut rng,
            id.clone(),
            parent,
            i,
            120,
            config.software_share,
        ));
        relations.push(if rng.gen_bool(0.5) {
            RawRelation {
                source: parent.id.clone(),
                target: id.clone(),
                semantics: "IsSupplementedBy".to_string(),
            }
        } else {
            RawRelation {
                source: id.clone(),
                target: parent.id.clone(),
                semantics: "IsSupplementTo".to_string(),
            }
        });
        truth.declared.push((parent.id.clone(), id));
    }

    // Supplement-like citations: same construction, but the edge is a plain
    // citation — these are what retrofitting must recover.
    for i in 0..config.supplement_like_cites {
        let parent = &pubs[rng.gen_range(0..pubs.len())];
        let id = format!("10.5555/synth.s{i:06}");
        products.push(supplement_product(
            &mut rng,
            id.clone(),
            parent,
            i,
            150,
            config.software_share,
        ));
        relations.push(match rng.gen_range(0..3u8) {
            0 => RawRelation {
                source: parent.id.clone(),
                target: id.clone(),
                semantics: "Cites".to_string(),
            },
            1 => RawRelation {
                source: parent.id.clone(),
                target: id.clone(),
                semantics: "References".to_string(),
            },
            _ => RawRelation {
                source: id.clone(),
                target: parent.id.clone(),
                semantics: "IsCitedBy".to_string(),
            },
        });
        truth.supplement_like.push((parent.id.clone(), id));
    }

    // Unrelated datasets: own titles, own authors; a few dateless.
    let extra_start = products.len();
    for i in 0..config.extra_datasets {
        let date = if rng.gen_bool(0.02) {
            None
        } else if rng.gen_bool(0.05) {
            Some(base_date(&mut rng).format("%Y-%m").to_string())
        } else {
            Some(base_date(&mut rng).format("%Y-%m-%d").to_string())
        };
        products.push(RawProduct {
            id: format!("10.5555/synth.x{i:06}"),
            kind: "dataset".to_string(),
            title: title(&mut rng),
            date,
            authors: raw_authors(&author_pool(&mut rng)),
            subjects: None,
        });
    }
    let extras: Vec<String> = products[extra_start..]
        .iter()
        .map(|p| p.id.clone())
        .collect();

    // Noise citations: a random publication cites a random dataset it is
    // not planted with.
    let all_datasets: Vec<(String, Option<String>)> = truth
        .declared
        .iter()
        .chain(truth.supplement_like.iter())
        .map(|(parent, d)| (d.clone(), Some(parent.clone())))
        .chain(extras.iter().map(|d| (d.clone(), None)))
        .collect();
    for _ in 0..config.noise_cites {
        let (dataset, owner) = &all_datasets[rng.gen_range(0..all_datasets.len())];
        let citing = loop {
            let candidate = &pubs[rng.gen_range(0..pubs.len())];
            if Some(&candidate.id) != owner.as_ref() {
                break candidate.id.clone();
            }
        };
        relations.push(RawRelation {
            source: citing,
            target: dataset.clone(),
            semantics: "Cites".to_string(),
        });
    }

    // Publication-to-publication citations: kind-mismatch candidates.
    for _ in 0..config.pub_pub_cites {
        let a = rng.gen_range(0..pubs.len());
        let b = loop {
            let b = rng.gen_range(0..pubs.len());
            if b != a {
                break b;
            }
        };
        relations.push(RawRelation {
            source: pubs[a].id.clone(),
            target: pubs[b].id.clone(),
            semantics: "Cites".to_string(),
        });
    }

    // Dumps arrive in no particular order.
    products.shuffle(&mut rng);
    relations.shuffle(&mut rng);

    SynthCorpus {
        products,
        relations,
        truth,
    }
}

/// Paths of one corpus written to disk.
#[derive(Debug, Clone)]
pub struct CorpusPaths {
    pub products: PathBuf,
    pub relations: PathBuf,
    pub truth: PathBuf,
}

/// Write `products.jsonl`, `relations.jsonl` and `truth.json` into `dir`.
pub fn write_corpus(corpus: &SynthCorpus, dir: &Path) -> io::Result<CorpusPaths> {
    let paths = CorpusPaths {
        products: dir.join("products.jsonl"),
        relations: dir.join("relations.jsonl"),
        truth: dir.join("truth.json"),
    };
    let mut out = BufWriter::new(std::fs::File::create(&paths.products)?);
    for product in &corpus.products {
        serde_json::to_writer(&mut out, product)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    let mut out = BufWriter::new(std::fs::File::create(&paths.relations)?);
    for relation in &corpus.relations {
        serde_json::to_writer(&mut out, relation)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    std::fs::write(&paths.truth, serde_json::to_vec_pretty(&corpus.truth)?)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::GraphIndex;
    use crate::ingest::{read_products, read_relations};
    use crate::namematch::NameMatcher;
    use crate::retrofit::temporal_proximity;
    use std::io::Cursor;

    fn small_config() -> SynthConfig {
        SynthConfig {
            seed: 7,
            publications: 120,
            declared_links: 50,
            supplement_like_cites: 20,
            extra_datasets: 30,
            noise_cites: 60,
            pub_pub_cites: 40,
            software_share: 0.25,
        }
    }

    #[test]
    fn exact_counts() {
        let config = small_config();
        let corpus = generate(&config);
        assert_eq!(corpus.products.len(), config.total_products());
        assert_eq!(corpus.relations.len(), config.total_relations());
        assert_eq!(corpus.truth.declared.len(), config.declared_links);
        assert_eq!(
            corpus.truth.supplement_like.len(),
            config.supplement_like_cites
        );
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate(&small_config());
        let b = generate(&small_config());
        assert_eq!(
            serde_json::to_string(&a.products).unwrap(),
            serde_json::to_string(&b.products).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&a.relations).unwrap(),
            serde_json::to_string(&b.relations).unwrap()
        );
        assert_eq!(a.truth, b.truth);

        let c = generate(&SynthConfig {
            seed: 8,
            ..small_config()
        });
        assert_ne!(
            serde_json::to_string(&a.products).unwrap(),
            serde_json::to_string(&c.products).unwrap()
        );
    }

    #[test]
    fn corpus_parses_cleanly_and_planted_links_are_recoverable() {
        let corpus = generate(&small_config());
        let product_lines: String = corpus
            .products
            .iter()
            .map(|p| serde_json::to_string(p).unwrap() + "\n")
            .collect();
        let relation_lines: String = corpus
            .relations
            .iter()
            .map(|r| serde_json::to_string(r).unwrap() + "\n")
            .collect();
        let (products, pstats) = read_products(Cursor::new(product_lines)).unwrap();
        let (relations, rstats) = read_relations(Cursor::new(relation_lines)).unwrap();
        assert_eq!(pstats.records_rejected, 0, "{pstats}");
        assert_eq!(rstats.records_rejected, 0, "{rstats}");
        let index = GraphIndex::build(products, relations);

        let matcher = NameMatcher::default();
        for (pub_id, supp_id) in &corpus.truth.supplement_like {
            let p = index
                .get(&crate::model::ProductId::parse(pub_id).unwrap())
                .unwrap();
            let d = index
                .get(&crate::model::ProductId::parse(supp_id).unwrap())
                .unwrap();
            assert!(
                temporal_proximity(p, d, 183),
                "{pub_id} vs {supp_id} too far apart"
            );
            let alignment = matcher.align(&p.authors, &d.authors);
            assert!(
                !alignment.matches.is_empty(),
                "{pub_id} vs {supp_id} share no author"
            );
            assert!(d.kind.is_supplement_kind());
        }
        // Declared pairs all surface as canonical supplement edges.
        let declared = crate::retrofit::declared_pairs(&index);
        assert_eq!(declared.len(), corpus.truth.declared.len());
    }

    #[test]
    fn write_corpus_emits_line_per_record() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = generate(&SynthConfig {
            publications: 10,
            declared_links: 3,
            supplement_like_cites: 2,
            extra_datasets: 2,
            noise_cites: 4,
            pub_pub_cites: 3,
            ..small_config()
        });
        let paths = write_corpus(&corpus, dir.path()).unwrap();
        let products = std::fs::read_to_string(&paths.products).unwrap();
        assert_eq!(products.lines().count(), corpus.products.len());
        let truth: SynthTruth =
            serde_json::from_str(&std::fs::read_to_string(&paths.truth).unwrap()).unwrap();
        assert_eq!(truth, corpus.truth);
    }
}
