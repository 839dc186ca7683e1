//! Acceptance suite: one test per release criterion.
//!
//! Each criterion is a separate test whose pass/fail line appears in the
//! harness output; on success it also prints a `criterion N: PASS — …`
//! summary (visible with `--nocapture`). Thresholds and budgets are pinned
//! as constants below and are part of the release contract.

use std::collections::HashSet;
use std::io::Cursor;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use tempfile::TempDir;

use authdrift_core::config::Settings;
use authdrift_core::couples::{select_declared_couples, LinkedCouple};
use authdrift_core::drift::{order_stats, overlap_stats};
use authdrift_core::ingest::{
    open_dump, read_products, read_relations, ProductReader, RelationReader,
};
use authdrift_core::model::{normalize_name, AuthorName, ProductId};
use authdrift_core::namematch::{AuthorAlignment, NameMatcher};
use authdrift_core::pipeline::{run_analyze, run_couples, run_report, run_retrofit};
use authdrift_core::report::read_reports;
use authdrift_core::retrofit::{
    calibrate_interval, retrofit_by_similarity, retrofit_simple, temporal_proximity,
    SimilarityParams,
};
use authdrift_core::synth::{generate, write_corpus, SynthConfig};
use authdrift_core::GraphIndex;

/// Minimum share of recoverable planted supplement-like links the simple
/// heuristic must retrieve.
const SIMPLE_RECALL_FLOOR: f64 = 0.95;
/// Recall/precision floors for the calibrated-similarity heuristic at k=2.
const SIMILARITY_RECALL_FLOOR: f64 = 0.80;
const SIMILARITY_PRECISION_FLOOR: f64 = 0.80;
/// Wall-clock budget for the worked-example fixture, end to end.
const FIXTURE_BUDGET: Duration = Duration::from_secs(1);
/// Wall-clock budget for the full pipeline over the 100k-record corpus.
const PIPELINE_BUDGET: Duration = Duration::from_secs(60);
/// Peak-RSS budget for the performance run.
const MEMORY_BUDGET: u64 = 4 * 1024 * 1024 * 1024;
const RANDOM_PAIRS: usize = 10_000;
const FUZZ_CASES: usize = 1_000;

/// The worked-example author lists: publication side vs dataset side.
/// Three entries agree verbatim; three differ by a dropped middle initial.
const PUB_AUTHORS: [&str; 6] = [
    "Corkum, Christopher P.",
    "Ings, Danielle P.",
    "Burgess, Christopher",
    "Karwowska, Sylwia",
    "Kroll, Werner",
    "Michalak, Tomasz I.",
];
const DATASET_AUTHORS: [&str; 6] = [
    "Corkum, Christopher",
    "Ings, Danielle",
    "Burgess, Christopher",
    "Karwowska, Sylwia",
    "Kroll, Werner",
    "Michalak, Tomasz",
];

fn write_fixture_dumps(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let authors = |names: &[&str]| -> Vec<serde_json::Value> {
        names.iter().map(|n| json!({ "name": n })).collect()
    };
    let products = [
        json!({
            "id": "10.5555/example.pub",
            "kind": "publication",
            "title": "Immune cell subsets and their gene expression profiles",
            "date": "2015-11-04",
            "authors": authors(&PUB_AUTHORS),
        }),
        json!({
            "id": "10.5555/example.data",
            "kind": "dataset",
            "title": "Additional file 4: Table S4",
            "date": "2015-11-04",
            "authors": authors(&DATASET_AUTHORS),
        }),
    ];
    let relations = [json!({
        "source": "10.5555/example.pub",
        "target": "10.5555/example.data",
        "semantics": "IsSupplementedBy",
    })];
    let join = |values: &[serde_json::Value]| {
        values
            .iter()
            .map(|v| v.to_string() + "\n")
            .collect::<String>()
    };
    let products_path = dir.join("products.jsonl");
    let relations_path = dir.join("relations.jsonl");
    std::fs::write(&products_path, join(&products)).unwrap();
    std::fs::write(&relations_path, join(&relations)).unwrap();
    (products_path, relations_path)
}

fn settings_in(dir: &Path) -> Settings {
    Settings {
        products: Some(dir.join("products.jsonl")),
        relations: Some(dir.join("relations.jsonl")),
        couples: dir.join("couples.jsonl"),
        reports: dir.join("reports.jsonl"),
        reports_csv: dir.join("reports.csv"),
        aggregate: dir.join("aggregate.csv"),
        ..Settings::default()
    }
}

#[test]
fn criterion_1_worked_example_author_lists() {
    let started = Instant::now();
    let dir = TempDir::new().unwrap();
    write_fixture_dumps(dir.path());
    let fuzzy = settings_in(dir.path());

    let couples = run_couples(&fuzzy).unwrap();
    assert_eq!(couples.couples_written, 1);
    run_analyze(&fuzzy).unwrap();
    let reports = read_reports(&fuzzy.reports).unwrap();
    assert_eq!(reports.len(), 1);
    let report = &reports[0];
    assert_eq!(report.overlap.intersection, 6);
    assert_eq!(report.overlap.symdiff, 0);
    assert_eq!(report.overlap.jaccard, 1.0);
    assert_eq!(report.order.kendall_tau, Some(1.0));

    let exact = Settings {
        exact_names: true,
        reports: dir.path().join("reports_exact.jsonl"),
        reports_csv: dir.path().join("reports_exact.csv"),
        ..fuzzy.clone()
    };
    run_analyze(&exact).unwrap();
    let strict = read_reports(&exact.reports).unwrap();
    assert_eq!(strict[0].overlap.intersection, 3);
    assert_eq!(strict[0].overlap.symdiff, 6);

    let elapsed = started.elapsed();
    assert!(elapsed < FIXTURE_BUDGET, "fixture run took {elapsed:?}");
    println!(
        "criterion 1: PASS — exact intersection 3 / symdiff 6, fuzzy 6 / 0, \
         jaccard 1.0, tau 1.0, in {elapsed:?}"
    );
}

const FAMILIES: [&str; 8] = [
    "Corkum",
    "Ings",
    "Burgess",
    "Karwowska",
    "Kroll",
    "Michalak",
    "Muller",
    "Ortiz",
];
const GIVENS: [&str; 6] = [
    "Christopher",
    "Danielle",
    "Sylwia",
    "Werner",
    "Tomasz",
    "Anna",
];

fn random_author(rng: &mut ChaCha8Rng) -> AuthorName {
    let family = FAMILIES[rng.gen_range(0..FAMILIES.len())];
    let given = GIVENS[rng.gen_range(0..GIVENS.len())];
    let initial = given.chars().next().unwrap();
    let raw = match rng.gen_range(0..4) {
        0 => format!("{family}, {given}"),
        1 => format!("{family}, {initial}."),
        2 => format!("{given} {family}"),
        _ => format!(
            "{family}, {given} {}.",
            (b'A' + rng.gen_range(0..4)) as char
        ),
    };
    let name = normalize_name(&raw).unwrap();
    if rng.gen_bool(0.1) {
        let pid = format!("0000-0002-0000-000{}", rng.gen_range(0..4));
        name.with_pid(Some(&pid))
    } else {
        name
    }
}

fn random_list(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<AuthorName> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| random_author(rng)).collect()
}

/// Every rank of both lists must appear exactly once across `matches` and
/// the corresponding `*_only` list.
fn is_partial_injection(alignment: &AuthorAlignment, len_p: usize, len_d: usize) -> bool {
    let mut p_ranks: Vec<u32> = alignment
        .matches
        .iter()
        .map(|&(rank_p, _, _)| rank_p)
        .chain(alignment.p_only.iter().copied())
        .collect();
    let mut d_ranks: Vec<u32> = alignment
        .matches
        .iter()
        .map(|&(_, rank_d, _)| rank_d)
        .chain(alignment.d_only.iter().copied())
        .collect();
    p_ranks.sort_unstable();
    d_ranks.sort_unstable();
    p_ranks == (1..=len_p as u32).collect::<Vec<_>>()
        && d_ranks == (1..=len_d as u32).collect::<Vec<_>>()
}

#[test]
fn criterion_2_alignment_identities_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11C);
    let mut violations = 0usize;
    for _ in 0..RANDOM_PAIRS {
        let a_p = random_list(&mut rng, 12);
        let a_d = random_list(&mut rng, 12);
        let t_low: f64 = rng.gen_range(0.0..=1.0);
        let t_high: f64 = rng.gen_range(t_low..=1.0);
        let narrow = NameMatcher::Fuzzy { threshold: t_low }.align(&a_p, &a_d);
        let wide = NameMatcher::Fuzzy { threshold: t_high }.align(&a_p, &a_d);
        let overlap = overlap_stats(&narrow);

        let identity =
            overlap.symdiff == overlap.size_p + overlap.size_d - 2 * overlap.intersection;
        let jaccard_bounded = (0.0..=1.0).contains(&overlap.jaccard);
        let injection = is_partial_injection(&narrow, a_p.len(), a_d.len());
        let monotone = narrow.matches.len() <= wide.matches.len();
        if !(identity && jaccard_bounded && injection && monotone) {
            violations += 1;
        }
    }
    assert_eq!(violations, 0, "violations over {RANDOM_PAIRS} random pairs");
    println!("criterion 2: PASS — 0 violations over {RANDOM_PAIRS} random list pairs");
}

/// All ordered arrangements of subsets of `universe` symbols.
fn all_arrangements(universe: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, pool: &[usize], out: &mut Vec<Vec<usize>>) {
        out.push(prefix.clone());
        for (i, &symbol) in pool.iter().enumerate() {
            let mut rest = pool.to_vec();
            rest.remove(i);
            prefix.push(symbol);
            extend(prefix, &rest, out);
            prefix.pop();
        }
    }
    let pool: Vec<usize> = (0..universe).collect();
    let mut out = Vec::new();
    extend(&mut Vec::new(), &pool, &mut out);
    out
}

/// Exhaustive reference statistics for two symbol lists (no duplicates).
struct Oracle {
    intersection: usize,
    symdiff: usize,
    jaccard: f64,
    tau: Option<f64>,
    first: bool,
    last: bool,
    displacement: f64,
}

fn oracle(p: &[usize], d: &[usize]) -> Oracle {
    let rank_in = |list: &[usize], s: usize| list.iter().position(|&x| x == s);
    let matched: Vec<(usize, usize)> = p
        .iter()
        .filter_map(|&s| rank_in(d, s).map(|j| (rank_in(p, s).unwrap() + 1, j + 1)))
        .collect();
    let m = matched.len();
    let union = p.len() + d.len() - m;
    let jaccard = if union == 0 {
        1.0
    } else {
        m as f64 / union as f64
    };

    let tau = if m < 2 {
        None
    } else {
        let mut concordant = 0i64;
        let mut discordant = 0i64;
        for i in 0..m {
            for j in (i + 1)..m {
                let dp = matched[i].0 as i64 - matched[j].0 as i64;
                let dd = matched[i].1 as i64 - matched[j].1 as i64;
                if dp * dd > 0 {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
        Some((concordant - discordant) as f64 / (m * (m - 1) / 2) as f64)
    };

    let norm = |rank: usize, len: usize| {
        if len <= 1 {
            0.0
        } else {
            (rank - 1) as f64 / (len - 1) as f64
        }
    };
    let displacement = matched
        .iter()
        .map(|&(rp, rd)| (norm(rp, p.len()) - norm(rd, d.len())).abs())
        .fold(0.0, f64::max);

    Oracle {
        intersection: m,
        symdiff: p.len() + d.len() - 2 * m,
        jaccard,
        tau,
        first: !p.is_empty() && !d.is_empty() && p[0] == d[0],
        last: !p.is_empty() && !d.is_empty() && p.last() == d.last(),
        displacement,
    }
}

#[test]
fn criterion_3_small_universe_brute_force_equivalence() {
    let symbols: Vec<AuthorName> = ["Alpha, Anna", "Beta, Boris", "Gamma, Grete", "Delta, Dora"]
        .iter()
        .map(|raw| normalize_name(raw).unwrap())
        .collect();
    let arrangements = all_arrangements(symbols.len());
    assert_eq!(arrangements.len(), 65); // 1 + 4 + 12 + 24 + 24

    let matcher = NameMatcher::default();
    let as_names =
        |list: &[usize]| -> Vec<AuthorName> { list.iter().map(|&s| symbols[s].clone()).collect() };

    let mut mismatches = 0usize;
    let mut pairs = 0usize;
    for p in &arrangements {
        let names_p = as_names(p);
        for d in &arrangements {
            let names_d = as_names(d);
            let alignment = matcher.align(&names_p, &names_d);
            let overlap = overlap_stats(&alignment);
            let order = order_stats(&alignment, &names_p, &names_d);
            let expected = oracle(p, d);
            pairs += 1;

            let ok = overlap.intersection == expected.intersection
                && overlap.symdiff == expected.symdiff
                && overlap.jaccard == expected.jaccard
                && order.kendall_tau == expected.tau
                && order.first_author_preserved == expected.first
                && order.last_author_preserved == expected.last
                && order.max_displacement == expected.displacement;
            if !ok {
                mismatches += 1;
            }
        }
    }
    assert_eq!(mismatches, 0, "mismatches across {pairs} list pairs");
    println!("criterion 3: PASS — 0 mismatches across {pairs} exhaustive list pairs");
}

#[test]
fn criterion_4_retrofit_recovers_planted_links() {
    let dir = TempDir::new().unwrap();
    let config = SynthConfig::default();
    assert_eq!(config.declared_links, 1000);
    assert_eq!(config.supplement_like_cites, 200);
    let corpus = generate(&config);
    let paths = write_corpus(&corpus, dir.path()).unwrap();

    let (products, product_stats) = read_products(open_dump(&paths.products).unwrap()).unwrap();
    let (relations, relation_stats) = read_relations(open_dump(&paths.relations).unwrap()).unwrap();
    assert_eq!(product_stats.records_rejected, 0);
    assert_eq!(relation_stats.records_rejected, 0);
    let index = GraphIndex::build(products, relations);

    let selection = select_declared_couples(&index);
    let declared: HashSet<(ProductId, ProductId)> =
        selection.couples.iter().map(LinkedCouple::pair).collect();
    let planted: HashSet<(ProductId, ProductId)> = corpus
        .truth
        .supplement_like
        .iter()
        .map(|(p, d)| (ProductId::parse(p).unwrap(), ProductId::parse(d).unwrap()))
        .collect();
    assert_eq!(planted.len(), config.supplement_like_cites);

    let matcher = NameMatcher::default();
    // A planted link is recoverable when the heuristic's preconditions hold:
    // both endpoints resolve, dates fall within the window, and the author
    // lists share at least one matched name.
    let recoverable: HashSet<&(ProductId, ProductId)> = planted
        .iter()
        .filter(|(p, d)| match (index.get(p), index.get(d)) {
            (Some(p), Some(d)) => {
                temporal_proximity(p, d, 183)
                    && !matcher.align(&p.authors, &d.authors).matches.is_empty()
            }
            _ => false,
        })
        .collect();

    let simple = retrofit_simple(&index, matcher, 183);
    let simple_pairs: HashSet<(ProductId, ProductId)> =
        simple.couples.iter().map(LinkedCouple::pair).collect();
    assert!(
        simple_pairs.is_disjoint(&declared),
        "simple heuristic re-emitted declared couples"
    );
    let simple_recovered = recoverable
        .iter()
        .filter(|pair| simple_pairs.contains(**pair))
        .count();
    let simple_recall = simple_recovered as f64 / recoverable.len() as f64;
    assert!(
        simple_recall >= SIMPLE_RECALL_FLOOR,
        "simple recall {simple_recall:.3} of {} recoverable links",
        recoverable.len()
    );

    // The similarity heuristic is evaluated on its own: only declared
    // couples are excluded, so planted links stay in the candidate pool.
    let params = SimilarityParams::default();
    let interval = calibrate_interval(&selection.couples, &index, 2.0, &params).unwrap();
    let similar = retrofit_by_similarity(&index, &interval, &params, &declared);
    let similar_pairs: HashSet<(ProductId, ProductId)> =
        similar.couples.iter().map(LinkedCouple::pair).collect();
    let true_positives = planted.intersection(&similar_pairs).count();
    let recall = true_positives as f64 / planted.len() as f64;
    let precision = if similar_pairs.is_empty() {
        0.0
    } else {
        true_positives as f64 / similar_pairs.len() as f64
    };
    assert!(
        recall >= SIMILARITY_RECALL_FLOOR,
        "similarity recall {recall:.3} over {} planted links",
        planted.len()
    );
    assert!(
        precision >= SIMILARITY_PRECISION_FLOOR,
        "similarity precision {precision:.3} over {} emissions",
        similar_pairs.len()
    );
    println!(
        "criterion 4: PASS — simple recall {simple_recall:.3}, 0 declared overlap; \
         similarity recall {recall:.3}, precision {precision:.3} \
         (interval [{:.3}, {:.3}])",
        interval.lower, interval.upper
    );
}

fn fuzz_input(rng: &mut ChaCha8Rng, case: usize, template: &[u8]) -> Vec<u8> {
    match case % 4 {
        // Raw random bytes, newlines only by chance; usually invalid UTF-8.
        0 => {
            let len = rng.gen_range(0..2048);
            (0..len).map(|_| rng.gen()).collect()
        }
        // Random-byte lines.
        1 => {
            let mut out = Vec::new();
            for _ in 0..rng.gen_range(1..40) {
                let len = rng.gen_range(0..120);
                out.extend((0..len).map(|_| rng.gen::<u8>()));
                out.push(b'\n');
            }
            out
        }
        // Corrupted and truncated copies of a valid line.
        2 => {
            let mut out = Vec::new();
            for _ in 0..rng.gen_range(1..30) {
                let mut line = template.to_vec();
                for _ in 0..rng.gen_range(0..6) {
                    let i = rng.gen_range(0..line.len());
                    line[i] = rng.gen();
                }
                let cut = rng.gen_range(1..=line.len());
                out.extend(&line[..cut]);
                out.push(b'\n');
            }
            out
        }
        // Structurally valid JSON of the wrong shapes, mixed with good lines.
        _ => {
            let junk = [
                r#"null"#,
                r#"[]"#,
                r#"{}"#,
                r#"{"id": 7}"#,
                r#"{"id": "10.5555/x", "kind": "dataset", "title": "t", "authors": [], "extra": 1}"#,
                r#"{"id": "10.5555/x", "kind": "dataset", "title": "t", "date": "13th of May", "authors": []}"#,
                r#"{"id": "   ", "kind": "dataset", "title": "t", "authors": []}"#,
                r#"{"source": "10.5555/a", "target": "10.5555/a", "semantics": "Cites"}"#,
                "",
                "   ",
            ];
            let mut out = Vec::new();
            for _ in 0..rng.gen_range(1..40) {
                if rng.gen_bool(0.3) {
                    out.extend(template);
                } else {
                    out.extend(junk[rng.gen_range(0..junk.len())].as_bytes());
                }
                out.push(b'\n');
            }
            out
        }
    }
}

#[test]
fn criterion_5_ingestion_accounting_survives_fuzzing() {
    let template = json!({
        "id": "10.5555/fuzz.base",
        "kind": "publication",
        "title": "a fuzz title",
        "date": "2015-06-01",
        "authors": [{ "name": "Doe, Jane" }],
    })
    .to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0_22);
    let mut violations = 0usize;
    for case in 0..FUZZ_CASES {
        let bytes = fuzz_input(&mut rng, case, template.as_bytes());

        let mut products = ProductReader::new(Cursor::new(bytes.clone()));
        let emitted = products.by_ref().filter(|r| r.is_ok()).count() as u64;
        let stats = products.into_stats();
        if !stats.is_balanced() || stats.records_emitted != emitted {
            violations += 1;
        }

        let mut relations = RelationReader::new(Cursor::new(bytes));
        let emitted = relations.by_ref().filter(|r| r.is_ok()).count() as u64;
        let stats = relations.into_stats();
        if !stats.is_balanced() || stats.records_emitted != emitted {
            violations += 1;
        }
    }
    assert_eq!(
        violations, 0,
        "accounting violations over {FUZZ_CASES} fuzz cases"
    );
    println!("criterion 5: PASS — 0 accounting violations over {FUZZ_CASES} fuzz cases");
}

/// 100k products + 150k relations, the determinism/performance corpus.
fn big_corpus_config() -> SynthConfig {
    SynthConfig {
        seed: 424_242,
        publications: 60_000,
        declared_links: 20_000,
        supplement_like_cites: 5_000,
        extra_datasets: 15_000,
        noise_cites: 50_000,
        pub_pub_cites: 75_000,
        software_share: 0.25,
    }
}

fn pipeline_settings(corpus_dir: &Path, tag: &str) -> Settings {
    Settings {
        products: Some(corpus_dir.join("products.jsonl")),
        relations: Some(corpus_dir.join("relations.jsonl")),
        couples: corpus_dir.join(format!("couples_{tag}.jsonl")),
        reports: corpus_dir.join(format!("reports_{tag}.jsonl")),
        reports_csv: corpus_dir.join(format!("reports_{tag}.csv")),
        aggregate: corpus_dir.join(format!("aggregate_{tag}.csv")),
        ..Settings::default()
    }
}

fn run_full_pipeline(settings: &Settings) {
    run_couples(settings).unwrap();
    run_retrofit(settings).unwrap();
    run_analyze(settings).unwrap();
    run_report(settings).unwrap();
}

#[test]
fn criterion_6_pipeline_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let config = big_corpus_config();
    let corpus = generate(&config);
    assert_eq!(corpus.products.len(), 100_000);
    assert_eq!(corpus.relations.len(), 150_000);
    write_corpus(&corpus, dir.path()).unwrap();
    drop(corpus);

    let first = pipeline_settings(dir.path(), "a");
    let second = pipeline_settings(dir.path(), "b");
    run_full_pipeline(&first);
    run_full_pipeline(&second);

    for (left, right) in [
        (&first.couples, &second.couples),
        (&first.reports, &second.reports),
        (&first.reports_csv, &second.reports_csv),
        (&first.aggregate, &second.aggregate),
    ] {
        let left_bytes = std::fs::read(left).unwrap();
        let right_bytes = std::fs::read(right).unwrap();
        assert!(!left_bytes.is_empty(), "{} is empty", left.display());
        assert_eq!(
            left_bytes,
            right_bytes,
            "{} differs from {}",
            left.display(),
            right.display()
        );
    }
    println!("criterion 6: PASS — two 100k-corpus runs byte-identical across 4 artifacts");
}

fn peak_rss_bytes() -> u64 {
    let status = std::fs::read_to_string("/proc/self/status").unwrap();
    let line = status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .expect("VmHWM in /proc/self/status");
    let kb: u64 = line.trim().trim_end_matches("kB").trim().parse().unwrap();
    kb * 1024
}

#[test]
fn criterion_7_desk_scale_performance() {
    let dir = TempDir::new().unwrap();
    let corpus = generate(&big_corpus_config());
    write_corpus(&corpus, dir.path()).unwrap();
    drop(corpus);

    let settings = pipeline_settings(dir.path(), "perf");
    let started = Instant::now();
    run_full_pipeline(&settings);
    let elapsed = started.elapsed();

    assert!(elapsed < PIPELINE_BUDGET, "pipeline took {elapsed:?}");
    let peak = peak_rss_bytes();
    assert!(peak < MEMORY_BUDGET, "peak RSS {peak} bytes");
    println!(
        "criterion 7: PASS — 100k products + 150k relations in {:.1}s (< {}s), \
         peak RSS {:.2} GiB (< 4 GiB)",
        elapsed.as_secs_f64(),
        PIPELINE_BUDGET.as_secs(),
        peak as f64 / f64::from(1u32 << 30)
    );
}
