//! `authdrift` — link publications to their supplementary datasets/software
//! and quantify authorship drift between the two author lists.
//!
//! The pipeline runs as four checkpointed stages, each a verb reading and
//! writing files named in the settings:
//!
//! ```text
//! authdrift couples  --products dump.jsonl.gz --relations rels.jsonl.gz
//! authdrift retrofit --products dump.jsonl.gz --relations rels.jsonl.gz
//! authdrift analyze  --products dump.jsonl.gz
//! authdrift report
//! ```
//!
//! Settings come from an optional TOML file (`--config`), with command-line
//! flags overriding file values. `authdrift synth` generates a seeded
//! synthetic corpus with ground truth, for evaluation and benchmarks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use authdrift_core::config::{GroupBy, Settings};
use authdrift_core::ingest::IngestStats;
use authdrift_core::pipeline::{run_analyze, run_couples, run_report, run_retrofit, PipelineError};
use authdrift_core::synth::{generate, write_corpus, SynthConfig};

#[derive(Parser)]
#[command(name = "authdrift", version, about, disable_help_subcommand = true)]
struct Cli {
    /// Settings file (TOML). Flags given on the command line override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Seed for randomized tooling (only the synth verb uses randomness).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    verb: Verb,
}

/// Settings that may come from the config file or the command line.
#[derive(Args)]
struct Overrides {
    /// Products dump, JSON Lines (optionally gzip-compressed).
    #[arg(long, global = true, value_name = "FILE")]
    products: Option<PathBuf>,

    /// Relations dump, JSON Lines (optionally gzip-compressed).
    #[arg(long, global = true, value_name = "FILE")]
    relations: Option<PathBuf>,

    /// Couples checkpoint file [default: couples.jsonl]
    #[arg(long, global = true, value_name = "FILE")]
    couples: Option<PathBuf>,

    /// Per-couple drift reports, JSON Lines [default: reports.jsonl]
    #[arg(long, global = true, value_name = "FILE")]
    reports: Option<PathBuf>,

    /// Per-couple drift reports, CSV [default: reports.csv]
    #[arg(long, global = true, value_name = "FILE")]
    reports_csv: Option<PathBuf>,

    /// Aggregate table, CSV [default: aggregate.csv]
    #[arg(long, global = true, value_name = "FILE")]
    aggregate: Option<PathBuf>,

    /// Match author names by strict normalized equality.
    #[arg(long, global = true)]
    exact_names: bool,

    /// Fuzzy name-distance threshold in [0,1] [default: 0.25]
    #[arg(long, global = true, value_name = "T")]
    name_threshold: Option<f64>,

    /// Temporal window of the simple retrofit heuristic, days [default: 183]
    #[arg(long, global = true, value_name = "DAYS")]
    window_days: Option<i64>,

    /// e-folding time of the similarity date component, days [default: 90]
    #[arg(long, global = true, value_name = "DAYS")]
    tau_days: Option<f64>,

    /// Calibration interval half-width, in standard deviations [default: 2]
    #[arg(long, global = true, value_name = "K")]
    k: Option<f64>,

    /// Skip similarity retrofitting (no calibration needed).
    #[arg(long, global = true)]
    simple_only: bool,

    /// Aggregate grouping: year, kind, or year-kind [default: year-kind]
    #[arg(long, global = true, value_name = "KEY")]
    group_by: Option<GroupBy>,
}

impl Overrides {
    fn apply(self, settings: &mut Settings) {
        macro_rules! set {
            ($field:ident) => {
                if let Some(value) = self.$field {
                    settings.$field = value;
                }
            };
        }
        if self.products.is_some() {
            settings.products = self.products;
        }
        if self.relations.is_some() {
            settings.relations = self.relations;
        }
        set!(couples);
        set!(reports);
        set!(reports_csv);
        set!(aggregate);
        set!(name_threshold);
        set!(window_days);
        set!(tau_days);
        set!(k);
        set!(group_by);
        if self.exact_names {
            settings.exact_names = true;
        }
        if self.simple_only {
            settings.simple_only = true;
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Select declared publication↔supplement couples from the dumps.
    Couples,
    /// Infer missed couples from plain citation edges (two heuristics).
    Retrofit,
    /// Align author lists per couple and compute drift statistics.
    Analyze,
    /// Aggregate drift reports into a grouped summary table.
    Report,
    /// Generate a seeded synthetic corpus with ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for products.jsonl, relations.jsonl, truth.json.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Number of publications.
    #[arg(long, value_name = "N")]
    publications: Option<usize>,

    /// Number of declared supplement links.
    #[arg(long, value_name = "N")]
    declared: Option<usize>,

    /// Number of supplement-like plain citations (retrofit ground truth).
    #[arg(long, value_name = "N")]
    supplement_like: Option<usize>,

    /// Number of unlinked extra datasets.
    #[arg(long, value_name = "N")]
    extra_datasets: Option<usize>,

    /// Number of unrelated publication→dataset citations.
    #[arg(long, value_name = "N")]
    noise_cites: Option<usize>,

    /// Number of publication→publication citations.
    #[arg(long, value_name = "N")]
    pub_pub_cites: Option<usize>,

    /// Share of supplements that are software rather than datasets.
    #[arg(long, value_name = "F")]
    software_share: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<PipelineError>() {
                Some(fatal @ PipelineError::Calibration(_)) => {
                    eprintln!("hint: re-run with --simple-only to skip similarity retrofitting");
                    fatal.exit_code() as u8
                }
                Some(fatal) => fatal.exit_code() as u8,
                None => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut settings = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => Settings::default(),
    };
    cli.overrides.apply(&mut settings);
    if let Some(jobs) = cli.jobs.or(settings.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("initializing worker pool")?;
    }

    match cli.verb {
        Verb::Couples => couples(&settings),
        Verb::Retrofit => retrofit(&settings),
        Verb::Analyze => analyze(&settings),
        Verb::Report => report(&settings),
        Verb::Synth(args) => synth(args, cli.seed),
    }
}

fn counts(map: &BTreeMap<String, u64>) -> String {
    let mut out = String::new();
    for (label, n) in map {
        let _ = write!(out, " {label}={n}");
    }
    out
}

fn print_ingest(what: &str, stats: &IngestStats) {
    println!("{what}: {stats}");
}

fn couples(settings: &Settings) -> Result<()> {
    let run = run_couples(settings)?;
    print_ingest("products", &run.product_stats);
    print_ingest("relations", &run.relation_stats);
    let ix = &run.index_stats;
    println!(
        "index: {} products ({} duplicate), {} relations ({} duplicate, {} dangling)",
        ix.products_indexed,
        ix.duplicate_products,
        ix.relations_indexed,
        ix.duplicate_relations,
        ix.dangling_relations
    );
    if !run.exclusions.is_empty() {
        println!("exclusions:{}", counts(&run.exclusions));
    }
    println!(
        "couples written: {} -> {}",
        run.couples_written,
        settings.couples.display()
    );
    Ok(())
}

fn retrofit(settings: &Settings) -> Result<()> {
    let run = run_retrofit(settings)?;
    println!("declared couples: {}", run.declared);
    println!(
        "simple heuristic: +{} couples{}",
        run.simple_added,
        counts(&run.simple_counters)
    );
    match run.interval {
        Some(interval) => {
            println!(
                "calibration: [{:.4}, {:.4}] (mean {:.4}, stddev {:.4}, n={})",
                interval.lower,
                interval.upper,
                interval.mean,
                interval.stddev,
                interval.sample_size
            );
            println!(
                "similarity heuristic: +{} couples{}",
                run.similarity_added,
                counts(&run.similarity_counters)
            );
        }
        None => println!("similarity heuristic: skipped (simple-only)"),
    }
    println!(
        "couples written: {} -> {}",
        run.total_written,
        settings.couples.display()
    );
    Ok(())
}

fn analyze(settings: &Settings) -> Result<()> {
    let run = run_analyze(settings)?;
    print_ingest("products", &run.product_stats);
    println!("couples read: {}", run.couples_read);
    if run.skipped.is_empty() {
        println!("analyzed: {}", run.analyzed);
    } else {
        println!(
            "analyzed: {}, skipped:{}",
            run.analyzed,
            counts(&run.skipped)
        );
    }
    println!(
        "reports written -> {}, {}",
        settings.reports.display(),
        settings.reports_csv.display()
    );
    Ok(())
}

fn report(settings: &Settings) -> Result<()> {
    let run = run_report(settings)?;
    println!("reports read: {}", run.reports_read);
    println!(
        "aggregate rows: {} (grouped by {}) -> {}",
        run.rows.len(),
        settings.group_by,
        settings.aggregate.display()
    );
    Ok(())
}

fn synth(args: SynthArgs, seed: Option<u64>) -> Result<()> {
    let mut config = SynthConfig::default();
    if let Some(seed) = seed {
        config.seed = seed;
    }
    macro_rules! set {
        ($arg:ident => $field:ident) => {
            if let Some(value) = args.$arg {
                config.$field = value;
            }
        };
    }
    set!(publications => publications);
    set!(declared => declared_links);
    set!(supplement_like => supplement_like_cites);
    set!(extra_datasets => extra_datasets);
    set!(noise_cites => noise_cites);
    set!(pub_pub_cites => pub_pub_cites);
    set!(software_share => software_share);

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let corpus = generate(&config);
    let paths = write_corpus(&corpus, &args.out)
        .with_context(|| format!("writing corpus into {}", args.out.display()))?;
    println!(
        "wrote {} ({} products), {} ({} relations), {}",
        paths.products.display(),
        corpus.products.len(),
        paths.relations.display(),
        corpus.relations.len(),
        paths.truth.display()
    );
    Ok(())
}
