//! Batch analysis toolkit for authorship drift between publications and
//! their supplementary datasets/software.
//!
//! The pipeline ingests scholarly-graph metadata dumps (JSON Lines), links
//! publications to supplementary research products, aligns author lists
//! under fuzzy name matching, and quantifies how authorship (size,
//! composition, order) changes between a publication and its supplements.
//!
//! Stages, each checkpointable to disk:
//!
//! 1. [`ingest`] — stream product/relation dumps into validated domain
//!    objects with exact reject accounting, then build a [`index::GraphIndex`].
//! 2. [`couples`] — select declared publication↔supplement couples from
//!    `IsSupplementedBy` edges.
//! 3. [`retrofit`] — infer missed supplement couples from plain citation
//!    edges, via a shared-author/temporal heuristic and a calibrated
//!    feature-vector similarity interval.
//! 4. [`namematch`] + [`drift`] — align the two author lists of each couple
//!    and compute cardinality, composition, and ordering statistics.
//! 5. [`report`] — aggregate drift reports per year and supplement kind.
//!
//! [`pipeline`] orchestrates the stages over files; [`synth`] generates
//! seeded synthetic corpora with ground truth for evaluation.

pub mod config;
pub mod couples;
pub mod drift;
pub mod index;
pub mod ingest;
pub mod model;
pub mod namematch;
pub mod pipeline;
pub mod report;
pub mod retrofit;
pub mod synth;

pub use config::Settings;
pub use couples::{CoupleSelection, LinkedCouple, Provenance};
pub use drift::{DriftReport, OrderStats, OverlapStats};
pub use index::GraphIndex;
pub use ingest::IngestStats;
pub use model::{AuthorName, ProductId, ProductKind, Relation, RelationSemantics, ResearchProduct};
pub use namematch::{AuthorAlignment, NameMatcher};
pub use retrofit::{FeatureVector, SimilarityInterval};
