//! Run configuration: defaults, config-file values, flag overrides.
//!
//! `Settings` deserializes from any serde format (the CLI feeds it TOML) and
//! every field has a default, so a config file only states what it changes.
//! Validation is separate from parsing: a file can be loaded, overridden by
//! flags, and then checked once.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::namematch::{NameMatcher, DEFAULT_THRESHOLD};
use crate::retrofit::SimilarityParams;

/// Aggregation key for the report stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupBy {
    Year,
    Kind,
    YearKind,
}

impl GroupBy {
    pub fn as_str(&self) -> &'static str {
        match self {
            GroupBy::Year => "year",
            GroupBy::Kind => "kind",
            GroupBy::YearKind => "year-kind",
        }
    }
}

impl FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "year" => Ok(GroupBy::Year),
            "kind" => Ok(GroupBy::Kind),
            "year-kind" => Ok(GroupBy::YearKind),
            other => Err(format!(
                "unknown group-by '{other}' (expected year, kind, year-kind)"
            )),
        }
    }
}

impl std::fmt::Display for GroupBy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// All knobs of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Products dump (JSON Lines, optionally gzipped). Required by the
    /// couples, retrofit and analyze stages.
    pub products: Option<PathBuf>,
    /// Relations dump. Required by the couples and retrofit stages.
    pub relations: Option<PathBuf>,
    /// Couples checkpoint file (written by couples, extended by retrofit,
    /// read by analyze).
    pub couples: PathBuf,
    /// Per-couple drift reports, JSON Lines.
    pub reports: PathBuf,
    /// Per-couple drift reports, flat CSV.
    pub reports_csv: PathBuf,
    /// Aggregate table, CSV.
    pub aggregate: PathBuf,
    /// Match names by strict normalized equality instead of fuzzy distance.
    pub exact_names: bool,
    /// Fuzzy match threshold in [0,1].
    pub name_threshold: f64,
    /// Temporal window of the simple retrofit heuristic, days.
    pub window_days: i64,
    /// e-folding time of the similarity date component, days.
    pub tau_days: f64,
    pub weight_title: f64,
    pub weight_authors: f64,
    pub weight_date: f64,
    /// Calibration interval half-width, in standard deviations.
    pub k: f64,
    /// Skip similarity retrofitting (no calibration needed).
    pub simple_only: bool,
    pub group_by: GroupBy,
    /// Rayon worker threads; default lets rayon decide.
    pub jobs: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            products: None,
            relations: None,
            couples: PathBuf::from("couples.jsonl"),
            reports: PathBuf::from("reports.jsonl"),
            reports_csv: PathBuf::from("reports.csv"),
            aggregate: PathBuf::from("aggregate.csv"),
            exact_names: false,
            name_threshold: DEFAULT_THRESHOLD,
            window_days: 183,
            tau_days: 90.0,
            weight_title: 0.5,
            weight_authors: 0.3,
            weight_date: 0.2,
            k: 2.0,
            simple_only: false,
            group_by: GroupBy::YearKind,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("name_threshold {0} outside [0,1]")]
    BadThreshold(f64),
    #[error("window_days {0} is negative")]
    BadWindow(i64),
    #[error("tau_days {0} must be positive")]
    BadTau(f64),
    #[error("similarity weights ({0}, {1}, {2}) must be non-negative and sum to 1")]
    BadWeights(f64, f64, f64),
    #[error("k {0} must be non-negative")]
    BadK(f64),
}

impl Settings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.name_threshold) {
            return Err(ConfigError::BadThreshold(self.name_threshold));
        }
        if self.window_days < 0 {
            return Err(ConfigError::BadWindow(self.window_days));
        }
        if self.tau_days <= 0.0 || self.tau_days.is_nan() {
            return Err(ConfigError::BadTau(self.tau_days));
        }
        let weights = [self.weight_title, self.weight_authors, self.weight_date];
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (sum - 1.0).abs() > 1e-6 {
            return Err(ConfigError::BadWeights(
                self.weight_title,
                self.weight_authors,
                self.weight_date,
            ));
        }
        if self.k < 0.0 {
            return Err(ConfigError::BadK(self.k));
        }
        Ok(())
    }

    pub fn matcher(&self) -> NameMatcher {
        if self.exact_names {
            NameMatcher::Exact
        } else {
            NameMatcher::Fuzzy {
                threshold: self.name_threshold,
            }
        }
    }

    pub fn similarity_params(&self) -> SimilarityParams {
        SimilarityParams {
            weight_title: self.weight_title,
            weight_authors: self.weight_authors,
            weight_date: self.weight_date,
            tau_days: self.tau_days,
        }
    }
}
