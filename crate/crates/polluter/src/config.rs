//! Run configuration: defaults, a flat `key = value` file, and overrides.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono_tz::Tz;
use polluter_core::detector::DetectorConfig;
use polluter_core::diversity::DiversityThresholds;
use polluter_core::Timestamp;

use crate::error::{Error, Result};
use crate::ingest::{self, IngestConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub calendar: Option<PathBuf>,
    pub tz: String,
    pub top_k: usize,
    pub gini_threshold: f64,
    pub r2_threshold: f64,
    pub min_users: usize,
    pub seed: u64,
    pub resolution: f64,
    pub out: PathBuf,
    pub min_cluster_size: usize,
    pub min_cluster_multiplicity: f64,
    pub cluster_flag_multiplicity: f64,
    pub media_follower_quantile: f64,
    pub burst_min_count: usize,
    pub since: Option<String>,
    pub until: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let thresholds = DiversityThresholds::default();
        let detector = DetectorConfig::default();
        RunConfig {
            inputs: Vec::new(),
            calendar: None,
            tz: "UTC".into(),
            top_k: 20,
            gini_threshold: thresholds.gini,
            r2_threshold: thresholds.r_squared,
            min_users: thresholds.min_users,
            seed: 0,
            resolution: 1.0,
            out: PathBuf::from("out"),
            min_cluster_size: 3,
            min_cluster_multiplicity: 1.0,
            cluster_flag_multiplicity: detector.cluster_flag_multiplicity,
            media_follower_quantile: detector.media_follower_quantile,
            burst_min_count: detector.burst_min_count,
            since: None,
            until: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn optional(value: &str) -> Option<String> {
    (!value.is_empty()).then(|| value.to_owned())
}

/// A date (`YYYY-MM-DD`, midnight UTC) or a full timestamp.
fn parse_bound(key: &str, raw: &str) -> Result<Timestamp> {
    ingest::parse_date(raw)
        .map(|d| d.start())
        .or_else(|_| ingest::parse_timestamp(raw))
        .map_err(|_| Error::Config(format!("{key}: cannot parse {raw:?} as a date or timestamp")))
}

impl RunConfig {
    pub const KEYS: [&'static str; 17] = [
        "input",
        "calendar",
        "tz",
        "top_k",
        "gini_threshold",
        "r2_threshold",
        "min_users",
        "seed",
        "resolution",
        "out",
        "min_cluster_size",
        "min_cluster_multiplicity",
        "cluster_flag_multiplicity",
        "media_follower_quantile",
        "burst_min_count",
        "since",
        "until",
    ];

    /// Sets one key. `input` takes a comma-separated list of paths.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "input" => {
                self.inputs = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(PathBuf::from).collect()
            }
            "calendar" => self.calendar = optional(value).map(PathBuf::from),
            "tz" => self.tz = value.to_owned(),
            "top_k" => self.top_k = parse(key, value)?,
            "gini_threshold" => self.gini_threshold = parse(key, value)?,
            "r2_threshold" => self.r2_threshold = parse(key, value)?,
            "min_users" => self.min_users = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "resolution" => self.resolution = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "min_cluster_size" => self.min_cluster_size = parse(key, value)?,
            "min_cluster_multiplicity" => self.min_cluster_multiplicity = parse(key, value)?,
            "cluster_flag_multiplicity" => self.cluster_flag_multiplicity = parse(key, value)?,
            "media_follower_quantile" => self.media_follower_quantile = parse(key, value)?,
            "burst_min_count" => self.burst_min_count = parse(key, value)?,
            "since" => self.since = optional(value),
            "until" => self.until = optional(value),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are ignored.
    pub fn apply_file_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("{}:{}: expected `key = value`", path.display(), i + 1)));
            };
            self.set(key.trim(), value).map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_file_text(&text, path)
    }

    /// Checks ranges and parses the time zone and window.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_owned()));
        if !(0.0..=1.0).contains(&self.gini_threshold) {
            return bad("gini_threshold must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.r2_threshold) {
            return bad("r2_threshold must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.media_follower_quantile) {
            return bad("media_follower_quantile must lie in [0, 1]");
        }
        if self.top_k == 0 {
            return bad("top_k must be positive");
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return bad("resolution must be positive");
        }
        if self.burst_min_count < 2 {
            return bad("burst_min_count must be at least 2");
        }
        if !(self.min_cluster_multiplicity >= 0.0 && self.cluster_flag_multiplicity >= 0.0) {
            return bad("cluster multiplicities must be nonnegative");
        }
        self.timezone()?;
        let window = self.window()?;
        if let (Some(s), Some(u)) = (window.since, window.until) {
            if s >= u {
                return bad("since must be earlier than until");
            }
        }
        Ok(())
    }

    pub fn timezone(&self) -> Result<Tz> {
        ingest::parse_tz(&self.tz)
    }

    pub fn window(&self) -> Result<IngestConfig> {
        Ok(IngestConfig {
            since: self.since.as_deref().map(|s| parse_bound("since", s)).transpose()?,
            until: self.until.as_deref().map(|s| parse_bound("until", s)).transpose()?,
        })
    }

    pub fn thresholds(&self) -> DiversityThresholds {
        DiversityThresholds { gini: self.gini_threshold, r_squared: self.r2_threshold, min_users: self.min_users }
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            cluster_flag_multiplicity: self.cluster_flag_multiplicity,
            media_follower_quantile: self.media_follower_quantile,
            burst_min_count: self.burst_min_count,
            as_of: None,
        }
    }

    /// The effective configuration in the file format, one key per line.
    pub fn echo(&self) -> String {
        let inputs: Vec<String> = self.inputs.iter().map(|p| p.display().to_string()).collect();
        let path_or_empty = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let values = [
            inputs.join(","),
            path_or_empty(&self.calendar),
            self.tz.clone(),
            self.top_k.to_string(),
            self.gini_threshold.to_string(),
            self.r2_threshold.to_string(),
            self.min_users.to_string(),
            self.seed.to_string(),
            self.resolution.to_string(),
            self.out.display().to_string(),
            self.min_cluster_size.to_string(),
            self.min_cluster_multiplicity.to_string(),
            self.cluster_flag_multiplicity.to_string(),
            self.media_follower_quantile.to_string(),
            self.burst_min_count.to_string(),
            self.since.clone().unwrap_or_default(),
            self.until.clone().unwrap_or_default(),
        ];
        let mut out = String::new();
        for (key, value) in Self::KEYS.iter().zip(values) {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}
