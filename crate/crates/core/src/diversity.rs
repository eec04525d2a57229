//! Per-URL message diversity.
//!
//! For every user who tweeted URL `k`: `u_all` counts the user's tweets
//! carrying any URL, `u_k` the tweets mentioning `k`, and the diversity score
//! `u_d = u_all − u_k`. A URL pushed by a bot ring shows near-identical
//! diversity scores across its audience (low Gini, no rank-size structure),
//! while a legitimate URL's audience is unequal and follows a power law in
//! rank.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::record::TweetRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiversityTriple {
    pub u_all: u64,
    pub u_k: u64,
    pub u_d: u64,
}

impl DiversityTriple {
    pub fn new(u_all: u64, u_k: u64) -> Self {
        assert!(u_k <= u_all, "u_k ({u_k}) cannot exceed u_all ({u_all})");
        DiversityTriple { u_all, u_k, u_d: u_all - u_k }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlDiversityTable {
    pub url: String,
    pub users: BTreeMap<String, DiversityTriple>,
}

impl UrlDiversityTable {
    pub fn n(&self) -> usize {
        self.users.len()
    }

    pub fn diversity_scores(&self) -> Vec<f64> {
        self.users.values().map(|t| t.u_d as f64).collect()
    }
}

/// The `k` canonical URLs mentioned by the most tweets. A tweet repeating a
/// URL counts once. Ties are broken lexicographically.
pub fn top_k_urls(records: &[TweetRecord], k: usize) -> Vec<String> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for record in records {
        for url in record.distinct_urls() {
            *counts.entry(url).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    // BTreeMap order is lexicographic, and the sort is stable
    ranked.sort_by_key(|&(_, count)| core::cmp::Reverse(count));
    ranked.into_iter().take(k).map(|(url, _)| url.into()).collect()
}

pub fn diversity_table(records: &[TweetRecord], url: &str) -> UrlDiversityTable {
    diversity_tables(records, &[url]).pop().expect("one table per url")
}

/// Tables for several URLs in one pass over the corpus, in input order.
pub fn diversity_tables<S: AsRef<str>>(records: &[TweetRecord], urls: &[S]) -> Vec<UrlDiversityTable> {
    let wanted: BTreeMap<&str, usize> = urls.iter().enumerate().map(|(i, u)| (u.as_ref(), i)).collect();
    let mut u_all: BTreeMap<&str, u64> = BTreeMap::new();
    let mut u_k: Vec<BTreeMap<&str, u64>> = alloc::vec![BTreeMap::new(); urls.len()];

    for record in records {
        if !record.has_url() {
            continue;
        }
        *u_all.entry(&record.user_id).or_insert(0) += 1;
        for url in record.distinct_urls() {
            if let Some(&i) = wanted.get(url) {
                *u_k[i].entry(&record.user_id).or_insert(0) += 1;
            }
        }
    }

    urls.iter()
        .zip(u_k)
        .map(|(url, mentions)| UrlDiversityTable {
            url: url.as_ref().into(),
            users: mentions.into_iter().map(|(user, k)| (user.into(), DiversityTriple::new(u_all[user], k))).collect(),
        })
        .collect()
}

fn check_scores(scores: &[f64], required: usize) -> Result<()> {
    if scores.len() < required {
        return Err(Error::TooFewValues { required, got: scores.len() });
    }
    match scores.iter().position(|s| !(s.is_finite() && *s >= 0.0)) {
        Some(index) => Err(Error::InvalidScore { index, value: scores[index] }),
        None => Ok(()),
    }
}

/// Gini coefficient of nonnegative scores,
/// `G = Σ_i Σ_j |x_i − x_j| / (2 n Σ_i x_i)`, evaluated in its sorted form
/// `Σ_i (2i − n − 1) x_(i) / (n Σ x)`. An all-zero list is perfectly equal
/// and gives 0.
pub fn gini(scores: &[f64]) -> Result<f64> {
    check_scores(scores, 1)?;
    let total: f64 = scores.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let weighted: f64 = sorted.iter().enumerate().map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x).sum();
    Ok((weighted / (n * total)).clamp(0.0, 1.0))
}

/// Power law `score ≈ coefficient · rank^(−exponent)` fitted by least
/// squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSizeFit {
    pub r_squared: f64,
    pub exponent: f64,
    pub coefficient: f64,
}

/// Ranks the scores in descending order and regresses `ln score` on
/// `ln rank` over the strictly positive scores. With fewer than two positive
/// scores, or no spread among them, there is nothing to explain and R² is 0.
pub fn rank_size_fit(scores: &[f64]) -> Result<RankSizeFit> {
    check_scores(scores, 2)?;
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .take_while(|s| **s > 0.0)
        .enumerate()
        .map(|(i, s)| (libm::log(i as f64 + 1.0), libm::log(*s)))
        .collect();

    if points.len() < 2 {
        let coefficient = sorted[0];
        return Ok(RankSizeFit { r_squared: 0.0, exponent: 0.0, coefficient });
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy <= f64::EPSILON * n * (1.0 + mean_y * mean_y) {
        0.0
    } else {
        let ss_res: f64 = points
            .iter()
            .map(|p| {
                let r = p.1 - (intercept + slope * p.0);
                r * r
            })
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RankSizeFit { r_squared, exponent: -slope, coefficient: libm::exp(intercept) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityThresholds {
    /// `τ_G`: at or above, the audience is unequal enough to be organic.
    pub gini: f64,
    /// `τ_R`: at or above, the audience follows the rank-size rule.
    pub r_squared: f64,
    /// Minimum audience size before a URL can be called a bot URL.
    pub min_users: usize,
}

impl Default for DiversityThresholds {
    fn default() -> Self {
        DiversityThresholds { gini: 0.4, r_squared: 0.5, min_users: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UrlLabel {
    Legitimate,
    BotUrl,
    Indeterminate,
}

impl UrlLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            UrlLabel::Legitimate => "legitimate",
            UrlLabel::BotUrl => "bot_url",
            UrlLabel::Indeterminate => "indeterminate",
        }
    }

    pub fn parse(s: &str) -> Option<UrlLabel> {
        [UrlLabel::Legitimate, UrlLabel::BotUrl, UrlLabel::Indeterminate].into_iter().find(|l| l.as_str() == s)
    }

    /// Decision rule on `(gini, r², n)`.
    pub fn decide(gini: f64, r_squared: f64, n: usize, t: &DiversityThresholds) -> UrlLabel {
        if n >= t.min_users && gini < t.gini && r_squared < t.r_squared {
            UrlLabel::BotUrl
        } else if gini >= t.gini && r_squared >= t.r_squared {
            UrlLabel::Legitimate
        } else {
            UrlLabel::Indeterminate
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrlVerdict {
    pub url: String,
    pub gini: f64,
    pub r_squared: f64,
    pub n: usize,
    pub label: UrlLabel,
}

/// Gini and rank-size R² over the table's diversity scores, then the label.
/// Empty tables give zeros and one-user tables an R² of zero.
pub fn classify_url(table: &UrlDiversityTable, thresholds: &DiversityThresholds) -> UrlVerdict {
    let scores = table.diversity_scores();
    let n = scores.len();
    let gini = if n == 0 { 0.0 } else { gini(&scores).expect("u_d values are nonnegative integers") };
    let r_squared = if n < 2 { 0.0 } else { rank_size_fit(&scores).expect("checked length").r_squared };
    UrlVerdict { url: table.url.clone(), gini, r_squared, n, label: UrlLabel::decide(gini, r_squared, n, thresholds) }
}

/// Users appearing in the table of any URL labelled `bot_url`.
pub fn bot_url_users<'a>(
    verdicts: &[UrlVerdict],
    tables: &'a BTreeMap<String, UrlDiversityTable>,
) -> BTreeMap<&'a str, BTreeSet<&'a str>> {
    let mut users: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for verdict in verdicts.iter().filter(|v| v.label == UrlLabel::BotUrl) {
        if let Some(table) = tables.get(&verdict.url) {
            for user in table.users.keys() {
                users.entry(user).or_default().insert(&table.url);
            }
        }
    }
    users
}
