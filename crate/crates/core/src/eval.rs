//! Evaluation machinery: corpus statistics, agreement with hand labels,
//! account status snapshots and externally supplied bot scores.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::record::{City, TweetRecord};
use crate::stats::{mean, sample_sd};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CityStats {
    pub tweet_count: u64,
    pub unique_user_count: u64,
    pub unique_url_count: u64,
    pub mean_followers: f64,
    pub mean_friends: f64,
    pub verified_count: u64,
}

/// Per-city corpus statistics. Every city is present, with zeros when it has
/// no tweets.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub per_city: BTreeMap<City, CityStats>,
}

/// Counts and means per city. User metrics use one snapshot per user and
/// city, the last one in stream order.
pub fn dataset_stats(records: &[TweetRecord]) -> CorpusStats {
    struct Acc<'a> {
        tweets: u64,
        users: BTreeMap<&'a str, (u64, u64, bool)>,
        urls: BTreeSet<&'a str>,
    }
    let mut acc: BTreeMap<City, Acc> = BTreeMap::new();
    for r in records {
        let a = acc.entry(r.city).or_insert_with(|| Acc { tweets: 0, users: BTreeMap::new(), urls: BTreeSet::new() });
        a.tweets += 1;
        a.users.insert(&r.user_id, (r.user.followers_count, r.user.friends_count, r.user.verified));
        a.urls.extend(r.urls.iter().map(String::as_str));
    }
    let per_city = City::ALL
        .into_iter()
        .map(|city| {
            let stats = acc.get(&city).map_or_else(CityStats::default, |a| {
                let n = a.users.len() as f64;
                CityStats {
                    tweet_count: a.tweets,
                    unique_user_count: a.users.len() as u64,
                    unique_url_count: a.urls.len() as u64,
                    mean_followers: a.users.values().map(|u| u.0 as f64).sum::<f64>() / n,
                    mean_friends: a.users.values().map(|u| u.1 as f64).sum::<f64>() / n,
                    verified_count: a.users.values().filter(|u| u.2).count() as u64,
                }
            });
            (city, stats)
        })
        .collect();
    CorpusStats { per_city }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccountLabel {
    Bot,
    Legitimate,
}

impl AccountLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            AccountLabel::Bot => "bot",
            AccountLabel::Legitimate => "legitimate",
        }
    }

    pub fn parse(s: &str) -> Option<AccountLabel> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bot" => Some(AccountLabel::Bot),
            "legitimate" | "legit" | "human" => Some(AccountLabel::Legitimate),
            _ => None,
        }
    }
}

/// The label at least two of three labellers gave; abstentions (`None`)
/// count for nothing.
pub fn majority(votes: [Option<AccountLabel>; 3]) -> Option<AccountLabel> {
    [AccountLabel::Bot, AccountLabel::Legitimate]
        .into_iter()
        .find(|label| votes.iter().filter(|v| **v == Some(*label)).count() >= 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledAccount {
    pub user_id: String,
    pub human_label: AccountLabel,
    pub predicted_label: AccountLabel,
}

impl LabelledAccount {
    pub fn correct(&self) -> bool {
        self.human_label == self.predicted_label
    }
}

/// Fraction of accounts where the prediction matches the human label.
pub fn accuracy(labels: &[LabelledAccount]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::TooFewValues { required: 1, got: 0 });
    }
    Ok(labels.iter().filter(|l| l.correct()).count() as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccountStatus {
    Active,
    Suspended,
    Deleted,
}

impl AccountStatus {
    /// API error code 63 means suspended, 50 deleted; no code means the
    /// account answered normally.
    pub fn from_code(code: Option<i64>) -> Result<AccountStatus> {
        match code {
            None => Ok(AccountStatus::Active),
            Some(63) => Ok(AccountStatus::Suspended),
            Some(50) => Ok(AccountStatus::Deleted),
            Some(other) => Err(Error::UnknownStatusCode(other)),
        }
    }

    pub fn code(self) -> Option<i64> {
        match self {
            AccountStatus::Active => None,
            AccountStatus::Suspended => Some(63),
            AccountStatus::Deleted => Some(50),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatusSummary {
    pub suspended_count: usize,
    pub deleted_count: usize,
    pub active_count: usize,
    /// Flagged accounts absent from the status snapshot.
    pub unknown_count: usize,
}

/// Status counts over the flagged accounts. A repeated user keeps its last
/// status.
pub fn account_status_report(statuses: &[(String, AccountStatus)], flagged: &BTreeSet<&str>) -> StatusSummary {
    let latest: BTreeMap<&str, AccountStatus> = statuses.iter().map(|(u, s)| (u.as_str(), *s)).collect();
    let mut summary = StatusSummary::default();
    for user in flagged {
        match latest.get(user) {
            Some(AccountStatus::Suspended) => summary.suspended_count += 1,
            Some(AccountStatus::Deleted) => summary.deleted_count += 1,
            Some(AccountStatus::Active) => summary.active_count += 1,
            None => summary.unknown_count += 1,
        }
    }
    summary
}

/// Score summary for one group of accounts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScoreGroup {
    /// Accounts in the group that have a score.
    pub count: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    /// Fraction of scored accounts with score strictly above 0.5.
    pub above_half_fraction: Option<f64>,
}

impl ScoreGroup {
    fn of(scores: &[f64]) -> Self {
        ScoreGroup {
            count: scores.len(),
            mean: mean(scores),
            sd: sample_sd(scores),
            above_half_fraction: (!scores.is_empty())
                .then(|| scores.iter().filter(|s| **s > 0.5).count() as f64 / scores.len() as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalScoreSummary {
    /// All flagged accounts with a score.
    pub flagged: ScoreGroup,
    /// Predicted bot, human label bot.
    pub true_positives: ScoreGroup,
    /// Predicted bot, human label legitimate.
    pub false_positives: ScoreGroup,
    /// User ids whose score was outside `[0, 1]`, in input order.
    pub rejected: Vec<String>,
}

impl ExternalScoreSummary {
    /// No flagged account had a usable score.
    pub fn zero_coverage(&self) -> bool {
        self.flagged.count == 0
    }
}

/// Summarizes external bot scores over the flagged accounts and over the
/// true and false positives of the labelled study. Out-of-range scores are
/// rejected and listed.
pub fn summarize_external_scores(
    scores: &[(String, f64)],
    flagged: &BTreeSet<&str>,
    labelled: &[LabelledAccount],
) -> ExternalScoreSummary {
    let mut rejected = Vec::new();
    let mut valid: BTreeMap<&str, f64> = BTreeMap::new();
    for (user, score) in scores {
        if (0.0..=1.0).contains(score) {
            valid.insert(user, *score);
        } else {
            rejected.push(user.clone());
        }
    }
    let collect =
        |ids: &mut dyn Iterator<Item = &str>| -> Vec<f64> { ids.filter_map(|id| valid.get(id).copied()).collect() };
    let positives = |human: AccountLabel| {
        let mut ids = labelled
            .iter()
            .filter(move |l| l.predicted_label == AccountLabel::Bot && l.human_label == human)
            .map(|l| l.user_id.as_str());
        collect(&mut ids)
    };
    ExternalScoreSummary {
        flagged: ScoreGroup::of(&collect(&mut flagged.iter().copied())),
        true_positives: ScoreGroup::of(&positives(AccountLabel::Bot)),
        false_positives: ScoreGroup::of(&positives(AccountLabel::Legitimate)),
        rejected,
    }
}
