//! Signal aggregation into per-account flags, plus the account
//! characteristics compared between flagged and legitimate populations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dense::DenseComponent;
use crate::diversity::{bot_url_users, UrlDiversityTable, UrlVerdict};
use crate::error::{Error, Result};
use crate::record::{latest_snapshots, TweetRecord, UserSnapshot};
use crate::time::{Day, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Signal {
    BotUrlLink,
    DenseCluster,
    CreationBurst,
}

impl Signal {
    pub fn as_str(self) -> &'static str {
        match self {
            Signal::BotUrlLink => "bot_url_link",
            Signal::DenseCluster => "dense_cluster",
            Signal::CreationBurst => "creation_burst",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub signal: Signal,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlaggedAccount {
    pub user_id: String,
    pub signals: BTreeSet<Signal>,
    pub evidence: Vec<Evidence>,
    pub account_age_years: f64,
    pub name_length: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSummary {
    pub total_tweets: u64,
    pub flagged_tweet_count: u64,
    pub flagged_tweet_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    /// Sorted by user id.
    pub flagged: Vec<FlaggedAccount>,
    pub corpus_summary: CorpusSummary,
}

impl DetectionReport {
    pub fn flagged_ids(&self) -> BTreeSet<&str> {
        self.flagged.iter().map(|a| a.user_id.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// A dense component flags its members only above this mean internal
    /// multiplicity.
    pub cluster_flag_multiplicity: f64,
    /// Accounts above this follower-count quantile (within the corpus) are
    /// treated as media and never flagged for clustering alone.
    pub media_follower_quantile: f64,
    /// Smallest same-day creation group that counts as a burst.
    pub burst_min_count: usize,
    /// Reference time for account ages; latest tweet time when unset.
    pub as_of: Option<Timestamp>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            cluster_flag_multiplicity: 3.0,
            media_follower_quantile: 0.99,
            burst_min_count: 10,
            as_of: None,
        }
    }
}

/// Nearest-rank quantile of the follower counts of distinct accounts.
pub fn follower_quantile(records: &[TweetRecord], q: f64) -> u64 {
    let mut counts: Vec<u64> = latest_snapshots(records).values().map(|u| u.followers_count).collect();
    if counts.is_empty() {
        return 0;
    }
    counts.sort_unstable();
    let rank = libm::ceil(q.clamp(0.0, 1.0) * counts.len() as f64) as usize;
    counts[rank.clamp(1, counts.len()) - 1]
}

fn name_length(user: &UserSnapshot) -> usize {
    user.screen_name.chars().count()
}

fn latest_tweet(records: &[TweetRecord]) -> Timestamp {
    records.iter().map(|r| r.created_at).max().unwrap_or(Timestamp(0))
}

/// Aggregates the evidence into flagged accounts.
///
/// * Appearing in the table of any `bot_url` URL flags an account on its own.
/// * Membership of a dense component above the configured multiplicity flags
///   an account only when the component holds at least one URL-flagged
///   member and the account is neither verified nor above the media
///   follower quantile.
/// * A creation burst is recorded as corroborating evidence on accounts
///   flagged by either rule; it never flags by itself.
pub fn flag_accounts(
    verdicts: &[UrlVerdict],
    tables: &BTreeMap<String, UrlDiversityTable>,
    clusters: &[DenseComponent],
    records: &[TweetRecord],
    config: &DetectorConfig,
) -> DetectionReport {
    let snapshots = latest_snapshots(records);
    let mut evidence: BTreeMap<&str, Vec<Evidence>> = BTreeMap::new();

    let linked = bot_url_users(verdicts, tables);
    for (user, urls) in &linked {
        let entry = evidence.entry(user).or_default();
        for url in urls {
            entry.push(Evidence { signal: Signal::BotUrlLink, detail: format!("url {url}") });
        }
    }

    let media_cutoff = follower_quantile(records, config.media_follower_quantile);
    let is_media = |user: &str| snapshots.get(user).is_some_and(|u| u.verified || u.followers_count > media_cutoff);
    for cluster in clusters {
        if cluster.mean_internal_multiplicity <= config.cluster_flag_multiplicity {
            continue;
        }
        if !cluster.members.iter().any(|m| linked.contains_key(m.as_str())) {
            continue;
        }
        for member in cluster.members.iter().filter(|m| !is_media(m)) {
            evidence.entry(member).or_default().push(Evidence {
                signal: Signal::DenseCluster,
                detail: format!(
                    "community {} ({} members, mean multiplicity {:.3})",
                    cluster.community,
                    cluster.members.len(),
                    cluster.mean_internal_multiplicity
                ),
            });
        }
    }

    if config.burst_min_count >= 2 {
        let bursts = creation_bursts(records, config.burst_min_count).expect("min count checked");
        for burst in &bursts {
            for member in &burst.member_ids {
                if let Some(entry) = evidence.get_mut(member.as_str()) {
                    entry.push(Evidence {
                        signal: Signal::CreationBurst,
                        detail: format!(
                            "created {} with {} accounts, {} unique names",
                            burst.creation_date, burst.account_count, burst.unique_name_count
                        ),
                    });
                }
            }
        }
    }

    let as_of = config.as_of.unwrap_or_else(|| latest_tweet(records));
    let flagged: Vec<FlaggedAccount> = evidence
        .into_iter()
        .map(|(user, evidence)| {
            let snapshot = snapshots.get(user);
            FlaggedAccount {
                user_id: user.into(),
                signals: evidence.iter().map(|e| e.signal).collect(),
                evidence,
                account_age_years: snapshot.map(|u| u.account_created_at.years_until(as_of).max(0.0)).unwrap_or(0.0),
                name_length: snapshot.map(|u| name_length(u)).unwrap_or(0),
                verified: snapshot.is_some_and(|u| u.verified),
            }
        })
        .collect();

    let ids: BTreeSet<&str> = flagged.iter().map(|a| a.user_id.as_str()).collect();
    let total_tweets = records.len() as u64;
    let flagged_tweet_count = records.iter().filter(|r| ids.contains(r.user_id.as_str())).count() as u64;
    let flagged_tweet_fraction = if total_tweets == 0 { 0.0 } else { flagged_tweet_count as f64 / total_tweets as f64 };
    DetectionReport {
        flagged,
        corpus_summary: CorpusSummary { total_tweets, flagged_tweet_count, flagged_tweet_fraction },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreationBurst {
    pub creation_date: Day,
    pub account_count: usize,
    /// Distinct display names, compared case-insensitively.
    pub unique_name_count: usize,
    pub member_ids: Vec<String>,
}

/// Groups distinct accounts by UTC creation date and keeps dates with at
/// least `min_count` accounts, largest first (earlier date on ties).
pub fn creation_bursts(records: &[TweetRecord], min_count: usize) -> Result<Vec<CreationBurst>> {
    if min_count < 2 {
        return Err(Error::OutOfRange { what: "burst minimum count", value: min_count as f64 });
    }
    let mut by_day: BTreeMap<Day, Vec<(&str, &UserSnapshot)>> = BTreeMap::new();
    for (user, snapshot) in latest_snapshots(records) {
        by_day.entry(snapshot.account_created_at.utc_day()).or_default().push((user, snapshot));
    }
    let mut bursts: Vec<CreationBurst> = by_day
        .into_iter()
        .filter(|(_, members)| members.len() >= min_count)
        .map(|(day, members)| {
            let names: BTreeSet<String> = members.iter().map(|(_, u)| u.display_name.to_lowercase()).collect();
            CreationBurst {
                creation_date: day,
                account_count: members.len(),
                unique_name_count: names.len(),
                member_ids: members.iter().map(|(id, _)| String::from(*id)).collect(),
            }
        })
        .collect();
    bursts.sort_by(|a, b| b.account_count.cmp(&a.account_count).then(a.creation_date.cmp(&b.creation_date)));
    Ok(bursts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationStats {
    pub accounts: usize,
    /// Account ages in years, ascending.
    pub ages_years: Vec<f64>,
    pub mean_age_years: f64,
    /// Unicode scalar counts of screen names, ascending.
    pub screen_name_lengths: Vec<usize>,
    pub mean_screen_name_length: f64,
    pub display_name_lengths: Vec<usize>,
    pub mean_display_name_length: f64,
    pub verified_count: usize,
}

impl PopulationStats {
    fn from_users<'a>(users: impl Iterator<Item = &'a UserSnapshot>, as_of: Timestamp) -> Self {
        let mut ages = Vec::new();
        let mut screen = Vec::new();
        let mut display = Vec::new();
        let mut verified_count = 0;
        for user in users {
            ages.push(user.account_created_at.years_until(as_of));
            screen.push(name_length(user));
            display.push(user.display_name.chars().count());
            verified_count += usize::from(user.verified);
        }
        ages.sort_by(f64::total_cmp);
        screen.sort_unstable();
        display.sort_unstable();
        let mean_of = |xs: &[f64]| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
        let as_f64 = |xs: &[usize]| xs.iter().map(|&x| x as f64).collect::<Vec<_>>();
        PopulationStats {
            accounts: ages.len(),
            mean_age_years: mean_of(&ages),
            mean_screen_name_length: mean_of(&as_f64(&screen)),
            mean_display_name_length: mean_of(&as_f64(&display)),
            ages_years: ages,
            screen_name_lengths: screen,
            display_name_lengths: display,
            verified_count,
        }
    }

    pub fn age_histogram(&self, bin_width: f64) -> Vec<HistogramBin> {
        histogram(&self.ages_years, bin_width)
    }

    pub fn screen_name_histogram(&self) -> Vec<HistogramBin> {
        histogram(&self.screen_name_lengths.iter().map(|&l| l as f64).collect::<Vec<_>>(), 1.0)
    }

    pub fn display_name_histogram(&self) -> Vec<HistogramBin> {
        histogram(&self.display_name_lengths.iter().map(|&l| l as f64).collect::<Vec<_>>(), 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

/// Fixed-width bins anchored at zero, from the first to the last occupied
/// bin. Values must be nonnegative.
pub fn histogram(values: &[f64], bin_width: f64) -> Vec<HistogramBin> {
    assert!(bin_width > 0.0, "bin width must be positive");
    let Some(max) = values.iter().copied().reduce(f64::max) else {
        return Vec::new();
    };
    let bin = |v: f64| libm::floor(v.max(0.0) / bin_width) as usize;
    let lo = values.iter().map(|&v| bin(v)).min().expect("nonempty");
    let mut counts = alloc::vec![0usize; bin(max) - lo + 1];
    for &v in values {
        counts[bin(v) - lo] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let start = (lo + i) as f64 * bin_width;
            HistogramBin { start, end: start + bin_width, count }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonStats {
    pub flagged: PopulationStats,
    pub legitimate: PopulationStats,
}

/// Account characteristics of flagged versus all other accounts, using the
/// latest snapshot of each account.
pub fn population_stats(
    flagged: &BTreeSet<&str>,
    records: &[TweetRecord],
    as_of: Timestamp,
) -> Result<ComparisonStats> {
    let snapshots = latest_snapshots(records);
    if let Some((user, _)) = snapshots.iter().find(|(_, u)| u.account_created_at > as_of) {
        return Err(Error::TimeOrder(format!("account {user} was created after the reference time")));
    }
    let is_flagged = |id: &&str| flagged.contains(id);
    Ok(ComparisonStats {
        flagged: PopulationStats::from_users(snapshots.iter().filter(|(id, _)| is_flagged(id)).map(|(_, u)| *u), as_of),
        legitimate: PopulationStats::from_users(
            snapshots.iter().filter(|(id, _)| !is_flagged(id)).map(|(_, u)| *u),
            as_of,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diversity::{diversity_tables, UrlLabel};
    use crate::record::City;
    use alloc::vec;

    fn tweet(id: &str, user: &str, urls: &[&str]) -> TweetRecord {
        TweetRecord {
            tweet_id: id.into(),
            user_id: user.into(),
            created_at: Timestamp(1_000_000),
            text: String::new(),
            urls: urls.iter().map(|u| String::from(*u)).collect(),
            unparsed_urls: vec![],
            hashtags: vec![],
            city: City::Sydney,
            user: UserSnapshot {
                screen_name: user.into(),
                display_name: user.into(),
                followers_count: 10,
                friends_count: 10,
                verified: false,
                account_created_at: Timestamp(0),
            },
        }
    }

    fn tables_for(records: &[TweetRecord], urls: &[&str]) -> BTreeMap<String, UrlDiversityTable> {
        diversity_tables(records, urls).into_iter().map(|t| (t.url.clone(), t)).collect()
    }

    fn verdict(url: &str, label: UrlLabel) -> UrlVerdict {
        UrlVerdict { url: url.into(), gini: 0.0, r_squared: 0.0, n: 5, label }
    }

    #[test]
    fn nothing_to_flag() {
        let records = [tweet("1", "a", &["x.com"])];
        let report = flag_accounts(&[], &BTreeMap::new(), &[], &records, &DetectorConfig::default());
        assert!(report.flagged.is_empty());
        assert_eq!(report.corpus_summary.flagged_tweet_fraction, 0.0);
    }

    #[test]
    fn bot_url_link_flags_with_evidence() {
        let records = [tweet("1", "x", &["bot.com"]), tweet("2", "y", &["ok.com"]), tweet("3", "x", &[])];
        let tables = tables_for(&records, &["bot.com", "ok.com"]);
        let report = flag_accounts(
            &[verdict("bot.com", UrlLabel::BotUrl), verdict("ok.com", UrlLabel::Legitimate)],
            &tables,
            &[],
            &records,
            &DetectorConfig::default(),
        );
        assert_eq!(report.flagged.len(), 1);
        let x = &report.flagged[0];
        assert_eq!(x.user_id, "x");
        assert_eq!(x.signals, BTreeSet::from([Signal::BotUrlLink]));
        assert_eq!(x.evidence[0].detail, "url bot.com");
        assert_eq!(report.corpus_summary.flagged_tweet_count, 2);
        assert!((report.corpus_summary.flagged_tweet_fraction - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dense_cluster_needs_a_linked_member_and_spares_media() {
        let mut records = vec![tweet("1", "bot", &["bot.com"]), tweet("2", "ring", &[]), tweet("3", "anchor", &[])];
        let mut news = tweet("4", "news", &[]);
        news.user.verified = true;
        records.push(news);
        let tables = tables_for(&records, &["bot.com"]);
        let cluster = |members: &[&str]| DenseComponent {
            community: 0,
            members: members.iter().map(|m| String::from(*m)).collect(),
            internal_multiplicity: 30,
            mean_internal_multiplicity: 5.0,
        };
        let cfg = DetectorConfig::default();
        let verdicts = [verdict("bot.com", UrlLabel::BotUrl)];

        let report = flag_accounts(&verdicts, &tables, &[cluster(&["bot", "news", "ring"])], &records, &cfg);
        let ids: Vec<&str> = report.flagged.iter().map(|a| a.user_id.as_str()).collect();
        assert_eq!(ids, ["bot", "ring"]);
        assert_eq!(report.flagged[0].signals.len(), 2);

        let report = flag_accounts(&verdicts, &tables, &[cluster(&["anchor", "ring"])], &records, &cfg);
        assert_eq!(report.flagged_ids(), BTreeSet::from(["bot"]));

        let mut loose = cluster(&["bot", "ring"]);
        loose.mean_internal_multiplicity = 1.0;
        let report = flag_accounts(&verdicts, &tables, &[loose], &records, &cfg);
        assert_eq!(report.flagged_ids(), BTreeSet::from(["bot"]));
    }

    #[test]
    fn adding_a_bot_verdict_never_unflags() {
        let records = [tweet("1", "a", &["p.com"]), tweet("2", "b", &["q.com"]), tweet("3", "c", &["p.com", "q.com"])];
        let tables = tables_for(&records, &["p.com", "q.com"]);
        let cfg = DetectorConfig::default();
        let one = flag_accounts(
            &[verdict("p.com", UrlLabel::BotUrl), verdict("q.com", UrlLabel::Legitimate)],
            &tables,
            &[],
            &records,
            &cfg,
        );
        let two = flag_accounts(
            &[verdict("p.com", UrlLabel::BotUrl), verdict("q.com", UrlLabel::BotUrl)],
            &tables,
            &[],
            &records,
            &cfg,
        );
        assert!(one.flagged_ids().is_subset(&two.flagged_ids()));
    }

    fn account(id: &str, created_day: Day, display: &str) -> TweetRecord {
        let mut r = tweet(id, id, &[]);
        r.user.account_created_at = created_day.start();
        r.user.display_name = display.into();
        r
    }

    #[test]
    fn bursts_group_by_creation_date() {
        let d = |n| Day::from_ymd(2014, 2, n).unwrap();
        let distinct: Vec<TweetRecord> = (1..=5).map(|i| account(&format!("u{i}"), d(i), "x")).collect();
        assert!(creation_bursts(&distinct, 2).unwrap().is_empty());
        assert!(creation_bursts(&distinct, 1).is_err());

        let mut records: Vec<TweetRecord> =
            (0..6).map(|i| account(&format!("b{i}"), d(20), ["Ann", "ANN", "bob"][i % 3])).collect();
        records.extend((0..3).map(|i| account(&format!("c{i}"), d(3), "z")));
        records.push(account("b0", d(20), "Ann")); // same account tweeting again
        let bursts = creation_bursts(&records, 3).unwrap();
        assert_eq!(bursts.len(), 2);
        assert_eq!((bursts[0].account_count, bursts[0].unique_name_count), (6, 2));
        assert_eq!(bursts[0].creation_date, d(20));
        assert_eq!(bursts[1].account_count, 3);
    }

    #[test]
    fn burst_is_corroborating_only() {
        let day = Day::from_ymd(2014, 2, 20).unwrap();
        let records: Vec<TweetRecord> = (0..12)
            .map(|i| {
                let mut r = account(&format!("b{i:02}"), day, "same");
                if i == 0 {
                    r.urls.push("bot.com".into());
                }
                r
            })
            .collect();
        let tables = tables_for(&records, &["bot.com"]);
        let report =
            flag_accounts(&[verdict("bot.com", UrlLabel::BotUrl)], &tables, &[], &records, &DetectorConfig::default());
        assert_eq!(report.flagged.len(), 1);
        assert!(report.flagged[0].signals.contains(&Signal::CreationBurst));
    }

    #[test]
    fn age_arithmetic_and_empty_flagged_set() {
        let as_of = Timestamp(1_000_000_000);
        let mut r = tweet("1", "a", &[]);
        r.user.account_created_at = Timestamp(as_of.0 - (2.0 * 365.25 * 86_400.0) as i64);
        r.user.screen_name = "ñandú".into();
        let stats = population_stats(&BTreeSet::new(), &[r.clone()], as_of).unwrap();
        assert_eq!(stats.flagged.accounts, 0);
        assert_eq!(stats.legitimate.accounts, 1);
        assert!((stats.legitimate.mean_age_years - 2.0).abs() < 1e-9);
        assert_eq!(stats.legitimate.screen_name_lengths, [5]);

        assert!(population_stats(&BTreeSet::new(), &[r], Timestamp(0)).is_err());
    }

    #[test]
    fn histogram_bins() {
        let bins = histogram(&[0.2, 0.7, 1.9, 3.1], 1.0);
        let counts: Vec<usize> = bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, [2, 1, 0, 1]);
        assert_eq!((bins[3].start, bins[3].end), (3.0, 4.0));
        assert!(histogram(&[], 1.0).is_empty());
    }

    #[test]
    fn quantile_is_nearest_rank() {
        let records: Vec<TweetRecord> = (1..=100)
            .map(|i| {
                let mut r = tweet(&format!("{i}"), &format!("u{i:03}"), &[]);
                r.user.followers_count = i;
                r
            })
            .collect();
        assert_eq!(follower_quantile(&records, 0.99), 99);
        assert_eq!(follower_quantile(&records, 1.0), 100);
        assert_eq!(follower_quantile(&[], 0.99), 0);
    }
}
