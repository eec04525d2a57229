//! Synthetic tweet streams with planted bot rings.
//!
//! Legitimate users tweet on random days with Zipf-distributed activity, so
//! the URLs they share show a heavy-tailed diversity profile. Each bot ring
//! promotes one shortened URL, tweets mostly on a shared set of days in one
//! city, and every member links exactly `bot_diversity` other URLs (one
//! fewer with probability `bot_diversity_noise`). Part of each bot
//! population is created on a single date with display names drawn from a
//! small pool. Everything is driven by one seeded ChaCha8 generator, so a
//! seed always reproduces the same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use polluter_core::eval::AccountLabel;
use polluter_core::{City, Day, EventCalendar, Timestamp, TweetRecord, UserSnapshot, SECONDS_PER_DAY};
use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Poisson, Zipf};

use crate::error::{Error, Result};
use crate::formats::write_ground_truth;
use crate::ingest::{write_calendar, write_records};

const SECONDS_PER_YEAR: f64 = 365.25 * SECONDS_PER_DAY as f64;

const CITIES: [City; 5] = [City::Adelaide, City::Brisbane, City::Melbourne, City::Perth, City::Sydney];
/// Relative tweet volume per city.
const CITY_WEIGHTS: [f64; 5] = [14.1, 5.9, 23.7, 8.4, 31.6];

const DOMAINS: [&str; 8] = [
    "www.abc.net.au/news",
    "www.theage.com.au/national",
    "www.smh.com.au/politics",
    "www.news.com.au/world",
    "www.theguardian.com/australia-news",
    "www.sbs.com.au/news",
    "www.heraldsun.com.au/news",
    "www.youtube.com/user",
];
const HASHTAGS: [&str; 10] =
    ["auspol", "rally", "protest", "reclaimaustralia", "nomoredeaths", "qanda", "vote", "news", "melbourne", "sydney"];
const PHRASES: [&str; 8] = [
    "Worth a read",
    "Crowds gathering downtown",
    "This is important",
    "Watch this",
    "Interesting take on today",
    "Big turnout this morning",
    "Can't believe this",
    "Thoughts?",
];
const BOT_PHRASES: [&str; 4] = ["Join us now", "Share before they delete it", "The truth they hide", "Stand up today"];
const FIRST: [&str; 16] = [
    "alex", "sam", "jordan", "taylor", "chris", "pat", "jamie", "casey", "morgan", "riley", "drew", "kim", "lee",
    "robin", "jess", "max",
];
const LAST: [&str; 12] =
    ["smith", "nguyen", "brown", "wilson", "taylor", "martin", "white", "lee", "walker", "hall", "young", "king"];
const BOT_WORDS: [&str; 8] = ["patriot", "truth", "aussie", "freedom", "voice", "nation", "real", "defend"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_legit_users: usize,
    /// Most active legitimate users, made verified with very large audiences.
    pub n_media: usize,
    pub n_bots: usize,
    pub n_bot_urls: usize,
    pub legit_url_pool: usize,
    pub start: Day,
    pub days: u32,
    pub event_days_per_city: usize,
    /// Mean tweets per legitimate user per day.
    pub legit_tweet_rate: f64,
    /// Probability that a legitimate tweet carries a URL.
    pub legit_url_share: f64,
    /// Exponent of the Zipf laws behind user activity and URL popularity.
    pub zipf_exponent: f64,
    /// Target share of all tweets written by bots.
    pub bot_tweet_share: f64,
    /// Probability that a bot tweet falls on one of its ring's shared days.
    pub bot_cotweet_rate: f64,
    pub ring_days: usize,
    pub bot_diversity: u64,
    pub bot_diversity_noise: f64,
    /// Fraction of bots created on `burst_date`.
    pub burst_fraction: f64,
    pub burst_date: Day,
    pub burst_name_pool: usize,
    pub bot_age_mean: f64,
    pub bot_age_sd: f64,
    pub legit_age_mean: f64,
    pub legit_age_sd: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            n_legit_users: 2000,
            n_media: 10,
            n_bots: 100,
            n_bot_urls: 5,
            legit_url_pool: 500,
            start: Day::from_ymd(2016, 11, 1).expect("valid date"),
            days: 60,
            event_days_per_city: 6,
            legit_tweet_rate: 0.1,
            legit_url_share: 0.6,
            zipf_exponent: 1.2,
            bot_tweet_share: 0.07,
            bot_cotweet_rate: 0.8,
            ring_days: 8,
            bot_diversity: 1,
            bot_diversity_noise: 0.15,
            burst_fraction: 0.4,
            burst_date: Day::from_ymd(2014, 2, 20).expect("valid date"),
            burst_name_pool: 12,
            bot_age_mean: 2.9,
            bot_age_sd: 1.0,
            legit_age_mean: 4.2,
            legit_age_sd: 1.0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("synth: {m}")));
        let probability = |p: f64| (0.0..=1.0).contains(&p);
        if self.days == 0 {
            return bad("days must be positive");
        }
        if self.n_legit_users == 0 {
            return bad("at least one legitimate user is required");
        }
        if self.n_media > self.n_legit_users {
            return bad("n_media exceeds n_legit_users");
        }
        if self.legit_url_pool == 0 {
            return bad("legit_url_pool must be positive");
        }
        if self.n_bots > 0 && self.n_bot_urls == 0 {
            return bad("bots need at least one bot URL");
        }
        if [self.legit_tweet_rate, self.zipf_exponent].iter().any(|x| x.is_nan() || *x <= 0.0) {
            return bad("legit_tweet_rate and zipf_exponent must be positive");
        }
        if !probability(self.legit_url_share)
            || !probability(self.bot_cotweet_rate)
            || !probability(self.bot_diversity_noise)
            || !probability(self.burst_fraction)
        {
            return bad("rates and fractions must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.bot_tweet_share) {
            return bad("bot_tweet_share must lie in [0, 1)");
        }
        if self.ring_days == 0 || self.ring_days > self.days as usize {
            return bad("ring_days must lie in 1..=days");
        }
        if self.event_days_per_city > self.days as usize {
            return bad("event_days_per_city exceeds days");
        }
        if self.burst_name_pool == 0 {
            return bad("burst_name_pool must be positive");
        }
        if self.burst_date >= self.start {
            return bad("burst_date must precede the stream");
        }
        if [self.bot_age_sd, self.legit_age_sd].iter().any(|sd| sd.is_nan() || *sd < 0.0) {
            return bad("age standard deviations must be nonnegative");
        }
        Ok(())
    }

    fn as_of(&self) -> Timestamp {
        Timestamp(self.start.start().0 + self.days as i64 * SECONDS_PER_DAY)
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub records: Vec<TweetRecord>,
    pub truth: BTreeMap<String, AccountLabel>,
    pub calendar: EventCalendar,
    /// Canonical form of each ring's URL.
    pub bot_urls: Vec<String>,
    /// End of the stream window; account ages are measured against it.
    pub as_of: Timestamp,
}

impl SynthOutput {
    /// Writes `tweets.jsonl`, `ground_truth.csv` and `calendar.csv`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let create = |name: &str| {
            let path = dir.join(name);
            File::create(&path).map(BufWriter::new).map_err(|e| Error::io(path, e))
        };
        let mut tweets = create("tweets.jsonl")?;
        write_records(&mut tweets, &self.records).map_err(|e| Error::io(dir.join("tweets.jsonl"), e))?;
        tweets.flush().map_err(|e| Error::io(dir.join("tweets.jsonl"), e))?;
        write_ground_truth(create("ground_truth.csv")?, &self.truth)?;
        write_calendar(create("calendar.csv")?, &self.calendar)?;
        Ok(())
    }
}

struct Account {
    id: String,
    city: City,
    user: UserSnapshot,
}

struct Draft {
    at: i64,
    account: usize,
    urls: Vec<String>,
    hashtags: Vec<String>,
    text: String,
}

fn legit_url(rank: usize) -> String {
    format!("{}/story-{rank:04}", DOMAINS[rank % DOMAINS.len()])
}

fn short_code(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[u8] = b"abcdefghijkmnopqrstuvwxyzABCDEFGHJKLMNPQRSTUVWXYZ23456789";
    (0..7).map(|_| *ALPHABET.choose(rng).expect("nonempty") as char).collect()
}

/// Draws normal ages, then shifts and clamps until the sample mean is the
/// target (to within rounding) and every age is at least `min`.
fn sample_ages(rng: &mut ChaCha8Rng, n: usize, mean: f64, sd: f64, min: f64) -> Vec<f64> {
    let normal = Normal::new(mean, sd).expect("validated");
    let mut ages: Vec<f64> = (0..n).map(|_| normal.sample(rng)).collect();
    recenter(&mut ages, mean, min);
    ages
}

fn recenter(ages: &mut [f64], target: f64, min: f64) {
    if ages.is_empty() {
        return;
    }
    for _ in 0..50 {
        let mean = ages.iter().sum::<f64>() / ages.len() as f64;
        let shift = target - mean;
        if shift.abs() < 1e-12 {
            break;
        }
        for a in ages.iter_mut() {
            *a = (*a + shift).max(min);
        }
    }
}

fn weighted_city(rng: &mut ChaCha8Rng) -> City {
    let total: f64 = CITY_WEIGHTS.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (city, w) in CITIES.iter().zip(CITY_WEIGHTS) {
        if x < w {
            return *city;
        }
        x -= w;
    }
    CITIES[CITIES.len() - 1]
}

fn unique_name(taken: &mut BTreeSet<String>, base: String) -> String {
    let mut name = base.clone();
    let mut k = 2;
    while !taken.insert(name.clone()) {
        name = format!("{base}{k}");
        k += 1;
    }
    name
}

fn created_at(as_of: Timestamp, age_years: f64) -> Timestamp {
    Timestamp(as_of.0 - (age_years * SECONDS_PER_YEAR).round() as i64)
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = cfg.start.start().0;
    let as_of = cfg.as_of();
    let min_age = cfg.days as f64 / 365.25 + 0.1;
    let n_accounts = cfg.n_legit_users + cfg.n_bots;

    let mut id_numbers: Vec<u64> = (0..n_accounts as u64).collect();
    id_numbers.shuffle(&mut rng);
    let ids: Vec<String> = id_numbers.iter().map(|k| (2_000_000 + 37 * k).to_string()).collect();

    let mut calendar = EventCalendar::new();
    let mut event_days: BTreeMap<City, Vec<u32>> = BTreeMap::new();
    for city in CITIES {
        let mut days: Vec<u32> =
            index::sample(&mut rng, cfg.days as usize, cfg.event_days_per_city).into_iter().map(|d| d as u32).collect();
        days.sort_unstable();
        for &d in &days {
            calendar.insert(city, Day(cfg.start.0 + d as i32));
        }
        event_days.insert(city, days);
    }

    let mut screen_names = BTreeSet::new();
    let mut accounts: Vec<Account> = Vec::with_capacity(n_accounts);
    let mut truth = BTreeMap::new();
    let mut drafts: Vec<Draft> = Vec::new();

    // Legitimate population.
    let mut activity_rank: Vec<usize> = (1..=cfg.n_legit_users).collect();
    activity_rank.shuffle(&mut rng);
    let weights: Vec<f64> = activity_rank.iter().map(|&r| (r as f64).powf(-cfg.zipf_exponent)).collect();
    let weight_sum: f64 = weights.iter().sum();
    let budget = cfg.n_legit_users as f64 * cfg.days as f64 * cfg.legit_tweet_rate;
    let legit_ages = sample_ages(&mut rng, cfg.n_legit_users, cfg.legit_age_mean, cfg.legit_age_sd, min_age);
    let followers = LogNormal::new(300f64.ln(), 1.2).expect("valid");
    let friends = LogNormal::new(250f64.ln(), 1.0).expect("valid");
    let url_rank = Zipf::new(cfg.legit_url_pool as f64, cfg.zipf_exponent).expect("validated");

    for i in 0..cfg.n_legit_users {
        let media = activity_rank[i] <= cfg.n_media;
        let first = *FIRST.choose(&mut rng).expect("nonempty");
        let last = *LAST.choose(&mut rng).expect("nonempty");
        let (screen, display) = if media {
            let outlet = DOMAINS[activity_rank[i] % DOMAINS.len()].trim_start_matches("www.");
            let outlet = outlet.split('.').next().expect("nonempty").to_owned();
            (format!("{outlet}news"), format!("{} News", outlet.to_uppercase()))
        } else {
            let digits = if rng.random_bool(0.5) { rng.random_range(1..1000).to_string() } else { String::new() };
            (format!("{first}_{last}{digits}"), format!("{} {}", capitalize(first), capitalize(last)))
        };
        let user = UserSnapshot {
            screen_name: unique_name(&mut screen_names, screen),
            display_name: display,
            followers_count: if media {
                rng.random_range(200_000..2_000_000)
            } else {
                followers.sample(&mut rng).round() as u64
            },
            friends_count: friends.sample(&mut rng).round() as u64,
            verified: media || rng.random_bool(0.01),
            account_created_at: created_at(as_of, legit_ages[i]),
        };
        accounts.push(Account { id: ids[i].clone(), city: weighted_city(&mut rng), user });
        truth.insert(ids[i].clone(), AccountLabel::Legitimate);

        let lambda = budget * weights[i] / weight_sum;
        let n_tweets =
            if lambda > 0.0 { (Poisson::new(lambda).expect("positive").sample(&mut rng) as u64).max(1) } else { 1 };
        for _ in 0..n_tweets {
            let day = rng.random_range(0..cfg.days) as i64;
            let at = start + day * SECONDS_PER_DAY + rng.random_range(0..SECONDS_PER_DAY);
            let mut urls = Vec::new();
            if rng.random_bool(cfg.legit_url_share) {
                urls.push(legit_url(url_rank.sample(&mut rng) as usize));
                if rng.random_bool(0.05) {
                    let extra = legit_url(url_rank.sample(&mut rng) as usize);
                    if !urls.contains(&extra) {
                        urls.push(extra);
                    }
                }
            }
            let hashtags: Vec<String> = if rng.random_bool(0.5) {
                vec![HASHTAGS.choose(&mut rng).expect("nonempty").to_string()]
            } else {
                vec![]
            };
            let phrase = *PHRASES.choose(&mut rng).expect("nonempty");
            drafts.push(Draft { at, account: i, text: compose(phrase, &hashtags, &urls), urls, hashtags });
        }
    }
    let legit_tweets = drafts.len();

    // Bot rings.
    let bot_urls: Vec<String> = (0..cfg.n_bot_urls).map(|_| format!("bit.ly/{}", short_code(&mut rng))).collect();
    let ring_days: Vec<Vec<u32>> = (0..cfg.n_bot_urls)
        .map(|j| {
            let city = CITIES[j % CITIES.len()];
            let mut days: Vec<u32> = event_days[&city].iter().copied().take(cfg.ring_days).collect();
            let mut others: Vec<u32> = (0..cfg.days).filter(|d| !days.contains(d)).collect();
            others.shuffle(&mut rng);
            let missing = cfg.ring_days - days.len();
            days.extend(others.into_iter().take(missing));
            days.sort_unstable();
            days
        })
        .collect();

    let bot_budget = (cfg.bot_tweet_share / (1.0 - cfg.bot_tweet_share) * legit_tweets as f64).round();
    // Split the budget as evenly as possible, the remainder going to a random
    // subset of bots.
    let mut per_bot = vec![0usize; cfg.n_bots];
    let budget = bot_budget as usize;
    if let Some(base) = budget.checked_div(cfg.n_bots) {
        per_bot.fill(base);
        for b in index::sample(&mut rng, cfg.n_bots, budget % cfg.n_bots) {
            per_bot[b] += 1;
        }
    }
    let n_burst = (cfg.burst_fraction * cfg.n_bots as f64).round() as usize;
    let burst_members: BTreeSet<usize> = index::sample(&mut rng, cfg.n_bots, n_burst).into_iter().collect();
    let burst_age = cfg.burst_date.start().years_until(as_of);
    let other_target = if cfg.n_bots > n_burst {
        (cfg.bot_age_mean * cfg.n_bots as f64 - burst_age * n_burst as f64) / (cfg.n_bots - n_burst) as f64
    } else {
        cfg.bot_age_mean
    };
    let other_ages = sample_ages(&mut rng, cfg.n_bots - n_burst, other_target, cfg.bot_age_sd, min_age);
    let mut other_ages = other_ages.into_iter();
    let name_pool: Vec<String> = (0..cfg.burst_name_pool)
        .map(|_| {
            format!(
                "{} {}",
                capitalize(FIRST.choose(&mut rng).expect("nonempty")),
                capitalize(LAST.choose(&mut rng).expect("nonempty"))
            )
        })
        .collect();
    let bot_followers = LogNormal::new(60f64.ln(), 1.0).expect("valid");
    let bot_friends = LogNormal::new(900f64.ln(), 0.6).expect("valid");

    #[allow(clippy::needless_range_loop)]
    for b in 0..cfg.n_bots {
        let account = cfg.n_legit_users + b;
        let ring = b % cfg.n_bot_urls;
        let city = CITIES[ring % CITIES.len()];
        let in_burst = burst_members.contains(&b);
        let account_created_at = if in_burst {
            Timestamp(cfg.burst_date.start().0 + rng.random_range(0..SECONDS_PER_DAY))
        } else {
            created_at(as_of, other_ages.next().expect("one age per bot outside the burst"))
        };
        let display_name = if in_burst {
            name_pool.choose(&mut rng).expect("nonempty").clone()
        } else {
            format!(
                "{} {}",
                capitalize(FIRST.choose(&mut rng).expect("nonempty")),
                capitalize(LAST.choose(&mut rng).expect("nonempty"))
            )
        };
        let screen = format!("{}{}", BOT_WORDS.choose(&mut rng).expect("nonempty"), rng.random_range(1000..1_000_000));
        let user = UserSnapshot {
            screen_name: unique_name(&mut screen_names, screen),
            display_name,
            followers_count: bot_followers.sample(&mut rng).round() as u64,
            friends_count: bot_friends.sample(&mut rng).round() as u64,
            verified: false,
            account_created_at,
        };
        accounts.push(Account { id: ids[account].clone(), city, user });
        truth.insert(ids[account].clone(), AccountLabel::Bot);

        let diversity = if rng.random_bool(cfg.bot_diversity_noise) {
            cfg.bot_diversity.saturating_sub(1)
        } else {
            cfg.bot_diversity
        } as usize;
        let campaign_tweets = per_bot[b].saturating_sub(diversity).max(1);
        let other_urls: Vec<usize> = index::sample(&mut rng, cfg.legit_url_pool, diversity.min(cfg.legit_url_pool))
            .into_iter()
            .map(|r| r + 1)
            .collect();
        let day_of = |rng: &mut ChaCha8Rng| -> i64 {
            if rng.random_bool(cfg.bot_cotweet_rate) {
                *ring_days[ring].choose(rng).expect("nonempty") as i64
            } else {
                rng.random_range(0..cfg.days) as i64
            }
        };
        let tweet_urls =
            std::iter::repeat_n(bot_urls[ring].clone(), campaign_tweets).chain(other_urls.into_iter().map(legit_url));
        for url in tweet_urls {
            let at = start + day_of(&mut rng) * SECONDS_PER_DAY + rng.random_range(0..SECONDS_PER_DAY);
            let hashtags = vec![HASHTAGS[rng.random_range(0..4)].to_string()];
            let phrase = *BOT_PHRASES.choose(&mut rng).expect("nonempty");
            let urls = vec![url];
            drafts.push(Draft { at, account, text: compose(phrase, &hashtags, &urls), urls, hashtags });
        }
    }

    drafts.sort_by_key(|d| d.at);
    let records = drafts
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            let account = &accounts[d.account];
            TweetRecord {
                tweet_id: (600_000_000_000u64 + k as u64).to_string(),
                user_id: account.id.clone(),
                created_at: Timestamp(d.at),
                text: d.text,
                urls: d.urls,
                unparsed_urls: Vec::new(),
                hashtags: d.hashtags,
                city: account.city,
                user: account.user.clone(),
            }
        })
        .collect();
    Ok(SynthOutput { records, truth, calendar, bot_urls, as_of })
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    chars.next().map(|c| c.to_uppercase().chain(chars).collect()).unwrap_or_default()
}

fn compose(phrase: &str, hashtags: &[String], urls: &[String]) -> String {
    let mut text = phrase.to_owned();
    for tag in hashtags {
        text.push_str(" #");
        text.push_str(tag);
    }
    for url in urls {
        text.push_str(" https://");
        text.push_str(url);
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_stream, record_to_json, IngestConfig};

    fn small() -> SynthConfig {
        SynthConfig {
            n_legit_users: 200,
            n_bots: 20,
            n_bot_urls: 2,
            legit_url_pool: 80,
            days: 20,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        let text = |o: &SynthOutput| o.records.iter().map(record_to_json).collect::<Vec<_>>();
        assert_eq!(text(&a), text(&b));
        let c = generate(&SynthConfig { seed: 2, ..small() }).unwrap();
        assert_ne!(text(&a), text(&c));
    }

    #[test]
    fn stream_parses_cleanly() {
        let out = generate(&small()).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &out.records).unwrap();
        let parsed = parse_stream(buf.as_slice(), &IngestConfig::default()).unwrap();
        assert!(parsed.errors.is_empty(), "{:?}", parsed.errors);
        assert_eq!(parsed.records, out.records);
    }

    #[test]
    fn planted_structure() {
        let cfg = small();
        let out = generate(&cfg).unwrap();
        assert_eq!(out.truth.len(), 220);
        let bots: BTreeSet<&str> =
            out.truth.iter().filter(|(_, l)| **l == AccountLabel::Bot).map(|(u, _)| u.as_str()).collect();
        assert_eq!(bots.len(), 20);
        for r in &out.records {
            let is_bot = bots.contains(r.user_id.as_str());
            let bot_url = r.urls.iter().any(|u| out.bot_urls.contains(u));
            if bot_url {
                assert!(is_bot);
            }
            assert!(r.user.account_created_at < r.created_at);
            assert!(r.created_at >= cfg.start.start() && r.created_at < out.as_of);
        }
        let bot_tweets = out.records.iter().filter(|r| bots.contains(r.user_id.as_str())).count() as f64;
        assert!((bot_tweets / out.records.len() as f64 - cfg.bot_tweet_share).abs() < 0.01);
        assert_eq!(out.calendar.len(), 5 * cfg.event_days_per_city);
    }

    #[test]
    fn planted_age_means() {
        let out = generate(&small()).unwrap();
        let snapshots = polluter_core::record::latest_snapshots(&out.records);
        for (label, target) in [(AccountLabel::Bot, 2.9), (AccountLabel::Legitimate, 4.2)] {
            let ages: Vec<f64> = out
                .truth
                .iter()
                .filter(|(_, l)| **l == label)
                .map(|(u, _)| snapshots[u.as_str()].account_created_at.years_until(out.as_of))
                .collect();
            let mean = ages.iter().sum::<f64>() / ages.len() as f64;
            assert!((mean - target).abs() < 1e-3, "{label:?}: {mean}");
        }
    }

    #[test]
    fn no_bots() {
        let out = generate(&SynthConfig { n_bots: 0, ..small() }).unwrap();
        assert!(out.truth.values().all(|l| *l == AccountLabel::Legitimate));
    }

    #[test]
    fn invalid_settings() {
        assert!(generate(&SynthConfig { days: 0, ..small() }).is_err());
        assert!(generate(&SynthConfig { bot_tweet_share: 1.0, ..small() }).is_err());
        assert!(generate(&SynthConfig { n_bot_urls: 0, ..small() }).is_err());
    }
}
