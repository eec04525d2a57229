//! Line-delimited JSON tweet records.
//!
//! One object per line with the fields `tweet_id`, `user_id`, `created_at`
//! (ISO-8601), `text`, `urls`, `hashtags`, `city` and `user` (`screen_name`,
//! `display_name`, `followers_count`, `friends_count`, `verified`,
//! `account_created_at`). Malformed lines are logged and skipped; a repeated
//! `tweet_id` keeps its first occurrence.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::LazyLock;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, TimeZone, Utc};
use chrono_tz::Tz;
use polluter_core::url::canonicalize_url;
use polluter_core::{City, Day, EventCalendar, Timestamp, TweetRecord, UserSnapshot};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct WireUser {
    screen_name: Option<String>,
    display_name: Option<String>,
    followers_count: Option<u64>,
    friends_count: Option<u64>,
    verified: Option<bool>,
    account_created_at: Option<String>,
}

#[derive(Debug, Deserialize)]
struct WireTweet {
    tweet_id: Option<String>,
    user_id: Option<String>,
    created_at: Option<String>,
    text: Option<String>,
    urls: Option<Vec<String>>,
    hashtags: Option<Vec<String>>,
    city: Option<String>,
    user: Option<WireUser>,
}

#[derive(Serialize)]
struct WireUserOut<'a> {
    screen_name: &'a str,
    display_name: &'a str,
    followers_count: u64,
    friends_count: u64,
    verified: bool,
    account_created_at: String,
}

#[derive(Serialize)]
struct WireTweetOut<'a> {
    tweet_id: &'a str,
    user_id: &'a str,
    created_at: String,
    text: &'a str,
    urls: Vec<&'a str>,
    hashtags: &'a [String],
    city: &'a str,
    user: WireUserOut<'a>,
}

/// One rejected or skipped input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u64,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.line, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseErrorLog {
    pub entries: Vec<ParseError>,
}

impl ParseErrorLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn push(&mut self, line: u64, reason: impl Into<String>) {
        self.entries.push(ParseError { line, reason: reason.into() });
    }

    /// `<line_no>\t<reason>` per entry.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.entries {
            writeln!(w, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedStream {
    pub records: Vec<TweetRecord>,
    pub errors: ParseErrorLog,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestConfig {
    /// Keep only tweets at or after this instant.
    pub since: Option<Timestamp>,
    /// Keep only tweets strictly before this instant.
    pub until: Option<Timestamp>,
}

static URL_IN_TEXT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:https?://|www\.)[^\s<>]+").expect("valid regex"));
static HASHTAG_IN_TEXT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?:^|[^\w&])#(\w+)").expect("valid regex"));

pub fn parse_timestamp(raw: &str) -> std::result::Result<Timestamp, String> {
    let raw = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(Timestamp(dt.timestamp()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Ok(Timestamp(naive.and_utc().timestamp()));
        }
    }
    Err(format!("unparseable timestamp {raw:?}"))
}

pub fn format_timestamp(ts: Timestamp) -> String {
    Utc.timestamp_opt(ts.0, 0)
        .single()
        .map(|dt| dt.to_rfc3339_opts(SecondsFormat::Secs, true))
        .unwrap_or_else(|| ts.0.to_string())
}

pub fn parse_date(raw: &str) -> std::result::Result<Day, String> {
    let date = NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d").map_err(|e| format!("bad date {raw:?}: {e}"))?;
    Ok(day_from_naive(date))
}

fn day_from_naive(date: NaiveDate) -> Day {
    use chrono::Datelike;
    Day::from_ymd(date.year(), date.month(), date.day()).expect("chrono dates are valid")
}

/// Parses a time-zone name such as `UTC` or `Australia/Adelaide`.
pub fn parse_tz(name: &str) -> Result<Tz> {
    name.parse::<Tz>().map_err(|_| Error::Config(format!("unknown time zone {name:?}")))
}

/// Local calendar date of an instant in `tz`.
pub fn local_day(ts: Timestamp, tz: Tz) -> Day {
    let utc = Utc.timestamp_opt(ts.0, 0).single().expect("timestamps are in chrono range");
    day_from_naive(utc.with_timezone(&tz).date_naive())
}

/// The day a tweet is bucketed into.
pub fn active_day(record: &TweetRecord, tz: Tz) -> Day {
    local_day(record.created_at, tz)
}

fn required<T>(value: Option<T>, field: &str) -> std::result::Result<T, String> {
    value.ok_or_else(|| format!("missing field `{field}`"))
}

/// Parses one JSON line into a record.
pub fn parse_record(line: &str) -> std::result::Result<TweetRecord, String> {
    let wire: WireTweet = serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
    let tweet_id = required(wire.tweet_id, "tweet_id")?;
    if tweet_id.is_empty() {
        return Err("empty field `tweet_id`".into());
    }
    let user_id = required(wire.user_id, "user_id")?;
    if user_id.is_empty() {
        return Err("empty field `user_id`".into());
    }
    let created_at =
        parse_timestamp(&required(wire.created_at, "created_at")?).map_err(|e| format!("field `created_at`: {e}"))?;
    let text = required(wire.text, "text")?;
    let city: City = required(wire.city, "city")?.parse().map_err(|e| format!("field `city`: {e}"))?;
    let user = required(wire.user, "user")?;
    let account_created_at = parse_timestamp(&required(user.account_created_at, "user.account_created_at")?)
        .map_err(|e| format!("field `user.account_created_at`: {e}"))?;
    if account_created_at > created_at {
        return Err("field `user.account_created_at` is later than `created_at`".into());
    }
    let user = UserSnapshot {
        screen_name: required(user.screen_name, "user.screen_name")?,
        display_name: required(user.display_name, "user.display_name")?,
        followers_count: required(user.followers_count, "user.followers_count")?,
        friends_count: required(user.friends_count, "user.friends_count")?,
        verified: required(user.verified, "user.verified")?,
        account_created_at,
    };

    let raw_urls = wire.urls.unwrap_or_else(|| URL_IN_TEXT.find_iter(&text).map(|m| m.as_str().to_owned()).collect());
    let mut urls = Vec::new();
    let mut unparsed_urls = Vec::new();
    for raw in raw_urls {
        match canonicalize_url(&raw) {
            Ok(url) => urls.push(url),
            Err(_) => unparsed_urls.push(raw),
        }
    }
    let hashtags = match wire.hashtags {
        Some(tags) => tags.iter().map(|t| t.trim_start_matches('#').to_lowercase()).collect(),
        None => HASHTAG_IN_TEXT.captures_iter(&text).map(|c| c[1].to_lowercase()).collect(),
    };

    Ok(TweetRecord { tweet_id, user_id, created_at, text, urls, unparsed_urls, hashtags, city, user })
}

/// Serializes a record as one JSON line (no trailing newline). Canonical URLs
/// come first, followed by any that could not be canonicalized.
pub fn record_to_json(record: &TweetRecord) -> String {
    let out = WireTweetOut {
        tweet_id: &record.tweet_id,
        user_id: &record.user_id,
        created_at: format_timestamp(record.created_at),
        text: &record.text,
        urls: record.urls.iter().chain(&record.unparsed_urls).map(String::as_str).collect(),
        hashtags: &record.hashtags,
        city: record.city.as_str(),
        user: WireUserOut {
            screen_name: &record.user.screen_name,
            display_name: &record.user.display_name,
            followers_count: record.user.followers_count,
            friends_count: record.user.friends_count,
            verified: record.user.verified,
            account_created_at: format_timestamp(record.user.account_created_at),
        },
    };
    serde_json::to_string(&out).expect("plain data serializes")
}

pub fn write_records<W: Write>(mut w: W, records: &[TweetRecord]) -> io::Result<()> {
    for r in records {
        writeln!(w, "{}", record_to_json(r))?;
    }
    Ok(())
}

/// Reads a record stream. Read failures are fatal; bad lines are logged with
/// their 1-based line number and skipped.
pub fn parse_stream<R: Read>(source: R, config: &IngestConfig) -> io::Result<ParsedStream> {
    let mut reader = BufReader::new(source);
    let mut out = ParsedStream::default();
    let mut seen: HashSet<String> = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0u64;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let Ok(line) = std::str::from_utf8(&buf) else {
            out.errors.push(line_no, "line is not valid UTF-8");
            continue;
        };
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line) {
            Ok(record) => {
                if config.since.is_some_and(|s| record.created_at < s)
                    || config.until.is_some_and(|u| record.created_at >= u)
                {
                    continue;
                }
                if seen.insert(record.tweet_id.clone()) {
                    out.records.push(record);
                } else {
                    out.errors.push(line_no, format!("duplicate tweet_id {:?}, keeping first", record.tweet_id));
                }
            }
            Err(reason) => out.errors.push(line_no, reason),
        }
    }
    Ok(out)
}

pub fn read_stream_file(path: &Path, config: &IngestConfig) -> Result<ParsedStream> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_stream(file, config).map_err(|e| Error::io(path, e))
}

/// Reads a `city,date` CSV event calendar.
pub fn read_calendar<R: Read>(source: R, path: &Path) -> Result<EventCalendar> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    crate::formats::expect_header(&mut reader, &["city", "date"], path)?;
    let mut calendar = EventCalendar::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |m: String| Error::format(path, line, m);
        let city: City = row[0].parse().map_err(|e: polluter_core::record::UnknownCity| bad(e.to_string()))?;
        let day = parse_date(&row[1]).map_err(bad)?;
        calendar.insert(city, day);
    }
    Ok(calendar)
}

pub fn read_calendar_file(path: &Path) -> Result<EventCalendar> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_calendar(file, path)
}

pub fn write_calendar<W: Write>(w: W, calendar: &EventCalendar) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["city", "date"])?;
    for (city, day) in calendar.iter() {
        writer.write_record([city.as_str(), &day.to_string()])?;
    }
    writer.flush().map_err(|e| Error::io("<calendar>", e))?;
    Ok(())
}
