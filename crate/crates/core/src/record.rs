//! The streamed tweet model.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::time::{Day, Timestamp};

/// Location label attached to each streamed tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum City {
    Adelaide,
    Brisbane,
    Melbourne,
    Perth,
    Sydney,
    Australia,
}

impl City {
    pub const ALL: [City; 6] =
        [City::Adelaide, City::Brisbane, City::Melbourne, City::Perth, City::Sydney, City::Australia];

    pub fn as_str(self) -> &'static str {
        match self {
            City::Adelaide => "Adelaide",
            City::Brisbane => "Brisbane",
            City::Melbourne => "Melbourne",
            City::Perth => "Perth",
            City::Sydney => "Sydney",
            City::Australia => "Australia",
        }
    }
}

impl fmt::Display for City {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCity(pub String);

impl fmt::Display for UnknownCity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown city {:?}", self.0)
    }
}

impl FromStr for City {
    type Err = UnknownCity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        City::ALL.into_iter().find(|c| c.as_str().eq_ignore_ascii_case(s.trim())).ok_or_else(|| UnknownCity(s.into()))
    }
}

/// Profile metadata embedded in every tweet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserSnapshot {
    pub screen_name: String,
    pub display_name: String,
    /// In-degree.
    pub followers_count: u64,
    /// Out-degree.
    pub friends_count: u64,
    pub verified: bool,
    pub account_created_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub user_id: String,
    pub created_at: Timestamp,
    pub text: String,
    /// Canonical URLs in the order they appeared.
    pub urls: Vec<String>,
    /// Raw URL strings that had no recognizable host. They still make the
    /// tweet a URL-bearing tweet.
    pub unparsed_urls: Vec<String>,
    pub hashtags: Vec<String>,
    pub city: City,
    pub user: UserSnapshot,
}

impl TweetRecord {
    pub fn has_url(&self) -> bool {
        !self.urls.is_empty() || !self.unparsed_urls.is_empty()
    }

    /// Canonical URLs of this tweet with repeats removed, sorted.
    pub fn distinct_urls(&self) -> Vec<&str> {
        let mut urls: Vec<&str> = self.urls.iter().map(String::as_str).collect();
        urls.sort_unstable();
        urls.dedup();
        urls
    }

    pub fn mentions(&self, url: &str) -> bool {
        self.urls.iter().any(|u| u == url)
    }
}

/// Ground-truth event dates per city.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventCalendar {
    entries: BTreeMap<City, BTreeSet<Day>>,
}

impl EventCalendar {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the date was already listed for the city.
    pub fn insert(&mut self, city: City, day: Day) -> bool {
        self.entries.entry(city).or_default().insert(day)
    }

    pub fn contains(&self, city: City, day: Day) -> bool {
        self.entries.get(&city).is_some_and(|days| days.contains(&day))
    }

    pub fn days(&self, city: City) -> impl Iterator<Item = Day> + '_ {
        self.entries.get(&city).into_iter().flatten().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (City, Day)> + '_ {
        self.entries.iter().flat_map(|(city, days)| days.iter().map(move |d| (*city, *d)))
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromIterator<(City, Day)> for EventCalendar {
    fn from_iter<T: IntoIterator<Item = (City, Day)>>(iter: T) -> Self {
        let mut calendar = EventCalendar::new();
        for (city, day) in iter {
            calendar.insert(city, day);
        }
        calendar
    }
}

/// Latest snapshot per user in stream order ("last snapshot wins").
pub fn latest_snapshots(records: &[TweetRecord]) -> BTreeMap<&str, &UserSnapshot> {
    let mut users = BTreeMap::new();
    for record in records {
        users.insert(record.user_id.as_str(), &record.user);
    }
    users
}
