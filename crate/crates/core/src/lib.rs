//! Detection of content-polluting bot accounts from partially observed tweet
//! streams.
//!
//! The crate holds the pure algorithmic pieces: URL canonicalization, the
//! user/day bipartite network and its co-tweet projection, Louvain
//! clustering, per-URL message-diversity statistics, signal aggregation and
//! the evaluation statistics. It is `no_std` and only needs an allocator;
//! parsing, time zones, file formats and the command line live in the
//! `polluter` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dense;
pub mod detector;
pub mod diversity;
mod error;
pub mod eval;
pub mod graph;
pub mod louvain;
pub mod record;
mod special;
pub mod stats;
mod time;
pub mod url;

pub use error::{Error, Result};
pub use record::{City, EventCalendar, TweetRecord, UserSnapshot};
pub use time::{Day, Timestamp, SECONDS_PER_DAY};
