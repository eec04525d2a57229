//! IO side of the content-polluter detector: stream ingestion, time zones,
//! file formats, synthetic streams and the pipeline behind the `polluter`
//! command.

pub mod config;
pub mod dot;
mod error;
pub mod formats;
pub mod ingest;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
pub use polluter_core as core;
