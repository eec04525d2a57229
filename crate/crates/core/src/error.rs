use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation that needs at least `required` values got fewer.
    TooFewValues { required: usize, got: usize },
    /// A score list contained a negative or non-finite entry.
    InvalidScore { index: usize, value: f64 },
    /// The string has no recognizable host.
    NotAUrl(String),
    /// Event-day mode was requested without an event calendar.
    MissingCalendar,
    /// A sample has zero variance where a spread is required.
    DegenerateSample(&'static str),
    /// A numeric argument is outside its admissible range.
    OutOfRange { what: &'static str, value: f64 },
    /// An unknown account status code.
    UnknownStatusCode(i64),
    /// A timestamp precedes an account creation time it must follow.
    TimeOrder(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooFewValues { required, got } => {
                write!(f, "need at least {required} values, got {got}")
            }
            Error::InvalidScore { index, value } => {
                write!(f, "score {value} at position {index} is not a nonnegative finite number")
            }
            Error::NotAUrl(raw) => write!(f, "no recognizable host in {raw:?}"),
            Error::MissingCalendar => f.write_str("event-day mode requires an event calendar"),
            Error::DegenerateSample(why) => write!(f, "degenerate sample: {why}"),
            Error::OutOfRange { what, value } => write!(f, "{what} out of range: {value}"),
            Error::UnknownStatusCode(code) => write!(f, "unknown account status code {code}"),
            Error::TimeOrder(why) => f.write_str(why),
        }
    }
}

impl core::error::Error for Error {}
