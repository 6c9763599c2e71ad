//! The run record written next to every command's payload files.

use serde::Serialize;
use serde_json::value::RawValue;

pub const TOOL: &str = "kiq";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const ENVELOPE_FILE: &str = "envelope.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    /// Payload row the error belongs to; `None` for whole-run errors.
    pub row: Option<usize>,
    pub message: String,
}

/// Only `timestamp_utc` varies between identical runs.
#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RawValue,
    pub seed: Option<u64>,
    pub timestamp_utc: String,
    /// `None` only when the command produced no result at all.
    pub payload: Option<serde_json::Value>,
    pub errors: Vec<RowError>,
}

pub fn utc_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
