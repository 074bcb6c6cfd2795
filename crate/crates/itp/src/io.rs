//! Instance and solution file formats.
//!
//! Instances are JSON documents:
//!
//! ```json
//! {
//!   "name": "tiny",
//!   "mode": "le",
//!   "m": 2, "n": 1,
//!   "cost": [[[1, 2]], [[3, 4]]],
//!   "supply": [[1, 2], [1, 2]],
//!   "demand": [[2, 3]]
//! }
//! ```
//!
//! Every interval is a `[lo, hi]` pair; `mode` is `"le"` for supply caps
//! or `"eq"` for exact depletion. Solutions are a bare JSON matrix of
//! shipped quantities. Bounds round-trip bit-exactly.

use std::fs;
use std::path::Path;

use crate::model::{validate_instance, Instance, ModelError, RawInstance, TransportPlan};

#[derive(Debug)]
pub enum ParseError {
    Io(std::io::Error),
    /// Malformed JSON, with the line/column context from the parser.
    Json { path: String, detail: String },
    /// Well-formed JSON that violates the instance invariants.
    Semantic { path: String, detail: ModelError },
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Io(e) => write!(f, "{e}"),
            ParseError::Json { path, detail } => write!(f, "{path}: {detail}"),
            ParseError::Semantic { path, detail } => write!(f, "{path}: {detail}"),
        }
    }
}

impl std::error::Error for ParseError {}

impl From<std::io::Error> for ParseError {
    fn from(e: std::io::Error) -> Self {
        ParseError::Io(e)
    }
}

/// Reads and validates an instance file.
pub fn parse_instance(path: impl AsRef<Path>) -> Result<Instance, ParseError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_instance_str(&text, &path.display().to_string())
}

/// Parses an instance from a JSON string; `origin` labels errors.
pub fn parse_instance_str(text: &str, origin: &str) -> Result<Instance, ParseError> {
    let raw: RawInstance = serde_json::from_str(text)
        .map_err(|e| ParseError::Json { path: origin.into(), detail: e.to_string() })?;
    validate_instance(raw)
        .map_err(|e| ParseError::Semantic { path: origin.into(), detail: e })
}

/// Writes an instance as pretty JSON; all bounds survive a round-trip
/// bit-exactly.
pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), ParseError> {
    let text = instance_to_string(inst);
    fs::write(path, text)?;
    Ok(())
}

pub fn instance_to_string(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&inst.to_raw()).expect("instances serialize");
    s.push('\n');
    s
}

/// Reads a solution file: a JSON matrix of shipped quantities.
pub fn parse_solution(path: impl AsRef<Path>) -> Result<TransportPlan, ParseError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
        .map_err(|e| ParseError::Json { path: path.display().to_string(), detail: e.to_string() })?;
    let n = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(ParseError::Json {
            path: path.display().to_string(),
            detail: "solution must be a non-empty rectangular matrix".into(),
        });
    }
    Ok(TransportPlan::new(rows))
}
