//! File formats for metric spaces.
//!
//! Two formats are supported:
//!
//! * JSON: `{"labels": ["p1", ...], "dist": [["0", "3/2", ...], ...]}`.
//!   Entries are rationals as strings (`"a/b"`, `"1.5"`) or bare JSON
//!   integer/decimal literals, parsed exactly from their source text.
//!   `labels` may be omitted, in which case `p1..pn` are assigned.
//! * plain text: one whitespace-separated matrix row per line.
//!
//! Both parsers reject NaN/infinite tokens and decimal exponents beyond the
//! supported range; neither ever rounds. Serialized output always carries
//! exact rationals as strings.

use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::rational::{ParseRationalError, Rational};
use crate::space::{FiniteMetricSpace, MetricError};

#[derive(Debug, Error)]
pub enum IoError {
    /// The input text could not be understood (exit code 2 territory).
    #[error("parse error: {0}")]
    Parse(String),
    /// The matrix parsed but violates the metric axioms (exit code 1).
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl From<ParseRationalError> for IoError {
    fn from(e: ParseRationalError) -> Self {
        IoError::Parse(e.to_string())
    }
}

impl Serialize for FiniteMetricSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FiniteMetricSpace", 2)?;
        s.serialize_field("labels", self.labels())?;
        let rows: Vec<Vec<String>> = self
            .matrix()
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect();
        s.serialize_field("dist", &rows)?;
        s.end()
    }
}

fn entry_to_rational(value: &Value, row: usize, col: usize) -> Result<Rational, IoError> {
    let text = match value {
        Value::String(s) => s.clone(),
        // arbitrary_precision keeps the literal text, so this is exact
        Value::Number(n) => n.to_string(),
        other => {
            return Err(IoError::Parse(format!(
                "dist[{row}][{col}]: expected a rational string or number, got {other}"
            )))
        }
    };
    text.parse::<Rational>()
        .map_err(|e| IoError::Parse(format!("dist[{row}][{col}]: {e}")))
}

/// Parses the JSON space format.
pub fn parse_json_space(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| IoError::Parse("top level must be an object".into()))?;
    let dist_value = obj
        .get("dist")
        .ok_or_else(|| IoError::Parse("missing `dist` field".into()))?;
    let rows_value = dist_value
        .as_array()
        .ok_or_else(|| IoError::Parse("`dist` must be an array of rows".into()))?;
    let mut dist = Vec::with_capacity(rows_value.len());
    for (i, row_value) in rows_value.iter().enumerate() {
        let row = row_value
            .as_array()
            .ok_or_else(|| IoError::Parse(format!("dist[{i}] must be an array")))?;
        let mut parsed = Vec::with_capacity(row.len());
        for (j, entry) in row.iter().enumerate() {
            parsed.push(entry_to_rational(entry, i, j)?);
        }
        dist.push(parsed);
    }
    let labels = match obj.get("labels") {
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| IoError::Parse("labels must be strings".into()))
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(IoError::Parse("`labels` must be an array".into())),
        None => default_labels(dist.len()),
    };
    Ok(FiniteMetricSpace::new(labels, dist)?)
}

/// Parses the whitespace-separated matrix format. Blank lines are ignored.
pub fn parse_matrix_space(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let mut dist: Vec<Vec<Rational>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            row.push(token.parse::<Rational>().map_err(|e| {
                IoError::Parse(format!("line {}: token `{token}`: {e}", lineno + 1))
            })?);
        }
        dist.push(row);
    }
    if dist.is_empty() {
        return Err(IoError::Parse("empty matrix".into()));
    }
    let labels = default_labels(dist.len());
    Ok(FiniteMetricSpace::new(labels, dist)?)
}

/// Sniffs the format: JSON when the first non-blank character is `{`.
pub fn parse_space_auto(text: &str) -> Result<FiniteMetricSpace, IoError> {
    if text.trim_start().starts_with('{') {
        parse_json_space(text)
    } else {
        parse_matrix_space(text)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

/// Pretty JSON with exact rationals as strings.
pub fn write_json_space(space: &FiniteMetricSpace) -> String {
    serde_json::to_string_pretty(space).expect("space serialization cannot fail")
}

/// Whitespace-separated matrix of exact rational tokens.
pub fn write_matrix_space(space: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    for row in space.matrix() {
        let tokens: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    out
}
