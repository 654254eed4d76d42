//! Text and JSON forms of 8-bit lookup tables.
//!
//! - grid: a header line `   0  1 .. f`, then 16 lines `r  xx xx ..` where
//!   `r` is the high nibble of the input and columns run over the low nibble.
//! - line: 512 lowercase hex characters.
//! - json: `{ "table": "<line form>", "provenance": {..} }`.
//!
//! The parser accepts any of the three, plus 256 bare hex tokens separated by
//! whitespace or commas.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{CriteriaReport, VectorialFn};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("expected 256 table entries, found {0}")]
    WrongCount(usize),
    #[error("invalid hex token {0:?}")]
    BadToken(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unknown format {0:?} (expected grid, line, json or csv)")]
    UnknownFormat(String),
}

/// Where a table came from. Every field is optional so builtins, parsed files
/// and search results share one shape.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub semifield_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub semifield_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inverse_side: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scaling: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grouping: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub whitening: Option<u8>,
}

impl Provenance {
    pub fn named(name: &str) -> Self {
        Provenance {
            name: Some(name.to_string()),
            ..Default::default()
        }
    }

    pub const CSV_HEADER: &'static str =
        "name,kind,semifield_id,semifield_digest,alpha,beta,inverse_side,scaling,grouping,whitening";

    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        [
            opt(&self.name),
            opt(&self.kind),
            opt(&self.semifield_id),
            opt(&self.semifield_digest),
            opt(&self.alpha),
            opt(&self.beta),
            opt(&self.inverse_side),
            opt(&self.scaling),
            opt(&self.grouping),
            opt(&self.whitening),
        ]
        .join(",")
    }
}

/// A table with its provenance, as written by `build` and read by `evaluate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SboxDocument {
    pub table: String,
    #[serde(default)]
    pub provenance: Provenance,
}

/// A criteria report flattened together with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    #[serde(flatten)]
    pub report: CriteriaReport,
    #[serde(flatten)]
    pub provenance: Provenance,
}

impl ReportRecord {
    pub fn csv_header() -> String {
        format!("{},{}", CriteriaReport::CSV_HEADER, Provenance::CSV_HEADER)
    }

    pub fn csv_row(&self) -> String {
        format!("{},{}", self.report.csv_row(), self.provenance.csv_row())
    }
}

pub fn to_grid(f: &VectorialFn) -> String {
    let mut out = String::from("  ");
    for c in 0..16 {
        write!(out, "  {c:x}").unwrap();
    }
    out.push('\n');
    for (r, row) in f.table().chunks(16).enumerate() {
        write!(out, "{r:x} ").unwrap();
        for v in row {
            write!(out, " {v:02x}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn to_line(f: &VectorialFn) -> String {
    f.table().iter().map(|v| format!("{v:02x}")).collect()
}

pub fn to_json(f: &VectorialFn, provenance: &Provenance) -> String {
    let doc = SboxDocument {
        table: to_line(f),
        provenance: provenance.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

fn parse_hex_byte(tok: &str) -> Result<u8, FormatError> {
    let t = tok.strip_prefix("0x").unwrap_or(tok);
    if t.is_empty() || t.len() > 2 {
        return Err(FormatError::BadToken(tok.to_string()));
    }
    u8::from_str_radix(t, 16).map_err(|_| FormatError::BadToken(tok.to_string()))
}

fn parse_line(s: &str) -> Result<Vec<u8>, FormatError> {
    if s.len() != 512 {
        return Err(FormatError::WrongCount(s.len() / 2));
    }
    (0..256).map(|i| parse_hex_byte(&s[2 * i..2 * i + 2])).collect()
}

/// Parses a table in any supported text form, returning provenance when the
/// input was a JSON document.
pub fn parse_table(text: &str) -> Result<(VectorialFn, Provenance), FormatError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let doc: SboxDocument =
            serde_json::from_str(trimmed).map_err(|e| FormatError::Json(e.to_string()))?;
        let table = parse_line(doc.table.trim())?;
        return Ok((finish(table)?, doc.provenance));
    }
    if !trimmed.contains(char::is_whitespace) && !trimmed.contains(',') {
        return Ok((finish(parse_line(trimmed)?)?, Provenance::default()));
    }

    let mut values = Vec::with_capacity(256);
    for line in trimmed.lines() {
        let toks: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',' || c == '|')
            .filter(|t| !t.is_empty())
            .collect();
        if toks.is_empty() || is_grid_header(&toks) {
            continue;
        }
        // grid rows carry a one-character row label
        let body = if toks.len() == 17 && toks[0].len() == 1 {
            &toks[1..]
        } else {
            &toks[..]
        };
        for t in body {
            values.push(parse_hex_byte(t)?);
        }
    }
    Ok((finish(values)?, Provenance::default()))
}

fn is_grid_header(toks: &[&str]) -> bool {
    toks.len() == 16
        && toks
            .iter()
            .enumerate()
            .all(|(i, t)| *t == format!("{i:x}"))
}

fn finish(values: Vec<u8>) -> Result<VectorialFn, FormatError> {
    if values.len() != 256 {
        return Err(FormatError::WrongCount(values.len()));
    }
    Ok(VectorialFn::from_table(values).expect("256 entries"))
}

/// Output formats for a single table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Grid,
    Line,
    Json,
    Csv,
}

impl std::str::FromStr for TableFormat {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(TableFormat::Grid),
            "line" => Ok(TableFormat::Line),
            "json" => Ok(TableFormat::Json),
            "csv" => Ok(TableFormat::Csv),
            other => Err(FormatError::UnknownFormat(other.to_string())),
        }
    }
}
