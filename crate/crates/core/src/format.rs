//! Reading and writing families in the line-oriented `.fam` format and in
//! JSON. Writers normalize vertex ids to `1..=n`.
//!
//! `.fam` grammar:
//!
//! ```text
//! # comment
//! k 4
//! b 1 2 3 4
//! b 1 5 6 7
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, ParseError, Result};
use crate::family::{SetFamily, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Fam,
    Json,
}

impl Format {
    /// `.json` selects JSON, anything else `.fam`.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Fam,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fam" => Ok(Format::Fam),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected fam or json)")),
        }
    }
}

pub fn parse_fam(text: &str) -> std::result::Result<SetFamily, ParseError> {
    let mut k: Option<usize> = None;
    let mut blocks: Vec<Vec<Vertex>> = Vec::new();
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("k") => {
                if k.is_some() {
                    return Err(ParseError::new(lineno, "duplicate header line"));
                }
                let value = tokens
                    .next()
                    .ok_or_else(|| ParseError::new(lineno, "header is missing the value of k"))?;
                let value: usize = value
                    .parse()
                    .map_err(|_| ParseError::new(lineno, format!("invalid k {value:?}")))?;
                if value == 0 {
                    return Err(ParseError::new(lineno, "k must be positive"));
                }
                if tokens.next().is_some() {
                    return Err(ParseError::new(lineno, "trailing tokens after k"));
                }
                k = Some(value);
            }
            Some("b") => {
                let k = k.ok_or_else(|| ParseError::new(lineno, "block line before the k header"))?;
                let mut block = Vec::with_capacity(k);
                for tok in tokens {
                    let v: Vertex = tok
                        .parse()
                        .map_err(|_| ParseError::new(lineno, format!("invalid vertex {tok:?}")))?;
                    if v == 0 {
                        return Err(ParseError::new(lineno, "vertex ids must be positive"));
                    }
                    block.push(v);
                }
                if block.len() != k {
                    return Err(ParseError::new(
                        lineno,
                        format!("block has {} vertices, expected {k}", block.len()),
                    ));
                }
                block.sort_unstable();
                if let Some(w) = block.windows(2).find(|w| w[0] == w[1]) {
                    return Err(ParseError::new(lineno, format!("vertex {} repeated in block", w[0])));
                }
                if !seen.insert(block.clone()) {
                    return Err(ParseError::new(lineno, "duplicate block"));
                }
                blocks.push(block);
            }
            Some(other) => {
                return Err(ParseError::new(lineno, format!("unknown line type {other:?}")));
            }
            None => unreachable!("blank lines are skipped"),
        }
    }

    let k = k.ok_or_else(|| ParseError::new(0, "missing `k <int>` header"))?;
    SetFamily::new(k, blocks).map_err(|e| ParseError::new(0, e.to_string()))
}

/// Writes `.fam` text with vertices normalized to `1..=n`.
pub fn to_fam(f: &SetFamily) -> String {
    let f = f.normalized();
    let mut out = String::new();
    if let Some(c) = f.comment() {
        for line in c.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str(&format!("k {}\n", f.k()));
    for b in f.blocks() {
        out.push('b');
        for v in b.vertices() {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyJson {
    k: i64,
    blocks: Vec<Vec<i64>>,
    #[serde(default)]
    comment: Option<String>,
}

pub fn parse_json(text: &str) -> std::result::Result<SetFamily, ParseError> {
    let raw: FamilyJson =
        serde_json::from_str(text).map_err(|e| ParseError::new(e.line(), e.to_string()))?;
    if raw.k <= 0 {
        return Err(ParseError::new(0, "k must be positive"));
    }
    let mut blocks = Vec::with_capacity(raw.blocks.len());
    for (i, b) in raw.blocks.iter().enumerate() {
        let mut block = Vec::with_capacity(b.len());
        for &v in b {
            if v <= 0 || v > Vertex::MAX as i64 {
                return Err(ParseError::new(0, format!("block {i}: invalid vertex id {v}")));
            }
            block.push(v as Vertex);
        }
        blocks.push(block);
    }
    let f = SetFamily::new(raw.k as usize, blocks).map_err(|e| ParseError::new(0, e.to_string()))?;
    Ok(match raw.comment {
        Some(c) => f.with_comment(c),
        None => f,
    })
}

/// Pretty JSON with vertices normalized to `1..=n`.
pub fn to_json(f: &SetFamily) -> String {
    let mut s = serde_json::to_string_pretty(&f.normalized()).expect("family serializes");
    s.push('\n');
    s
}

pub fn parse(text: &str, format: Format) -> std::result::Result<SetFamily, ParseError> {
    match format {
        Format::Fam => parse_fam(text),
        Format::Json => parse_json(text),
    }
}

pub fn render(f: &SetFamily, format: Format) -> String {
    match format {
        Format::Fam => to_fam(f),
        Format::Json => to_json(f),
    }
}

/// Reads a family; the format defaults to the one implied by the extension.
pub fn read_family(path: &Path, format: Option<Format>) -> Result<SetFamily> {
    let text = fs::read_to_string(path)?;
    let format = format.unwrap_or_else(|| Format::from_path(path));
    parse(&text, format).map_err(Error::from)
}

pub fn write_family(path: &Path, f: &SetFamily, format: Option<Format>) -> Result<()> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    fs::write(path, render(f, format))?;
    Ok(())
}
