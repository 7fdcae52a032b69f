//! Reading and writing chains, instances, and solutions.
//!
//! Chains have two interchangeable on-disk forms:
//!
//! * plain text, one `x y` pair per line (blank lines and `#` comments
//!   are skipped), and
//! * a structured object `{"vertices": [[x, y], ...]}`.
//!
//! Values are written with the shortest decimal form that parses back to
//! the same number, so both formats round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geom::{Point2, PolyChain};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct ChainDef {
    vertices: Vec<(f64, f64)>,
}

/// Parses the plain text form.
pub fn parse_chain_text(text: &str) -> Result<PolyChain> {
    let mut pts = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::BadInput(format!("line {}: expected \"x y\", got {raw:?}", ln + 1));
        let mut it = line.split_whitespace();
        let x: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let y: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if it.next().is_some() {
            return Err(bad());
        }
        pts.push(Point2 { x, y });
    }
    PolyChain::new(pts)
}

/// Parses either form: the structured object when the first non-blank
/// byte is `{`, plain text otherwise.
pub fn parse_chain(text: &str) -> Result<PolyChain> {
    if text.trim_start().starts_with('{') {
        let def: ChainDef = serde_json::from_str(text)?;
        PolyChain::from_coords(&def.vertices)
    } else {
        parse_chain_text(text)
    }
}

pub fn read_chain(path: impl AsRef<Path>) -> Result<PolyChain> {
    parse_chain(&fs::read_to_string(path)?)
}

pub fn chain_to_text(chain: &PolyChain) -> String {
    let mut out = String::new();
    for v in chain.vertices() {
        writeln!(out, "{} {}", v.x, v.y).unwrap();
    }
    out
}

pub fn chain_to_json(chain: &PolyChain) -> String {
    serde_json::to_string(&ChainDef {
        vertices: chain.vertices().iter().map(|v| (v.x, v.y)).collect(),
    })
    .expect("chain serializes")
}

pub fn write_chain_text(path: impl AsRef<Path>, chain: &PolyChain) -> Result<()> {
    fs::write(path, chain_to_text(chain))?;
    Ok(())
}

/// Reads one JSON value (a solution, cover instance, or drawing).
pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
