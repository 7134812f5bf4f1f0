//! Text form of a truncated fan.
//!
//! ```text
//! # fanlab fan v1
//! variant = 1
//! family = canonical
//! depth = 2
//! breadth = 3
//! ---
//! s = [] ; phi = 1/1 ; Y = [1/3, 2/3]
//! s = [0] ; phi = 1/3 ; Y = [...]
//! ```
//!
//! An explicit family is written as `family = explicit` followed by one
//! `k = [p/q, ...]` line per member, in order. Rows follow `---` in θ-order
//! and must cover the window exactly.

use std::fmt::Write as _;

use crate::error::{FanError, Result};
use crate::fanmodel::{sum_fans, FanApprox, FanSpec, FanSum, Variant};
use crate::kfamily::{FamilySpec, FiniteCompactSet};
use crate::rat::Rat;
use crate::seqindex::{SeqIndex, TruncationBounds};

pub const FAN_HEADER: &str = "# fanlab fan v1";

pub fn write_fan(fan: &FanApprox) -> String {
    let spec = fan.spec();
    let mut out = String::new();
    writeln!(out, "{FAN_HEADER}").unwrap();
    writeln!(out, "variant = {}", spec.variant).unwrap();
    match &spec.family {
        FamilySpec::Canonical => writeln!(out, "family = canonical").unwrap(),
        FamilySpec::Explicit(members) => {
            writeln!(out, "family = explicit").unwrap();
            for k in members {
                writeln!(out, "k = {k}").unwrap();
            }
        }
    }
    writeln!(out, "depth = {}", spec.bounds.depth).unwrap();
    writeln!(out, "breadth = {}", spec.bounds.breadth).unwrap();
    writeln!(out, "---").unwrap();
    for e in fan.entries() {
        writeln!(out, "s = {} ; phi = {} ; Y = {}", e.s, e.phi, e.ys).unwrap();
    }
    out
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> FanError {
    FanError::Parse(format!("line {line}: {msg}"))
}

fn split_kv(line: &str, lineno: usize) -> Result<(&str, &str)> {
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| parse_err(lineno, format!("expected `key = value`, found `{line}`")))?;
    Ok((k.trim(), v.trim()))
}

fn parse_row(line: &str, lineno: usize) -> Result<(SeqIndex, Rat, FiniteCompactSet)> {
    let fields: Vec<&str> = line.split(';').collect();
    if fields.len() != 3 {
        return Err(parse_err(lineno, "expected `s = .. ; phi = .. ; Y = ..`"));
    }
    let mut s = None;
    let mut phi = None;
    let mut ys = None;
    for f in fields {
        let (k, v) = split_kv(f, lineno)?;
        let wrap = |e: FanError| parse_err(lineno, e);
        match k {
            "s" => s = Some(v.parse::<SeqIndex>().map_err(wrap)?),
            "phi" => phi = Some(v.parse::<Rat>().map_err(wrap)?),
            "Y" => ys = Some(v.parse::<FiniteCompactSet>().map_err(wrap)?),
            other => return Err(parse_err(lineno, format!("unknown field `{other}`"))),
        }
    }
    match (s, phi, ys) {
        (Some(s), Some(phi), Some(ys)) => Ok((s, phi, ys)),
        _ => Err(parse_err(lineno, "row is missing a field")),
    }
}

pub fn parse_fan(text: &str) -> Result<FanApprox> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, FAN_HEADER)) => {}
        _ => return Err(FanError::Parse(format!("missing header `{FAN_HEADER}`"))),
    }

    let mut variant = None;
    let mut family_kind = None;
    let mut members = Vec::new();
    let mut depth = None;
    let mut breadth = None;
    let mut saw_sep = false;
    for (n, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if line == "---" {
            saw_sep = true;
            break;
        }
        let (k, v) = split_kv(line, n)?;
        let wrap = |e: FanError| parse_err(n, e);
        match k {
            "variant" => variant = Some(v.parse::<Variant>().map_err(wrap)?),
            "family" => match v {
                "canonical" | "explicit" => family_kind = Some(v.to_string()),
                other => return Err(parse_err(n, format!("unknown family `{other}`"))),
            },
            "k" => members.push(v.parse::<FiniteCompactSet>().map_err(wrap)?),
            "depth" => depth = Some(v.parse::<usize>().map_err(|e| parse_err(n, e))?),
            "breadth" => breadth = Some(v.parse::<u32>().map_err(|e| parse_err(n, e))?),
            other => return Err(parse_err(n, format!("unknown key `{other}`"))),
        }
    }
    if !saw_sep {
        return Err(FanError::Parse("missing `---` separator".into()));
    }
    let (Some(variant), Some(kind), Some(depth), Some(breadth)) = (variant, family_kind, depth, breadth)
    else {
        return Err(FanError::Parse("spec block needs variant, family, depth and breadth".into()));
    };
    let family = match kind.as_str() {
        "canonical" if members.is_empty() => FamilySpec::Canonical,
        "canonical" => return Err(FanError::Parse("`k` lines need `family = explicit`".into())),
        _ => FamilySpec::Explicit(members),
    };
    let bounds = TruncationBounds::new(depth, breadth).map_err(|e| FanError::Parse(e.to_string()))?;
    let spec = FanSpec::new(variant, family, bounds).map_err(|e| FanError::Parse(e.to_string()))?;

    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        rows.push(parse_row(line, n)?);
    }
    FanApprox::from_rows(spec, rows).map_err(|e| FanError::Parse(e.to_string()))
}

pub const SUM_HEADER: &str = "# fanlab sum v1";

/// A sum is written as its summands, each introduced by
/// `=== part i ; slot = [lo, hi]`.
pub fn write_sum(sum: &FanSum) -> String {
    let mut out = String::new();
    writeln!(out, "{SUM_HEADER}").unwrap();
    writeln!(out, "parts = {}", sum.parts.len()).unwrap();
    for (i, (fan, slot)) in sum.parts.iter().zip(&sum.slots).enumerate() {
        writeln!(out, "=== part {i} ; slot = {slot}").unwrap();
        out.push_str(&write_fan(fan));
    }
    out
}

pub fn parse_sum(text: &str) -> Result<FanSum> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SUM_HEADER) {
        return Err(FanError::Parse(format!("missing header `{SUM_HEADER}`")));
    }
    let count: usize = lines
        .next()
        .and_then(|l| l.trim().strip_prefix("parts ="))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| FanError::Parse("expected `parts = N`".into()))?;
    let mut parts: Vec<String> = Vec::new();
    for line in lines {
        if line.starts_with("=== part ") {
            parts.push(String::new());
        } else if let Some(cur) = parts.last_mut() {
            cur.push_str(line);
            cur.push('\n');
        } else if !line.trim().is_empty() {
            return Err(FanError::Parse("content before the first part".into()));
        }
    }
    if parts.len() != count {
        return Err(FanError::Parse(format!("expected {count} parts, found {}", parts.len())));
    }
    let fans = parts.iter().map(|p| parse_fan(p)).collect::<Result<Vec<_>>>()?;
    sum_fans(&fans).map_err(|e| FanError::Parse(e.to_string()))
}
