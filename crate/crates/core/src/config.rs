//! Flat `key = value` job configuration.
//!
//! The same keys are accepted as command-line flags; flags override the
//! file. Lines starting with `#` are comments. Unknown keys are rejected.
//!
//! | key       | value                                      |
//! |-----------|--------------------------------------------|
//! | `variant` | `1`, `2` or `3`                            |
//! | `family`  | `canonical` or a path to a family file     |
//! | `depth`   | window depth, at least 1                   |
//! | `breadth` | window breadth, at least 2                 |
//! | `a0`      | locator height `p/q`                       |
//! | `u`       | `;`-separated indices, e.g. `[0]; [1,2]`   |
//! | `nmax`    | locator steps                              |
//! | `mode`    | `intervals` or `fan`                       |
//! | `input`   | `;`-separated input paths                  |
//! | `out`     | output path                                |
//! | `width`, `height`, `margin`, `stroke` | canvas settings |

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{FanError, Result};
use crate::fanmodel::{FanSpec, Variant};
use crate::kfamily::{FamilySpec, FiniteCompactSet};
use crate::rat::Rat;
use crate::render::{Canvas, RenderMode};
use crate::seqindex::{SeqIndex, TruncationBounds};

pub const KEYS: &[&str] = &[
    "variant", "family", "depth", "breadth", "a0", "u", "nmax", "mode", "input", "out", "width", "height",
    "margin", "stroke",
];

/// Raw key/value pairs, validated for known keys only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    pub values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RawConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| FanError::Parse(format!("config line {}: expected `key = value`", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(FanError::Invalid(format!("unknown config key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// `other` wins on conflicts.
    pub fn overlay(mut self, other: RawConfig) -> RawConfig {
        self.values.extend(other.values);
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySource {
    Canonical,
    File(PathBuf),
}

/// A validated job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobConfig {
    pub variant: Option<Variant>,
    pub family: FamilySource,
    pub depth: Option<usize>,
    pub breadth: Option<u32>,
    pub a0: Option<Rat>,
    pub u: Vec<SeqIndex>,
    pub nmax: usize,
    pub mode: Option<RenderMode>,
    pub input: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub canvas: Canvas,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| FanError::Invalid(format!("`{key}` expects a natural number, found `{v}`")))
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(';').map(str::trim).filter(|x| !x.is_empty())
}

impl JobConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let mut canvas = Canvas::default();
        if let Some(v) = raw.get("width") {
            canvas.width = parse_num("width", v)?;
        }
        if let Some(v) = raw.get("height") {
            canvas.height = parse_num("height", v)?;
        }
        if let Some(v) = raw.get("margin") {
            canvas.margin = parse_num("margin", v)?;
        }
        if let Some(v) = raw.get("stroke") {
            canvas.stroke = v.parse()?;
        }
        if 2 * canvas.margin >= canvas.width.min(canvas.height) || !canvas.stroke.is_positive() {
            return Err(FanError::Invalid("canvas margin, size or stroke out of range".into()));
        }
        let family = match raw.get("family") {
            None | Some("canonical") => FamilySource::Canonical,
            Some(path) => FamilySource::File(PathBuf::from(path)),
        };
        let a0 = raw.get("a0").map(str::parse::<Rat>).transpose()?;
        Ok(JobConfig {
            variant: raw.get("variant").map(str::parse).transpose()?,
            family,
            depth: raw.get("depth").map(|v| parse_num("depth", v)).transpose()?,
            breadth: raw.get("breadth").map(|v| parse_num("breadth", v)).transpose()?,
            a0,
            u: raw
                .get("u")
                .map(|v| split_list(v).map(str::parse).collect::<Result<Vec<SeqIndex>>>())
                .transpose()?
                .unwrap_or_default(),
            nmax: raw.get("nmax").map(|v| parse_num("nmax", v)).transpose()?.unwrap_or(20),
            mode: raw.get("mode").map(str::parse).transpose()?,
            input: raw
                .get("input")
                .map(|v| split_list(v).map(PathBuf::from).collect())
                .unwrap_or_default(),
            out: raw.get("out").map(PathBuf::from),
            canvas,
        })
    }

    pub fn bounds(&self) -> Result<TruncationBounds> {
        match (self.depth, self.breadth) {
            (Some(d), Some(b)) => TruncationBounds::new(d, b),
            _ => Err(FanError::Invalid("`depth` and `breadth` are required".into())),
        }
    }

    /// The `FanSpec` described by the job.
    pub fn spec(&self) -> Result<FanSpec> {
        let variant = self.variant.ok_or_else(|| FanError::Invalid("`variant` is required".into()))?;
        let family = match &self.family {
            FamilySource::Canonical => FamilySpec::Canonical,
            FamilySource::File(p) => load_family(p)?,
        };
        FanSpec::new(variant, family, self.bounds()?)
    }
}

/// A family file: one set `[p/q, ...]` per line, `K_0` first.
pub fn parse_family(text: &str) -> Result<FamilySpec> {
    let members = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse::<FiniteCompactSet>)
        .collect::<Result<Vec<_>>>()?;
    if members.is_empty() {
        return Err(FanError::Parse("family file lists no sets".into()));
    }
    Ok(FamilySpec::Explicit(members))
}

pub fn load_family(path: &Path) -> Result<FamilySpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| FanError::Invalid(format!("cannot read family file {}: {e}", path.display())))?;
    parse_family(&text)
}
