//! The distinguishing family `𝒦 = {K_n}`.
//!
//! Members are finite subsets of `(0,1)`. Two finite sets are order
//! isomorphic exactly when they have the same cardinality, so a family of
//! sets with pairwise distinct sizes is automatically admissible.
//!
//! `K_n` and its copies `Y_s` can have thousands of points, so a set is
//! either an explicit sorted list or the affine image of the canonical grid
//! `{(i+1)/(n+3) : i ≤ n+1}`, kept symbolically.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{FanError, Result};
use crate::rat::Rat;

#[derive(Clone)]
enum Repr {
    Explicit(Vec<Rat>),
    /// `{lo + (hi − lo)·(i+1)/(n+3) : 0 ≤ i ≤ n+1}`
    Grid { n: u64, lo: Rat, hi: Rat },
}

/// A strictly increasing finite set of rationals.
#[derive(Clone)]
pub struct FiniteCompactSet {
    repr: Repr,
}

impl FiniteCompactSet {
    /// Explicit set; rejects lists that are not strictly increasing.
    pub fn from_sorted(elems: Vec<Rat>) -> Result<Self> {
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FanError::Invalid("set elements must be strictly increasing".into()));
        }
        Ok(FiniteCompactSet { repr: Repr::Explicit(elems) })
    }

    pub fn empty() -> Self {
        FiniteCompactSet { repr: Repr::Explicit(Vec::new()) }
    }

    pub fn len(&self) -> u64 {
        match &self.repr {
            Repr::Explicit(v) => v.len() as u64,
            Repr::Grid { n, .. } => n + 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th smallest element.
    pub fn get(&self, i: u64) -> Option<Rat> {
        match &self.repr {
            Repr::Explicit(v) => v.get(i as usize).cloned(),
            Repr::Grid { n, lo, hi } => {
                if i >= n + 2 {
                    return None;
                }
                let step = Rat::from_big((i + 1).into(), (n + 3).into());
                Some(lo + &(&(hi - lo) * &step))
            }
        }
    }

    pub fn min(&self) -> Option<Rat> {
        self.get(0)
    }

    pub fn max(&self) -> Option<Rat> {
        self.len().checked_sub(1).and_then(|i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Rat> + '_ {
        (0..self.len()).map(move |i| self.get(i).expect("index in range"))
    }

    /// Position of `x` in the set, if present.
    pub fn index_of(&self, x: &Rat) -> Option<u64> {
        match &self.repr {
            Repr::Explicit(v) => v.binary_search(x).ok().map(|i| i as u64),
            Repr::Grid { n, lo, hi } => {
                // solve x = lo + (hi − lo)(i+1)/(n+3) for i
                let t = &(&(x - lo) / &(hi - lo)) * &Rat::from_big((n + 3).into(), 1.into());
                if !t.denom().is_one() {
                    return None;
                }
                let k = t.numer();
                if k < &BigInt::one() || k > &BigInt::from(n + 2) {
                    return None;
                }
                let k: u64 = k.try_into().ok()?;
                Some(k - 1)
            }
        }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.index_of(x).is_some()
    }

    /// True iff every element lies in the open interval `(lo, hi)`.
    pub fn is_within(&self, lo: &Rat, hi: &Rat) -> bool {
        match (self.min(), self.max()) {
            (Some(a), Some(b)) => lo < &a && &b < hi,
            _ => true,
        }
    }

    /// Exact distance from `x` to the nearest element.
    pub fn distance_to(&self, x: &Rat) -> Option<Rat> {
        if self.is_empty() {
            return None;
        }
        // binary search for the insertion point
        let (mut a, mut b) = (0u64, self.len());
        while a < b {
            let mid = a + (b - a) / 2;
            if &self.get(mid).unwrap() < x {
                a = mid + 1;
            } else {
                b = mid;
            }
        }
        let mut best: Option<Rat> = None;
        for i in [a.checked_sub(1), Some(a)].into_iter().flatten() {
            if let Some(y) = self.get(i) {
                let d = (&y - x).abs();
                if best.as_ref().is_none_or(|b| &d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    fn affine(&self, alpha: &Rat, beta: &Rat) -> Self {
        let w = beta - alpha;
        let map = |x: &Rat| alpha + &(&w * x);
        let repr = match &self.repr {
            Repr::Explicit(v) => Repr::Explicit(v.iter().map(map).collect()),
            Repr::Grid { n, lo, hi } => Repr::Grid { n: *n, lo: map(lo), hi: map(hi) },
        };
        FiniteCompactSet { repr }
    }

    /// Explicit copy of every element (use only for small sets).
    pub fn to_vec(&self) -> Vec<Rat> {
        self.iter().collect()
    }
}

impl PartialEq for FiniteCompactSet {
    /// Set equality.
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Explicit(a), Repr::Explicit(b)) => a == b,
            // a grid of known size is pinned down by its two extreme points
            (Repr::Grid { .. }, Repr::Grid { .. }) => {
                self.min() == other.min() && self.max() == other.max()
            }
            _ => self.iter().zip(other.iter()).all(|(a, b)| a == b),
        }
    }
}

impl Eq for FiniteCompactSet {}

impl fmt::Display for FiniteCompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, x) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for FiniteCompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Explicit(_) => write!(f, "{self}"),
            Repr::Grid { n, lo, hi } => write!(f, "grid(n={n}, lo={lo}, hi={hi})"),
        }
    }
}

impl FromStr for FiniteCompactSet {
    type Err = FanError;

    /// `[p/q, r/t, ...]`, sorted.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| FanError::Parse(format!("set must be bracketed: `{t}`")))?;
        if inner.trim().is_empty() {
            return Ok(FiniteCompactSet::empty());
        }
        let elems = inner
            .split(',')
            .map(str::parse::<Rat>)
            .collect::<Result<Vec<_>>>()?;
        FiniteCompactSet::from_sorted(elems).map_err(|e| FanError::Parse(e.to_string()))
    }
}

/// `K_n = {(i+1)/(n+3) : i = 0..=n+1}`.
pub fn canonical_k(n: u64) -> FiniteCompactSet {
    FiniteCompactSet { repr: Repr::Grid { n, lo: Rat::zero(), hi: Rat::one() } }
}

/// Order isomorphism of finite subsets of `(0,1)`.
pub fn order_isomorphic(a: &FiniteCompactSet, b: &FiniteCompactSet) -> bool {
    a.len() == b.len()
}

/// Affine copy `α + (β − α)·K` inside `(α, β)`.
pub fn embed(k: &FiniteCompactSet, alpha: &Rat, beta: &Rat) -> Result<FiniteCompactSet> {
    if alpha >= beta {
        return Err(FanError::Invalid(format!("empty target interval ({alpha}, {beta})")));
    }
    Ok(k.affine(alpha, beta))
}

/// Which family `𝒦` a fan realises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Canonical,
    /// A finite prefix `K_0, K_1, …` of an intended infinite family.
    Explicit(Vec<FiniteCompactSet>),
}

impl FamilySpec {
    pub fn member(&self, n: u64) -> Option<FiniteCompactSet> {
        match self {
            FamilySpec::Canonical => Some(canonical_k(n)),
            FamilySpec::Explicit(v) => v.get(n as usize).cloned(),
        }
    }

    /// Number of listed members; `None` for the infinite canonical family.
    pub fn available(&self) -> Option<usize> {
        match self {
            FamilySpec::Canonical => None,
            FamilySpec::Explicit(v) => Some(v.len()),
        }
    }

    pub fn contains_empty(&self) -> bool {
        match self {
            FamilySpec::Canonical => false,
            FamilySpec::Explicit(v) => v.iter().any(FiniteCompactSet::is_empty),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub checked: usize,
    /// First pair `(i, j)`, `i < j`, of order-isomorphic members.
    pub offending: Option<(usize, usize)>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.offending.is_none()
    }
}

/// Checks pairwise non-isomorphism of the first `upto` members.
pub fn verify_family(family: &FamilySpec, upto: usize) -> FamilyReport {
    let checked = family.available().map_or(upto, |a| a.min(upto));
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for j in 0..checked {
        let card = family.member(j as u64).expect("member within range").len();
        if let Some(&i) = seen.get(&card) {
            return FamilyReport { checked, offending: Some((i, j)) };
        }
        seen.insert(card, j);
    }
    FamilyReport { checked, offending: None }
}
