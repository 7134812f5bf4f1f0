//! Finite sequences of naturals and the enumeration `θ : ω^{<ω} → ω`.
//!
//! Sequences are ranked by the key `(weight, length, lexicographic)` where
//! `weight(s) = |s| + max_i s(i)` (and `weight(∅) = 0`). A proper extension
//! is strictly longer and has no smaller maximum, so its weight is strictly
//! larger: `θ` is monotone along extensions. Each weight class is finite and
//! its size has a closed form, so `θ` and its inverse are computed by
//! counting instead of enumerating.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::FanError;

/// A finite sequence `s ∈ ω^{<ω}`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SeqIndex(Vec<u32>);

impl SeqIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        SeqIndex(entries)
    }

    pub fn empty() -> Self {
        SeqIndex(Vec::new())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s↾n`; panics if `n > |s|`.
    pub fn prefix(&self, n: usize) -> SeqIndex {
        SeqIndex(self.0[..n].to_vec())
    }

    /// `s⌢i`.
    pub fn child(&self, i: u32) -> SeqIndex {
        let mut v = self.0.clone();
        v.push(i);
        SeqIndex(v)
    }

    /// `s↾(|s|-1)`, or `None` for `∅`.
    pub fn parent(&self) -> Option<SeqIndex> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.prefix(self.0.len() - 1))
        }
    }

    /// True iff `other` strictly extends `self`.
    pub fn is_proper_prefix_of(&self, other: &SeqIndex) -> bool {
        other.0.len() > self.0.len() && other.0.starts_with(&self.0)
    }

    /// True iff `other == self` or `other` extends `self`.
    pub fn is_prefix_of(&self, other: &SeqIndex) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Length of the longest common prefix.
    pub fn agreement(&self, other: &SeqIndex) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// `|s| + max s`, or 0 for the empty sequence.
    pub fn weight(&self) -> u64 {
        match self.0.iter().max() {
            None => 0,
            Some(&m) => self.0.len() as u64 + m as u64,
        }
    }

    pub fn theta(&self) -> u64 {
        theta(self)
    }

    /// All prefixes `s↾0, …, s↾|s|`.
    pub fn prefixes(&self) -> impl Iterator<Item = SeqIndex> + '_ {
        (0..=self.0.len()).map(move |n| self.prefix(n))
    }
}

impl Ord for SeqIndex {
    /// θ-order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then(self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SeqIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SeqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for SeqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SeqIndex {
    type Err = FanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| FanError::Parse(format!("sequence must be bracketed: `{t}`")))?;
        if inner.trim().is_empty() {
            return Ok(SeqIndex::empty());
        }
        inner
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| FanError::Parse(format!("bad sequence entry `{x}` in `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SeqIndex)
    }
}

impl From<Vec<u32>> for SeqIndex {
    fn from(v: Vec<u32>) -> Self {
        SeqIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for SeqIndex {
    fn from(v: [u32; N]) -> Self {
        SeqIndex(v.to_vec())
    }
}

/// True iff `s2` strictly extends `s1`.
pub fn extends(s1: &SeqIndex, s2: &SeqIndex) -> bool {
    s1.is_proper_prefix_of(s2)
}

fn pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).expect("theta: rank overflows u128")
}

/// Number of sequences of length `len ≥ 1` whose maximum is exactly `max`.
fn count_exact_max(len: u32, max: u128) -> u128 {
    pow(max + 1, len) - pow(max, len)
}

/// Number of sequences of length `len` and weight `w`.
fn count_len_weight(len: u32, w: u64) -> u128 {
    if len == 0 {
        return u128::from(w == 0);
    }
    if (len as u64) > w {
        return 0;
    }
    count_exact_max(len, (w - len as u64) as u128)
}

/// Number of sequences of weight exactly `w`.
pub fn count_weight(w: u64) -> u128 {
    if w == 0 {
        return 1;
    }
    (1..=w as u32).map(|len| count_len_weight(len, w)).sum()
}

/// Number of sequences of weight `< w`; equivalently θ of the first
/// sequence of weight `w`.
pub fn count_below_weight(w: u64) -> u128 {
    (0..w).map(count_weight).sum()
}

/// Completions of `rest` free positions over `[0, max]` such that the
/// whole sequence has maximum exactly `max`.
fn completions(rest: u32, max: u128, has_max: bool) -> u128 {
    if has_max {
        pow(max + 1, rest)
    } else {
        count_exact_max_or_empty(rest, max)
    }
}

fn count_exact_max_or_empty(rest: u32, max: u128) -> u128 {
    if rest == 0 {
        0
    } else {
        count_exact_max(rest, max)
    }
}

/// Rank of `s` under the `(weight, length, lex)` order.
pub fn theta(s: &SeqIndex) -> u64 {
    let w = s.weight();
    let len = s.len() as u32;
    if len == 0 {
        return 0;
    }
    let max = (w - len as u64) as u128;
    let mut rank = count_below_weight(w);
    rank += (1..len).map(|l| count_len_weight(l, w)).sum::<u128>();
    let mut has_max = false;
    for (i, &e) in s.entries().iter().enumerate() {
        let rest = len - i as u32 - 1;
        // every smaller digit is < max, so it never supplies the maximum
        rank += e as u128 * completions(rest, max, has_max);
        has_max |= e as u128 == max;
    }
    u64::try_from(rank).expect("theta: rank exceeds u64")
}

/// Inverse of [`theta`].
pub fn theta_inv(n: u64) -> SeqIndex {
    let mut rem = n as u128;
    let mut w = 0u64;
    loop {
        let c = count_weight(w);
        if rem < c {
            break;
        }
        rem -= c;
        w += 1;
    }
    if w == 0 {
        return SeqIndex::empty();
    }
    let mut len = 1u32;
    loop {
        let c = count_len_weight(len, w);
        if rem < c {
            break;
        }
        rem -= c;
        len += 1;
    }
    let max = (w - len as u64) as u128;
    let mut out = Vec::with_capacity(len as usize);
    let mut has_max = false;
    for i in 0..len {
        let rest = len - i - 1;
        let mut v = 0u128;
        loop {
            let c = completions(rest, max, has_max || v == max);
            if rem < c {
                break;
            }
            rem -= c;
            v += 1;
        }
        has_max |= v == max;
        out.push(v as u32);
    }
    SeqIndex(out)
}

/// Finite approximation window: sequences of length `≤ depth` with entries
/// `< breadth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncationBounds {
    pub depth: usize,
    pub breadth: u32,
}

impl TruncationBounds {
    /// Validated constructor: `depth ≥ 1`, `breadth ≥ 2`.
    pub fn new(depth: usize, breadth: u32) -> Result<Self, FanError> {
        if depth < 1 {
            return Err(FanError::Invalid("depth must be at least 1".into()));
        }
        if breadth < 2 {
            return Err(FanError::Invalid("breadth must be at least 2".into()));
        }
        Ok(TruncationBounds { depth, breadth })
    }

    pub fn contains(&self, s: &SeqIndex) -> bool {
        s.len() <= self.depth && s.entries().iter().all(|&e| e < self.breadth)
    }

    /// Every sequence in the window, in θ-order.
    pub fn enumerate(&self) -> Vec<SeqIndex> {
        enumerate(self)
    }

    /// Number of indices in the window.
    pub fn size(&self) -> usize {
        (0..=self.depth).map(|k| (self.breadth as usize).pow(k as u32)).sum()
    }
}

/// All `s` with `|s| ≤ depth` and entries `< breadth`, in θ-order.
pub fn enumerate(b: &TruncationBounds) -> Vec<SeqIndex> {
    let mut out = vec![SeqIndex::empty()];
    let mut frontier = vec![SeqIndex::empty()];
    for _ in 0..b.depth {
        let mut next = Vec::new();
        for s in &frontier {
            for i in 0..b.breadth {
                next.push(s.child(i));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> SeqIndex {
        SeqIndex::new(v.to_vec())
    }

    #[test]
    fn extends_examples() {
        assert!(extends(&s(&[]), &s(&[0])));
        assert!(extends(&s(&[1]), &s(&[1, 5])));
        assert!(!extends(&s(&[1]), &s(&[1])));
        assert!(!extends(&s(&[1, 5]), &s(&[1])));
        assert!(!extends(&s(&[2]), &s(&[1, 5])));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&s(&[])), 0);
        assert_eq!(theta(&s(&[0])), 1);
        assert_eq!(theta(&s(&[1])), 2);
        assert_eq!(theta(&s(&[0, 0])), 3);
    }

    #[test]
    fn theta_inv_examples() {
        assert_eq!(theta_inv(0), s(&[]));
        assert_eq!(theta_inv(1), s(&[0]));
        assert_eq!(theta_inv(3), s(&[0, 0]));
    }

    #[test]
    fn enumerate_examples() {
        let e = TruncationBounds { depth: 1, breadth: 2 }.enumerate();
        assert_eq!(e, vec![s(&[]), s(&[0]), s(&[1])]);
        let e = TruncationBounds { depth: 0, breadth: 2 }.enumerate();
        assert_eq!(e, vec![s(&[])]);
        let e = TruncationBounds { depth: 2, breadth: 1 }.enumerate();
        assert_eq!(e, vec![s(&[]), s(&[0]), s(&[0, 0])]);
    }

    #[test]
    fn bounds_validation() {
        assert!(TruncationBounds::new(0, 2).is_err());
        assert!(TruncationBounds::new(1, 1).is_err());
        assert!(TruncationBounds::new(1, 2).is_ok());
    }

    /// Brute-force oracle: list every sequence of weight ≤ w by generating
    /// all short sequences and sorting with an independent key.
    fn brute_order(max_w: u64) -> Vec<SeqIndex> {
        let mut all = vec![SeqIndex::empty()];
        let mut frontier = vec![SeqIndex::empty()];
        for _ in 0..max_w {
            let mut next = Vec::new();
            for t in &frontier {
                for i in 0..max_w as u32 {
                    next.push(t.child(i));
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        let key = |t: &SeqIndex| {
            let w = if t.is_empty() {
                0
            } else {
                t.len() as u64 + *t.entries().iter().max().unwrap() as u64
            };
            (w, t.len(), t.entries().to_vec())
        };
        let mut kept: Vec<_> = all.into_iter().filter(|t| key(t).0 <= max_w).collect();
        kept.sort_by_key(key);
        kept.dedup();
        kept
    }

    #[test]
    fn theta_matches_brute_force_rank() {
        let order = brute_order(5);
        for (rank, t) in order.iter().enumerate() {
            assert_eq!(theta(t), rank as u64, "theta({t})");
            assert_eq!(theta_inv(rank as u64), *t);
        }
        assert_eq!(count_below_weight(6), order.len() as u128);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("[1,0,3]".parse::<SeqIndex>().unwrap(), s(&[1, 0, 3]));
        assert_eq!("[ ]".parse::<SeqIndex>().unwrap(), s(&[]));
        assert_eq!(s(&[1, 0, 3]).to_string(), "[1,0,3]");
        assert_eq!(s(&[]).to_string(), "[]");
        assert!("1,2".parse::<SeqIndex>().is_err());
        assert!("[1,x]".parse::<SeqIndex>().is_err());
    }

    #[test]
    fn window_size_formula() {
        let b = TruncationBounds::new(4, 6).unwrap();
        assert_eq!(b.size(), 1555);
        assert_eq!(b.enumerate().len(), 1555);
    }
}
