//! The symbolically indexed Cantor set.
//!
//! Every finite index `s` owns a point `x_s` and a closed interval
//! `I_s = [x_s, b_s]`. Children are placed by geometric halving toward the
//! left endpoint: `x_{s⌢i} = x_s + (b_s − x_s)·2^{−(i+1)}`, so all
//! coordinates are dyadic. `I_{s⌢0}` reaches halfway to `b_s` and
//! `I_{s⌢i}` (for `i ≥ 1`) reaches halfway to `x_{s⌢(i−1)}`.

use std::fmt;

use crate::error::{FanError, Result};
use crate::rat::Rat;
use crate::seqindex::SeqIndex;

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self> {
        if lo >= hi {
            return Err(FanError::Invalid(format!("degenerate interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: Rat::zero(), hi: Rat::one() }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    /// The affine image of `self` under `[0,1] → target`.
    pub fn rescale(&self, target: &Interval) -> Interval {
        let w = target.width();
        Interval {
            lo: &target.lo + &(&w * &self.lo),
            hi: &target.lo + &(&w * &self.hi),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Left endpoint of the `i`-th child of an interval `[x, b]`.
fn child_point(parent: &Interval, i: u32) -> Rat {
    &parent.lo + &(&parent.width() * &Rat::pow2(-(i as i64 + 1)))
}

/// `I_{s⌢i}` given `I_s`.
pub fn child_interval(parent: &Interval, i: u32) -> Interval {
    let x = child_point(parent, i);
    let right = if i == 0 {
        &parent.hi
    } else {
        &child_point(parent, i - 1)
    };
    let hi = x.midpoint(right);
    Interval { lo: x, hi }
}

/// `I_s`.
pub fn interval(s: &SeqIndex) -> Interval {
    s.entries()
        .iter()
        .fold(Interval::unit(), |cur, &i| child_interval(&cur, i))
}

/// `x_s`, the left endpoint of `I_s`.
pub fn point(s: &SeqIndex) -> Rat {
    interval(s).lo
}

/// An interval containing `x_f` for every (finite or infinite) `f`
/// extending `prefix`.
pub fn branch_enclosure(prefix: &SeqIndex) -> Interval {
    interval(prefix)
}

/// Checks that `chain` is strictly increasing under extension.
pub fn check_chain(chain: &[SeqIndex]) -> Result<()> {
    for w in chain.windows(2) {
        if !w[0].is_proper_prefix_of(&w[1]) {
            return Err(FanError::NotAChain(format!("{} does not extend {}", w[1], w[0])));
        }
    }
    Ok(())
}

/// Criterion (a) on a finite window.
///
/// `branch_prefixes` describes `f` up to depth `D` (its longest element).
/// The sequence converges at window resolution iff the tail minimum of the
/// agreement depths `max{n : f↾n = s_k↾n}` reaches `D`.
pub fn converges_to_branch(seq: &[SeqIndex], branch_prefixes: &[SeqIndex]) -> Result<bool> {
    check_chain(branch_prefixes)?;
    let Some(f) = branch_prefixes.last() else {
        return Err(FanError::NotAChain("empty branch description".into()));
    };
    let Some(last) = seq.last() else {
        return Ok(false);
    };
    // tail minimum at the last position is just the last agreement depth
    Ok(f.agreement(last).min(f.len()) >= f.len())
}

/// Criterion (b) on a finite window.
pub fn converges_to_finite(seq: &[SeqIndex], s: &SeqIndex) -> bool {
    let depth = s.len();
    // start of the maximal final run of members (equal to or extending s)
    let start = seq
        .iter()
        .rposition(|t| !s.is_prefix_of(t))
        .map_or(0, |k| k + 1);
    let tail = &seq[start..];
    if tail.is_empty() {
        return false;
    }
    let child_idx: Vec<Option<u32>> = tail
        .iter()
        .map(|t| if t.len() > depth { Some(t.entries()[depth]) } else { None })
        .collect();
    if child_idx.iter().all(Option::is_none) {
        return true;
    }
    // tail minima, with `s` itself counting as +∞
    let mut tail_min = Vec::with_capacity(child_idx.len());
    let mut running: Option<u32> = None;
    for c in child_idx.iter().rev() {
        running = match (running, c) {
            (None, Some(c)) => Some(*c),
            (Some(r), Some(c)) => Some(r.min(*c)),
            (r, None) => r,
        };
        tail_min.push(running);
    }
    tail_min.reverse();
    let first = tail_min[0];
    let last = *tail_min.last().unwrap();
    match (first, last) {
        (Some(a), Some(b)) => b > a,
        (Some(_), None) => true,
        _ => false,
    }
}
