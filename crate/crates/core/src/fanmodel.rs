//! Truncated 𝒦-fans.
//!
//! A fan is stored as the table `s ↦ (φ(x_s), Y_s)` over a finite window of
//! indices. `φ(x_∅) = 1`; each `Y_s` is an affine copy of `K_{θ(s)}` placed
//! according to the variant, and the children of `s` take their values from
//! a fixed ascending cycle:
//!
//! | variant | `Y_s` lies in                          | cycle of child values |
//! |---------|-----------------------------------------|-----------------------|
//! | V1      | `(0, m)`                                | `Y_s`                 |
//! | V2      | `(φ(x_s) − m, φ(x_s))`                  | `Y_s ∪ {φ(x_s)}`      |
//! | V3      | `(0, m)`                                | `Y_s ∪ {φ(x_s)}`      |
//!
//! with `m = min{φ(x_s), 2^{−θ(s)}}`. Child `s⌢i` receives the
//! `(i mod |cycle|)`-th element of the cycle, so every value recurs in every
//! tail of the schedule.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::cantor::{self, Interval};
use crate::error::{FanError, Result};
use crate::kfamily::{embed, verify_family, FamilySpec, FiniteCompactSet};
use crate::rat::Rat;
use crate::seqindex::{SeqIndex, TruncationBounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Endpoints form a countable discrete space.
    V1,
    /// Endpoints form a copy of the irrationals.
    V2,
    /// Endpoints form a copy of `C × ℕ`.
    V3,
}

impl Variant {
    /// Whether the child schedule repeats the parent value.
    pub fn cycle_includes_parent(self) -> bool {
        !matches!(self, Variant::V1)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Variant::V1 => 1,
            Variant::V2 => 2,
            Variant::V3 => 3,
        };
        write!(f, "{n}")
    }
}

impl FromStr for Variant {
    type Err = FanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "V1" | "v1" => Ok(Variant::V1),
            "2" | "V2" | "v2" => Ok(Variant::V2),
            "3" | "V3" | "v3" => Ok(Variant::V3),
            other => Err(FanError::Invalid(format!("unknown variant `{other}` (expected 1, 2 or 3)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanSpec {
    pub variant: Variant,
    pub family: FamilySpec,
    pub bounds: TruncationBounds,
}

impl FanSpec {
    pub fn new(variant: Variant, family: FamilySpec, bounds: TruncationBounds) -> Result<Self> {
        let bounds = TruncationBounds::new(bounds.depth, bounds.breadth)?;
        if variant == Variant::V1 && family.contains_empty() {
            return Err(FanError::Invalid("variant 1 needs a family without the empty set".into()));
        }
        Ok(FanSpec { variant, family, bounds })
    }

    pub fn canonical(variant: Variant, depth: usize, breadth: u32) -> Result<Self> {
        FanSpec::new(variant, FamilySpec::Canonical, TruncationBounds::new(depth, breadth)?)
    }
}

/// One window index with its stored data.
#[derive(Clone, Debug)]
pub struct Entry {
    pub s: SeqIndex,
    pub theta: u64,
    pub interval: Interval,
    pub phi: Rat,
    pub ys: FiniteCompactSet,
}

impl Entry {
    pub fn x(&self) -> &Rat {
        &self.interval.lo
    }
}

/// A point `⟨x, y⟩` of `C × [0,1]`; `y = 0` stands for the vertex class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanPoint {
    pub x: Rat,
    pub y: Rat,
}

#[derive(Clone, Debug)]
pub struct FanApprox {
    spec: FanSpec,
    entries: Vec<Entry>,
    by_index: HashMap<SeqIndex, usize>,
    by_point: HashMap<Rat, usize>,
}

/// The open interval that must contain `Y_s`.
pub fn y_target(variant: Variant, phi: &Rat, theta: u64) -> (Rat, Rat) {
    let cap = Rat::pow2(-(theta as i64));
    let m = phi.min(&cap).clone();
    match variant {
        Variant::V1 | Variant::V3 => (Rat::zero(), m),
        Variant::V2 => (phi - &m, phi.clone()),
    }
}

/// Length of the child-value cycle of an index with the given `Y_s`.
pub fn cycle_len(variant: Variant, ys: &FiniteCompactSet) -> u64 {
    ys.len() + u64::from(variant.cycle_includes_parent())
}

/// Value the schedule assigns to the `i`-th child.
pub fn schedule_value(variant: Variant, phi: &Rat, ys: &FiniteCompactSet, i: u32) -> Option<Rat> {
    let len = cycle_len(variant, ys);
    if len == 0 {
        return None;
    }
    let j = i as u64 % len;
    if j < ys.len() {
        ys.get(j)
    } else {
        Some(phi.clone())
    }
}

/// Builds the truncated fan for `spec`.
pub fn build_kfan(spec: &FanSpec) -> Result<FanApprox> {
    let spec = FanSpec::new(spec.variant, spec.family.clone(), spec.bounds)?;
    let window = spec.bounds.enumerate();
    let max_theta = window.iter().map(SeqIndex::theta).max().unwrap_or(0);
    if let Some(avail) = spec.family.available() {
        if (avail as u64) <= max_theta {
            return Err(FanError::FamilyTooShort { needed: max_theta, available: avail });
        }
    }
    let report = verify_family(&spec.family, max_theta as usize + 1);
    if let Some((i, j)) = report.offending {
        return Err(FanError::Invalid(format!("family members K_{i} and K_{j} are order isomorphic")));
    }

    let mut rows: Vec<(SeqIndex, Rat, FiniteCompactSet)> = Vec::with_capacity(window.len());
    let mut pos: HashMap<SeqIndex, usize> = HashMap::with_capacity(window.len());
    for s in window {
        let phi = match s.parent() {
            None => Rat::one(),
            Some(p) => {
                let (_, pphi, pys) = &rows[pos[&p]];
                let last = *s.entries().last().unwrap();
                schedule_value(spec.variant, pphi, pys, last)
                    .ok_or_else(|| FanError::Invalid(format!("empty schedule at {p}")))?
            }
        };
        let theta = s.theta();
        let k = spec.family.member(theta).expect("family length checked");
        let (lo, hi) = y_target(spec.variant, &phi, theta);
        let ys = embed(&k, &lo, &hi)?;
        pos.insert(s.clone(), rows.len());
        rows.push((s, phi, ys));
    }
    FanApprox::from_rows(spec, rows)
}

impl FanApprox {
    /// Assembles a fan from raw rows; the rows must cover the window exactly
    /// once, in θ-order. Values are not checked against the construction.
    pub fn from_rows(spec: FanSpec, rows: Vec<(SeqIndex, Rat, FiniteCompactSet)>) -> Result<Self> {
        let window = spec.bounds.enumerate();
        if rows.len() != window.len() {
            return Err(FanError::Invalid(format!(
                "window has {} indices but {} rows were given",
                window.len(),
                rows.len()
            )));
        }
        let mut entries = Vec::with_capacity(rows.len());
        let mut by_index = HashMap::with_capacity(rows.len());
        let mut by_point = HashMap::with_capacity(rows.len());
        for (k, ((s, phi, ys), expect)) in rows.into_iter().zip(window).enumerate() {
            if s != expect {
                return Err(FanError::Invalid(format!("row {k}: expected index {expect}, found {s}")));
            }
            let interval = cantor::interval(&s);
            by_point.insert(interval.lo.clone(), k);
            by_index.insert(s.clone(), k);
            entries.push(Entry { theta: s.theta(), s, interval, phi, ys });
        }
        Ok(FanApprox { spec, entries, by_index, by_point })
    }

    /// The degenerate fan with `φ ≡ value` on the window: every `Y_s` is
    /// empty, so the repeating schedule keeps the value constant.
    pub fn constant(bounds: TruncationBounds, value: Rat) -> Result<Self> {
        let window = bounds.enumerate();
        let max_theta = window.iter().map(SeqIndex::theta).max().unwrap_or(0);
        let family = FamilySpec::Explicit(vec![FiniteCompactSet::empty(); max_theta as usize + 1]);
        let spec = FanSpec { variant: Variant::V2, family, bounds };
        let rows = window
            .into_iter()
            .map(|s| (s, value.clone(), FiniteCompactSet::empty()))
            .collect();
        FanApprox::from_rows(spec, rows)
    }

    pub fn spec(&self) -> &FanSpec {
        &self.spec
    }

    pub fn variant(&self) -> Variant {
        self.spec.variant
    }

    pub fn bounds(&self) -> TruncationBounds {
        self.spec.bounds
    }

    /// Entries in θ-order.
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, s: &SeqIndex) -> Option<&Entry> {
        self.by_index.get(s).map(|&k| &self.entries[k])
    }

    pub fn entry(&self, s: &SeqIndex) -> Result<&Entry> {
        self.get(s).ok_or_else(|| FanError::NotInWindow(s.to_string()))
    }

    pub fn phi(&self, s: &SeqIndex) -> Option<&Rat> {
        self.get(s).map(|e| &e.phi)
    }

    pub fn ys(&self, s: &SeqIndex) -> Option<&FiniteCompactSet> {
        self.get(s).map(|e| &e.ys)
    }

    pub fn lookup_point(&self, x: &Rat) -> Option<&Entry> {
        self.by_point.get(x).map(|&k| &self.entries[k])
    }

    /// `n ↦ θ⁻¹(n)` for every leg in the window.
    pub fn legs(&self) -> Vec<(u64, SeqIndex)> {
        let mut v: Vec<_> = self.entries.iter().map(|e| (e.theta, e.s.clone())).collect();
        v.sort();
        v
    }

    /// Window children of `s`, in child order.
    pub fn children<'a>(&'a self, s: &'a SeqIndex) -> impl Iterator<Item = &'a Entry> + 'a {
        let depth_ok = s.len() < self.spec.bounds.depth;
        (0..self.spec.bounds.breadth)
            .filter(move |_| depth_ok)
            .filter_map(move |i| self.get(&s.child(i)))
    }

    /// Window entries strictly extending `s`.
    pub fn descendants<'a>(&'a self, s: &'a SeqIndex) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| s.is_proper_prefix_of(&e.s))
    }

    /// Whether `s` has children outside the window (always true: entries
    /// beyond `breadth` are never stored).
    pub fn is_leaf(&self, s: &SeqIndex) -> bool {
        s.len() >= self.spec.bounds.depth
    }

    /// The schedule's value for child `i` of `s`, inside or outside the window.
    pub fn scheduled_child_value(&self, s: &SeqIndex, i: u32) -> Option<Rat> {
        let e = self.get(s)?;
        schedule_value(self.spec.variant, &e.phi, &e.ys, i)
    }

    /// Copy with `φ(x_s)` replaced.
    pub fn with_phi(&self, s: &SeqIndex, phi: Rat) -> Result<Self> {
        let mut out = self.clone();
        let k = *out.by_index.get(s).ok_or_else(|| FanError::NotInWindow(s.to_string()))?;
        out.entries[k].phi = phi;
        Ok(out)
    }

    /// Copy with `Y_s` replaced.
    pub fn with_ys(&self, s: &SeqIndex, ys: FiniteCompactSet) -> Result<Self> {
        let mut out = self.clone();
        let k = *out.by_index.get(s).ok_or_else(|| FanError::NotInWindow(s.to_string()))?;
        out.entries[k].ys = ys;
        Ok(out)
    }
}

/// What a finite chain says about `φ(x_f)` on the branch it describes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchValue {
    /// V1: `φ(x_f) = 0`. `bound_exp = Some(k)` certifies the last chain
    /// value is already below `2^{−k}` with `k = θ` of its parent.
    Zero { last_value: Rat, bound_exp: Option<u64> },
    /// The schedule kept the value on the final step.
    Constant(Rat),
    /// `φ(x_f) ∈ [lo, hi]`.
    Enclosure { lo: Rat, hi: Rat },
}

impl BranchValue {
    pub fn is_certified_positive(&self) -> bool {
        match self {
            BranchValue::Zero { .. } => false,
            BranchValue::Constant(v) => v.is_positive(),
            BranchValue::Enclosure { lo, .. } => lo.is_positive(),
        }
    }

    /// Closed enclosure of the branch value.
    pub fn enclosure(&self) -> (Rat, Rat) {
        match self {
            BranchValue::Zero { .. } => (Rat::zero(), Rat::zero()),
            BranchValue::Constant(v) => (v.clone(), v.clone()),
            BranchValue::Enclosure { lo, hi } => (lo.clone(), hi.clone()),
        }
    }
}

fn check_chain_in_window<'a>(fan: &'a FanApprox, chain: &[SeqIndex]) -> Result<&'a Entry> {
    cantor::check_chain(chain)?;
    let last = chain
        .last()
        .ok_or_else(|| FanError::NotAChain("empty chain".into()))?;
    for s in chain {
        fan.entry(s)?;
    }
    fan.entry(last)
}

/// `φ(x_f)` for the branch `f` described by `chain`.
pub fn phi_branch_value(fan: &FanApprox, chain: &[SeqIndex]) -> Result<BranchValue> {
    let last = check_chain_in_window(fan, chain)?;
    let parent = last.s.parent().and_then(|p| fan.get(&p));
    match fan.variant() {
        Variant::V1 => {
            let bound_exp = match parent {
                Some(p) => {
                    if !last.phi.lt_pow2(-(p.theta as i64)) {
                        return Err(FanError::Uncertified(format!(
                            "φ(x_{}) = {} is not below 2^-{}",
                            last.s, last.phi, p.theta
                        )));
                    }
                    Some(p.theta)
                }
                None => None,
            };
            Ok(BranchValue::Zero { last_value: last.phi.clone(), bound_exp })
        }
        v @ (Variant::V2 | Variant::V3) => {
            if let Some(p) = parent {
                if p.phi == last.phi {
                    return Ok(BranchValue::Constant(last.phi.clone()));
                }
            }
            let lo = if v == Variant::V2 {
                let drop = Rat::pow2(1 - last.theta as i64);
                let lo = &last.phi - &drop;
                if lo.is_positive() {
                    lo
                } else {
                    Rat::zero()
                }
            } else {
                Rat::zero()
            };
            Ok(BranchValue::Enclosure { lo, hi: last.phi.clone() })
        }
    }
}

/// Membership of `p` in the hypograph `L₀^φ`.
pub fn in_l0(fan: &FanApprox, p: &FanPoint) -> Result<bool> {
    let e = fan
        .lookup_point(&p.x)
        .ok_or_else(|| FanError::UnknownCoordinate(p.x.to_string()))?;
    Ok(!p.y.is_negative() && p.y <= e.phi)
}

/// Window endpoints `(s, φ(x_s))` with `φ(x_s) > 0`, in θ-order.
pub fn endpoints(fan: &FanApprox) -> Vec<(SeqIndex, Rat)> {
    fan.entries
        .iter()
        .filter(|e| e.phi.is_positive())
        .map(|e| (e.s.clone(), e.phi.clone()))
        .collect()
}

/// A finite sum of fans: summand `i` is rescaled into its own clopen slot of
/// `[0,1]` and all vertices are identified.
#[derive(Clone, Debug)]
pub struct FanSum {
    pub parts: Vec<FanApprox>,
    pub slots: Vec<Interval>,
}

/// Slot `[1 − 2^{−i}, 1 − 3·2^{−(i+2)}]`; slots are disjoint, accumulate at
/// 1 and have diameters `2^{−(i+2)}`.
pub fn sum_slot(i: usize) -> Interval {
    let i = i as i64;
    Interval {
        lo: Rat::one() - Rat::pow2(-i),
        hi: Rat::one() - Rat::from_int(3) * Rat::pow2(-(i + 2)),
    }
}

pub fn sum_fans(fans: &[FanApprox]) -> Result<FanSum> {
    if fans.is_empty() {
        return Err(FanError::Invalid("a sum needs at least one fan".into()));
    }
    Ok(FanSum {
        parts: fans.to_vec(),
        slots: (0..fans.len()).map(sum_slot).collect(),
    })
}

/// An endpoint of a sum: summand, index, rescaled coordinate, height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumEndpoint {
    pub summand: usize,
    pub s: SeqIndex,
    pub x: Rat,
    pub phi: Rat,
}

impl FanSum {
    /// Cantor coordinate of `x_s` of summand `i` inside the sum.
    pub fn x(&self, i: usize, s: &SeqIndex) -> Rat {
        let slot = &self.slots[i];
        &slot.lo + &(&slot.width() * &cantor::point(s))
    }

    pub fn endpoints(&self) -> Vec<SumEndpoint> {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, fan)| {
                endpoints(fan).into_iter().map(move |(s, phi)| SumEndpoint {
                    summand: i,
                    x: self.x(i, &s),
                    s,
                    phi,
                })
            })
            .collect()
    }
}

/// A sequence `x_{s_k}` with its claimed limit.
#[derive(Clone, Debug)]
pub enum Witness {
    /// Converges to `x_limit` by criterion (b).
    Finite { seq: Vec<SeqIndex>, limit: SeqIndex },
    /// Converges to `x_f` by criterion (a); `chain` lists prefixes of `f`.
    Branch { seq: Vec<SeqIndex>, chain: Vec<SeqIndex> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    Pass { limsup: Rat, bound: Rat },
    NotConvergent,
    Violation { k: usize, detail: String },
}

#[derive(Clone, Debug)]
pub struct UscReport {
    pub outcomes: Vec<WitnessOutcome>,
}

impl UscReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| matches!(o, WitnessOutcome::Pass { .. }))
    }

    pub fn first_failure(&self) -> Option<(usize, &WitnessOutcome)> {
        self.outcomes
            .iter()
            .enumerate()
            .find(|(_, o)| !matches!(o, WitnessOutcome::Pass { .. }))
    }
}

/// Checks `lim sup φ(x_{s_k}) ≤ φ(limit)` along each witness, term by term
/// on the convergent tail, following the two cases of the usc argument:
/// for a finite limit `s`, `φ(x_{s_k}) ≤ φ(x_s)`; for a branch,
/// `φ(x_{s_k}) ≤ φ(x_{f↾n(k)})` with `n(k)` the agreement depth.
pub fn usc_check(fan: &FanApprox, witnesses: &[Witness]) -> Result<UscReport> {
    let mut outcomes = Vec::with_capacity(witnesses.len());
    for w in witnesses {
        outcomes.push(check_witness(fan, w)?);
    }
    Ok(UscReport { outcomes })
}

fn check_witness(fan: &FanApprox, w: &Witness) -> Result<WitnessOutcome> {
    match w {
        Witness::Finite { seq, limit } => {
            if !cantor::converges_to_finite(seq, limit) {
                return Ok(WitnessOutcome::NotConvergent);
            }
            let bound = fan.entry(limit)?.phi.clone();
            let start = seq
                .iter()
                .rposition(|t| !limit.is_prefix_of(t))
                .map_or(0, |k| k + 1);
            let mut limsup: Option<Rat> = None;
            for (k, t) in seq.iter().enumerate().skip(start) {
                let v = &fan.entry(t)?.phi;
                if v > &bound {
                    return Ok(WitnessOutcome::Violation {
                        k,
                        detail: format!("φ(x_{t}) = {v} > φ(x_{limit}) = {bound}"),
                    });
                }
                if limsup.as_ref().is_none_or(|m| v > m) {
                    limsup = Some(v.clone());
                }
            }
            Ok(WitnessOutcome::Pass { limsup: limsup.unwrap_or_else(Rat::zero), bound })
        }
        Witness::Branch { seq, chain } => {
            if !cantor::converges_to_branch(seq, chain)? {
                return Ok(WitnessOutcome::NotConvergent);
            }
            let f = chain.last().expect("nonempty chain");
            for (k, t) in seq.iter().enumerate() {
                let n = f.agreement(t);
                let anchor = f.prefix(n);
                let v = &fan.entry(t)?.phi;
                let cap = &fan.entry(&anchor)?.phi;
                if v > cap {
                    return Ok(WitnessOutcome::Violation {
                        k,
                        detail: format!("φ(x_{t}) = {v} > φ(x_{anchor}) = {cap}"),
                    });
                }
            }
            let last = seq.last().expect("convergent sequences are nonempty");
            let limsup = fan.entry(last)?.phi.clone();
            let bound = fan.entry(f)?.phi.clone();
            if limsup > bound {
                return Ok(WitnessOutcome::Violation {
                    k: seq.len() - 1,
                    detail: format!("tail value {limsup} exceeds φ(x_{f}) = {bound}"),
                });
            }
            Ok(WitnessOutcome::Pass { limsup, bound })
        }
    }
}

/// A failed structural check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub label: &'static str,
    pub s: SeqIndex,
    pub detail: String,
}

impl fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[s={}]: {}", self.label, self.s, self.detail)
    }
}

/// `φ(x_∅) = 1` and monotonicity (e) along every window parent/child pair.
pub fn check_monotone(fan: &FanApprox) -> Vec<BoundViolation> {
    let mut out = Vec::new();
    if fan.phi(&SeqIndex::empty()) != Some(&Rat::one()) {
        out.push(BoundViolation {
            label: "root",
            s: SeqIndex::empty(),
            detail: "φ(x_∅) ≠ 1".into(),
        });
    }
    for e in &fan.entries {
        if let Some(p) = e.s.parent().and_then(|p| fan.get(&p)) {
            if e.phi > p.phi {
                out.push(BoundViolation {
                    label: "e",
                    s: e.s.clone(),
                    detail: format!("φ = {} exceeds parent value {}", e.phi, p.phi),
                });
            }
        }
        if e.phi.is_negative() || e.phi > Rat::one() {
            out.push(BoundViolation {
                label: "range",
                s: e.s.clone(),
                detail: format!("φ = {} outside [0,1]", e.phi),
            });
        }
    }
    out
}

/// The variant's bound, (e1), (e2) or (e3), for every window index (and
/// every window pair for (e2)), as exact rational inequalities.
pub fn check_variant_bounds(fan: &FanApprox) -> Vec<BoundViolation> {
    let mut out = Vec::new();
    for e in &fan.entries {
        let Some(p) = e.s.parent().and_then(|p| fan.get(&p)) else {
            continue;
        };
        match fan.variant() {
            Variant::V1 => {
                if !e.phi.lt_pow2(-(p.theta as i64)) {
                    out.push(BoundViolation {
                        label: "e1",
                        s: e.s.clone(),
                        detail: format!("φ = {} not below 2^-{}", e.phi, p.theta),
                    });
                }
            }
            Variant::V2 => {
                for anc in e.s.prefixes().take(e.s.len()) {
                    let a = fan.get(&anc).expect("prefixes of window indices are in the window");
                    let diff = &a.phi - &e.phi;
                    if !diff.lt_pow2(1 - a.theta as i64) {
                        out.push(BoundViolation {
                            label: "e2",
                            s: e.s.clone(),
                            detail: format!("φ({anc}) − φ = {diff} not below 2^(1-{})", a.theta),
                        });
                    }
                }
            }
            Variant::V3 => {
                if !(e.phi.lt_pow2(-(p.theta as i64)) || e.phi == p.phi) {
                    out.push(BoundViolation {
                        label: "e3",
                        s: e.s.clone(),
                        detail: format!("φ = {} neither below 2^-{} nor equal to parent", e.phi, p.theta),
                    });
                }
            }
        }
    }
    out
}

/// Placement of each `Y_s` inside its variant target and the schedule of
/// window children.
pub fn check_schedule(fan: &FanApprox) -> Vec<BoundViolation> {
    let mut out = Vec::new();
    let variant = fan.variant();
    for e in &fan.entries {
        let (lo, hi) = y_target(variant, &e.phi, e.theta);
        if !(lo < hi && e.ys.is_within(&lo, &hi)) {
            out.push(BoundViolation {
                label: "placement",
                s: e.s.clone(),
                detail: format!("Y_s not inside ({lo}, {hi})"),
            });
        }
        for c in fan.children(&e.s) {
            let i = *c.s.entries().last().unwrap();
            let expected = schedule_value(variant, &e.phi, &e.ys, i);
            if expected.as_ref() != Some(&c.phi) {
                out.push(BoundViolation {
                    label: "schedule",
                    s: c.s.clone(),
                    detail: format!("child value {} differs from the schedule", c.phi),
                });
            }
        }
    }
    out
}
