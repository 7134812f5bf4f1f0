//! Locating a point at which `G₀^φ` is zero-dimensional.
//!
//! Starting from a clopen `U ⊂ C` and a height `a₀` that `φ` never takes on
//! `U`, the locator shrinks clopen pieces `V_n` and height windows
//! `[a_n, b_n)`:
//!
//! 1. `V_{n+1} ⊆ V_n`
//! 2. `a_n ≤ a_{n+1} < b_{n+1} ≤ b_n`
//! 3. `∅ ≠ φ[V_n] ∩ [a₀, ∞) ⊂ [a_n, b_n)`
//! 4. `diam V_n < 2^{−n}` and `b_n − a_n ≤ 2^{−n}` for `n ≥ 1`
//!
//! so that `W_n = (V_n × [a₀, ∞)) ∩ G₀^φ` is a clopen local basis.
//!
//! Pieces are either `I_t ∩ C` or a tail `{x_t} ∪ ⋃_{i≥k} I_{t⌢i} ∩ C`, which
//! equals `C ∩ [x_t, sup(C ∩ I_{t⌢k})]` and is clopen.

use std::fmt;
use std::str::FromStr;

use crate::cantor;
use crate::error::{FanError, Result};
use crate::fanmodel::{check_variant_bounds, schedule_value, y_target, FanApprox, Variant};
use crate::kfamily::{embed, FiniteCompactSet};
use crate::rat::Rat;
use crate::seqindex::{theta_inv, SeqIndex};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Piece {
    /// `I_t ∩ C`.
    Basic(SeqIndex),
    /// `{x_t} ∪ ⋃_{i≥k} I_{t⌢i} ∩ C`, `k ≥ 1`.
    Tail(SeqIndex, u32),
}

impl Piece {
    pub fn tail(t: SeqIndex, k: u32) -> Piece {
        if k == 0 {
            Piece::Basic(t)
        } else {
            Piece::Tail(t, k)
        }
    }

    pub fn base(&self) -> &SeqIndex {
        match self {
            Piece::Basic(t) | Piece::Tail(t, _) => t,
        }
    }

    fn threshold(&self) -> u32 {
        match self {
            Piece::Basic(_) => 0,
            Piece::Tail(_, k) => *k,
        }
    }

    /// Whether `x_u` lies in the piece.
    pub fn contains(&self, u: &SeqIndex) -> bool {
        let t = self.base();
        if u == t {
            return true;
        }
        t.is_proper_prefix_of(u) && u.entries()[t.len()] >= self.threshold()
    }

    pub fn is_subset_of(&self, other: &Piece) -> bool {
        let (u, j) = (self.base(), self.threshold());
        let (t, k) = (other.base(), other.threshold());
        if u == t {
            return j >= k;
        }
        t.is_proper_prefix_of(u) && u.entries()[t.len()] >= k
    }

    /// Smallest and largest points of the piece.
    pub fn hull(&self) -> (Rat, Rat) {
        let t = self.base();
        let lo = cantor::point(t);
        let top = match self {
            Piece::Basic(t) => cantor::interval(t),
            Piece::Tail(t, k) => cantor::interval(&t.child(*k)),
        };
        (lo, cantor_sup(&top))
    }

    /// Exact diameter (Euclidean on `[0,1]`).
    pub fn diam(&self) -> Rat {
        let (lo, hi) = self.hull();
        &hi - &lo
    }
}

/// `sup(C ∩ I_t)`: the `0`-chain from `x_t` converges to `x_t + (2/3)|I_t|`.
fn cantor_sup(it: &cantor::Interval) -> Rat {
    &it.lo + &(&it.width() * &Rat::new(2, 3))
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Basic(t) => write!(f, "{t}"),
            Piece::Tail(t, k) => write!(f, "{t}+{k}"),
        }
    }
}

impl FromStr for Piece {
    type Err = FanError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.rsplit_once("]+") {
            Some((t, k)) => {
                let t: SeqIndex = format!("{t}]").parse()?;
                let k: u32 = k.parse().map_err(|_| FanError::Parse(format!("bad tail threshold in `{s}`")))?;
                Ok(Piece::tail(t, k))
            }
            None => Ok(Piece::Basic(s.parse()?)),
        }
    }
}

/// How far the value computations reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Every value of `φ` on every piece is accounted for, including indices
    /// outside the window and branch values.
    Full,
    /// Only window indices were inspected.
    WindowOnly,
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certification::Full => "full",
            Certification::WindowOnly => "window-only",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocatorState {
    pub n: usize,
    pub v: Piece,
    pub a: Rat,
    /// `None` is `+∞`.
    pub b: Option<Rat>,
    pub x: Option<SeqIndex>,
    /// `φ[V_n] ∩ [a₀, ∞)`, ascending.
    pub values: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocatedPoint {
    pub s: SeqIndex,
    pub x: Rat,
    pub phi: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenBasisResult {
    pub a0: Rat,
    pub witness: LocatedPoint,
    pub trail: Vec<LocatorState>,
    pub certification: Certification,
}

impl ClopenBasisResult {
    /// `x`-hull and height enclosure of the witness after the last step.
    pub fn enclosure(&self) -> ((Rat, Rat), (Rat, Option<Rat>)) {
        let last = self.trail.last().expect("trail is never empty");
        (last.v.hull(), (last.a.clone(), last.b.clone()))
    }
}

/// Values of `φ` at or above `a₀` on a piece, each with the θ-smallest
/// index attaining it.
trait ValueSource {
    fn values(&self, piece: &Piece) -> Result<Vec<(Rat, SeqIndex)>>;
}

fn dedupe(mut found: Vec<(Rat, SeqIndex)>) -> Vec<(Rat, SeqIndex)> {
    found.sort();
    found.dedup_by(|later, earlier| later.0 == earlier.0);
    found
}

struct WindowValues<'a> {
    fan: &'a FanApprox,
    a0: Rat,
}

impl ValueSource for WindowValues<'_> {
    fn values(&self, piece: &Piece) -> Result<Vec<(Rat, SeqIndex)>> {
        Ok(dedupe(
            self.fan
                .entries()
                .iter()
                .filter(|e| e.phi >= self.a0 && piece.contains(&e.s))
                .map(|e| (e.phi.clone(), e.s.clone()))
                .collect(),
        ))
    }
}

/// `φ` constant on all of `C`: every `Y_s` empty and the schedule repeats
/// the parent value.
struct ConstantValues {
    value: Rat,
    a0: Rat,
}

impl ValueSource for ConstantValues {
    fn values(&self, piece: &Piece) -> Result<Vec<(Rat, SeqIndex)>> {
        if self.value >= self.a0 {
            Ok(vec![(self.value.clone(), piece.base().clone())])
        } else {
            Ok(Vec::new())
        }
    }
}

/// Variant 1: `φ(x_u) < 2^{−θ(parent u)}`, so a value `≥ a₀` needs a parent
/// with `2^{−θ} > a₀`. Those parents are `θ⁻¹(0), …, θ⁻¹(L−1)`; their
/// children carry the cyclic schedule and branch values are 0.
struct HeavyValues {
    a0: Rat,
    root: Rat,
    parents: Vec<(SeqIndex, Rat, FiniteCompactSet)>,
}

impl HeavyValues {
    fn new(fan: &FanApprox, a0: &Rat) -> Result<Self> {
        let mut parents = Vec::new();
        let mut n = 0u64;
        while a0.lt_pow2(-(n as i64)) {
            let p = theta_inv(n);
            let (phi, ys) = eval(fan, &p)?;
            parents.push((p, phi, ys));
            n += 1;
        }
        let root = eval(fan, &SeqIndex::empty())?.0;
        Ok(HeavyValues { a0: a0.clone(), root, parents })
    }
}

impl ValueSource for HeavyValues {
    fn values(&self, piece: &Piece) -> Result<Vec<(Rat, SeqIndex)>> {
        let mut found = Vec::new();
        let root = SeqIndex::empty();
        if piece.contains(&root) && self.root >= self.a0 {
            found.push((self.root.clone(), root));
        }
        let t = piece.base();
        for (p, phi, ys) in &self.parents {
            let len = ys.len();
            if len == 0 {
                continue;
            }
            let value_at = |i: u32| schedule_value(Variant::V1, phi, ys, i).expect("nonempty cycle");
            if piece.contains(p) {
                // every child of p lies in the piece, except below the tail
                // threshold when p is the base itself
                let lo = if p == t { piece.threshold() } else { 0 };
                for j in 0..len {
                    let y = ys.get(j).unwrap();
                    if y < self.a0 {
                        continue;
                    }
                    let shift = (j + len - (lo as u64 % len)) % len;
                    found.push((y, p.child(lo + shift as u32)));
                }
            } else if p.is_proper_prefix_of(t) && t.len() == p.len() + 1 {
                let i = t.entries()[p.len()];
                let y = value_at(i);
                if y >= self.a0 {
                    found.push((y, t.clone()));
                }
            }
        }
        Ok(dedupe(found))
    }
}

/// `(φ(x_u), Y_u)` for any index, extending the window by the construction
/// rules.
fn eval(fan: &FanApprox, u: &SeqIndex) -> Result<(Rat, FiniteCompactSet)> {
    if let Some(e) = fan.get(u) {
        return Ok((e.phi.clone(), e.ys.clone()));
    }
    let parent = u.parent().ok_or_else(|| FanError::NotInWindow(u.to_string()))?;
    let (pphi, pys) = eval(fan, &parent)?;
    let i = *u.entries().last().unwrap();
    let phi = schedule_value(fan.variant(), &pphi, &pys, i)
        .ok_or_else(|| FanError::Invalid(format!("empty schedule at {parent}")))?;
    let theta = u.theta();
    let k = fan.spec().family.member(theta).ok_or(FanError::FamilyTooShort {
        needed: theta,
        available: fan.spec().family.available().unwrap_or(0),
    })?;
    let (lo, hi) = y_target(fan.variant(), &phi, theta);
    Ok((phi, embed(&k, &lo, &hi)?))
}

fn choose_source<'a>(fan: &'a FanApprox, a0: &Rat) -> (Box<dyn ValueSource + 'a>, Certification) {
    let entries = fan.entries();
    let root = entries[0].phi.clone();
    let constant = fan.variant().cycle_includes_parent()
        && entries.iter().all(|e| e.ys.is_empty() && e.phi == root);
    if constant {
        return (Box::new(ConstantValues { value: root, a0: a0.clone() }), Certification::Full);
    }
    if fan.variant() == Variant::V1 && check_variant_bounds(fan).is_empty() {
        if let Ok(h) = HeavyValues::new(fan, a0) {
            return (Box::new(h), Certification::Full);
        }
    }
    (Box::new(WindowValues { fan, a0: a0.clone() }), Certification::WindowOnly)
}

fn tail_candidates(x: &SeqIndex, limit: u32) -> impl Iterator<Item = Piece> + '_ {
    (0..=x.len())
        .map(move |m| Piece::Basic(x.prefix(m)))
        .chain((1..=limit).map(move |k| Piece::Tail(x.clone(), k)))
}

/// Runs the recursion for `n = 0, …, n_max`.
pub fn locate(fan: &FanApprox, u: &[SeqIndex], a0: &Rat, n_max: usize) -> Result<ClopenBasisResult> {
    if !a0.is_positive() {
        return Err(FanError::Precondition("a0 must be positive".into()));
    }
    if u.is_empty() {
        return Err(FanError::Precondition("U is empty".into()));
    }
    let (source, certification) = choose_source(fan, a0);

    let mut start: Option<(Piece, Vec<(Rat, SeqIndex)>)> = None;
    for s in u {
        let piece = Piece::Basic(s.clone());
        let vals = source.values(&piece)?;
        if let Some((_, at)) = vals.iter().find(|(v, _)| v == a0) {
            return Err(FanError::Precondition(format!(
                "phi takes the value {a0} at {at}, so U x {{a0}} meets the graph"
            )));
        }
        if start.is_none() && !vals.is_empty() {
            start = Some((piece, vals));
        }
    }
    let Some((v0, vals0)) = start else {
        return Err(FanError::Precondition(format!("no point of U reaches height {a0}")));
    };

    let mut trail = vec![LocatorState {
        n: 0,
        v: v0,
        a: a0.clone(),
        b: None,
        x: None,
        values: vals0.iter().map(|(v, _)| v.clone()).collect(),
    }];
    let mut current = vals0;
    for n in 0..n_max {
        let prev = trail.last().unwrap();
        let a = current
            .iter()
            .map(|(v, _)| v)
            .find(|v| *v > a0)
            .cloned()
            .ok_or_else(|| FanError::Precondition(format!("no value above a0 on V_{n}")))?;
        let cap = &a + &Rat::pow2(-(n as i64 + 1));
        let b = match &prev.b {
            Some(bn) if bn < &cap => bn.clone(),
            _ => cap,
        };
        let x = current
            .iter()
            .filter(|(v, _)| v >= &a && v < &b)
            .map(|(_, s)| s)
            .min()
            .cloned()
            .expect("the infimum is attained");
        let target = Rat::pow2(-(n as i64 + 1));
        let mut next = None;
        for cand in tail_candidates(&x, n as u32 + 64) {
            if !cand.is_subset_of(&prev.v) || cand.diam() >= target {
                continue;
            }
            let vals = source.values(&cand)?;
            if vals.iter().all(|(v, _)| v >= &a && v < &b) {
                next = Some((cand, vals));
                break;
            }
        }
        let Some((v, vals)) = next else {
            return Err(FanError::WindowTooShallow {
                step: n + 1,
                detail: format!("no piece around {x} of diameter below 2^-{} fits [{a}, {b})", n + 1),
            });
        };
        trail.push(LocatorState {
            n: n + 1,
            v,
            a,
            b: Some(b),
            x: Some(x),
            values: vals.iter().map(|(v, _)| v.clone()).collect(),
        });
        current = vals;
    }

    let last = trail.last().unwrap();
    let s = match &last.x {
        Some(x) => x.clone(),
        None => current[0].1.clone(),
    };
    let phi = eval(fan, &s)?.0;
    Ok(ClopenBasisResult {
        a0: a0.clone(),
        witness: LocatedPoint { x: cantor::point(&s), s, phi },
        trail,
        certification,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisViolation {
    pub condition: &'static str,
    pub n: usize,
    pub detail: String,
}

impl fmt::Display for BasisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} fails at n = {}: {}", self.condition, self.n, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisReport {
    pub steps: usize,
    pub violation: Option<BasisViolation>,
}

impl BasisReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// `diam W_n` under `ρ = max(|Δx|, |Δy|)`, bounded by the piece diameter
/// and the spread of the attained heights.
pub fn basis_diam(state: &LocatorState) -> Rat {
    let spread = match (state.values.first(), state.values.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => Rat::zero(),
    };
    Rat::max(&state.v.diam(), &spread).clone()
}

/// Re-checks conditions (1)–(4), nesting of `W_n`, membership of the
/// witness and `diam W_n < 2^{−n}` from the trail alone.
pub fn verify_basis(result: &ClopenBasisResult) -> BasisReport {
    let fail = |condition, n, detail: String| BasisReport {
        steps: result.trail.len(),
        violation: Some(BasisViolation { condition, n, detail }),
    };
    let a0 = &result.a0;
    for (idx, st) in result.trail.iter().enumerate() {
        let n = st.n;
        if n != idx {
            return fail("index", idx, format!("state numbered {n}"));
        }
        if idx > 0 {
            let prev = &result.trail[idx - 1];
            if !st.v.is_subset_of(&prev.v) {
                return fail("1", n, format!("{} is not inside {}", st.v, prev.v));
            }
            let b_ok = match (&st.b, &prev.b) {
                (Some(b), Some(pb)) => b <= pb,
                (Some(_), None) => true,
                (None, _) => false,
            };
            let a_ok = prev.a <= st.a && st.b.as_ref().is_some_and(|b| &st.a < b);
            if !(a_ok && b_ok) {
                return fail("2", n, "heights are not nested".into());
            }
            if let Some(x) = &st.x {
                if !prev.v.contains(x) || !st.v.contains(x) {
                    return fail("1", n, format!("x_n = {x} outside V"));
                }
            }
        }
        if st.values.is_empty() {
            return fail("3", n, "phi[V_n] meets no height above a0".into());
        }
        for y in &st.values {
            let below_b = st.b.as_ref().is_none_or(|b| y < b);
            if y < a0 || y < &st.a || !below_b {
                return fail("3", n, format!("height {y} outside [a_n, b_n)"));
            }
        }
        if n >= 1 {
            let bound = Rat::pow2(-(n as i64));
            if st.v.diam() >= bound {
                return fail("4", n, format!("diam V_n = {}", st.v.diam()));
            }
            match &st.b {
                Some(b) if (b - &st.a) <= bound => {}
                _ => return fail("4", n, "b_n - a_n exceeds 2^-n".into()),
            }
        }
        let dw = basis_diam(st);
        if dw >= Rat::pow2(-(n as i64)) {
            return fail("diam", n, format!("diam W_n = {dw}"));
        }
        if !(st.v.contains(&result.witness.s)
            && result.witness.phi >= st.a
            && st.b.as_ref().is_none_or(|b| &result.witness.phi < b))
        {
            return fail("witness", n, "witness leaves W_n".into());
        }
    }
    BasisReport { steps: result.trail.len(), violation: None }
}

/// Trail lines `n ; V = [piece] ; a = p/q ; b = p/q|inf ; x = [s]|-`.
pub fn write_trail(result: &ClopenBasisResult) -> String {
    let mut out = String::new();
    out.push_str("# fanlab trail v1\n");
    out.push_str(&format!("a0 = {}\n", result.a0));
    out.push_str(&format!("certification = {}\n", result.certification));
    for st in &result.trail {
        let b = st.b.as_ref().map_or("inf".to_string(), Rat::to_string);
        let x = st.x.as_ref().map_or("-".to_string(), SeqIndex::to_string);
        let vals: Vec<String> = st.values.iter().map(Rat::to_string).collect();
        out.push_str(&format!(
            "{} ; V = [{}] ; a = {} ; b = {} ; x = {} ; values = [{}]\n",
            st.n,
            st.v,
            st.a,
            b,
            x,
            vals.join(", ")
        ));
    }
    let ((xlo, xhi), (ylo, yhi)) = result.enclosure();
    let yhi = yhi.map_or("inf".to_string(), |b| b.to_string());
    out.push_str(&format!(
        "witness = {} ; x in [{xlo}, {xhi}] ; phi in [{ylo}, {yhi}) ; phi = {}\n",
        result.witness.s, result.witness.phi
    ));
    out
}
