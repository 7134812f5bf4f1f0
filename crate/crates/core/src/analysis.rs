//! Endpoint structure of truncated fans: traces on legs and branches,
//! 𝒦-fan certificates, a probe-based classifier, density and free boxes.
//!
//! Every finite check compares exact rationals. Tolerances are the powers of
//! two supplied by the variant bounds, never a free epsilon.

use std::collections::HashMap;
use std::fmt;

use crate::cantor::Interval;
use crate::error::{FanError, Result};
use crate::fanmodel::{
    phi_branch_value, schedule_value, BranchValue, Entry, FanApprox, FanPoint, FanSum, Variant,
};
use crate::kfamily::{order_isomorphic, FiniteCompactSet};
use crate::rat::Rat;
use crate::seqindex::SeqIndex;

/// Heights of the endpoint closure on one leg or branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegTrace {
    pub leg: SeqIndex,
    /// Heights strictly between 0 and the top.
    pub predicted: FiniteCompactSet,
    pub includes_top: bool,
    pub includes_bottom: bool,
    /// Window endpoints examined by the finite verification.
    pub checked: usize,
    /// Whether the window is wide enough to see the whole child cycle.
    pub coverage_checked: bool,
    pub failure: Option<String>,
}

impl LegTrace {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// `2^{−k}`.
fn tol(k: u64) -> Rat {
    Rat::pow2(-(k as i64))
}

/// Checks one window descendant `t` of the child `c` against the bound that
/// confines it near `φ(x_c)` or near 0.
fn descendant_ok(variant: Variant, c: &Entry, t: &Entry) -> bool {
    match variant {
        Variant::V1 => t.phi.is_positive() && t.phi < tol(c.theta),
        Variant::V2 => t.phi <= c.phi && (&c.phi - &t.phi) < Rat::pow2(1 - c.theta as i64),
        Variant::V3 => t.phi == c.phi || (t.phi.is_positive() && t.phi < tol(c.theta)),
    }
}

fn verify_leg(fan: &FanApprox, e: &Entry) -> (usize, bool, Option<String>) {
    let variant = fan.variant();
    let mut checked = 0usize;
    if !e.ys.is_within(&Rat::zero(), &e.phi) {
        return (0, false, Some(format!("Y_s not inside (0, {})", e.phi)));
    }
    let in_cycle = |v: &Rat| e.ys.contains(v) || (variant.cycle_includes_parent() && v == &e.phi);
    let mut seen: Vec<Rat> = Vec::new();
    for c in fan.children(&e.s) {
        checked += 1;
        if !in_cycle(&c.phi) {
            return (checked, false, Some(format!("child {} has height {} outside the cycle", c.s, c.phi)));
        }
        let i = *c.s.entries().last().unwrap();
        if schedule_value(variant, &e.phi, &e.ys, i).as_ref() != Some(&c.phi) {
            return (checked, false, Some(format!("child {} is off schedule", c.s)));
        }
        if !seen.contains(&c.phi) {
            seen.push(c.phi.clone());
        }
        for t in fan.descendants(&c.s) {
            checked += 1;
            if !descendant_ok(variant, c, t) {
                return (
                    checked,
                    false,
                    Some(format!("endpoint at {} (height {}) escapes the bound of {}", t.s, t.phi, c.s)),
                );
            }
        }
    }
    let cycle = e.ys.len() + u64::from(variant.cycle_includes_parent());
    let coverage = !fan.is_leaf(&e.s) && u64::from(fan.bounds().breadth) >= cycle;
    if coverage && (seen.len() as u64) < cycle {
        return (checked, coverage, Some("window children miss part of the cycle".into()));
    }
    (checked, coverage, None)
}

/// Trace of the endpoint closure on the leg at `x_s`, with its finite
/// verification.
pub fn leg_trace(fan: &FanApprox, s: &SeqIndex) -> Result<LegTrace> {
    let e = fan.entry(s)?;
    let (checked, coverage_checked, failure) = verify_leg(fan, e);
    let variant = fan.variant();
    Ok(LegTrace {
        leg: s.clone(),
        predicted: e.ys.clone(),
        includes_top: variant.cycle_includes_parent(),
        includes_bottom: variant != Variant::V2,
        checked,
        coverage_checked,
        failure,
    })
}

/// Trace on the branch described by `chain`.
pub fn branch_trace(fan: &FanApprox, chain: &[SeqIndex]) -> Result<LegTrace> {
    let value = phi_branch_value(fan, chain)?;
    let leg = chain.last().expect("checked by phi_branch_value").clone();
    let variant = fan.variant();
    let (top, bottom) = match (&value, variant) {
        (BranchValue::Zero { .. }, _) => (false, false),
        (v, _) if !v.is_certified_positive() => {
            return Err(FanError::Uncertified(format!("branch value at {leg} is not certified positive")))
        }
        (_, Variant::V3) => (true, true),
        _ => (true, false),
    };
    Ok(LegTrace {
        leg,
        predicted: FiniteCompactSet::empty(),
        includes_top: top,
        includes_bottom: bottom,
        checked: chain.len(),
        coverage_checked: false,
        failure: None,
    })
}

/// One labelled line of a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, if self.passed { "pass" } else { "FAIL" })?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KfanCertificate {
    pub lines: Vec<CheckLine>,
}

impl KfanCertificate {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckLine> {
        self.lines.iter().find(|l| !l.passed)
    }

    pub fn push(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine { label: label.into(), passed, detail: detail.into() });
    }

    /// Number of per-leg trace verifications that examined at least one
    /// window endpoint and passed.
    pub fn verified_legs(&self) -> usize {
        self.lines
            .iter()
            .filter(|l| l.label.starts_with("claim2[") && l.passed && l.detail.starts_with("checked"))
            .count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }
}

/// Chains of prefixes of every maximal-depth window index.
fn sample_branches(fan: &FanApprox) -> Vec<Vec<SeqIndex>> {
    let depth = fan.bounds().depth;
    fan.entries()
        .iter()
        .filter(|e| e.s.len() == depth)
        .map(|e| e.s.prefixes().collect())
        .collect()
}

fn leg_lines(fan: &FanApprox, tag: &str, cert: &mut KfanCertificate, cards: &mut HashMap<u64, String>) {
    let family = &fan.spec().family;
    for e in fan.entries() {
        let label_s = format!("{tag}s={}", e.s);
        let trace = leg_trace(fan, &e.s).expect("window index");
        let detail = match &trace.failure {
            None if trace.checked > 0 => format!("checked {} endpoints", trace.checked),
            None => "no window descendants".to_string(),
            Some(f) => f.clone(),
        };
        cert.push(format!("claim2[{label_s}]"), trace.passed(), detail);

        let iso = match family.member(e.theta) {
            Some(k) => order_isomorphic(&trace.predicted, &k),
            None => false,
        };
        cert.push(
            format!("cond_i[{label_s}]"),
            iso,
            if iso { String::new() } else { format!("trace is not a copy of K_{}", e.theta) },
        );

        let card = trace.predicted.len();
        match cards.get(&card) {
            Some(other) => cert.push(
                format!("cond_i_injective[{label_s}]"),
                false,
                format!("trace has the order type of the trace at {other}"),
            ),
            None => {
                cards.insert(card, label_s);
            }
        }
    }
}

fn branch_lines(fan: &FanApprox, tag: &str, cert: &mut KfanCertificate) {
    let mut certified = 0usize;
    let mut zero = 0usize;
    let mut failure: Option<String> = None;
    let mut closure_failure: Option<String> = None;
    let family_has_empty = fan.spec().family.contains_empty();
    for chain in sample_branches(fan) {
        let value = match phi_branch_value(fan, &chain) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e.to_string());
                continue;
            }
        };
        match &value {
            BranchValue::Zero { .. } => zero += 1,
            v if v.is_certified_positive() => {
                certified += 1;
                let trace = branch_trace(fan, &chain).expect("certified chain");
                if !trace.predicted.is_empty() || family_has_empty {
                    failure.get_or_insert(format!("branch through {} has a leg-like trace", trace.leg));
                }
                // the branch endpoint is the limit of the chain endpoints
                let (lo, hi) = v.enclosure();
                let last = fan.entry(chain.last().unwrap()).unwrap();
                if !(lo <= hi && hi <= last.phi) {
                    closure_failure.get_or_insert(format!("enclosure at {} exceeds the chain", last.s));
                }
            }
            _ => {}
        }
    }
    let detail = format!("{certified} certified branches, {zero} with value 0");
    cert.push(format!("cond_ii{tag}"), failure.is_none(), failure.unwrap_or(detail.clone()));
    cert.push(format!("cond_iii{tag}"), closure_failure.is_none(), closure_failure.unwrap_or(detail));
}

/// Conditions (i)–(iii) on the window.
pub fn verify_kfan_conditions(fan: &FanApprox) -> KfanCertificate {
    let mut cert = KfanCertificate::default();
    let mut cards = HashMap::new();
    leg_lines(fan, "", &mut cert, &mut cards);
    branch_lines(fan, "", &mut cert);
    cert
}

/// Conditions (i)–(iii) on a sum; injectivity is checked across summands.
pub fn verify_sum_conditions(sum: &FanSum) -> KfanCertificate {
    let mut cert = KfanCertificate::default();
    let mut cards = HashMap::new();
    for (i, fan) in sum.parts.iter().enumerate() {
        leg_lines(fan, &format!("X{i}:"), &mut cert, &mut cards);
        branch_lines(fan, &format!("[X{i}]"), &mut cert);
    }
    for (i, a) in sum.slots.iter().enumerate() {
        for b in &sum.slots[i + 1..] {
            if !a.is_disjoint(b) {
                cert.push("sum_slots", false, format!("{a} meets {b}"));
            }
        }
    }
    cert
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Discrete,
    IrrationalLike,
    CantorTimesNatLike,
    Unknown,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Discrete => "Discrete",
            Classification::IrrationalLike => "IrrationalLike",
            Classification::CantorTimesNatLike => "CantorTimesNatLike",
            Classification::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

/// Every endpoint `e_s` is isolated by `I_s × (max Y_s, 1]`: children take
/// values in `Y_s` only, and `Y_s` stays below both `φ(x_s)` and `2^{−θ(s)}`,
/// which forces every branch value to 0.
fn probe_discrete(fan: &FanApprox) -> bool {
    fan.entries().iter().all(|e| {
        let t = tol(e.theta);
        let cap = Rat::min(&e.phi, &t).clone();
        !e.ys.is_empty()
            && e.ys.is_within(&Rat::zero(), &cap)
            && fan.children(&e.s).all(|c| e.ys.contains(&c.phi))
    })
}

/// Indices `c` that repeat their parent's value and have window children.
fn repeat_children(fan: &FanApprox) -> Vec<&Entry> {
    fan.entries()
        .iter()
        .filter(|c| {
            let Some(p) = c.s.parent().and_then(|p| fan.get(&p)) else {
                return false;
            };
            p.phi == c.phi && !fan.is_leaf(&c.s)
        })
        .collect()
}

/// Around each sampled `e_c` the box `I_c × (τ, 1]` with
/// `τ = φ(x_c) − 2^{1−θ(c)}` is clopen in the endpoint set (no endpoint of
/// the subtree reaches height `τ`) and traps endpoints strictly below the top.
fn probe_irrational(fan: &FanApprox) -> bool {
    let samples = repeat_children(fan);
    let mut used = 0usize;
    for c in samples {
        let tau = &c.phi - &Rat::pow2(1 - c.theta as i64);
        if !tau.is_positive() {
            continue;
        }
        used += 1;
        let mut trapped = false;
        for t in fan.descendants(&c.s) {
            if t.phi <= tau {
                return false;
            }
            if t.phi < c.phi {
                trapped = true;
            }
        }
        if !trapped {
            return false;
        }
    }
    used > 0
}

/// Around each sampled `e_c` the subtree splits into the slice at height
/// `φ(x_c)` and endpoints below `2^{−θ(c)}`; the slice recurs through the
/// schedule, and the lower part is nonempty.
fn probe_cantor_times_nat(fan: &FanApprox) -> bool {
    let samples = repeat_children(fan);
    let variant = fan.variant();
    let mut used = 0usize;
    for c in samples {
        let tau = tol(c.theta);
        if tau >= c.phi {
            continue;
        }
        used += 1;
        let mut below = false;
        for t in fan.descendants(&c.s) {
            if t.phi == c.phi {
                continue;
            }
            if t.phi > tau {
                return false;
            }
            below = true;
        }
        let recurs = schedule_value(variant, &c.phi, &c.ys, c.ys.len() as u32).as_ref() == Some(&c.phi);
        if !(below && recurs) {
            return false;
        }
    }
    used > 0
}

pub fn classify_endpoint_space(fan: &FanApprox) -> Classification {
    if probe_discrete(fan) {
        Classification::Discrete
    } else if probe_irrational(fan) {
        Classification::IrrationalLike
    } else if probe_cantor_times_nat(fan) {
        Classification::CantorTimesNatLike
    } else {
        Classification::Unknown
    }
}

/// `interval(s) × [lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanBox {
    pub s: SeqIndex,
    pub lo: Rat,
    pub hi: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub dense: bool,
    pub free: Option<FanBox>,
}

/// Dyadic boxes `I_s × [k/2^r, (k+1)/2^r]` (`k ≥ 1`) that meet `L₀` must
/// contain a window endpoint.
pub fn is_endpoint_dense(fan: &FanApprox, resolution: u32) -> DensityReport {
    let slabs = 1u64 << resolution;
    let step = Rat::pow2(-(resolution as i64));
    for e in fan.entries() {
        let mut heights: Vec<&Rat> = std::iter::once(&e.phi)
            .chain(fan.descendants(&e.s).map(|t| &t.phi))
            .collect();
        heights.sort();
        for k in 1..slabs {
            let lo = &step * &Rat::from_int(k as i64);
            if lo > e.phi {
                break;
            }
            let hi = &lo + &step;
            let hit = heights.iter().any(|h| **h >= lo && **h <= hi);
            if !hit {
                return DensityReport { dense: false, free: Some(FanBox { s: e.s.clone(), lo, hi }) };
            }
        }
    }
    DensityReport { dense: true, free: None }
}

/// A box containing no endpoint; `certified` means the bound argument
/// covers the untruncated fan, not just the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeBox {
    pub s: SeqIndex,
    pub a: Rat,
    pub b: Rat,
    pub certified: bool,
}

fn thirds(lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let w = hi - lo;
    let third = &w / &Rat::from_int(3);
    (lo + &third, lo + &(&third * &Rat::from_int(2)))
}

fn window_free(fan: &FanApprox, s: &SeqIndex, a: &Rat, b: &Rat) -> bool {
    let e = fan.get(s).unwrap();
    std::iter::once(e)
        .chain(fan.descendants(s))
        .all(|t| !(&t.phi >= a && &t.phi <= b))
}

/// The ceiling below which every endpoint under `s` (other than `e_s`
/// itself and, in V3, the slice at its height) must stay.
fn ceiling(fan: &FanApprox, e: &Entry) -> Option<Rat> {
    match fan.variant() {
        Variant::V1 => {
            let y = e.ys.max()?;
            fan.children(&e.s).all(|c| e.ys.contains(&c.phi)).then_some(y)
        }
        Variant::V3 => {
            let cap = tol(e.theta);
            let ok = e.ys.is_within(&Rat::zero(), &cap);
            ok.then_some(cap)
        }
        Variant::V2 => None,
    }
}

/// An endpoint-free box `I_s × [a, b]` meeting `L₀`, chosen on the first
/// nonempty index where the variant bounds leave a gap.
pub fn free_box(fan: &FanApprox) -> Option<FreeBox> {
    for e in fan.entries().iter().filter(|e| !e.s.is_empty()) {
        let (a, b) = match fan.variant() {
            Variant::V1 | Variant::V3 => {
                let Some(l) = ceiling(fan, e) else { continue };
                if l >= e.phi {
                    continue;
                }
                thirds(&l, &e.phi)
            }
            Variant::V2 => {
                // every height under s stays above φ(x_s) − 2^{1−θ(s)}
                let tau = &e.phi - &Rat::pow2(1 - e.theta as i64);
                if !tau.is_positive() {
                    continue;
                }
                thirds(&Rat::zero(), &tau)
            }
        };
        if window_free(fan, &e.s, &a, &b) {
            return Some(FreeBox { s: e.s.clone(), a, b, certified: true });
        }
    }
    None
}

/// `H`: the identity off `I_s × [a, b]`, and `⟨p, t⟩ ↦ ⟨p, f(t)⟩` inside,
/// with `f` piecewise linear, `f(a) = a`, `f(b) = b`,
/// `f((a+b)/2) = (a+3b)/4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homeomorphism {
    pub region: Interval,
    pub s: SeqIndex,
    pub a: Rat,
    pub b: Rat,
    pub mid: Rat,
    pub mid_image: Rat,
}

impl Homeomorphism {
    pub fn f(&self, t: &Rat) -> Rat {
        if t < &self.a || t > &self.b {
            return t.clone();
        }
        if t <= &self.mid {
            let ratio = &(t - &self.a) / &(&self.mid - &self.a);
            &self.a + &(&ratio * &(&self.mid_image - &self.a))
        } else {
            let ratio = &(t - &self.mid) / &(&self.b - &self.mid);
            &self.mid_image + &(&ratio * &(&self.b - &self.mid_image))
        }
    }

    pub fn apply(&self, p: &FanPoint) -> FanPoint {
        if self.region.contains(&p.x) {
            FanPoint { x: p.x.clone(), y: self.f(&p.y) }
        } else {
            p.clone()
        }
    }

    /// Whether `H` fixes every window endpoint.
    pub fn fixes_endpoints(&self, fan: &FanApprox) -> bool {
        fan.entries().iter().filter(|e| e.phi.is_positive()).all(|e| {
            let p = FanPoint { x: e.x().clone(), y: e.phi.clone() };
            self.apply(&p) == p
        })
    }

    pub fn describe(&self) -> String {
        format!(
            "H = id outside I_{} x [{}, {}] with I_{} = {}; inside <p,t> -> <p,f(t)>, \
             f piecewise linear: {} -> {}, {} -> {}, {} -> {}",
            self.s, self.a, self.b, self.s, self.region, self.a, self.a, self.mid, self.mid_image, self.b, self.b
        )
    }
}

pub fn nonrigidity_witness(fan: &FanApprox) -> Result<Homeomorphism> {
    let fb = free_box(fan).ok_or(FanError::NoFreeBox)?;
    let mid = fb.a.midpoint(&fb.b);
    let mid_image = &(&fb.a + &(&fb.b * &Rat::from_int(3))) / &Rat::from_int(4);
    Ok(Homeomorphism {
        region: fan.entry(&fb.s)?.interval.clone(),
        s: fb.s,
        a: fb.a,
        b: fb.b,
        mid,
        mid_image,
    })
}
