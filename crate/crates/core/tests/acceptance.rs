//! Acceptance criteria 1–8. Runs without the libtest harness so that every
//! criterion prints its line; exits nonzero if any fails.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fanlab::analysis::{
    classify_endpoint_space, free_box, leg_trace, nonrigidity_witness, verify_kfan_conditions,
    verify_sum_conditions, Classification,
};
use fanlab::fanmodel::{
    build_kfan, check_monotone, check_variant_bounds, sum_fans, usc_check, FanApprox, FanSpec, Variant, Witness,
    WitnessOutcome,
};
use fanlab::format::write_fan;
use fanlab::kfamily::{canonical_k, embed, FamilySpec};
use fanlab::render::{render_fan, render_intervals, Canvas};
use fanlab::seqindex::theta_inv;
use fanlab::zerodim::{locate, verify_basis, Certification, ClopenBasisResult};
use fanlab::{Rat, SeqIndex, TruncationBounds};

const VARIANTS: [Variant; 3] = [Variant::V1, Variant::V2, Variant::V3];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fan(v: Variant, depth: usize, breadth: u32) -> FanApprox {
    build_kfan(&FanSpec::canonical(v, depth, breadth).unwrap()).unwrap()
}

fn c1_construction() -> Outcome {
    let mut total = 0;
    for v in VARIANTS {
        let f = fan(v, 4, 6);
        let entries = f.entries();
        total += entries.len();

        let thetas: HashSet<u64> = entries.iter().map(|e| e.theta).collect();
        ensure(thetas.len() == entries.len(), || format!("{v}: θ not injective"))?;
        for e in entries {
            ensure(e.s.theta() == e.theta && theta_inv(e.theta) == e.s, || format!("{v}: θ at {}", e.s))?;
            for p in e.s.prefixes().filter(|p| p != &e.s) {
                ensure(p.theta() < e.theta, || format!("{v}: (c) fails for {p} < {}", e.s))?;
            }
        }

        for e in entries.iter().filter(|e| !f.is_leaf(&e.s)) {
            let kids: Vec<_> = f.children(&e.s).collect();
            for (i, a) in kids.iter().enumerate() {
                ensure(e.interval.contains_interval(&a.interval) && e.interval.lo < *a.x(), || {
                    format!("{v}: I_{} not inside I_{}", a.s, e.s)
                })?;
                for b in &kids[i + 1..] {
                    ensure(a.interval.is_disjoint(&b.interval), || format!("{v}: I_{} meets I_{}", a.s, b.s))?;
                }
            }
        }

        for e in entries.iter().filter(|e| !e.s.is_empty()) {
            let parent = f.get(&e.s.parent().unwrap()).unwrap();
            ensure(e.phi <= parent.phi, || format!("{v}: (e) at {}", e.s))?;
            let cap = Rat::pow2(-(parent.theta as i64));
            match v {
                Variant::V1 => ensure(e.phi < cap, || format!("{v}: (e1) at {}", e.s))?,
                Variant::V3 => ensure(e.phi < cap || e.phi == parent.phi, || format!("{v}: (e3) at {}", e.s))?,
                Variant::V2 => {
                    for a in e.s.prefixes().filter(|p| p != &e.s) {
                        let anc = f.get(&a).unwrap();
                        let gap = &anc.phi - &e.phi;
                        ensure(gap < Rat::pow2(1 - anc.theta as i64), || format!("{v}: (e2) for {a}, {}", e.s))?;
                    }
                }
            }
        }
        ensure(check_monotone(&f).is_empty(), || format!("{v}: check_monotone reports violations"))?;
        ensure(check_variant_bounds(&f).is_empty(), || format!("{v}: check_variant_bounds reports violations"))?;
    }
    Ok(format!("{total} indices over three variants"))
}

fn c2_claim2() -> Outcome {
    let mut counts = Vec::new();
    for v in VARIANTS {
        let f = fan(v, 4, 6);
        let mut verified = 0;
        for e in f.entries() {
            let t = leg_trace(&f, &e.s).map_err(|err| format!("{v}: {err}"))?;
            ensure(t.predicted == e.ys, || format!("{v}: predicted trace differs at {}", e.s))?;
            ensure(t.passed(), || format!("{v}: leg {} {:?}", e.s, t.failure))?;
            if t.checked > 0 {
                verified += 1;
            }
        }
        ensure(verified >= 50, || format!("{v}: only {verified} legs verified"))?;
        counts.push(format!("V{v}: {verified}"));
    }
    Ok(format!("verified legs {}", counts.join(", ")))
}

/// `K_n` for `n ≡ parity (mod 2)`; two such families share no cardinality.
fn parity_family(parity: u64, members: u64) -> FamilySpec {
    FamilySpec::Explicit((0..members).map(|j| canonical_k(2 * j + parity)).collect())
}

fn c3_certificate() -> Outcome {
    for v in VARIANTS {
        let cert = verify_kfan_conditions(&fan(v, 4, 6));
        ensure(cert.passed(), || format!("{v}: {}", cert.first_failure().unwrap()))?;
    }

    let bounds = TruncationBounds::new(2, 3).unwrap();
    let parts: Vec<FanApprox> = [0, 1]
        .into_iter()
        .map(|p| build_kfan(&FanSpec::new(Variant::V1, parity_family(p, 40), bounds).unwrap()).unwrap())
        .collect();
    let sum = sum_fans(&parts).map_err(|e| e.to_string())?;
    let cert = verify_sum_conditions(&sum);
    ensure(cert.passed(), || format!("sum: {}", cert.first_failure().unwrap()))?;

    let f = fan(Variant::V1, 2, 3);
    let root = SeqIndex::empty();
    let leg = SeqIndex::new(vec![1]);
    let e = f.get(&leg).unwrap();
    let m = Rat::min(&e.phi, &Rat::pow2(-(e.theta as i64))).clone();
    let same_size = embed(&canonical_k(f.get(&root).unwrap().theta), &Rat::zero(), &m).unwrap();
    let bad = f.with_ys(&leg, same_size).map_err(|e| e.to_string())?;
    let cert = verify_kfan_conditions(&bad);
    ensure(cert.lines.iter().any(|l| l.label.starts_with("cond_i") && !l.passed), || {
        "corrupted fan passes condition (i)".into()
    })?;
    Ok("three variants, one sum, corrupted fan rejected".into())
}

fn c4_classification() -> Outcome {
    let windows = [(3, 4), (3, 5), (3, 6), (4, 4), (4, 5), (4, 6)];
    let expected = [Classification::Discrete, Classification::IrrationalLike, Classification::CantorTimesNatLike];
    for (v, want) in VARIANTS.into_iter().zip(expected) {
        for (d, b) in windows {
            let got = classify_endpoint_space(&fan(v, d, b));
            ensure(got == want, || format!("V{v} at depth {d} / breadth {b}: {got}"))?;
        }
    }
    Ok(format!("{} windows per variant", windows.len()))
}

fn random_extension(rng: &mut ChaCha8Rng, s: &SeqIndex, depth: usize, breadth: u32) -> SeqIndex {
    let mut t = s.clone();
    let extra = rng.gen_range(0..=depth - s.len());
    for _ in 0..extra {
        t = t.child(rng.gen_range(0..breadth));
    }
    t
}

/// Criterion (b): a tail of extensions of `s` whose first new entries
/// strictly increase.
fn finite_witness(rng: &mut ChaCha8Rng, f: &FanApprox, depth: usize, breadth: u32) -> Witness {
    let inner: Vec<&SeqIndex> = f.entries().iter().map(|e| &e.s).filter(|s| s.len() < depth).collect();
    let s = inner[rng.gen_range(0..inner.len())].clone();
    let all = f.entries();
    let mut seq: Vec<SeqIndex> = (0..rng.gen_range(0..4)).map(|_| all[rng.gen_range(0..all.len())].s.clone()).collect();
    let start = rng.gen_range(0..breadth - 1);
    seq.push(random_extension(rng, &s.child(start), depth, breadth));
    let mut c = start + 1;
    while c < breadth {
        seq.push(random_extension(rng, &s.child(c), depth, breadth));
        c += rng.gen_range(1..=2);
    }
    Witness::Finite { seq, limit: s }
}

/// Criterion (a): terms agreeing with a leaf `f` to increasing depth,
/// ending at `f`.
fn branch_witness(rng: &mut ChaCha8Rng, depth: usize, breadth: u32) -> Witness {
    let f = SeqIndex::new((0..depth).map(|_| rng.gen_range(0..breadth)).collect());
    let chain: Vec<SeqIndex> = (1..=depth).map(|n| f.prefix(n)).collect();
    let mut seq = Vec::new();
    for n in 0..depth {
        let mut t = f.prefix(n);
        let off = (f.entries()[n] + rng.gen_range(1..breadth)) % breadth;
        t = random_extension(rng, &t.child(off), depth, breadth);
        seq.push(t);
    }
    seq.push(f);
    Witness::Branch { seq, chain }
}

fn c5_usc() -> Outcome {
    let (depth, breadth) = (4, 6);
    let fans: Vec<FanApprox> = VARIANTS.iter().map(|&v| fan(v, depth, breadth)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut finite, mut branch) = (0, 0);
    for k in 0..1000 {
        let f = &fans[k % 3];
        let w = if rng.gen_bool(0.5) {
            finite += 1;
            finite_witness(&mut rng, f, depth, breadth)
        } else {
            branch += 1;
            branch_witness(&mut rng, depth, breadth)
        };
        let rep = usc_check(f, std::slice::from_ref(&w)).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("witness {k} on V{}: {:?} {w:?}", f.variant(), rep.outcomes[0]))?;
    }

    let f = &fans[0];
    let limit = SeqIndex::new(vec![2]);
    let seq: Vec<SeqIndex> = (0..breadth).map(|i| limit.child(i)).collect();
    let raised = &f.get(&limit).unwrap().phi + &Rat::new(1, 100);
    let bad = f.with_phi(&seq[breadth as usize - 1], raised).map_err(|e| e.to_string())?;
    let rep = usc_check(&bad, &[Witness::Finite { seq, limit }]).map_err(|e| e.to_string())?;
    ensure(matches!(rep.outcomes[0], WitnessOutcome::Violation { .. }), || {
        format!("injected violation missed: {:?}", rep.outcomes[0])
    })?;
    Ok(format!("{finite} finite-limit and {branch} branch witnesses, injected violation caught"))
}

/// `x_s` by direct halving, independent of the library geometry.
fn naive_x(s: &SeqIndex) -> Rat {
    let (mut lo, mut hi) = (Rat::zero(), Rat::one());
    for &i in s.entries() {
        let w = &hi - &lo;
        let at = |j: u32| &lo + &(&w * &Rat::pow2(-(j as i64) - 1));
        let x = at(i);
        let right = if i == 0 { hi.clone() } else { at(i - 1) };
        hi = x.midpoint(&right);
        lo = x;
    }
    lo
}

/// Enumerates the window endpoints and checks, for every step, that
/// `W_n` contains the witness, is separated in height from the other
/// endpoints over `V_n` and has diameter below `2^{−n}`.
fn brute_force(f: &FanApprox, r: &ClopenBasisResult) -> Result<(), String> {
    let pts: Vec<(SeqIndex, Rat, Rat)> = f
        .entries()
        .iter()
        .filter(|e| e.phi.is_positive())
        .map(|e| (e.s.clone(), naive_x(&e.s), e.phi.clone()))
        .collect();
    ensure(pts.len() <= 50, || format!("window has {} endpoints", pts.len()))?;
    let wx = naive_x(&r.witness.s);
    let mut prev: Option<Vec<SeqIndex>> = None;
    for st in &r.trail {
        let (lo, hi) = st.v.hull();
        let over: Vec<&(SeqIndex, Rat, Rat)> = pts.iter().filter(|p| p.1 >= lo && p.1 <= hi).collect();
        let in_slab = |y: &Rat| y >= &st.a && st.b.as_ref().is_none_or(|b| y < b);
        let w: Vec<&(SeqIndex, Rat, Rat)> = over.iter().copied().filter(|p| p.2 >= r.a0 && in_slab(&p.2)).collect();
        let n = st.n;
        ensure(wx >= lo && wx <= hi && in_slab(&r.witness.phi), || format!("witness leaves W_{n}"))?;
        ensure(over.iter().all(|p| p.2 < r.a0 || in_slab(&p.2)), || format!("W_{n} is not cut out by its slab"))?;
        ensure(st.b.as_ref().is_none_or(|b| over.iter().all(|p| &p.2 != b)), || format!("endpoint on b_{n}"))?;
        let bound = Rat::pow2(-(n as i64));
        for p in &w {
            for q in &w {
                let dx = (&p.1 - &q.1).abs();
                let dy = (&p.2 - &q.2).abs();
                ensure(dx < bound && dy < bound, || format!("W_{n} has diameter ≥ 2^-{n}"))?;
            }
        }
        let members: Vec<SeqIndex> = w.iter().map(|p| p.0.clone()).collect();
        if let Some(pm) = &prev {
            ensure(members.iter().all(|m| pm.contains(m)), || format!("W_{n} not inside W_{}", n - 1))?;
        }
        prev = Some(members);
    }
    ensure(r.trail.last().map(|s| s.n) == Some(20), || "trail stops before n = 20".into())
}

fn located(f: &FanApprox, u: &[SeqIndex], a0: Rat) -> Result<ClopenBasisResult, String> {
    let r = locate(f, u, &a0, 20).map_err(|e| e.to_string())?;
    let rep = verify_basis(&r);
    ensure(rep.passed() && rep.steps == 21, || format!("verify_basis: {:?}", rep.violation))?;
    ensure(r.certification == Certification::Full, || format!("certification {}", r.certification))?;
    Ok(r)
}

fn c6_locator() -> Outcome {
    let root = [SeqIndex::empty()];
    let leg0 = [SeqIndex::new(vec![0])];
    for (d, b) in [(3, 4), (4, 6)] {
        let c = FanApprox::constant(TruncationBounds::new(d, b).unwrap(), Rat::one()).unwrap();
        located(&c, &root, Rat::new(1, 2))?;
        located(&fan(Variant::V1, d, b), &leg0, Rat::new(7, 24))?;
    }
    let small = TruncationBounds::new(2, 4).unwrap();
    let c = FanApprox::constant(small, Rat::one()).unwrap();
    brute_force(&c, &located(&c, &root, Rat::new(1, 2))?)?;
    let v1 = build_kfan(&FanSpec::canonical(Variant::V1, 2, 4).unwrap()).unwrap();
    brute_force(&v1, &located(&v1, &leg0, Rat::new(7, 24))?)?;
    Ok("constant and V1 runs to n = 20, brute force agrees on 21-index windows".into())
}

fn c7_nonrigidity() -> Outcome {
    for v in VARIANTS {
        let f = fan(v, 4, 6);
        let fb = free_box(&f).ok_or_else(|| format!("{v}: no free box"))?;
        ensure(fb.certified, || format!("{v}: box at {} not certified", fb.s))?;
        let h = nonrigidity_witness(&f).map_err(|e| e.to_string())?;
        ensure(h.f(&h.a) == h.a && h.f(&h.b) == h.b, || format!("{v}: f moves a or b"))?;
        ensure(h.f(&h.mid) != h.mid, || format!("{v}: midpoint fixed"))?;
        ensure(h.fixes_endpoints(&f), || format!("{v}: H moves a window endpoint"))?;
    }
    Ok("certified boxes and witnesses for all variants".into())
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fanlab")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("fanlab {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn c8_determinism() -> Outcome {
    let golden = |name: &str| {
        std::fs::read(std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name))
            .map_err(|e| format!("{name}: {e}"))
    };
    let jobs: [&[&str]; 4] = [
        &["build", "--variant", "2", "--depth", "3", "--breadth", "5"],
        &["build", "--variant", "3", "--depth", "3", "--breadth", "5"],
        &["render", "--mode", "intervals", "--depth", "2", "--breadth", "4"],
        &["render", "--mode", "fan", "--variant", "1", "--depth", "2", "--breadth", "4"],
    ];
    for job in jobs {
        let first = cli(job)?;
        ensure(cli(job)? == first, || format!("`{}` differs between runs", job.join(" ")))?;
    }
    ensure(cli(jobs[2])? == golden("figure1_d2_b4.svg")?, || "intervals SVG differs from golden".into())?;
    ensure(cli(jobs[3])? == golden("figure2_v1_d2_b4.svg")?, || "fan SVG differs from golden".into())?;

    let bounds = TruncationBounds::new(2, 4).unwrap();
    let v1 = fan(Variant::V1, 2, 4);
    ensure(render_intervals(&bounds, &Canvas::default()).into_bytes() == golden("figure1_d2_b4.svg")?, || {
        "library intervals SVG differs from golden".into()
    })?;
    ensure(render_fan(&v1, &Canvas::default()).into_bytes() == golden("figure2_v1_d2_b4.svg")?, || {
        "library fan SVG differs from golden".into()
    })?;
    ensure(write_fan(&v1) == write_fan(&fan(Variant::V1, 2, 4)), || "library build differs".into())?;
    Ok("builds and renders are byte-identical, golden SVGs match".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, c1_construction),
        (2, c2_claim2),
        (3, c3_certificate),
        (4, c4_classification),
        (5, c5_usc),
        (6, c6_locator),
        (7, c7_nonrigidity),
        (8, c8_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {n}: pass ({detail}; {ms} ms)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
