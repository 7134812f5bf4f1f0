//! The full verification report of a fan file.

use crate::analysis::{verify_kfan_conditions, KfanCertificate};
use crate::fanmodel::{
    check_monotone, check_schedule, check_variant_bounds, usc_check, BoundViolation, FanApprox, Witness,
    WitnessOutcome,
};
use crate::kfamily::verify_family;
use crate::seqindex::SeqIndex;

/// Witnesses available in every window: children converging to their
/// parent, constant sequences, and prefixes converging to each deepest branch.
pub fn standard_witnesses(fan: &FanApprox) -> Vec<Witness> {
    let mut out = Vec::new();
    for e in fan.entries() {
        let children: Vec<SeqIndex> = fan.children(&e.s).map(|c| c.s.clone()).collect();
        if !children.is_empty() {
            out.push(Witness::Finite { seq: children, limit: e.s.clone() });
        }
        out.push(Witness::Finite { seq: vec![e.s.clone(); 3], limit: e.s.clone() });
        if fan.is_leaf(&e.s) {
            let chain: Vec<SeqIndex> = e.s.prefixes().collect();
            out.push(Witness::Branch { seq: chain.clone(), chain });
        }
    }
    out
}

fn push_bounds(cert: &mut KfanCertificate, label: &str, found: Vec<BoundViolation>) {
    if found.is_empty() {
        cert.push(label, true, "");
    }
    for v in found {
        cert.push(format!("{}[s={}]", v.label, v.s), false, v.detail);
    }
}

/// Family, construction invariants, upper semi-continuity witnesses and the
/// 𝒦-fan conditions.
pub fn verify_fan(fan: &FanApprox) -> KfanCertificate {
    let mut cert = KfanCertificate::default();
    let upto = fan.entries().iter().map(|e| e.theta).max().unwrap_or(0) as usize + 1;
    let fam = verify_family(&fan.spec().family, upto);
    let detail = match fam.offending {
        Some((i, j)) => format!("K_{i} and K_{j} are order isomorphic"),
        None => format!("{} members", fam.checked),
    };
    cert.push(format!("family[upto={upto}]"), fam.passed(), detail);

    push_bounds(&mut cert, "e", check_monotone(fan));
    let bound_label = match fan.variant() {
        crate::fanmodel::Variant::V1 => "e1",
        crate::fanmodel::Variant::V2 => "e2",
        crate::fanmodel::Variant::V3 => "e3",
    };
    push_bounds(&mut cert, bound_label, check_variant_bounds(fan));
    push_bounds(&mut cert, "schedule", check_schedule(fan));

    let witnesses = standard_witnesses(fan);
    match usc_check(fan, &witnesses) {
        Ok(rep) => match rep.first_failure() {
            None => cert.push("claim1", true, format!("{} witnesses", witnesses.len())),
            Some((i, WitnessOutcome::Violation { k, detail })) => {
                cert.push("claim1", false, format!("witness {i}, term {k}: {detail}"))
            }
            Some((i, _)) => cert.push("claim1", false, format!("witness {i} does not converge")),
        },
        Err(e) => cert.push("claim1", false, e.to_string()),
    }

    cert.lines.extend(verify_kfan_conditions(fan).lines);
    cert
}
