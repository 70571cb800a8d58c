//! Invariants of a single trace.
//!
//! Every item is checked over the whole run and reports its first
//! counterexample. With a functional suite at hand, the witness checks also
//! consult `Φ` and the full stage rule is re-derived at every stage.

use std::collections::{BTreeMap, BTreeSet};

use super::{CheckOutcome, Counterexample, VerificationReport};
use crate::arith::r_index;
use crate::suites::FunctionalSuite;
use crate::trace::{Action, Replay, Snapshot, Trace, TraceError};
use crate::{Nat, PriorityIndex, Side};

type Finding = Option<Counterexample>;

fn cx(
    stage: Nat,
    element: Option<Nat>,
    requirement: Option<PriorityIndex>,
    detail: String,
) -> Finding {
    Some(Counterexample {
        stage,
        element,
        requirement,
        detail,
    })
}

fn outcome(finding: Finding, note: &str) -> CheckOutcome {
    match finding {
        Some(c) => CheckOutcome::fail(c),
        None => CheckOutcome::pass(note),
    }
}

fn class_of(n: Nat) -> Option<Nat> {
    r_index(n).map(Nat::from)
}

/// Actions in stage order.
fn actions(replay: &Replay) -> Vec<(Nat, Action)> {
    replay
        .actions
        .iter()
        .enumerate()
        .filter_map(|(s, a)| a.map(|a| (s as Nat, a)))
        .collect()
}

/// Restraints in force at the start of every stage, as recorded.
fn restraints_by_stage(replay: &Replay) -> Vec<BTreeMap<PriorityIndex, Nat>> {
    let mut current = BTreeMap::new();
    let mut out = Vec::with_capacity(replay.actions.len());
    for a in &replay.actions {
        out.push(current.clone());
        if let Some(a) = a {
            current.insert(a.requirement(), a.restraint);
        }
    }
    out
}

fn stronger_restraint(restraints: &BTreeMap<PriorityIndex, Nat>, p: PriorityIndex) -> Nat {
    restraints
        .iter()
        .filter(|(q, _)| q.stronger_than(p))
        .map(|(_, &r)| r)
        .max()
        .unwrap_or(0)
}

fn per_class_bound(replay: &Replay) -> Finding {
    for (s, sets) in replay.states.iter().enumerate() {
        for side in Side::BOTH {
            let mut seen: BTreeMap<Nat, Nat> = BTreeMap::new();
            for &n in &sets[side.as_index()] {
                let Some(e) = class_of(n) else { continue };
                if let Some(prev) = seen.insert(e, n) {
                    return cx(
                        s as Nat,
                        Some(n),
                        None,
                        format!("A_{side}[{s}] holds {prev} and {n}, both in R_{e}"),
                    );
                }
            }
        }
    }
    None
}

fn members_classified(replay: &Replay) -> Finding {
    for m in &replay.memberships {
        if class_of(m.element) != Some(m.inserted_by.e) {
            return cx(
                m.inserted_at,
                Some(m.element),
                Some(m.inserted_by),
                format!(
                    "{} inserted {} which is not in R_{}",
                    m.inserted_by, m.element, m.inserted_by.e
                ),
            );
        }
    }
    None
}

fn single_entry(replay: &Replay) -> Finding {
    let mut inserted: BTreeSet<(Side, Nat)> = BTreeSet::new();
    for m in &replay.memberships {
        if !inserted.insert((m.side, m.element)) {
            return cx(
                m.inserted_at,
                Some(m.element),
                Some(m.inserted_by),
                format!("{} enters A_{} a second time", m.element, m.side),
            );
        }
    }
    None
}

fn witness_discipline(
    replay: &Replay,
    restraints: &[BTreeMap<PriorityIndex, Nat>],
    suite: Option<&FunctionalSuite>,
) -> Finding {
    for (t, a) in actions(replay) {
        let p = a.requirement();
        let w = a.witness;
        let bad = |detail: String| cx(t, Some(w), Some(p), detail);
        if p.index() >= t {
            return bad(format!(
                "{p} has index {} but acted at stage {t}",
                p.index()
            ));
        }
        if class_of(w) != Some(p.e) {
            return bad(format!("witness {w} is not in R_{}", p.e));
        }
        if w >= t {
            return bad(format!("witness {w} is not below the stage {t}"));
        }
        let r = stronger_restraint(&restraints[t as usize], p);
        if w <= r {
            return bad(format!(
                "witness {w} does not exceed the stronger restraint {r}"
            ));
        }
        if let Some(phi) = suite {
            if !phi.phi_eval(p.e, w, t).is_converged() {
                return bad(format!("Φ_{}({w})[{t}] diverges", p.e));
            }
        }
    }
    None
}

/// Re-derives the least eligible pair and its least witness at every stage.
fn stage_rule(
    replay: &Replay,
    restraints: &[BTreeMap<PriorityIndex, Nat>],
    phi: &FunctionalSuite,
) -> Finding {
    for (t, recorded) in replay.actions.iter().enumerate() {
        let t = t as Nat;
        let mut expected = None;
        for index in 0..t.min(2 * phi.len() as Nat) {
            let p = PriorityIndex::from_index(index);
            let dom: Vec<Nat> = phi
                .phi_domain(p.e, t)
                .into_iter()
                .filter(|&n| class_of(n) == Some(p.e))
                .collect();
            let a_j = replay.members(p.j, t);
            if dom.iter().any(|n| a_j.contains(n)) {
                continue;
            }
            let r = stronger_restraint(&restraints[t as usize], p);
            if let Some(&n) = dom.iter().find(|&&n| n > r) {
                expected = Some((p, n));
                break;
            }
        }
        let got = recorded.map(|a| (a.requirement(), a.witness));
        if got != expected {
            let describe = |x: Option<(PriorityIndex, Nat)>| match x {
                Some((p, n)) => format!("{p} with witness {n}"),
                None => "no action".to_string(),
            };
            return cx(
                t,
                got.or(expected).map(|(_, n)| n),
                got.or(expected).map(|(p, _)| p),
                format!(
                    "stage rule gives {}, trace records {}",
                    describe(expected),
                    describe(got)
                ),
            );
        }
    }
    None
}

fn restraint_discipline(replay: &Replay) -> Finding {
    for (t, a) in actions(replay) {
        if a.restraint != t {
            return cx(
                t,
                Some(a.witness),
                Some(a.requirement()),
                format!("restraint set to {} instead of {t}", a.restraint),
            );
        }
    }
    None
}

fn removal_soundness(trace: &Trace) -> Finding {
    for ev in &trace.events {
        let Some(a) = ev.action else { continue };
        let p = a.requirement();
        for r in &ev.removals {
            let bad = |detail: String| cx(ev.stage, Some(r.n), Some(p), detail);
            if r.side != p.j.other() {
                return bad(format!("{p} removed {} from its own side {}", r.n, r.side));
            }
            if !p.stronger_than(r.inserted_by) {
                return bad(format!("{p} removed {} inserted by {}", r.n, r.inserted_by));
            }
            if r.inserted_at >= ev.stage {
                return bad(format!(
                    "{} was inserted at {}, not before",
                    r.n, r.inserted_at
                ));
            }
        }
    }
    None
}

fn removal_completeness(replay: &Replay) -> Finding {
    for (t, a) in actions(replay) {
        let p = a.requirement();
        let side = p.j.other();
        for m in &replay.memberships {
            let current = m.inserted_at < t && m.removed_at.is_none_or(|r| r >= t);
            if m.side == side
                && current
                && p.stronger_than(m.inserted_by)
                && m.removed_at != Some(t)
            {
                return cx(
                    t,
                    Some(m.element),
                    Some(p),
                    format!(
                        "{} put by the weaker {} into A_{side} survives the action of {p}",
                        m.element, m.inserted_by
                    ),
                );
            }
        }
    }
    None
}

/// After `P(e, j)` acts at `t`, `A_{1-j}[t+1] ⊆ A_{1-j}[s]` for every `s ≤ t`
/// with no stronger action in `[s, t]`.
fn key_lemma(replay: &Replay) -> Finding {
    let acts = actions(replay);
    for (i, &(t, a)) in acts.iter().enumerate() {
        let p = a.requirement();
        let side = p.j.other();
        let first = acts[..i]
            .iter()
            .rev()
            .find(|(_, b)| b.requirement().stronger_than(p))
            .map_or(0, |(l, _)| l + 1);
        let after = replay.members(side, t + 1);
        for s in (first..=t).rev() {
            let before = replay.members(side, s);
            if let Some(&n) = after.difference(before).next() {
                return cx(
                    t,
                    Some(n),
                    Some(p),
                    format!("f_{{{side},{}}} does not extend f_{{{side},{s}}}: {n} in A_{side}[{}] but not in A_{side}[{s}]", t + 1, t + 1),
                );
            }
        }
    }
    None
}

/// A requirement acts again only after some stronger requirement acted.
fn finite_action(replay: &Replay) -> Finding {
    let acts = actions(replay);
    let mut last: BTreeMap<PriorityIndex, usize> = BTreeMap::new();
    for (i, &(t, a)) in acts.iter().enumerate() {
        let p = a.requirement();
        if let Some(&prev) = last.get(&p) {
            let injured = acts[prev + 1..i]
                .iter()
                .any(|(_, b)| b.requirement().stronger_than(p));
            if !injured {
                return cx(
                    t,
                    Some(a.witness),
                    Some(p),
                    format!(
                        "{p} acts again at {t} after {} with no stronger action between",
                        acts[prev].0
                    ),
                );
            }
        }
        last.insert(p, i);
    }
    None
}

fn summary_replay(trace: &Trace, replay: &Replay) -> Finding {
    for ev in &trace.events {
        if let Some(snap) = &ev.snapshot {
            let expected = Snapshot::of(&replay.states[ev.stage as usize + 1]);
            if *snap != expected {
                return cx(
                    ev.stage,
                    None,
                    None,
                    "snapshot disagrees with the replayed sets".into(),
                );
            }
        }
    }
    if replay.summary() != trace.summary {
        return cx(
            trace.horizon(),
            None,
            None,
            "summary disagrees with the replayed state".into(),
        );
    }
    None
}

/// Runs every structural check. A trace that cannot be replayed at all is an
/// error rather than a failed check.
pub fn check_structural(
    trace: &Trace,
    suite: Option<&FunctionalSuite>,
) -> Result<VerificationReport, TraceError> {
    let replay = Replay::new(trace)?;
    let restraints = restraints_by_stage(&replay);
    let mut report = VerificationReport::default();
    let mut put = |name: &str, finding: Finding, note: &str| {
        report.insert(format!("structural.{name}"), outcome(finding, note));
    };
    put(
        "per_class_bound",
        per_class_bound(&replay),
        "|A_j[s] ∩ R_e| <= 1 throughout",
    );
    put("members_classified", members_classified(&replay), "");
    put(
        "single_entry",
        single_entry(&replay),
        "each element enters each side at most once",
    );
    put(
        "witness_discipline",
        witness_discipline(&replay, &restraints, suite),
        "",
    );
    put("restraint_discipline", restraint_discipline(&replay), "");
    put("removal_soundness", removal_soundness(trace), "");
    put("removal_completeness", removal_completeness(&replay), "");
    put("key_lemma", key_lemma(&replay), "");
    put("finite_action", finite_action(&replay), "");
    put("summary_replay", summary_replay(trace, &replay), "");
    if let Some(phi) = suite {
        put("stage_rule", stage_rule(&replay, &restraints, phi), "");
    }
    report
        .metadata
        .insert("horizon".into(), trace.horizon().to_string());
    report
        .metadata
        .insert("actions".into(), actions(&replay).len().to_string());
    Ok(report)
}
