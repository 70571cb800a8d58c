//! Brute-force reference for the construction.
//!
//! A direct transcription of the stage rule that shares nothing with the
//! engine beyond the suite and the trace record types: every stage it
//! recomputes `A_j[s]` from the insertion log, each restraint from the list
//! of past actions, and `dom Φ_e[s]` by querying every `n < s`. Cost is
//! roughly quadratic in the horizon per functional; intended for horizons up
//! to about 10,000.

use std::collections::BTreeSet;

use crate::arith::r_index;
use crate::config::RunConfig;
use crate::suites::{FunctionalSuite, SuiteError};
use crate::trace::{
    Action, Removal, RestraintEntry, Snapshot, Summary, Trace, TraceEvent, SCHEMA_VERSION,
};
use crate::{Nat, PriorityIndex, Side};

struct Insertion {
    n: Nat,
    side: Side,
    by: PriorityIndex,
    at: Nat,
    removed: bool,
}

fn members(log: &[Insertion], side: Side) -> BTreeSet<Nat> {
    log.iter()
        .filter(|i| i.side == side && !i.removed)
        .map(|i| i.n)
        .collect()
}

fn restraint(acts: &[(Nat, PriorityIndex)], p: PriorityIndex) -> Nat {
    acts.iter()
        .rev()
        .find(|(_, q)| *q == p)
        .map_or(0, |(stage, _)| *stage)
}

pub fn reference_run(config: &RunConfig) -> Result<Trace, SuiteError> {
    let (functionals, _) = config.build()?;
    Ok(reference_run_suite(
        &functionals,
        config.horizon,
        config.snapshot_every,
    ))
}

pub fn reference_run_suite(suite: &FunctionalSuite, horizon: Nat, snapshot_every: Nat) -> Trace {
    let mut log: Vec<Insertion> = Vec::new();
    let mut acts: Vec<(Nat, PriorityIndex)> = Vec::new();
    let mut events = Vec::new();

    for s in 0..horizon {
        let mut chosen = None;
        for index in 0..s {
            let p = PriorityIndex::from_index(index);
            let a_j = members(&log, p.j);
            let candidates: Vec<Nat> = suite
                .phi_domain(p.e, s)
                .into_iter()
                .filter(|&n| r_index(n).map(Nat::from) == Some(p.e))
                .collect();
            if candidates.iter().any(|n| a_j.contains(n)) {
                continue;
            }
            let eligible = candidates
                .into_iter()
                .find(|&n| (0..index).all(|i| n > restraint(&acts, PriorityIndex::from_index(i))));
            if let Some(n) = eligible {
                chosen = Some((p, n));
                break;
            }
        }

        let mut event = TraceEvent::idle(s);
        if let Some((p, n)) = chosen {
            let mut removals = Vec::new();
            for ins in log.iter_mut() {
                if ins.side == p.j.other() && !ins.removed && ins.by.index() > p.index() {
                    ins.removed = true;
                    removals.push(Removal {
                        n: ins.n,
                        side: ins.side,
                        inserted_by: ins.by,
                        inserted_at: ins.at,
                    });
                }
            }
            removals.sort_by_key(|r| r.n);
            log.push(Insertion {
                n,
                side: p.j,
                by: p,
                at: s,
                removed: false,
            });
            acts.push((s, p));
            event.action = Some(Action {
                e: p.e,
                j: p.j,
                witness: n,
                restraint: s,
            });
            event.removals = removals;
        }
        if snapshot_every > 0 && (s + 1) % snapshot_every == 0 {
            event.snapshot = Some(Snapshot {
                a0: members(&log, Side::Zero).into_iter().collect(),
                a1: members(&log, Side::One).into_iter().collect(),
            });
        }
        events.push(event);
    }

    let mut acted: Vec<PriorityIndex> = acts.iter().map(|(_, p)| *p).collect();
    acted.sort();
    acted.dedup();
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        horizon,
        a0: members(&log, Side::Zero).into_iter().collect(),
        a1: members(&log, Side::One).into_iter().collect(),
        restraints: acted
            .into_iter()
            .map(|p| RestraintEntry {
                e: p.e,
                j: p.j,
                r: restraint(&acts, p),
            })
            .collect(),
    };
    Trace { events, summary }
}
