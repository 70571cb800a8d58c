//! The append-only stage log of a construction run, its line-delimited JSON
//! form, and replay back into per-stage membership sets.
//!
//! A trace file holds one [`TraceEvent`] per executed stage followed by a
//! single [`Summary`] line. Records contain integers only and serialize with
//! a fixed key order, so equal traces are byte-identical.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{PriorityIndex, Side};
use crate::graphs::PartialGraph;
use crate::Nat;

pub const SCHEMA_VERSION: u32 = 1;

/// `P(e, j)` acted: `witness` entered `A_j` and `r(e, j)` became `restraint`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub e: Nat,
    pub j: Side,
    pub witness: Nat,
    pub restraint: Nat,
}

impl Action {
    pub fn requirement(&self) -> PriorityIndex {
        PriorityIndex::new(self.e, self.j)
    }
}

/// An element taken out of `A_side`, with the provenance of its insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Removal {
    pub n: Nat,
    pub side: Side,
    pub inserted_by: PriorityIndex,
    pub inserted_at: Nat,
}

/// Both membership sets, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub a0: Vec<Nat>,
    pub a1: Vec<Nat>,
}

impl Snapshot {
    pub fn of(sets: &[BTreeSet<Nat>; 2]) -> Self {
        Snapshot {
            a0: sets[0].iter().copied().collect(),
            a1: sets[1].iter().copied().collect(),
        }
    }
}

/// What happened at one stage. `snapshot`, when present, is the state after
/// the stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEvent {
    pub stage: Nat,
    pub action: Option<Action>,
    pub removals: Vec<Removal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<Snapshot>,
}

impl TraceEvent {
    pub fn idle(stage: Nat) -> Self {
        TraceEvent {
            stage,
            action: None,
            removals: Vec::new(),
            snapshot: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestraintEntry {
    pub e: Nat,
    pub j: Side,
    pub r: Nat,
}

/// Final line of a trace: the state at the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub schema_version: u32,
    pub horizon: Nat,
    pub a0: Vec<Nat>,
    pub a1: Vec<Nat>,
    pub restraints: Vec<RestraintEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("stage {stage}: {message}")]
    Inconsistent { stage: Nat, message: String },
}

impl Trace {
    pub fn horizon(&self) -> Nat {
        self.summary.horizon
    }

    /// Canonical line-delimited serialization.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("trace records serialize"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary).expect("trace records serialize"));
        out.push('\n');
        out
    }

    /// Strict parse of [`to_jsonl`](Self::to_jsonl) output.
    pub fn from_jsonl(text: &str) -> Result<Trace, TraceError> {
        let lines: Vec<&str> = text.lines().collect();
        let Some((last, body)) = lines.split_last() else {
            return Err(TraceError::Malformed {
                line: 1,
                message: "empty trace: missing summary line".into(),
            });
        };
        let malformed = |line: usize, e: serde_json::Error| TraceError::Malformed {
            line,
            message: e.to_string(),
        };
        let events = body
            .iter()
            .enumerate()
            .map(|(i, l)| serde_json::from_str::<TraceEvent>(l).map_err(|e| malformed(i + 1, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let summary: Summary = serde_json::from_str(last).map_err(|e| malformed(lines.len(), e))?;
        if summary.schema_version != SCHEMA_VERSION {
            return Err(TraceError::Malformed {
                line: lines.len(),
                message: format!("unsupported schema version {}", summary.schema_version),
            });
        }
        Ok(Trace { events, summary })
    }
}

/// One stay of an element in `A_side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub element: Nat,
    pub side: Side,
    pub inserted_by: PriorityIndex,
    pub inserted_at: Nat,
    pub removed_at: Option<Nat>,
}

/// A trace replayed into explicit per-stage states.
#[derive(Debug, Clone)]
pub struct Replay {
    /// `states[s]` is `(A_0[s], A_1[s])`, the sets at the start of stage `s`,
    /// for `s = 0..=horizon`.
    pub states: Vec<[BTreeSet<Nat>; 2]>,
    /// Every insertion in order, with removal stamps.
    pub memberships: Vec<Membership>,
    /// Restraints after the last stage.
    pub restraints: BTreeMap<PriorityIndex, Nat>,
    pub actions: Vec<Option<Action>>,
}

impl Replay {
    /// Replays the events. Fails only when the log cannot be interpreted:
    /// stages out of sequence, removals without an action, or removals that
    /// do not match a current membership.
    pub fn new(trace: &Trace) -> Result<Replay, TraceError> {
        let horizon = trace.summary.horizon;
        if trace.events.len() as u64 != horizon {
            return Err(TraceError::Inconsistent {
                stage: trace.events.len() as Nat,
                message: format!("{} events for horizon {}", trace.events.len(), horizon),
            });
        }
        let mut sets: [BTreeSet<Nat>; 2] = Default::default();
        let mut current: [BTreeMap<Nat, usize>; 2] = Default::default();
        let mut memberships: Vec<Membership> = Vec::new();
        let mut restraints = BTreeMap::new();
        let mut states = Vec::with_capacity(trace.events.len() + 1);
        let mut actions = Vec::with_capacity(trace.events.len());
        states.push(sets.clone());

        for (i, event) in trace.events.iter().enumerate() {
            let stage = i as Nat;
            let bad = |message: String| TraceError::Inconsistent { stage, message };
            if event.stage != stage {
                return Err(bad(format!(
                    "expected stage {stage}, found {}",
                    event.stage
                )));
            }
            if event.action.is_none() && !event.removals.is_empty() {
                return Err(bad("removals without an action".into()));
            }
            for r in &event.removals {
                let side = r.side.as_index();
                let idx = current[side].remove(&r.n).ok_or_else(|| {
                    bad(format!("removal of {} which is not in A_{}", r.n, r.side))
                })?;
                let m = &mut memberships[idx];
                if m.inserted_by != r.inserted_by || m.inserted_at != r.inserted_at {
                    return Err(bad(format!(
                        "removal of {} claims insertion by {} at {}, log says {} at {}",
                        r.n, r.inserted_by, r.inserted_at, m.inserted_by, m.inserted_at
                    )));
                }
                m.removed_at = Some(stage);
                sets[side].remove(&r.n);
            }
            if let Some(a) = event.action {
                let side = a.j.as_index();
                memberships.push(Membership {
                    element: a.witness,
                    side: a.j,
                    inserted_by: a.requirement(),
                    inserted_at: stage,
                    removed_at: None,
                });
                current[side].insert(a.witness, memberships.len() - 1);
                sets[side].insert(a.witness);
                restraints.insert(a.requirement(), a.restraint);
            }
            actions.push(event.action);
            states.push(sets.clone());
        }
        Ok(Replay {
            states,
            memberships,
            restraints,
            actions,
        })
    }

    pub fn horizon(&self) -> Nat {
        (self.states.len() - 1) as Nat
    }

    /// `A_j[s]`.
    pub fn members(&self, side: Side, stage: Nat) -> &BTreeSet<Nat> {
        &self.states[stage as usize][side.as_index()]
    }

    /// `f_{j,s}`.
    pub fn description(&self, side: Side, stage: Nat) -> PartialGraph {
        PartialGraph::CofiniteOnes(self.members(side, stage).clone())
    }

    /// The summary line this replay implies.
    pub fn summary(&self) -> Summary {
        let last = self.states.last().expect("states are never empty");
        Summary {
            schema_version: SCHEMA_VERSION,
            horizon: self.horizon(),
            a0: last[0].iter().copied().collect(),
            a1: last[1].iter().copied().collect(),
            restraints: self
                .restraints
                .iter()
                .map(|(p, &r)| RestraintEntry { e: p.e, j: p.j, r })
                .collect(),
        }
    }
}

/// Human-readable digest of a trace.
pub fn describe(trace: &Trace) -> String {
    let mut out = String::new();
    let acted: Vec<&TraceEvent> = trace.events.iter().filter(|e| e.action.is_some()).collect();
    let _ = writeln!(out, "horizon {}: {} actions", trace.horizon(), acted.len());
    for ev in acted {
        let a = ev.action.expect("filtered");
        let _ = write!(
            out,
            "  stage {:>5}: P({},{}) puts {} into A_{}",
            ev.stage, a.e, a.j, a.witness, a.j
        );
        if !ev.removals.is_empty() {
            let removed: Vec<String> = ev.removals.iter().map(|r| r.n.to_string()).collect();
            let _ = write!(out, "; removes {{{}}}", removed.join(", "));
        }
        out.push('\n');
    }
    let s = &trace.summary;
    let _ = writeln!(out, "A_0 = {:?}", s.a0);
    let _ = writeln!(out, "A_1 = {:?}", s.a1);
    for r in &s.restraints {
        let _ = writeln!(out, "r({},{}) = {}", r.e, r.j, r.r);
    }
    out
}
