//! The finite-injury construction of `A_0` and `A_1`, one stage at a time.
//!
//! At stage `s` the engine looks for the strongest requirement `P(e, j)`
//! with `2e + j < s` such that
//!
//! * `dom Φ_e[s] ∩ R_e ∩ A_j[s]` is empty, and
//! * some `n ∈ dom Φ_e[s] ∩ R_e` exceeds every restraint of a stronger
//!   requirement.
//!
//! The least such `n` enters `A_j`, every element of `A_{1-j}` that a weaker
//! requirement put there is removed, and `r(e, j)` becomes `s`. At most one
//! requirement acts per stage.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{PriorityIndex, Side};
use crate::config::RunConfig;
use crate::graphs::PartialGraph;
use crate::suites::{FunctionalSuite, SuiteError};
use crate::trace::{
    Action, Membership, Removal, RestraintEntry, Snapshot, Summary, Trace, TraceEvent,
    SCHEMA_VERSION,
};
use crate::Nat;

/// Deliberate departures from the construction, used to confirm that the
/// checkers in [`analysis`](crate::analysis) notice broken engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Faithful,
    /// Never remove anything.
    SkipRemovals,
    /// Never raise restraints.
    SkipRestraints,
    /// Remove weaker requirements' elements from the actor's own side.
    WrongRemovalSide,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstructionState {
    stage: Nat,
    memberships: Vec<Membership>,
    // element -> index into `memberships`, per side
    current: [BTreeMap<Nat, usize>; 2],
    restraints: BTreeMap<PriorityIndex, Nat>,
}

impl ConstructionState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&self) -> Nat {
        self.stage
    }

    /// `A_j[s]`.
    pub fn members(&self, side: Side) -> BTreeSet<Nat> {
        self.current[side.as_index()].keys().copied().collect()
    }

    pub fn contains(&self, side: Side, n: Nat) -> bool {
        self.current[side.as_index()].contains_key(&n)
    }

    /// `r(e, j)`, zero until the requirement first acts.
    pub fn restraint(&self, p: PriorityIndex) -> Nat {
        self.restraints.get(&p).copied().unwrap_or(0)
    }

    pub fn restraints(&self) -> &BTreeMap<PriorityIndex, Nat> {
        &self.restraints
    }

    pub fn memberships(&self) -> &[Membership] {
        &self.memberships
    }

    pub fn summary(&self) -> Summary {
        Summary {
            schema_version: SCHEMA_VERSION,
            horizon: self.stage,
            a0: self.members(Side::Zero).into_iter().collect(),
            a1: self.members(Side::One).into_iter().collect(),
            restraints: self
                .restraints
                .iter()
                .map(|(p, &r)| RestraintEntry { e: p.e, j: p.j, r })
                .collect(),
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            a0: self.current[0].keys().copied().collect(),
            a1: self.current[1].keys().copied().collect(),
        }
    }
}

/// `f_{j,s}`: value 1 off `A_j[s]`, undefined on it.
pub fn current_description(state: &ConstructionState, side: Side) -> PartialGraph {
    PartialGraph::CofiniteOnes(state.members(side))
}

/// Elements of `dom Φ_e[s] ∩ R_e`, ascending. Only the class members below
/// `s` are queried.
fn class_domain(suite: &FunctionalSuite, e: Nat, stage: Nat) -> Vec<Nat> {
    if e >= 64 {
        return Vec::new();
    }
    let base: Nat = 1 << e;
    let mut out = Vec::new();
    let mut n = base;
    while n < stage {
        if suite.phi_eval(e, n, stage).is_converged() {
            out.push(n);
        }
        n = match n.checked_add(2 * base) {
            Some(next) => next,
            None => break,
        };
    }
    out
}

/// One stage of the construction.
pub fn step(state: &mut ConstructionState, suite: &FunctionalSuite) -> TraceEvent {
    step_with(state, suite, Variant::Faithful)
}

pub fn step_with(
    state: &mut ConstructionState,
    suite: &FunctionalSuite,
    variant: Variant,
) -> TraceEvent {
    let s = state.stage;
    state.stage += 1;

    // pairs whose Φ_e is absent can never act
    let candidates = s.min(2 * suite.len() as Nat);
    let mut stronger_restraint = 0;
    let mut found = None;
    for index in 0..candidates {
        let p = PriorityIndex::from_index(index);
        let dom = class_domain(suite, p.e, s);
        let unmet = !dom.iter().any(|&n| state.contains(p.j, n));
        if unmet {
            if let Some(&n) = dom.iter().find(|&&n| n > stronger_restraint) {
                found = Some((p, n));
                break;
            }
        }
        stronger_restraint = stronger_restraint.max(state.restraint(p));
    }

    let Some((p, witness)) = found else {
        return TraceEvent::idle(s);
    };

    let removal_side = match variant {
        Variant::WrongRemovalSide => p.j,
        _ => p.j.other(),
    };
    let mut removals = Vec::new();
    if variant != Variant::SkipRemovals {
        let doomed: Vec<(Nat, usize)> = state.current[removal_side.as_index()]
            .iter()
            .filter(|(_, &idx)| p.stronger_than(state.memberships[idx].inserted_by))
            .map(|(&n, &idx)| (n, idx))
            .collect();
        for (n, idx) in doomed {
            state.current[removal_side.as_index()].remove(&n);
            let m = &mut state.memberships[idx];
            m.removed_at = Some(s);
            removals.push(Removal {
                n,
                side: removal_side,
                inserted_by: m.inserted_by,
                inserted_at: m.inserted_at,
            });
        }
    }

    state.memberships.push(Membership {
        element: witness,
        side: p.j,
        inserted_by: p,
        inserted_at: s,
        removed_at: None,
    });
    state.current[p.j.as_index()].insert(witness, state.memberships.len() - 1);
    if variant != Variant::SkipRestraints {
        state.restraints.insert(p, s);
    }

    TraceEvent {
        stage: s,
        action: Some(Action {
            e: p.e,
            j: p.j,
            witness,
            restraint: state.restraint(p),
        }),
        removals,
        snapshot: None,
    }
}

/// Runs stages `0..horizon`. With `snapshot_every = k > 0`, the event of
/// every stage `s` with `(s + 1) % k == 0` carries the post-stage sets.
pub fn run_suite(
    suite: &FunctionalSuite,
    horizon: Nat,
    snapshot_every: Nat,
    variant: Variant,
) -> (Trace, ConstructionState) {
    let mut state = ConstructionState::new();
    let mut events = Vec::with_capacity(horizon as usize);
    for s in 0..horizon {
        let mut event = step_with(&mut state, suite, variant);
        if snapshot_every > 0 && (s + 1) % snapshot_every == 0 {
            event.snapshot = Some(state.snapshot());
        }
        events.push(event);
    }
    let trace = Trace {
        events,
        summary: state.summary(),
    };
    (trace, state)
}

/// Builds the configured suite and runs the construction to its horizon.
pub fn run(config: &RunConfig) -> Result<Trace, SuiteError> {
    let (functionals, _) = config.build()?;
    Ok(run_suite(
        &functionals,
        config.horizon,
        config.snapshot_every,
        Variant::Faithful,
    )
    .0)
}
