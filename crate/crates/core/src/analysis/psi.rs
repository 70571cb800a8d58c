//! The common-lower-bound procedure Ψ and the preservation property for a
//! pair of operators.
//!
//! For operators `W_{e0}`, `W_{e1}` write `E_j[u] = W_{e_j}^{f_{j,u}}[u]`
//! for `u = 0..=T`. Ψ searches for the least `s` and then the least `k <= 1`
//! with `pair(n, k) ∈ E_0[s] ∩ E_1[s]`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CheckOutcome, Counterexample, VerificationReport};
use crate::arith::{pair, unpair};
use crate::config::ReductionSpec;
use crate::suites::OperatorSuite;
use crate::trace::Replay;
use crate::{Density, Nat, PriorityIndex, Side};

/// Memoized `E_j[u]` series, keyed by operator index and side.
pub struct EvalCache<'a> {
    replay: &'a Replay,
    ops: &'a OperatorSuite,
    series: BTreeMap<(Nat, Side), Vec<BTreeSet<Nat>>>,
}

impl<'a> EvalCache<'a> {
    pub fn new(replay: &'a Replay, ops: &'a OperatorSuite) -> Self {
        EvalCache {
            replay,
            ops,
            series: BTreeMap::new(),
        }
    }

    pub fn horizon(&self) -> Nat {
        self.replay.horizon()
    }

    /// `E[u] = W_e^{f_{side,u}}[u]` for `u = 0..=T`.
    pub fn series(&mut self, e: Nat, side: Side) -> &[BTreeSet<Nat>] {
        let (replay, ops) = (self.replay, self.ops);
        self.series.entry((e, side)).or_insert_with(|| {
            let w = ops.operator(e);
            (0..=replay.horizon())
                .map(|u| w.eval(&replay.description(side, u), u))
                .collect()
        })
    }

    fn pair_series(&mut self, e0: Nat, e1: Nat) -> [Vec<BTreeSet<Nat>>; 2] {
        [
            self.series(e0, Side::Zero).to_vec(),
            self.series(e1, Side::One).to_vec(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiEntry {
    pub value: u8,
    /// Least stage at which the value was found.
    pub stage: Nat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiTable {
    pub e0: Nat,
    pub e1: Nat,
    pub horizon: Nat,
    pub entries: BTreeMap<Nat, PsiEntry>,
}

impl PsiTable {
    pub fn get(&self, n: Nat) -> Option<u8> {
        self.entries.get(&n).map(|e| e.value)
    }

    /// `|dom Ψ ∩ [0, bound)| / bound`.
    pub fn density(&self, bound: Nat) -> Density {
        Density::new(self.entries.range(..bound).count() as Nat, bound)
    }
}

pub fn synthesize_psi(replay: &Replay, ops: &OperatorSuite, e0: Nat, e1: Nat) -> PsiTable {
    let mut cache = EvalCache::new(replay, ops);
    let [left, right] = cache.pair_series(e0, e1);
    let mut entries = BTreeMap::new();
    for (s, (l, r)) in left.iter().zip(&right).enumerate() {
        // codes ascend, and pair(n, 0) < pair(n, 1): the least k comes first
        for &code in l.intersection(r) {
            let (n, k) = unpair(code);
            if k <= 1 {
                entries.entry(n).or_insert(PsiEntry {
                    value: k as u8,
                    stage: s as Nat,
                });
            }
        }
    }
    PsiTable {
        e0,
        e1,
        horizon: replay.horizon(),
        entries,
    }
}

/// For every stage `u`, the least requirement acting at some stage `>= u`
/// and its first action stage `>= u`.
fn least_actor_from(replay: &Replay) -> Vec<Option<(PriorityIndex, Nat)>> {
    let horizon = replay.horizon() as usize;
    let mut out = vec![None; horizon + 1];
    for s in (0..horizon).rev() {
        out[s] = out[s + 1];
        if let Some(a) = replay.actions[s] {
            let p = a.requirement();
            if out[s].is_none_or(|(q, _): (PriorityIndex, Nat)| p.index() <= q.index()) {
                out[s] = Some((p, s as Nat));
            }
        }
    }
    out
}

/// Last stage `u <= T` with `x ∉ series[u]`, for every `x` in the union.
fn last_absence(series: &[BTreeSet<Nat>], universe: &BTreeSet<Nat>) -> BTreeMap<Nat, Option<Nat>> {
    universe
        .iter()
        .map(|&x| {
            let last = series.iter().rposition(|set| !set.contains(&x));
            (x, last.map(|u| u as Nat))
        })
        .collect()
}

/// Finite form of: if `x ∈ W_{e0}^{f_0} ∩ W_{e1}^{f_1}` at some stage then
/// `x ∈ W_{e_j}^{f_j}` for some `j`.
///
/// For every stage `s` and every `x ∈ E_0[s] ∩ E_1[s]`, let `P` be the least
/// requirement acting at a stage `>= s` and `t` its first such stage. From
/// the protection stage `t + 1` (or `s` when nothing acts) to the horizon,
/// `x` must stay in `E_j` for some fixed `j`.
pub fn check_property3(
    replay: &Replay,
    ops: &OperatorSuite,
    e0: Nat,
    e1: Nat,
) -> VerificationReport {
    let name = format!("property3.{e0}.{e1}");
    let mut cache = EvalCache::new(replay, ops);
    let series = cache.pair_series(e0, e1);
    let actors = least_actor_from(replay);

    let universe: BTreeSet<Nat> = series[0]
        .iter()
        .zip(&series[1])
        .flat_map(|(l, r)| l.intersection(r).copied().collect::<Vec<_>>())
        .collect();
    let absent = [
        last_absence(&series[0], &universe),
        last_absence(&series[1], &universe),
    ];

    let mut checked = 0usize;
    for (s, (l, r)) in series[0].iter().zip(&series[1]).enumerate() {
        let s = s as Nat;
        let actor = actors[s as usize];
        let protect = actor.map_or(s, |(_, t)| t + 1);
        for &x in l.intersection(r) {
            checked += 1;
            let safe = absent.iter().any(|m| m[&x].is_none_or(|u| u < protect));
            if safe {
                continue;
            }
            let first_miss = |j: usize| {
                (protect..=replay.horizon())
                    .find(|&u| !series[j][u as usize].contains(&x))
                    .expect("absent after the protection stage")
            };
            let (t0, t1) = (first_miss(0), first_miss(1));
            return VerificationReport::single(
                name,
                CheckOutcome::fail(Counterexample {
                    stage: s,
                    element: Some(x),
                    requirement: actor.map(|(p, _)| p),
                    detail: format!(
                        "{x} ∈ E_0[{s}] ∩ E_1[{s}], protection stage {protect}, \
                         missing from E_0 at {t0} and from E_1 at {t1}"
                    ),
                }),
            );
        }
    }
    VerificationReport::single(
        name,
        CheckOutcome::pass(format!(
            "{checked} (stage, output) pairs, {} outputs",
            universe.len()
        )),
    )
}

/// Ψ against the target of a reduction: every defined value correct, every
/// entry still enumerated on some side at the horizon, and the domain dense
/// enough below `bound`.
pub fn end_to_end_check(
    replay: &Replay,
    ops: &OperatorSuite,
    spec: &ReductionSpec,
) -> VerificationReport {
    let table = synthesize_psi(replay, ops, spec.e0, spec.e1);
    let horizon = replay.horizon();
    let mut report = VerificationReport::default();

    let wrong = table
        .entries
        .iter()
        .find(|(&n, entry)| entry.value != spec.target.bit(n));
    report.insert(
        "end_to_end.correctness",
        match wrong {
            None => CheckOutcome::pass(format!(
                "{} entries agree with the target",
                table.entries.len()
            )),
            Some((&n, entry)) => CheckOutcome::fail(Counterexample {
                stage: entry.stage,
                element: Some(n),
                requirement: None,
                detail: format!(
                    "Ψ({n}) = {} but the target has {}",
                    entry.value,
                    spec.target.bit(n)
                ),
            }),
        },
    );

    let mut cache = EvalCache::new(replay, ops);
    let [left, right] = cache.pair_series(spec.e0, spec.e1);
    let last = horizon as usize;
    let stale = table.entries.iter().find(|(&n, entry)| {
        let code = pair(n, Nat::from(entry.value)).expect("found codes fit");
        !left[last].contains(&code) && !right[last].contains(&code)
    });
    report.insert(
        "end_to_end.psi_soundness",
        match stale {
            None => CheckOutcome::pass(""),
            Some((&n, entry)) => CheckOutcome::fail(Counterexample {
                stage: horizon,
                element: Some(n),
                requirement: None,
                detail: format!(
                    "Ψ({n}) = {} found at {} is enumerated on neither side at the horizon",
                    entry.value, entry.stage
                ),
            }),
        },
    );

    let density = table.density(spec.bound);
    let note = format!(
        "dom Ψ density {}/{} at N = {}",
        density.numer(),
        density.denom(),
        spec.bound
    );
    report.insert(
        "end_to_end.density",
        if density >= spec.threshold {
            CheckOutcome::pass(note)
        } else {
            CheckOutcome::fail(Counterexample {
                stage: horizon,
                element: None,
                requirement: None,
                detail: format!(
                    "{note} is below the threshold {}/{}",
                    spec.threshold.numer(),
                    spec.threshold.denom()
                ),
            })
        },
    );
    report
        .metadata
        .insert("psi_entries".into(), table.entries.len().to_string());
    report
}
