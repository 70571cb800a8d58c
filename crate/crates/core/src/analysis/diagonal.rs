//! The diagonal sets `X_j` and the finite form of the diagonalization
//! property.

use serde::{Deserialize, Serialize};

use super::{CheckOutcome, Counterexample, VerificationReport};
use crate::arith::r_index;
use crate::suites::FunctionalSuite;
use crate::trace::Replay;
use crate::{Nat, PriorityIndex, Side};

/// `X_j` on `[0, bound)` as determined at the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalSet {
    pub side: Side,
    pub horizon: Nat,
    pub bound: Nat,
    pub bits: Vec<u8>,
    /// `n < bound` in `A_j[T] ∩ R_e ∩ dom Φ_e[T]`, where `X_j` is forced to
    /// differ from `Φ_e`.
    pub diagonal_witnesses: Vec<Nat>,
    /// Every `n < bound` with `Φ_{r(n)}(n)[T]` defined and different from
    /// `X_j(n)`.
    pub disagreements: Vec<Nat>,
}

/// Builds `X_j` below `bound` from the state at the end of the replay.
pub fn derive_x(replay: &Replay, suite: &FunctionalSuite, side: Side, bound: Nat) -> DiagonalSet {
    let horizon = replay.horizon();
    let members = replay.members(side, horizon);
    let mut bits = Vec::with_capacity(bound as usize);
    let mut diagonal_witnesses = Vec::new();
    let mut disagreements = Vec::new();
    for n in 0..bound {
        let phi = r_index(n).and_then(|e| suite.phi_eval(Nat::from(e), n, horizon).value());
        let bit = match phi {
            Some(v) if members.contains(&n) => {
                diagonal_witnesses.push(n);
                1 - v
            }
            _ => 1,
        };
        if phi.is_some_and(|v| v != bit) {
            disagreements.push(n);
        }
        bits.push(bit);
    }
    DiagonalSet {
        side,
        horizon,
        bound,
        bits,
        diagonal_witnesses,
        disagreements,
    }
}

/// Finite form of: if `dom Φ_e ∩ R_e` is infinite then `A_j` meets it.
///
/// Passes when `A_j[T] ∩ R_e ∩ dom Φ_e[T]` is nonempty. Fails only when the
/// last executed stage `T - 1` should have forced an action of `P(e, j)`: its
/// index is below `T - 1`, no stronger pair acted at `T - 1`, and
/// `dom Φ_e[T-1] ∩ R_e` has an element above every stronger restraint.
/// Anything else is inconclusive at this horizon.
pub fn check_property2(
    replay: &Replay,
    suite: &FunctionalSuite,
    e: Nat,
    j: Side,
) -> VerificationReport {
    let name = format!("property2.{e}.{j}");
    let p = PriorityIndex::new(e, j);
    let horizon = replay.horizon();
    let in_class = |n: &Nat| r_index(*n).map(Nat::from) == Some(e);

    let met: Vec<Nat> = replay
        .members(j, horizon)
        .iter()
        .copied()
        .filter(|n| in_class(n) && suite.phi_eval(e, *n, horizon).is_converged())
        .collect();
    if let Some(&w) = met.first() {
        let phi = suite.phi_eval(e, w, horizon).value().expect("converged");
        let x = derive_x(replay, suite, j, w + 1).bits[w as usize];
        if phi == x {
            return VerificationReport::single(
                name,
                CheckOutcome::fail(Counterexample {
                    stage: horizon,
                    element: Some(w),
                    requirement: Some(p),
                    detail: format!("X_{j}({w}) = Φ_{e}({w}) = {x}"),
                }),
            );
        }
        return VerificationReport::single(
            name,
            CheckOutcome::pass(format!(
                "witness {w}: Φ_{e}({w}) = {phi} ≠ X_{j}({w}) = {x}"
            )),
        );
    }

    let Some(last) = horizon.checked_sub(1) else {
        return VerificationReport::single(name, CheckOutcome::inconclusive("no stage executed"));
    };
    if p.index() >= last {
        return VerificationReport::single(
            name,
            CheckOutcome::inconclusive(format!("{p} is not yet active at stage {last}")),
        );
    }
    if let Some(q) = replay.actions[last as usize].map(|a| a.requirement()) {
        if q.stronger_than(p) {
            return VerificationReport::single(
                name,
                CheckOutcome::inconclusive(format!("stronger {q} acted at stage {last}")),
            );
        }
    }
    let mut stronger = 0;
    for a in replay.actions[..last as usize].iter().flatten() {
        if a.requirement().stronger_than(p) {
            stronger = stronger.max(a.restraint);
        }
    }
    let eligible = suite
        .phi_domain(e, last)
        .into_iter()
        .find(|n| in_class(n) && *n > stronger);
    match eligible {
        Some(n) => VerificationReport::single(
            name,
            CheckOutcome::fail(Counterexample {
                stage: last,
                element: Some(n),
                requirement: Some(p),
                detail: format!(
                    "{n} ∈ dom Φ_{e}[{last}] ∩ R_{e} exceeds the stronger restraint {stronger}, yet A_{j}[{horizon}] misses dom Φ_{e} ∩ R_{e}"
                ),
            }),
        ),
        None => VerificationReport::single(
            name,
            CheckOutcome::inconclusive(format!(
                "no element of dom Φ_{e}[{last}] ∩ R_{e} above the stronger restraint {stronger}"
            )),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Verdict;
    use crate::engine::{run_suite, Variant};
    use crate::suites::{build_suite, FunctionalSpec, ProbeGrid, SuiteSpec};

    fn replay_of(specs: Vec<FunctionalSpec>, horizon: Nat) -> (Replay, FunctionalSuite) {
        let grid = ProbeGrid {
            indices: 8,
            points: 40,
            stages: 40,
        };
        let phi = build_suite(
            &SuiteSpec {
                functionals: specs,
                operators: vec![],
            },
            0,
            grid,
        )
        .unwrap()
        .0;
        let (trace, _) = run_suite(&phi, horizon, 0, Variant::Faithful);
        (Replay::new(&trace).unwrap(), phi)
    }

    #[test]
    fn scenario_diagonal_set() {
        let (replay, phi) = replay_of(vec![FunctionalSpec::TotalConst { value: 0 }], 5);
        let x = derive_x(&replay, &phi, Side::Zero, 8);
        assert_eq!(x.bits, vec![1; 8]);
        assert_eq!(x.diagonal_witnesses, vec![1]);
        // Φ_0 converges to 0 on 1 and 3 by stage 5, both against X_0 = 1
        assert_eq!(x.disagreements, vec![1, 3]);

        let report = check_property2(&replay, &phi, 0, Side::Zero);
        assert_eq!(report.verdict("property2.0.0"), Some(Verdict::Pass));
    }

    #[test]
    fn constant_one_flips_the_witness() {
        let (replay, phi) = replay_of(vec![FunctionalSpec::TotalConst { value: 1 }], 5);
        let x = derive_x(&replay, &phi, Side::Zero, 8);
        assert_eq!(x.diagonal_witnesses, vec![1]);
        assert_eq!(x.bits[1], 0);
        assert!(x.bits.iter().enumerate().all(|(n, &b)| n == 1 || b == 1));
    }

    #[test]
    fn empty_suite_gives_all_ones() {
        let (replay, phi) = replay_of(vec![], 20);
        let x = derive_x(&replay, &phi, Side::One, 16);
        assert_eq!(x.bits, vec![1; 16]);
        assert!(x.diagonal_witnesses.is_empty() && x.disagreements.is_empty());
    }

    #[test]
    fn inconclusive_cases() {
        let (replay, phi) = replay_of(vec![FunctionalSpec::Empty], 30);
        let r = check_property2(&replay, &phi, 0, Side::Zero);
        assert_eq!(r.verdict("property2.0.0"), Some(Verdict::Inconclusive));

        let (replay, phi) = replay_of(vec![FunctionalSpec::TotalConst { value: 0 }], 2);
        let r = check_property2(&replay, &phi, 0, Side::Zero);
        assert_eq!(r.verdict("property2.0.0"), Some(Verdict::Inconclusive));
    }

    #[test]
    fn missing_action_is_a_failure() {
        // a hand-made trace in which P(0,0) never acts although Φ_0 is total
        let phi = build_suite(
            &SuiteSpec {
                functionals: vec![FunctionalSpec::TotalConst { value: 0 }],
                operators: vec![],
            },
            0,
            ProbeGrid {
                indices: 1,
                points: 10,
                stages: 10,
            },
        )
        .unwrap()
        .0;
        let (mut trace, _) = run_suite(&phi, 6, 0, Variant::Faithful);
        for ev in &mut trace.events {
            ev.action = None;
            ev.removals.clear();
        }
        trace.summary = crate::trace::Summary {
            a0: vec![],
            a1: vec![],
            restraints: vec![],
            ..trace.summary
        };
        let replay = Replay::new(&trace).unwrap();
        let r = check_property2(&replay, &phi, 0, Side::Zero);
        assert_eq!(r.verdict("property2.0.0"), Some(Verdict::Fail));
    }
}
