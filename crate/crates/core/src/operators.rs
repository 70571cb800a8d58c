//! Staged enumeration operators: c.e. sets of axioms `(F, k)` revealed
//! stage by stage, evaluated on partial-function graphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graphs::PartialGraph;
use crate::{Code, Nat};

/// An axiom `(F, k)`: output `k` once every code in `premise` is on the
/// oracle's graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Axiom {
    pub premise: BTreeSet<Code>,
    pub output: Nat,
}

impl Axiom {
    pub fn new<I: IntoIterator<Item = Code>>(premise: I, output: Nat) -> Self {
        Axiom {
            premise: premise.into_iter().collect(),
            output,
        }
    }

    /// Least `n` with `premise ⊆ [0, n)`.
    pub fn use_bound(&self) -> Nat {
        self.premise.last().map_or(0, |&c| c + 1)
    }

    pub fn holds_on(&self, graph: &PartialGraph) -> bool {
        self.premise.iter().all(|&c| graph.contains(c))
    }
}

/// An axiom together with the stage at which it is first enumerated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StagedAxiom {
    pub stage: Nat,
    pub axiom: Axiom,
}

/// A staged enumeration operator. `W[s]` is every axiom with
/// `stage <= s`, so the axiom sets grow monotonically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumOperator {
    // sorted by stage, each axiom once at its earliest stage
    axioms: Vec<StagedAxiom>,
}

impl EnumOperator {
    pub fn new<I: IntoIterator<Item = StagedAxiom>>(axioms: I) -> Self {
        let mut earliest: BTreeMap<Axiom, Nat> = BTreeMap::new();
        for StagedAxiom { stage, axiom } in axioms {
            earliest
                .entry(axiom)
                .and_modify(|s| *s = (*s).min(stage))
                .or_insert(stage);
        }
        let mut axioms: Vec<StagedAxiom> = earliest
            .into_iter()
            .map(|(axiom, stage)| StagedAxiom { stage, axiom })
            .collect();
        axioms.sort();
        EnumOperator { axioms }
    }

    /// Each axiom enumerated at the least stage its use allows.
    pub fn eager<I: IntoIterator<Item = Axiom>>(axioms: I) -> Self {
        Self::new(axioms.into_iter().map(|axiom| StagedAxiom {
            stage: axiom.use_bound(),
            axiom,
        }))
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn staged_axioms(&self) -> &[StagedAxiom] {
        &self.axioms
    }

    /// `W[s]`.
    pub fn axioms_at(&self, stage: Nat) -> impl Iterator<Item = &Axiom> + '_ {
        self.axioms
            .iter()
            .take_while(move |a| a.stage <= stage)
            .map(|a| &a.axiom)
    }

    /// First stage-bound violation: an axiom present at a stage smaller than
    /// its use.
    pub fn use_bound_violation(&self) -> Option<&StagedAxiom> {
        self.axioms.iter().find(|a| a.axiom.use_bound() > a.stage)
    }

    /// `W^g[s]`.
    pub fn eval(&self, graph: &PartialGraph, stage: Nat) -> BTreeSet<Nat> {
        self.axioms_at(stage)
            .filter(|a| a.holds_on(graph))
            .map(|a| a.output)
            .collect()
    }

    /// Use of `k ∈ W^g[s]`, or `None` if `k` is not enumerated.
    pub fn use_of(&self, graph: &PartialGraph, stage: Nat, k: Nat) -> Option<Nat> {
        self.axioms_at(stage)
            .filter(|a| a.output == k && a.holds_on(graph))
            .map(Axiom::use_bound)
            .min()
    }

    /// Every enumerated output with its use.
    pub fn enumerate_outputs(&self, graph: &PartialGraph, stage: Nat) -> BTreeMap<Nat, Nat> {
        let mut out: BTreeMap<Nat, Nat> = BTreeMap::new();
        for a in self.axioms_at(stage).filter(|a| a.holds_on(graph)) {
            let u = a.use_bound();
            out.entry(a.output)
                .and_modify(|cur| *cur = (*cur).min(u))
                .or_insert(u);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pair;
    use crate::graphs::extends;
    use proptest::prelude::*;

    fn code(n: Nat, v: Nat) -> Code {
        pair(n, v).unwrap()
    }

    fn at(stage: Nat, premise: &[Code], output: Nat) -> StagedAxiom {
        StagedAxiom {
            stage,
            axiom: Axiom::new(premise.iter().copied(), output),
        }
    }

    #[test]
    fn eval_examples() {
        let w = EnumOperator::new([at(0, &[], 4)]);
        assert_eq!(w.eval(&PartialGraph::empty(), 0), BTreeSet::from([4]));

        let w = EnumOperator::new([at(12, &[code(3, 1)], 9)]);
        assert_eq!(
            w.eval(&PartialGraph::explicit([(3, 1)]), 12),
            BTreeSet::from([9])
        );
        assert!(w.eval(&PartialGraph::empty(), 12).is_empty());

        let w = EnumOperator::new([at(1, &[code(1, 1)], 42)]);
        let g = PartialGraph::cofinite_ones([1]);
        for s in 0..20 {
            assert!(w.eval(&g, s).is_empty());
        }
    }

    #[test]
    fn use_examples() {
        let w = EnumOperator::new([at(0, &[], 4)]);
        assert_eq!(w.use_of(&PartialGraph::empty(), 0, 4), Some(0));

        // pair(3,1) = 11, so the least n with {11} ⊆ [0,n) is 12
        let w = EnumOperator::new([at(12, &[code(3, 1)], 9)]);
        let g = PartialGraph::cofinite_ones([]);
        assert_eq!(w.use_of(&g, 12, 9), Some(12));
        assert_eq!(w.use_of(&g, 12, 7), None);
        assert_eq!(w.use_of(&g, 11, 9), None);
    }

    #[test]
    fn use_is_the_least_over_satisfied_axioms() {
        let w = EnumOperator::new([
            at(30, &[code(2, 1), code(4, 1)], 5),
            at(30, &[code(3, 1)], 5),
            at(30, &[code(1, 0)], 5),
        ]);
        let g = PartialGraph::cofinite_ones([]);
        // {7, 14} -> 15 and {11} -> 12; the value-0 premise never holds here
        assert_eq!(w.use_of(&g, 30, 5), Some(12));
        assert_eq!(w.enumerate_outputs(&g, 30), BTreeMap::from([(5, 12)]));
    }

    #[test]
    fn enumerate_outputs_examples() {
        let w = EnumOperator::new([at(0, &[], 4)]);
        assert_eq!(
            w.enumerate_outputs(&PartialGraph::empty(), 0),
            BTreeMap::from([(4, 0)])
        );

        let w = EnumOperator::new([at(12, &[code(3, 1)], 9), at(12, &[code(3, 0)], 8)]);
        let g = PartialGraph::explicit([(3, 1)]);
        assert_eq!(w.enumerate_outputs(&g, 12), BTreeMap::from([(9, 12)]));

        assert!(EnumOperator::default()
            .enumerate_outputs(&g, 100)
            .is_empty());
    }

    #[test]
    fn duplicates_keep_their_earliest_stage() {
        let w = EnumOperator::new([at(9, &[], 1), at(3, &[], 1), at(5, &[], 2)]);
        assert_eq!(w.staged_axioms().len(), 2);
        assert_eq!(w.staged_axioms()[0].stage, 3);
        assert!(w.eval(&PartialGraph::empty(), 3).contains(&1));
    }

    #[test]
    fn use_bound_validation() {
        assert!(EnumOperator::new([at(12, &[code(3, 1)], 9)])
            .use_bound_violation()
            .is_none());
        let bad = EnumOperator::new([at(11, &[code(3, 1)], 9)]);
        assert_eq!(bad.use_bound_violation().map(|a| a.stage), Some(11));
        assert!(EnumOperator::eager([Axiom::new([code(5, 1)], 0)])
            .use_bound_violation()
            .is_none());
    }

    fn arb_operator() -> impl Strategy<Value = EnumOperator> {
        let axiom = (
            0u64..40,
            prop::collection::btree_set((0u64..8, 0u64..2), 0..3),
            0u64..6,
        )
            .prop_map(|(stage, pts, k)| StagedAxiom {
                stage,
                axiom: Axiom::new(pts.into_iter().map(|(n, v)| pair(n, v).unwrap()), k),
            });
        prop::collection::vec(axiom, 0..10).prop_map(EnumOperator::new)
    }

    fn arb_graph() -> impl Strategy<Value = PartialGraph> {
        prop_oneof![
            prop::collection::btree_map(0u64..8, 0u8..2, 0..8).prop_map(PartialGraph::Explicit),
            prop::collection::btree_set(0u64..8, 0..6).prop_map(PartialGraph::CofiniteOnes),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn stage_monotone(w in arb_operator(), g in arb_graph(), s in 0u64..40, ds in 0u64..20) {
            prop_assert!(w.eval(&g, s).is_subset(&w.eval(&g, s + ds)));
        }

        #[test]
        fn oracle_monotone(
            w in arb_operator(),
            base in prop::collection::btree_set(0u64..8, 0..6),
            extra in prop::collection::btree_set(0u64..8, 0..6),
            s in 0u64..40,
        ) {
            // f = CofiniteOnes(base ∪ extra) is extended by g = CofiniteOnes(base)
            let f = PartialGraph::CofiniteOnes(base.union(&extra).copied().collect());
            let g = PartialGraph::CofiniteOnes(base);
            prop_assert!(extends(&f, &g));
            prop_assert!(w.eval(&f, s).is_subset(&w.eval(&g, s)));
        }

        #[test]
        fn use_is_sound(
            w in arb_operator(),
            exceptions in prop::collection::btree_set(0u64..8, 0..6),
            s in 0u64..40,
            poke in 0u64..12,
        ) {
            let g = PartialGraph::CofiniteOnes(exceptions.clone());
            for (k, u) in w.enumerate_outputs(&g, s) {
                prop_assert_eq!(w.use_of(&g, s, k), Some(u));
                // undefining a point whose codes all lie at or above the use
                if pair(poke, 0).unwrap() >= u {
                    let mut e = exceptions.clone();
                    e.insert(poke);
                    prop_assert!(w.eval(&PartialGraph::CofiniteOnes(e), s).contains(&k));
                }
            }
        }

        #[test]
        fn enumerate_outputs_matches_eval(w in arb_operator(), g in arb_graph(), s in 0u64..40) {
            let outs = w.enumerate_outputs(&g, s);
            let keys: BTreeSet<Nat> = outs.keys().copied().collect();
            prop_assert_eq!(keys, w.eval(&g, s));
        }
    }
}
