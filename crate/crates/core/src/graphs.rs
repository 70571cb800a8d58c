//! {0,1}-valued partial functions, identified with their graphs of coded
//! points `pair(n, v)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::arith::{self, partial_density, partial_density_of};
use crate::{Code, Density, Nat};

/// A finite partial function, or the cofinite all-ones function with a
/// finite set of undefined points (the shape of `f_{j,s}`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PartialGraph {
    Explicit(BTreeMap<Nat, u8>),
    CofiniteOnes(BTreeSet<Nat>),
}

impl PartialGraph {
    pub fn empty() -> Self {
        PartialGraph::Explicit(BTreeMap::new())
    }

    /// Builds an explicit graph; panics if a value is not a bit.
    pub fn explicit<I: IntoIterator<Item = (Nat, u8)>>(points: I) -> Self {
        let map: BTreeMap<Nat, u8> = points.into_iter().collect();
        assert!(map.values().all(|&v| v <= 1), "graph values must be bits");
        PartialGraph::Explicit(map)
    }

    pub fn cofinite_ones<I: IntoIterator<Item = Nat>>(exceptions: I) -> Self {
        PartialGraph::CofiniteOnes(exceptions.into_iter().collect())
    }

    pub fn value_at(&self, n: Nat) -> Option<u8> {
        match self {
            PartialGraph::Explicit(map) => map.get(&n).copied(),
            PartialGraph::CofiniteOnes(exceptions) => (!exceptions.contains(&n)).then_some(1),
        }
    }

    pub fn is_defined(&self, n: Nat) -> bool {
        self.value_at(n).is_some()
    }

    /// Whether the coded point `code = pair(n, v)` lies on the graph.
    pub fn contains(&self, code: Code) -> bool {
        let (n, v) = arith::unpair(code);
        v <= 1 && self.value_at(n) == Some(v as u8)
    }

    /// `graph(self) ⊆ graph(other)`, i.e. `other` extends `self`.
    pub fn is_extended_by(&self, other: &PartialGraph) -> bool {
        extends(self, other)
    }

    /// Domain restricted to `[0, bound)`.
    pub fn domain_below(&self, bound: Nat) -> BTreeSet<Nat> {
        match self {
            PartialGraph::Explicit(map) => map.range(..bound).map(|(&n, _)| n).collect(),
            PartialGraph::CofiniteOnes(exceptions) => {
                (0..bound).filter(|n| !exceptions.contains(n)).collect()
            }
        }
    }
}

/// True iff `graph(f) ⊆ graph(g)`.
pub fn extends(f: &PartialGraph, g: &PartialGraph) -> bool {
    use PartialGraph::*;
    match (f, g) {
        (CofiniteOnes(ef), CofiniteOnes(eg)) => eg.is_subset(ef),
        // an infinite graph never fits inside a finite one
        (CofiniteOnes(_), Explicit(_)) => false,
        (Explicit(mf), _) => mf.iter().all(|(&n, &v)| g.value_at(n) == Some(v)),
    }
}

/// Outcome of checking a partial function as a description of a bit
/// sequence on `[0, N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptionReport {
    pub checked_bound: Nat,
    /// Points where `f` is defined and disagrees with the sequence.
    pub error_points: Vec<Nat>,
    pub domain_partial_density: Density,
}

impl DescriptionReport {
    pub fn is_sound(&self) -> bool {
        self.error_points.is_empty()
    }
}

/// Compares `f` against `bits` on `[0, bound)`.
///
/// Panics if `bound` is zero or exceeds `bits.len()`.
pub fn check_description(f: &PartialGraph, bits: &[u8], bound: Nat) -> DescriptionReport {
    assert!(
        bound as usize <= bits.len(),
        "sequence shorter than the bound"
    );
    let error_points = (0..bound)
        .filter(|&n| f.value_at(n).is_some_and(|v| v != bits[n as usize]))
        .collect();
    let domain_partial_density = match f {
        PartialGraph::Explicit(_) => partial_density(&f.domain_below(bound), bound),
        PartialGraph::CofiniteOnes(_) => partial_density_of(|n| f.is_defined(n), bound),
    }
    .expect("bound must be at least 1");
    DescriptionReport {
        checked_bound: bound,
        error_points,
        domain_partial_density,
    }
}
