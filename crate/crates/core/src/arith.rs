//! Pair coding, the 2-adic partition of the naturals into classes `R_e`,
//! requirement priority indices and exact finite densities.
//!
//! Everything here is generic over an unsigned primitive integer so the
//! same code serves `u32`, `u64` and `u128`; the rest of the crate works
//! with [`Nat`](crate::Nat).

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{PrimInt, Unsigned};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Nat;

/// Unsigned machine integers usable as naturals.
pub trait Natural: PrimInt + Unsigned + Integer + fmt::Debug {}

impl<T> Natural for T where T: PrimInt + Unsigned + Integer + fmt::Debug {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("pair({x}, {y}) overflows the integer width")]
    PairOverflow { x: String, y: String },
    #[error("partial density requires a bound N >= 1")]
    ZeroBound,
}

/// Triangular number `w(w+1)/2`, or `None` on overflow.
fn triangular<T: Natural>(w: T) -> Option<T> {
    let two = T::one() + T::one();
    let w1 = w.checked_add(&T::one())?;
    if w.is_even() {
        (w / two).checked_mul(&w1)
    } else {
        w.checked_mul(&(w1 / two))
    }
}

/// Cantor pairing `(x+y)(x+y+1)/2 + y`.
///
/// Overflow is reported, never wrapped.
pub fn pair<T: Natural>(x: T, y: T) -> Result<T, ArithError> {
    let overflow = || ArithError::PairOverflow {
        x: format!("{x:?}"),
        y: format!("{y:?}"),
    };
    let sum = x.checked_add(&y).ok_or_else(overflow)?;
    triangular(sum)
        .and_then(|t| t.checked_add(&y))
        .ok_or_else(overflow)
}

/// Inverse of [`pair`]. Total on `T`.
pub fn unpair<T: Natural>(z: T) -> (T, T) {
    // largest w with triangular(w) <= z, by bisection on [0, hi]
    let mut lo = T::zero();
    let mut hi = T::one();
    while triangular(hi).is_some_and(|t| t <= z) {
        hi = hi << 1;
    }
    // invariant: triangular(lo) <= z < triangular(hi) (overflow counts as > z)
    while hi - lo > T::one() {
        let mid = lo + (hi - lo) / (T::one() + T::one());
        match triangular(mid) {
            Some(t) if t <= z => lo = mid,
            _ => hi = mid,
        }
    }
    let w = lo;
    let y = z - triangular(w).expect("bisection keeps lo in range");
    (w - y, y)
}

/// The class index `e` with `n ∈ R_e`, i.e. the 2-adic valuation of `n`.
/// Zero belongs to no class.
pub fn r_index<T: Natural>(n: T) -> Option<u32> {
    if n.is_zero() {
        None
    } else {
        Some(n.trailing_zeros())
    }
}

/// Whether `n ∈ R_e`.
pub fn in_class<T: Natural>(n: T, e: u32) -> bool {
    r_index(n) == Some(e)
}

/// `|{m ∈ set : m < bound}| / bound` as an exact rational.
pub fn partial_density<T: Natural>(set: &BTreeSet<T>, bound: T) -> Result<Ratio<T>, ArithError> {
    if bound.is_zero() {
        return Err(ArithError::ZeroBound);
    }
    let count = set.range(..bound).fold(T::zero(), |acc, _| acc + T::one());
    Ok(Ratio::new(count, bound))
}

/// Partial density of the set `{m : member(m)}` below `bound`.
pub fn partial_density_of<T, F>(member: F, bound: T) -> Result<Ratio<T>, ArithError>
where
    T: Natural,
    F: Fn(T) -> bool,
{
    if bound.is_zero() {
        return Err(ArithError::ZeroBound);
    }
    let mut count = T::zero();
    let mut m = T::zero();
    while m < bound {
        if member(m) {
            count = count + T::one();
        }
        m = m + T::one();
    }
    Ok(Ratio::new(count, bound))
}

/// One of the two sets being built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Side {
    Zero,
    One,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Zero, Side::One];

    pub fn other(self) -> Side {
        match self {
            Side::Zero => Side::One,
            Side::One => Side::Zero,
        }
    }

    pub fn as_index(self) -> usize {
        self as usize
    }
}

impl From<Side> for u8 {
    fn from(side: Side) -> u8 {
        side as u8
    }
}

impl TryFrom<u8> for Side {
    type Error = String;

    fn try_from(j: u8) -> Result<Self, Self::Error> {
        match j {
            0 => Ok(Side::Zero),
            1 => Ok(Side::One),
            other => Err(format!("side must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// A positive requirement `(e, j)`; ordering is by `2e + j`, smaller is
/// stronger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorityIndex {
    pub e: Nat,
    pub j: Side,
}

impl PriorityIndex {
    pub fn new(e: Nat, j: Side) -> Self {
        PriorityIndex { e, j }
    }

    pub fn index(self) -> Nat {
        2 * self.e + self.j as Nat
    }

    pub fn from_index(index: Nat) -> Self {
        let j = if index.is_multiple_of(2) {
            Side::Zero
        } else {
            Side::One
        };
        PriorityIndex { e: index / 2, j }
    }

    /// Strictly higher priority than `other`.
    pub fn stronger_than(self, other: PriorityIndex) -> bool {
        self.index() < other.index()
    }
}

impl PartialOrd for PriorityIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PriorityIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for PriorityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({},{})", self.e, self.j)
    }
}
