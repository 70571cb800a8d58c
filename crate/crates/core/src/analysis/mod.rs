//! Derived objects and finite-horizon checkers.
//!
//! * [`oracle`]: an independent brute-force transcription of the stage rule.
//! * [`structural`]: invariants of a single trace (per-class bound, d.c.e.,
//!   witness / restraint / removal discipline, the extension lemma).
//! * [`diagonal`]: the diagonal sets `X_j` and the diagonalization property.
//! * [`psi`]: the common-lower-bound procedure Ψ, the preservation property
//!   for pairs of operators, and the end-to-end reduction check.
//!
//! Every checker produces a [`VerificationReport`], a map from check name to
//! outcome. Names sort deterministically, so merged reports serialize the
//! same way regardless of evaluation order.

pub mod diagonal;
pub mod oracle;
pub mod psi;
pub mod structural;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::PriorityIndex;
use crate::Nat;

pub use diagonal::{check_property2, derive_x, DiagonalSet};
pub use oracle::{reference_run, reference_run_suite};
pub use psi::{check_property3, end_to_end_check, synthesize_psi, EvalCache, PsiEntry, PsiTable};
pub use structural::check_structural;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The finite horizon does not decide the property.
    Inconclusive,
}

/// Where a check failed. Together with the run config, `stage` is enough to
/// replay the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub stage: Nat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<Nat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requirement: Option<PriorityIndex>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl CheckOutcome {
    pub fn pass(note: impl Into<String>) -> Self {
        CheckOutcome {
            verdict: Verdict::Pass,
            note: note.into(),
            counterexample: None,
        }
    }

    pub fn inconclusive(note: impl Into<String>) -> Self {
        CheckOutcome {
            verdict: Verdict::Inconclusive,
            note: note.into(),
            counterexample: None,
        }
    }

    pub fn fail(counterexample: Counterexample) -> Self {
        CheckOutcome {
            verdict: Verdict::Fail,
            note: String::new(),
            counterexample: Some(counterexample),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: BTreeMap<String, CheckOutcome>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn single(name: impl Into<String>, outcome: CheckOutcome) -> Self {
        let mut r = VerificationReport::default();
        r.insert(name, outcome);
        r
    }

    pub fn insert(&mut self, name: impl Into<String>, outcome: CheckOutcome) {
        self.checks.insert(name.into(), outcome);
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.metadata.extend(other.metadata);
    }

    /// No check failed; inconclusive checks do not count as failures.
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&String, &CheckOutcome)> {
        self.checks
            .iter()
            .filter(|(_, o)| o.verdict == Verdict::Fail)
    }

    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.checks.get(name).map(|o| o.verdict)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
