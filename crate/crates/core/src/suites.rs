//! Effective listings at desk scale: indexed families of staged partial
//! functionals `Φ_e` and enumeration operators `W_e`.
//!
//! Functionals are compiled from [`FunctionalSpec`] records (synthetic kinds
//! and [`MicroMachine`] programs); operators from [`OperatorSpec`] records.
//! Absent indices behave as everywhere divergent / axiomless.
//!
//! Every functional must satisfy two invariants, checked by
//! [`FunctionalSuite::validate`] on a probe grid:
//!
//! * once `Φ_e(n)[s]` converges it keeps the same value at every later stage;
//! * `Φ_e(n)[s]` converges only when `n < s`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, in_class, ArithError};
use crate::operators::{Axiom, EnumOperator, StagedAxiom};
use crate::Nat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convergence {
    Converged(u8),
    Diverged,
}

impl Convergence {
    pub fn value(self) -> Option<u8> {
        match self {
            Convergence::Converged(b) => Some(b),
            Convergence::Diverged => None,
        }
    }

    pub fn is_converged(self) -> bool {
        matches!(self, Convergence::Converged(_))
    }
}

/// A stage-approximated {0,1}-valued partial functional.
pub trait StagedFunctional: fmt::Debug + Send + Sync {
    /// `Φ(n)[s]`. Must be a pure function of its arguments.
    fn query(&self, n: Nat, stage: Nat) -> Convergence;
}

/// How bits are assigned to inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitRule {
    Zeros,
    Ones,
    Parity,
}

impl BitRule {
    pub fn bit(self, n: Nat) -> u8 {
        match self {
            BitRule::Zeros => 0,
            BitRule::Ones => 1,
            BitRule::Parity => (n % 2) as u8,
        }
    }
}

/// Values past the end of a `total_fn` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fill {
    Zeros,
    Ones,
    Parity,
    /// Cycle through the table.
    Repeat,
}

/// Values taken by a `random_partial` functional on its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueRule {
    Zeros,
    Ones,
    Parity,
    Random,
}

/// One convergence event of a `staged` functional: from `stage` on, the
/// value at `n` is `value` (`None` for divergence).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StagedPoint {
    pub n: Nat,
    pub stage: Nat,
    pub value: Option<u8>,
}

/// A functional as written in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalSpec {
    /// Constant `value`, converging on `n` at stage `n + 1`.
    TotalConst { value: u8 },
    /// `table[n]` for `n` in range, `fill` beyond.
    TotalFn { table: Vec<u8>, fill: Fill },
    /// Diverges exactly on `R_class`; elsewhere constant `value`.
    UndefinedOnClass {
        class: u32,
        #[serde(default)]
        value: u8,
    },
    /// `inner` slowed down by `slope * n + offset` stages.
    Delayed {
        inner: Box<FunctionalSpec>,
        #[serde(default)]
        slope: Nat,
        #[serde(default)]
        offset: Nat,
    },
    /// Each `n` is in the domain independently with probability `density`,
    /// converging up to `max_delay` stages late.
    RandomPartial {
        density: f64,
        values: ValueRule,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default)]
        max_delay: Nat,
    },
    /// Everywhere divergent.
    Empty,
    /// Explicit convergence history per point. Not checked for stability
    /// when written; validation does that.
    Staged { points: Vec<StagedPoint> },
    /// A register-machine program; see [`MicroMachine`].
    Machine { program: Vec<Instr> },
}

/// An operator as written in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Empty,
    /// Hand-written axioms; premise entries are graph points `[n, v]`.
    Axioms {
        axioms: Vec<AxiomSpec>,
    },
    /// For each `n < limit`, an axiom emitting `pair(n, target(n))` (flipped
    /// on `corrupt`). With `guard_modulus = m` the premise is the single
    /// graph point `(n mod m, 1)`; without it the premise is empty. The axiom
    /// for `n` appears at `max(use, start + n / per_stage)`.
    Describe {
        target: BitRule,
        limit: Nat,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        guard_modulus: Option<Nat>,
        #[serde(default)]
        start: Nat,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        per_stage: Option<Nat>,
        #[serde(default)]
        corrupt: Vec<Nat>,
    },
    /// Machine-enumerated axioms: code `c < code_limit` accepted after `t`
    /// steps enumerates the axiom coded by `c = pair(x, k)`, whose premise is
    /// the set of bit positions of `x`.
    Machine {
        program: Vec<Instr>,
        code_limit: Nat,
        step_budget: Nat,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Nat>,
    pub premise: Vec<[Nat; 2]>,
    pub output: OutputSpec,
}

/// Either a raw natural or a coded pair `[n, k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutputSpec {
    Raw(Nat),
    Pair([Nat; 2]),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    #[serde(default)]
    pub functionals: Vec<FunctionalSpec>,
    #[serde(default)]
    pub operators: Vec<OperatorSpec>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error("functional {e}: monotone-stability violated at n={n}: converged to {value} at stage {stage}, but at stage {later} it is {observed:?}")]
    Unstable {
        e: usize,
        n: Nat,
        stage: Nat,
        later: Nat,
        value: u8,
        observed: Convergence,
    },
    #[error("functional {e}: stage bound violated: converged at n={n} by stage {stage} <= n")]
    StageBound { e: usize, n: Nat, stage: Nat },
    #[error("functional {e}: value {value} at n={n}, stage {stage} is not a bit")]
    NotABit {
        e: usize,
        n: Nat,
        stage: Nat,
        value: u8,
    },
    #[error("operator {index}: axiom with use {use_bound} present at stage {stage}")]
    UseBound {
        index: usize,
        stage: Nat,
        use_bound: Nat,
    },
    #[error("functional {index}: {reason}")]
    InvalidFunctional { index: usize, reason: String },
    #[error("operator {index}: {reason}")]
    InvalidOperator { index: usize, reason: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

// ---------------------------------------------------------------------------
// compiled functionals

#[derive(Debug)]
struct Constant(u8);

impl StagedFunctional for Constant {
    fn query(&self, n: Nat, stage: Nat) -> Convergence {
        if n < stage {
            Convergence::Converged(self.0)
        } else {
            Convergence::Diverged
        }
    }
}

#[derive(Debug)]
struct Table {
    table: Vec<u8>,
    fill: Fill,
}

impl StagedFunctional for Table {
    fn query(&self, n: Nat, stage: Nat) -> Convergence {
        if n >= stage {
            return Convergence::Diverged;
        }
        let v = match self.table.get(n as usize) {
            Some(&v) => v,
            None => match self.fill {
                Fill::Zeros => 0,
                Fill::Ones => 1,
                Fill::Parity => (n % 2) as u8,
                Fill::Repeat if self.table.is_empty() => 0,
                Fill::Repeat => self.table[n as usize % self.table.len()],
            },
        };
        Convergence::Converged(v)
    }
}

#[derive(Debug)]
struct UndefinedOnClass {
    class: u32,
    value: u8,
}

impl StagedFunctional for UndefinedOnClass {
    fn query(&self, n: Nat, stage: Nat) -> Convergence {
        if n < stage && !in_class(n, self.class) {
            Convergence::Converged(self.value)
        } else {
            Convergence::Diverged
        }
    }
}

#[derive(Debug)]
struct Delayed {
    inner: Arc<dyn StagedFunctional>,
    slope: Nat,
    offset: Nat,
}

impl StagedFunctional for Delayed {
    fn query(&self, n: Nat, stage: Nat) -> Convergence {
        let delay = self.slope.saturating_mul(n).saturating_add(self.offset);
        match stage.checked_sub(delay) {
            Some(s) => self.inner.query(n, s),
            None => Convergence::Diverged,
        }
    }
}

#[derive(Debug)]
struct RandomPartial {
    density: f64,
    values: ValueRule,
    seed: u64,
    max_delay: Nat,
}

impl RandomPartial {
    /// Per-point draw from an independent stream, so queries stay pure and
    /// order independent.
    fn draw(&self, n: Nat) -> Option<(Nat, u8)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(n);
        if rng.random::<f64>() >= self.density {
            return None;
        }
        let delay = rng.random_range(0..=self.max_delay);
        let v = match self.values {
            ValueRule::Zeros => 0,
            ValueRule::Ones => 1,
            ValueRule::Parity => (n % 2) as u8,
            ValueRule::Random => u8::from(rng.random::<bool>()),
        };
        Some((n.saturating_add(1).saturating_add(delay), v))
    }
}

impl StagedFunctional for RandomPartial {
    fn query(&self, n: Nat, stage: Nat) -> Convergence {
        if n >= stage {
            return Convergence::Diverged;
        }
        match self.draw(n) {
            Some((at, v)) if at <= stage => Convergence::Converged(v),
            _ => Convergence::Diverged,
        }
    }
}

#[derive(Debug)]
struct Nowhere;

impl StagedFunctional for Nowhere {
    fn query(&self, _n: Nat, _stage: Nat) -> Convergence {
        Convergence::Diverged
    }
}

#[derive(Debug)]
struct Staged(BTreeMap<Nat, BTreeMap<Nat, Option<u8>>>);

impl StagedFunctional for Staged {
    fn query(&self, n: Nat, stage: Nat) -> Convergence {
        self.0
            .get(&n)
            .and_then(|history| history.range(..=stage).next_back())
            .and_then(|(_, v)| *v)
            .map_or(Convergence::Diverged, Convergence::Converged)
    }
}

// ---------------------------------------------------------------------------
// micro register machine

/// Register-machine instruction.
///
/// `DecJz(r, addr)` jumps to `addr` when register `r` is zero and otherwise
/// decrements it and falls through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Instr {
    Inc(usize),
    DecJz(usize, usize),
    Halt,
}

pub const MAX_REGISTERS: usize = 16;

impl FromStr for Instr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| format!("bad operand `{t}` in `{s}`"))
        };
        match parts.as_slice() {
            ["INC", r] => Ok(Instr::Inc(num(r)?)),
            ["DECJZ", r, addr] => Ok(Instr::DecJz(num(r)?, num(addr)?)),
            ["HALT"] => Ok(Instr::Halt),
            _ => Err(format!("unknown instruction `{s}`")),
        }
    }
}

impl TryFrom<String> for Instr {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Inc(r) => write!(f, "INC {r}"),
            Instr::DecJz(r, a) => write!(f, "DECJZ {r} {a}"),
            Instr::Halt => write!(f, "HALT"),
        }
    }
}

impl From<Instr> for String {
    fn from(i: Instr) -> String {
        i.to_string()
    }
}

/// A counter machine with input in register 0 and output register 0 mod 2.
/// Running off the end of the program halts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroMachine {
    program: Vec<Instr>,
    registers: usize,
}

impl MicroMachine {
    pub fn new(program: Vec<Instr>) -> Result<Self, String> {
        let mut registers = 1;
        for (pc, instr) in program.iter().enumerate() {
            let (r, target) = match *instr {
                Instr::Inc(r) => (r, None),
                Instr::DecJz(r, a) => (r, Some(a)),
                Instr::Halt => continue,
            };
            if r >= MAX_REGISTERS {
                return Err(format!("instruction {pc}: register {r} out of range"));
            }
            if target.is_some_and(|a| a > program.len()) {
                return Err(format!("instruction {pc}: jump past end of program"));
            }
            registers = registers.max(r + 1);
        }
        Ok(MicroMachine { program, registers })
    }

    pub fn program(&self) -> &[Instr] {
        &self.program
    }

    /// Runs on `input` for at most `max_steps` instructions; on halting
    /// returns the step count and register 0.
    pub fn run(&self, input: Nat, max_steps: Nat) -> Option<(Nat, Nat)> {
        let mut regs = vec![0 as Nat; self.registers];
        regs[0] = input;
        let mut pc = 0;
        let mut steps = 0;
        while let Some(&instr) = self.program.get(pc) {
            if steps == max_steps {
                return None;
            }
            steps += 1;
            match instr {
                Instr::Inc(r) => {
                    regs[r] = regs[r].saturating_add(1);
                    pc += 1;
                }
                Instr::DecJz(r, a) => {
                    if regs[r] == 0 {
                        pc = a;
                    } else {
                        regs[r] -= 1;
                        pc += 1;
                    }
                }
                Instr::Halt => return Some((steps, regs[0])),
            }
        }
        Some((steps, regs[0]))
    }
}

impl StagedFunctional for MicroMachine {
    /// Converged iff the machine halts on `n` within `stage` steps and
    /// `n < stage`.
    fn query(&self, n: Nat, stage: Nat) -> Convergence {
        if n >= stage {
            return Convergence::Diverged;
        }
        match self.run(n, stage) {
            Some((_, r0)) => Convergence::Converged((r0 % 2) as u8),
            None => Convergence::Diverged,
        }
    }
}

// ---------------------------------------------------------------------------
// suites

/// The probe grid used to validate a suite: indices `e < indices`, points
/// `n < points`, stages `s < stages`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeGrid {
    pub indices: usize,
    pub points: Nat,
    pub stages: Nat,
}

/// `Φ_0, Φ_1, …`
#[derive(Debug, Clone, Default)]
pub struct FunctionalSuite {
    entries: Vec<Arc<dyn StagedFunctional>>,
}

impl FunctionalSuite {
    pub fn from_functionals(entries: Vec<Arc<dyn StagedFunctional>>) -> Self {
        FunctionalSuite { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn phi_eval(&self, e: Nat, n: Nat, stage: Nat) -> Convergence {
        usize::try_from(e)
            .ok()
            .and_then(|i| self.entries.get(i))
            .map_or(Convergence::Diverged, |f| f.query(n, stage))
    }

    /// `dom Φ_e[s]`.
    pub fn phi_domain(&self, e: Nat, stage: Nat) -> BTreeSet<Nat> {
        if e as usize >= self.entries.len() {
            return BTreeSet::new();
        }
        (0..stage)
            .filter(|&n| self.phi_eval(e, n, stage).is_converged())
            .collect()
    }

    /// Checks stability, the stage bound and bit values on the grid.
    pub fn validate(&self, grid: ProbeGrid) -> Result<(), SuiteError> {
        for e in 0..grid.indices.min(self.entries.len()) {
            for n in 0..grid.points {
                let mut first: Option<(Nat, u8)> = None;
                for s in 0..grid.stages {
                    let c = self.phi_eval(e as Nat, n, s);
                    if let Convergence::Converged(v) = c {
                        if v > 1 {
                            return Err(SuiteError::NotABit {
                                e,
                                n,
                                stage: s,
                                value: v,
                            });
                        }
                        if n >= s {
                            return Err(SuiteError::StageBound { e, n, stage: s });
                        }
                    }
                    match (first, c) {
                        (None, Convergence::Converged(v)) => first = Some((s, v)),
                        (Some((stage, value)), observed)
                            if observed != Convergence::Converged(value) =>
                        {
                            return Err(SuiteError::Unstable {
                                e,
                                n,
                                stage,
                                later: s,
                                value,
                                observed,
                            });
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }
}

/// `W_0, W_1, …`
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OperatorSuite {
    entries: Vec<EnumOperator>,
}

impl OperatorSuite {
    pub fn new(entries: Vec<EnumOperator>) -> Self {
        OperatorSuite { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, e: Nat) -> Option<&EnumOperator> {
        usize::try_from(e).ok().and_then(|i| self.entries.get(i))
    }

    /// `W_e`, axiomless when absent.
    pub fn operator(&self, e: Nat) -> EnumOperator {
        self.get(e).cloned().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), SuiteError> {
        for (index, w) in self.entries.iter().enumerate() {
            if let Some(bad) = w.use_bound_violation() {
                return Err(SuiteError::UseBound {
                    index,
                    stage: bad.stage,
                    use_bound: bad.axiom.use_bound(),
                });
            }
        }
        Ok(())
    }
}

/// Derives the per-entry seed of a randomized functional that has none.
fn entry_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.random()
}

fn compile_functional(
    spec: &FunctionalSpec,
    index: usize,
    seed: u64,
) -> Result<Arc<dyn StagedFunctional>, SuiteError> {
    let invalid = |reason: String| SuiteError::InvalidFunctional { index, reason };
    let bit = |v: u8| {
        if v <= 1 {
            Ok(v)
        } else {
            Err(invalid(format!("value {v} is not a bit")))
        }
    };
    Ok(match spec {
        FunctionalSpec::TotalConst { value } => Arc::new(Constant(bit(*value)?)),
        FunctionalSpec::TotalFn { table, fill } => {
            for &v in table {
                bit(v)?;
            }
            Arc::new(Table {
                table: table.clone(),
                fill: *fill,
            })
        }
        FunctionalSpec::UndefinedOnClass { class, value } => Arc::new(UndefinedOnClass {
            class: *class,
            value: bit(*value)?,
        }),
        FunctionalSpec::Delayed {
            inner,
            slope,
            offset,
        } => Arc::new(Delayed {
            inner: compile_functional(inner, index, seed)?,
            slope: *slope,
            offset: *offset,
        }),
        FunctionalSpec::RandomPartial {
            density,
            values,
            seed: own,
            max_delay,
        } => {
            if !(0.0..=1.0).contains(density) {
                return Err(invalid(format!("density {density} outside [0, 1]")));
            }
            Arc::new(RandomPartial {
                density: *density,
                values: *values,
                seed: own.unwrap_or_else(|| entry_seed(seed, index)),
                max_delay: *max_delay,
            })
        }
        FunctionalSpec::Empty => Arc::new(Nowhere),
        FunctionalSpec::Staged { points } => {
            let mut history: BTreeMap<Nat, BTreeMap<Nat, Option<u8>>> = BTreeMap::new();
            for p in points {
                if let Some(v) = p.value {
                    bit(v)?;
                }
                if history
                    .entry(p.n)
                    .or_default()
                    .insert(p.stage, p.value)
                    .is_some()
                {
                    return Err(invalid(format!(
                        "duplicate point n={} stage={}",
                        p.n, p.stage
                    )));
                }
            }
            Arc::new(Staged(history))
        }
        FunctionalSpec::Machine { program } => {
            Arc::new(MicroMachine::new(program.clone()).map_err(invalid)?)
        }
    })
}

fn compile_operator(spec: &OperatorSpec, index: usize) -> Result<EnumOperator, SuiteError> {
    let invalid = |reason: String| SuiteError::InvalidOperator { index, reason };
    match spec {
        OperatorSpec::Empty => Ok(EnumOperator::default()),
        OperatorSpec::Axioms { axioms } => {
            let mut staged = Vec::with_capacity(axioms.len());
            for a in axioms {
                let mut premise = BTreeSet::new();
                for &[n, v] in &a.premise {
                    if v > 1 {
                        return Err(invalid(format!(
                            "premise point ({n}, {v}) is not a graph point"
                        )));
                    }
                    premise.insert(arith::pair(n, v)?);
                }
                let output = match a.output {
                    OutputSpec::Raw(k) => k,
                    OutputSpec::Pair([n, k]) => arith::pair(n, k)?,
                };
                let axiom = Axiom { premise, output };
                let stage = a.stage.unwrap_or_else(|| axiom.use_bound());
                staged.push(StagedAxiom { stage, axiom });
            }
            Ok(EnumOperator::new(staged))
        }
        OperatorSpec::Describe {
            target,
            limit,
            guard_modulus,
            start,
            per_stage,
            corrupt,
        } => {
            if *guard_modulus == Some(0) || *per_stage == Some(0) {
                return Err(invalid(
                    "guard_modulus and per_stage must be positive".into(),
                ));
            }
            let corrupt: BTreeSet<Nat> = corrupt.iter().copied().collect();
            let mut staged = Vec::with_capacity(*limit as usize);
            for n in 0..*limit {
                let premise = match guard_modulus {
                    Some(m) => BTreeSet::from([arith::pair(n % m, 1)?]),
                    None => BTreeSet::new(),
                };
                let k = target.bit(n) ^ u8::from(corrupt.contains(&n));
                let axiom = Axiom {
                    premise,
                    output: arith::pair(n, k as Nat)?,
                };
                let appear = start + per_stage.map_or(0, |r| n / r);
                staged.push(StagedAxiom {
                    stage: appear.max(axiom.use_bound()),
                    axiom,
                });
            }
            Ok(EnumOperator::new(staged))
        }
        OperatorSpec::Machine {
            program,
            code_limit,
            step_budget,
        } => {
            let machine = MicroMachine::new(program.clone()).map_err(invalid)?;
            let mut staged = Vec::new();
            for c in 0..*code_limit {
                let Some((steps, _)) = machine.run(c, *step_budget) else {
                    continue;
                };
                let (set_code, k) = arith::unpair(c);
                let premise: BTreeSet<Nat> = (0..64).filter(|i| set_code >> i & 1 == 1).collect();
                let axiom = Axiom { premise, output: k };
                let stage = steps.max(c + 1).max(axiom.use_bound());
                staged.push(StagedAxiom { stage, axiom });
            }
            Ok(EnumOperator::new(staged))
        }
    }
}

/// Compiles and validates both suites.
pub fn build_suite(
    spec: &SuiteSpec,
    seed: u64,
    grid: ProbeGrid,
) -> Result<(FunctionalSuite, OperatorSuite), SuiteError> {
    let functionals = spec
        .functionals
        .iter()
        .enumerate()
        .map(|(i, f)| compile_functional(f, i, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let operators = spec
        .operators
        .iter()
        .enumerate()
        .map(|(i, w)| compile_operator(w, i))
        .collect::<Result<Vec<_>, _>>()?;
    let functionals = FunctionalSuite::from_functionals(functionals);
    let operators = OperatorSuite::new(operators);
    functionals.validate(grid)?;
    operators.validate()?;
    Ok((functionals, operators))
}
