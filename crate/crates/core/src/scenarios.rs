//! Ready-made configurations: the three-stage scenario, seeded random
//! suites, the preservation battery, the engine mutations it must catch, and
//! the parity reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ReductionSpec, RunConfig};
use crate::engine::Variant;
use crate::suites::{
    AxiomSpec, BitRule, Fill, FunctionalSpec, Instr, OperatorSpec, OutputSpec, StagedPoint,
    SuiteSpec, ValueRule,
};
use crate::{Density, Nat};

/// A named run together with the operator pair to examine.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub config: RunConfig,
    pub e0: Nat,
    pub e1: Nat,
    pub variant: Variant,
}

impl Scenario {
    fn faithful(name: &'static str, config: RunConfig, e0: Nat, e1: Nat) -> Self {
        Scenario {
            name,
            config,
            e0,
            e1,
            variant: Variant::Faithful,
        }
    }
}

/// `[total_const 0]` at horizon 5.
pub fn scenario_config() -> RunConfig {
    constant_config(0, 5)
}

pub fn constant_config(value: u8, horizon: Nat) -> RunConfig {
    RunConfig::new(
        horizon,
        SuiteSpec {
            functionals: vec![FunctionalSpec::TotalConst { value }],
            operators: vec![],
        },
    )
}

fn halt_now() -> Vec<Instr> {
    vec![Instr::Halt]
}

fn count_down() -> Vec<Instr> {
    vec![Instr::DecJz(0, 2), Instr::DecJz(1, 0), Instr::Halt]
}

/// Halts on even inputs, loops on odd ones.
fn even_only() -> Vec<Instr> {
    vec![
        Instr::DecJz(0, 4),
        Instr::DecJz(0, 3),
        Instr::DecJz(1, 0),
        Instr::DecJz(1, 3),
        Instr::Halt,
    ]
}

fn random_bit(rng: &mut ChaCha8Rng) -> u8 {
    u8::from(rng.random::<bool>())
}

fn random_leaf(rng: &mut ChaCha8Rng) -> FunctionalSpec {
    match rng.random_range(0..7) {
        0 => FunctionalSpec::TotalConst {
            value: random_bit(rng),
        },
        1 => {
            let len = rng.random_range(1..8);
            let fill =
                [Fill::Zeros, Fill::Ones, Fill::Parity, Fill::Repeat][rng.random_range(0..4)];
            FunctionalSpec::TotalFn {
                table: (0..len).map(|_| random_bit(rng)).collect(),
                fill,
            }
        }
        2 => FunctionalSpec::UndefinedOnClass {
            class: rng.random_range(0..4),
            value: random_bit(rng),
        },
        3 => FunctionalSpec::RandomPartial {
            density: rng.random_range(0.05..0.6),
            values: [
                ValueRule::Zeros,
                ValueRule::Ones,
                ValueRule::Parity,
                ValueRule::Random,
            ][rng.random_range(0..4)],
            seed: None,
            max_delay: rng.random_range(0..30),
        },
        4 => FunctionalSpec::Empty,
        5 => {
            let points = (0..rng.random_range(1..6))
                .map(|_| {
                    let n = rng.random_range(1..40);
                    StagedPoint {
                        n,
                        stage: n + 1 + rng.random_range(0..80),
                        value: Some(random_bit(rng)),
                    }
                })
                .collect::<Vec<_>>();
            // one event per point keeps the history stable
            let mut seen = std::collections::BTreeSet::new();
            FunctionalSpec::Staged {
                points: points.into_iter().filter(|p| seen.insert(p.n)).collect(),
            }
        }
        _ => FunctionalSpec::Machine {
            program: [halt_now(), count_down(), even_only()][rng.random_range(0..3)].clone(),
        },
    }
}

fn random_functional(rng: &mut ChaCha8Rng) -> FunctionalSpec {
    let leaf = random_leaf(rng);
    if rng.random_bool(0.3) {
        FunctionalSpec::Delayed {
            inner: Box::new(leaf),
            slope: rng.random_range(0..3),
            offset: rng.random_range(0..25),
        }
    } else {
        leaf
    }
}

fn random_operator(rng: &mut ChaCha8Rng) -> OperatorSpec {
    let outputs: Vec<Nat> = (0..rng.random_range(1..4))
        .map(|_| rng.random_range(0..50))
        .collect();
    let axioms = (0..rng.random_range(1..10))
        .map(|_| {
            let premise: Vec<[Nat; 2]> = (0..rng.random_range(0..3))
                .map(|_| [rng.random_range(0..12), 1])
                .collect();
            let slack = rng.random_range(0..40);
            let use_bound = premise
                .iter()
                .map(|&[n, v]| crate::arith::pair(n, v).expect("small") + 1)
                .max()
                .unwrap_or(0);
            AxiomSpec {
                stage: Some(use_bound + slack),
                premise,
                output: OutputSpec::Raw(outputs[rng.random_range(0..outputs.len())]),
            }
        })
        .collect();
    OperatorSpec::Axioms { axioms }
}

/// A seeded synthetic config: three to eight functionals of mixed kinds and
/// two hand-style axiom operators.
pub fn random_config(seed: u64, horizon: Nat) -> RunConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(3..=8);
    let functionals = (0..count).map(|_| random_functional(&mut rng)).collect();
    let operators = (0..2).map(|_| random_operator(&mut rng)).collect();
    let mut config = RunConfig::new(
        horizon,
        SuiteSpec {
            functionals,
            operators,
        },
    );
    config.seed = seed;
    config.snapshot_every = rng.random_range(0..20);
    config
}

fn point(n: Nat, stage: Nat) -> StagedPoint {
    StagedPoint {
        n,
        stage,
        value: Some(0),
    }
}

fn axiom(stage: Option<Nat>, premise: &[[Nat; 2]], output: Nat) -> AxiomSpec {
    AxiomSpec {
        stage,
        premise: premise.to_vec(),
        output: OutputSpec::Raw(output),
    }
}

fn axioms(list: Vec<AxiomSpec>) -> OperatorSpec {
    OperatorSpec::Axioms { axioms: list }
}

/// `P(1,1)` puts 6 into `A_1` at stage 40, guarded on by `W_1`; `P(0,0)`
/// acts at 50, kills `W_0`'s premise and must clear 6 again.
pub fn removal_rescue_config() -> RunConfig {
    let mut c = RunConfig::new(
        60,
        SuiteSpec {
            functionals: vec![
                FunctionalSpec::Staged {
                    points: vec![point(1, 50)],
                },
                FunctionalSpec::Staged {
                    points: vec![point(2, 3), point(6, 40)],
                },
            ],
            operators: vec![
                axioms(vec![axiom(None, &[[1, 1]], 42)]),
                axioms(vec![axiom(None, &[[6, 1]], 42)]),
            ],
        },
    );
    c.snapshot_every = 10;
    c
}

/// `P(0,0)` takes 1 at stage 10; its restraint keeps `P(0,1)` off 1, which
/// guards `W_1`.
pub fn restraint_guard_config() -> RunConfig {
    RunConfig::new(
        30,
        SuiteSpec {
            functionals: vec![
                FunctionalSpec::Staged {
                    points: vec![point(1, 10)],
                },
                FunctionalSpec::Staged {
                    points: vec![point(2, 20)],
                },
            ],
            operators: vec![
                axioms(vec![axiom(None, &[[1, 1]], 42)]),
                axioms(vec![axiom(None, &[[1, 1]], 42)]),
            ],
        },
    )
}

/// Scenario suite with `Y = parity` described by guarded operators on both
/// sides; Ψ should recover parity on most `n < 1000`.
pub fn reduction_config() -> RunConfig {
    let describe = OperatorSpec::Describe {
        target: BitRule::Parity,
        limit: 1000,
        guard_modulus: Some(32),
        start: 0,
        per_stage: None,
        corrupt: vec![],
    };
    let mut c = RunConfig::new(
        600,
        SuiteSpec {
            functionals: vec![FunctionalSpec::TotalConst { value: 0 }],
            operators: vec![describe.clone(), describe],
        },
    );
    c.reduction = Some(ReductionSpec {
        e0: 0,
        e1: 1,
        target: BitRule::Parity,
        bound: 1000,
        threshold: Density::new(9, 10),
    });
    c
}

/// Operator pairs on which the faithful construction must preserve common
/// outputs.
pub fn property3_battery() -> Vec<Scenario> {
    let scenario_suite = |operators: Vec<OperatorSpec>, horizon: Nat| {
        RunConfig::new(
            horizon,
            SuiteSpec {
                functionals: vec![FunctionalSpec::TotalConst { value: 0 }],
                operators,
            },
        )
    };
    let mut battery = vec![
        Scenario::faithful(
            "unconditional",
            scenario_suite(
                vec![
                    axioms(vec![axiom(Some(0), &[], 42)]),
                    axioms(vec![axiom(Some(0), &[], 42)]),
                ],
                30,
            ),
            0,
            1,
        ),
        Scenario::faithful(
            "premise-vs-unconditional",
            scenario_suite(
                vec![
                    axioms(vec![axiom(None, &[[1, 1]], 42)]),
                    axioms(vec![axiom(None, &[], 42)]),
                ],
                30,
            ),
            0,
            1,
        ),
        Scenario::faithful(
            "premise-injury",
            RunConfig::new(
                70,
                SuiteSpec {
                    functionals: vec![FunctionalSpec::Delayed {
                        inner: Box::new(FunctionalSpec::TotalConst { value: 1 }),
                        slope: 0,
                        offset: 48,
                    }],
                    operators: vec![
                        axioms(vec![axiom(None, &[[1, 1]], 42)]),
                        axioms(vec![axiom(None, &[[3, 1]], 42)]),
                    ],
                },
            ),
            0,
            1,
        ),
        Scenario::faithful("removal-rescue", removal_rescue_config(), 0, 1),
        Scenario::faithful("restraint-guard", restraint_guard_config(), 0, 1),
        Scenario::faithful("describe-guarded", reduction_config(), 0, 1),
        Scenario::faithful(
            "describe-unguarded",
            scenario_suite(
                vec![
                    OperatorSpec::Describe {
                        target: BitRule::Ones,
                        limit: 200,
                        guard_modulus: None,
                        start: 0,
                        per_stage: Some(2),
                        corrupt: vec![7],
                    },
                    OperatorSpec::Describe {
                        target: BitRule::Ones,
                        limit: 200,
                        guard_modulus: Some(8),
                        start: 0,
                        per_stage: Some(3),
                        corrupt: vec![],
                    },
                ],
                120,
            ),
            0,
            1,
        ),
        Scenario::faithful(
            "shared-operator",
            scenario_suite(
                vec![axioms(vec![
                    axiom(None, &[[1, 1]], 5),
                    axiom(None, &[[3, 1]], 5),
                    axiom(None, &[[2, 1], [4, 1]], 9),
                ])],
                40,
            ),
            0,
            0,
        ),
    ];
    let seeded: [(&'static str, u64); 5] = [
        ("random-0", 0),
        ("random-1", 1),
        ("random-2", 2),
        ("random-3", 3),
        ("random-4", 4),
    ];
    for (name, seed) in seeded {
        battery.push(Scenario::faithful(name, random_config(seed, 200), 0, 1));
    }
    battery
}

/// Broken engines paired with a scenario on which the preservation check
/// must fail.
pub fn mutation_battery() -> Vec<Scenario> {
    vec![
        Scenario {
            name: "skip-removals",
            config: removal_rescue_config(),
            e0: 0,
            e1: 1,
            variant: Variant::SkipRemovals,
        },
        Scenario {
            name: "wrong-removal-side",
            config: removal_rescue_config(),
            e0: 0,
            e1: 1,
            variant: Variant::WrongRemovalSide,
        },
        Scenario {
            name: "skip-restraints",
            config: restraint_guard_config(),
            e0: 0,
            e1: 1,
            variant: Variant::SkipRestraints,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn random_configs_are_valid_and_reproducible() {
        for seed in 0..10 {
            let c = random_config(seed, 200);
            assert_eq!(c, random_config(seed, 200));
            let reparsed = parse_config(&c.to_json()).unwrap();
            assert_eq!(reparsed, c);
        }
        assert_ne!(random_config(1, 200), random_config(2, 200));
    }

    #[test]
    fn curated_configs_validate() {
        for s in property3_battery().into_iter().chain(mutation_battery()) {
            assert!(s.config.build().is_ok(), "{}", s.name);
        }
        assert!(reduction_config().build().is_ok());
    }
}
