//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use minpair::analysis::{
    check_property2, check_property3, check_structural, derive_x, end_to_end_check, reference_run,
    Verdict,
};
use minpair::engine::{run, run_suite};
use minpair::operators::StagedAxiom;
use minpair::scenarios::{
    constant_config, mutation_battery, property3_battery, random_config, reduction_config,
    scenario_config,
};
use minpair::{
    check_description, pair, parse_config, Axiom, Density, EnumOperator, Nat, PartialGraph, Replay,
    RunConfig, Side, Trace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The scenario config and 50 random ones at horizon 200.
fn corpus() -> Vec<(String, RunConfig)> {
    let mut out = vec![("scenario".to_string(), scenario_config())];
    out.extend((0..50).map(|seed| (format!("random seed {seed}"), random_config(seed, 200))));
    out
}

fn oracle_equivalence(corpus: &[(String, RunConfig)], traces: &mut Vec<Trace>) -> Outcome {
    let mut actions = 0;
    for (name, config) in corpus {
        let trace = run(config).map_err(|e| format!("{name}: {e}"))?;
        let reference = reference_run(config).map_err(|e| format!("{name}: {e}"))?;
        ensure(trace.to_jsonl() == reference.to_jsonl(), || {
            format!("{name}: engine and reference traces differ")
        })?;
        actions += trace.events.iter().filter(|e| e.action.is_some()).count();
        traces.push(trace);
    }
    Ok(format!(
        "{} configs byte-identical, {actions} actions in total",
        corpus.len()
    ))
}

fn structural_suite(corpus: &[(String, RunConfig)], traces: &[Trace]) -> Outcome {
    let mut checks = 0;
    for ((name, config), trace) in corpus.iter().zip(traces) {
        let (phi, _) = config.build().map_err(|e| e.to_string())?;
        let report = check_structural(trace, Some(&phi)).map_err(|e| format!("{name}: {e}"))?;
        if let Some((check, outcome)) = report.failures().next() {
            return Err(format!(
                "{name}: {check} failed: {:?}",
                outcome.counterexample
            ));
        }
        checks += report.checks.len();
    }
    Ok(format!(
        "{checks} checks over {} traces, zero failures",
        traces.len()
    ))
}

fn random_operator(rng: &mut ChaCha8Rng) -> EnumOperator {
    EnumOperator::new((0..rng.random_range(1..12)).map(|_| {
        let premise: BTreeSet<Nat> = (0..rng.random_range(0..4))
            .map(|_| pair(rng.random_range(0..8), rng.random_range(0..2)).unwrap())
            .collect();
        let axiom = Axiom::new(premise, rng.random_range(0..20));
        StagedAxiom {
            stage: axiom.use_bound() + rng.random_range(0..30),
            axiom,
        }
    }))
}

/// A random graph `f` and an extension `g` of it.
fn random_pair(rng: &mut ChaCha8Rng) -> (PartialGraph, PartialGraph) {
    if rng.random_bool(0.5) {
        let f: BTreeMap<Nat, u8> = (0..rng.random_range(0..8))
            .map(|_| (rng.random_range(0..8), rng.random_range(0..2)))
            .collect();
        let mut g = f.clone();
        for _ in 0..rng.random_range(0..6) {
            g.entry(rng.random_range(0..8))
                .or_insert(rng.random_range(0..2));
        }
        (PartialGraph::explicit(f), PartialGraph::explicit(g))
    } else {
        let ef: BTreeSet<Nat> = (0..rng.random_range(0..6))
            .map(|_| rng.random_range(0..8))
            .collect();
        let eg: BTreeSet<Nat> = ef
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();
        (
            PartialGraph::cofinite_ones(ef),
            PartialGraph::cofinite_ones(eg),
        )
    }
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f6e6f);
    let mut nonempty = 0;
    for i in 0..1000 {
        let w = random_operator(&mut rng);
        let (f, g) = random_pair(&mut rng);
        ensure(minpair::extends(&f, &g), || {
            format!("instance {i}: generator broke f ⊆ g")
        })?;
        let s = rng.random_range(0..60);
        let (ef, eg) = (w.eval(&f, s), w.eval(&g, s));
        ensure(ef.is_subset(&eg), || {
            format!("oracle instance {i}: {ef:?} ⊄ {eg:?}")
        })?;
        nonempty += usize::from(!ef.is_empty());
    }
    for i in 0..1000 {
        let w = random_operator(&mut rng);
        let (_, g) = random_pair(&mut rng);
        let s = rng.random_range(0..60);
        let t = s + rng.random_range(0..30);
        let (es, et) = (w.eval(&g, s), w.eval(&g, t));
        ensure(es.is_subset(&et), || {
            format!("stage instance {i}: {es:?} ⊄ {et:?}")
        })?;
    }
    Ok(format!(
        "1000 oracle + 1000 stage instances, {nonempty} with nonempty W^f"
    ))
}

fn property3() -> Outcome {
    let battery = property3_battery();
    for s in &battery {
        let (phi, ops) = s.config.build().map_err(|e| format!("{}: {e}", s.name))?;
        let (trace, _) = run_suite(&phi, s.config.horizon, 0, s.variant);
        let replay = Replay::new(&trace).map_err(|e| e.to_string())?;
        let report = check_property3(&replay, &ops, s.e0, s.e1);
        ensure(report.passed(), || {
            format!("{}: {}", s.name, report.to_json())
        })?;
    }
    let mutations = mutation_battery();
    let mut caught = Vec::new();
    for s in &mutations {
        let (phi, ops) = s.config.build().map_err(|e| format!("{}: {e}", s.name))?;
        let (trace, _) = run_suite(&phi, s.config.horizon, 0, s.variant);
        let replay = Replay::new(&trace).map_err(|e| e.to_string())?;
        let report = check_property3(&replay, &ops, s.e0, s.e1);
        let (_, failed) = report
            .failures()
            .next()
            .ok_or_else(|| format!("mutation {} not detected", s.name))?;
        let c = failed
            .counterexample
            .as_ref()
            .ok_or("failure without counterexample")?;
        let x = c.element.ok_or("counterexample without element")?;
        caught.push(format!("{} (x={x}, s={})", s.name, c.stage));
    }
    Ok(format!(
        "{} scenarios pass; mutations caught: {}",
        battery.len(),
        caught.join(", ")
    ))
}

fn property2() -> Outcome {
    let mut notes = Vec::new();
    for (value, expected_x) in [(0u8, 1u8), (1, 0)] {
        let config = constant_config(value, 5);
        let (phi, _) = config.build().map_err(|e| e.to_string())?;
        let replay =
            Replay::new(&run(&config).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(replay.members(Side::Zero, 5).contains(&1), || {
            "1 ∉ A_0[5]".into()
        })?;
        let report = check_property2(&replay, &phi, 0, Side::Zero);
        ensure(
            report.verdict("property2.0.0") == Some(Verdict::Pass),
            || report.to_json(),
        )?;
        let x = derive_x(&replay, &phi, Side::Zero, 8);
        ensure(x.diagonal_witnesses == vec![1], || {
            format!("witnesses {:?}", x.diagonal_witnesses)
        })?;
        let phi1 = phi.phi_eval(0, 1, 5).value();
        ensure(phi1 == Some(value) && x.bits[1] == expected_x, || {
            format!("Φ_0(1) = {phi1:?}, X_0(1) = {}", x.bits[1])
        })?;
        notes.push(format!(
            "[total_const {value}]: Φ_0(1)={value} ≠ X_0(1)={expected_x}"
        ));
    }
    Ok(notes.join("; "))
}

fn description_quality(corpus: &[(String, RunConfig)], traces: &[Trace]) -> Outcome {
    const N: Nat = 1000;
    for ((name, config), trace) in corpus.iter().zip(traces) {
        let (phi, _) = config.build().map_err(|e| e.to_string())?;
        let replay = Replay::new(trace).map_err(|e| e.to_string())?;
        let horizon = replay.horizon();
        for side in Side::BOTH {
            let x = derive_x(&replay, &phi, side, N);
            let report = check_description(&replay.description(side, horizon), &x.bits, N);
            ensure(report.is_sound(), || {
                format!("{name}: errors at {:?}", report.error_points)
            })?;
            let missing = replay
                .members(side, horizon)
                .iter()
                .filter(|&&n| n < N)
                .count() as Nat;
            let expected = Density::new(N - missing, N);
            ensure(report.domain_partial_density == expected, || {
                format!(
                    "{name}: density {} instead of {expected}",
                    report.domain_partial_density
                )
            })?;
        }
    }
    Ok(format!(
        "{} runs × 2 sides at N = {N}, zero disagreements",
        traces.len()
    ))
}

fn end_to_end() -> Outcome {
    let config = reduction_config();
    let spec = config
        .reduction
        .clone()
        .ok_or("reduction config lacks a reduction")?;
    let (_, ops) = config.build().map_err(|e| e.to_string())?;
    let replay =
        Replay::new(&run(&config).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let report = end_to_end_check(&replay, &ops, &spec);
    ensure(report.passed(), || report.to_json())?;
    Ok(format!(
        "{} entries; {}",
        report.metadata["psi_entries"], report.checks["end_to_end.density"].note
    ))
}

fn determinism(corpus: &[(String, RunConfig)], traces: &[Trace]) -> Outcome {
    let mut configs: Vec<RunConfig> = corpus.iter().map(|(_, c)| c.clone()).collect();
    configs.push(reduction_config());
    configs.extend(property3_battery().into_iter().map(|s| s.config));
    for (i, c) in configs.iter().enumerate() {
        let back = parse_config(&c.to_json()).map_err(|e| format!("config {i}: {e}"))?;
        ensure(&back == c, || format!("config {i} does not round-trip"))?;
    }
    for ((name, config), trace) in corpus.iter().zip(traces) {
        let again = run(config).map_err(|e| e.to_string())?;
        ensure(again.to_jsonl() == trace.to_jsonl(), || {
            format!("{name}: rerun differs")
        })?;
        let parsed = Trace::from_jsonl(&trace.to_jsonl()).map_err(|e| e.to_string())?;
        ensure(&parsed == trace, || {
            format!("{name}: trace does not round-trip")
        })?;
        let replay = Replay::new(&parsed).map_err(|e| e.to_string())?;
        ensure(replay.summary() == trace.summary, || {
            format!("{name}: replay misses the summary")
        })?;
    }
    Ok(format!(
        "{} configs round-trip, {} traces rerun and replayed",
        configs.len(),
        traces.len()
    ))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let mut traces = Vec::new();
    let mut failed = 0;
    let mut report = |n: usize, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(note) => println!("criterion {n} {title}: PASS ({secs:.2}s) {note}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} {title}: FAIL ({secs:.2}s) {why}");
            }
        }
    };
    report(1, "oracle equivalence", &mut || {
        oracle_equivalence(&corpus, &mut traces)
    });
    report(2, "structural suite", &mut || {
        structural_suite(&corpus, &traces)
    });
    report(3, "monotonicity", &mut monotonicity);
    report(4, "property (3) battery and mutations", &mut property3);
    report(5, "property (2) and diagonalization", &mut property2);
    report(6, "description quality", &mut || {
        description_quality(&corpus, &traces)
    });
    report(7, "end-to-end Ψ", &mut end_to_end);
    report(8, "determinism and round-trip", &mut || {
        determinism(&corpus, &traces)
    });
    if failed == 0 {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
