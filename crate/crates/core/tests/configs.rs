//! The example configs under `configs/` parse, run and verify.

use std::fs;
use std::path::PathBuf;

use minpair::analysis::{check_structural, reference_run, Verdict};
use minpair::engine::run;
use minpair::scenarios::{reduction_config, scenario_config};
use minpair::{parse_config, RunConfig, Trace};

fn load(name: &str) -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    parse_config(&fs::read_to_string(&path).unwrap()).unwrap()
}

#[test]
fn shipped_configs_match_the_builtin_ones() {
    assert_eq!(load("scenario.json"), scenario_config());
    let mut reduction = reduction_config();
    reduction.snapshot_every = 100;
    assert_eq!(load("reduction.json"), reduction);
}

#[test]
fn shipped_configs_run_clean() {
    for name in ["scenario.json", "reduction.json", "injury.json"] {
        let config = load(name);
        let trace = run(&config).unwrap();
        assert_eq!(
            trace.to_jsonl(),
            reference_run(&config).unwrap().to_jsonl(),
            "{name}"
        );
        let reparsed = Trace::from_jsonl(&trace.to_jsonl()).unwrap();
        let (phi, _) = config.build().unwrap();
        let report = check_structural(&reparsed, Some(&phi)).unwrap();
        assert!(report.passed(), "{name}: {}", report.to_json());
    }
}

#[test]
fn injury_config_exercises_removals() {
    let trace = run(&load("injury.json")).unwrap();
    let removals: usize = trace.events.iter().map(|e| e.removals.len()).sum();
    assert!(removals >= 2);
    let (phi, _) = load("injury.json").build().unwrap();
    let report = check_structural(&trace, Some(&phi)).unwrap();
    assert_eq!(report.verdict("structural.key_lemma"), Some(Verdict::Pass));
}
