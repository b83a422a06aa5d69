//! Exercises the external model-runner protocol with real subprocesses:
//! one JSON request line on stdin, one JSON response line on stdout.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::os::unix::fs::PermissionsExt;

use usat::htd::{Framing, Quantity, RangeSpec, TaxonomyTag, UncertainParameter};
use usat::screening::{
    elementary_effects, execute_design, generate_oat_design, rank_factors, OatRule,
    ScreeningError, SubprocessRunner,
};
use usat::uncertainty::UncertaintyRepr;

fn script(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "#!/usr/bin/env python3\n{body}").unwrap();
    let mut perms = file.metadata().unwrap().permissions();
    perms.set_mode(0o755);
    std::fs::set_permissions(&path, perms).unwrap();
    path.to_str().unwrap().to_string()
}

fn factor(id: &str, lo: f64, hi: f64) -> UncertainParameter {
    UncertainParameter {
        id: id.to_string(),
        name: format!("{id} factor"),
        component_ref: "SB-1".to_string(),
        framing: Framing::Epistemic,
        representation: UncertaintyRepr::Interval { lo, hi },
        nominal: Quantity {
            value: (lo + hi) / 2.0,
            unit: "pu".to_string(),
        },
        range: RangeSpec {
            lo,
            hi,
            unit: "pu".to_string(),
        },
        taxonomy_tags: vec![TaxonomyTag::ModelParameter],
        poi_assignments: vec!["POI-1".to_string()],
        screening_selected: true,
    }
}

fn two_factor_design() -> usat::screening::OatDesign {
    let a = factor("a", 0.0, 1.0);
    let b = factor("b", 0.0, 2.0);
    generate_oat_design(
        &[&a, &b],
        vec!["y".to_string()],
        OatRule::MidpointToHigh,
    )
    .unwrap()
}

/// A well-behaved model: y = 3a + b, read from the request's factor map.
const LINEAR_PY: &str = r#"
import json, sys
req = json.loads(sys.stdin.readline())
f = req["factors"]
print(json.dumps({"metrics": {"y": 3.0 * f["a"] + f["b"]}}))
"#;

#[test]
fn subprocess_linear_model_yields_exact_effects() {
    let dir = tempfile::tempdir().unwrap();
    let path = script(&dir, "linear.py", LINEAR_PY);
    let design = two_factor_design();

    let runner = SubprocessRunner::from_command_line(&path).unwrap();
    let filled = execute_design(&design, &runner, 4).unwrap();
    let effects = elementary_effects(&filled).unwrap().effects;

    // EE_a = 3 * (1 - 0) = 3, EE_b = 1 * (2 - 0) = 2.
    assert_eq!(effects.len(), 2);
    assert!((effects[0].magnitude - 3.0).abs() < 1e-12);
    assert!((effects[1].magnitude - 2.0).abs() < 1e-12);

    let ranking = rank_factors(&effects, "y").unwrap();
    assert_eq!(ranking.entries[0].param_id, "a");
    assert_eq!(ranking.entries[1].param_id, "b");
}

#[test]
fn parallel_and_serial_execution_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = script(&dir, "linear.py", LINEAR_PY);
    let design = two_factor_design();
    let runner = SubprocessRunner::from_command_line(&path).unwrap();

    let serial = execute_design(&design, &runner, 1).unwrap();
    let parallel = execute_design(&design, &runner, 8).unwrap();
    assert_eq!(serial.runs, parallel.runs);
}

#[test]
fn failing_perturbation_run_degrades_gracefully() {
    let dir = tempfile::tempdir().unwrap();
    // Dies whenever factor `a` leaves its baseline; run 0 and the
    // b-perturbation still succeed.
    let path = script(
        &dir,
        "flaky.py",
        r#"
import json, sys
req = json.loads(sys.stdin.readline())
f = req["factors"]
if f["a"] > 0.5:
    sys.stderr.write("solver diverged\n")
    sys.exit(9)
print(json.dumps({"metrics": {"y": 3.0 * f["a"] + f["b"]}}))
"#,
    );
    let design = two_factor_design();
    let runner = SubprocessRunner::from_command_line(&path).unwrap();
    let filled = execute_design(&design, &runner, 2).unwrap();

    let report = elementary_effects(&filled).unwrap();
    assert_eq!(report.skipped, vec!["a".to_string()]);
    assert_eq!(report.effects.len(), 1);
    assert_eq!(report.effects[0].param_id, "b");

    // The failed run keeps the runner's stderr as its diagnostic.
    let failed = filled
        .runs
        .iter()
        .find(|r| r.status == usat::screening::RunStatus::Failed)
        .unwrap();
    assert!(
        failed.diagnostic.as_deref().unwrap().contains("solver diverged"),
        "{:?}",
        failed.diagnostic
    );
}

#[test]
fn baseline_failure_stops_the_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let path = script(
        &dir,
        "dead.py",
        "import sys\nsys.exit(3)\n",
    );
    let design = two_factor_design();
    let runner = SubprocessRunner::from_command_line(&path).unwrap();
    let filled = execute_design(&design, &runner, 1).unwrap();
    assert!(matches!(
        elementary_effects(&filled),
        Err(ScreeningError::BaselineFailed { .. })
    ));
}

#[test]
fn garbage_stdout_fails_the_run_not_the_design() {
    let dir = tempfile::tempdir().unwrap();
    let path = script(&dir, "garbage.py", "print(\"not json at all\")\n");
    let design = two_factor_design();
    let runner = SubprocessRunner::from_command_line(&path).unwrap();
    let filled = execute_design(&design, &runner, 1).unwrap();
    assert!(filled
        .runs
        .iter()
        .all(|r| r.status == usat::screening::RunStatus::Failed));
}

#[test]
fn missing_program_is_a_spawn_error() {
    let design = two_factor_design();
    let runner = SubprocessRunner::from_command_line("/nonexistent/model --flag").unwrap();
    assert!(matches!(
        execute_design(&design, &runner, 1),
        Err(ScreeningError::RunnerSpawn(_))
    ));
}

#[test]
fn extra_response_fields_are_tolerated_missing_metric_is_not() {
    let dir = tempfile::tempdir().unwrap();
    // Responds with the wanted metric plus chatter; then a second script
    // that omits the requested metric entirely.
    let chatty = script(
        &dir,
        "chatty.py",
        r#"
import json, sys
req = json.loads(sys.stdin.readline())
print(json.dumps({"metrics": {"y": 1.0, "extra": 42.0}, "note": "ignore me"}))
"#,
    );
    let silent = script(
        &dir,
        "silent.py",
        r#"
import json, sys
sys.stdin.readline()
print(json.dumps({"metrics": {"other": 1.0}}))
"#,
    );
    let design = two_factor_design();

    let filled = execute_design(
        &design,
        &SubprocessRunner::from_command_line(&chatty).unwrap(),
        1,
    )
    .unwrap();
    assert!(filled
        .runs
        .iter()
        .all(|r| r.status == usat::screening::RunStatus::Ok));
    // Only the design's metrics are kept.
    let result: &BTreeMap<String, f64> = filled.runs[0].result.as_ref().unwrap();
    assert_eq!(result.keys().collect::<Vec<_>>(), vec!["y"]);

    let filled = execute_design(
        &design,
        &SubprocessRunner::from_command_line(&silent).unwrap(),
        1,
    )
    .unwrap();
    assert!(filled
        .runs
        .iter()
        .all(|r| r.status == usat::screening::RunStatus::Failed));
}

#[test]
fn screen_cli_accepts_an_external_runner() {
    // The same protocol through the CLI: a python model that mirrors the
    // GDRTS formula, exercised via `screen` with --jobs.
    let dir = tempfile::tempdir().unwrap();
    let path = script(
        &dir,
        "model.py",
        r#"
import json, sys
req = json.loads(sys.stdin.readline())
f = req["factors"]
y = 18.0 * f["PAR_LAT"] + 30.0 * f["PAR_GAIN"] + 4000.0 * f["PAR_STEP"]
print(json.dumps({"metrics": {"phase_error": y}}))
"#,
    );
    let (code, out) = common::cli(&[
        "screen", common::GDRTS, "--poi", "POI-PHERR", "--runner", &path, "--jobs", "3",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().nth(1).unwrap().contains("PAR_LAT"), "{out}");
}
