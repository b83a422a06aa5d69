//! Model execution for screening designs.
//!
//! The runner protocol is line-oriented JSON over a subprocess, one process
//! per run: the runner reads `{"run": <index>, "factors": {"<id>": <value>}}`
//! on stdin and answers `{"metrics": {"<name>": <value>}}` on stdout, exit
//! code 0 for success. Run failures (nonzero exit, malformed response,
//! missing or non-finite metrics) mark the individual run failed so one bad
//! lab run does not abort a whole campaign; failure to start the runner at
//! all aborts the screening.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::uncertainty::{parse_expression, Expr};

use super::{OatDesign, Run, RunStatus, ScreeningError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunnerError {
    /// The runner process could not be started at all.
    #[error("spawn failed: {0}")]
    Spawn(String),
    /// The runner started but deviated from the protocol or reported failure.
    #[error("{0}")]
    Protocol(String),
}

/// Anything that can evaluate one run of a design. Implementations must be
/// callable from multiple threads at once.
pub trait ModelRunner: Sync {
    /// Evaluates `assignment` and returns the metric values. Called once
    /// per run.
    fn run(
        &self,
        index: usize,
        assignment: &BTreeMap<String, f64>,
    ) -> Result<BTreeMap<String, f64>, RunnerError>;
}

/// Spawns an external executable per run and speaks the JSON line protocol.
#[derive(Debug, Clone)]
pub struct SubprocessRunner {
    program: String,
    args: Vec<String>,
}

impl SubprocessRunner {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> SubprocessRunner {
        SubprocessRunner {
            program: program.into(),
            args,
        }
    }

    /// Splits a command line on whitespace: first token is the program, the
    /// rest are arguments. No shell quoting.
    pub fn from_command_line(line: &str) -> Result<SubprocessRunner, ScreeningError> {
        let mut parts = line.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| ScreeningError::RunnerSpawn("empty runner command".to_string()))?;
        Ok(SubprocessRunner::new(
            program,
            parts.map(str::to_string).collect(),
        ))
    }

    fn request_line(
        index: usize,
        assignment: &BTreeMap<String, f64>,
    ) -> Result<String, RunnerError> {
        let mut factors = serde_json::Map::new();
        for (id, value) in assignment {
            let number = serde_json::Number::from_f64(*value).ok_or_else(|| {
                RunnerError::Protocol(format!("factor `{id}` has non-finite value {value}"))
            })?;
            factors.insert(id.clone(), serde_json::Value::Number(number));
        }
        let request = serde_json::json!({ "run": index, "factors": factors });
        Ok(request.to_string())
    }

    fn parse_response(stdout: &str) -> Result<BTreeMap<String, f64>, RunnerError> {
        let line = stdout
            .lines()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| RunnerError::Protocol("empty response".to_string()))?;
        let value: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| RunnerError::Protocol(format!("response is not JSON: {e}")))?;
        let metrics = value
            .get("metrics")
            .and_then(|m| m.as_object())
            .ok_or_else(|| {
                RunnerError::Protocol("response lacks a `metrics` object".to_string())
            })?;
        let mut out = BTreeMap::new();
        for (name, metric_value) in metrics {
            let number = metric_value.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                RunnerError::Protocol(format!("metric `{name}` is not a finite number"))
            })?;
            out.insert(name.clone(), number);
        }
        Ok(out)
    }
}

impl ModelRunner for SubprocessRunner {
    fn run(
        &self,
        index: usize,
        assignment: &BTreeMap<String, f64>,
    ) -> Result<BTreeMap<String, f64>, RunnerError> {
        let request = Self::request_line(index, assignment)?;
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| RunnerError::Spawn(format!("{}: {e}", self.program)))?;

        // The child may exit before reading all of stdin; a broken pipe here
        // is reported through the exit status below.
        if let Some(stdin) = child.stdin.take() {
            let mut stdin = stdin;
            let _ = writeln!(stdin, "{request}");
        }
        let output = child
            .wait_with_output()
            .map_err(|e| RunnerError::Protocol(format!("waiting for runner: {e}")))?;
        if !output.status.success() {
            let stderr = String::from_utf8_lossy(&output.stderr);
            let detail = stderr.trim();
            return Err(RunnerError::Protocol(match output.status.code() {
                Some(code) if detail.is_empty() => format!("runner exited with status {code}"),
                Some(code) => format!("runner exited with status {code}: {detail}"),
                None => "runner terminated by signal".to_string(),
            }));
        }
        Self::parse_response(&String::from_utf8_lossy(&output.stdout))
    }
}

/// In-process runner evaluating one arithmetic expression per metric.
/// Spec syntax: `<metric>=<expr>[;<metric>=<expr>...]`, e.g.
/// `m=2*a + b; cost=a/b`. Despite the name — it exists to model affine
/// responses in tests — any expression the formula grammar accepts works.
#[derive(Debug, Clone)]
pub struct LinearRunner {
    metrics: Vec<(String, Expr)>,
}

impl LinearRunner {
    pub fn parse(spec: &str) -> Result<LinearRunner, ScreeningError> {
        let mut metrics = Vec::new();
        for part in spec.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (name, expr_text) = part.split_once('=').ok_or_else(|| {
                ScreeningError::RunnerSpawn(format!(
                    "builtin runner clause `{part}` is not <metric>=<expression>"
                ))
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(ScreeningError::RunnerSpawn(
                    "builtin runner clause has an empty metric name".to_string(),
                ));
            }
            let expr = parse_expression(expr_text.trim()).map_err(|e| {
                ScreeningError::RunnerSpawn(format!("builtin runner expression `{expr_text}`: {e}"))
            })?;
            metrics.push((name.to_string(), expr));
        }
        if metrics.is_empty() {
            return Err(ScreeningError::RunnerSpawn(
                "builtin runner defines no metrics".to_string(),
            ));
        }
        Ok(LinearRunner { metrics })
    }
}

impl ModelRunner for LinearRunner {
    fn run(
        &self,
        _index: usize,
        assignment: &BTreeMap<String, f64>,
    ) -> Result<BTreeMap<String, f64>, RunnerError> {
        let mut out = BTreeMap::new();
        for (name, expr) in &self.metrics {
            let value = expr
                .eval(assignment)
                .map_err(|e| RunnerError::Protocol(format!("metric `{name}`: {e}")))?;
            if !value.is_finite() {
                return Err(RunnerError::Protocol(format!(
                    "metric `{name}` evaluated to {value}"
                )));
            }
            out.insert(name.clone(), value);
        }
        Ok(out)
    }
}

/// Builds a runner from a `--runner` specification: either
/// `builtin:linear:<spec>` or an external command line.
pub fn runner_from_spec(spec: &str) -> Result<Box<dyn ModelRunner>, ScreeningError> {
    if let Some(linear_spec) = spec.strip_prefix("builtin:linear:") {
        Ok(Box::new(LinearRunner::parse(linear_spec)?))
    } else {
        Ok(Box::new(SubprocessRunner::from_command_line(spec)?))
    }
}

enum Outcome {
    Ok(BTreeMap<String, f64>),
    Failed(String),
    Spawn(String),
}

/// Executes every run of the design exactly once, with up to `parallelism`
/// runs in flight. The filled design is ordered by run index regardless of
/// completion order, so output is deterministic for a deterministic runner.
pub fn execute_design(
    design: &OatDesign,
    runner: &dyn ModelRunner,
    parallelism: usize,
) -> Result<OatDesign, ScreeningError> {
    let n = design.runs.len();
    let jobs = parallelism.max(1).min(n.max(1));
    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<Option<Outcome>>> = Mutex::new((0..n).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let outcome = run_one(design, i, runner);
                outcomes.lock().expect("outcome lock")[i] = Some(outcome);
            });
        }
    });

    let outcomes = outcomes.into_inner().expect("outcome lock");
    // A spawn failure means the runner itself is unreachable; report the
    // earliest one for determinism.
    for outcome in &outcomes {
        if let Some(Outcome::Spawn(message)) = outcome {
            return Err(ScreeningError::RunnerSpawn(message.clone()));
        }
    }

    let mut filled = design.clone();
    for (run, outcome) in filled.runs.iter_mut().zip(outcomes) {
        match outcome.expect("every run executed") {
            Outcome::Ok(result) => {
                run.status = RunStatus::Ok;
                run.result = Some(result);
                run.diagnostic = None;
            }
            Outcome::Failed(diagnostic) => {
                run.status = RunStatus::Failed;
                run.result = None;
                run.diagnostic = Some(diagnostic);
            }
            Outcome::Spawn(_) => unreachable!("spawn failures returned above"),
        }
    }
    Ok(filled)
}

fn run_one(design: &OatDesign, index: usize, runner: &dyn ModelRunner) -> Outcome {
    let run: &Run = &design.runs[index];
    match runner.run(run.index, &run.assignment) {
        Err(RunnerError::Spawn(message)) => Outcome::Spawn(message),
        Err(RunnerError::Protocol(message)) => Outcome::Failed(message),
        Ok(response) => {
            // Keep exactly the design's metrics; extra response metrics are
            // ignored, missing ones fail the run.
            let mut result = BTreeMap::new();
            for metric in &design.metrics {
                match response.get(metric) {
                    Some(&value) if value.is_finite() => {
                        result.insert(metric.clone(), value);
                    }
                    Some(&value) => {
                        return Outcome::Failed(format!(
                            "metric `{metric}` is not finite: {value}"
                        ))
                    }
                    None => {
                        return Outcome::Failed(format!("response lacks metric `{metric}`"))
                    }
                }
            }
            Outcome::Ok(result)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{generate_oat_design, OatRule};
    use super::*;
    use crate::htd::test_support::parameter;

    fn design_ab(metrics: &[&str]) -> OatDesign {
        let mut a = parameter("a", &[]);
        a.range.lo = 0.0;
        a.range.hi = 1.0;
        let mut b = parameter("b", &[]);
        b.range.lo = 0.0;
        b.range.hi = 1.0;
        generate_oat_design(
            &[&a, &b],
            metrics.iter().map(|m| m.to_string()).collect(),
            OatRule::MidpointToHigh,
        )
        .unwrap()
    }

    #[test]
    fn linear_runner_evaluates_each_metric() {
        let runner = LinearRunner::parse("m=2*a + b; s=a - b").unwrap();
        let mut env = BTreeMap::new();
        env.insert("a".to_string(), 1.0);
        env.insert("b".to_string(), 0.5);
        let out = runner.run(0, &env).unwrap();
        assert_eq!(out["m"], 2.5);
        assert_eq!(out["s"], 0.5);
    }

    #[test]
    fn linear_runner_rejects_bad_specs() {
        assert!(LinearRunner::parse("").is_err());
        assert!(LinearRunner::parse("no-equals-sign").is_err());
        assert!(LinearRunner::parse("m=2*+").is_err());
        assert!(LinearRunner::parse("=x").is_err());
    }

    #[test]
    fn linear_runner_unbound_identifier_fails_run() {
        let runner = LinearRunner::parse("m=2*z").unwrap();
        let env = BTreeMap::new();
        assert!(matches!(
            runner.run(0, &env),
            Err(RunnerError::Protocol(_))
        ));
    }

    #[test]
    fn execute_fills_all_runs() {
        let design = design_ab(&["m"]);
        let runner = LinearRunner::parse("m=2*a + b").unwrap();
        let filled = execute_design(&design, &runner, 1).unwrap();
        let results: Vec<f64> = filled
            .runs
            .iter()
            .map(|r| r.result.as_ref().unwrap()["m"])
            .collect();
        assert_eq!(results, vec![1.5, 2.5, 2.0]);
        assert!(filled.runs.iter().all(|r| r.status == RunStatus::Ok));
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let design = design_ab(&["m", "s"]);
        let runner = LinearRunner::parse("m=2*a + b; s=a - b").unwrap();
        let serial = execute_design(&design, &runner, 1).unwrap();
        let parallel = execute_design(&design, &runner, 4).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn missing_metric_fails_that_run() {
        let design = design_ab(&["m", "absent"]);
        let runner = LinearRunner::parse("m=a").unwrap();
        let filled = execute_design(&design, &runner, 2).unwrap();
        assert!(filled.runs.iter().all(|r| r.status == RunStatus::Failed));
        assert!(filled.runs[0]
            .diagnostic
            .as_ref()
            .unwrap()
            .contains("absent"));
    }

    #[test]
    fn response_parsing_accepts_extras_and_rejects_garbage() {
        let parsed =
            SubprocessRunner::parse_response("{\"metrics\": {\"m\": 1.5, \"extra\": 2}}\n")
                .unwrap();
        assert_eq!(parsed["m"], 1.5);
        assert_eq!(parsed["extra"], 2.0);

        assert!(SubprocessRunner::parse_response("").is_err());
        assert!(SubprocessRunner::parse_response("not json").is_err());
        assert!(SubprocessRunner::parse_response("{\"other\": 1}").is_err());
        assert!(
            SubprocessRunner::parse_response("{\"metrics\": {\"m\": \"NaN\"}}").is_err()
        );
    }

    #[test]
    fn request_line_is_deterministic_and_sorted() {
        let mut env = BTreeMap::new();
        env.insert("b".to_string(), 2.0);
        env.insert("a".to_string(), 0.5);
        let line = SubprocessRunner::request_line(3, &env).unwrap();
        assert_eq!(line, "{\"factors\":{\"a\":0.5,\"b\":2.0},\"run\":3}");
    }

    #[test]
    fn spawn_failure_is_hard_error() {
        let design = design_ab(&["m"]);
        let runner = SubprocessRunner::new("/nonexistent/model-runner", vec![]);
        let err = execute_design(&design, &runner, 2).unwrap_err();
        assert!(matches!(err, ScreeningError::RunnerSpawn(_)));
    }

    #[test]
    fn runner_from_spec_dispatches() {
        assert!(runner_from_spec("builtin:linear:m=a").is_ok());
        assert!(runner_from_spec("builtin:linear:").is_err());
        assert!(runner_from_spec("./model --flag").is_ok());
        assert!(runner_from_spec("").is_err());
    }
}
