//! Command-line interface tying the workflow together: scaffold a document,
//! validate it, export the breakdown diagram, list factors, run an OAT
//! screening, characterize a delay log, and render the consolidated report.
//!
//! Exit codes: 0 success; 1 the document has validation findings of severity
//! error; 2 usage error (bad flags, unknown ids, unscreenable selections);
//! 3 I/O or document parse error; 4 model-runner error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::delay::{bin_delays, summarize, DelaySamples};
use crate::docio::{format_percent, parse_document, render_report, serialize_document};
use crate::htd::{
    factors_for_poi, screening_factors, validate_document, EsCategory, EsEntry, EsViewpoint,
    ExperimentSpec, Framing, HtdDocument, PoiCase, PoiObjective, QualificationStrategy, Quantity,
    RangeSpec, SetupType, Status, TargetMetric, TaxonomyTag, TestCase, TestSpec,
    UncertainParameter,
};
use crate::sbd::{build_sbd, to_dot, NodeKind, SbdNode};
use crate::screening::{
    elementary_effects, execute_design, generate_oat_design, rank_factors, runner_from_spec,
    writeback_ranking, OatRule, ScreeningError,
};

const EXIT_OK: i32 = 0;
const EXIT_FINDINGS: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_RUNNER: i32 = 4;

#[derive(Parser)]
#[command(
    name = "usat",
    version,
    about = "Uncertainty structure analysis for holistic test descriptions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a minimal valid document skeleton to a new file.
    Init { path: PathBuf },
    /// Check a document against all semantic rules and print the findings.
    Validate { doc: PathBuf },
    /// Export the system breakdown as DOT text.
    Sbd {
        doc: PathBuf,
        /// Output file; without it the DOT text goes to stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// List the factors assigned to one PoI case, in document order.
    Factors {
        doc: PathBuf,
        #[arg(long)]
        poi: String,
    },
    /// Run an OAT screening for one PoI and print the factor ranking.
    Screen {
        doc: PathBuf,
        #[arg(long)]
        poi: String,
        /// Model runner: an external command line, or
        /// `builtin:linear:<metric>=<expr>[;...]` for in-process evaluation.
        #[arg(long)]
        runner: String,
        #[arg(long, default_value = "midpoint_to_high", value_parser = parse_rule)]
        rule: OatRule,
        /// Maximum runs in flight at once.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Reserved for sampling-based designs; accepted so invocations stay
        /// stable, ignored by the deterministic OAT design.
        #[arg(long)]
        seed: Option<u64>,
        /// Persist the first target metric's ranking into the document.
        #[arg(long)]
        write: bool,
    },
    /// Bin a recorded delay log and print its summary.
    Delay {
        csv: PathBuf,
        #[arg(long)]
        bins: usize,
        /// Also print the full per-bin relative-probability table.
        #[arg(long)]
        report: bool,
    },
    /// Render the consolidated Markdown report.
    Report {
        doc: PathBuf,
        /// Delay log to characterize in the report (100 bins).
        #[arg(long)]
        delay: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn parse_rule(text: &str) -> Result<OatRule, String> {
    OatRule::parse(text)
        .ok_or_else(|| "expected midpoint_to_high, midpoint_to_low or nominal_to_high".to_string())
}

/// Runs the CLI against stdout. Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    run_cli_with(args, &mut stdout)
}

/// Like [`run_cli`] but writing command output to `out` (diagnostics still
/// go to stderr) so callers can capture byte-exact output.
pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("usat: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Init { path } => cmd_init(&path, out),
        Command::Validate { doc } => cmd_validate(&doc, out),
        Command::Sbd { doc, dot } => cmd_sbd(&doc, dot.as_deref(), out),
        Command::Factors { doc, poi } => cmd_factors(&doc, &poi, out),
        Command::Screen {
            doc,
            poi,
            runner,
            rule,
            jobs,
            seed: _,
            write,
        } => cmd_screen(&doc, &poi, &runner, rule, jobs, write, out),
        Command::Delay { csv, bins, report } => cmd_delay(&csv, bins, report, out),
        Command::Report { doc, delay, out: out_path } => {
            cmd_report(&doc, delay.as_deref(), &out_path, out)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_IO, format!("reading {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| fail(EXIT_IO, format!("writing {}: {e}", path.display())))
}

fn load_document(path: &Path) -> Result<HtdDocument, Failure> {
    let text = read_file(path)?;
    parse_document(&text).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

/// Loads a document and refuses to proceed if it has error-severity
/// findings: downstream operations assume resolvable references.
fn load_valid_document(path: &Path) -> Result<HtdDocument, Failure> {
    let doc = load_document(path)?;
    let report = validate_document(&doc);
    if report.has_errors() {
        let mut message = format!("{} has validation errors:", path.display());
        for finding in &report {
            message.push_str(&format!("\n  {finding}"));
        }
        return Err(fail(EXIT_FINDINGS, message));
    }
    Ok(doc)
}

fn out_err(e: std::io::Error) -> Failure {
    fail(EXIT_IO, format!("writing output: {e}"))
}

fn cmd_init(path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    if path.exists() {
        return Err(fail(
            EXIT_IO,
            format!("{} already exists, not overwriting", path.display()),
        ));
    }
    write_file(path, &serialize_document(&skeleton_document()))?;
    writeln!(out, "wrote {}", path.display()).map_err(out_err)?;
    Ok(EXIT_OK)
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let doc = load_document(path)?;
    let report = validate_document(&doc);
    for finding in &report {
        writeln!(out, "{finding}").map_err(out_err)?;
    }
    let errors = report
        .findings()
        .iter()
        .filter(|f| f.severity == crate::htd::Severity::Error)
        .count();
    let warnings = report.findings().len() - errors;
    writeln!(out, "{errors} errors, {warnings} warnings").map_err(out_err)?;
    Ok(if errors > 0 { EXIT_FINDINGS } else { EXIT_OK })
}

fn cmd_sbd(path: &Path, dot_out: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let doc = load_document(path)?;
    let dot = to_dot(&doc.sbd);
    match dot_out {
        Some(dot_path) => {
            write_file(dot_path, &dot)?;
            writeln!(out, "wrote {}", dot_path.display()).map_err(out_err)?;
        }
        None => write!(out, "{dot}").map_err(out_err)?,
    }
    Ok(EXIT_OK)
}

fn cmd_factors(path: &Path, poi: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let doc = load_document(path)?;
    let factors = factors_for_poi(&doc, poi)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    for param in factors {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            param.id,
            param.name,
            param.framing,
            param.representation,
            if param.screening_selected {
                "screening"
            } else {
                "excluded"
            }
        )
        .map_err(out_err)?;
    }
    Ok(EXIT_OK)
}

fn screen_fail(e: ScreeningError) -> Failure {
    let code = match &e {
        ScreeningError::RunnerSpawn(_)
        | ScreeningError::BaselineFailed { .. }
        | ScreeningError::NoEffects { .. } => EXIT_RUNNER,
        _ => EXIT_USAGE,
    };
    fail(code, e.to_string())
}

fn cmd_screen(
    path: &Path,
    poi_id: &str,
    runner_spec: &str,
    rule: OatRule,
    jobs: usize,
    write: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let doc = load_valid_document(path)?;
    let factors = screening_factors(&doc, poi_id)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let poi = doc.poi(poi_id).expect("factors_for_poi checked the id");
    let metrics: Vec<String> = poi.target_metrics.iter().map(|m| m.name.clone()).collect();
    if metrics.is_empty() {
        return Err(fail(
            EXIT_USAGE,
            format!("PoI `{poi_id}` defines no target metrics"),
        ));
    }

    let runner = runner_from_spec(runner_spec).map_err(screen_fail)?;
    let design = generate_oat_design(&factors, metrics, rule).map_err(screen_fail)?;
    let filled = execute_design(&design, runner.as_ref(), jobs).map_err(screen_fail)?;
    let report = elementary_effects(&filled).map_err(screen_fail)?;

    if !report.skipped.is_empty() {
        writeln!(out, "skipped (failed runs): {}", report.skipped.join(", "))
            .map_err(out_err)?;
    }
    let mut first_ranking = None;
    for metric in &filled.metrics {
        let ranking = rank_factors(&report.effects, metric).map_err(screen_fail)?;
        writeln!(out, "ranking for {metric} (rule {rule}):").map_err(out_err)?;
        for entry in &ranking.entries {
            writeln!(
                out,
                "  {}. {}  |EE| = {}",
                entry.rank, entry.param_id, entry.magnitude
            )
            .map_err(out_err)?;
        }
        if first_ranking.is_none() {
            first_ranking = Some(ranking);
        }
    }

    if write {
        let ranking = first_ranking.expect("metrics checked non-empty");
        let updated = writeback_ranking(&doc, poi_id, &ranking).map_err(screen_fail)?;
        write_file(path, &serialize_document(&updated))?;
        writeln!(out, "ranking for {} written to {}", ranking.metric, path.display())
            .map_err(out_err)?;
    }
    Ok(EXIT_OK)
}

fn load_delay_samples(path: &Path) -> Result<DelaySamples, Failure> {
    let text = read_file(path)?;
    DelaySamples::from_csv_text(&text, path.display().to_string())
        .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn cmd_delay(path: &Path, bins: usize, full_table: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let samples = load_delay_samples(path)?;
    let hist =
        bin_delays(&samples, bins).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let summary = summarize(&hist, &samples);
    writeln!(out, "samples: {}", hist.total()).map_err(out_err)?;
    writeln!(out, "range: {} ms to {} ms", summary.min, summary.max).map_err(out_err)?;
    writeln!(out, "mean: {:.4} ms", summary.mean).map_err(out_err)?;
    writeln!(out, "median: {:.4} ms", summary.median).map_err(out_err)?;
    writeln!(
        out,
        "mode bin {} [{}, {}] ms: {}",
        summary.mode_bin.index,
        summary.mode_bin.lo,
        summary.mode_bin.hi,
        format_percent(summary.mode_bin.rel_prob)
    )
    .map_err(out_err)?;
    writeln!(
        out,
        "edge bins: {} / {}",
        format_percent(summary.edge_bins.0),
        format_percent(summary.edge_bins.1)
    )
    .map_err(out_err)?;
    if full_table {
        for i in 0..hist.n_bins() {
            let (lo, hi) = hist.bin_edges(i);
            let close = if i + 1 == hist.n_bins() { ']' } else { ')' };
            writeln!(
                out,
                "bin {i}: [{lo}, {hi}{close} c={} rho={}",
                hist.counts()[i],
                format_percent(hist.rel_prob()[i])
            )
            .map_err(out_err)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_report(
    doc_path: &Path,
    delay_path: Option<&Path>,
    out_path: &Path,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let doc = load_valid_document(doc_path)?;
    let summary = match delay_path {
        Some(path) => {
            let samples = load_delay_samples(path)?;
            let hist = bin_delays(&samples, 100)
                .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
            Some(summarize(&hist, &samples))
        }
        None => None,
    };
    write_file(out_path, &render_report(&doc, summary.as_ref()))?;
    writeln!(out, "wrote {}", out_path.display()).map_err(out_err)?;
    Ok(EXIT_OK)
}

/// The `init` scaffold: one PoI, a two-node breakdown, one parameter with
/// mutual references — minimal, consistent, ready to edit.
pub fn skeleton_document() -> HtdDocument {
    HtdDocument {
        id: "HTD-0001".to_string(),
        title: "New holistic test description".to_string(),
        status: Status::Draft,
        test_case: TestCase {
            narrative: "Describe the purpose of the test.".to_string(),
            variability_attributes: vec!["input variation".to_string()],
            quality_attributes: vec!["accuracy".to_string()],
            poi_factor_analysis_ref: vec!["POI-1".to_string()],
        },
        qualification_strategy: QualificationStrategy {
            narrative: "Describe how results establish the claim.".to_string(),
            uncertainty_identification: "Walk the breakdown component by component.".to_string(),
            uncertainty_management_strategy: "Screen factors, refine dominant ones.".to_string(),
        },
        test_spec: TestSpec {
            inputs: vec!["PAR-1".to_string()],
            outputs: vec!["metric_1".to_string()],
            uncertainty_source_refs: vec!["PAR-1".to_string()],
        },
        experiment_spec: ExperimentSpec {
            setup_type: SetupType::SoftwareBased,
            setup_uncertainties: vec!["solver tolerance".to_string()],
            equipment_precision: vec![],
            measurement_uncertainty: vec![],
            uncertainty_management: "Fix solver settings across runs.".to_string(),
        },
        poi_cases: vec![PoiCase {
            id: "POI-1".to_string(),
            objective: PoiObjective::SensitivityAnalysis,
            description: "Rank the factors driving metric_1.".to_string(),
            target_metrics: vec![TargetMetric {
                name: "metric_1".to_string(),
                unit: "pu".to_string(),
                formula: None,
            }],
            assigned_factors: vec!["PAR-1".to_string()],
            ranking: None,
        }],
        sbd: build_sbd(vec![
            SbdNode {
                id: "SB-0".to_string(),
                name: "System under test".to_string(),
                description: "Top-level system".to_string(),
                parent: None,
                kind: NodeKind::System,
            },
            SbdNode {
                id: "SB-1".to_string(),
                name: "Component 1".to_string(),
                description: "First component".to_string(),
                parent: Some("SB-0".to_string()),
                kind: NodeKind::Component,
            },
        ])
        .expect("skeleton tree is valid"),
        parameters: vec![UncertainParameter {
            id: "PAR-1".to_string(),
            name: "Parameter 1".to_string(),
            component_ref: "SB-1".to_string(),
            framing: Framing::Epistemic,
            representation: crate::uncertainty::UncertaintyRepr::Interval { lo: 0.9, hi: 1.1 },
            nominal: Quantity {
                value: 1.0,
                unit: "pu".to_string(),
            },
            range: RangeSpec {
                lo: 0.9,
                hi: 1.1,
                unit: "pu".to_string(),
            },
            taxonomy_tags: vec![TaxonomyTag::ModelParameter],
            poi_assignments: vec!["POI-1".to_string()],
            screening_selected: true,
        }],
        es_viewpoint: EsViewpoint {
            entries: vec![EsEntry {
                aspect: "numerical solver".to_string(),
                category: EsCategory::Process,
                mitigation: "pinned step size".to_string(),
                linked_parameters: vec![],
            }],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::htd::validate_document;

    fn run(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let code = run_cli_with(args.iter().map(|s| s.to_string()), &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn skeleton_is_valid_and_roundtrips() {
        let doc = skeleton_document();
        assert!(validate_document(&doc).is_empty());
        let text = serialize_document(&doc);
        assert_eq!(parse_document(&text).unwrap(), doc);
    }

    #[test]
    fn usage_error_exits_2() {
        let (code, _) = run(&["usat", "no-such-subcommand"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _) = run(&["usat"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_0() {
        let (code, text) = run(&["usat", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(text.contains("validate"));
    }

    #[test]
    fn missing_file_exits_3() {
        let (code, _) = run(&["usat", "validate", "/nonexistent/x.htd.yaml"]);
        assert_eq!(code, EXIT_IO);
    }

    #[test]
    fn init_validate_roundtrip_in_tempdir() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("new.htd.yaml");
        let path_str = path.to_str().unwrap();

        let (code, text) = run(&["usat", "init", path_str]);
        assert_eq!(code, EXIT_OK);
        assert!(text.contains("wrote "));

        let (code, text) = run(&["usat", "validate", path_str]);
        assert_eq!(code, EXIT_OK, "validate output: {text}");
        assert!(text.contains("0 errors"));

        // Refuses to clobber.
        let (code, _) = run(&["usat", "init", path_str]);
        assert_eq!(code, EXIT_IO);
    }
}
