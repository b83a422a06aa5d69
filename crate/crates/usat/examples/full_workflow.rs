//! The whole analysis loop in one pass, against a fresh working copy of the
//! distributed-test campaign: validate, inspect coverage, screen factors,
//! write the ranking back, characterize the measured delay, and render the
//! consolidated report.
//!
//! ```sh
//! cargo run --example full_workflow
//! ```

use std::path::Path;

use usat::delay::{bin_delays, summarize, DelaySamples};
use usat::docio::{parse_document, render_report, serialize_document};
use usat::htd::{screening_factors, validate_document};
use usat::screening::{
    elementary_effects, execute_design, generate_oat_design, rank_factors, runner_from_spec,
    writeback_ranking, OatRule,
};

fn main() {
    let dir = std::env::temp_dir().join("usat-full-workflow");
    std::fs::create_dir_all(&dir).unwrap();
    let doc_path = dir.join("campaign.htd.yaml");

    // 1. Start from the authored campaign document.
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/gdrts.htd.yaml");
    std::fs::copy(fixture, &doc_path).unwrap();
    let doc = parse_document(&std::fs::read_to_string(&doc_path).unwrap()).unwrap();
    println!("1. loaded {} ({})", doc.id, doc.title);

    // 2. Gate on validation; a document with errors screens nothing.
    let findings = validate_document(&doc);
    assert!(!findings.has_errors());
    println!("2. validation: {} findings", findings.findings().len());
    println!("   uncovered components: {:?}", doc.uncovered_components().unwrap());

    // 3. One-at-a-time screening of the selected factors.
    let factors = screening_factors(&doc, "POI-PHERR").unwrap();
    let design = generate_oat_design(
        &factors,
        vec!["phase_error".to_string()],
        OatRule::MidpointToHigh,
    )
    .unwrap();
    let formula = doc.poi("POI-PHERR").unwrap().target_metrics[0]
        .formula
        .clone()
        .unwrap();
    let runner = runner_from_spec(&format!("builtin:linear:phase_error={formula}")).unwrap();
    let filled = execute_design(&design, runner.as_ref(), 4).unwrap();
    let effects = elementary_effects(&filled).unwrap();
    let ranking = rank_factors(&effects.effects, "phase_error").unwrap();
    println!("3. screening ({} runs):", filled.runs.len());
    for e in &ranking.entries {
        println!("   {}. {} |EE| = {:.2}", e.rank, e.param_id, e.magnitude);
    }

    // 4. Persist the ranking into the working copy.
    let updated = writeback_ranking(&doc, "POI-PHERR", &ranking).unwrap();
    std::fs::write(&doc_path, serialize_document(&updated)).unwrap();
    println!("4. ranking written to {}", doc_path.display());

    // 5. Fold the measured loop delay in.
    let csv = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/loop_delay.csv");
    let samples = DelaySamples::from_csv_file(Path::new(csv)).unwrap();
    let summary = summarize(&bin_delays(&samples, 100).unwrap(), &samples);
    println!("5. delay: {summary}");

    // 6. Render the consolidated report next to the document.
    let report = render_report(&updated, Some(&summary));
    let report_path = dir.join("campaign.md");
    std::fs::write(&report_path, &report).unwrap();
    println!("6. report ({} lines) at {}", report.lines().count(), report_path.display());
}
