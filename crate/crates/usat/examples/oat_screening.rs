//! One-at-a-time screening against the built-in linear runner: design,
//! execution, elementary effects, ranking, and write-back.
//!
//! ```sh
//! cargo run --example oat_screening
//! ```

use usat::docio::parse_document;
use usat::screening::{
    elementary_effects, execute_design, generate_oat_design, rank_factors, runner_from_spec,
    writeback_ranking, OatRule,
};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/gdrts.htd.yaml");
    let doc = parse_document(&std::fs::read_to_string(path).unwrap()).unwrap();

    let factors = usat::htd::screening_factors(&doc, "POI-PHERR").unwrap();
    println!("screening {} of {} assigned factors", factors.len(), 5);

    let design = generate_oat_design(
        &factors,
        vec!["phase_error".to_string()],
        OatRule::MidpointToHigh,
    )
    .unwrap();
    println!("runs: {} (baseline + one per factor)", design.runs.len());
    for run in &design.runs {
        println!("  run {}: {:?}", run.index, run.assignment);
    }

    // The document's own metric formula doubles as the model here; a real
    // campaign points --runner at a simulator instead.
    let formula = doc.poi("POI-PHERR").unwrap().target_metrics[0]
        .formula
        .as_ref()
        .unwrap();
    let runner = runner_from_spec(&format!("builtin:linear:phase_error={formula}")).unwrap();

    let filled = execute_design(&design, runner.as_ref(), 2).unwrap();
    let effects = elementary_effects(&filled).unwrap();
    let ranking = rank_factors(&effects.effects, "phase_error").unwrap();

    println!("ranking for {}:", ranking.metric);
    for entry in &ranking.entries {
        println!("  {}. {} (|EE| = {:.3})", entry.rank, entry.param_id, entry.magnitude);
    }

    // Persist the outcome into a copy of the document.
    let updated = writeback_ranking(&doc, "POI-PHERR", &ranking).unwrap();
    println!(
        "stored ranking on POI-PHERR: {} entries",
        updated.poi("POI-PHERR").unwrap().ranking.as_ref().unwrap().entries.len()
    );
}
