//! Load a test description, run the semantic checks, and inspect coverage.
//!
//! ```sh
//! cargo run --example validate_document
//! ```

use usat::docio::parse_document;
use usat::htd::validate_document;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/menb.htd.yaml");
    let doc = parse_document(&std::fs::read_to_string(path).unwrap()).unwrap();

    println!("{} — {} ({})", doc.id, doc.title, doc.status);

    let report = validate_document(&doc);
    if report.is_empty() {
        println!("validation: clean");
    }
    for finding in &report {
        println!("  {finding}");
    }

    // Components nobody wrote a parameter for yet. Not a finding — early
    // documents legitimately have gaps — but worth seeing at a glance.
    let uncovered = doc.uncovered_components().unwrap();
    println!("uncovered components: {}", uncovered.join(", "));

    // Break the document in memory to show what findings look like.
    let mut broken = doc.clone();
    broken.parameters[0].component_ref = "SB-TYPO".to_string();
    broken.parameters[1].nominal.value = 99.0;
    println!("\nafter introducing two defects:");
    for finding in &validate_document(&broken) {
        println!("  {finding}");
    }
}
