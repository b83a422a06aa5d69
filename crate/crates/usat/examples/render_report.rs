//! Render the consolidated Markdown report for a document, including the
//! optional delay-characterization section.
//!
//! ```sh
//! cargo run --example render_report > report.md
//! ```

use std::path::Path;

use usat::delay::{bin_delays, summarize, DelaySamples};
use usat::docio::{parse_document, render_report};

fn main() {
    let doc_path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/gdrts.htd.yaml");
    let csv_path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/loop_delay.csv");

    let doc = parse_document(&std::fs::read_to_string(doc_path).unwrap()).unwrap();
    let samples = DelaySamples::from_csv_file(Path::new(csv_path)).unwrap();
    let summary = summarize(&bin_delays(&samples, 100).unwrap(), &samples);

    // Pure function of its inputs: same document and summary, same bytes.
    print!("{}", render_report(&doc, Some(&summary)));
}
