//! Characterize a recorded loop-delay log: histogram, relative
//! probabilities, summary, and reuse as an empirical representation.
//!
//! ```sh
//! cargo run --example delay_characterization
//! ```

use std::path::Path;

use usat::delay::{bin_delays, summarize, to_empirical, DelaySamples};
use usat::docio::format_percent;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/loop_delay.csv");
    let samples = DelaySamples::from_csv_file(Path::new(path)).unwrap();
    println!("{} samples from {}", samples.len(), samples.source());

    let hist = bin_delays(&samples, 10).unwrap();
    let summary = summarize(&hist, &samples);
    println!("{summary}");

    // Relative probability per bin; the last bin is closed so the maximum
    // is counted too.
    for i in 0..hist.n_bins() {
        let (lo, hi) = hist.bin_edges(i);
        let bar = "#".repeat((hist.rel_prob()[i] * 200.0).round() as usize);
        println!(
            "  [{lo:7.3}, {hi:7.3}{} {:>8} {bar}",
            if i + 1 == hist.n_bins() { ']' } else { ')' },
            format_percent(hist.rel_prob()[i]),
        );
    }

    // Fold the measurement back into a parameter representation.
    let repr = to_empirical(&samples).into_repr();
    println!("as a parameter representation: {repr}");
}
