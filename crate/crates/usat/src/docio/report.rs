//! Consolidated Markdown report: every uncertainty aspect of the document in
//! one deterministic text artifact, plus an optional delay-characterization
//! section.

use std::fmt::Write as _;

use crate::delay::DelaySummary;
use crate::htd::{HtdDocument, PoiCase, UncertainParameter};
use crate::sbd::to_dot;

/// Percentage with up to six decimals and no trailing zeros: 0.0646 becomes
/// `6.46 %`, 1e-5 becomes `0.001 %`. Formatting through a fixed-precision
/// round keeps one-ulp noise in the ratio out of the text.
pub fn format_percent(fraction: f64) -> String {
    let fixed = format!("{:.6}", fraction * 100.0);
    let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
    format!("{trimmed} %")
}

fn cell(text: &str) -> String {
    let cleaned = text.replace('\n', " ").replace('|', "\\|");
    if cleaned.is_empty() {
        "-".to_string()
    } else {
        cleaned
    }
}

fn join_or_dash(items: &[String]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.join(", ")
    }
}

/// Renders the consolidated report. Pure and deterministic: the same
/// document and summary always produce byte-identical text.
pub fn render_report(doc: &HtdDocument, delay: Option<&DelaySummary>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Uncertainty Report: {}", doc.title);
    out.push('\n');
    let _ = writeln!(out, "- Document: {}", doc.id);
    let _ = writeln!(out, "- Status: {}", doc.status);
    out.push('\n');

    render_poi_viewpoint(&mut out, doc);
    render_sc_definition(&mut out, doc);
    render_parameter_analysis(&mut out, doc);
    render_es_viewpoint(&mut out, doc);
    if let Some(summary) = delay {
        render_delay_section(&mut out, summary);
    }
    out
}

fn render_poi_viewpoint(out: &mut String, doc: &HtdDocument) {
    out.push_str("## PoI Viewpoint\n\n");
    if doc.poi_cases.is_empty() {
        out.push_str("No purposes of investigation defined.\n\n");
        return;
    }
    for poi in &doc.poi_cases {
        render_poi(out, poi);
    }
}

fn render_poi(out: &mut String, poi: &PoiCase) {
    let _ = writeln!(out, "### {} ({})", poi.id, poi.objective);
    out.push('\n');
    let _ = writeln!(out, "{}", poi.description);
    out.push('\n');
    out.push_str("| Metric | Unit | Formula |\n| --- | --- | --- |\n");
    for metric in &poi.target_metrics {
        let formula = match &metric.formula {
            Some(f) => format!("`{f}`"),
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} |",
            cell(&metric.name),
            cell(&metric.unit),
            cell(&formula)
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "Assigned factors: {}",
        join_or_dash(&poi.assigned_factors)
    );
    out.push('\n');
    match &poi.ranking {
        None => out.push_str("Ranking: pending\n\n"),
        Some(ranking) => {
            let _ = writeln!(out, "Ranking for `{}`:", ranking.metric);
            out.push('\n');
            out.push_str("| Rank | Factor | Effect magnitude |\n| --- | --- | --- |\n");
            for entry in &ranking.entries {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} |",
                    entry.rank,
                    cell(&entry.param_id),
                    entry.magnitude
                );
            }
            out.push('\n');
        }
    }
}

fn render_sc_definition(out: &mut String, doc: &HtdDocument) {
    out.push_str("## SC Definition & Diagram\n\n");
    for node in doc.sbd.tree_order() {
        let indent = "  ".repeat(doc.sbd.depth(&node.id));
        let _ = writeln!(
            out,
            "{indent}- `{}` {} ({}): {}",
            node.id, node.name, node.kind, node.description
        );
    }
    out.push('\n');
    out.push_str("```dot\n");
    out.push_str(&to_dot(&doc.sbd));
    out.push_str("```\n\n");
}

fn render_parameter_analysis(out: &mut String, doc: &HtdDocument) {
    out.push_str("## SC Parameter Analysis\n\n");
    out.push_str(
        "| Id | Name | Component | Framing | Representation | Nominal | Range | Tags | PoIs | Screening |\n",
    );
    out.push_str("| --- | --- | --- | --- | --- | --- | --- | --- | --- | --- |\n");
    for param in &doc.parameters {
        render_parameter_row(out, param);
    }
    out.push('\n');
}

fn render_parameter_row(out: &mut String, param: &UncertainParameter) {
    let tags: Vec<String> = param
        .taxonomy_tags
        .iter()
        .map(|t| t.to_string())
        .collect();
    let _ = writeln!(
        out,
        "| {} | {} | {} | {} | {} | {} {} | [{}, {}] {} | {} | {} | {} |",
        cell(&param.id),
        cell(&param.name),
        cell(&param.component_ref),
        param.framing,
        cell(&param.representation.to_string()),
        param.nominal.value,
        cell(&param.nominal.unit),
        param.range.lo,
        param.range.hi,
        cell(&param.range.unit),
        cell(&join_or_dash(&tags)),
        cell(&join_or_dash(&param.poi_assignments)),
        if param.screening_selected { "yes" } else { "no" },
    );
}

fn render_es_viewpoint(out: &mut String, doc: &HtdDocument) {
    out.push_str("## ES Viewpoint\n\n");
    out.push_str("| Aspect | Category | Mitigation | Linked parameters |\n");
    out.push_str("| --- | --- | --- | --- |\n");
    for entry in &doc.es_viewpoint.entries {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            cell(&entry.aspect),
            entry.category,
            cell(&entry.mitigation),
            cell(&join_or_dash(&entry.linked_parameters)),
        );
    }
    out.push('\n');
}

fn render_delay_section(out: &mut String, summary: &DelaySummary) {
    out.push_str("## Delay Characterization\n\n");
    let _ = writeln!(out, "- Range: {} ms to {} ms", summary.min, summary.max);
    let _ = writeln!(
        out,
        "- Mean: {:.4} ms, median: {:.4} ms",
        summary.mean, summary.median
    );
    let _ = writeln!(
        out,
        "- Mode bin [{}, {}] ms at {}",
        summary.mode_bin.lo,
        summary.mode_bin.hi,
        format_percent(summary.mode_bin.rel_prob)
    );
    out.push('\n');
    out.push_str("| Bin | Interval (ms) | Relative probability |\n| --- | --- | --- |\n");
    let _ = writeln!(
        out,
        "| first | starts at {} | {} |",
        summary.min,
        format_percent(summary.edge_bins.0)
    );
    let _ = writeln!(
        out,
        "| mode (index {}) | [{}, {}] | {} |",
        summary.mode_bin.index,
        summary.mode_bin.lo,
        summary.mode_bin.hi,
        format_percent(summary.mode_bin.rel_prob)
    );
    let _ = writeln!(
        out,
        "| last | ends at {} | {} |",
        summary.max,
        format_percent(summary.edge_bins.1)
    );
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::{bin_delays, summarize, DelaySamples};
    use crate::htd::test_support::minimal_doc;
    use crate::htd::{RankedFactor, Ranking};

    #[test]
    fn percent_formatting() {
        assert_eq!(format_percent(6460.0 / 100000.0), "6.46 %");
        assert_eq!(format_percent(1.0 / 100000.0), "0.001 %");
        assert_eq!(format_percent(3.0 / 100000.0), "0.003 %");
        assert_eq!(format_percent(1.0), "100 %");
        assert_eq!(format_percent(0.0), "0 %");
        assert_eq!(format_percent(1.0 / 3.0), "33.333333 %");
    }

    #[test]
    fn report_is_deterministic_and_contains_sections() {
        let doc = minimal_doc();
        let report = render_report(&doc, None);
        assert_eq!(report, render_report(&doc, None));
        for heading in [
            "## PoI Viewpoint",
            "## SC Definition & Diagram",
            "## SC Parameter Analysis",
            "## ES Viewpoint",
        ] {
            assert!(report.contains(heading), "missing {heading}");
        }
        assert!(!report.contains("## Delay Characterization"));
        assert!(report.contains("Ranking: pending"));
        assert!(report.contains("digraph sbd"));
    }

    #[test]
    fn ranking_table_preserves_order() {
        let mut doc = minimal_doc();
        doc.poi_cases[0].ranking = Some(Ranking {
            metric: "m".to_string(),
            entries: vec![
                RankedFactor {
                    param_id: "a".to_string(),
                    magnitude: 2.0,
                    rank: 1,
                },
                RankedFactor {
                    param_id: "b".to_string(),
                    magnitude: 1.0,
                    rank: 2,
                },
            ],
        });
        let report = render_report(&doc, None);
        let a = report.find("| 1 | a | 2 |").expect("row for a");
        let b = report.find("| 2 | b | 1 |").expect("row for b");
        assert!(a < b);
        assert!(!report.contains("Ranking: pending"));
    }

    #[test]
    fn each_parameter_id_once_in_table() {
        let doc = minimal_doc();
        let report = render_report(&doc, None);
        let table_start = report.find("## SC Parameter Analysis").unwrap();
        let table_end = report.find("## ES Viewpoint").unwrap();
        let table = &report[table_start..table_end];
        assert_eq!(table.matches("| PAR-1 |").count(), 1);
    }

    #[test]
    fn no_error_string_in_valid_reports() {
        let doc = minimal_doc();
        assert!(!render_report(&doc, None).contains("ERROR"));
    }

    #[test]
    fn delay_section_reports_mode() {
        let samples =
            DelaySamples::new(vec![12.18, 12.60, 12.605, 12.61, 13.20], "log").unwrap();
        let hist = bin_delays(&samples, 2).unwrap();
        let summary = summarize(&hist, &samples);
        let report = render_report(&minimal_doc(), Some(&summary));
        assert!(report.contains("## Delay Characterization"));
        assert!(report.contains("- Range: 12.18 ms to 13.2 ms"));
        assert!(report.contains("| mode (index 0) |"));
    }
}
