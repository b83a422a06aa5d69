//! Pins the shipped fixture documents: they parse, validate clean, are
//! byte-stable under canonical serialization, and carry the domain content
//! the examples and the acceptance suite rely on.

mod common;

use common::{DELAY_CSV, GDRTS, GDRTS_DOT, MENB};
use usat::delay::DelaySamples;
use usat::docio::{parse_document, serialize_document};
use usat::htd::{validate_document, EsCategory, Framing, TaxonomyTag};
use usat::sbd::to_dot;
use usat::uncertainty::UncertaintyRepr;

fn read(path: &str) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {path}: {e}"))
}

#[test]
fn fixtures_validate_clean() {
    for path in [MENB, GDRTS] {
        let doc = parse_document(&read(path)).unwrap();
        let report = validate_document(&doc);
        assert!(
            report.is_empty(),
            "{path} should have no findings, got: {:?}",
            report.findings()
        );
    }
}

#[test]
fn fixtures_are_in_canonical_form() {
    // The shipped files are exactly what serialize_document produces, so any
    // hand edit that drifts from canonical form shows up here as a diff.
    for path in [MENB, GDRTS] {
        let text = read(path);
        let doc = parse_document(&text).unwrap();
        assert_eq!(serialize_document(&doc), text, "{path} not canonical");
    }
}

#[test]
fn gdrts_dot_matches_golden() {
    let doc = parse_document(&read(GDRTS)).unwrap();
    assert_eq!(to_dot(&doc.sbd), read(GDRTS_DOT));
}

#[test]
fn menb_storage_tank_is_uncovered() {
    let doc = parse_document(&read(MENB)).unwrap();
    assert_eq!(doc.uncovered_components().unwrap(), vec!["SB-TH-STOR"]);
}

#[test]
fn gdrts_has_full_component_coverage() {
    let doc = parse_document(&read(GDRTS)).unwrap();
    assert!(doc.uncovered_components().unwrap().is_empty());
}

#[test]
fn gdrts_latency_factor_shape() {
    // The latency factor is the centerpiece of the distributed case: an
    // aleatory, empirically characterized communication delay whose setup
    // aspect is categorized as representational uncertainty.
    let doc = parse_document(&read(GDRTS)).unwrap();
    let lat = doc.parameter("PAR_LAT").unwrap();
    assert_eq!(lat.framing, Framing::Aleatory);
    assert_eq!(lat.taxonomy_tags, vec![TaxonomyTag::Communication]);
    match &lat.representation {
        UncertaintyRepr::Empirical(samples) => {
            assert!(samples.iter().all(|&s| (12.18..=13.2).contains(&s)));
        }
        other => panic!("expected empirical latency, got {other:?}"),
    }
    let latency_entry = doc
        .es_viewpoint
        .entries
        .iter()
        .find(|e| e.linked_parameters.contains(&"PAR_LAT".to_string()))
        .expect("latency should appear in the ES viewpoint");
    assert_eq!(latency_entry.category, EsCategory::Representational);
}

#[test]
fn delay_log_fixture_loads() {
    let samples = DelaySamples::from_csv_file(std::path::Path::new(DELAY_CSV)).unwrap();
    assert_eq!(samples.len(), 240);
    assert!(samples.min() >= 12.18 && samples.max() <= 13.2);
}
