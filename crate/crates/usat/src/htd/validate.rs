//! Semantic validation of a structurally parsed document.
//!
//! Findings are data, not failures: every violated rule yields one finding
//! with a stable code, a severity, and the path of the offending field.
//! The code set is closed — consumers can match on it exhaustively.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::HtdDocument;

/// Stable machine-readable finding codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FindingCode {
    /// An id (PoI, component, parameter) or per-PoI metric name is reused.
    EDupId,
    /// A parameter's `component_ref` does not resolve to a breakdown node.
    EDanglingComponent,
    /// A PoI reference does not resolve to a PoI case.
    EDanglingPoi,
    /// A parameter-to-PoI link exists in one direction only.
    EBidirFactor,
    /// `range.lo <= nominal <= range.hi` is violated, or the range and
    /// nominal units differ.
    ERangeOrder,
    /// An aleatory parameter uses a non-distribution representation.
    EFramingRepr,
    /// A parameter is assigned to no PoI (screening may still exclude
    /// factors on purpose, hence only a warning).
    WUnassignedParam,
}

impl FindingCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FindingCode::EDupId => "E_DUP_ID",
            FindingCode::EDanglingComponent => "E_DANGLING_COMPONENT",
            FindingCode::EDanglingPoi => "E_DANGLING_POI",
            FindingCode::EBidirFactor => "E_BIDIR_FACTOR",
            FindingCode::ERangeOrder => "E_RANGE_ORDER",
            FindingCode::EFramingRepr => "E_FRAMING_REPR",
            FindingCode::WUnassignedParam => "W_UNASSIGNED_PARAM",
        }
    }

    pub fn severity(&self) -> Severity {
        match self {
            FindingCode::WUnassignedParam => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub code: FindingCode,
    pub severity: Severity,
    /// Dotted path of the offending field, e.g. `parameters[2].component_ref`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} at {}: {}",
            self.severity, self.code, self.path, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn findings(&self) -> &[Finding] {
        &self.findings
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    /// True when at least one finding has severity error (warnings alone do
    /// not make a document invalid).
    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    fn push(&mut self, code: FindingCode, path: String, message: String) {
        self.findings.push(Finding {
            code,
            severity: code.severity(),
            path,
            message,
        });
    }
}

impl<'a> IntoIterator for &'a ValidationReport {
    type Item = &'a Finding;
    type IntoIter = std::slice::Iter<'a, Finding>;

    fn into_iter(self) -> Self::IntoIter {
        self.findings.iter()
    }
}

/// Checks every cross-reference and per-field rule of the document. Pure:
/// the same document always yields the byte-identical report. Findings are
/// grouped by rule, each rule walking the document in order, so the report
/// order is stable.
pub fn validate_document(doc: &HtdDocument) -> ValidationReport {
    let mut report = ValidationReport::default();

    let poi_ids: BTreeSet<&str> = doc.poi_cases.iter().map(|p| p.id.as_str()).collect();

    check_duplicate_ids(doc, &mut report);

    // E_DANGLING_COMPONENT: parameters must sit on a breakdown node.
    for (i, param) in doc.parameters.iter().enumerate() {
        if !doc.sbd.contains(&param.component_ref) {
            report.push(
                FindingCode::EDanglingComponent,
                format!("parameters[{i}].component_ref"),
                format!(
                    "parameter `{}` references component `{}` which is not in the breakdown",
                    param.id, param.component_ref
                ),
            );
        }
    }

    // E_DANGLING_POI: PoI references from parameters and from the test case.
    for (i, param) in doc.parameters.iter().enumerate() {
        for (j, poi_ref) in param.poi_assignments.iter().enumerate() {
            if !poi_ids.contains(poi_ref.as_str()) {
                report.push(
                    FindingCode::EDanglingPoi,
                    format!("parameters[{i}].poi_assignments[{j}]"),
                    format!(
                        "parameter `{}` is assigned to unknown PoI `{}`",
                        param.id, poi_ref
                    ),
                );
            }
        }
    }
    for (j, poi_ref) in doc.test_case.poi_factor_analysis_ref.iter().enumerate() {
        if !poi_ids.contains(poi_ref.as_str()) {
            report.push(
                FindingCode::EDanglingPoi,
                format!("test_case.poi_factor_analysis_ref[{j}]"),
                format!("factor analysis references unknown PoI `{poi_ref}`"),
            );
        }
    }

    // E_BIDIR_FACTOR: parameter→PoI links must be mirrored in the PoI's
    // factor list, and vice versa. Factor entries naming no parameter at all
    // are one-directional by definition.
    for (i, param) in doc.parameters.iter().enumerate() {
        for (j, poi_ref) in param.poi_assignments.iter().enumerate() {
            let Some(poi) = doc.poi(poi_ref) else {
                continue; // already reported as E_DANGLING_POI
            };
            if !poi.assigned_factors.iter().any(|f| f == &param.id) {
                report.push(
                    FindingCode::EBidirFactor,
                    format!("parameters[{i}].poi_assignments[{j}]"),
                    format!(
                        "parameter `{}` lists PoI `{}` but the PoI does not list it back",
                        param.id, poi_ref
                    ),
                );
            }
        }
    }
    for (i, poi) in doc.poi_cases.iter().enumerate() {
        for (j, factor) in poi.assigned_factors.iter().enumerate() {
            let path = format!("poi_cases[{i}].assigned_factors[{j}]");
            match doc.parameter(factor) {
                None => report.push(
                    FindingCode::EBidirFactor,
                    path,
                    format!(
                        "PoI `{}` lists factor `{}` which is not a parameter",
                        poi.id, factor
                    ),
                ),
                Some(param) => {
                    if !param.poi_assignments.iter().any(|p| p == &poi.id) {
                        report.push(
                            FindingCode::EBidirFactor,
                            path,
                            format!(
                                "PoI `{}` lists factor `{}` but the parameter does not list it back",
                                poi.id, factor
                            ),
                        );
                    }
                }
            }
        }
    }

    // E_RANGE_ORDER: range ordering around the nominal, and unit agreement.
    for (i, param) in doc.parameters.iter().enumerate() {
        let (lo, hi, nominal) = (param.range.lo, param.range.hi, param.nominal.value);
        if !(lo <= nominal && nominal <= hi) {
            report.push(
                FindingCode::ERangeOrder,
                format!("parameters[{i}].range"),
                format!(
                    "parameter `{}` needs range.lo <= nominal <= range.hi, got [{lo}, {hi}] around {nominal}",
                    param.id
                ),
            );
        }
        if param.range.unit != param.nominal.unit {
            report.push(
                FindingCode::ERangeOrder,
                format!("parameters[{i}].range.unit"),
                format!(
                    "parameter `{}` range unit `{}` differs from nominal unit `{}`",
                    param.id, param.range.unit, param.nominal.unit
                ),
            );
        }
    }

    // E_FRAMING_REPR: aleatory parameters need a distribution or empirical
    // representation.
    for (i, param) in doc.parameters.iter().enumerate() {
        if param.framing == super::Framing::Aleatory
            && !param.representation.is_distribution_form()
        {
            report.push(
                FindingCode::EFramingRepr,
                format!("parameters[{i}].representation"),
                format!(
                    "aleatory parameter `{}` needs a distribution or empirical representation, got `{}`",
                    param.id,
                    param.representation.kind_name()
                ),
            );
        }
    }

    // W_UNASSIGNED_PARAM.
    for (i, param) in doc.parameters.iter().enumerate() {
        if param.poi_assignments.is_empty() {
            report.push(
                FindingCode::WUnassignedParam,
                format!("parameters[{i}].poi_assignments"),
                format!("parameter `{}` is not assigned to any PoI", param.id),
            );
        }
    }

    report
}

fn check_duplicate_ids(doc: &HtdDocument, report: &mut ValidationReport) {
    // Document-wide uniqueness across node, PoI, and parameter ids. The
    // first occurrence wins; every later reuse is a finding at its own path.
    let mut first_use: BTreeMap<String, String> = BTreeMap::new();
    let claim_id = |first_use: &mut BTreeMap<String, String>,
                        report: &mut ValidationReport,
                        id: &str,
                        path: String| {
        if let Some(first) = first_use.get(id) {
            report.push(
                FindingCode::EDupId,
                path,
                format!("id `{id}` already used at {first}"),
            );
        } else {
            first_use.insert(id.to_string(), path);
        }
    };

    for (i, node) in doc.sbd.nodes().iter().enumerate() {
        claim_id(
            &mut first_use,
            report,
            &node.id,
            format!("sbd.nodes[{i}].id"),
        );
    }
    for (i, poi) in doc.poi_cases.iter().enumerate() {
        claim_id(&mut first_use, report, &poi.id, format!("poi_cases[{i}].id"));
    }
    for (i, param) in doc.parameters.iter().enumerate() {
        claim_id(
            &mut first_use,
            report,
            &param.id,
            format!("parameters[{i}].id"),
        );
    }

    // Target-metric names must be unique within each PoI.
    for (i, poi) in doc.poi_cases.iter().enumerate() {
        let mut names: BTreeSet<&str> = BTreeSet::new();
        for (j, metric) in poi.target_metrics.iter().enumerate() {
            if !names.insert(metric.name.as_str()) {
                report.push(
                    FindingCode::EDupId,
                    format!("poi_cases[{i}].target_metrics[{j}].name"),
                    format!(
                        "metric name `{}` appears more than once in PoI `{}`",
                        metric.name, poi.id
                    ),
                );
            }
        }
    }
}
