//! Mapping between the document file structure and the typed domain model.
//!
//! Decoding is strict: required keys must be present, unknown keys are
//! rejected with their path, and enum strings must match exactly. Template
//! drift is precisely the failure mode a machine-checkable document format
//! exists to catch.

use thiserror::Error;

use super::yaml::Value;
use crate::htd::{
    EquipmentPrecision, EsCategory, EsEntry, EsViewpoint, ExperimentSpec, Framing, HtdDocument,
    MeasurementUncertainty, PoiCase, PoiObjective, QualificationStrategy, Quantity, RangeSpec,
    RankedFactor, Ranking, SetupType, Status, TargetMetric, TaxonomyTag, TestCase, TestSpec,
    UncertainParameter,
};
use crate::sbd::{build_sbd, NodeKind, SbdNode, SystemBreakdown};
use crate::uncertainty::UncertaintyRepr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {path}: expected {expected}, found {found}")]
pub struct SchemaError {
    /// Slash-separated path from the document root, e.g. `/parameters/2/range`.
    pub path: String,
    pub expected: String,
    pub found: String,
}

fn err(path: &str, expected: impl Into<String>, found: impl Into<String>) -> SchemaError {
    SchemaError {
        path: if path.is_empty() { "/".to_string() } else { path.to_string() },
        expected: expected.into(),
        found: found.into(),
    }
}

fn child(path: &str, key: &str) -> String {
    format!("{path}/{key}")
}

fn index(path: &str, i: usize) -> String {
    format!("{path}/{i}")
}

// --- decode helpers --------------------------------------------------------

fn as_mapping<'v>(v: &'v Value, path: &str) -> Result<&'v [(String, Value)], SchemaError> {
    match v {
        Value::Mapping(entries) => Ok(entries),
        other => Err(err(path, "mapping", other.type_name())),
    }
}

fn as_sequence<'v>(v: &'v Value, path: &str) -> Result<&'v [Value], SchemaError> {
    match v {
        Value::Sequence(items) => Ok(items),
        other => Err(err(path, "sequence", other.type_name())),
    }
}

fn as_string(v: &Value, path: &str) -> Result<String, SchemaError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        other => Err(err(path, "string", other.type_name())),
    }
}

fn as_number(v: &Value, path: &str) -> Result<f64, SchemaError> {
    match v {
        Value::Number(x) => Ok(*x),
        other => Err(err(path, "number", other.type_name())),
    }
}

fn as_bool(v: &Value, path: &str) -> Result<bool, SchemaError> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(err(path, "boolean", other.type_name())),
    }
}

fn as_count(v: &Value, path: &str) -> Result<usize, SchemaError> {
    let x = as_number(v, path)?;
    if x.fract() == 0.0 && x >= 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(err(path, "non-negative integer", format!("{x}")))
    }
}

fn field<'v>(
    entries: &'v [(String, Value)],
    path: &str,
    key: &str,
) -> Result<&'v Value, SchemaError> {
    entries
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| err(&child(path, key), "required key", "missing"))
}

fn opt_field<'v>(entries: &'v [(String, Value)], key: &str) -> Option<&'v Value> {
    entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

fn reject_unknown_keys(
    entries: &[(String, Value)],
    path: &str,
    allowed: &[&str],
) -> Result<(), SchemaError> {
    for (key, _) in entries {
        if !allowed.contains(&key.as_str()) {
            return Err(err(
                &child(path, key),
                format!("one of: {}", allowed.join(", ")),
                "unknown key",
            ));
        }
    }
    Ok(())
}

fn string_list(v: &Value, path: &str) -> Result<Vec<String>, SchemaError> {
    as_sequence(v, path)?
        .iter()
        .enumerate()
        .map(|(i, item)| as_string(item, &index(path, i)))
        .collect()
}

fn number_list(v: &Value, path: &str) -> Result<Vec<f64>, SchemaError> {
    as_sequence(v, path)?
        .iter()
        .enumerate()
        .map(|(i, item)| as_number(item, &index(path, i)))
        .collect()
}

fn enum_value<T: Copy>(
    v: &Value,
    path: &str,
    parse: fn(&str) -> Option<T>,
    expected: &str,
) -> Result<T, SchemaError> {
    let text = as_string(v, path)?;
    parse(&text).ok_or_else(|| err(path, expected, format!("`{text}`")))
}

// --- document decode -------------------------------------------------------

const TOP_KEYS: &[&str] = &[
    "id",
    "title",
    "status",
    "test_case",
    "qualification_strategy",
    "test_spec",
    "experiment_spec",
    "poi_cases",
    "sbd",
    "parameters",
    "es_viewpoint",
];

pub fn decode_document(value: &Value) -> Result<HtdDocument, SchemaError> {
    let entries = as_mapping(value, "")?;
    reject_unknown_keys(entries, "", TOP_KEYS)?;

    Ok(HtdDocument {
        id: as_string(field(entries, "", "id")?, "/id")?,
        title: as_string(field(entries, "", "title")?, "/title")?,
        status: enum_value(
            field(entries, "", "status")?,
            "/status",
            Status::parse,
            "one of: draft, final",
        )?,
        test_case: decode_test_case(field(entries, "", "test_case")?, "/test_case")?,
        qualification_strategy: decode_qualification_strategy(
            field(entries, "", "qualification_strategy")?,
            "/qualification_strategy",
        )?,
        test_spec: decode_test_spec(field(entries, "", "test_spec")?, "/test_spec")?,
        experiment_spec: decode_experiment_spec(
            field(entries, "", "experiment_spec")?,
            "/experiment_spec",
        )?,
        poi_cases: decode_list(field(entries, "", "poi_cases")?, "/poi_cases", decode_poi)?,
        sbd: decode_sbd(field(entries, "", "sbd")?, "/sbd")?,
        parameters: decode_list(
            field(entries, "", "parameters")?,
            "/parameters",
            decode_parameter,
        )?,
        es_viewpoint: decode_es_viewpoint(field(entries, "", "es_viewpoint")?, "/es_viewpoint")?,
    })
}

fn decode_list<T>(
    v: &Value,
    path: &str,
    one: fn(&Value, &str) -> Result<T, SchemaError>,
) -> Result<Vec<T>, SchemaError> {
    as_sequence(v, path)?
        .iter()
        .enumerate()
        .map(|(i, item)| one(item, &index(path, i)))
        .collect()
}

fn decode_test_case(v: &Value, path: &str) -> Result<TestCase, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(
        entries,
        path,
        &[
            "narrative",
            "variability_attributes",
            "quality_attributes",
            "poi_factor_analysis_ref",
        ],
    )?;
    Ok(TestCase {
        narrative: as_string(field(entries, path, "narrative")?, &child(path, "narrative"))?,
        variability_attributes: string_list(
            field(entries, path, "variability_attributes")?,
            &child(path, "variability_attributes"),
        )?,
        quality_attributes: string_list(
            field(entries, path, "quality_attributes")?,
            &child(path, "quality_attributes"),
        )?,
        poi_factor_analysis_ref: match opt_field(entries, "poi_factor_analysis_ref") {
            Some(v) => string_list(v, &child(path, "poi_factor_analysis_ref"))?,
            None => Vec::new(),
        },
    })
}

fn decode_qualification_strategy(
    v: &Value,
    path: &str,
) -> Result<QualificationStrategy, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(
        entries,
        path,
        &[
            "narrative",
            "uncertainty_identification",
            "uncertainty_management_strategy",
        ],
    )?;
    Ok(QualificationStrategy {
        narrative: as_string(field(entries, path, "narrative")?, &child(path, "narrative"))?,
        uncertainty_identification: as_string(
            field(entries, path, "uncertainty_identification")?,
            &child(path, "uncertainty_identification"),
        )?,
        uncertainty_management_strategy: as_string(
            field(entries, path, "uncertainty_management_strategy")?,
            &child(path, "uncertainty_management_strategy"),
        )?,
    })
}

fn decode_test_spec(v: &Value, path: &str) -> Result<TestSpec, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["inputs", "outputs", "uncertainty_source_refs"])?;
    Ok(TestSpec {
        inputs: string_list(field(entries, path, "inputs")?, &child(path, "inputs"))?,
        outputs: string_list(field(entries, path, "outputs")?, &child(path, "outputs"))?,
        uncertainty_source_refs: string_list(
            field(entries, path, "uncertainty_source_refs")?,
            &child(path, "uncertainty_source_refs"),
        )?,
    })
}

fn decode_experiment_spec(v: &Value, path: &str) -> Result<ExperimentSpec, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(
        entries,
        path,
        &[
            "setup_type",
            "setup_uncertainties",
            "equipment_precision",
            "measurement_uncertainty",
            "uncertainty_management",
        ],
    )?;
    Ok(ExperimentSpec {
        setup_type: enum_value(
            field(entries, path, "setup_type")?,
            &child(path, "setup_type"),
            SetupType::parse,
            "one of: software_based, hardware_based, mixed",
        )?,
        setup_uncertainties: string_list(
            field(entries, path, "setup_uncertainties")?,
            &child(path, "setup_uncertainties"),
        )?,
        equipment_precision: decode_list(
            field(entries, path, "equipment_precision")?,
            &child(path, "equipment_precision"),
            decode_equipment_precision,
        )?,
        measurement_uncertainty: decode_list(
            field(entries, path, "measurement_uncertainty")?,
            &child(path, "measurement_uncertainty"),
            decode_measurement_uncertainty,
        )?,
        uncertainty_management: as_string(
            field(entries, path, "uncertainty_management")?,
            &child(path, "uncertainty_management"),
        )?,
    })
}

fn decode_equipment_precision(v: &Value, path: &str) -> Result<EquipmentPrecision, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["instrument", "precision"])?;
    Ok(EquipmentPrecision {
        instrument: as_string(
            field(entries, path, "instrument")?,
            &child(path, "instrument"),
        )?,
        precision: decode_quantity(field(entries, path, "precision")?, &child(path, "precision"))?,
    })
}

fn decode_measurement_uncertainty(
    v: &Value,
    path: &str,
) -> Result<MeasurementUncertainty, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["metric", "representation"])?;
    Ok(MeasurementUncertainty {
        metric: as_string(field(entries, path, "metric")?, &child(path, "metric"))?,
        representation: decode_representation(
            field(entries, path, "representation")?,
            &child(path, "representation"),
        )?,
    })
}

fn decode_quantity(v: &Value, path: &str) -> Result<Quantity, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["value", "unit"])?;
    Ok(Quantity {
        value: as_number(field(entries, path, "value")?, &child(path, "value"))?,
        unit: as_string(field(entries, path, "unit")?, &child(path, "unit"))?,
    })
}

fn decode_range(v: &Value, path: &str) -> Result<RangeSpec, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["lo", "hi", "unit"])?;
    Ok(RangeSpec {
        lo: as_number(field(entries, path, "lo")?, &child(path, "lo"))?,
        hi: as_number(field(entries, path, "hi")?, &child(path, "hi"))?,
        unit: as_string(field(entries, path, "unit")?, &child(path, "unit"))?,
    })
}

fn decode_poi(v: &Value, path: &str) -> Result<PoiCase, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(
        entries,
        path,
        &[
            "id",
            "objective",
            "description",
            "target_metrics",
            "assigned_factors",
            "ranking",
        ],
    )?;
    Ok(PoiCase {
        id: as_string(field(entries, path, "id")?, &child(path, "id"))?,
        objective: enum_value(
            field(entries, path, "objective")?,
            &child(path, "objective"),
            PoiObjective::parse,
            "one of: uncertainty_analysis, sensitivity_analysis, scaling_analysis",
        )?,
        description: as_string(
            field(entries, path, "description")?,
            &child(path, "description"),
        )?,
        target_metrics: decode_list(
            field(entries, path, "target_metrics")?,
            &child(path, "target_metrics"),
            decode_target_metric,
        )?,
        assigned_factors: string_list(
            field(entries, path, "assigned_factors")?,
            &child(path, "assigned_factors"),
        )?,
        ranking: match opt_field(entries, "ranking") {
            Some(v) => Some(decode_ranking(v, &child(path, "ranking"))?),
            None => None,
        },
    })
}

fn decode_target_metric(v: &Value, path: &str) -> Result<TargetMetric, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["name", "unit", "formula"])?;
    Ok(TargetMetric {
        name: as_string(field(entries, path, "name")?, &child(path, "name"))?,
        unit: as_string(field(entries, path, "unit")?, &child(path, "unit"))?,
        formula: match opt_field(entries, "formula") {
            Some(v) => Some(as_string(v, &child(path, "formula"))?),
            None => None,
        },
    })
}

fn decode_ranking(v: &Value, path: &str) -> Result<Ranking, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["metric", "entries"])?;
    Ok(Ranking {
        metric: as_string(field(entries, path, "metric")?, &child(path, "metric"))?,
        entries: decode_list(
            field(entries, path, "entries")?,
            &child(path, "entries"),
            decode_ranked_factor,
        )?,
    })
}

fn decode_ranked_factor(v: &Value, path: &str) -> Result<RankedFactor, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["param_id", "magnitude", "rank"])?;
    Ok(RankedFactor {
        param_id: as_string(field(entries, path, "param_id")?, &child(path, "param_id"))?,
        magnitude: as_number(
            field(entries, path, "magnitude")?,
            &child(path, "magnitude"),
        )?,
        rank: as_count(field(entries, path, "rank")?, &child(path, "rank"))?,
    })
}

fn decode_sbd(v: &Value, path: &str) -> Result<SystemBreakdown, SchemaError> {
    let nodes = decode_list(v, path, decode_sbd_node)?;
    build_sbd(nodes).map_err(|e| err(path, "a single-rooted breakdown tree", e.to_string()))
}

fn decode_sbd_node(v: &Value, path: &str) -> Result<SbdNode, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(entries, path, &["id", "name", "description", "parent", "kind"])?;
    Ok(SbdNode {
        id: as_string(field(entries, path, "id")?, &child(path, "id"))?,
        name: as_string(field(entries, path, "name")?, &child(path, "name"))?,
        description: as_string(
            field(entries, path, "description")?,
            &child(path, "description"),
        )?,
        parent: match opt_field(entries, "parent") {
            Some(v) => Some(as_string(v, &child(path, "parent"))?),
            None => None,
        },
        kind: enum_value(
            field(entries, path, "kind")?,
            &child(path, "kind"),
            NodeKind::parse,
            "one of: system, subsystem, component",
        )?,
    })
}

fn decode_parameter(v: &Value, path: &str) -> Result<UncertainParameter, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(
        entries,
        path,
        &[
            "id",
            "name",
            "component_ref",
            "framing",
            "representation",
            "nominal",
            "range",
            "taxonomy_tags",
            "poi_assignments",
            "screening_selected",
        ],
    )?;
    let tags_path = child(path, "taxonomy_tags");
    let taxonomy_tags = as_sequence(field(entries, path, "taxonomy_tags")?, &tags_path)?
        .iter()
        .enumerate()
        .map(|(i, item)| {
            enum_value(
                item,
                &index(&tags_path, i),
                TaxonomyTag::parse,
                "one of: model_parameter, measurement_error, environmental_input, \
                 communication, configuration, numerical_artifact",
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(UncertainParameter {
        id: as_string(field(entries, path, "id")?, &child(path, "id"))?,
        name: as_string(field(entries, path, "name")?, &child(path, "name"))?,
        component_ref: as_string(
            field(entries, path, "component_ref")?,
            &child(path, "component_ref"),
        )?,
        framing: enum_value(
            field(entries, path, "framing")?,
            &child(path, "framing"),
            Framing::parse,
            "one of: aleatory, epistemic",
        )?,
        representation: decode_representation(
            field(entries, path, "representation")?,
            &child(path, "representation"),
        )?,
        nominal: decode_quantity(field(entries, path, "nominal")?, &child(path, "nominal"))?,
        range: decode_range(field(entries, path, "range")?, &child(path, "range"))?,
        taxonomy_tags,
        poi_assignments: string_list(
            field(entries, path, "poi_assignments")?,
            &child(path, "poi_assignments"),
        )?,
        screening_selected: as_bool(
            field(entries, path, "screening_selected")?,
            &child(path, "screening_selected"),
        )?,
    })
}

fn decode_representation(v: &Value, path: &str) -> Result<UncertaintyRepr, SchemaError> {
    let entries = as_mapping(v, path)?;
    let kind = as_string(field(entries, path, "type")?, &child(path, "type"))?;
    let repr = match kind.as_str() {
        "point" => {
            reject_unknown_keys(entries, path, &["type", "value"])?;
            UncertaintyRepr::Point(as_number(
                field(entries, path, "value")?,
                &child(path, "value"),
            )?)
        }
        "interval" | "uniform" => {
            reject_unknown_keys(entries, path, &["type", "lo", "hi"])?;
            let lo = as_number(field(entries, path, "lo")?, &child(path, "lo"))?;
            let hi = as_number(field(entries, path, "hi")?, &child(path, "hi"))?;
            if kind == "interval" {
                UncertaintyRepr::Interval { lo, hi }
            } else {
                UncertaintyRepr::Uniform { lo, hi }
            }
        }
        "normal" => {
            reject_unknown_keys(entries, path, &["type", "mean", "std"])?;
            UncertaintyRepr::Normal {
                mean: as_number(field(entries, path, "mean")?, &child(path, "mean"))?,
                std: as_number(field(entries, path, "std")?, &child(path, "std"))?,
            }
        }
        "triangular" => {
            reject_unknown_keys(entries, path, &["type", "lo", "mode", "hi"])?;
            UncertaintyRepr::Triangular {
                lo: as_number(field(entries, path, "lo")?, &child(path, "lo"))?,
                mode: as_number(field(entries, path, "mode")?, &child(path, "mode"))?,
                hi: as_number(field(entries, path, "hi")?, &child(path, "hi"))?,
            }
        }
        "empirical" => {
            reject_unknown_keys(entries, path, &["type", "samples"])?;
            let mut samples =
                number_list(field(entries, path, "samples")?, &child(path, "samples"))?;
            // Sample order carries no meaning in a distribution; sorting here
            // normalizes hand-edited files into the canonical form.
            samples.sort_by(f64::total_cmp);
            UncertaintyRepr::Empirical(samples)
        }
        "pbox" => {
            reject_unknown_keys(entries, path, &["type", "lower", "upper"])?;
            let mut lower = number_list(field(entries, path, "lower")?, &child(path, "lower"))?;
            let mut upper = number_list(field(entries, path, "upper")?, &child(path, "upper"))?;
            lower.sort_by(f64::total_cmp);
            upper.sort_by(f64::total_cmp);
            UncertaintyRepr::PBox { lower, upper }
        }
        "external" => {
            reject_unknown_keys(entries, path, &["type", "tag"])?;
            UncertaintyRepr::ExternalTag(as_string(
                field(entries, path, "tag")?,
                &child(path, "tag"),
            )?)
        }
        other => {
            return Err(err(
                &child(path, "type"),
                "one of: point, interval, uniform, normal, triangular, empirical, pbox, external",
                format!("`{other}`"),
            ))
        }
    };
    repr.validate()
        .map_err(|e| err(path, "a well-formed representation", e.to_string()))?;
    Ok(repr)
}

fn decode_es_viewpoint(v: &Value, path: &str) -> Result<EsViewpoint, SchemaError> {
    Ok(EsViewpoint {
        entries: decode_list(v, path, decode_es_entry)?,
    })
}

fn decode_es_entry(v: &Value, path: &str) -> Result<EsEntry, SchemaError> {
    let entries = as_mapping(v, path)?;
    reject_unknown_keys(
        entries,
        path,
        &["aspect", "category", "mitigation", "linked_parameters"],
    )?;
    Ok(EsEntry {
        aspect: as_string(field(entries, path, "aspect")?, &child(path, "aspect"))?,
        category: enum_value(
            field(entries, path, "category")?,
            &child(path, "category"),
            EsCategory::parse,
            "one of: representational, parametric, measurement, process",
        )?,
        mitigation: as_string(
            field(entries, path, "mitigation")?,
            &child(path, "mitigation"),
        )?,
        linked_parameters: string_list(
            field(entries, path, "linked_parameters")?,
            &child(path, "linked_parameters"),
        )?,
    })
}

// --- document encode -------------------------------------------------------

fn m(entries: Vec<(&str, Value)>) -> Value {
    Value::Mapping(
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    )
}

fn strings(items: &[String]) -> Value {
    Value::Sequence(items.iter().cloned().map(Value::String).collect())
}

fn numbers(items: &[f64]) -> Value {
    Value::Sequence(items.iter().copied().map(Value::Number).collect())
}

fn s(text: &str) -> Value {
    Value::String(text.to_string())
}

pub fn encode_document(doc: &HtdDocument) -> Value {
    m(vec![
        ("id", s(&doc.id)),
        ("title", s(&doc.title)),
        ("status", s(doc.status.as_str())),
        ("test_case", encode_test_case(&doc.test_case)),
        (
            "qualification_strategy",
            encode_qualification_strategy(&doc.qualification_strategy),
        ),
        ("test_spec", encode_test_spec(&doc.test_spec)),
        (
            "experiment_spec",
            encode_experiment_spec(&doc.experiment_spec),
        ),
        (
            "poi_cases",
            Value::Sequence(doc.poi_cases.iter().map(encode_poi).collect()),
        ),
        (
            "sbd",
            Value::Sequence(doc.sbd.nodes().iter().map(encode_sbd_node).collect()),
        ),
        (
            "parameters",
            Value::Sequence(doc.parameters.iter().map(encode_parameter).collect()),
        ),
        (
            "es_viewpoint",
            Value::Sequence(doc.es_viewpoint.entries.iter().map(encode_es_entry).collect()),
        ),
    ])
}

fn encode_test_case(tc: &TestCase) -> Value {
    m(vec![
        ("narrative", s(&tc.narrative)),
        ("variability_attributes", strings(&tc.variability_attributes)),
        ("quality_attributes", strings(&tc.quality_attributes)),
        (
            "poi_factor_analysis_ref",
            strings(&tc.poi_factor_analysis_ref),
        ),
    ])
}

fn encode_qualification_strategy(qs: &QualificationStrategy) -> Value {
    m(vec![
        ("narrative", s(&qs.narrative)),
        (
            "uncertainty_identification",
            s(&qs.uncertainty_identification),
        ),
        (
            "uncertainty_management_strategy",
            s(&qs.uncertainty_management_strategy),
        ),
    ])
}

fn encode_test_spec(ts: &TestSpec) -> Value {
    m(vec![
        ("inputs", strings(&ts.inputs)),
        ("outputs", strings(&ts.outputs)),
        ("uncertainty_source_refs", strings(&ts.uncertainty_source_refs)),
    ])
}

fn encode_experiment_spec(es: &ExperimentSpec) -> Value {
    m(vec![
        ("setup_type", s(es.setup_type.as_str())),
        ("setup_uncertainties", strings(&es.setup_uncertainties)),
        (
            "equipment_precision",
            Value::Sequence(
                es.equipment_precision
                    .iter()
                    .map(|ep| {
                        m(vec![
                            ("instrument", s(&ep.instrument)),
                            ("precision", encode_quantity(&ep.precision)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "measurement_uncertainty",
            Value::Sequence(
                es.measurement_uncertainty
                    .iter()
                    .map(|mu| {
                        m(vec![
                            ("metric", s(&mu.metric)),
                            ("representation", encode_representation(&mu.representation)),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("uncertainty_management", s(&es.uncertainty_management)),
    ])
}

fn encode_quantity(q: &Quantity) -> Value {
    m(vec![
        ("value", Value::Number(q.value)),
        ("unit", s(&q.unit)),
    ])
}

fn encode_range(r: &RangeSpec) -> Value {
    m(vec![
        ("lo", Value::Number(r.lo)),
        ("hi", Value::Number(r.hi)),
        ("unit", s(&r.unit)),
    ])
}

fn encode_poi(poi: &PoiCase) -> Value {
    let mut entries = vec![
        ("id", s(&poi.id)),
        ("objective", s(poi.objective.as_str())),
        ("description", s(&poi.description)),
        (
            "target_metrics",
            Value::Sequence(poi.target_metrics.iter().map(encode_target_metric).collect()),
        ),
        ("assigned_factors", strings(&poi.assigned_factors)),
    ];
    if let Some(ranking) = &poi.ranking {
        entries.push(("ranking", encode_ranking(ranking)));
    }
    m(entries)
}

fn encode_target_metric(tm: &TargetMetric) -> Value {
    let mut entries = vec![("name", s(&tm.name)), ("unit", s(&tm.unit))];
    if let Some(formula) = &tm.formula {
        entries.push(("formula", s(formula)));
    }
    m(entries)
}

fn encode_ranking(ranking: &Ranking) -> Value {
    m(vec![
        ("metric", s(&ranking.metric)),
        (
            "entries",
            Value::Sequence(
                ranking
                    .entries
                    .iter()
                    .map(|e| {
                        m(vec![
                            ("param_id", s(&e.param_id)),
                            ("magnitude", Value::Number(e.magnitude)),
                            ("rank", Value::Number(e.rank as f64)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

fn encode_es_entry(entry: &EsEntry) -> Value {
    m(vec![
        ("aspect", s(&entry.aspect)),
        ("category", s(entry.category.as_str())),
        ("mitigation", s(&entry.mitigation)),
        ("linked_parameters", strings(&entry.linked_parameters)),
    ])
}

fn encode_sbd_node(node: &SbdNode) -> Value {
    let mut entries = vec![
        ("id", s(&node.id)),
        ("name", s(&node.name)),
        ("description", s(&node.description)),
    ];
    if let Some(parent) = &node.parent {
        entries.push(("parent", s(parent)));
    }
    entries.push(("kind", s(node.kind.as_str())));
    m(entries)
}

fn encode_parameter(p: &UncertainParameter) -> Value {
    m(vec![
        ("id", s(&p.id)),
        ("name", s(&p.name)),
        ("component_ref", s(&p.component_ref)),
        ("framing", s(p.framing.as_str())),
        ("representation", encode_representation(&p.representation)),
        ("nominal", encode_quantity(&p.nominal)),
        ("range", encode_range(&p.range)),
        (
            "taxonomy_tags",
            Value::Sequence(
                p.taxonomy_tags
                    .iter()
                    .map(|t| s(t.as_str()))
                    .collect(),
            ),
        ),
        ("poi_assignments", strings(&p.poi_assignments)),
        ("screening_selected", Value::Bool(p.screening_selected)),
    ])
}

fn encode_representation(repr: &UncertaintyRepr) -> Value {
    match repr {
        UncertaintyRepr::Point(value) => m(vec![
            ("type", s("point")),
            ("value", Value::Number(*value)),
        ]),
        UncertaintyRepr::Interval { lo, hi } => m(vec![
            ("type", s("interval")),
            ("lo", Value::Number(*lo)),
            ("hi", Value::Number(*hi)),
        ]),
        UncertaintyRepr::Uniform { lo, hi } => m(vec![
            ("type", s("uniform")),
            ("lo", Value::Number(*lo)),
            ("hi", Value::Number(*hi)),
        ]),
        UncertaintyRepr::Normal { mean, std } => m(vec![
            ("type", s("normal")),
            ("mean", Value::Number(*mean)),
            ("std", Value::Number(*std)),
        ]),
        UncertaintyRepr::Triangular { lo, mode, hi } => m(vec![
            ("type", s("triangular")),
            ("lo", Value::Number(*lo)),
            ("mode", Value::Number(*mode)),
            ("hi", Value::Number(*hi)),
        ]),
        UncertaintyRepr::Empirical(samples) => m(vec![
            ("type", s("empirical")),
            ("samples", numbers(samples)),
        ]),
        UncertaintyRepr::PBox { lower, upper } => m(vec![
            ("type", s("pbox")),
            ("lower", numbers(lower)),
            ("upper", numbers(upper)),
        ]),
        UncertaintyRepr::ExternalTag(tag) => {
            m(vec![("type", s("external")), ("tag", s(tag))])
        }
    }
}
