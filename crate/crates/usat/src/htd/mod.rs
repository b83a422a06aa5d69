//! Typed domain model for test-description documents with uncertainty
//! annotations.
//!
//! An [`HtdDocument`] bundles everything one test needs in a single
//! machine-checkable artifact: the test case and qualification strategy, the
//! test and experiment specifications, the purposes of investigation (PoI),
//! the system breakdown, the uncertain parameters, and the experiment-setup
//! uncertainty viewpoint. All values are immutable; operations return new
//! documents.

mod validate;

pub use validate::{validate_document, Finding, FindingCode, Severity, ValidationReport};

use thiserror::Error;

use crate::sbd::{self, SbdError, SystemBreakdown};
use crate::uncertainty::UncertaintyRepr;

/// A numeric value with its unit, e.g. `12.3 ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

/// A closed interval `[lo, hi]` with a unit. Ordering is checked by
/// validation, not construction, so invalid documents stay representable.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub unit: String,
}

impl RangeSpec {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Draft,
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Framing {
    Aleatory,
    Epistemic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoiObjective {
    UncertaintyAnalysis,
    SensitivityAnalysis,
    ScalingAnalysis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetupType {
    SoftwareBased,
    HardwareBased,
    Mixed,
}

/// Where in the system an uncertainty source originates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaxonomyTag {
    ModelParameter,
    MeasurementError,
    EnvironmentalInput,
    Communication,
    Configuration,
    NumericalArtifact,
}

/// Experiment-setup uncertainty category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsCategory {
    Representational,
    Parametric,
    Measurement,
    Process,
}

macro_rules! string_enum {
    ($ty:ty { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $(Self::$variant => $text),+
                }
            }

            pub fn parse(text: &str) -> Option<Self> {
                match text {
                    $($text => Some(Self::$variant),)+
                    _ => None,
                }
            }

            /// Every variant, in declaration order.
            pub fn all() -> &'static [Self] {
                &[$(Self::$variant),+]
            }
        }

        impl std::fmt::Display for $ty {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

string_enum!(Status {
    Draft => "draft",
    Final => "final",
});

string_enum!(Framing {
    Aleatory => "aleatory",
    Epistemic => "epistemic",
});

string_enum!(PoiObjective {
    UncertaintyAnalysis => "uncertainty_analysis",
    SensitivityAnalysis => "sensitivity_analysis",
    ScalingAnalysis => "scaling_analysis",
});

string_enum!(SetupType {
    SoftwareBased => "software_based",
    HardwareBased => "hardware_based",
    Mixed => "mixed",
});

string_enum!(TaxonomyTag {
    ModelParameter => "model_parameter",
    MeasurementError => "measurement_error",
    EnvironmentalInput => "environmental_input",
    Communication => "communication",
    Configuration => "configuration",
    NumericalArtifact => "numerical_artifact",
});

string_enum!(EsCategory {
    Representational => "representational",
    Parametric => "parametric",
    Measurement => "measurement",
    Process => "process",
});

/// Test-case layer: the narrative plus the attribute lists that seed the
/// factor analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub narrative: String,
    pub variability_attributes: Vec<String>,
    pub quality_attributes: Vec<String>,
    /// PoI ids covered by a detailed factor analysis; empty when none.
    pub poi_factor_analysis_ref: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualificationStrategy {
    pub narrative: String,
    pub uncertainty_identification: String,
    pub uncertainty_management_strategy: String,
}

/// Test-specification layer: input/output signals and which inputs carry
/// uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSpec {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub uncertainty_source_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquipmentPrecision {
    pub instrument: String,
    pub precision: Quantity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementUncertainty {
    pub metric: String,
    pub representation: UncertaintyRepr,
}

/// Experiment-specification layer: the concrete lab or simulation setup and
/// its own uncertainty contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub setup_type: SetupType,
    pub setup_uncertainties: Vec<String>,
    pub equipment_precision: Vec<EquipmentPrecision>,
    pub measurement_uncertainty: Vec<MeasurementUncertainty>,
    pub uncertainty_management: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetMetric {
    pub name: String,
    pub unit: String,
    /// Optional closed-form model, parseable by
    /// [`crate::uncertainty::parse_expression`].
    pub formula: Option<String>,
}

/// One purpose of investigation with its target metrics and the factors
/// assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct PoiCase {
    pub id: String,
    pub objective: PoiObjective,
    pub description: String,
    pub target_metrics: Vec<TargetMetric>,
    pub assigned_factors: Vec<String>,
    pub ranking: Option<Ranking>,
}

/// Screening outcome for one metric: factors ordered by impact.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub metric: String,
    pub entries: Vec<RankedFactor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedFactor {
    pub param_id: String,
    pub magnitude: f64,
    /// Competition rank starting at 1; ties share a rank.
    pub rank: usize,
}

/// One uncertain parameter of the system configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainParameter {
    pub id: String,
    pub name: String,
    pub component_ref: String,
    pub framing: Framing,
    pub representation: UncertaintyRepr,
    pub nominal: Quantity,
    pub range: RangeSpec,
    pub taxonomy_tags: Vec<TaxonomyTag>,
    pub poi_assignments: Vec<String>,
    pub screening_selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsEntry {
    pub aspect: String,
    pub category: EsCategory,
    pub mitigation: String,
    pub linked_parameters: Vec<String>,
}

/// Experiment-setup uncertainty viewpoint: setup aspects, their category,
/// and the mitigation taken.
#[derive(Debug, Clone, PartialEq)]
pub struct EsViewpoint {
    pub entries: Vec<EsEntry>,
}

/// The full test-description bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct HtdDocument {
    pub id: String,
    pub title: String,
    pub status: Status,
    pub test_case: TestCase,
    pub qualification_strategy: QualificationStrategy,
    pub test_spec: TestSpec,
    pub experiment_spec: ExperimentSpec,
    pub poi_cases: Vec<PoiCase>,
    pub sbd: SystemBreakdown,
    pub parameters: Vec<UncertainParameter>,
    pub es_viewpoint: EsViewpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HtdError {
    #[error("unknown id `{0}`")]
    UnknownId(String),
}

impl HtdDocument {
    pub fn poi(&self, poi_id: &str) -> Option<&PoiCase> {
        self.poi_cases.iter().find(|p| p.id == poi_id)
    }

    pub fn parameter(&self, param_id: &str) -> Option<&UncertainParameter> {
        self.parameters.iter().find(|p| p.id == param_id)
    }

    /// Leaf components of the breakdown that no parameter refers to yet, in
    /// tree order.
    pub fn uncovered_components(&self) -> Result<Vec<String>, SbdError> {
        sbd::coverage_check(
            &self.sbd,
            self.parameters.iter().map(|p| p.component_ref.as_str()),
        )
    }
}

/// Links `param_id` to `poi_id` on both sides (the parameter's assignment
/// list and the PoI's factor list). Idempotent; everything else is copied
/// unchanged.
pub fn assign_factor(
    doc: &HtdDocument,
    param_id: &str,
    poi_id: &str,
) -> Result<HtdDocument, HtdError> {
    if doc.parameter(param_id).is_none() {
        return Err(HtdError::UnknownId(param_id.to_string()));
    }
    if doc.poi(poi_id).is_none() {
        return Err(HtdError::UnknownId(poi_id.to_string()));
    }
    let mut doc = doc.clone();
    let param = doc
        .parameters
        .iter_mut()
        .find(|p| p.id == param_id)
        .expect("checked above");
    if !param.poi_assignments.iter().any(|p| p == poi_id) {
        param.poi_assignments.push(poi_id.to_string());
    }
    let poi = doc
        .poi_cases
        .iter_mut()
        .find(|p| p.id == poi_id)
        .expect("checked above");
    if !poi.assigned_factors.iter().any(|f| f == param_id) {
        poi.assigned_factors.push(param_id.to_string());
    }
    Ok(doc)
}

/// The parameters assigned to `poi_id`, in document order.
pub fn factors_for_poi<'d>(
    doc: &'d HtdDocument,
    poi_id: &str,
) -> Result<Vec<&'d UncertainParameter>, HtdError> {
    if doc.poi(poi_id).is_none() {
        return Err(HtdError::UnknownId(poi_id.to_string()));
    }
    Ok(doc
        .parameters
        .iter()
        .filter(|p| p.poi_assignments.iter().any(|a| a == poi_id))
        .collect())
}

/// Like [`factors_for_poi`] but keeps only factors flagged for screening.
pub fn screening_factors<'d>(
    doc: &'d HtdDocument,
    poi_id: &str,
) -> Result<Vec<&'d UncertainParameter>, HtdError> {
    Ok(factors_for_poi(doc, poi_id)?
        .into_iter()
        .filter(|p| p.screening_selected)
        .collect())
}
