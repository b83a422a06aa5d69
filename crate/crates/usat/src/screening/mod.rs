//! One-at-a-time (OAT) factor screening.
//!
//! A screening experiment perturbs one factor per run from a common baseline,
//! computes per-metric elementary effects normalized by each factor's range,
//! and ranks factors by effect magnitude. The run matrix is executed against
//! a [`ModelRunner`](runner::ModelRunner) — an external process speaking a
//! line-JSON protocol, or the built-in expression runner for self-contained
//! use.

mod runner;

pub use runner::{
    execute_design, runner_from_spec, LinearRunner, ModelRunner, RunnerError, SubprocessRunner,
};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::htd::{HtdDocument, Ranking, RankedFactor, UncertainParameter};

/// Baseline/perturbation rule for the design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OatRule {
    /// Baseline at the range midpoint, perturbation to the range high end.
    MidpointToHigh,
    /// Baseline at the range midpoint, perturbation to the range low end.
    MidpointToLow,
    /// Baseline at the nominal value, perturbation to the range high end.
    NominalToHigh,
}

impl OatRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            OatRule::MidpointToHigh => "midpoint_to_high",
            OatRule::MidpointToLow => "midpoint_to_low",
            OatRule::NominalToHigh => "nominal_to_high",
        }
    }

    pub fn parse(text: &str) -> Option<OatRule> {
        match text {
            "midpoint_to_high" => Some(OatRule::MidpointToHigh),
            "midpoint_to_low" => Some(OatRule::MidpointToLow),
            "nominal_to_high" => Some(OatRule::NominalToHigh),
            _ => None,
        }
    }
}

impl fmt::Display for OatRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Pending,
    Ok,
    Failed,
}

/// One model evaluation of the design.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub index: usize,
    /// Factor values for this run, keyed by parameter id.
    pub assignment: BTreeMap<String, f64>,
    /// Metric values; present exactly when `status` is `Ok`.
    pub result: Option<BTreeMap<String, f64>>,
    pub status: RunStatus,
    /// What went wrong; present exactly when `status` is `Failed`.
    pub diagnostic: Option<String>,
}

/// One screened factor: where its runs sit and how large the normalized
/// step is.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPlan {
    pub param_id: String,
    pub baseline: f64,
    pub perturbed: f64,
    /// `|perturbed - baseline| / (hi - lo)`, always in (0, 1].
    pub delta: f64,
}

impl FactorPlan {
    /// The step normalized by the factor range, with its direction. Using
    /// the signed step makes elementary effects independent of whether the
    /// rule perturbs toward the high or the low end.
    pub fn signed_delta(&self) -> f64 {
        if self.perturbed < self.baseline {
            -self.delta
        } else {
            self.delta
        }
    }
}

/// The OAT run matrix: run 0 is the all-baseline run, run `j` (1-based)
/// differs from it in exactly factor `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OatDesign {
    pub factors: Vec<FactorPlan>,
    pub runs: Vec<Run>,
    pub metrics: Vec<String>,
}

/// Elementary effect of one factor on one metric:
/// `EE = (y_j - y_0) / delta_j` with the signed normalized step.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    pub param_id: String,
    pub metric: String,
    pub effect: f64,
    pub magnitude: f64,
}

/// Effects plus the factors whose runs failed and therefore have none.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectsReport {
    pub effects: Vec<Effect>,
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScreeningError {
    #[error("factor `{param_id}` has a degenerate range [{lo}, {hi}]")]
    DegenerateRange { param_id: String, lo: f64, hi: f64 },
    #[error("factor `{param_id}`: baseline equals the perturbed value, step would be zero")]
    ZeroStep { param_id: String },
    #[error("no factors selected for screening")]
    NoFactorsSelected,
    #[error("could not start the model runner: {0}")]
    RunnerSpawn(String),
    #[error("baseline run failed{}", diagnostic.as_ref().map(|d| format!(": {d}")).unwrap_or_default())]
    BaselineFailed { diagnostic: Option<String> },
    #[error("no effects recorded for metric `{metric}`")]
    NoEffects { metric: String },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("ranking names factor `{param_id}` which is not assigned to PoI `{poi_id}`")]
    ForeignFactor { param_id: String, poi_id: String },
}

/// Builds the k+1-run OAT design over the screening-selected factors among
/// `params`, preserving their order.
pub fn generate_oat_design(
    params: &[&UncertainParameter],
    metrics: Vec<String>,
    rule: OatRule,
) -> Result<OatDesign, ScreeningError> {
    let selected: Vec<&UncertainParameter> = params
        .iter()
        .copied()
        .filter(|p| p.screening_selected)
        .collect();
    if selected.is_empty() {
        return Err(ScreeningError::NoFactorsSelected);
    }

    let mut factors = Vec::with_capacity(selected.len());
    for param in &selected {
        let (lo, hi) = (param.range.lo, param.range.hi);
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(ScreeningError::DegenerateRange {
                param_id: param.id.clone(),
                lo,
                hi,
            });
        }
        let baseline = match rule {
            OatRule::MidpointToHigh | OatRule::MidpointToLow => (lo + hi) / 2.0,
            OatRule::NominalToHigh => param.nominal.value,
        };
        let perturbed = match rule {
            OatRule::MidpointToLow => lo,
            OatRule::MidpointToHigh | OatRule::NominalToHigh => hi,
        };
        let delta = (perturbed - baseline).abs() / (hi - lo);
        if !delta.is_finite() || delta <= 0.0 {
            return Err(ScreeningError::ZeroStep {
                param_id: param.id.clone(),
            });
        }
        factors.push(FactorPlan {
            param_id: param.id.clone(),
            baseline,
            perturbed,
            delta,
        });
    }

    let baseline_assignment: BTreeMap<String, f64> = factors
        .iter()
        .map(|f| (f.param_id.clone(), f.baseline))
        .collect();
    let mut runs = Vec::with_capacity(factors.len() + 1);
    runs.push(Run {
        index: 0,
        assignment: baseline_assignment.clone(),
        result: None,
        status: RunStatus::Pending,
        diagnostic: None,
    });
    for (j, factor) in factors.iter().enumerate() {
        let mut assignment = baseline_assignment.clone();
        assignment.insert(factor.param_id.clone(), factor.perturbed);
        runs.push(Run {
            index: j + 1,
            assignment,
            result: None,
            status: RunStatus::Pending,
            diagnostic: None,
        });
    }

    Ok(OatDesign {
        factors,
        runs,
        metrics,
    })
}

/// Computes per-metric elementary effects from a filled design. Failed
/// factor runs contribute no effects and are reported in the skipped set.
pub fn elementary_effects(design: &OatDesign) -> Result<EffectsReport, ScreeningError> {
    let baseline = &design.runs[0];
    if baseline.status != RunStatus::Ok {
        return Err(ScreeningError::BaselineFailed {
            diagnostic: baseline.diagnostic.clone(),
        });
    }
    let y0 = baseline.result.as_ref().expect("ok run has results");

    let mut effects = Vec::new();
    let mut skipped = Vec::new();
    for (j, factor) in design.factors.iter().enumerate() {
        let run = &design.runs[j + 1];
        if run.status != RunStatus::Ok {
            skipped.push(factor.param_id.clone());
            continue;
        }
        let yj = run.result.as_ref().expect("ok run has results");
        for metric in &design.metrics {
            let (Some(y_base), Some(y_run)) = (y0.get(metric), yj.get(metric)) else {
                continue; // execute_design guarantees presence for ok runs
            };
            let effect = (y_run - y_base) / factor.signed_delta();
            effects.push(Effect {
                param_id: factor.param_id.clone(),
                metric: metric.clone(),
                effect,
                magnitude: effect.abs(),
            });
        }
    }
    Ok(EffectsReport { effects, skipped })
}

/// Ranks factors for one metric by descending effect magnitude. Ties share
/// a rank (competition ranking) and are listed by parameter id.
pub fn rank_factors(effects: &[Effect], metric: &str) -> Result<Ranking, ScreeningError> {
    let mut relevant: Vec<&Effect> = effects.iter().filter(|e| e.metric == metric).collect();
    if relevant.is_empty() {
        return Err(ScreeningError::NoEffects {
            metric: metric.to_string(),
        });
    }
    relevant.sort_by(|a, b| {
        b.magnitude
            .partial_cmp(&a.magnitude)
            .expect("effect magnitudes are finite")
            .then_with(|| a.param_id.cmp(&b.param_id))
    });

    let mut entries = Vec::with_capacity(relevant.len());
    let mut rank = 0;
    for (i, effect) in relevant.iter().enumerate() {
        if i == 0 || effect.magnitude != relevant[i - 1].magnitude {
            rank = i + 1;
        }
        entries.push(RankedFactor {
            param_id: effect.param_id.clone(),
            magnitude: effect.magnitude,
            rank,
        });
    }
    Ok(Ranking {
        metric: metric.to_string(),
        entries,
    })
}

/// Stores a ranking on its PoI case, leaving everything else untouched.
/// Every ranked factor must be assigned to the PoI.
pub fn writeback_ranking(
    doc: &HtdDocument,
    poi_id: &str,
    ranking: &Ranking,
) -> Result<HtdDocument, ScreeningError> {
    let poi = doc
        .poi(poi_id)
        .ok_or_else(|| ScreeningError::UnknownId(poi_id.to_string()))?;
    for entry in &ranking.entries {
        if !poi.assigned_factors.iter().any(|f| f == &entry.param_id) {
            return Err(ScreeningError::ForeignFactor {
                param_id: entry.param_id.clone(),
                poi_id: poi_id.to_string(),
            });
        }
    }
    let mut doc = doc.clone();
    doc.poi_cases
        .iter_mut()
        .find(|p| p.id == poi_id)
        .expect("checked above")
        .ranking = Some(ranking.clone());
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::htd::test_support::{minimal_doc, parameter};

    fn factor(id: &str, lo: f64, hi: f64) -> crate::htd::UncertainParameter {
        let mut p = parameter(id, &[]);
        p.range.lo = lo;
        p.range.hi = hi;
        p.nominal.value = (lo + hi) / 2.0;
        p
    }

    #[test]
    fn midpoint_to_high_design_shape() {
        let a = factor("a", 0.0, 1.0);
        let b = factor("b", 0.0, 1.0);
        let design =
            generate_oat_design(&[&a, &b], vec!["m".to_string()], OatRule::MidpointToHigh)
                .unwrap();
        assert_eq!(design.runs.len(), 3);
        assert_eq!(design.runs[0].assignment["a"], 0.5);
        assert_eq!(design.runs[0].assignment["b"], 0.5);
        assert_eq!(design.runs[1].assignment["a"], 1.0);
        assert_eq!(design.runs[1].assignment["b"], 0.5);
        assert_eq!(design.runs[2].assignment["a"], 0.5);
        assert_eq!(design.runs[2].assignment["b"], 1.0);
        assert!(design.factors.iter().all(|f| f.delta == 0.5));
        assert!(design
            .runs
            .iter()
            .all(|r| r.status == RunStatus::Pending && r.result.is_none()));
    }

    #[test]
    fn midpoint_to_low_perturbs_downward() {
        let a = factor("a", 2.0, 6.0);
        let design =
            generate_oat_design(&[&a], vec!["m".to_string()], OatRule::MidpointToLow).unwrap();
        assert_eq!(design.factors[0].baseline, 4.0);
        assert_eq!(design.factors[0].perturbed, 2.0);
        assert_eq!(design.factors[0].delta, 0.5);
        assert_eq!(design.factors[0].signed_delta(), -0.5);
    }

    #[test]
    fn nominal_rule_uses_nominal_baseline() {
        let mut a = factor("a", 0.0, 10.0);
        a.nominal.value = 2.0;
        let design =
            generate_oat_design(&[&a], vec!["m".to_string()], OatRule::NominalToHigh).unwrap();
        assert_eq!(design.factors[0].baseline, 2.0);
        assert_eq!(design.factors[0].perturbed, 10.0);
        assert_eq!(design.factors[0].delta, 0.8);
    }

    #[test]
    fn degenerate_range_rejected() {
        let x = factor("x", 2.0, 2.0);
        let err = generate_oat_design(&[&x], vec!["m".to_string()], OatRule::MidpointToHigh)
            .unwrap_err();
        assert!(matches!(err, ScreeningError::DegenerateRange { .. }));
    }

    #[test]
    fn empty_selection_rejected() {
        let mut x = factor("x", 0.0, 1.0);
        x.screening_selected = false;
        assert_eq!(
            generate_oat_design(&[&x], vec![], OatRule::MidpointToHigh).unwrap_err(),
            ScreeningError::NoFactorsSelected
        );
        assert_eq!(
            generate_oat_design(&[], vec![], OatRule::MidpointToHigh).unwrap_err(),
            ScreeningError::NoFactorsSelected
        );
    }

    #[test]
    fn nominal_at_high_end_is_zero_step() {
        let mut a = factor("a", 0.0, 1.0);
        a.nominal.value = 1.0;
        let err = generate_oat_design(&[&a], vec!["m".to_string()], OatRule::NominalToHigh)
            .unwrap_err();
        assert_eq!(
            err,
            ScreeningError::ZeroStep {
                param_id: "a".to_string()
            }
        );
    }

    fn filled_linear_design() -> OatDesign {
        // m = 2a + b over a, b in [0, 1], midpoint_to_high.
        let a = factor("a", 0.0, 1.0);
        let b = factor("b", 0.0, 1.0);
        let design =
            generate_oat_design(&[&a, &b], vec!["m".to_string()], OatRule::MidpointToHigh)
                .unwrap();
        let runner = LinearRunner::parse("m=2*a + b").unwrap();
        execute_design(&design, &runner, 1).unwrap()
    }

    #[test]
    fn linear_model_effects_match_hand_values() {
        let design = filled_linear_design();
        let results: Vec<f64> = design
            .runs
            .iter()
            .map(|r| r.result.as_ref().unwrap()["m"])
            .collect();
        assert_eq!(results, vec![1.5, 2.5, 2.0]);
        let report = elementary_effects(&design).unwrap();
        assert!(report.skipped.is_empty());
        assert_eq!(report.effects.len(), 2);
        assert_eq!(report.effects[0].param_id, "a");
        assert_eq!(report.effects[0].effect, 2.0);
        assert_eq!(report.effects[1].param_id, "b");
        assert_eq!(report.effects[1].effect, 1.0);
    }

    #[test]
    fn constant_model_gives_zero_effects() {
        let a = factor("a", 0.0, 1.0);
        let design = generate_oat_design(&[&a], vec!["m".to_string()], OatRule::MidpointToHigh)
            .unwrap();
        let runner = LinearRunner::parse("m=7").unwrap();
        let filled = execute_design(&design, &runner, 1).unwrap();
        let report = elementary_effects(&filled).unwrap();
        assert_eq!(report.effects[0].effect, 0.0);
    }

    #[test]
    fn effect_sign_is_rule_independent() {
        let a = factor("a", 1.0, 3.0);
        let runner = LinearRunner::parse("m=5*a").unwrap();
        for rule in [OatRule::MidpointToHigh, OatRule::MidpointToLow] {
            let design =
                generate_oat_design(&[&a], vec!["m".to_string()], rule).unwrap();
            let filled = execute_design(&design, &runner, 1).unwrap();
            let report = elementary_effects(&filled).unwrap();
            // EE = coefficient * range width for affine models, both rules.
            assert!(
                (report.effects[0].effect - 10.0).abs() < 1e-12,
                "rule {rule}: {}",
                report.effects[0].effect
            );
        }
    }

    #[test]
    fn failed_run_lands_in_skipped_set() {
        let mut design = filled_linear_design();
        design.runs[2].status = RunStatus::Failed;
        design.runs[2].result = None;
        design.runs[2].diagnostic = Some("simulated failure".to_string());
        let report = elementary_effects(&design).unwrap();
        assert_eq!(report.skipped, vec!["b"]);
        assert_eq!(report.effects.len(), 1);
        assert_eq!(report.effects[0].param_id, "a");
    }

    #[test]
    fn failed_baseline_is_an_error() {
        let mut design = filled_linear_design();
        design.runs[0].status = RunStatus::Failed;
        design.runs[0].result = None;
        design.runs[0].diagnostic = Some("boom".to_string());
        assert!(matches!(
            elementary_effects(&design).unwrap_err(),
            ScreeningError::BaselineFailed { .. }
        ));
    }

    fn effect(id: &str, magnitude: f64) -> Effect {
        Effect {
            param_id: id.to_string(),
            metric: "m".to_string(),
            effect: magnitude,
            magnitude,
        }
    }

    #[test]
    fn ranking_sorts_descending() {
        let ranking = rank_factors(&[effect("b", 1.0), effect("a", 2.0)], "m").unwrap();
        assert_eq!(ranking.metric, "m");
        assert_eq!(ranking.entries.len(), 2);
        assert_eq!(ranking.entries[0].param_id, "a");
        assert_eq!(ranking.entries[0].rank, 1);
        assert_eq!(ranking.entries[1].param_id, "b");
        assert_eq!(ranking.entries[1].rank, 2);
    }

    #[test]
    fn ties_share_rank_and_order_by_id() {
        let ranking =
            rank_factors(&[effect("b", 1.0), effect("a", 1.0), effect("c", 0.5)], "m").unwrap();
        assert_eq!(ranking.entries[0].param_id, "a");
        assert_eq!(ranking.entries[0].rank, 1);
        assert_eq!(ranking.entries[1].param_id, "b");
        assert_eq!(ranking.entries[1].rank, 1);
        assert_eq!(ranking.entries[2].param_id, "c");
        assert_eq!(ranking.entries[2].rank, 3);
    }

    #[test]
    fn empty_effects_is_error() {
        assert_eq!(
            rank_factors(&[], "m").unwrap_err(),
            ScreeningError::NoEffects {
                metric: "m".to_string()
            }
        );
        assert!(rank_factors(&[effect("a", 1.0)], "other").is_err());
    }

    #[test]
    fn writeback_sets_ranking_and_nothing_else() {
        let doc = minimal_doc();
        let ranking = Ranking {
            metric: "m".to_string(),
            entries: vec![RankedFactor {
                param_id: "PAR-1".to_string(),
                magnitude: 2.0,
                rank: 1,
            }],
        };
        let updated = writeback_ranking(&doc, "POI-1", &ranking).unwrap();
        assert_eq!(updated.poi_cases[0].ranking, Some(ranking.clone()));
        let mut reverted = updated.clone();
        reverted.poi_cases[0].ranking = None;
        assert_eq!(reverted, doc);
        // Idempotent.
        assert_eq!(writeback_ranking(&updated, "POI-1", &ranking).unwrap(), updated);
        // Document stays valid.
        assert!(crate::htd::validate_document(&updated).is_empty());
    }

    #[test]
    fn writeback_rejects_foreign_factor_and_unknown_poi() {
        let doc = minimal_doc();
        let foreign = Ranking {
            metric: "m".to_string(),
            entries: vec![RankedFactor {
                param_id: "PAR-404".to_string(),
                magnitude: 1.0,
                rank: 1,
            }],
        };
        assert!(matches!(
            writeback_ranking(&doc, "POI-1", &foreign).unwrap_err(),
            ScreeningError::ForeignFactor { .. }
        ));
        let ranking = Ranking {
            metric: "m".to_string(),
            entries: vec![],
        };
        assert!(matches!(
            writeback_ranking(&doc, "POI-404", &ranking).unwrap_err(),
            ScreeningError::UnknownId(_)
        ));
    }
}
