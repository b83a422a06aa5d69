//! Shared helpers for the integration suites: fixture paths, CLI capture,
//! and a generator of random valid documents.

#![allow(dead_code)] // each test binary uses a different subset

use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use usat::cli::run_cli_with;
use usat::htd::{
    EquipmentPrecision, EsCategory, EsEntry, EsViewpoint, ExperimentSpec, Framing, HtdDocument,
    MeasurementUncertainty, PoiCase, PoiObjective, QualificationStrategy, Quantity, RangeSpec,
    RankedFactor, Ranking, SetupType, Status, TargetMetric, TaxonomyTag, TestCase, TestSpec,
    UncertainParameter,
};
use usat::sbd::{build_sbd, NodeKind, SbdNode};
use usat::uncertainty::UncertaintyRepr;

pub const MENB: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/menb.htd.yaml");
pub const GDRTS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/gdrts.htd.yaml");
pub const DELAY_CSV: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/loop_delay.csv");
pub const GDRTS_DOT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/gdrts.dot");

/// Runs the CLI in-process, capturing stdout. Diagnostics go to the real
/// stderr where the test harness collects them.
pub fn cli(args: &[&str]) -> (i32, String) {
    let mut full = vec!["usat"];
    full.extend_from_slice(args);
    let mut out = Vec::new();
    let code = run_cli_with(full.iter().map(|s| s.to_string()), &mut out);
    (code, String::from_utf8(out).expect("CLI output is UTF-8"))
}

// --- random valid documents -------------------------------------------------

pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[below(rng, items.len())]
}

/// Word pool with YAML-hostile entries: quoting, flow characters, comment
/// markers, lookalike scalars, non-ASCII.
const WORDS: &[&str] = &[
    "loop delay",
    "gain",
    "colon: inside",
    "hash # inside",
    "d'Arsonval probe",
    "\"already quoted\"",
    "-leading dash",
    "true",
    "0.25",
    "[not, a, list]",
    "{not: a, map}",
    "trailing space ",
    "tab\\tliteral",
    "µs drift of ω",
    "a | b",
];

fn name(rng: &mut ChaCha8Rng, stem: &str, i: usize) -> String {
    match below(rng, 4) {
        0 => format!("{stem} {i}"),
        1 => format!("{stem} {i}: {}", pick(rng, WORDS)),
        2 => (*pick(rng, WORDS)).to_string(),
        _ => format!("{} {stem}", pick(rng, WORDS)),
    }
}

fn sorted_samples(rng: &mut ChaCha8Rng, n: usize, lo: f64, width: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| lo + width * unit(rng)).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn representation(rng: &mut ChaCha8Rng, framing: Framing, lo: f64, hi: f64) -> UncertaintyRepr {
    let width = hi - lo;
    let distribution = below(rng, 4);
    let form = match framing {
        Framing::Aleatory => distribution,
        Framing::Epistemic => below(rng, 8),
    };
    match form {
        0 => UncertaintyRepr::Uniform { lo, hi },
        1 => UncertaintyRepr::Normal {
            mean: (lo + hi) / 2.0,
            std: width / 8.0 + 1e-3,
        },
        2 => {
            let mode = lo + width * unit(rng);
            UncertaintyRepr::Triangular { lo, mode, hi }
        }
        3 => {
            let n = 3 + below(rng, 6);
            UncertaintyRepr::Empirical(sorted_samples(rng, n, lo, width))
        }
        4 => UncertaintyRepr::Point(lo + width * unit(rng)),
        5 => UncertaintyRepr::Interval { lo, hi },
        6 => {
            // `lower` shifted right of `upper` so the bounding CDFs nest.
            let upper = sorted_samples(rng, 4, lo, width);
            let lower = upper.iter().map(|x| x + width * 0.1).collect();
            UncertaintyRepr::PBox { lower, upper }
        }
        _ => UncertaintyRepr::ExternalTag(
            ["dempster_shafer", "possibility", "fuzzy"][below(rng, 3)].to_string(),
        ),
    }
}

/// Generates a structurally random document that passes validation with no
/// error findings (an occasional unassigned parameter warns, nothing more).
pub fn random_document(rng: &mut ChaCha8Rng, tag: u64) -> HtdDocument {
    // Breakdown: root, optional subsystems, 1-5 components.
    let n_subs = below(rng, 3);
    let n_comps = 1 + below(rng, 5);
    let mut nodes = vec![SbdNode {
        id: "SB-0".to_string(),
        name: name(rng, "system", 0),
        description: name(rng, "top level", 0),
        parent: None,
        kind: NodeKind::System,
    }];
    for s in 0..n_subs {
        nodes.push(SbdNode {
            id: format!("SUB-{s}"),
            name: name(rng, "subsystem", s),
            description: name(rng, "group", s),
            parent: Some("SB-0".to_string()),
            kind: NodeKind::Subsystem,
        });
    }
    for c in 0..n_comps {
        let parent = if n_subs > 0 && below(rng, 2) == 0 {
            format!("SUB-{}", below(rng, n_subs))
        } else {
            "SB-0".to_string()
        };
        nodes.push(SbdNode {
            id: format!("C-{c}"),
            name: name(rng, "component", c),
            description: name(rng, "part", c),
            parent: Some(parent),
            kind: NodeKind::Component,
        });
    }
    let component_ids: Vec<String> = (0..n_comps).map(|c| format!("C-{c}")).collect();

    // PoI cases; assigned_factors filled in after the parameters exist.
    let n_pois = 1 + below(rng, 3);
    let objectives = [
        PoiObjective::UncertaintyAnalysis,
        PoiObjective::SensitivityAnalysis,
        PoiObjective::ScalingAnalysis,
    ];
    let mut pois: Vec<PoiCase> = (0..n_pois)
        .map(|k| PoiCase {
            id: format!("POI-{k}"),
            objective: *pick(rng, &objectives),
            description: name(rng, "purpose", k),
            target_metrics: (0..1 + below(rng, 2))
                .map(|t| TargetMetric {
                    name: format!("m{k}_{t}"),
                    unit: pick(rng, &["pu", "deg", "ms", "-"]).to_string(),
                    formula: if below(rng, 4) == 0 {
                        Some(format!("2*x_{t} + 1"))
                    } else {
                        None
                    },
                })
                .collect(),
            assigned_factors: vec![],
            ranking: None,
        })
        .collect();

    let n_params = 1 + below(rng, 6);
    let mut parameters = Vec::new();
    for p in 0..n_params {
        let framing = if below(rng, 2) == 0 {
            Framing::Aleatory
        } else {
            Framing::Epistemic
        };
        let lo = -5.0 + 10.0 * unit(rng);
        let hi = lo + 0.1 + 5.0 * unit(rng);
        let nominal = lo + (hi - lo) * unit(rng);
        let unit_name = pick(rng, &["pu", "ms", "s", "ohm", "K", "-"]).to_string();
        let n_tags = below(rng, 3);
        let all_tags = TaxonomyTag::all();
        // Every parameter is assigned somewhere, except an occasional
        // orphan that exercises the unassigned warning.
        let poi_assignments: Vec<String> = if below(rng, 10) == 0 {
            vec![]
        } else {
            let start = below(rng, n_pois);
            let len = 1 + below(rng, n_pois - start);
            (start..start + len).map(|k| format!("POI-{k}")).collect()
        };
        for poi_id in &poi_assignments {
            let k: usize = poi_id["POI-".len()..].parse().unwrap();
            pois[k].assigned_factors.push(format!("PAR-{p}"));
        }
        parameters.push(UncertainParameter {
            id: format!("PAR-{p}"),
            name: name(rng, "parameter", p),
            component_ref: pick(rng, &component_ids).clone(),
            framing,
            representation: representation(rng, framing, lo, hi),
            nominal: Quantity {
                value: nominal,
                unit: unit_name.clone(),
            },
            range: RangeSpec {
                lo,
                hi,
                unit: unit_name,
            },
            taxonomy_tags: all_tags[..n_tags].to_vec(),
            poi_assignments,
            screening_selected: below(rng, 3) != 0,
        });
    }

    // A ranking on one PoI now and then, over its own factors.
    if below(rng, 3) == 0 {
        let k = below(rng, n_pois);
        if !pois[k].assigned_factors.is_empty() {
            let metric = pois[k].target_metrics[0].name.clone();
            let entries = pois[k]
                .assigned_factors
                .iter()
                .enumerate()
                .map(|(i, id)| RankedFactor {
                    param_id: id.clone(),
                    magnitude: 10.0 * unit(rng),
                    rank: i + 1,
                })
                .collect();
            pois[k].ranking = Some(Ranking { metric, entries });
        }
    }

    let param_ids: Vec<String> = parameters.iter().map(|p| p.id.clone()).collect();
    let categories = [
        EsCategory::Representational,
        EsCategory::Parametric,
        EsCategory::Measurement,
        EsCategory::Process,
    ];
    HtdDocument {
        id: format!("HTD-RAND-{tag}"),
        title: name(rng, "generated test description", tag as usize),
        status: if below(rng, 2) == 0 {
            Status::Draft
        } else {
            Status::Final
        },
        test_case: TestCase {
            narrative: name(rng, "narrative", 0),
            variability_attributes: (0..below(rng, 3))
                .map(|i| name(rng, "varies", i))
                .collect(),
            quality_attributes: (0..below(rng, 3))
                .map(|i| name(rng, "quality", i))
                .collect(),
            poi_factor_analysis_ref: (0..n_pois)
                .filter(|_| below(rng, 2) == 0)
                .map(|k| format!("POI-{k}"))
                .collect(),
        },
        qualification_strategy: QualificationStrategy {
            narrative: name(rng, "strategy", 0),
            uncertainty_identification: name(rng, "identification", 0),
            uncertainty_management_strategy: name(rng, "management", 0),
        },
        test_spec: TestSpec {
            inputs: param_ids.clone(),
            outputs: pois
                .iter()
                .flat_map(|poi| poi.target_metrics.iter().map(|m| m.name.clone()))
                .collect(),
            uncertainty_source_refs: param_ids.clone(),
        },
        experiment_spec: ExperimentSpec {
            setup_type: *pick(
                rng,
                &[
                    SetupType::SoftwareBased,
                    SetupType::HardwareBased,
                    SetupType::Mixed,
                ],
            ),
            setup_uncertainties: (0..below(rng, 3)).map(|i| name(rng, "setup", i)).collect(),
            equipment_precision: (0..below(rng, 2))
                .map(|i| EquipmentPrecision {
                    instrument: name(rng, "instrument", i),
                    precision: Quantity {
                        value: 0.001 + unit(rng),
                        unit: "pu".to_string(),
                    },
                })
                .collect(),
            measurement_uncertainty: (0..below(rng, 2))
                .map(|i| MeasurementUncertainty {
                    metric: format!("m{i}_0"),
                    representation: UncertaintyRepr::Normal {
                        mean: 0.0,
                        std: 0.01 + unit(rng),
                    },
                })
                .collect(),
            uncertainty_management: name(rng, "mitigation", 0),
        },
        poi_cases: pois,
        sbd: build_sbd(nodes).expect("generated tree is well-formed"),
        parameters,
        es_viewpoint: EsViewpoint {
            entries: (0..below(rng, 3))
                .map(|i| EsEntry {
                    aspect: name(rng, "aspect", i),
                    category: *pick(rng, &categories),
                    mitigation: name(rng, "mitigation", i),
                    linked_parameters: if below(rng, 2) == 0 {
                        param_ids.clone()
                    } else {
                        vec![]
                    },
                })
                .collect(),
        },
    }
}
