//! Monte-Carlo propagation of parameter uncertainty through a metric
//! expression.
//!
//! Inputs are sampled as mutually independent. Each joint sample draws the
//! variables in ascending identifier order from a single ChaCha8 stream, so a
//! fixed seed reproduces the run bit for bit.

use std::collections::BTreeMap;

use thiserror::Error;

use super::expr::{EvalError, Expr};
use super::repr::{EmpiricalDistribution, SampleError, UncertaintyRepr};
use super::rng;

/// Result of a Monte-Carlo propagation: the output sample set plus the number
/// of requested samples that had to be excluded (division by exactly zero, or
/// a non-finite result from overflow).
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub distribution: EmpiricalDistribution,
    pub excluded: usize,
    pub requested: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("all {0} samples were excluded (division by zero or non-finite result)")]
    AllSamplesExcluded(usize),
}

/// Propagates `env` through `expr` with `n` independent joint samples.
pub fn propagate_monte_carlo(
    expr: &Expr,
    env: &BTreeMap<String, UncertaintyRepr>,
    n: usize,
    seed: u64,
) -> Result<MonteCarloResult, MonteCarloError> {
    if n == 0 {
        return Err(MonteCarloError::Sample(SampleError::ZeroCount));
    }
    for repr in env.values() {
        repr.sample_check()?;
    }
    for name in expr.identifiers() {
        if !env.contains_key(name) {
            return Err(MonteCarloError::UnboundIdentifier(name.to_string()));
        }
    }

    let mut rng = rng::seeded(seed);
    let mut outputs = Vec::with_capacity(n);
    let mut excluded = 0usize;
    let mut point = BTreeMap::new();
    for _ in 0..n {
        // BTreeMap iteration is ascending by identifier; the draw order is
        // part of the determinism contract.
        for (name, repr) in env {
            point.insert(name.clone(), repr.draw(&mut rng));
        }
        match expr.eval(&point) {
            Ok(v) if v.is_finite() => outputs.push(v),
            Ok(_) | Err(EvalError::DivisionByZero) => excluded += 1,
            Err(EvalError::UnboundIdentifier(name)) => {
                return Err(MonteCarloError::UnboundIdentifier(name))
            }
        }
    }

    let distribution = EmpiricalDistribution::new(
        outputs,
        format!("monte-carlo(n={n}, seed={seed})"),
    )
    .map_err(|_| MonteCarloError::AllSamplesExcluded(n))?;
    Ok(MonteCarloResult {
        distribution,
        excluded,
        requested: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uncertainty::expr::parse_expression;
    use crate::uncertainty::interval::propagate_interval;

    fn env(bindings: &[(&str, UncertaintyRepr)]) -> BTreeMap<String, UncertaintyRepr> {
        bindings
            .iter()
            .map(|(name, r)| (name.to_string(), r.clone()))
            .collect()
    }

    #[test]
    fn degenerate_inputs_give_constant_output() {
        let expr = parse_expression("a + b").unwrap();
        let result = propagate_monte_carlo(
            &expr,
            &env(&[
                ("a", UncertaintyRepr::Point(1.0)),
                ("b", UncertaintyRepr::Point(2.0)),
            ]),
            3,
            0,
        )
        .unwrap();
        assert_eq!(result.distribution.samples(), &[3.0, 3.0, 3.0]);
        assert_eq!(result.excluded, 0);
    }

    #[test]
    fn linear_form_mean_matches_analytic_value() {
        // Oracle: E[2a + b] = 2*E[a] + E[b] = 1.5 for a, b ~ U(0, 1).
        let expr = parse_expression("2*a + b").unwrap();
        let result = propagate_monte_carlo(
            &expr,
            &env(&[
                ("a", UncertaintyRepr::Uniform { lo: 0.0, hi: 1.0 }),
                ("b", UncertaintyRepr::Uniform { lo: 0.0, hi: 1.0 }),
            ]),
            100_000,
            7,
        )
        .unwrap();
        let mean = result.distribution.mean();
        assert!((mean - 1.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn identical_seed_reproduces_distribution() {
        let expr = parse_expression("a * b - a").unwrap();
        let e = env(&[
            ("a", UncertaintyRepr::Normal { mean: 1.0, std: 0.3 }),
            ("b", UncertaintyRepr::Triangular { lo: 0.0, mode: 1.0, hi: 2.0 }),
        ]);
        let one = propagate_monte_carlo(&expr, &e, 5_000, 99).unwrap();
        let two = propagate_monte_carlo(&expr, &e, 5_000, 99).unwrap();
        assert_eq!(one, two);
        let other = propagate_monte_carlo(&expr, &e, 5_000, 100).unwrap();
        assert_ne!(one.distribution, other.distribution);
    }

    #[test]
    fn division_by_exact_zero_excludes_sample() {
        // b resamples from {-1, 0, 1}; draws hitting exactly 0 are excluded.
        let expr = parse_expression("a / b").unwrap();
        let result = propagate_monte_carlo(
            &expr,
            &env(&[
                ("a", UncertaintyRepr::Point(1.0)),
                ("b", UncertaintyRepr::Empirical(vec![-1.0, 0.0, 1.0])),
            ]),
            3_000,
            13,
        )
        .unwrap();
        assert!(result.excluded > 500, "excluded {}", result.excluded);
        assert_eq!(result.distribution.len() + result.excluded, 3_000);
        assert!(result
            .distribution
            .samples()
            .iter()
            .all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn all_excluded_is_an_error() {
        let expr = parse_expression("1 / b").unwrap();
        let err = propagate_monte_carlo(
            &expr,
            &env(&[("b", UncertaintyRepr::Point(0.0))]),
            10,
            0,
        )
        .unwrap_err();
        assert_eq!(err, MonteCarloError::AllSamplesExcluded(10));
    }

    #[test]
    fn unbound_identifier_is_an_error() {
        let expr = parse_expression("a + c").unwrap();
        let err = propagate_monte_carlo(
            &expr,
            &env(&[("a", UncertaintyRepr::Point(1.0))]),
            10,
            0,
        )
        .unwrap_err();
        assert_eq!(err, MonteCarloError::UnboundIdentifier("c".to_string()));
    }

    #[test]
    fn unsamplable_representation_is_an_error() {
        let expr = parse_expression("a").unwrap();
        let err = propagate_monte_carlo(
            &expr,
            &env(&[("a", UncertaintyRepr::ExternalTag("fuzzy".into()))]),
            10,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, MonteCarloError::Sample(_)));
    }

    #[test]
    fn outputs_lie_inside_interval_propagation_of_supports() {
        // Consistency between the two propagation routes: the Monte-Carlo
        // range must sit inside the interval result over the same supports.
        let expr = parse_expression("2*a + b*b - a*b").unwrap();
        let e = env(&[
            ("a", UncertaintyRepr::Uniform { lo: -1.0, hi: 2.0 }),
            ("b", UncertaintyRepr::Normal { mean: 0.0, std: 0.5 }),
        ]);
        let mc = propagate_monte_carlo(&expr, &e, 20_000, 21).unwrap();
        let ienv = e
            .iter()
            .map(|(k, r)| (k.clone(), r.support_bounds().unwrap()))
            .collect();
        let enclosure = propagate_interval(&expr, &ienv).unwrap();
        assert!(enclosure.contains(mc.distribution.min()));
        assert!(enclosure.contains(mc.distribution.max()));
    }
}
