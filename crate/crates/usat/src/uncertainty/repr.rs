//! Uncertainty representations for parameters: point values, intervals,
//! parametric distributions, empirical data, probability boxes, and opaque
//! tags for representation families this crate stores but does not compute
//! with (Dempster-Shafer, possibility theory, fuzzy sets).

use std::fmt;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::interval::Interval;
use super::rng;

/// Default truncation half-width, in standard deviations, used to give a
/// normal distribution finite support. Covers 99.994 % of the mass.
pub const DEFAULT_NORMAL_SUPPORT_K: f64 = 4.0;

/// How a parameter's uncertainty is represented.
///
/// `Empirical` samples and both p-box sample sets are sorted ascending.
/// The p-box `lower` CDF is the right (lower-probability) bounding
/// distribution; its CDF must lie at or below the `upper` CDF everywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum UncertaintyRepr {
    Point(f64),
    Interval { lo: f64, hi: f64 },
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, std: f64 },
    Triangular { lo: f64, mode: f64, hi: f64 },
    Empirical(Vec<f64>),
    PBox { lower: Vec<f64>, upper: Vec<f64> },
    /// Out-of-scope representation recorded as metadata only.
    ExternalTag(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReprError {
    #[error("{kind}: bounds must be finite with lo <= hi (got lo={lo}, hi={hi})")]
    BadBounds { kind: &'static str, lo: f64, hi: f64 },
    #[error("normal: std must be finite and > 0 (got {0})")]
    BadStd(f64),
    #[error("normal: mean must be finite (got {0})")]
    BadMean(f64),
    #[error("triangular: requires finite lo <= mode <= hi (got lo={lo}, mode={mode}, hi={hi})")]
    BadTriangular { lo: f64, mode: f64, hi: f64 },
    #[error("point: value must be finite (got {0})")]
    BadPoint(f64),
    #[error("{kind}: samples must be non-empty, finite and sorted ascending")]
    BadSamples { kind: &'static str },
    #[error("pbox: lower CDF exceeds upper CDF at {at}")]
    PBoxOrder { at: f64 },
}

/// Why a representation cannot be sampled or bounded.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("operation not supported for `{kind}` representation")]
    Unsupported { kind: &'static str },
    #[error("sample count must be at least 1")]
    ZeroCount,
}

fn samples_ok(samples: &[f64]) -> bool {
    !samples.is_empty()
        && samples.iter().all(|v| v.is_finite())
        && samples.windows(2).all(|w| w[0] <= w[1])
}

/// Empirical CDF value of sorted `samples` at `x`.
fn ecdf(samples: &[f64], x: f64) -> f64 {
    let below = samples.partition_point(|&s| s <= x);
    below as f64 / samples.len() as f64
}

impl UncertaintyRepr {
    /// Short tag naming the variant; also the `type` value used in document
    /// files.
    pub fn kind_name(&self) -> &'static str {
        match self {
            UncertaintyRepr::Point(_) => "point",
            UncertaintyRepr::Interval { .. } => "interval",
            UncertaintyRepr::Uniform { .. } => "uniform",
            UncertaintyRepr::Normal { .. } => "normal",
            UncertaintyRepr::Triangular { .. } => "triangular",
            UncertaintyRepr::Empirical(_) => "empirical",
            UncertaintyRepr::PBox { .. } => "pbox",
            UncertaintyRepr::ExternalTag(_) => "external",
        }
    }

    /// True for the forms that describe a sampling distribution, which is
    /// what an aleatory framing requires: uniform, normal, triangular or
    /// empirical.
    pub fn is_distribution_form(&self) -> bool {
        matches!(
            self,
            UncertaintyRepr::Uniform { .. }
                | UncertaintyRepr::Normal { .. }
                | UncertaintyRepr::Triangular { .. }
                | UncertaintyRepr::Empirical(_)
        )
    }

    /// Checks the representation invariants.
    pub fn validate(&self) -> Result<(), ReprError> {
        match self {
            UncertaintyRepr::Point(v) => {
                if !v.is_finite() {
                    return Err(ReprError::BadPoint(*v));
                }
            }
            UncertaintyRepr::Interval { lo, hi } | UncertaintyRepr::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(ReprError::BadBounds {
                        kind: self.kind_name(),
                        lo: *lo,
                        hi: *hi,
                    });
                }
            }
            UncertaintyRepr::Normal { mean, std } => {
                if !mean.is_finite() {
                    return Err(ReprError::BadMean(*mean));
                }
                if !(std.is_finite() && *std > 0.0) {
                    return Err(ReprError::BadStd(*std));
                }
            }
            UncertaintyRepr::Triangular { lo, mode, hi } => {
                if !(lo.is_finite() && mode.is_finite() && hi.is_finite() && lo <= mode && mode <= hi)
                {
                    return Err(ReprError::BadTriangular {
                        lo: *lo,
                        mode: *mode,
                        hi: *hi,
                    });
                }
            }
            UncertaintyRepr::Empirical(samples) => {
                if !samples_ok(samples) {
                    return Err(ReprError::BadSamples { kind: "empirical" });
                }
            }
            UncertaintyRepr::PBox { lower, upper } => {
                if !samples_ok(lower) {
                    return Err(ReprError::BadSamples { kind: "pbox lower" });
                }
                if !samples_ok(upper) {
                    return Err(ReprError::BadSamples { kind: "pbox upper" });
                }
                // Step CDFs can only cross at a sample point, so checking the
                // union of sample points is exhaustive.
                for &x in lower.iter().chain(upper.iter()) {
                    if ecdf(lower, x) > ecdf(upper, x) {
                        return Err(ReprError::PBoxOrder { at: x });
                    }
                }
            }
            UncertaintyRepr::ExternalTag(_) => {}
        }
        Ok(())
    }

    /// Finite support, using [`DEFAULT_NORMAL_SUPPORT_K`] for normals.
    pub fn support_bounds(&self) -> Result<Interval, SampleError> {
        self.support_bounds_with_k(DEFAULT_NORMAL_SUPPORT_K)
    }

    /// Finite support with an explicit normal truncation width `k` (in
    /// standard deviations). `ExternalTag` has no computable support.
    pub fn support_bounds_with_k(&self, k: f64) -> Result<Interval, SampleError> {
        let (lo, hi) = match self {
            UncertaintyRepr::Point(v) => (*v, *v),
            UncertaintyRepr::Interval { lo, hi }
            | UncertaintyRepr::Uniform { lo, hi } => (*lo, *hi),
            UncertaintyRepr::Triangular { lo, hi, .. } => (*lo, *hi),
            UncertaintyRepr::Normal { mean, std } => (mean - k * std, mean + k * std),
            UncertaintyRepr::Empirical(samples) => (samples[0], samples[samples.len() - 1]),
            UncertaintyRepr::PBox { lower, upper } => {
                // Hull over both bounding sample sets.
                let lo = lower[0].min(upper[0]);
                let hi = lower[lower.len() - 1].max(upper[upper.len() - 1]);
                (lo, hi)
            }
            UncertaintyRepr::ExternalTag(_) => {
                return Err(SampleError::Unsupported {
                    kind: self.kind_name(),
                })
            }
        };
        Ok(Interval::new(lo, hi).expect("validated representation has finite ordered support"))
    }

    /// Draws `n` samples deterministically from a ChaCha8 stream seeded with
    /// `seed`. Every value lies within [`support_bounds`]. Empirical data is
    /// resampled with replacement; intervals sample uniformly; normals are
    /// truncated at [`DEFAULT_NORMAL_SUPPORT_K`] standard deviations.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>, SampleError> {
        if n == 0 {
            return Err(SampleError::ZeroCount);
        }
        self.sample_check()?;
        let mut rng = rng::seeded(seed);
        Ok((0..n).map(|_| self.draw(&mut rng)).collect())
    }

    /// Errors unless the representation is samplable (not a p-box or an
    /// external tag).
    pub(crate) fn sample_check(&self) -> Result<(), SampleError> {
        match self {
            UncertaintyRepr::PBox { .. } | UncertaintyRepr::ExternalTag(_) => {
                Err(SampleError::Unsupported {
                    kind: self.kind_name(),
                })
            }
            _ => Ok(()),
        }
    }

    /// One draw from the stream. `Point` consumes no randomness; every other
    /// samplable form consumes exactly one uniform variate.
    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            UncertaintyRepr::Point(v) => *v,
            UncertaintyRepr::Interval { lo, hi } | UncertaintyRepr::Uniform { lo, hi } => {
                lo + rng::unit_f64(rng) * (hi - lo)
            }
            UncertaintyRepr::Normal { mean, std } => {
                let k = DEFAULT_NORMAL_SUPPORT_K;
                let p_lo = normal_cdf(-k);
                let p_hi = normal_cdf(k);
                let p = p_lo + rng::unit_f64(rng) * (p_hi - p_lo);
                let x = mean + std * inverse_normal_cdf(p);
                x.clamp(mean - k * std, mean + k * std)
            }
            UncertaintyRepr::Triangular { lo, mode, hi } => {
                if hi == lo {
                    return *mode;
                }
                let u = rng::unit_f64(rng);
                let cut = (mode - lo) / (hi - lo);
                let x = if u < cut {
                    lo + (u * (hi - lo) * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - u) * (hi - lo) * (hi - mode)).sqrt()
                };
                x.clamp(*lo, *hi)
            }
            UncertaintyRepr::Empirical(samples) => {
                let u = rng::unit_f64(rng);
                let idx = ((u * samples.len() as f64) as usize).min(samples.len() - 1);
                samples[idx]
            }
            UncertaintyRepr::PBox { .. } | UncertaintyRepr::ExternalTag(_) => {
                unreachable!("sample_check rejects unsamplable representations")
            }
        }
    }
}

impl fmt::Display for UncertaintyRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UncertaintyRepr::Point(v) => write!(f, "point({v})"),
            UncertaintyRepr::Interval { lo, hi } => write!(f, "interval[{lo}, {hi}]"),
            UncertaintyRepr::Uniform { lo, hi } => write!(f, "uniform({lo}, {hi})"),
            UncertaintyRepr::Normal { mean, std } => write!(f, "normal(mean={mean}, std={std})"),
            UncertaintyRepr::Triangular { lo, mode, hi } => {
                write!(f, "triangular({lo}, {mode}, {hi})")
            }
            UncertaintyRepr::Empirical(samples) => write!(f, "empirical(n={})", samples.len()),
            UncertaintyRepr::PBox { lower, upper } => {
                write!(f, "pbox(lower n={}, upper n={})", lower.len(), upper.len())
            }
            UncertaintyRepr::ExternalTag(name) => write!(f, "external:{name}"),
        }
    }
}

/// A set of observed or simulated values, kept sorted ascending, with a note
/// on where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmpiricalError {
    #[error("empirical distribution requires at least one sample")]
    Empty,
    #[error("empirical distribution sample {index} is not finite")]
    NonFinite { index: usize },
}

impl EmpiricalDistribution {
    /// Sorts the samples and validates them (non-empty, all finite).
    pub fn new(mut samples: Vec<f64>, provenance: impl Into<String>) -> Result<Self, EmpiricalError> {
        if samples.is_empty() {
            return Err(EmpiricalError::Empty);
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(EmpiricalError::NonFinite { index });
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution {
            samples,
            provenance: provenance.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Converts into the `Empirical` representation so measured data can be
    /// used as a parameter uncertainty.
    pub fn into_repr(self) -> UncertaintyRepr {
        UncertaintyRepr::Empirical(self.samples)
    }
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erf approximation
/// (absolute error below 1.5e-7).
pub(crate) fn normal_cdf(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    0.5 * (1.0 + erf(z))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9). `p` must lie strictly inside (0, 1).
pub(crate) fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}
