//! Empirical characterization of recorded loop delays.
//!
//! Delay logs from coupled-laboratory experiments are binned into an evenly
//! spaced histogram with relative probabilities `rho_i = c_i / N`, summarized
//! (mode bin, edge bins, basic statistics), and optionally folded back into
//! an [`EmpiricalDistribution`] so a measured delay can serve as a parameter
//! representation.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::uncertainty::{EmpiricalDistribution, EmpiricalError};

/// A validated series of delay measurements in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySamples {
    values: Vec<f64>,
    source: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DelayError {
    #[error("no delay samples")]
    EmptySamples,
    #[error("sample {index} is {value}, expected a finite value > 0")]
    InvalidSample { index: usize, value: f64 },
    #[error("histogram needs at least one bin")]
    ZeroBins,
    #[error("line {line}: `{text}` is not a delay value")]
    BadLine { line: usize, text: String },
}

impl DelaySamples {
    /// Validates the series: non-empty, every value finite and positive.
    /// `source` records where the data came from (file name, experiment id).
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self, DelayError> {
        if values.is_empty() {
            return Err(DelayError::EmptySamples);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(DelayError::InvalidSample { index, value });
            }
        }
        Ok(DelaySamples {
            values,
            source: source.into(),
        })
    }

    /// Parses a delay log. Accepted line shapes, after trimming:
    /// empty (skipped), a single delay value, or two whitespace-separated
    /// columns `timestamp delay` where only the second is used. A single
    /// leading `delay_ms` header line (or `timestamp delay_ms`) is allowed.
    pub fn from_csv_text(text: &str, source: impl Into<String>) -> Result<Self, DelayError> {
        let mut values = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|f| !f.is_empty())
                .collect();
            let value_text = match fields.as_slice() {
                [single] => *single,
                [_, second] => *second,
                _ => {
                    return Err(DelayError::BadLine {
                        line: i + 1,
                        text: raw.to_string(),
                    })
                }
            };
            if i == 0 && values.is_empty() && value_text == "delay_ms" {
                continue;
            }
            match value_text.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) => {
                    return Err(DelayError::BadLine {
                        line: i + 1,
                        text: raw.to_string(),
                    })
                }
            }
        }
        DelaySamples::new(values, source)
    }

    pub fn from_csv_file(path: &Path) -> Result<Self, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        DelaySamples::from_csv_text(&text, path.display().to_string())
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // validated non-empty at construction
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evenly spaced histogram over the sample range with exact counts and
/// relative probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayHistogram {
    n_bins: usize,
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    rel_prob: Vec<f64>,
    total: u64,
}

impl DelayHistogram {
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.n_bins as f64
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `rho_i = c_i / N`, each a single correctly rounded division.
    pub fn rel_prob(&self) -> &[f64] {
        &self.rel_prob
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Edges of bin `i`. All bins are half-open `[lo_i, hi_i)` except the
    /// last, which is closed so the maximum is counted.
    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let width = self.hi - self.lo;
        let left = if i == 0 {
            self.lo
        } else {
            self.lo + width * i as f64 / self.n_bins as f64
        };
        let right = if i + 1 == self.n_bins {
            self.hi
        } else {
            self.lo + width * (i + 1) as f64 / self.n_bins as f64
        };
        (left, right)
    }
}

/// Bins the samples into `n_bins` evenly spaced bins spanning
/// `[min(samples), max(samples)]`. Every sample lands in exactly one bin:
/// bins are half-open to the right, the last bin is closed. When all samples
/// are equal the histogram degenerates to a single bin holding everything.
pub fn bin_delays(samples: &DelaySamples, n_bins: usize) -> Result<DelayHistogram, DelayError> {
    if n_bins == 0 {
        return Err(DelayError::ZeroBins);
    }
    let lo = samples.min();
    let hi = samples.max();
    if lo == hi {
        let total = samples.len() as u64;
        return Ok(DelayHistogram {
            n_bins: 1,
            lo,
            hi,
            counts: vec![total],
            rel_prob: vec![1.0],
            total,
        });
    }
    let mut counts = vec![0u64; n_bins];
    let range = hi - lo;
    for &x in samples.values() {
        // Multiply before dividing: scaling by the bin count first keeps
        // bin indices exactly consistent between an n-bin and a 2n-bin
        // histogram (both scalings round identically), which makes merging
        // adjacent fine bins reproduce the coarse histogram bit-exactly.
        let position = (x - lo) * n_bins as f64 / range;
        let index = (position as usize).min(n_bins - 1);
        counts[index] += 1;
    }
    let total = samples.len() as u64;
    let rel_prob = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(DelayHistogram {
        n_bins,
        lo,
        hi,
        counts,
        rel_prob,
        total,
    })
}

/// The histogram bin with the highest relative probability (ties broken by
/// lowest index).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBin {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub rel_prob: f64,
}

/// Summary statistics of a delay series and its histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub mode_bin: ModeBin,
    /// Relative probabilities of the first and last bin.
    pub edge_bins: (f64, f64),
}

impl fmt::Display for DelaySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "min {} ms, max {} ms, mean {:.4} ms, median {:.4} ms, mode bin [{}, {}] at {}",
            self.min,
            self.max,
            self.mean,
            self.median,
            self.mode_bin.lo,
            self.mode_bin.hi,
            crate::docio::format_percent(self.mode_bin.rel_prob),
        )
    }
}

/// Summarizes a histogram together with the samples it was built from.
pub fn summarize(hist: &DelayHistogram, samples: &DelaySamples) -> DelaySummary {
    let mut mode_index = 0;
    for (i, &rho) in hist.rel_prob().iter().enumerate() {
        if rho > hist.rel_prob()[mode_index] {
            mode_index = i;
        }
    }
    let (mode_lo, mode_hi) = hist.bin_edges(mode_index);

    let mut sorted: Vec<f64> = samples.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let mean = sorted.iter().sum::<f64>() / n as f64;

    DelaySummary {
        min: hist.lo(),
        max: hist.hi(),
        mean,
        median,
        mode_bin: ModeBin {
            index: mode_index,
            lo: mode_lo,
            hi: mode_hi,
            rel_prob: hist.rel_prob()[mode_index],
        },
        edge_bins: (
            hist.rel_prob()[0],
            hist.rel_prob()[hist.n_bins() - 1],
        ),
    }
}

/// Sorts the samples into an [`EmpiricalDistribution`], so measured delay
/// can be attached to a parameter as its uncertainty representation.
pub fn to_empirical(samples: &DelaySamples) -> EmpiricalDistribution {
    match EmpiricalDistribution::new(samples.values().to_vec(), samples.source().to_string()) {
        Ok(dist) => dist,
        // DelaySamples is validated non-empty and finite, so conversion
        // cannot fail; keep the match so a future variant is not silently
        // swallowed.
        Err(EmpiricalError::Empty) | Err(EmpiricalError::NonFinite { .. }) => {
            unreachable!("validated delay samples convert cleanly")
        }
    }
}
