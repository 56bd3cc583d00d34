//! Two-halves stationarity test: the distance between the empirical
//! distributions of the first and second half of a stream, compared with
//! the distances produced by uniformly random equal splits.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::SampleSet;
use crate::rng::{self, domain};

pub const MIN_TEST_SAMPLES: usize = 100;
pub const MIN_SPLITS: usize = 99;
pub const DEFAULT_SPLITS: usize = 999;

/// Distance between two empirical distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    L2,
    Tv,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(Metric::L2),
            "tv" => Ok(Metric::Tv),
            other => Err(Error::Unknown {
                kind: "metric",
                name: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::L2 => "l2",
            Metric::Tv => "tv",
        })
    }
}

impl Metric {
    /// Distance between two equal-size halves given their counts over a
    /// shared outcome labelling.
    fn between_halves(self, a: &[u32], b: &[u32], half: usize) -> f64 {
        let scale = 1.0 / half as f64;
        match self {
            Metric::L2 => {
                let sum: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| {
                        let d = x as f64 - y as f64;
                        d * d
                    })
                    .sum();
                sum.sqrt() * scale
            }
            Metric::Tv => {
                let sum: u64 = a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y) as u64).sum();
                0.5 * sum as f64 * scale
            }
        }
    }
}

/// Relabels outcomes to `0..k` over the observed support.
fn compact_labels(outcomes: &[u32]) -> (Vec<u32>, usize) {
    let mut support: Vec<u32> = outcomes.to_vec();
    support.sort_unstable();
    support.dedup();
    let labels = outcomes
        .iter()
        .map(|x| support.binary_search(x).expect("present") as u32)
        .collect();
    (labels, support.len())
}

fn count_labels(labels: &[u32], k: usize, counts: &mut Vec<u32>) {
    counts.clear();
    counts.resize(k, 0);
    for &l in labels {
        counts[l as usize] += 1;
    }
}

fn check_metric_input(s: &SampleSet) -> Result<usize> {
    if s.len() < 2 {
        return Err(Error::Insufficient(format!(
            "need at least 2 samples, got {}",
            s.len()
        )));
    }
    Ok(s.len() / 2)
}

/// Distance between the first and second half of the stream, in order. An
/// odd trailing sample is ignored.
pub fn sequential_half_distance(s: &SampleSet, metric: Metric) -> Result<f64> {
    let half = check_metric_input(s)?;
    let (labels, k) = compact_labels(&s.outcomes()[..2 * half]);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    count_labels(&labels[..half], k, &mut a);
    count_labels(&labels[half..], k, &mut b);
    Ok(metric.between_halves(&a, &b, half))
}

/// Same as [`sequential_half_distance`] with the metric given by name.
pub fn sequential_half_distance_named(s: &SampleSet, metric: &str) -> Result<f64> {
    sequential_half_distance(s, metric.parse()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub observed_distance: f64,
    /// Distances for the random splits, in split order.
    pub null_histogram: Vec<f64>,
    pub p_value: f64,
    pub metric: Metric,
    pub splits: usize,
    pub seed: u64,
    pub sample_count: usize,
    /// Trailing samples left out to make the halves equal.
    pub dropped_samples: usize,
}

impl StationarityReport {
    /// `(1 + #{b : null_b ≥ observed}) / (B + 1)`.
    pub fn recompute_p_value(&self) -> f64 {
        let exceed = self
            .null_histogram
            .iter()
            .filter(|&&d| d >= self.observed_distance)
            .count();
        (1 + exceed) as f64 / (self.null_histogram.len() + 1) as f64
    }
}

/// Compares the sequential split against `splits` uniformly random equal
/// partitions of the same samples. Split `b` shuffles with the stream keyed
/// by `(seed, b)`.
pub fn stationarity_test(
    s: &SampleSet,
    splits: usize,
    metric: Metric,
    seed: u64,
) -> Result<StationarityReport> {
    if s.len() < MIN_TEST_SAMPLES {
        return Err(Error::Insufficient(format!(
            "stationarity test needs at least {MIN_TEST_SAMPLES} samples, got {}",
            s.len()
        )));
    }
    if splits < MIN_SPLITS {
        return Err(Error::Insufficient(format!(
            "stationarity test needs at least {MIN_SPLITS} random splits, got {splits}"
        )));
    }
    let half = s.len() / 2;
    let used = 2 * half;
    let (labels, k) = compact_labels(&s.outcomes()[..used]);

    let mut total = Vec::new();
    count_labels(&labels, k, &mut total);
    let observed = {
        let mut a = Vec::new();
        count_labels(&labels[..half], k, &mut a);
        let b: Vec<u32> = total.iter().zip(&a).map(|(t, x)| t - x).collect();
        metric.between_halves(&a, &b, half)
    };

    let null_histogram: Vec<f64> = (0..splits)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), Vec::new()),
            |(pool, a, b), split| {
                let mut rng = rng::stream(seed, domain::SPLITS, split as u64);
                pool.clear();
                pool.extend_from_slice(&labels);
                // Partial Fisher–Yates: the first `half` slots become a
                // uniformly random subset of size `half`.
                for i in 0..half {
                    let j = rng.gen_range(i..used);
                    pool.swap(i, j);
                }
                count_labels(&pool[..half], k, a);
                b.clear();
                b.extend(total.iter().zip(a.iter()).map(|(t, x)| t - x));
                metric.between_halves(a, b, half)
            },
        )
        .collect();

    let mut report = StationarityReport {
        observed_distance: observed,
        null_histogram,
        p_value: 0.0,
        metric,
        splits,
        seed,
        sample_count: s.len(),
        dropped_samples: s.len() - used,
    };
    report.p_value = report.recompute_p_value();
    Ok(report)
}
