//! Degree weights `W_d` estimated from samples, with delete-a-group
//! jackknife standard errors.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::SampleSet;
use crate::rng::{self, domain};
use crate::walsh::{fwht_in_place, DegreeProfile};

pub const MIN_ESTIMATE_SAMPLES: usize = 1000;
/// Jackknife groups.
pub const JACKKNIFE_GROUPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// `Σ ĉ_A(S) ĉ_B(S)` over the first and second half of the stream.
    #[default]
    CrossSplit,
    /// `Σ ĉ(S)² − (1 − ĉ(S)²)/(N − 1)` over the whole stream.
    FwhtDebiased,
    /// Exact weights, no sampling.
    Exact,
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cross-split" => Ok(Estimator::CrossSplit),
            "fwht-debiased" => Ok(Estimator::FwhtDebiased),
            other => Err(Error::Unknown {
                kind: "estimator",
                name: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::CrossSplit => "cross-split",
            Estimator::FwhtDebiased => "fwht-debiased",
            Estimator::Exact => "exact",
        })
    }
}

/// Estimated `W_0..=W_max_degree` with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfileEstimate {
    pub n: usize,
    pub weights: Vec<f64>,
    pub stderr: Vec<f64>,
    pub estimator: Estimator,
    pub sample_count: usize,
    pub seed: Option<u64>,
}

impl DegreeProfileEstimate {
    /// Wraps an exact profile, truncated to `max_degree`, with zero errors.
    pub fn exact(profile: &DegreeProfile, max_degree: usize) -> Result<Self> {
        check_degree(profile.n, max_degree)?;
        Ok(Self {
            n: profile.n,
            weights: profile.weights[..=max_degree].to_vec(),
            stderr: vec![0.0; max_degree + 1],
            estimator: Estimator::Exact,
            sample_count: 0,
            seed: None,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.weights.len() - 1
    }
}

fn check_degree(n: usize, max_degree: usize) -> Result<()> {
    if max_degree > n {
        return Err(Error::param(
            "max_degree",
            format!("{max_degree} exceeds bit count {n}"),
        ));
    }
    Ok(())
}

/// Unnormalized character sums `Σ_i χ_S(x_i)` for every `S`.
fn character_sums(n: usize, outcomes: &[u32]) -> Vec<f64> {
    let mut v = vec![0.0; 1 << n];
    for &x in outcomes {
        v[x as usize] += 1.0;
    }
    fwht_in_place(&mut v);
    v
}

fn accumulate(n: usize, max_degree: usize, term: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut w = vec![0.0; max_degree + 1];
    for subset in 0..1usize << n {
        let d = subset.count_ones() as usize;
        if d <= max_degree {
            w[d] += term(subset);
        }
    }
    w
}

/// One half of the stream split into jackknife groups.
struct Part {
    sums: Vec<f64>,
    len: usize,
    groups: Vec<Vec<u32>>,
}

impl Part {
    fn new(n: usize, outcomes: &[u32], labels: &[usize]) -> Self {
        let mut groups = vec![Vec::new(); JACKKNIFE_GROUPS];
        for (&x, &g) in outcomes.iter().zip(labels) {
            groups[g].push(x);
        }
        Self {
            sums: character_sums(n, outcomes),
            len: outcomes.len(),
            groups,
        }
    }

    /// Coefficient estimates with group `g` removed (all samples if `None`).
    fn coefficients(&self, n: usize, g: Option<usize>) -> Vec<f64> {
        match g {
            None => self.sums.iter().map(|s| s / self.len as f64).collect(),
            Some(g) => {
                let left = character_sums(n, &self.groups[g]);
                let m = (self.len - self.groups[g].len()) as f64;
                self.sums
                    .iter()
                    .zip(&left)
                    .map(|(s, l)| (s - l) / m)
                    .collect()
            }
        }
    }
}

/// Balanced random assignment of `len` positions to jackknife groups.
fn group_labels(len: usize, seed: u64) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..len).map(|i| i % JACKKNIFE_GROUPS).collect();
    labels.shuffle(&mut rng::stream(seed, domain::SPLITS, u64::MAX));
    labels
}

/// Estimates `W_0..=W_max_degree` from an outcome stream.
///
/// The cross-split estimator halves the stream at its midpoint, so a
/// drifting stream biases it rather than being averaged away. Standard errors
/// come from a delete-a-group jackknife over `JACKKNIFE_GROUPS` groups
/// assigned at random under `seed`.
pub fn estimate_degree_profile(
    s: &SampleSet,
    max_degree: usize,
    estimator: Estimator,
    seed: u64,
) -> Result<DegreeProfileEstimate> {
    if s.len() < MIN_ESTIMATE_SAMPLES {
        return Err(Error::Insufficient(format!(
            "degree estimation needs at least {MIN_ESTIMATE_SAMPLES} samples, got {}",
            s.len()
        )));
    }
    let n = s.n();
    check_degree(n, max_degree)?;
    let labels = group_labels(s.len(), seed);
    let outcomes = s.outcomes();

    let statistic: Box<dyn Fn(Option<usize>) -> Vec<f64>> = match estimator {
        Estimator::CrossSplit => {
            let mid = s.len() / 2;
            let a = Part::new(n, &outcomes[..mid], &labels[..mid]);
            let b = Part::new(n, &outcomes[mid..], &labels[mid..]);
            Box::new(move |g| {
                let (ca, cb) = (a.coefficients(n, g), b.coefficients(n, g));
                accumulate(n, max_degree, |subset| ca[subset] * cb[subset])
            })
        }
        Estimator::FwhtDebiased => {
            let all = Part::new(n, outcomes, &labels);
            Box::new(move |g| {
                let c = all.coefficients(n, g);
                let m = match g {
                    None => all.len,
                    Some(g) => all.len - all.groups[g].len(),
                } as f64;
                accumulate(n, max_degree, |subset| {
                    let sq = c[subset] * c[subset];
                    sq - (1.0 - sq) / (m - 1.0)
                })
            })
        }
        Estimator::Exact => {
            return Err(Error::param(
                "estimator",
                "exact weights come from a distribution, not samples",
            ))
        }
    };

    let weights = statistic(None);
    let leave_out: Vec<Vec<f64>> = (0..JACKKNIFE_GROUPS).map(|g| statistic(Some(g))).collect();
    let groups = JACKKNIFE_GROUPS as f64;
    let stderr = (0..=max_degree)
        .map(|d| {
            let mean = leave_out.iter().map(|w| w[d]).sum::<f64>() / groups;
            let ss: f64 = leave_out.iter().map(|w| (w[d] - mean).powi(2)).sum();
            ((groups - 1.0) / groups * ss).sqrt()
        })
        .collect();

    Ok(DegreeProfileEstimate {
        n,
        weights,
        stderr,
        estimator,
        sample_count: s.len(),
        seed: Some(seed),
    })
}
