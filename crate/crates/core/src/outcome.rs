//! Bitstrings, ordered sample streams and dense outcome distributions.
//!
//! Outcomes are packed little-endian: bit `i` of the index is the value of
//! position (qubit) `i`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, domain};
use crate::MAX_BITS;

fn check_bits(n: usize) -> Result<()> {
    if (1..=MAX_BITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::BitCount(n))
    }
}

/// A length-`n` 0/1 outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    n: u8,
    index: u32,
}

impl BitString {
    pub fn new(n: usize, index: u32) -> Result<Self> {
        check_bits(n)?;
        if (index as u64) >> n != 0 {
            return Err(Error::param(
                "index",
                format!("{index} does not fit in {n} bits"),
            ));
        }
        Ok(Self { n: n as u8, index })
    }

    /// Packs `bits[i]` into bit `i` of the index.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        check_bits(bits.len())?;
        let index = bits
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i));
        Ok(Self {
            n: bits.len() as u8,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len(), "bit {i} out of range for length {}", self.n);
        (self.index >> i) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.bit(i)).collect()
    }
}

impl fmt::Display for BitString {
    /// Position 0 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Provenance carried alongside a sample stream.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub source: Option<String>,
    pub seed: Option<u64>,
    /// Stream positions at which a new acquisition batch starts.
    pub batches: Vec<usize>,
    pub circuit: Option<String>,
    /// Set when the stream order carries no acquisition-time meaning.
    #[serde(default)]
    pub unordered: bool,
}

/// An ordered stream of outcomes. Order is preserved exactly as produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    n: usize,
    outcomes: Vec<u32>,
    pub meta: SampleMeta,
}

impl SampleSet {
    pub fn new(n: usize, outcomes: Vec<u32>) -> Result<Self> {
        check_bits(n)?;
        if let Some(bad) = outcomes.iter().find(|&&x| (x as u64) >> n != 0) {
            return Err(Error::param(
                "outcomes",
                format!("{bad} does not fit in {n} bits"),
            ));
        }
        Ok(Self {
            n,
            outcomes,
            meta: SampleMeta::default(),
        })
    }

    pub fn from_bitstrings(n: usize, samples: &[BitString]) -> Result<Self> {
        check_bits(n)?;
        if let Some(bad) = samples.iter().find(|b| b.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Ok(Self {
            n,
            outcomes: samples.iter().map(|b| b.index()).collect(),
            meta: SampleMeta::default(),
        })
    }

    pub(crate) fn from_parts(n: usize, outcomes: Vec<u32>, meta: SampleMeta) -> Self {
        debug_assert!(outcomes.iter().all(|&x| (x as u64) >> n == 0));
        Self { n, outcomes, meta }
    }

    pub fn with_meta(mut self, meta: SampleMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Packed outcome indices in stream order.
    pub fn outcomes(&self) -> &[u32] {
        &self.outcomes
    }

    pub fn get(&self, i: usize) -> Option<BitString> {
        self.outcomes.get(i).map(|&index| BitString {
            n: self.n as u8,
            index,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = BitString> + '_ {
        let n = self.n as u8;
        self.outcomes
            .iter()
            .map(move |&index| BitString { n, index })
    }

    /// Sub-stream `[start, end)`, keeping the source label and seed.
    pub fn slice(&self, start: usize, end: usize) -> SampleSet {
        SampleSet {
            n: self.n,
            outcomes: self.outcomes[start..end].to_vec(),
            meta: SampleMeta {
                batches: Vec::new(),
                ..self.meta.clone()
            },
        }
    }

    /// Appends `other` after `self`.
    pub fn concat(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        let mut outcomes = Vec::with_capacity(self.len() + other.len());
        outcomes.extend_from_slice(&self.outcomes);
        outcomes.extend_from_slice(&other.outcomes);
        Ok(SampleSet {
            n: self.n,
            outcomes,
            meta: SampleMeta {
                batches: vec![0, self.len()],
                ..self.meta.clone()
            },
        })
    }

    /// Per-outcome counts.
    pub fn counts(&self) -> Vec<u64> {
        counts_of(self.n, &self.outcomes)
    }
}

pub(crate) fn counts_of(n: usize, outcomes: &[u32]) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << n];
    for &x in outcomes {
        counts[x as usize] += 1;
    }
    counts
}

/// Dense probability vector over all `2^n` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    n: usize,
    p: Vec<f64>,
}

/// Tolerance on total mass accepted by [`OutcomeDistribution::new`].
pub const MASS_TOLERANCE: f64 = 1e-9;

impl OutcomeDistribution {
    pub fn new(n: usize, p: Vec<f64>) -> Result<Self> {
        check_bits(n)?;
        if p.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: p.len(),
            });
        }
        if let Some((i, v)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!("entry {i} is {v}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("total mass {total}")));
        }
        Ok(Self { n, p })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidDistribution(format!("total weight {total}")));
        }
        Self::new(n, weights.into_iter().map(|w| w / total).collect())
    }

    /// For results of stochastic maps computed in floating point: entries in
    /// `(-1e-12, 0)` are rounding residue and are clamped to zero.
    pub(crate) fn from_computed(n: usize, mut p: Vec<f64>) -> Self {
        for v in p.iter_mut() {
            if *v < 0.0 {
                debug_assert!(*v > -1e-9, "negative probability {v}");
                *v = 0.0;
            }
        }
        Self { n, p }
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_bits(n)?;
        let dim = 1usize << n;
        Ok(Self {
            n,
            p: vec![1.0 / dim as f64; dim],
        })
    }

    pub fn delta(n: usize, index: u32) -> Result<Self> {
        let b = BitString::new(n, index)?;
        let mut p = vec![0.0; 1 << n];
        p[b.index() as usize] = 1.0;
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn prob(&self, x: BitString) -> f64 {
        assert_eq!(x.len(), self.n);
        self.p[x.index() as usize]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }

    /// Collision probability `Σ p(x)^2`.
    pub fn collision(&self) -> f64 {
        self.p.iter().map(|v| v * v).sum()
    }

    /// Draws `count` i.i.d. outcomes; draw `i` uses the stream keyed by `(seed, i)`.
    pub fn sample(&self, count: usize, seed: u64) -> SampleSet {
        let sampler = CdfSampler::new(&self.p);
        let outcomes = (0..count)
            .map(|i| {
                let mut rng = rng::stream(seed, domain::DISTRIBUTION_SHOTS, i as u64);
                sampler.draw(rng.gen::<f64>())
            })
            .collect();
        SampleSet::from_parts(
            self.n,
            outcomes,
            SampleMeta {
                source: Some("distribution".into()),
                seed: Some(seed),
                ..SampleMeta::default()
            },
        )
    }
}

/// Inverse-CDF sampler over a dense probability vector.
pub(crate) struct CdfSampler {
    cumulative: Vec<f64>,
}

impl CdfSampler {
    pub(crate) fn new(p: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = p
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        Self { cumulative }
    }

    /// Maps a uniform draw in `[0,1)` to an outcome index.
    pub(crate) fn draw(&self, u: f64) -> u32 {
        let total = *self.cumulative.last().expect("nonempty");
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        // Guard against the top bucket being unreachable through rounding and
        // against landing on a trailing zero-probability bucket.
        let mut idx = idx.min(self.cumulative.len() - 1);
        while idx > 0 && self.cumulative[idx] == self.cumulative[idx - 1] {
            idx -= 1;
        }
        idx as u32
    }
}

/// Empirical distribution `count(x)/|s|`.
pub fn empirical_distribution(s: &SampleSet) -> Result<OutcomeDistribution> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total = s.len() as f64;
    let p = s.counts().into_iter().map(|c| c as f64 / total).collect();
    Ok(OutcomeDistribution { n: s.n, p })
}

fn check_same_n(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<()> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch {
            expected: p.n,
            actual: q.n,
        });
    }
    Ok(())
}

/// Total variation distance `½ Σ |p(x) − q(x)|`.
pub fn tv_distance(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    check_same_n(p, q)?;
    Ok(0.5
        * p.p
            .iter()
            .zip(&q.p)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Euclidean distance between probability vectors.
pub fn l2_distance(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    check_same_n(p, q)?;
    Ok(p.p
        .iter()
        .zip(&q.p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}
