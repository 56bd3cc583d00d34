//! Fourier–Walsh transform of outcome distributions, degree profiles and
//! the low/high degree split.
//!
//! Spectra are taken of the normalized density `q(x) = 2^n p(x)`:
//!
//! ```text
//! coefficient(S) = 2^-n Σ_x q(x) χ_S(x),   χ_S(x) = (-1)^{Σ_{i∈S} x_i}
//! ```
//!
//! so that `coefficient(∅) = 1` for every probability distribution and
//! `coefficient(S) = E_p[χ_S]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::OutcomeDistribution;

/// Below this length the butterfly stays on the calling thread.
const PARALLEL_LEN: usize = 1 << 16;

/// Unnormalized in-place Walsh–Hadamard butterfly: `v ← H v`.
pub fn fwht_in_place(v: &mut [f64]) {
    let len = v.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut half = 1;
    while half < len {
        let block = 2 * half;
        let butterfly = |chunk: &mut [f64]| {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        };
        if len >= PARALLEL_LEN {
            v.par_chunks_mut(block).for_each(butterfly);
        } else {
            v.chunks_mut(block).for_each(butterfly);
        }
        half = block;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    n: usize,
    coefficients: Vec<f64>,
}

impl WalshSpectrum {
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        let len = coefficients.len();
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            coefficients,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients indexed by subset bitmask.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, subset: usize) -> f64 {
        self.coefficients[subset]
    }

    /// `Σ_S coefficient(S)^2`.
    pub fn parseval_mass(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// Spectrum of a density given as `2^n` values.
pub fn fwht(values: &[f64]) -> Result<WalshSpectrum> {
    let len = values.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let mut coefficients = values.to_vec();
    fwht_in_place(&mut coefficients);
    let scale = 1.0 / len as f64;
    coefficients.iter_mut().for_each(|c| *c *= scale);
    WalshSpectrum::from_coefficients(coefficients)
}

/// Density values recovered from a spectrum: `q(x) = Σ_S coefficient(S) χ_S(x)`.
pub fn inverse_fwht(spectrum: &WalshSpectrum) -> Vec<f64> {
    let mut values = spectrum.coefficients.clone();
    fwht_in_place(&mut values);
    values
}

/// Spectrum of a distribution's normalized density.
pub fn spectrum_of(p: &OutcomeDistribution) -> WalshSpectrum {
    // 2^-n H (2^n p) = H p
    let mut coefficients = p.probabilities().to_vec();
    fwht_in_place(&mut coefficients);
    WalshSpectrum {
        n: p.n(),
        coefficients,
    }
}

/// Distribution whose normalized density has the given spectrum.
pub fn distribution_from_spectrum(spectrum: &WalshSpectrum) -> Result<OutcomeDistribution> {
    let scale = 1.0 / spectrum.coefficients.len() as f64;
    let p = inverse_fwht(spectrum)
        .into_iter()
        .map(|q| q * scale)
        .collect();
    OutcomeDistribution::new(spectrum.n, p)
}

/// Per-degree squared spectral mass `W_d = Σ_{|S|=d} coefficient(S)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub n: usize,
    pub weights: Vec<f64>,
}

impl DegreeProfile {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight(&self, degree: usize) -> f64 {
        self.weights[degree]
    }

    /// Profile with `W_d` scaled by `rho^(2d)`.
    pub fn attenuated(&self, rho: f64) -> DegreeProfile {
        DegreeProfile {
            n: self.n,
            weights: self
                .weights
                .iter()
                .enumerate()
                .map(|(d, w)| w * rho.powi(2 * d as i32))
                .collect(),
        }
    }
}

pub fn degree_profile(spectrum: &WalshSpectrum) -> DegreeProfile {
    let mut weights = vec![0.0; spectrum.n + 1];
    for (subset, c) in spectrum.coefficients.iter().enumerate() {
        weights[subset.count_ones() as usize] += c * c;
    }
    DegreeProfile {
        n: spectrum.n,
        weights,
    }
}

/// Splits a spectrum into the part of degree `≤ cutoff` (noise stable) and
/// the remainder (noise sensitive). The two parts sum to the input.
pub fn stable_sensitive_split(
    spectrum: &WalshSpectrum,
    cutoff: usize,
) -> Result<(WalshSpectrum, WalshSpectrum)> {
    if cutoff > spectrum.n {
        return Err(Error::param(
            "cutoff",
            format!("{cutoff} exceeds bit count {}", spectrum.n),
        ));
    }
    let (low, high) = spectrum
        .coefficients
        .iter()
        .enumerate()
        .map(|(subset, &c)| {
            if subset.count_ones() as usize <= cutoff {
                (c, 0.0)
            } else {
                (0.0, c)
            }
        })
        .unzip();
    Ok((
        WalshSpectrum {
            n: spectrum.n,
            coefficients: low,
        },
        WalshSpectrum {
            n: spectrum.n,
            coefficients: high,
        },
    ))
}

/// `Σ_d rho^d W_d`.
pub fn noise_stability(spectrum: &WalshSpectrum, rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param("rho", format!("{rho} outside [0, 1]")));
    }
    Ok(degree_profile(spectrum)
        .weights
        .iter()
        .enumerate()
        .map(|(d, w)| rho.powi(d as i32) * w)
        .sum())
}
