use num_complex::Complex64;

use super::circuit::{Layer, QuantumCircuit};
use super::gates::TwoQubitGate;
use super::kernel;
use crate::error::{Error, Result};
use crate::outcome::{OutcomeDistribution, SampleMeta, SampleSet};
use crate::MAX_BITS;

/// Accepted drift of `Σ|amp|²` away from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::BitCount(n));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::BitCount(n));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: amplitudes.len(),
            });
        }
        let state = Self { n, amplitudes };
        state.check_norm()?;
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        kernel::norm_sqr(&self.amplitudes)
    }

    fn check_norm(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("state norm² {norm}")));
        }
        Ok(())
    }

    /// Born rule: outcome `x` has probability `|amplitude_x|²`.
    pub fn measurement_distribution(&self) -> OutcomeDistribution {
        let p = self.amplitudes.iter().map(|z| z.norm_sqr()).collect();
        OutcomeDistribution::from_computed(self.n, p)
    }

    pub(crate) fn apply_layer(&mut self, layer: &Layer) {
        apply_layer(&mut self.amplitudes, layer);
    }
}

pub(crate) fn apply_layer(amplitudes: &mut [Complex64], layer: &Layer) {
    match layer {
        Layer::Single(ops) => {
            for op in ops {
                kernel::apply_1q(amplitudes, op.qubit, &op.gate.matrix());
            }
        }
        Layer::Two(ops) => {
            for op in ops {
                let [a, b] = op.qubits;
                match op.gate {
                    TwoQubitGate::Cz => kernel::apply_cz(amplitudes, a, b),
                    g => kernel::apply_2q(amplitudes, a, b, &g.matrix()),
                }
            }
        }
    }
}

/// Evolves `|0…0⟩` through every layer, checking the norm after each one.
pub fn run_statevector(c: &QuantumCircuit) -> Result<StateVector> {
    c.validate()?;
    let mut state = StateVector::zero(c.n())?;
    for layer in c.layers() {
        state.apply_layer(layer);
        state.check_norm()?;
    }
    Ok(state)
}

pub fn ideal_distribution(c: &QuantumCircuit) -> Result<OutcomeDistribution> {
    Ok(run_statevector(c)?.measurement_distribution())
}

/// `count` i.i.d. measurements of the ideal output state.
pub fn sample_ideal(c: &QuantumCircuit, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::param("count", "must be at least 1"));
    }
    let mut s = ideal_distribution(c)?.sample(count, seed);
    s.meta = SampleMeta {
        source: Some("ideal".into()),
        seed: Some(seed),
        ..SampleMeta::default()
    };
    Ok(s)
}
