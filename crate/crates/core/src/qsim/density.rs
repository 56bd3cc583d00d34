//! Exact noisy evolution of the full density matrix.
//!
//! `ρ` is stored row-major, `ρ[r·2^n + c]`, which makes it a vector over
//! `2n` index bits: row qubit `q` is bit `n + q` and column qubit `q` is bit
//! `q`. Conjugation `U ρ U†` is then `U` on the row bits followed by `conj(U)`
//! on the column bits, reusing the state-vector kernels.

use num_complex::Complex64;

use super::circuit::{Layer, QuantumCircuit};
use super::gates::{Mat2, Mat4, TwoQubitGate};
use super::kernel;
use super::statevector::StateVector;
use crate::error::{Error, Result};
use crate::noise::{apply_bitflip_noise, DistributionNoise, GateNoise};
use crate::outcome::OutcomeDistribution;

pub const MAX_DENSITY_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

fn conj2(m: &Mat2) -> Mat2 {
    m.map(|row| row.map(|z| z.conj()))
}

fn conj4(m: &Mat4) -> Mat4 {
    m.map(|row| row.map(|z| z.conj()))
}

impl DensityMatrix {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DENSITY_QUBITS {
            return Err(Error::TooLarge {
                what: "density-matrix simulation",
                max: MAX_DENSITY_QUBITS,
                actual: n,
                hint: "use the trajectory backend",
            });
        }
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_rc − conj(ρ_cr)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Frobenius distance to the projector `|ψ⟩⟨ψ|`.
    pub fn frobenius_distance_to_pure(&self, psi: &StateVector) -> f64 {
        assert_eq!(psi.n(), self.n);
        let a = psi.amplitudes();
        let dim = self.dim();
        let mut acc = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                acc += (self.get(r, c) - a[r] * a[c].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Computational-basis diagonal.
    pub fn diagonal(&self) -> OutcomeDistribution {
        let p = (0..self.dim()).map(|i| self.get(i, i).re).collect();
        OutcomeDistribution::from_computed(self.n, p)
    }

    fn apply_1q(&mut self, q: usize, m: &Mat2) {
        kernel::apply_1q(&mut self.data, self.n + q, m);
        kernel::apply_1q(&mut self.data, q, &conj2(m));
    }

    fn apply_2q(&mut self, a: usize, b: usize, m: &Mat4) {
        kernel::apply_2q(&mut self.data, self.n + a, self.n + b, m);
        kernel::apply_2q(&mut self.data, a, b, &conj4(m));
    }

    /// `ρ → (1 − r) ρ + r · (I/2 ⊗ Tr_q ρ)` on qubit `q`.
    fn depolarize(&mut self, q: usize, rate: f64) {
        if rate == 0.0 {
            return;
        }
        let row_bit = 1usize << (self.n + q);
        let col_bit = 1usize << q;
        let keep = 1.0 - rate / 2.0;
        let swap = rate / 2.0;
        let damp = 1.0 - rate;
        for i in 0..self.data.len() {
            if i & (row_bit | col_bit) != 0 {
                continue;
            }
            let (a, d) = (self.data[i], self.data[i | row_bit | col_bit]);
            self.data[i] = a * keep + d * swap;
            self.data[i | row_bit | col_bit] = d * keep + a * swap;
            self.data[i | col_bit] *= damp;
            self.data[i | row_bit] *= damp;
        }
    }

    fn apply_layer(&mut self, layer: &Layer, noise: &GateNoise) {
        match layer {
            Layer::Single(ops) => {
                for op in ops {
                    self.apply_1q(op.qubit, &op.gate.matrix());
                }
                for op in ops {
                    self.depolarize(op.qubit, noise.r1);
                }
            }
            Layer::Two(ops) => {
                for op in ops {
                    let [a, b] = op.qubits;
                    match op.gate {
                        TwoQubitGate::Cz => {
                            kernel::apply_cz(&mut self.data, self.n + a, self.n + b);
                            kernel::apply_cz(&mut self.data, a, b);
                        }
                        g => self.apply_2q(a, b, &g.matrix()),
                    }
                }
                for op in ops {
                    for q in op.qubits {
                        self.depolarize(q, noise.r2);
                    }
                }
            }
        }
    }

    fn check_trace(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("density trace {tr}")));
        }
        Ok(())
    }
}

/// Evolves `|0…0⟩⟨0…0|`, applying depolarizing channels to every qubit a
/// layer touched (rate `r1` after single-qubit gates, `r2` per qubit after
/// two-qubit gates).
pub fn evolve_density_matrix(c: &QuantumCircuit, noise: &GateNoise) -> Result<DensityMatrix> {
    c.validate()?;
    noise.validate()?;
    let mut rho = DensityMatrix::zero(c.n())?;
    for layer in c.layers() {
        rho.apply_layer(layer, noise);
        rho.check_trace()?;
    }
    Ok(rho)
}

/// Outcome distribution of the noisy circuit, including readout flips.
pub fn run_density_matrix(c: &QuantumCircuit, noise: &GateNoise) -> Result<OutcomeDistribution> {
    let diagonal = evolve_density_matrix(c, noise)?.diagonal();
    if noise.eps_readout > 0.0 {
        Ok(apply_bitflip_noise(
            &diagonal,
            DistributionNoise::new(noise.eps_readout)?,
        ))
    } else {
        Ok(diagonal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::circuit::{generate_random_circuit, GatesetConfig, SingleQubitOp};
    use crate::qsim::gates::SingleQubitGate;
    use crate::qsim::statevector::{ideal_distribution, run_statevector};

    #[test]
    fn noiseless_matches_pure_state() {
        for (rows, cols) in [(1, 3), (2, 2), (2, 3)] {
            let c = generate_random_circuit(rows, cols, 10, &GatesetConfig::default(), 17).unwrap();
            let rho = evolve_density_matrix(&c, &GateNoise::noiseless()).unwrap();
            let psi = run_statevector(&c).unwrap();
            assert!(rho.frobenius_distance_to_pure(&psi) < 1e-9);
            let ideal = ideal_distribution(&c).unwrap();
            let dm = run_density_matrix(&c, &GateNoise::noiseless()).unwrap();
            for (a, b) in ideal.probabilities().iter().zip(dm.probabilities()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn full_depolarization_is_maximally_mixed() {
        let layer = Layer::Single(vec![SingleQubitOp {
            qubit: 0,
            gate: SingleQubitGate::SqrtX,
        }]);
        let c = QuantumCircuit::new(1, 1, vec![layer]).unwrap();
        let p = run_density_matrix(&c, &GateNoise::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!((p.probabilities()[0] - 0.5).abs() < 1e-15);
        let rho = evolve_density_matrix(&c, &GateNoise::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(rho.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn noisy_state_stays_physical() {
        let c = generate_random_circuit(2, 3, 8, &GatesetConfig::default(), 2).unwrap();
        let rho = evolve_density_matrix(&c, &GateNoise::new(0.05, 0.1, 0.0).unwrap()).unwrap();
        assert!(rho.hermiticity_error() < 1e-10);
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn readout_flip_is_applied_to_the_diagonal() {
        let c = QuantumCircuit::new(1, 2, vec![]).unwrap();
        let p = run_density_matrix(&c, &GateNoise::new(0.0, 0.0, 0.1).unwrap()).unwrap();
        let expect = [0.81, 0.09, 0.09, 0.01];
        for (a, b) in p.probabilities().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn too_many_qubits() {
        let c = generate_random_circuit(3, 4, 2, &GatesetConfig::default(), 2).unwrap();
        assert!(matches!(
            run_density_matrix(&c, &GateNoise::noiseless()),
            Err(Error::TooLarge { .. })
        ));
    }
}
