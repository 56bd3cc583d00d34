//! Quantum circuits on a qubit grid and three simulation backends: ideal
//! state vector, exact noisy density matrix (up to 10 qubits) and noisy
//! Monte Carlo trajectories (up to 20 qubits).

mod circuit;
mod density;
mod gates;
mod kernel;
mod statevector;
mod trajectory;

pub use circuit::{
    generate_random_circuit, Coupling, GatesetConfig, GeneratorInfo, Layer, QuantumCircuit,
    SingleQubitOp, TwoQubitOp,
};
pub use density::{evolve_density_matrix, run_density_matrix, DensityMatrix, MAX_DENSITY_QUBITS};
pub use gates::{Mat2, Mat4, SingleQubitGate, TwoQubitGate, UNITARITY_TOLERANCE};
pub use statevector::{
    ideal_distribution, run_statevector, sample_ideal, StateVector, NORM_TOLERANCE,
};
pub use trajectory::{sample_trajectories, MAX_TRAJECTORY_QUBITS};
