use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates::{SingleQubitGate, TwoQubitGate};
use crate::error::{Error, Result};
use crate::rng::{self, domain};
use crate::MAX_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitOp {
    pub qubit: usize,
    pub gate: SingleQubitGate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitOp {
    pub qubits: [usize; 2],
    pub gate: TwoQubitGate,
}

/// One round of gates applied in parallel to disjoint qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "gates", rename_all = "snake_case")]
pub enum Layer {
    Single(Vec<SingleQubitOp>),
    Two(Vec<TwoQubitOp>),
}

impl Layer {
    pub fn gate_count(&self) -> usize {
        match self {
            Layer::Single(ops) => ops.len(),
            Layer::Two(ops) => ops.len(),
        }
    }
}

/// Grid couplings used by successive two-qubit layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `(r, c)–(r, c+1)` for even `c`.
    HorizontalEven,
    HorizontalOdd,
    /// `(r, c)–(r+1, c)` for even `r`.
    VerticalEven,
    VerticalOdd,
}

impl Coupling {
    pub const CYCLE: [Coupling; 4] = [
        Coupling::HorizontalEven,
        Coupling::HorizontalOdd,
        Coupling::VerticalEven,
        Coupling::VerticalOdd,
    ];

    pub fn pairs(self, rows: usize, cols: usize) -> Vec<[usize; 2]> {
        let q = |r: usize, c: usize| r * cols + c;
        let mut pairs = Vec::new();
        match self {
            Coupling::HorizontalEven | Coupling::HorizontalOdd => {
                let start = (self == Coupling::HorizontalOdd) as usize;
                for r in 0..rows {
                    for c in (start..cols.saturating_sub(1)).step_by(2) {
                        pairs.push([q(r, c), q(r, c + 1)]);
                    }
                }
            }
            Coupling::VerticalEven | Coupling::VerticalOdd => {
                let start = (self == Coupling::VerticalOdd) as usize;
                for r in (start..rows.saturating_sub(1)).step_by(2) {
                    for c in 0..cols {
                        pairs.push([q(r, c), q(r + 1, c)]);
                    }
                }
            }
        }
        pairs
    }
}

/// Gate choices for random circuit generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatesetConfig {
    /// Candidates drawn uniformly for each qubit in a single-qubit layer.
    pub single: Vec<SingleQubitGate>,
    pub two: TwoQubitGate,
    /// Never draw the gate a qubit received in its previous single-qubit layer.
    pub avoid_repeats: bool,
}

impl Default for GatesetConfig {
    fn default() -> Self {
        Self {
            single: vec![
                SingleQubitGate::SqrtX,
                SingleQubitGate::SqrtY,
                SingleQubitGate::SqrtW,
            ],
            two: TwoQubitGate::Cz,
            avoid_repeats: true,
        }
    }
}

/// How a generated circuit was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub gateset: GatesetConfig,
    pub depth: usize,
    pub seed: u64,
}

/// A layered gate program on a `rows × cols` qubit grid; qubit `r·cols + c`
/// sits at row `r`, column `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    rows: usize,
    cols: usize,
    layers: Vec<Layer>,
    generator: Option<GeneratorInfo>,
}

impl QuantumCircuit {
    pub fn new(rows: usize, cols: usize, layers: Vec<Layer>) -> Result<Self> {
        let c = Self {
            rows,
            cols,
            layers,
            generator: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_generator(mut self, info: GeneratorInfo) -> Self {
        self.generator = Some(info);
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.rows * self.cols
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn generator(&self) -> Option<&GeneratorInfo> {
        self.generator.as_ref()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Layer::gate_count).sum()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        let (ra, ca) = (a / self.cols, a % self.cols);
        let (rb, cb) = (b / self.cols, b % self.cols);
        ra.abs_diff(rb) + ca.abs_diff(cb) == 1
    }

    /// Checks grid bounds, disjointness, adjacency and unitarity.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || n > MAX_BITS {
            return Err(Error::TooLarge {
                what: "quantum circuit",
                max: MAX_BITS,
                actual: n,
                hint: "grid must hold between 1 and 24 qubits",
            });
        }
        for (k, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; n];
            let mut claim = |q: usize| -> Result<()> {
                if q >= n {
                    return Err(Error::InvalidCircuit(format!(
                        "layer {k}: qubit {q} outside grid"
                    )));
                }
                if std::mem::replace(&mut used[q], true) {
                    return Err(Error::InvalidCircuit(format!(
                        "layer {k}: qubit {q} used twice"
                    )));
                }
                Ok(())
            };
            match layer {
                Layer::Single(ops) => {
                    for op in ops {
                        claim(op.qubit)?;
                        op.gate.validate()?;
                    }
                }
                Layer::Two(ops) => {
                    for op in ops {
                        let [a, b] = op.qubits;
                        claim(a)?;
                        claim(b)?;
                        if !self.adjacent(a, b) {
                            return Err(Error::InvalidCircuit(format!(
                                "layer {k}: qubits {a} and {b} are not grid neighbours"
                            )));
                        }
                        op.gate.validate()?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Alternating single-qubit and two-qubit layers, `depth` layers in all,
/// starting with a single-qubit layer. Two-qubit layers cycle through
/// [`Coupling::CYCLE`].
pub fn generate_random_circuit(
    rows: usize,
    cols: usize,
    depth: usize,
    gateset: &GatesetConfig,
    seed: u64,
) -> Result<QuantumCircuit> {
    let n = rows * cols;
    if n == 0 || n > MAX_BITS {
        return Err(Error::TooLarge {
            what: "random circuit grid",
            max: MAX_BITS,
            actual: n,
            hint: "choose rows·cols between 1 and 24",
        });
    }
    if gateset.single.is_empty() {
        return Err(Error::param("gateset.single", "needs at least one gate"));
    }
    let mut rng = rng::stream(seed, domain::CIRCUIT, 0);
    let mut previous: Vec<Option<usize>> = vec![None; n];
    let mut layers = Vec::with_capacity(depth);
    for k in 0..depth {
        if k % 2 == 0 {
            let ops = (0..n)
                .map(|qubit| {
                    let choices = gateset.single.len();
                    let pick = match previous[qubit] {
                        Some(prev) if gateset.avoid_repeats && choices > 1 => {
                            let j = rng.gen_range(0..choices - 1);
                            if j >= prev {
                                j + 1
                            } else {
                                j
                            }
                        }
                        _ => rng.gen_range(0..choices),
                    };
                    previous[qubit] = Some(pick);
                    SingleQubitOp {
                        qubit,
                        gate: gateset.single[pick],
                    }
                })
                .collect();
            layers.push(Layer::Single(ops));
        } else {
            let coupling = Coupling::CYCLE[(k / 2) % 4];
            let ops = coupling
                .pairs(rows, cols)
                .into_iter()
                .map(|qubits| TwoQubitOp {
                    qubits,
                    gate: gateset.two,
                })
                .collect();
            layers.push(Layer::Two(ops));
        }
    }
    Ok(
        QuantumCircuit::new(rows, cols, layers)?.with_generator(GeneratorInfo {
            gateset: gateset.clone(),
            depth,
            seed,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sycamore_twelve() {
        let c = generate_random_circuit(3, 4, 8, &GatesetConfig::default(), 1).unwrap();
        assert_eq!(c.n(), 12);
        assert_eq!(c.layers().len(), 8);
        for (k, layer) in c.layers().iter().enumerate() {
            match layer {
                Layer::Single(ops) => assert!(k % 2 == 0 && ops.len() == 12),
                Layer::Two(_) => assert!(k % 2 == 1),
            }
        }
    }

    #[test]
    fn couplings_cover_grid_edges() {
        let mut edges: Vec<[usize; 2]> =
            Coupling::CYCLE.iter().flat_map(|c| c.pairs(3, 4)).collect();
        edges.sort();
        // 3 rows × 3 horizontal + 2 × 4 vertical
        assert_eq!(edges.len(), 17);
        edges.dedup();
        assert_eq!(edges.len(), 17);
    }

    #[test]
    fn zero_depth_is_empty() {
        let c = generate_random_circuit(2, 2, 0, &GatesetConfig::default(), 3).unwrap();
        assert_eq!(c.gate_count(), 0);
    }

    #[test]
    fn generation_is_seeded() {
        let g = GatesetConfig::default();
        let a = generate_random_circuit(3, 3, 10, &g, 5).unwrap();
        assert_eq!(a, generate_random_circuit(3, 3, 10, &g, 5).unwrap());
        assert_ne!(a, generate_random_circuit(3, 3, 10, &g, 6).unwrap());
    }

    #[test]
    fn no_immediate_repeats() {
        let c = generate_random_circuit(2, 3, 40, &GatesetConfig::default(), 9).unwrap();
        let singles: Vec<&Vec<SingleQubitOp>> = c
            .layers()
            .iter()
            .filter_map(|l| match l {
                Layer::Single(ops) => Some(ops),
                _ => None,
            })
            .collect();
        for pair in singles.windows(2) {
            for q in 0..6 {
                assert_ne!(pair[0][q].gate, pair[1][q].gate);
            }
        }
    }

    #[test]
    fn oversize_grid_rejected() {
        assert!(generate_random_circuit(5, 5, 2, &GatesetConfig::default(), 0).is_err());
    }

    #[test]
    fn validation_rejects_bad_layers() {
        let cz = TwoQubitGate::Cz;
        let far = Layer::Two(vec![TwoQubitOp {
            qubits: [0, 3],
            gate: cz,
        }]);
        assert!(QuantumCircuit::new(2, 2, vec![far]).is_err());
        let overlap = Layer::Two(vec![
            TwoQubitOp {
                qubits: [0, 1],
                gate: cz,
            },
            TwoQubitOp {
                qubits: [1, 3],
                gate: cz,
            },
        ]);
        assert!(QuantumCircuit::new(2, 2, vec![overlap]).is_err());
        let outside = Layer::Single(vec![SingleQubitOp {
            qubit: 4,
            gate: SingleQubitGate::H,
        }]);
        assert!(QuantumCircuit::new(2, 2, vec![outside]).is_err());
    }
}
