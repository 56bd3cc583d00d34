//! Classical Boolean circuits over NOT and AND gates, fed by deterministic
//! or independent probabilistic input bits.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{BitString, OutcomeDistribution, SampleMeta, SampleSet};
use crate::rng::{self, domain};
use crate::MAX_BITS;

/// Largest input count handled by exhaustive enumeration.
pub const MAX_EXACT_INPUTS: usize = 20;

/// A gate writes a fresh wire. Wires `0..input_count` are the inputs and gate
/// `k` writes wire `input_count + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Not(usize),
    And(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanCircuit {
    input_count: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl BooleanCircuit {
    pub fn new(input_count: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        if input_count == 0 || input_count > MAX_BITS {
            return Err(Error::InvalidCircuit(format!(
                "input count {input_count} outside 1..={MAX_BITS}"
            )));
        }
        for (k, gate) in gates.iter().enumerate() {
            let defined = input_count + k;
            let refs: &[usize] = match gate {
                Gate::Not(a) => std::slice::from_ref(a),
                Gate::And(a, b) => &[*a, *b],
            };
            if let Some(bad) = refs.iter().find(|&&w| w >= defined) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {k} reads wire {bad} before it is defined"
                )));
            }
        }
        let wires = input_count + gates.len();
        if outputs.is_empty() || outputs.len() > MAX_BITS {
            return Err(Error::InvalidCircuit(format!(
                "output count {} outside 1..={MAX_BITS}",
                outputs.len()
            )));
        }
        if let Some(bad) = outputs.iter().find(|&&w| w >= wires) {
            return Err(Error::InvalidCircuit(format!(
                "output wire {bad} is undefined"
            )));
        }
        Ok(Self {
            input_count,
            gates,
            outputs,
        })
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Evaluates on packed inputs, returning packed outputs.
    fn eval_packed(&self, input: u32, wires: &mut Vec<bool>) -> u32 {
        wires.clear();
        wires.extend((0..self.input_count).map(|i| (input >> i) & 1 == 1));
        for gate in &self.gates {
            let v = match *gate {
                Gate::Not(a) => !wires[a],
                Gate::And(a, b) => wires[a] && wires[b],
            };
            wires.push(v);
        }
        self.outputs
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &w)| acc | ((wires[w] as u32) << i))
    }
}

/// Gate-by-gate evaluation.
pub fn evaluate(c: &BooleanCircuit, input: BitString) -> Result<BitString> {
    if input.len() != c.input_count {
        return Err(Error::DimensionMismatch {
            expected: c.input_count,
            actual: input.len(),
        });
    }
    let mut wires = Vec::with_capacity(c.input_count + c.gates.len());
    BitString::new(c.output_count(), c.eval_packed(input.index(), &mut wires))
}

/// State of one input wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputBit {
    Fixed(bool),
    /// One with probability `p_one`, zero otherwise.
    Bernoulli {
        p_one: f64,
    },
}

impl InputBit {
    pub fn bernoulli(p_one: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_one) {
            return Err(Error::param("p_one", format!("{p_one} outside [0, 1]")));
        }
        Ok(InputBit::Bernoulli { p_one })
    }

    /// A bit that reads zero with probability `p`.
    pub fn zero_with_probability(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", format!("{p} outside [0, 1]")));
        }
        Ok(InputBit::Bernoulli { p_one: 1.0 - p })
    }

    fn p_one(&self) -> f64 {
        match *self {
            InputBit::Fixed(b) => b as u8 as f64,
            InputBit::Bernoulli { p_one } => p_one,
        }
    }
}

/// Mutually independent input bits, one per circuit input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitSource {
    bits: Vec<InputBit>,
}

impl BitSource {
    pub fn new(bits: Vec<InputBit>) -> Result<Self> {
        for bit in &bits {
            if let InputBit::Bernoulli { p_one } = bit {
                InputBit::bernoulli(*p_one)?;
            }
        }
        Ok(Self { bits })
    }

    pub fn fixed(input: BitString) -> Self {
        Self {
            bits: input.to_bits().into_iter().map(InputBit::Fixed).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    fn draw(&self, rng: &mut impl Rng) -> u32 {
        self.bits.iter().enumerate().fold(0u32, |acc, (i, bit)| {
            let one = match *bit {
                InputBit::Fixed(b) => b,
                InputBit::Bernoulli { p_one } => rng.gen::<f64>() < p_one,
            };
            acc | ((one as u32) << i)
        })
    }
}

fn check_source(c: &BooleanCircuit, src: &BitSource) -> Result<()> {
    if src.len() != c.input_count {
        return Err(Error::DimensionMismatch {
            expected: c.input_count,
            actual: src.len(),
        });
    }
    Ok(())
}

/// Exact output distribution by enumerating every input assignment.
pub fn output_distribution(c: &BooleanCircuit, src: &BitSource) -> Result<OutcomeDistribution> {
    check_source(c, src)?;
    if c.input_count > MAX_EXACT_INPUTS {
        return Err(Error::TooLarge {
            what: "exact output distribution",
            max: MAX_EXACT_INPUTS,
            actual: c.input_count,
            hint: "use sample_outputs instead",
        });
    }
    let p_one: Vec<f64> = src.bits.iter().map(InputBit::p_one).collect();
    let mut p = vec![0.0; 1 << c.output_count()];
    let mut wires = Vec::new();
    for input in 0..(1u32 << c.input_count) {
        let weight = p_one.iter().enumerate().fold(1.0, |w, (i, &q)| {
            w * if (input >> i) & 1 == 1 { q } else { 1.0 - q }
        });
        if weight > 0.0 {
            p[c.eval_packed(input, &mut wires) as usize] += weight;
        }
    }
    Ok(OutcomeDistribution::from_computed(c.output_count(), p))
}

/// `count` i.i.d. output samples; sample `i` draws its inputs from the
/// stream keyed by `(seed, i)`.
pub fn sample_outputs(
    c: &BooleanCircuit,
    src: &BitSource,
    count: usize,
    seed: u64,
) -> Result<SampleSet> {
    check_source(c, src)?;
    if count == 0 {
        return Err(Error::param("count", "must be at least 1"));
    }
    let outcomes = (0..count)
        .into_par_iter()
        .map_init(Vec::new, |wires, i| {
            let mut rng = rng::stream(seed, domain::BOOL_INPUTS, i as u64);
            c.eval_packed(src.draw(&mut rng), wires)
        })
        .collect();
    Ok(
        SampleSet::new(c.output_count(), outcomes)?.with_meta(SampleMeta {
            source: Some("boolean-circuit".into()),
            seed: Some(seed),
            ..SampleMeta::default()
        }),
    )
}
