//! Monte Carlo trajectories of Pauli-twirled depolarizing noise.
//!
//! After every gate each participating qubit suffers X, Y or Z with
//! probability `rate/4` each, which reproduces the depolarizing channel
//! exactly in distribution. Shot `i` draws its error pattern from the stream
//! `(seed, i)` and its measurement from an independent stream, so the output
//! is a fixed function of `(circuit, noise, schedule, count, seed)`.
//!
//! Shots sharing an error pattern share a final state. Patterns are grouped
//! and each distinct one is simulated once, resuming from the cached ideal
//! state just before its first error.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::circuit::{Layer, QuantumCircuit};
use super::kernel::{self, Pauli};
use super::statevector::{apply_layer, StateVector};
use crate::error::{Error, Result};
use crate::noise::{stream_position, GateNoise, NoiseSchedule};
use crate::outcome::{CdfSampler, SampleMeta, SampleSet};
use crate::rng::{self, domain};

pub const MAX_TRAJECTORY_QUBITS: usize = 20;

/// Memory allowed for cached ideal prefix states.
const PREFIX_CACHE_BYTES: usize = 256 << 20;

/// A qubit that may suffer an error after a given layer.
#[derive(Debug, Clone, Copy)]
struct Slot {
    layer: usize,
    qubit: usize,
    two_qubit: bool,
}

fn error_slots(c: &QuantumCircuit) -> Vec<Slot> {
    let mut slots = Vec::new();
    for (layer, l) in c.layers().iter().enumerate() {
        match l {
            Layer::Single(ops) => slots.extend(ops.iter().map(|op| Slot {
                layer,
                qubit: op.qubit,
                two_qubit: false,
            })),
            Layer::Two(ops) => slots.extend(ops.iter().flat_map(|op| {
                op.qubits.map(|qubit| Slot {
                    layer,
                    qubit,
                    two_qubit: true,
                })
            })),
        }
    }
    slots
}

/// Error pattern encoded as `slot·4 + pauli_code`, ascending.
type Pattern = Vec<u32>;

fn draw_pattern(slots: &[Slot], noise: &GateNoise, rng: &mut impl Rng) -> Pattern {
    let mut pattern = Vec::new();
    let (p1, p2) = (0.75 * noise.r1, 0.75 * noise.r2);
    for (k, slot) in slots.iter().enumerate() {
        let p = if slot.two_qubit { p2 } else { p1 };
        if p == 0.0 {
            continue;
        }
        let u: f64 = rng.gen();
        if u < p {
            let code = 1 + ((3.0 * u / p) as u32).min(2);
            pattern.push(k as u32 * 4 + code);
        }
    }
    pattern
}

struct Prefixes {
    /// `states[k]` is the ideal state after layers `0..k`.
    states: Vec<Vec<Complex64>>,
}

impl Prefixes {
    fn build(c: &QuantumCircuit) -> Result<Self> {
        let dim = 1usize << c.n();
        let per_state = dim * std::mem::size_of::<Complex64>();
        let mut state = StateVector::zero(c.n())?.amplitudes().to_vec();
        let mut states = vec![state.clone()];
        if per_state * (c.layers().len() + 1) <= PREFIX_CACHE_BYTES {
            for layer in c.layers() {
                apply_layer(&mut state, layer);
                states.push(state.clone());
            }
        }
        Ok(Self { states })
    }

    /// Latest cached state at or before layer boundary `k`.
    fn resume_from(&self, k: usize) -> (usize, Vec<Complex64>) {
        let k = k.min(self.states.len() - 1);
        (k, self.states[k].clone())
    }
}

fn final_state(
    c: &QuantumCircuit,
    slots: &[Slot],
    pattern: &Pattern,
    prefixes: &Prefixes,
) -> Vec<Complex64> {
    let first_layer = slots[(pattern[0] / 4) as usize].layer;
    // Errors sit after their layer's gates, so resume after layer `first_layer`.
    let (start, mut state) = prefixes.resume_from(first_layer + 1);
    let mut errors = pattern.iter().copied().peekable();
    let mut apply_errors = |state: &mut [Complex64], layer: usize| {
        while let Some(code) = errors.next_if(|&code| slots[(code / 4) as usize].layer == layer) {
            let slot = slots[(code / 4) as usize];
            kernel::apply_pauli(state, slot.qubit, Pauli::from_code(code % 4));
        }
    };
    if start > 0 {
        apply_errors(&mut state, start - 1);
    }
    for (k, layer) in c.layers().iter().enumerate().skip(start) {
        apply_layer(&mut state, layer);
        apply_errors(&mut state, k);
    }
    debug_assert!((kernel::norm_sqr(&state) - 1.0).abs() < 1e-9);
    state
}

/// Noisy shots in stream order. With a schedule, shot `i` uses the rates
/// the schedule emits at position `i / (count − 1)`.
pub fn sample_trajectories(
    c: &QuantumCircuit,
    noise: &GateNoise,
    schedule: Option<&NoiseSchedule>,
    count: usize,
    seed: u64,
) -> Result<SampleSet> {
    c.validate()?;
    noise.validate()?;
    let n = c.n();
    if n > MAX_TRAJECTORY_QUBITS {
        return Err(Error::TooLarge {
            what: "trajectory simulation",
            max: MAX_TRAJECTORY_QUBITS,
            actual: n,
            hint: "reduce the grid",
        });
    }
    if count == 0 {
        return Err(Error::param("count", "must be at least 1"));
    }
    let noise_at = |i: usize| -> Result<GateNoise> {
        match schedule {
            Some(s) => noise.at(s, stream_position(i, count)),
            None => Ok(*noise),
        }
    };
    let slots = error_slots(c);

    let patterns: Vec<Pattern> = (0..count)
        .into_par_iter()
        .map(|i| {
            let local = noise_at(i)?;
            let mut rng = rng::stream(seed, domain::TRAJECTORY_ERRORS, i as u64);
            Ok(draw_pattern(&slots, &local, &mut rng))
        })
        .collect::<Result<_>>()?;

    let mut groups: HashMap<Pattern, Vec<u32>> = HashMap::new();
    for (i, pattern) in patterns.into_iter().enumerate() {
        groups.entry(pattern).or_default().push(i as u32);
    }
    let mut groups: Vec<(Pattern, Vec<u32>)> = groups.into_iter().collect();
    // Fixed work order; each shot's outcome depends only on its own streams.
    groups.sort_unstable_by(|a, b| a.0.cmp(&b.0));

    let prefixes = Prefixes::build(c)?;
    let ideal_sampler = {
        let last = if prefixes.states.len() == c.layers().len() + 1 {
            prefixes.states.last().cloned().unwrap()
        } else {
            let mut s = prefixes.states[0].clone();
            c.layers().iter().for_each(|l| apply_layer(&mut s, l));
            s
        };
        CdfSampler::new(&last.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>())
    };

    let shots: Vec<Vec<(u32, u32)>> = groups
        .par_iter()
        .map(|(pattern, members)| {
            let owned;
            let sampler = if pattern.is_empty() {
                &ideal_sampler
            } else {
                let state = final_state(c, &slots, pattern, &prefixes);
                owned = CdfSampler::new(&state.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
                &owned
            };
            members
                .iter()
                .map(|&i| {
                    let eps = noise_at(i as usize)?.eps_readout;
                    let mut rng = rng::stream(seed, domain::TRAJECTORY_SHOTS, i as u64);
                    let mut x = sampler.draw(rng.gen::<f64>());
                    if eps > 0.0 {
                        for bit in 0..n {
                            if rng.gen::<f64>() < eps {
                                x ^= 1 << bit;
                            }
                        }
                    }
                    Ok((i, x))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut outcomes = vec![0u32; count];
    for (i, x) in shots.into_iter().flatten() {
        outcomes[i as usize] = x;
    }
    Ok(SampleSet::new(n, outcomes)?.with_meta(SampleMeta {
        source: Some("trajectories".into()),
        seed: Some(seed),
        ..SampleMeta::default()
    }))
}
