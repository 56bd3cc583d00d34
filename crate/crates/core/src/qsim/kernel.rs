//! In-place amplitude kernels. Qubit `q` is bit `q` of the amplitude index.
//!
//! Every kernel touches each amplitude group exactly once with the same
//! arithmetic, so splitting the work across threads cannot change results.

use num_complex::Complex64;
use rayon::prelude::*;

use super::gates::{Mat2, Mat4};

/// Below this many amplitudes kernels run on the calling thread.
pub(crate) const PARALLEL_LEN: usize = 1 << 16;

#[inline]
fn mix(m: &Mat2, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    (m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b)
}

/// Applies a 2×2 unitary to qubit `q`.
pub(crate) fn apply_1q(state: &mut [Complex64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let block = stride << 1;
    let pair = |(a, b): (&mut Complex64, &mut Complex64)| {
        let (x, y) = mix(m, *a, *b);
        *a = x;
        *b = y;
    };
    if state.len() < PARALLEL_LEN {
        for chunk in state.chunks_mut(block) {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.iter_mut().zip(hi.iter_mut()).for_each(pair);
        }
    } else if state.len() / block >= 64 {
        state.par_chunks_mut(block).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.iter_mut().zip(hi.iter_mut()).for_each(pair);
        });
    } else {
        for chunk in state.chunks_mut(block) {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .with_min_len(4096)
                .for_each(pair);
        }
    }
}

/// Calls `f(base)` for every index whose bits `lo_bit` and `hi_bit` are zero,
/// where `lo_bit < hi_bit`.
#[inline]
fn for_each_base(len: usize, lo_bit: usize, hi_bit: usize, mut f: impl FnMut(usize)) {
    let lo = 1usize << lo_bit;
    let hi = 1usize << hi_bit;
    for outer in (0..len).step_by(hi << 1) {
        for mid in (outer..outer + hi).step_by(lo << 1) {
            for base in mid..mid + lo {
                f(base);
            }
        }
    }
}

/// Applies a 4×4 unitary to the pair `(a, b)`, local index `2·bit_a + bit_b`.
pub(crate) fn apply_2q(state: &mut [Complex64], a: usize, b: usize, m: &Mat4) {
    debug_assert_ne!(a, b);
    let (ma, mb) = (1usize << a, 1usize << b);
    let apply = |chunk: &mut [Complex64], offset_bits: (usize, usize)| {
        for_each_base(chunk.len(), offset_bits.0, offset_bits.1, |base| {
            let idx = [base, base | mb, base | ma, base | ma | mb];
            let v = idx.map(|i| chunk[i]);
            for (row, &i) in idx.iter().enumerate() {
                chunk[i] =
                    m[row][0] * v[0] + m[row][1] * v[1] + m[row][2] * v[2] + m[row][3] * v[3];
            }
        });
    };
    let bits = (a.min(b), a.max(b));
    let block = 2usize << bits.1;
    if state.len() >= PARALLEL_LEN && state.len() / block >= 64 {
        state
            .par_chunks_mut(block)
            .for_each(|chunk| apply(chunk, bits));
    } else {
        apply(state, bits);
    }
}

/// Controlled-Z: negates amplitudes with both bits set.
pub(crate) fn apply_cz(state: &mut [Complex64], a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    let flip = |(i, v): (usize, &mut Complex64)| {
        if i & mask == mask {
            *v = -*v;
        }
    };
    if state.len() >= PARALLEL_LEN {
        state
            .par_iter_mut()
            .enumerate()
            .with_min_len(4096)
            .for_each(flip);
    } else {
        state.iter_mut().enumerate().for_each(flip);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub(crate) fn from_code(code: u32) -> Pauli {
        match code {
            1 => Pauli::X,
            2 => Pauli::Y,
            3 => Pauli::Z,
            _ => unreachable!("pauli code {code}"),
        }
    }
}

/// Sequential Pauli application; used inside trajectories.
pub(crate) fn apply_pauli(state: &mut [Complex64], q: usize, p: Pauli) {
    let stride = 1usize << q;
    let i = Complex64::new(0.0, 1.0);
    for chunk in state.chunks_mut(stride << 1) {
        let (lo, hi) = chunk.split_at_mut(stride);
        match p {
            Pauli::X => lo.swap_with_slice(hi),
            Pauli::Y => {
                // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = -i * y;
                    *b = i * x;
                }
            }
            Pauli::Z => hi.iter_mut().for_each(|b| *b = -*b),
        }
    }
}

pub(crate) fn norm_sqr(state: &[Complex64]) -> f64 {
    state.iter().map(|z| z.norm_sqr()).sum()
}
