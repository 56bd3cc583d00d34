//! Gate matrices.
//!
//! Two-qubit matrices act on the pair `(a, b)` in the local basis
//! `|bit_a bit_b⟩`, so local index `2·bit_a + bit_b`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

/// Maximum entrywise deviation of `U·U†` from the identity accepted for a gate.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64 { re, im }
}

fn unitarity_deviation<const D: usize>(m: &[[Complex64; D]; D]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..D {
        for j in 0..D {
            let acc: Complex64 = m[i].iter().zip(&m[j]).map(|(a, b)| a * b.conj()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

fn check_unitary<const D: usize>(m: &[[Complex64; D]; D]) -> Result<()> {
    if m.iter()
        .flatten()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonUnitary {
            deviation: f64::INFINITY,
        });
    }
    let deviation = unitarity_deviation(m);
    if deviation > UNITARITY_TOLERANCE {
        Err(Error::NonUnitary { deviation })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleQubitGate {
    SqrtX,
    SqrtY,
    SqrtW,
    H,
    X,
    Y,
    Z,
    S,
    T,
    Custom(Mat2),
}

impl SingleQubitGate {
    pub const NAMED: [SingleQubitGate; 9] = [
        Self::SqrtX,
        Self::SqrtY,
        Self::SqrtW,
        Self::H,
        Self::X,
        Self::Y,
        Self::Z,
        Self::S,
        Self::T,
    ];

    pub fn custom(matrix: Mat2) -> Result<Self> {
        check_unitary(&matrix)?;
        Ok(Self::Custom(matrix))
    }

    pub fn name(&self) -> Option<&'static str> {
        Some(match self {
            Self::SqrtX => "sqrt_x",
            Self::SqrtY => "sqrt_y",
            Self::SqrtW => "sqrt_w",
            Self::H => "h",
            Self::X => "x",
            Self::Y => "y",
            Self::Z => "z",
            Self::S => "s",
            Self::T => "t",
            Self::Custom(_) => return None,
        })
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::NAMED
            .into_iter()
            .find(|g| g.name() == Some(name))
            .ok_or_else(|| Error::Unknown {
                kind: "single-qubit gate",
                name: name.to_string(),
            })
    }

    pub fn matrix(&self) -> Mat2 {
        let h = FRAC_1_SQRT_2;
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        match *self {
            // Sycamore's π/2 rotations about X, Y and W = (X + Y)/√2.
            Self::SqrtX => [[c(h, 0.0), c(0.0, -h)], [c(0.0, -h), c(h, 0.0)]],
            Self::SqrtY => [[c(h, 0.0), c(-h, 0.0)], [c(h, 0.0), c(h, 0.0)]],
            Self::SqrtW => {
                // (1/√2)·[[1, −√i], [√(−i), 1]], √i = e^{iπ/4}
                let e = h * h;
                [[c(h, 0.0), c(-e, -e)], [c(e, -e), c(h, 0.0)]]
            }
            Self::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            Self::X => [[zero, one], [one, zero]],
            Self::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
            Self::Z => [[one, zero], [zero, c(-1.0, 0.0)]],
            Self::S => [[one, zero], [zero, c(0.0, 1.0)]],
            Self::T => [[one, zero], [zero, c(h, h)]],
            Self::Custom(m) => m,
        }
    }
}

impl fmt::Display for SingleQubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name().unwrap_or("custom"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum TwoQubitGate {
    Cz,
    /// Control on the first qubit of the pair.
    Cnot,
    Swap,
    ISwap,
    Custom(Mat4),
}

impl TwoQubitGate {
    pub const NAMED: [TwoQubitGate; 4] = [Self::Cz, Self::Cnot, Self::Swap, Self::ISwap];

    pub fn custom(matrix: Mat4) -> Result<Self> {
        check_unitary(&matrix)?;
        Ok(Self::Custom(matrix))
    }

    pub fn name(&self) -> Option<&'static str> {
        Some(match self {
            Self::Cz => "cz",
            Self::Cnot => "cnot",
            Self::Swap => "swap",
            Self::ISwap => "iswap",
            Self::Custom(_) => return None,
        })
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::NAMED
            .into_iter()
            .find(|g| g.name() == Some(name))
            .ok_or_else(|| Error::Unknown {
                kind: "two-qubit gate",
                name: name.to_string(),
            })
    }

    pub fn matrix(&self) -> Mat4 {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        match *self {
            Self::Cz => [
                [o, z, z, z],
                [z, o, z, z],
                [z, z, o, z],
                [z, z, z, c(-1.0, 0.0)],
            ],
            Self::Cnot => [[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]],
            Self::Swap => [[o, z, z, z], [z, z, o, z], [z, o, z, z], [z, z, z, o]],
            Self::ISwap => [[o, z, z, z], [z, z, i, z], [z, i, z, z], [z, z, z, o]],
            Self::Custom(m) => m,
        }
    }
}

impl fmt::Display for TwoQubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name().unwrap_or("custom"))
    }
}

/// On-disk form of a gate: a name or an explicit matrix of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GateRepr {
    Named(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

fn matrix_from_rows<const D: usize>(rows: &[Vec<[f64; 2]>]) -> Result<[[Complex64; D]; D]> {
    if rows.len() != D || rows.iter().any(|r| r.len() != D) {
        return Err(Error::InvalidCircuit(format!(
            "gate matrix must be {D}x{D}"
        )));
    }
    let mut m = [[c(0.0, 0.0); D]; D];
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[i][j] = c(re, im);
        }
    }
    Ok(m)
}

fn rows_of<const D: usize>(m: &[[Complex64; D]; D]) -> Vec<Vec<[f64; 2]>> {
    m.iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

impl TryFrom<GateRepr> for SingleQubitGate {
    type Error = Error;

    fn try_from(repr: GateRepr) -> Result<Self> {
        match repr {
            GateRepr::Named(name) => Self::from_name(&name),
            GateRepr::Matrix(rows) => Self::custom(matrix_from_rows(&rows)?),
        }
    }
}

impl From<SingleQubitGate> for GateRepr {
    fn from(g: SingleQubitGate) -> Self {
        match g.name() {
            Some(name) => GateRepr::Named(name.into()),
            None => GateRepr::Matrix(rows_of(&g.matrix())),
        }
    }
}

impl TryFrom<GateRepr> for TwoQubitGate {
    type Error = Error;

    fn try_from(repr: GateRepr) -> Result<Self> {
        match repr {
            GateRepr::Named(name) => Self::from_name(&name),
            GateRepr::Matrix(rows) => Self::custom(matrix_from_rows(&rows)?),
        }
    }
}

impl From<TwoQubitGate> for GateRepr {
    fn from(g: TwoQubitGate) -> Self {
        match g.name() {
            Some(name) => GateRepr::Named(name.into()),
            None => GateRepr::Matrix(rows_of(&g.matrix())),
        }
    }
}

macro_rules! serde_via_repr {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(
                &self,
                s: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                GateRepr::from(*self).serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(
                d: D,
            ) -> std::result::Result<Self, D::Error> {
                let repr = GateRepr::deserialize(d)?;
                <$ty>::try_from(repr).map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_repr!(SingleQubitGate);
serde_via_repr!(TwoQubitGate);

impl SingleQubitGate {
    pub(crate) fn validate(&self) -> Result<()> {
        check_unitary(&self.matrix())
    }
}

impl TwoQubitGate {
    pub(crate) fn validate(&self) -> Result<()> {
        check_unitary(&self.matrix())
    }
}
