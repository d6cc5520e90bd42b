//! Angular-momentum matrices and their embedding into the joint
//! electron ⊗ nucleus Hilbert space.
//!
//! All matrices use the |s, m⟩ basis ordered by descending m
//! (m = s, s−1, …, −s) and ħ = 1. Slot 0 is the electron, slot 1 the nucleus.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex square matrix acting on a (possibly joint) spin Hilbert space.
pub type OperatorMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
#[cfg(test)]
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Spin quantum number stored as twice its value, so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpinQuantumNumber {
    two_s: u32,
}

impl SpinQuantumNumber {
    pub const HALF: Self = Self { two_s: 1 };
    pub const ONE: Self = Self { two_s: 2 };
    pub const THREE_HALVES: Self = Self { two_s: 3 };

    pub fn from_two_s(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::InvalidParameter(
                "spin must be at least 1/2 (two_s >= 1)".into(),
            ));
        }
        Ok(Self { two_s })
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    pub fn value(self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }

    /// Magnetic quantum numbers in basis order (descending).
    pub fn m_values(self) -> Vec<f64> {
        let s = self.value();
        (0..self.dim()).map(|k| s - k as f64).collect()
    }
}

impl TryFrom<u32> for SpinQuantumNumber {
    type Error = Error;
    fn try_from(two_s: u32) -> Result<Self> {
        Self::from_two_s(two_s)
    }
}

impl From<SpinQuantumNumber> for u32 {
    fn from(s: SpinQuantumNumber) -> u32 {
        s.two_s
    }
}

/// The Cartesian and ladder operators of a single spin.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub x: OperatorMatrix,
    pub y: OperatorMatrix,
    pub z: OperatorMatrix,
    pub plus: OperatorMatrix,
    pub minus: OperatorMatrix,
}

impl SpinOperators {
    /// Components in x, y, z order.
    pub fn cartesian(&self) -> [&OperatorMatrix; 3] {
        [&self.x, &self.y, &self.z]
    }
}

pub fn spin_operators(s: SpinQuantumNumber) -> SpinOperators {
    let n = s.dim();
    let sv = s.value();
    let ms = s.m_values();

    let z = OperatorMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(ms[r], 0.0)
        } else {
            ZERO
        }
    });

    // ⟨m+1|S+|m⟩ = √(s(s+1) − m(m+1)); row index r holds m = ms[r], so m+1 sits one row up.
    let mut plus = OperatorMatrix::zeros(n, n);
    for c in 1..n {
        let m = ms[c];
        plus[(c - 1, c)] = Complex64::new((sv * (sv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let minus = plus.adjoint();

    let x = (&plus + &minus) * Complex64::new(0.5, 0.0);
    let y = (&plus - &minus) * Complex64::new(0.0, -0.5);

    SpinOperators {
        x,
        y,
        z,
        plus,
        minus,
    }
}

/// Identity ⊗ … ⊗ `op` ⊗ … ⊗ Identity with `op` in position `slot`.
pub fn embed(op: &OperatorMatrix, slot: usize, dims: &[usize]) -> Result<OperatorMatrix> {
    if slot >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "slot {slot} out of range for {} subsystems",
            dims.len()
        )));
    }
    if op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected square",
            op.nrows(),
            op.ncols()
        )));
    }
    if op.nrows() != dims[slot] {
        return Err(Error::DimensionMismatch(format!(
            "operator dimension {} does not match subsystem {slot} dimension {}",
            op.nrows(),
            dims[slot]
        )));
    }

    let mut out = OperatorMatrix::identity(1, 1);
    for (k, &d) in dims.iter().enumerate() {
        out = if k == slot {
            out.kronecker(op)
        } else {
            out.kronecker(&OperatorMatrix::identity(d, d))
        };
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) fn max_abs(m: &OperatorMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
