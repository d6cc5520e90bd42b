use num_complex::Complex64;

use super::params::DissipationParams;
use crate::error::Result;
use crate::spinops::{embed, OperatorMatrix, SpinQuantumNumber, ONE};

/// Physical origin of a jump operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseKind {
    /// |0⟩⟨±1| on the electron: optical pumping into m_s = 0.
    PumpForward,
    /// |±1⟩⟨0|: leakage against the pump.
    PumpReverse,
    ElectronRelaxation,
    NuclearRelaxation,
}

/// Jump operator `op` entering the dissipator with rate `rate` (1/µs).
#[derive(Debug, Clone)]
pub struct CollapseOperator {
    pub op: OperatorMatrix,
    pub rate: f64,
    pub kind: CollapseKind,
}

const MS_ZERO: usize = 1;

fn electron_jump(to: usize, from: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(3, 3);
    m[(to, from)] = ONE;
    m
}

/// Jump operators for the spin-1 electron ⊗ `nuclear_spin` system.
///
/// Pumping acts on the electron only and conserves m_I. Electron relaxation connects every
/// ordered pair of m_s levels and nuclear relaxation every ordered adjacent m_I pair, each at
/// half the inverse T1. Zero-rate channels are omitted.
pub fn build_collapse_ops(d: &DissipationParams, nuclear_spin: SpinQuantumNumber) -> Result<Vec<CollapseOperator>> {
    collapse_ops_for_nuclear_dim(d, nuclear_spin.dim())
}

/// Same as [`build_collapse_ops`] with an arbitrary nuclear dimension; `1` gives the bare electron.
pub(crate) fn collapse_ops_for_nuclear_dim(d: &DissipationParams, nuclear_dim: usize) -> Result<Vec<CollapseOperator>> {
    d.validate()?;
    let dims = [3, nuclear_dim];
    let mut out = Vec::new();
    let mut push = |op: OperatorMatrix, slot: usize, rate: f64, kind: CollapseKind| -> Result<()> {
        if rate > 0.0 {
            out.push(CollapseOperator {
                op: embed(&op, slot, &dims)?,
                rate,
                kind,
            });
        }
        Ok(())
    };

    for ms in [0, 2] {
        push(electron_jump(MS_ZERO, ms), 0, d.pump_rate, CollapseKind::PumpForward)?;
    }
    for ms in [0, 2] {
        push(
            electron_jump(ms, MS_ZERO),
            0,
            d.pump_rate * d.pump_leak_ratio,
            CollapseKind::PumpReverse,
        )?;
    }

    let we = d.electron_relaxation_rate();
    for to in 0..3 {
        for from in 0..3 {
            if to != from {
                push(electron_jump(to, from), 0, we, CollapseKind::ElectronRelaxation)?;
            }
        }
    }

    let wn = d.nuclear_relaxation_rate();
    for k in 0..nuclear_dim.saturating_sub(1) {
        for (to, from) in [(k, k + 1), (k + 1, k)] {
            let mut m = OperatorMatrix::zeros(nuclear_dim, nuclear_dim);
            m[(to, from)] = Complex64::new(1.0, 0.0);
            push(m, 1, wn, CollapseKind::NuclearRelaxation)?;
        }
    }
    Ok(out)
}
