use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::spinops::{spin_operators, OperatorMatrix, SpinQuantumNumber, ZERO};

fn check_dims(rho: &DensityMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} do not multiply to state dimension {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Reduced state of subsystem `keep`, tracing out all the others.
pub fn partial_trace(rho: &DensityMatrix, keep: usize, dims: &[usize]) -> Result<DensityMatrix> {
    check_dims(rho, dims)?;
    if keep >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {keep} out of range for {} subsystems",
            dims.len()
        )));
    }
    let dk = dims[keep];
    // Row-major multi-index: the last subsystem varies fastest.
    let inner: usize = dims[keep + 1..].iter().product();
    let outer: usize = dims[..keep].iter().product();
    let stride = dk * inner;
    let m = rho.matrix();

    let mut out = OperatorMatrix::from_element(dk, dk, ZERO);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for o in 0..outer {
                for i in 0..inner {
                    acc += m[(o * stride + a * inner + i, o * stride + b * inner + i)];
                }
            }
            out[(a, b)] = acc;
        }
    }
    DensityMatrix::new(out)
}

/// ⟨I_z⟩ / I of the nucleus (slot 1): +1 when fully in m_I = +I.
pub fn nuclear_polarization(rho: &DensityMatrix, dims: &[usize], nuclear_spin: SpinQuantumNumber) -> Result<f64> {
    if dims.len() != 2 || dims[1] != nuclear_spin.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expected [electron, nucleus] dims with nucleus dimension {}, got {dims:?}",
            nuclear_spin.dim()
        )));
    }
    let rn = partial_trace(rho, 1, dims)?;
    let iz = spin_operators(nuclear_spin).z;
    Ok(rn.expectation(&iz)?.re / nuclear_spin.value())
}

/// Population of m_s = 0 in the reduced spin-1 electron state (slot 0).
pub fn electron_polarization(rho: &DensityMatrix, dims: &[usize]) -> Result<f64> {
    if dims.first() != Some(&3) {
        return Err(Error::DimensionMismatch(format!(
            "electron subsystem must be spin 1 (dimension 3), got {dims:?}"
        )));
    }
    let re = partial_trace(rho, 0, dims)?;
    Ok(re.populations()[1])
}
