use nalgebra::DVector;
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::expm::expm;
use crate::error::{Error, Result};
use crate::model::Liouvillian;
use crate::spinops::OperatorMatrix;

/// Relative singular-value threshold below which a direction counts as null.
pub const TOL_NULL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SteadyStateReport {
    pub rho: DensityMatrix,
    /// ‖L·vec(ρ)‖₂ evaluated on the returned state.
    pub residual_norm: f64,
    pub null_space_dim: usize,
}

/// Stationary state from the null space of `L`, found by SVD.
///
/// A unique null direction is reshaped, normalized to unit trace and symmetrized.
/// Degenerate null spaces are reported rather than averaged.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyStateReport> {
    let n = l.hilbert_dim;
    let nn = n * n;
    if l.matrix.nrows() != nn || l.matrix.ncols() != nn {
        return Err(Error::DimensionMismatch(format!(
            "Liouvillian is {}x{}, expected {nn}x{nn}",
            l.matrix.nrows(),
            l.matrix.ncols()
        )));
    }
    if l.max_norm() == 0.0 {
        return Err(Error::DegenerateSteadyState { dim: nn });
    }

    let svd = l.matrix.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V");
    let sigma_max = svd.singular_values.max();
    let null: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < TOL_NULL * sigma_max)
        .map(|(k, _)| k)
        .collect();

    match null.len() {
        0 => return Err(Error::NoStationaryState),
        1 => {}
        dim => return Err(Error::DegenerateSteadyState { dim }),
    }

    // Rows of V† are conjugated right singular vectors.
    let v: DVector<Complex64> = v_t.row(null[0]).transpose().map(|z| z.conj());
    let m = OperatorMatrix::from_column_slice(n, n, v.as_slice());
    let tr = m.trace();
    if tr.norm() < f64::EPSILON * m.camax().max(1.0) {
        return Err(Error::InvalidState("null vector is traceless".into()));
    }
    let m = m / tr;
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let rho = DensityMatrix::new(m)?;
    let residual_norm = (&l.matrix * rho.to_vec()).norm();

    Ok(SteadyStateReport {
        rho,
        residual_norm,
        null_space_dim: 1,
    })
}

/// ρ(t) = exp(L t) ρ(0), with `t` in µs.
pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, t: f64) -> Result<DensityMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("evolution time must be >= 0, got {t}")));
    }
    if rho0.dim() != l.hilbert_dim {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} does not match Liouvillian dimension {}",
            rho0.dim(),
            l.hilbert_dim
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let prop = expm(&(&l.matrix * Complex64::new(t, 0.0)));
    let v = prop * rho0.to_vec();
    let n = l.hilbert_dim;
    DensityMatrix::with_tolerance(OperatorMatrix::from_column_slice(n, n, v.as_slice()), 1e-8, 1e-8)
}

/// Smallest nonzero decay rate of `L` (the spectral gap), in 1/µs.
///
/// Eigenvalues within `TOL_NULL·max|λ|` of zero are treated as stationary.
pub fn slowest_relaxation_rate(l: &Liouvillian) -> Option<f64> {
    let eig = l.matrix.clone().schur().eigenvalues()?;
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    eig.iter()
        .filter(|z| z.norm() > TOL_NULL * scale)
        .map(|z| -z.re)
        .filter(|&r| r > 0.0)
        .min_by(|a, b| a.total_cmp(b))
}
