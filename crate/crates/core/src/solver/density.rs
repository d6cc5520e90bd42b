use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spinops::{OperatorMatrix, ONE};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, positive semi-definite state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: OperatorMatrix,
}

impl DensityMatrix {
    /// Validates all invariants at the default tolerances.
    pub fn new(m: OperatorMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL, TRACE_TOL)
    }

    pub(crate) fn with_tolerance(m: OperatorMatrix, herm_tol: f64, trace_tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let asym = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > herm_tol {
            return Err(Error::InvalidState(format!("not Hermitian (defect {asym:e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > trace_tol {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eig = herm.symmetric_eigenvalues().min();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semi-definite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let m = OperatorMatrix::identity(n, n) / Complex64::new(n as f64, 0.0);
        Self { m }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    /// Pure basis state `|k⟩⟨k|` in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut m = OperatorMatrix::zeros(n, n);
        m[(k, k)] = ONE;
        Self { m }
    }

    /// ρ_a ⊗ ρ_b.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self {
            m: a.m.kronecker(&b.m),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.m
    }

    /// Column-stacked vector form.
    pub fn to_vec(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.m.as_slice())
    }

    pub fn expectation(&self, op: &OperatorMatrix) -> Result<Complex64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state dimension {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        Ok((&self.m * op).trace())
    }

    /// Diagonal entries (real parts).
    pub fn populations(&self) -> Vec<f64> {
        self.m.diagonal().iter().map(|z| z.re).collect()
    }

    /// U ρ U†.
    pub fn transform(&self, u: &OperatorMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary dimension mismatch".into()));
        }
        Self::new(u * &self.m * u.adjoint())
    }
}
