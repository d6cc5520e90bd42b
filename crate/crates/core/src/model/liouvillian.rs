use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dissipation::CollapseOperator;
use crate::error::{Error, Result};
use crate::spinops::OperatorMatrix;

/// Lindblad generator acting on column-stacked density matrices, in 1/µs.
///
/// `vec(ρ)[i + n·j] = ρ[i, j]`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub matrix: DMatrix<Complex64>,
    pub hilbert_dim: usize,
}

impl Liouvillian {
    /// Maximum absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of |vec(Identity)† · L|; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let n = self.hilbert_dim;
        (0..n * n)
            .map(|col| (0..n).map(|k| self.matrix[(k + n * k, col)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }
}

/// Builds `L` with `dρ/dt = −i·2π[H, ρ] + Σ γ_k (C ρ C† − ½{C†C, ρ})`.
/// `H` is in MHz; the 2π turns it into an angular frequency per µs.
pub fn liouvillian(h: &OperatorMatrix, collapse: &[CollapseOperator]) -> Result<Liouvillian> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian is {}x{}, expected square",
            n,
            h.ncols()
        )));
    }
    for (k, c) in collapse.iter().enumerate() {
        if c.op.nrows() != n || c.op.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "collapse operator {k} is {}x{}, Hamiltonian is {n}x{n}",
                c.op.nrows(),
                c.op.ncols()
            )));
        }
        if !(c.rate.is_finite() && c.rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "collapse operator {k} has invalid rate {}",
                c.rate
            )));
        }
    }

    let id = OperatorMatrix::identity(n, n);
    let mi = Complex64::new(0.0, -TAU);
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * mi;

    for c in collapse {
        if c.rate == 0.0 {
            continue;
        }
        let g = Complex64::new(c.rate, 0.0);
        let cdc = c.op.adjoint() * &c.op;
        let jump = c.op.map(|z| z.conj()).kronecker(&c.op);
        let anti = id.kronecker(&cdc) + cdc.transpose().kronecker(&id);
        l += (jump - anti * Complex64::new(0.5, 0.0)) * g;
    }

    Ok(Liouvillian {
        matrix: l,
        hilbert_dim: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dissipation::CollapseKind;
    use crate::spinops::ONE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vec_of(rho: &OperatorMatrix) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_column_slice(rho.as_slice())
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> OperatorMatrix {
        OperatorMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn empty_generator_is_zero() {
        let l = liouvillian(&OperatorMatrix::zeros(3, 3), &[]).unwrap();
        assert_eq!(l.max_norm(), 0.0);
        assert_eq!(l.matrix.nrows(), 9);
    }

    #[test]
    fn two_level_decay() {
        let gamma = 0.7;
        let mut c = OperatorMatrix::zeros(2, 2);
        c[(1, 0)] = ONE; // |g⟩⟨e| with e = index 0
        let ops = [CollapseOperator { op: c, rate: gamma, kind: CollapseKind::ElectronRelaxation }];
        let l = liouvillian(&OperatorMatrix::zeros(2, 2), &ops).unwrap();
        let mut rho = OperatorMatrix::zeros(2, 2);
        rho[(0, 0)] = ONE;
        let d = &l.matrix * vec_of(&rho);
        assert!((d[0] - Complex64::new(-gamma, 0.0)).norm() < 1e-14);
        assert!((d[3] - Complex64::new(gamma, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn matches_direct_commutator_and_dissipator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        let a = random_matrix(&mut rng, n);
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let c = random_matrix(&mut rng, n);
        let rho = random_matrix(&mut rng, n);
        let rate = 0.3;
        let ops = [CollapseOperator { op: c.clone(), rate, kind: CollapseKind::PumpForward }];
        let l = liouvillian(&h, &ops).unwrap();
        let lhs = &l.matrix * vec_of(&rho);

        let cdc = c.adjoint() * &c;
        let direct = (&h * &rho - &rho * &h) * Complex64::new(0.0, -TAU)
            + (&c * &rho * c.adjoint() - (&cdc * &rho + &rho * &cdc) * Complex64::new(0.5, 0.0))
                * Complex64::new(rate, 0.0);
        let rhs = vec_of(&direct);
        assert!((lhs - rhs).camax() < 1e-12);
    }

    #[test]
    fn trace_preserving_for_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(2..7);
            let a = random_matrix(&mut rng, n);
            let h = (&a + a.adjoint()) * Complex64::new(50.0, 0.0);
            let ops: Vec<_> = (0..rng.random_range(1..5))
                .map(|_| CollapseOperator {
                    op: random_matrix(&mut rng, n),
                    rate: rng.random_range(0.0..5.0),
                    kind: CollapseKind::NuclearRelaxation,
                })
                .collect();
            let l = liouvillian(&h, &ops).unwrap();
            assert!(l.trace_defect() < 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let ops = [CollapseOperator { op: OperatorMatrix::zeros(2, 2), rate: 1.0, kind: CollapseKind::PumpForward }];
        assert!(matches!(
            liouvillian(&OperatorMatrix::zeros(3, 3), &ops),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
