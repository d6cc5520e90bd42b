use num_complex::Complex64;

use super::params::{HyperfineTensor, NVSystemParams};
use crate::error::Result;
use crate::spinops::{embed, spin_operators, OperatorMatrix, SpinQuantumNumber};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Excited-state spin Hamiltonian on the electron ⊗ nucleus space, in MHz:
/// zero-field splitting, spin-strain, electron and nuclear Zeeman, hyperfine.
pub fn build_hamiltonian(p: &NVSystemParams) -> Result<OperatorMatrix> {
    p.validate()?;
    let dims = p.dims();
    let n = p.hilbert_dim();
    let s = spin_operators(SpinQuantumNumber::ONE);
    let i = spin_operators(p.nuclear_spin);

    let sx = embed(&s.x, 0, &dims)?;
    let sy = embed(&s.y, 0, &dims)?;
    let sz = embed(&s.z, 0, &dims)?;
    let s_sq = &sx * &sx + &sy * &sy + &sz * &sz;

    let mut h = (&sz * &sz - s_sq / re(3.0)) * re(p.d_es);
    h += (&sx * &sx - &sy * &sy) * re(p.e_es);

    let nuc = [
        embed(&i.x, 1, &dims)?,
        embed(&i.y, 1, &dims)?,
        embed(&i.z, 1, &dims)?,
    ];
    for (k, (se, ni)) in [&sx, &sy, &sz].into_iter().zip(nuc.iter()).enumerate() {
        let b = p.b_field[k];
        if b != 0.0 {
            h += se * re(b * p.gamma_e) + ni * re(b * p.gamma_n);
        }
    }

    h += build_hyperfine(&p.hyperfine, p.nuclear_spin)?;
    debug_assert_eq!(h.nrows(), n);
    Ok(h)
}

/// I·A·S on the spin-1 electron ⊗ `nuclear_spin` space, in MHz.
///
/// The axial form is written with ladder operators,
/// `A_par I_z S_z + (A_perp/2)(I₊S₋ + I₋S₊)`; the full form sums `A_ij I_i S_j`.
pub fn build_hyperfine(h: &HyperfineTensor, nuclear_spin: SpinQuantumNumber) -> Result<OperatorMatrix> {
    h.validate()?;
    let dims = [3, nuclear_spin.dim()];
    let s = spin_operators(SpinQuantumNumber::ONE);
    let i = spin_operators(nuclear_spin);
    match *h {
        HyperfineTensor::Axial { a_par, a_perp } => {
            let izsz = embed(&i.z, 1, &dims)? * embed(&s.z, 0, &dims)?;
            let flip = embed(&i.plus, 1, &dims)? * embed(&s.minus, 0, &dims)?
                + embed(&i.minus, 1, &dims)? * embed(&s.plus, 0, &dims)?;
            Ok(izsz * re(a_par) + flip * re(a_perp / 2.0))
        }
        HyperfineTensor::Full(a) => {
            let si = [
                embed(&s.x, 0, &dims)?,
                embed(&s.y, 0, &dims)?,
                embed(&s.z, 0, &dims)?,
            ];
            let ii = [
                embed(&i.x, 1, &dims)?,
                embed(&i.y, 1, &dims)?,
                embed(&i.z, 1, &dims)?,
            ];
            let n = dims[0] * dims[1];
            let mut out = OperatorMatrix::zeros(n, n);
            for (r, ir) in ii.iter().enumerate() {
                for (c, sc) in si.iter().enumerate() {
                    if a[r][c] != 0.0 {
                        out += ir * sc * re(a[r][c]);
                    }
                }
            }
            Ok(out)
        }
    }
}
