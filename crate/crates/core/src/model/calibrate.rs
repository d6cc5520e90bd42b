use num_complex::Complex64;

use super::dissipation::collapse_ops_for_nuclear_dim;
use super::liouvillian::liouvillian;
use super::params::{DissipationParams, NVSystemParams};
use crate::error::{Error, Result};
use crate::solver::steady_state;
use crate::spinops::{spin_operators, OperatorMatrix, SpinQuantumNumber};

/// Agreement required between the calibrated and requested electron polarization.
pub const CALIBRATION_TOL: f64 = 1e-3;

/// Steady-state m_s = 0 population at zero field without hyperfine coupling.
///
/// Without the flip-flop term the electron populations decouple from the nucleus, so the bare
/// three-level electron is solved; the nuclear factor would only add a conserved label.
pub fn zero_field_electron_polarization(d: &DissipationParams, p: &NVSystemParams) -> Result<f64> {
    let s = spin_operators(SpinQuantumNumber::ONE);
    let id = OperatorMatrix::identity(3, 3);
    let h = (&s.z * &s.z - id * Complex64::new(2.0 / 3.0, 0.0)) * Complex64::new(p.d_es, 0.0)
        + (&s.x * &s.x - &s.y * &s.y) * Complex64::new(p.e_es, 0.0);
    let ops = collapse_ops_for_nuclear_dim(d, 1)?;
    let l = liouvillian(&h, &ops)?;
    let r = steady_state(&l)?;
    Ok(r.rho.populations()[1])
}

/// Returns `d` with `pump_leak_ratio` chosen by bisection on [0, 1] so that the zero-field
/// electron polarization matches `target`.
pub fn calibrate_pump(target: f64, d: &DissipationParams, p: &NVSystemParams) -> Result<DissipationParams> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target electron polarization must lie in (0, 1], got {target}"
        )));
    }
    p.validate()?;
    d.validate()?;
    let at = |leak: f64| {
        let trial = DissipationParams { pump_leak_ratio: leak, ..*d };
        zero_field_electron_polarization(&trial, p)
    };

    let max = at(0.0)?;
    let min = at(1.0)?;
    if target > max + 1e-12 || target < min - 1e-12 {
        return Err(Error::UnreachableTarget { target, min, max });
    }
    if (max - target).abs() <= 1e-12 {
        return Ok(DissipationParams { pump_leak_ratio: 0.0, ..*d });
    }

    // Polarization decreases monotonically with the leak ratio.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut leak = 0.5;
    for _ in 0..200 {
        leak = 0.5 * (lo + hi);
        let pe = at(leak)?;
        if (pe - target).abs() < 1e-9 || hi - lo < 1e-14 {
            break;
        }
        if pe > target {
            lo = leak;
        } else {
            hi = leak;
        }
    }
    let out = DissipationParams { pump_leak_ratio: leak, ..*d };
    let achieved = zero_field_electron_polarization(&out, p)?;
    if (achieved - target).abs() > CALIBRATION_TOL {
        return Err(Error::UnreachableTarget { target, min, max });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Rate balance for m_s = 0 with pump Γ, leak r and pairwise relaxation w:
    // p0 = (Γ + w) / (Γ(1 + 2r) + 3w).
    fn analytic(d: &DissipationParams) -> f64 {
        let g = d.pump_rate;
        let w = d.electron_relaxation_rate();
        (g + w) / (g * (1.0 + 2.0 * d.pump_leak_ratio) + 3.0 * w)
    }

    #[test]
    fn zero_field_polarization_matches_rate_equation() {
        let p = NVSystemParams { e_es: 25.0, ..Default::default() };
        for leak in [0.0, 0.1, 0.5, 1.0] {
            let d = DissipationParams { pump_leak_ratio: leak, ..Default::default() };
            let got = zero_field_electron_polarization(&d, &p).unwrap();
            assert!((got - analytic(&d)).abs() < 1e-10, "leak {leak}: {got} vs {}", analytic(&d));
        }
    }

    #[test]
    fn unit_target_unreachable_with_relaxation() {
        let r = calibrate_pump(1.0, &DissipationParams::default(), &NVSystemParams::default());
        match r {
            Err(Error::UnreachableTarget { max, .. }) => assert!(max < 1.0),
            other => panic!("expected UnreachableTarget, got {other:?}"),
        }
    }

    #[test]
    fn target_below_one_third_unreachable() {
        let r = calibrate_pump(0.2, &DissipationParams::default(), &NVSystemParams::default());
        assert!(matches!(r, Err(Error::UnreachableTarget { .. })));
        assert!(calibrate_pump(0.0, &DissipationParams::default(), &NVSystemParams::default()).is_err());
    }

    #[test]
    fn no_relaxation_limit() {
        let d = DissipationParams {
            t1_electron: f64::INFINITY,
            t1_nuclear: f64::INFINITY,
            ..Default::default()
        };
        let p = NVSystemParams::default();
        let out = calibrate_pump(1.0, &d, &p).unwrap();
        assert_eq!(out.pump_leak_ratio, 0.0);
        let out = calibrate_pump(1.0 - 1e-7, &d, &p).unwrap();
        assert!(out.pump_leak_ratio < 1e-6);
        // p0 = 1 / (1 + 2r)  =>  r = 0.125 for 0.8
        let out = calibrate_pump(0.8, &d, &p).unwrap();
        assert!((out.pump_leak_ratio - 0.125).abs() < 1e-7);
    }

    #[test]
    fn calibration_hits_target() {
        let p = NVSystemParams::default();
        for target in [0.5, 0.8, 0.95] {
            let out = calibrate_pump(target, &DissipationParams::default(), &p).unwrap();
            let got = zero_field_electron_polarization(&out, &p).unwrap();
            assert!((got - target).abs() < CALIBRATION_TOL);
            assert!((analytic(&out) - target).abs() < 1e-6);
        }
    }
}
