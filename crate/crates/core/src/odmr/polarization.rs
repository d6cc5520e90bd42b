use crate::error::{Error, Result};
use crate::spinops::SpinQuantumNumber;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationEstimate {
    pub p: f64,
    pub uncertainty: f64,
}

/// Nuclear polarization from resonance amplitudes read as relative sublevel populations:
/// P = Σ m_i a_i / (I Σ a_i).
///
/// `uncertainties` are one-sigma amplitude errors, propagated to first order.
pub fn polarization_from_amplitudes(
    amplitudes: &[f64],
    m_values: &[f64],
    spin: SpinQuantumNumber,
    uncertainties: Option<&[f64]>,
) -> Result<PolarizationEstimate> {
    if amplitudes.len() != m_values.len() || amplitudes.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for {} m values",
            amplitudes.len(),
            m_values.len()
        )));
    }
    if let Some(u) = uncertainties {
        if u.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch("one uncertainty per amplitude required".into()));
        }
    }
    let spin_i = spin.value();
    if let Some(m) = m_values.iter().find(|m| !(m.abs() <= spin_i)) {
        return Err(Error::InvalidParameter(format!("m = {m} is outside ±{spin_i}")));
    }
    if let Some(a) = amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::InvalidParameter(format!("amplitude {a} must be finite and >= 0")));
    }
    let total: f64 = amplitudes.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroAmplitudes);
    }
    let weighted: f64 = amplitudes.iter().zip(m_values).map(|(a, m)| a * m).sum();
    let p = weighted / (spin_i * total);
    let uncertainty = match uncertainties {
        None => 0.0,
        Some(u) => m_values
            .iter()
            .zip(u)
            .map(|(m, s)| ((m - spin_i * p) / (spin_i * total) * s).powi(2))
            .sum::<f64>()
            .sqrt(),
    };
    Ok(PolarizationEstimate { p, uncertainty })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const M1: [f64; 3] = [-1.0, 0.0, 1.0];

    #[test]
    fn reference_values() {
        let one = SpinQuantumNumber::ONE;
        assert_eq!(polarization_from_amplitudes(&[1.0, 1.0, 1.0], &M1, one, None).unwrap().p, 0.0);
        assert_eq!(polarization_from_amplitudes(&[0.0, 0.0, 1.0], &M1, one, None).unwrap().p, 1.0);
        let half = polarization_from_amplitudes(&[0.15, 0.85], &[-0.5, 0.5], SpinQuantumNumber::HALF, None).unwrap();
        assert!((half.p - 0.70).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let one = SpinQuantumNumber::ONE;
        assert_eq!(polarization_from_amplitudes(&[0.0; 3], &M1, one, None), Err(Error::ZeroAmplitudes));
        assert!(polarization_from_amplitudes(&[1.0, 1.0], &M1, one, None).is_err());
        assert!(polarization_from_amplitudes(&[1.0, -1.0, 1.0], &M1, one, None).is_err());
        assert!(polarization_from_amplitudes(&[1.0, 1.0, 1.0], &[-2.0, 0.0, 1.0], one, None).is_err());
    }

    #[test]
    fn uncertainty_matches_finite_difference() {
        let a = [0.2, 0.5, 1.3];
        let s = [0.01, 0.02, 0.015];
        let one = SpinQuantumNumber::ONE;
        let est = polarization_from_amplitudes(&a, &M1, one, Some(&s)).unwrap();
        let mut var = 0.0;
        for k in 0..3 {
            let h = 1e-7;
            let mut up = a;
            let mut dn = a;
            up[k] += h;
            dn[k] -= h;
            let d = (polarization_from_amplitudes(&up, &M1, one, None).unwrap().p
                - polarization_from_amplitudes(&dn, &M1, one, None).unwrap().p)
                / (2.0 * h);
            var += (d * s[k]).powi(2);
        }
        assert!((est.uncertainty - var.sqrt()).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn bounded_and_scale_invariant(a in prop::collection::vec(0.0f64..10.0, 3), c in 1e-3f64..1e3, e in -20i32..20) {
            prop_assume!(a.iter().sum::<f64>() > 1e-9);
            let one = SpinQuantumNumber::ONE;
            let p = polarization_from_amplitudes(&a, &M1, one, None).unwrap().p;
            prop_assert!(p.abs() <= 1.0);
            let scaled: Vec<f64> = a.iter().map(|x| x * c).collect();
            let q = polarization_from_amplitudes(&scaled, &M1, one, None).unwrap().p;
            prop_assert!((p - q).abs() <= 4.0 * f64::EPSILON);
            let pow2: Vec<f64> = a.iter().map(|x| x * 2f64.powi(e)).collect();
            prop_assert_eq!(polarization_from_amplitudes(&pow2, &M1, one, None).unwrap().p, p);
        }
    }
}
