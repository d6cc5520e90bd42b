use nvdnp::model::{build_hamiltonian, build_liouvillian, simulate, DissipationParams, HyperfineTensor, NVSystemParams};
use nvdnp::solver::{evolve, steady_state, DensityMatrix};
use nvdnp::spinops::SpinQuantumNumber;
use nvdnp::sweep::{
    scan_field_strain, strain_averaged_polarization, sweep_field, Axis, StrainDistribution, SweepParameter, SweepSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn system() -> impl Strategy<Value = NVSystemParams> {
    (0.0..1000.0f64, 0.0..300.0f64, -80.0..80.0f64, -80.0..80.0f64, any::<bool>()).prop_map(|(b, e, par, perp, half)| {
        NVSystemParams {
            e_es: e,
            hyperfine: HyperfineTensor::Axial { a_par: par, a_perp: perp },
            nuclear_spin: if half { SpinQuantumNumber::HALF } else { SpinQuantumNumber::ONE },
            ..Default::default()
        }
        .with_axial_field(b)
    })
}

fn dissipation() -> impl Strategy<Value = DissipationParams> {
    (0.5..50.0f64, 0.0..1.0f64, 5.0..1000.0f64, 50.0..1e4f64).prop_map(|(k, leak, t1e, t1n)| DissipationParams {
        pump_rate: k,
        pump_leak_ratio: leak,
        t1_electron: t1e,
        t1_nuclear: t1n,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_hermitian(p in system()) {
        let h = build_hamiltonian(&p).unwrap();
        let d = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-12 * h.iter().map(|z| z.norm()).fold(1.0, f64::max));
    }

    #[test]
    fn steady_state_is_a_valid_stationary_state(p in system(), d in dissipation()) {
        let l = build_liouvillian(&p, &d).unwrap();
        let ss = steady_state(&l).unwrap();
        prop_assert!(ss.residual_norm < 1e-9);
        DensityMatrix::new(ss.rho.matrix().clone()).unwrap();
        let sim = simulate(&p, &d).unwrap();
        prop_assert!(sim.nuclear_polarization.abs() <= 1.0 + 1e-12);
        prop_assert!(sim.electron_polarization.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn evolution_preserves_trace_and_hermiticity(p in system(), d in dissipation(), t in 0.01..5.0f64) {
        let l = build_liouvillian(&p, &d).unwrap();
        let rho0 = DensityMatrix::basis(p.hilbert_dim(), 0);
        let rho = evolve(&rho0, &l, t).unwrap();
        let m = rho.matrix();
        prop_assert!((m.trace().re - 1.0).abs() < 1e-9);
        prop_assert!((m - m.adjoint()).iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn polarization_is_even_in_strain(b in 0.0..1000.0f64, e in 0.0..300.0f64, d in dissipation()) {
        let p = NVSystemParams::default().with_axial_field(b);
        let plus = simulate(&p.with_strain(e), &d).unwrap().nuclear_polarization;
        let minus = simulate(&p.with_strain(-e), &d).unwrap().nuclear_polarization;
        prop_assert!((plus - minus).abs() < 1e-8, "{} vs {}", plus, minus);
    }

    #[test]
    fn no_transverse_hyperfine_no_polarization(b in 0.0..1000.0f64, par in -80.0..80.0f64, d in dissipation()) {
        let p = NVSystemParams {
            hyperfine: HyperfineTensor::Axial { a_par: par, a_perp: 0.0 },
            ..Default::default()
        }
        .with_axial_field(b);
        prop_assert!(simulate(&p, &d).unwrap().nuclear_polarization.abs() < 1e-6);
    }
}

#[test]
fn zero_strain_row_of_map_matches_field_sweep() {
    let p = NVSystemParams::default();
    let d = DissipationParams::default();
    let b = Axis::new(SweepParameter::BAxialGauss, 300.0, 700.0, 9);
    let map = scan_field_strain(&SweepSpec::two_axes(p.clone(), d, b, Axis::new(SweepParameter::EEsMhz, 0.0, 200.0, 5))).unwrap();
    let line = sweep_field(&SweepSpec::one_axis(p, d, b)).unwrap();
    for (i, pt) in line.points.iter().enumerate() {
        let q = map.point(i, 0);
        assert_eq!(q.axis2, Some(0.0));
        assert_eq!(q.nuclear.to_bits(), pt.nuclear.to_bits());
        assert_eq!(q.electron.to_bits(), pt.electron.to_bits());
    }
}

#[test]
fn strain_average_matches_monte_carlo() {
    let p = NVSystemParams::default().with_axial_field(500.0);
    let d = DissipationParams::default();
    let sigma = 50.0;

    // P(E) is even, so a table over E >= 0 covers every draw out to 8 sigma.
    let step = 1.0;
    let table: Vec<f64> = (0..=400)
        .map(|k| simulate(&p.with_strain(k as f64 * step), &d).unwrap().nuclear_polarization)
        .collect();
    let interp = |e: f64| {
        let x = (e.abs() / step).min((table.len() - 1) as f64 - 1e-9);
        let k = x.floor() as usize;
        let f = x - k as f64;
        table[k] * (1.0 - f) + table[k + 1] * f
    };

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let normal = Normal::new(0.0, sigma).unwrap();
    let n = 100_000;
    let mc = (0..n).map(|_| interp(normal.sample(&mut rng))).sum::<f64>() / n as f64;

    let quad = strain_averaged_polarization(&p, &d, &StrainDistribution::new(0.0, sigma).with_nodes(64)).unwrap();
    assert!((quad.nuclear - mc).abs() < 1e-3, "quadrature {} vs Monte Carlo {mc}", quad.nuclear);

    // The default node count agrees with the high-order rule.
    let default = strain_averaged_polarization(&p, &d, &StrainDistribution::new(0.0, sigma)).unwrap();
    assert!((default.nuclear - quad.nuclear).abs() < 1e-6);
}

#[test]
fn narrow_distribution_reduces_to_point_value() {
    let p = NVSystemParams::default().with_axial_field(480.0);
    let d = DissipationParams::default();
    let point = simulate(&p.with_strain(40.0), &d).unwrap().nuclear_polarization;
    let avg = strain_averaged_polarization(&p, &d, &StrainDistribution::new(40.0, 0.0)).unwrap();
    assert_eq!(avg.nuclear, point);
}
