//! Strain-averaged polarization at 500 G for a strain width that grows on cooling.

use nvdnp::model::{calibrate_pump, DissipationParams, NVSystemParams};
use nvdnp::sweep::{temperature_curve, StrainDistribution, TemperatureRow};

fn main() -> nvdnp::Result<()> {
    let d = calibrate_pump(0.8, &DissipationParams::default(), &NVSystemParams::default())?;
    let p = NVSystemParams::default().with_axial_field(500.0);
    let table: Vec<TemperatureRow> = [(300.0, 10.0), (150.0, 40.0), (80.0, 100.0), (40.0, 180.0), (10.0, 300.0)]
        .into_iter()
        .map(|(t, s)| TemperatureRow { temperature: t, distribution: StrainDistribution::new(0.0, s) })
        .collect();
    println!("# T_K  sigma_MHz  P_nuclear  P_electron");
    for pt in temperature_curve(&p, &d, &table)? {
        match pt.outcome {
            Ok(a) => println!("{:5.0} {:9.1} {:10.4} {:11.4}", pt.temperature, pt.distribution.sigma, a.nuclear, a.electron),
            Err(e) => println!("{:5.0} failed: {e}", pt.temperature),
        }
    }
    Ok(())
}
