//! Steady state at 500 G with the optical pump calibrated to 80% electron polarization.

use nvdnp::model::{calibrate_pump, simulate, DissipationParams, NVSystemParams};

fn main() -> nvdnp::Result<()> {
    let p = NVSystemParams::default().with_axial_field(500.0);
    let d = calibrate_pump(0.8, &DissipationParams::default(), &NVSystemParams::default())?;
    let sim = simulate(&p, &d)?;
    println!("pump leak ratio      {:.5}", d.pump_leak_ratio);
    println!("electron polarization {:.4}", sim.electron_polarization);
    println!("nuclear polarization  {:.4}", sim.nuclear_polarization);
    println!("residual              {:.2e}", sim.report.residual_norm);
    println!("populations:");
    for (k, pop) in sim.report.rho.populations().iter().enumerate() {
        let (ms, mi) = (1 - (k / 3) as i32, 1 - (k % 3) as i32);
        println!("  m_s={ms:+} m_I={mi:+}  {pop:.4}");
    }
    Ok(())
}
