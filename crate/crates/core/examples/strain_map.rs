//! Field by transverse-strain map around the anti-crossing, printed as a table.

use nvdnp::model::{calibrate_pump, DissipationParams, NVSystemParams};
use nvdnp::sweep::{scan_field_strain, Axis, SweepParameter, SweepSpec};

fn main() -> nvdnp::Result<()> {
    let d = calibrate_pump(0.8, &DissipationParams::default(), &NVSystemParams::default())?;
    let spec = SweepSpec::two_axes(
        NVSystemParams::default(),
        d,
        Axis::new(SweepParameter::BAxialGauss, 400.0, 600.0, 11),
        Axis::new(SweepParameter::EEsMhz, 0.0, 300.0, 7),
    );
    let r = scan_field_strain(&spec)?;
    print!("  B \\ E ");
    for e in r.axis2.as_deref().unwrap_or_default() {
        print!("{e:7.0}");
    }
    println!();
    for (i, row) in r.nuclear_grid().iter().enumerate() {
        print!("{:7.0} ", r.axis1[i]);
        for p in row {
            print!("{p:7.3}");
        }
        println!();
    }
    Ok(())
}
