use nvdnp::model::{calibrate_pump, DissipationParams, NVSystemParams};
use nvdnp::sweep::{sweep_field, Axis, SweepParameter, SweepSpec};

fn main() -> nvdnp::Result<()> {
    let d = calibrate_pump(0.8, &DissipationParams::default(), &NVSystemParams::default())?;
    let spec = SweepSpec::one_axis(
        NVSystemParams::default(),
        d,
        Axis::new(SweepParameter::BAxialGauss, 0.0, 1000.0, 51),
    );
    let r = sweep_field(&spec)?;
    for pt in &r.points {
        let bar = "#".repeat((pt.nuclear.max(0.0) * 60.0).round() as usize);
        println!("{:7.1} G  {:+.4}  {bar}", pt.axis1, pt.nuclear);
    }
    Ok(())
}
