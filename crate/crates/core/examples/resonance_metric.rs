use nvdnp::odmr::{linear_grid, model_spectrum, resonance_metric, LorentzianPeak, PeakSet};

fn main() -> nvdnp::Result<()> {
    let grid = linear_grid(1200.0, 1650.0, 451);
    for fwhm in [10.0, 30.0, 90.0] {
        let line = PeakSet::new(vec![LorentzianPeak::new(1420.0, fwhm, 0.04)], 0.0)?;
        let s = model_spectrum(&line, &grid)?;
        let m = resonance_metric(&s, (1370.0, 1470.0))?;
        println!(
            "line fwhm {fwhm:5.1}: metric {:.5}  mean contrast {:.5}  measured fwhm {:.2}  flagged {}",
            m.value, m.mean_contrast, m.fwhm, m.flagged
        );
    }
    Ok(())
}
