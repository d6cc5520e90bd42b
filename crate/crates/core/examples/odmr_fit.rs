//! Fits a noisy, polarized ground-state triplet and converts the line amplitudes into a
//! nuclear polarization.

use nvdnp::cli::add_noise;
use nvdnp::odmr::{fit_spectrum, linear_grid, model_spectrum, polarization_from_amplitudes, FitOptions, LorentzianPeak, PeakSet};
use nvdnp::spinops::SpinQuantumNumber;

fn main() -> nvdnp::Result<()> {
    // m_I = -1, 0, +1 with populations 0.1, 0.2, 0.7: P = 0.6
    let truth = PeakSet::new(
        vec![
            LorentzianPeak::new(2867.84, 0.8, 0.004),
            LorentzianPeak::new(2870.00, 0.8, 0.008),
            LorentzianPeak::new(2872.16, 0.8, 0.028),
        ],
        0.0,
    )?;
    let clean = model_spectrum(&truth, &linear_grid(2862.0, 2878.0, 1201))?;
    let data = add_noise(&clean, 4e-4, 3)?;

    let fit = fit_spectrum(&data, 3, None, FitOptions::default())?;
    println!("converged {} after {} iterations", fit.converged, fit.iterations);
    for (pk, u) in fit.peaks.peaks.iter().zip(&fit.uncertainties) {
        println!(
            "  {:.3} +- {:.3} MHz  fwhm {:.3}  amplitude {:.5} +- {:.5}",
            pk.center, u.center, pk.fwhm, pk.amplitude, u.amplitude
        );
    }
    let est = polarization_from_amplitudes(
        &fit.amplitudes(),
        &[-1.0, 0.0, 1.0],
        SpinQuantumNumber::ONE,
        Some(&fit.amplitude_uncertainties()),
    )?;
    println!("P = {:.4} +- {:.4} (true 0.6)", est.p, est.uncertainty);
    Ok(())
}
