//! Recovers the strain width from a simulated zero-field excited-state ODMR line.

use nvdnp::cli::add_noise;
use nvdnp::odmr::{esodmr_lineshape, fit_strain_distribution, linear_grid, StrainFitOptions};
use nvdnp::sweep::StrainDistribution;

fn main() -> nvdnp::Result<()> {
    let grid = linear_grid(1000.0, 1800.0, 801);
    for sigma in [10.0, 40.0, 120.0] {
        let shape = esodmr_lineshape(&StrainDistribution::new(0.0, sigma), 1420.0, 20.0, &grid)?;
        let scaled = shape.with_contrast(shape.contrast().iter().map(|c| 0.05 * c).collect())?;
        let data = add_noise(&scaled, 5e-4, 9)?;
        let fit = fit_strain_distribution(&data, 1420.0, 20.0, StrainFitOptions { fit_d_es: true, ..Default::default() })?;
        println!(
            "true sigma {sigma:6.1}  fitted {:6.2} +- {:.2} MHz  d_es {:.2} MHz  converged {}",
            fit.distribution.sigma, fit.sigma_uncertainty, fit.d_es, fit.converged
        );
    }
    Ok(())
}
