//! ODMR spectra: Lorentzian peak models and fitting, polarization from resonance amplitudes,
//! the strain-broadened excited-state lineshape and the contrast×width metric.

mod esodmr;
mod lm;
mod metric;
mod peaks;
mod polarization;
mod spectrum;
pub mod voigt;

pub use esodmr::{esodmr_lineshape, fit_strain_distribution, StrainFit, StrainFitOptions};
pub use metric::{full_width_half_max, resonance_metric, resonance_metric_with_baseline, ResonanceMetric};
pub use peaks::{
    fit_spectrum, model_spectrum, FitOptions, LorentzianPeak, PeakSet, PeakUncertainty, SpectrumFit,
    PINNED_AMPLITUDE,
};
pub use polarization::{polarization_from_amplitudes, PolarizationEstimate};
pub use spectrum::{linear_grid, OdmrSpectrum, MIN_SPECTRUM_POINTS};
