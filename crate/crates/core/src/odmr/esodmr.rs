use nalgebra::{DMatrix, DVector};

use super::lm::{self, DEFAULT_MAX_ITERATIONS};
use super::metric::full_width_half_max;
use super::spectrum::OdmrSpectrum;
use super::voigt::voigt;
use crate::error::{Error, Result};
use crate::sweep::StrainDistribution;
use std::f64::consts::PI;

// Below this fraction of the Lorentzian half-width the strain broadening is dropped.
const SIGMA_NEGLIGIBLE: f64 = 1e-8;

/// Zero-field excited-state resonance at offset `x = f − d_es` (MHz): Lorentzians of unit
/// peak height at ±E averaged over E ~ Normal(mean, sigma). Returns the value and its
/// derivatives in `x` and `sigma`.
fn profile(x: f64, mean: f64, sigma: f64, gamma: f64) -> (f64, f64, f64) {
    if sigma <= SIGMA_NEGLIGIBLE * gamma {
        let g2 = gamma * gamma;
        let l = |u: f64| (g2 / (u * u + g2), -2.0 * u * g2 / (u * u + g2).powi(2));
        let (a, da) = l(x - mean);
        let (b, db) = l(x + mean);
        return (0.5 * (a + b), 0.5 * (da + db), 0.0);
    }
    let (a, ax, as_) = voigt(x - mean, sigma, gamma);
    let (b, bx, bs) = voigt(x + mean, sigma, gamma);
    let k = 0.5 * PI * gamma;
    (k * (a + b), k * (ax + bx), k * (as_ + bs))
}

fn check_lineshape_args(d_es: f64, natural_fwhm: f64) -> Result<()> {
    if !d_es.is_finite() || !(natural_fwhm.is_finite() && natural_fwhm > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lineshape needs finite d_es and natural_fwhm > 0, got {d_es}, {natural_fwhm}"
        )));
    }
    Ok(())
}

/// Zero-field ESODMR lineshape on `grid`, peak-normalized so a strain-free line has height 1.
///
/// The resonances sit at d_es ± E. The Lorentzian of width `natural_fwhm` convolved with the
/// Gaussian strain density is a Voigt profile, evaluated in closed form; `n_quadrature` of the
/// distribution is not needed here.
pub fn esodmr_lineshape(
    dist: &StrainDistribution,
    d_es: f64,
    natural_fwhm: f64,
    grid: &[f64],
) -> Result<OdmrSpectrum> {
    dist.validate()?;
    check_lineshape_args(d_es, natural_fwhm)?;
    let gamma = 0.5 * natural_fwhm;
    let c = grid.iter().map(|&f| profile(f - d_es, dist.mean, dist.sigma, gamma).0).collect();
    OdmrSpectrum::new(grid.to_vec(), c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainFitOptions {
    pub fit_d_es: bool,
    pub max_iterations: usize,
}

impl Default for StrainFitOptions {
    fn default() -> Self {
        Self {
            fit_d_es: false,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrainFit {
    /// Mean fixed at zero.
    pub distribution: StrainDistribution,
    pub sigma_uncertainty: f64,
    pub amplitude: f64,
    pub amplitude_uncertainty: f64,
    pub d_es: f64,
    /// NaN when `d_es` was held fixed.
    pub d_es_uncertainty: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sigma collapsed onto its zero bound.
    pub sigma_at_zero: bool,
    /// Amplitude vanished, so sigma carries no information.
    pub unidentifiable: bool,
}

/// Fits `amplitude · esodmr_lineshape(Normal(0, sigma))` to a zero-field spectrum.
pub fn fit_strain_distribution(
    data: &OdmrSpectrum,
    d_es: f64,
    natural_fwhm: f64,
    opts: StrainFitOptions,
) -> Result<StrainFit> {
    check_lineshape_args(d_es, natural_fwhm)?;
    let f = data.frequency();
    let y = data.contrast();
    let (f0, f1) = data.span();
    let gamma = 0.5 * natural_fwhm;

    let (kmax, ymax) = y
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    // Gaussian width from the Voigt width relation fV ≈ 0.5346 fL + √(0.2166 fL² + fG²).
    let sigma0 = full_width_half_max(data, 0.0)
        .map(|fv| {
            let t = fv - 0.5346 * natural_fwhm;
            let fg2 = t * t - 0.2166 * natural_fwhm * natural_fwhm;
            fg2.max(0.0).sqrt() / (8.0 * 2f64.ln()).sqrt()
        })
        .unwrap_or(gamma)
        .max(0.25 * natural_fwhm);
    let d0 = if opts.fit_d_es { f[kmax] } else { d_es };

    let mut x0 = vec![sigma0, ymax.max(0.0)];
    let mut lo = vec![0.0, 0.0];
    let mut hi = vec![f1 - f0, f64::INFINITY];
    if opts.fit_d_es {
        x0.push(d0);
        lo.push(f0);
        hi.push(f1);
    }

    let model = |x: &[f64]| {
        let (sigma, amp) = (x[0], x[1]);
        let d = if opts.fit_d_es { x[2] } else { d_es };
        let mut r = DVector::zeros(f.len());
        let mut j = DMatrix::zeros(f.len(), x.len());
        for (i, (&fi, &yi)) in f.iter().zip(y).enumerate() {
            let (s, ds_dx, ds_dsigma) = profile(fi - d, 0.0, sigma, gamma);
            r[i] = amp * s - yi;
            j[(i, 0)] = amp * ds_dsigma;
            j[(i, 1)] = s;
            if opts.fit_d_es {
                j[(i, 2)] = -amp * ds_dx;
            }
        }
        (r, j)
    };
    let out = lm::minimize(model, &x0, &lo, &hi, opts.max_iterations);
    let unc = out.uncertainties(&lo, &hi);
    let (sigma, amplitude) = (out.x[0], out.x[1]);
    let ymag = y.iter().map(|v| v.abs()).fold(0.0, f64::max);

    Ok(StrainFit {
        distribution: StrainDistribution::new(0.0, sigma),
        sigma_uncertainty: unc[0],
        amplitude,
        amplitude_uncertainty: unc[1],
        d_es: if opts.fit_d_es { out.x[2] } else { d_es },
        d_es_uncertainty: if opts.fit_d_es { unc[2] } else { f64::NAN },
        residual_norm: out.residual_norm(),
        iterations: out.iterations,
        converged: out.converged,
        sigma_at_zero: sigma < 1e-3 * natural_fwhm,
        unidentifiable: amplitude <= 1e-9 * ymag,
    })
}

#[cfg(test)]
mod tests {
    use super::super::spectrum::linear_grid;
    use super::*;

    fn grid() -> Vec<f64> {
        linear_grid(1000.0, 1800.0, 1601)
    }

    fn peak_at(s: &OdmrSpectrum, f: f64) -> f64 {
        let k = s.frequency().iter().position(|&x| (x - f).abs() < 1e-9).unwrap();
        s.contrast()[k]
    }

    #[test]
    fn zero_strain_is_single_lorentzian() {
        let s = esodmr_lineshape(&StrainDistribution::new(0.0, 0.0), 1400.0, 20.0, &grid()).unwrap();
        assert!((peak_at(&s, 1400.0) - 1.0).abs() < 1e-15);
        assert!((peak_at(&s, 1410.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fixed_strain_splits_line() {
        let s = esodmr_lineshape(&StrainDistribution::new(100.0, 0.0), 1400.0, 10.0, &grid()).unwrap();
        let a = peak_at(&s, 1300.0);
        let b = peak_at(&s, 1500.0);
        assert!((a - b).abs() < 1e-15);
        assert!(a > 0.49 && a < 0.51);
        assert!(peak_at(&s, 1400.0) < 0.01);
    }

    #[test]
    fn matches_brute_force_quadrature() {
        let (mean, sigma, fwhm) = (15.0, 40.0, 12.0);
        let s = esodmr_lineshape(&StrainDistribution::new(mean, sigma), 1400.0, fwhm, &grid()).unwrap();
        let g2 = 0.25 * fwhm * fwhm;
        for f in [1300.0, 1385.0, 1400.0, 1452.5] {
            let n = 100_000;
            let h = 16.0 / n as f64;
            let mut acc = 0.0;
            for k in 0..=n {
                let t = -8.0 + h * k as f64;
                let e = mean + sigma * t;
                let w = (-0.5 * t * t).exp() / (2.0 * PI).sqrt() * if k == 0 || k == n { 0.5 } else { 1.0 };
                let x = f - 1400.0;
                acc += w * 0.5 * (g2 / ((x - e).powi(2) + g2) + g2 / ((x + e).powi(2) + g2));
            }
            acc *= h;
            assert!((peak_at(&s, f) - acc).abs() < 1e-9, "f={f}: {} vs {acc}", peak_at(&s, f));
        }
    }

    #[test]
    fn width_grows_with_sigma() {
        let mut last = 0.0;
        for sigma in [0.0, 10.0, 30.0, 100.0] {
            let s = esodmr_lineshape(&StrainDistribution::new(0.0, sigma), 1400.0, 20.0, &grid()).unwrap();
            let w = full_width_half_max(&s, 0.0).unwrap();
            assert!(w >= last, "sigma {sigma}: {w} < {last}");
            last = w;
        }
    }

    #[test]
    fn noiseless_sigma_round_trip() {
        for sigma in [5.0, 20.0, 50.0, 120.0, 200.0] {
            let truth = esodmr_lineshape(&StrainDistribution::new(0.0, sigma), 1420.0, 20.0, &grid()).unwrap();
            let data = truth.with_contrast(truth.contrast().iter().map(|c| 0.07 * c).collect()).unwrap();
            let fit = fit_strain_distribution(&data, 1420.0, 20.0, StrainFitOptions::default()).unwrap();
            assert!(fit.converged);
            assert!((fit.distribution.sigma / sigma - 1.0).abs() < 1e-6, "{sigma}: {}", fit.distribution.sigma);
            assert!((fit.amplitude / 0.07 - 1.0).abs() < 1e-6);
            assert!(!fit.sigma_at_zero && !fit.unidentifiable);
        }
    }

    #[test]
    fn free_d_es_recovered() {
        let truth = esodmr_lineshape(&StrainDistribution::new(0.0, 60.0), 1425.0, 20.0, &grid()).unwrap();
        let opts = StrainFitOptions { fit_d_es: true, ..Default::default() };
        let fit = fit_strain_distribution(&truth, 1400.0, 20.0, opts).unwrap();
        assert!((fit.d_es - 1425.0).abs() < 1e-6);
        assert!((fit.distribution.sigma - 60.0).abs() < 1e-6);
        assert!(fit.d_es_uncertainty.is_finite());
    }

    #[test]
    fn strain_free_line_pins_sigma() {
        let truth = esodmr_lineshape(&StrainDistribution::new(0.0, 0.0), 1400.0, 20.0, &grid()).unwrap();
        let fit = fit_strain_distribution(&truth, 1400.0, 20.0, StrainFitOptions::default()).unwrap();
        assert!(fit.sigma_at_zero, "sigma {}", fit.distribution.sigma);
    }

    #[test]
    fn flat_spectrum_is_unidentifiable() {
        let g = grid();
        let data = OdmrSpectrum::new(g.clone(), vec![0.0; g.len()]).unwrap();
        let fit = fit_strain_distribution(&data, 1400.0, 20.0, StrainFitOptions::default()).unwrap();
        assert_eq!(fit.amplitude, 0.0);
        assert!(fit.unidentifiable);
    }
}
