use super::spectrum::OdmrSpectrum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceMetric {
    /// mean_contrast × fwhm, or 0 when flagged.
    pub value: f64,
    pub mean_contrast: f64,
    pub fwhm: f64,
    /// No half-maximum crossing on one side of the peak (flat or truncated trace).
    pub flagged: bool,
}

fn lerp_x(x0: f64, y0: f64, x1: f64, y1: f64, y: f64) -> f64 {
    x0 + (y - y0) * (x1 - x0) / (y1 - y0)
}

/// Full width at half of the maximum above `baseline`, by linear interpolation of the
/// outermost crossings bracketing the maximum. `None` if either side never crosses.
pub fn full_width_half_max(data: &OdmrSpectrum, baseline: f64) -> Option<f64> {
    let f = data.frequency();
    let y: Vec<f64> = data.contrast().iter().map(|c| c - baseline).collect();
    let (k, peak) = y
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    if peak <= 0.0 {
        return None;
    }
    let half = 0.5 * peak;
    let left = (0..k).rev().find(|&j| y[j] <= half).map(|j| lerp_x(f[j], y[j], f[j + 1], y[j + 1], half))?;
    let right = (k + 1..y.len()).find(|&j| y[j] <= half).map(|j| lerp_x(f[j - 1], y[j - 1], f[j], y[j], half))?;
    Some(right - left)
}

/// Mean of the piecewise-linear interpolant over [a, b].
fn interval_mean(f: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    let interp = |x: f64| {
        let j = f.partition_point(|&v| v <= x).clamp(1, f.len() - 1);
        y[j - 1] + (x - f[j - 1]) * (y[j] - y[j - 1]) / (f[j] - f[j - 1])
    };
    let mut xs = vec![a];
    xs.extend(f.iter().cloned().filter(|&v| v > a && v < b));
    xs.push(b);
    let area: f64 = xs.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (interp(w[0]) + interp(w[1]))).sum();
    area / (b - a)
}

/// Mean contrast over `central_range` times the FWHM of the whole trace, with contrast
/// measured from zero.
pub fn resonance_metric(data: &OdmrSpectrum, central_range: (f64, f64)) -> Result<ResonanceMetric> {
    resonance_metric_with_baseline(data, central_range, 0.0)
}

/// [`resonance_metric`] after subtracting a constant `baseline`.
pub fn resonance_metric_with_baseline(
    data: &OdmrSpectrum,
    central_range: (f64, f64),
    baseline: f64,
) -> Result<ResonanceMetric> {
    let (a, b) = central_range;
    let (f0, f1) = data.span();
    if !(a < b && a >= f0 && b <= f1) {
        return Err(Error::InvalidParameter(format!(
            "central range {a}..{b} must be nonempty and inside {f0}..{f1}"
        )));
    }
    let y: Vec<f64> = data.contrast().iter().map(|c| c - baseline).collect();
    let mean_contrast = interval_mean(data.frequency(), &y, a, b);
    match full_width_half_max(data, baseline) {
        Some(fwhm) => Ok(ResonanceMetric {
            value: mean_contrast * fwhm,
            mean_contrast,
            fwhm,
            flagged: false,
        }),
        None => Ok(ResonanceMetric {
            value: 0.0,
            mean_contrast,
            fwhm: 0.0,
            flagged: true,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::super::peaks::{model_spectrum, LorentzianPeak, PeakSet};
    use super::super::spectrum::linear_grid;
    use super::*;

    fn lorentzian(amp: f64, baseline: f64) -> OdmrSpectrum {
        let ps = PeakSet::new(vec![LorentzianPeak::new(1410.0, 30.0, amp)], baseline).unwrap();
        model_spectrum(&ps, &linear_grid(1200.0, 1600.0, 8001)).unwrap()
    }

    #[test]
    fn lorentzian_metric_matches_closed_form() {
        let (amp, w) = (0.05, 30.0);
        let s = lorentzian(amp, 0.0);
        let delta = w / 10.0;
        let m = resonance_metric(&s, (1410.0 - delta, 1410.0 + delta)).unwrap();
        // mean of a·γ²/(x²+γ²) over ±δ is a·(γ/δ)·atan(δ/γ)
        let g = w / 2.0;
        let mean = amp * g / delta * (delta / g).atan();
        assert!((m.mean_contrast / mean - 1.0).abs() < 1e-5);
        assert!((m.fwhm / w - 1.0).abs() < 1e-4);
        assert!((m.value / (mean * w) - 1.0).abs() < 1e-4);
        assert!(!m.flagged);
    }

    #[test]
    fn zero_spectrum_is_flagged_zero() {
        let s = lorentzian(0.0, 0.0);
        let m = resonance_metric(&s, (1400.0, 1420.0)).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(m.flagged);
    }

    #[test]
    fn homogeneous_in_amplitude() {
        let r = (1400.0, 1420.0);
        let a = resonance_metric(&lorentzian(0.02, 0.0), r).unwrap();
        let b = resonance_metric(&lorentzian(0.04, 0.0), r).unwrap();
        assert!((b.value / a.value - 2.0).abs() < 1e-12);
        assert!((b.fwhm - a.fwhm).abs() < 1e-9);
    }

    #[test]
    fn baseline_subtraction_restores_metric() {
        let r = (1400.0, 1420.0);
        let clean = resonance_metric(&lorentzian(0.03, 0.0), r).unwrap();
        for base in [-0.01, 0.004, 0.2] {
            let shifted = resonance_metric_with_baseline(&lorentzian(0.03, base), r, base).unwrap();
            assert!((shifted.value - clean.value).abs() < 1e-12 * clean.value.abs().max(1.0));
        }
    }

    #[test]
    fn range_outside_data_rejected() {
        let s = lorentzian(0.02, 0.0);
        assert!(resonance_metric(&s, (1100.0, 1300.0)).is_err());
        assert!(resonance_metric(&s, (1420.0, 1400.0)).is_err());
    }
}
