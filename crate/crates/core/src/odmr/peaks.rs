use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lm::{self, DEFAULT_MAX_ITERATIONS};
use super::spectrum::OdmrSpectrum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianPeak {
    pub center: f64,
    pub fwhm: f64,
    pub amplitude: f64,
}

impl LorentzianPeak {
    pub fn new(center: f64, fwhm: f64, amplitude: f64) -> Self {
        Self { center, fwhm, amplitude }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center.is_finite() && self.fwhm.is_finite() && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter("non-finite peak parameter".into()));
        }
        if self.fwhm <= 0.0 || self.amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "peak needs fwhm > 0 and amplitude >= 0, got fwhm {} amplitude {}",
                self.fwhm, self.amplitude
            )));
        }
        Ok(())
    }

    /// Peak height `amplitude` at the center, half of it at center ± fwhm/2.
    pub fn value(&self, f: f64) -> f64 {
        let h = 0.25 * self.fwhm * self.fwhm;
        let u = f - self.center;
        self.amplitude * h / (u * u + h)
    }

    /// Derivatives of `value` in (center, fwhm, amplitude).
    fn gradient(&self, f: f64) -> [f64; 3] {
        let h = 0.25 * self.fwhm * self.fwhm;
        let u = f - self.center;
        let den = u * u + h;
        let shape = h / den;
        [
            self.amplitude * 2.0 * u * h / (den * den),
            self.amplitude * u * u / (den * den) * 0.5 * self.fwhm,
            shape,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub peaks: Vec<LorentzianPeak>,
    pub baseline: f64,
}

impl PeakSet {
    pub fn new(peaks: Vec<LorentzianPeak>, baseline: f64) -> Result<Self> {
        let ps = Self { peaks, baseline };
        ps.validate()?;
        Ok(ps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.peaks.is_empty() {
            return Err(Error::InvalidParameter("peak set is empty".into()));
        }
        if !self.baseline.is_finite() {
            return Err(Error::InvalidParameter("non-finite baseline".into()));
        }
        self.peaks.iter().try_for_each(LorentzianPeak::validate)
    }

    pub fn value(&self, f: f64) -> f64 {
        self.baseline + self.peaks.iter().map(|p| p.value(f)).sum::<f64>()
    }

    fn to_params(&self) -> Vec<f64> {
        let mut x = vec![self.baseline];
        for p in &self.peaks {
            x.extend([p.center, p.fwhm, p.amplitude]);
        }
        x
    }

    fn from_params(x: &[f64]) -> Self {
        Self {
            baseline: x[0],
            peaks: x[1..].chunks(3).map(|c| LorentzianPeak::new(c[0], c[1], c[2])).collect(),
        }
    }
}

/// Evaluates the multi-Lorentzian model on `grid`.
pub fn model_spectrum(ps: &PeakSet, grid: &[f64]) -> Result<OdmrSpectrum> {
    ps.validate()?;
    OdmrSpectrum::new(grid.to_vec(), grid.iter().map(|&f| ps.value(f)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakUncertainty {
    pub center: f64,
    pub fwhm: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFit {
    /// Sorted by center.
    pub peaks: PeakSet,
    pub uncertainties: Vec<PeakUncertainty>,
    pub baseline_uncertainty: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Indices (into the sorted peaks) whose amplitude collapsed to zero.
    pub pinned: Vec<usize>,
}

impl SpectrumFit {
    pub fn amplitudes(&self) -> Vec<f64> {
        self.peaks.peaks.iter().map(|p| p.amplitude).collect()
    }

    pub fn amplitude_uncertainties(&self) -> Vec<f64> {
        self.uncertainties.iter().map(|u| u.amplitude).collect()
    }
}

/// Relative amplitude below which a fitted peak counts as absent.
pub const PINNED_AMPLITUDE: f64 = 1e-3;

/// Local maxima ranked by topographic prominence, most prominent first.
pub(crate) fn prominent_maxima(y: &[f64]) -> Vec<(usize, f64)> {
    let n = y.len();
    let mut out = Vec::new();
    for k in 0..n {
        let left_ok = k == 0 || y[k] > y[k - 1];
        let right_ok = k + 1 == n || y[k] >= y[k + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let mut lmin = y[k];
        let mut j = k;
        while j > 0 {
            j -= 1;
            if y[j] > y[k] {
                break;
            }
            lmin = lmin.min(y[j]);
        }
        let mut rmin = y[k];
        let mut j = k;
        while j + 1 < n {
            j += 1;
            if y[j] > y[k] {
                break;
            }
            rmin = rmin.min(y[j]);
        }
        out.push((k, y[k] - lmin.max(rmin)));
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

fn percentile(v: &[f64], q: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s[((s.len() - 1) as f64 * q).round() as usize]
}

fn seed_peaks(data: &OdmrSpectrum, n_peaks: usize) -> PeakSet {
    let f = data.frequency();
    let y = data.contrast();
    let (f0, f1) = data.span();
    let baseline = percentile(y, 0.1);
    let width = (f1 - f0) / (4 * n_peaks) as f64;
    let mut peaks: Vec<LorentzianPeak> = prominent_maxima(y)
        .into_iter()
        .take(n_peaks)
        .map(|(k, _)| LorentzianPeak::new(f[k], width, (y[k] - baseline).max(0.0)))
        .collect();
    // Too few maxima: place the rest where they are farthest from existing seeds.
    while peaks.len() < n_peaks {
        let k = (0..f.len())
            .max_by(|&a, &b| {
                let da = peaks.iter().map(|p| (f[a] - p.center).abs()).fold(f64::INFINITY, f64::min);
                let db = peaks.iter().map(|p| (f[b] - p.center).abs()).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db)
            })
            .expect("spectrum is nonempty");
        peaks.push(LorentzianPeak::new(f[k], width, (y[k] - baseline).max(0.0)));
    }
    PeakSet { peaks, baseline }
}

/// Least-squares fit of `n_peaks` Lorentzians plus a constant baseline.
///
/// Without `init`, centers start at the most prominent local maxima and widths at
/// span/(4·n_peaks). Non-convergence is reported through `converged` with the best
/// parameters found.
pub fn fit_spectrum(
    data: &OdmrSpectrum,
    n_peaks: usize,
    init: Option<&PeakSet>,
    opts: FitOptions,
) -> Result<SpectrumFit> {
    if n_peaks == 0 {
        return Err(Error::InvalidParameter("n_peaks must be at least 1".into()));
    }
    if data.len() <= 3 * n_peaks + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} points cannot constrain {} peaks",
            data.len(),
            n_peaks
        )));
    }
    let seed = match init {
        Some(ps) => {
            ps.validate()?;
            if ps.peaks.len() != n_peaks {
                return Err(Error::InvalidParameter(format!(
                    "initial guess has {} peaks, expected {n_peaks}",
                    ps.peaks.len()
                )));
            }
            ps.clone()
        }
        None => seed_peaks(data, n_peaks),
    };

    let f = data.frequency();
    let y = data.contrast();
    let (f0, f1) = data.span();
    let span = f1 - f0;
    let mut lo = vec![f64::NEG_INFINITY];
    let mut hi = vec![f64::INFINITY];
    for _ in 0..n_peaks {
        lo.extend([f0, 1e-9 * span, 0.0]);
        hi.extend([f1, span, f64::INFINITY]);
    }

    let model = |x: &[f64]| {
        let ps = PeakSet::from_params(x);
        let r = DVector::from_iterator(f.len(), f.iter().zip(y).map(|(&fi, &yi)| ps.value(fi) - yi));
        let mut j = DMatrix::zeros(f.len(), x.len());
        for (i, &fi) in f.iter().enumerate() {
            j[(i, 0)] = 1.0;
            for (k, p) in ps.peaks.iter().enumerate() {
                let g = p.gradient(fi);
                for (c, gv) in g.iter().enumerate() {
                    j[(i, 1 + 3 * k + c)] = *gv;
                }
            }
        }
        (r, j)
    };
    let out = lm::minimize(model, &seed.to_params(), &lo, &hi, opts.max_iterations);
    let sigma = out.uncertainties(&lo, &hi);

    let fitted = PeakSet::from_params(&out.x);
    let mut order: Vec<usize> = (0..n_peaks).collect();
    order.sort_by(|&a, &b| fitted.peaks[a].center.total_cmp(&fitted.peaks[b].center));
    let peaks: Vec<LorentzianPeak> = order.iter().map(|&k| fitted.peaks[k]).collect();
    let uncertainties = order
        .iter()
        .map(|&k| PeakUncertainty {
            center: sigma[1 + 3 * k],
            fwhm: sigma[2 + 3 * k],
            amplitude: sigma[3 + 3 * k],
        })
        .collect();
    let amax = peaks.iter().map(|p| p.amplitude).fold(0.0, f64::max);
    let pinned = peaks
        .iter()
        .enumerate()
        .filter(|(_, p)| p.amplitude <= PINNED_AMPLITUDE * amax)
        .map(|(k, _)| k)
        .collect();

    Ok(SpectrumFit {
        peaks: PeakSet {
            peaks,
            baseline: fitted.baseline,
        },
        uncertainties,
        baseline_uncertainty: sigma[0],
        residual_norm: out.residual_norm(),
        iterations: out.iterations,
        converged: out.converged,
        pinned,
    })
}
