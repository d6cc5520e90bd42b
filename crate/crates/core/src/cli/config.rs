//! TOML run configuration. Every physical quantity carries its unit in the key name.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::model::{calibrate_pump, DissipationParams, HyperfineTensor, NVSystemParams, HYPERFINE_MHZ};
use crate::odmr::{LorentzianPeak, OdmrSpectrum, PeakSet};
use crate::spinops::SpinQuantumNumber;
use crate::sweep::{Axis, StrainDistribution, SweepParameter, TemperatureRow, DEFAULT_QUADRATURE_NODES};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub dissipation: DissipationSection,
    pub sweep_b: Option<SweepBSection>,
    pub scan_2d: Option<Scan2dSection>,
    pub temperature: Option<TemperatureSection>,
    pub fit_odmr: Option<FitOdmrSection>,
    pub fit_strain: Option<FitStrainSection>,
    pub synth: Option<SynthSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub d_es_mhz: Option<f64>,
    pub e_es_mhz: Option<f64>,
    pub b_gauss: Option<[f64; 3]>,
    pub b_axial_gauss: Option<f64>,
    pub gamma_e_mhz_per_gauss: Option<f64>,
    pub gamma_n_mhz_per_gauss: Option<f64>,
    pub nuclear_spin: Option<f64>,
    pub hyperfine: Option<HyperfineSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperfineSection {
    pub a_par_mhz: Option<f64>,
    pub a_perp_mhz: Option<f64>,
    /// Rows index the nuclear spin component.
    pub tensor_mhz: Option<[[f64; 3]; 3]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationSection {
    pub pump_rate_per_us: Option<f64>,
    pub pump_leak_ratio: Option<f64>,
    pub t1_electron_us: Option<f64>,
    pub t1_nuclear_us: Option<f64>,
    /// Solve the leak ratio for this zero-field electron polarization instead.
    pub calibrate_electron_polarization: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBSection {
    pub start_gauss: f64,
    pub stop_gauss: f64,
    pub count: usize,
    #[serde(default)]
    pub checkpoint: bool,
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan2dSection {
    pub b_start_gauss: f64,
    pub b_stop_gauss: f64,
    pub b_count: usize,
    pub e_start_mhz: f64,
    pub e_stop_mhz: f64,
    pub e_count: usize,
    #[serde(default)]
    pub checkpoint: bool,
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSection {
    pub n_quadrature: Option<usize>,
    pub rows: Vec<TemperatureRowConfig>,
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureRowConfig {
    pub temperature_k: f64,
    pub sigma_mhz: f64,
    #[serde(default)]
    pub mean_mhz: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOdmrSection {
    pub spectrum: PathBuf,
    pub n_peaks: usize,
    #[serde(default)]
    pub negate: bool,
    pub window_mhz: Option<[f64; 2]>,
    /// Sublevel assignment of the fitted peaks in ascending center order.
    pub m_values: Option<Vec<f64>>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitStrainSection {
    pub spectrum: PathBuf,
    pub d_es_mhz: f64,
    pub natural_fwhm_mhz: f64,
    #[serde(default)]
    pub fit_d_es: bool,
    #[serde(default)]
    pub negate: bool,
    pub window_mhz: Option<[f64; 2]>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub start_mhz: f64,
    pub stop_mhz: f64,
    pub count: usize,
    #[serde(default)]
    pub noise: f64,
    #[serde(default = "default_synth_output")]
    pub output: String,
    pub odmr: Option<SynthOdmr>,
    pub esodmr: Option<SynthEsodmr>,
}

fn default_synth_output() -> String {
    "synth.txt".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthOdmr {
    #[serde(default)]
    pub baseline: f64,
    pub peaks: Vec<SynthPeak>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthPeak {
    pub center_mhz: f64,
    pub fwhm_mhz: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthEsodmr {
    pub d_es_mhz: f64,
    pub natural_fwhm_mhz: f64,
    pub sigma_mhz: f64,
    #[serde(default)]
    pub mean_mhz: f64,
    pub amplitude: f64,
}

/// Config problem: bad syntax, unknown key, invalid value or missing input.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<crate::Error> for ConfigError {
    fn from(e: crate::Error) -> Self {
        ConfigError(e.to_string())
    }
}

type CResult<T> = std::result::Result<T, ConfigError>;

fn spin_from_f64(s: f64) -> CResult<SpinQuantumNumber> {
    let two_s = 2.0 * s;
    if !(two_s >= 1.0 && two_s.fract() == 0.0 && two_s <= 16.0) {
        return Err(ConfigError(format!("nuclear_spin must be a positive multiple of 1/2, got {s}")));
    }
    Ok(SpinQuantumNumber::from_two_s(two_s as u32)?)
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> CResult<&'a T> {
    s.as_ref().ok_or_else(|| ConfigError(format!("config has no [{name}] section")))
}

impl RunConfig {
    pub fn parse(text: &str) -> CResult<Self> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn load(path: &Path) -> CResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn system(&self) -> CResult<NVSystemParams> {
        let s = &self.system;
        let mut p = NVSystemParams::default();
        if let Some(v) = s.d_es_mhz {
            p.d_es = v;
        }
        if let Some(v) = s.e_es_mhz {
            p.e_es = v;
        }
        match (s.b_gauss, s.b_axial_gauss) {
            (Some(_), Some(_)) => return Err(ConfigError("set either b_gauss or b_axial_gauss, not both".into())),
            (Some(b), None) => p.b_field = b,
            (None, Some(bz)) => p.b_field = [0.0, 0.0, bz],
            (None, None) => {}
        }
        if let Some(v) = s.gamma_e_mhz_per_gauss {
            p.gamma_e = v;
        }
        if let Some(v) = s.gamma_n_mhz_per_gauss {
            p.gamma_n = v;
        }
        if let Some(v) = s.nuclear_spin {
            p.nuclear_spin = spin_from_f64(v)?;
        }
        if let Some(h) = &s.hyperfine {
            p.hyperfine = match (h.tensor_mhz, h.a_par_mhz, h.a_perp_mhz) {
                (Some(t), None, None) => HyperfineTensor::Full(t),
                (Some(_), _, _) => {
                    return Err(ConfigError("hyperfine: tensor_mhz excludes a_par_mhz/a_perp_mhz".into()))
                }
                (None, par, perp) => HyperfineTensor::Axial {
                    a_par: par.unwrap_or(HYPERFINE_MHZ),
                    a_perp: perp.unwrap_or(HYPERFINE_MHZ),
                },
            };
        }
        p.validate()?;
        Ok(p)
    }

    /// Dissipation parameters, with the leak ratio calibrated when requested.
    pub fn dissipation(&self, system: &NVSystemParams) -> CResult<DissipationParams> {
        let s = &self.dissipation;
        let mut d = DissipationParams::default();
        if let Some(v) = s.pump_rate_per_us {
            d.pump_rate = v;
        }
        if let Some(v) = s.pump_leak_ratio {
            d.pump_leak_ratio = v;
        }
        if let Some(v) = s.t1_electron_us {
            d.t1_electron = v;
        }
        if let Some(v) = s.t1_nuclear_us {
            d.t1_nuclear = v;
        }
        d.validate()?;
        if let Some(target) = s.calibrate_electron_polarization {
            if s.pump_leak_ratio.is_some() {
                return Err(ConfigError(
                    "pump_leak_ratio and calibrate_electron_polarization are mutually exclusive".into(),
                ));
            }
            d = calibrate_pump(target, &d, system)?;
        }
        Ok(d)
    }

    pub fn sweep_b_axis(&self) -> CResult<(Axis, &SweepBSection)> {
        let s = section(&self.sweep_b, "sweep_b")?;
        let a = Axis::new(SweepParameter::BAxialGauss, s.start_gauss, s.stop_gauss, s.count);
        a.validate()?;
        Ok((a, s))
    }

    pub fn scan_2d_axes(&self) -> CResult<(Axis, Axis, &Scan2dSection)> {
        let s = section(&self.scan_2d, "scan_2d")?;
        let b = Axis::new(SweepParameter::BAxialGauss, s.b_start_gauss, s.b_stop_gauss, s.b_count);
        let e = Axis::new(SweepParameter::EEsMhz, s.e_start_mhz, s.e_stop_mhz, s.e_count);
        b.validate()?;
        e.validate()?;
        Ok((b, e, s))
    }

    pub fn temperature_table(&self) -> CResult<(Vec<TemperatureRow>, &TemperatureSection)> {
        let s = section(&self.temperature, "temperature")?;
        if s.rows.is_empty() {
            return Err(ConfigError("[temperature] needs at least one row".into()));
        }
        let n = s.n_quadrature.unwrap_or(DEFAULT_QUADRATURE_NODES);
        let rows = s
            .rows
            .iter()
            .map(|r| {
                let distribution = StrainDistribution::new(r.mean_mhz, r.sigma_mhz).with_nodes(n);
                distribution.validate()?;
                Ok(TemperatureRow {
                    temperature: r.temperature_k,
                    distribution,
                })
            })
            .collect::<CResult<_>>()?;
        Ok((rows, s))
    }

    pub fn synth_section(&self) -> CResult<&SynthSection> {
        let s = section(&self.synth, "synth")?;
        if s.odmr.is_some() == s.esodmr.is_some() {
            return Err(ConfigError("[synth] needs exactly one of [synth.odmr] or [synth.esodmr]".into()));
        }
        if !(s.noise.is_finite() && s.noise >= 0.0) {
            return Err(ConfigError(format!("synth noise must be >= 0, got {}", s.noise)));
        }
        if s.output.is_empty() || Path::new(&s.output).file_name().map(|n| n != s.output.as_str()).unwrap_or(true) {
            return Err(ConfigError(format!("synth output must be a plain file name, got '{}'", s.output)));
        }
        if let Some(o) = &s.odmr {
            synth_peaks(o)?;
        }
        if let Some(e) = &s.esodmr {
            StrainDistribution::new(e.mean_mhz, e.sigma_mhz).validate()?;
            if !(e.natural_fwhm_mhz > 0.0) || !(e.amplitude >= 0.0) {
                return Err(ConfigError("synth.esodmr needs natural_fwhm_mhz > 0 and amplitude >= 0".into()));
            }
        }
        Ok(s)
    }
}

pub fn synth_peaks(o: &SynthOdmr) -> CResult<PeakSet> {
    Ok(PeakSet::new(
        o.peaks
            .iter()
            .map(|p| LorentzianPeak::new(p.center_mhz, p.fwhm_mhz, p.amplitude))
            .collect(),
        o.baseline,
    )?)
}

/// Loads a spectrum named in the config, resolving relative paths against `base`, and
/// optionally crops it to a frequency window.
pub fn load_spectrum(base: &Path, path: &Path, negate: bool, window: Option<[f64; 2]>) -> CResult<OdmrSpectrum> {
    let full = if path.is_absolute() { path.to_path_buf() } else { base.join(path) };
    let s = OdmrSpectrum::read(&full, negate)?;
    match window {
        None => Ok(s),
        Some([lo, hi]) => {
            let (f, c): (Vec<f64>, Vec<f64>) = s
                .frequency()
                .iter()
                .zip(s.contrast())
                .filter(|(f, _)| **f >= lo && **f <= hi)
                .map(|(f, c)| (*f, *c))
                .unzip();
            Ok(OdmrSpectrum::new(f, c)?)
        }
    }
}
