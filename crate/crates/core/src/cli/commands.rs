use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::config::{load_spectrum, synth_peaks, ConfigError, RunConfig};
use super::CliError;
use crate::model::{simulate, DissipationParams, NVSystemParams};
use crate::odmr::{
    esodmr_lineshape, fit_spectrum, fit_strain_distribution, linear_grid, model_spectrum, polarization_from_amplitudes,
    FitOptions, OdmrSpectrum, StrainFitOptions,
};
use crate::sweep::{
    run_sweep, temperature_curve, StrainDistribution, SweepOptions, SweepResult, SweepSpec, TemperaturePoint,
};

/// Files produced by a command, in write order, plus a deferred failure.
pub(crate) struct Outputs {
    pub files: Vec<(String, String)>,
    pub failure: Option<CliError>,
}

impl Outputs {
    fn ok(files: Vec<(String, String)>) -> Self {
        Self { files, failure: None }
    }
}

pub(crate) struct Context {
    pub config: RunConfig,
    pub config_dir: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
}

fn physics(cfg: &RunConfig) -> Result<(NVSystemParams, DissipationParams), ConfigError> {
    let p = cfg.system()?;
    let d = cfg.dissipation(&p)?;
    Ok((p, d))
}

#[derive(Serialize)]
struct SteadyReport {
    nuclear_polarization: f64,
    electron_polarization: f64,
    residual_norm: f64,
    null_space_dim: usize,
    pump_leak_ratio: f64,
    dims: [usize; 2],
    rho_real: Vec<Vec<f64>>,
    rho_imag: Vec<Vec<f64>>,
}

pub(crate) fn steady(ctx: &Context) -> Result<Outputs, CliError> {
    let (p, d) = physics(&ctx.config)?;
    let sim = simulate(&p, &d).map_err(CliError::numerical)?;
    let m = sim.report.rho.matrix();
    let n = m.nrows();
    let report = SteadyReport {
        nuclear_polarization: sim.nuclear_polarization,
        electron_polarization: sim.electron_polarization,
        residual_norm: sim.report.residual_norm,
        null_space_dim: sim.report.null_space_dim,
        pump_leak_ratio: d.pump_leak_ratio,
        dims: p.dims(),
        rho_real: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
        rho_imag: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    Ok(Outputs::ok(vec![("steady.json".into(), json)]))
}

fn sweep_csv(r: &SweepResult, axis_names: &[&str]) -> String {
    let mut s = String::new();
    for name in axis_names {
        s.push_str(name);
        s.push(',');
    }
    s.push_str("nuclear_polarization,electron_polarization,residual,status\n");
    for p in &r.points {
        write!(s, "{:?},", p.axis1).unwrap();
        if let Some(v) = p.axis2 {
            write!(s, "{v:?},").unwrap();
        }
        writeln!(s, "{:?},{:?},{:?},{}", p.nuclear, p.electron, p.residual, p.status.label()).unwrap();
    }
    s
}

fn partial_failure(failed: usize, total: usize) -> Option<CliError> {
    (2 * failed >= total && failed > 0).then_some(CliError::PartialSweep { failed, total })
}

fn checkpoint_path(ctx: &Context, enabled: bool, name: &str) -> Result<Option<PathBuf>, CliError> {
    if !enabled {
        return Ok(None);
    }
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", ctx.out_dir.display())))?;
    Ok(Some(ctx.out_dir.join(name)))
}

pub(crate) fn sweep_b(ctx: &Context) -> Result<Outputs, CliError> {
    let (p, d) = physics(&ctx.config)?;
    let (axis, sec) = ctx.config.sweep_b_axis()?;
    let spec = SweepSpec::one_axis(p, d, axis);
    let opts = SweepOptions {
        threads: None,
        checkpoint: checkpoint_path(ctx, sec.checkpoint, "sweep_b.ckpt")?,
    };
    let r = run_sweep(&spec, &opts).map_err(CliError::numerical)?;
    let mut files = vec![("sweep_b.csv".to_string(), sweep_csv(&r, &["b_axial_gauss"]))];
    if sec.plot {
        let mut dat = String::from("# b_axial_gauss nuclear_polarization\n");
        for pt in &r.points {
            writeln!(dat, "{:?} {:?}", pt.axis1, pt.nuclear).unwrap();
        }
        files.push(("sweep_b.dat".into(), dat));
    }
    Ok(Outputs {
        files,
        failure: partial_failure(r.failed_count(), r.points.len()),
    })
}

pub(crate) fn scan_2d(ctx: &Context) -> Result<Outputs, CliError> {
    let (p, d) = physics(&ctx.config)?;
    let (b, e, sec) = ctx.config.scan_2d_axes()?;
    let spec = SweepSpec::two_axes(p, d, b, e);
    let opts = SweepOptions {
        threads: None,
        checkpoint: checkpoint_path(ctx, sec.checkpoint, "scan_2d.ckpt")?,
    };
    let r = run_sweep(&spec, &opts).map_err(CliError::numerical)?;
    let mut files = vec![("scan_2d.csv".to_string(), sweep_csv(&r, &["b_axial_gauss", "e_es_mhz"]))];
    if sec.plot {
        let mut dat = String::from("# b_axial_gauss e_es_mhz nuclear_polarization\n");
        let (_, n2) = r.shape();
        for (k, pt) in r.points.iter().enumerate() {
            if k > 0 && k % n2 == 0 {
                dat.push('\n');
            }
            writeln!(dat, "{:?} {:?} {:?}", pt.axis1, pt.axis2.unwrap_or(f64::NAN), pt.nuclear).unwrap();
        }
        files.push(("scan_2d.dat".into(), dat));
    }
    Ok(Outputs {
        files,
        failure: partial_failure(r.failed_count(), r.points.len()),
    })
}

pub(crate) fn temperature(ctx: &Context) -> Result<Outputs, CliError> {
    let (p, d) = physics(&ctx.config)?;
    let (rows, sec) = ctx.config.temperature_table()?;
    let curve: Vec<TemperaturePoint> = temperature_curve(&p, &d, &rows).map_err(CliError::numerical)?;
    let mut csv = String::from(
        "temperature_k,mean_mhz,sigma_mhz,nuclear_polarization,electron_polarization,residual,status\n",
    );
    let mut dat = String::from("# temperature_k nuclear_polarization\n");
    let mut failed = 0;
    for pt in &curve {
        let dist = pt.distribution;
        let (n, e, r, status) = match &pt.outcome {
            Ok(a) => (a.nuclear, a.electron, a.max_residual, "ok".to_string()),
            Err(err) => {
                failed += 1;
                (f64::NAN, f64::NAN, f64::NAN, format!("failed:{}", err.kind()))
            }
        };
        writeln!(csv, "{:?},{:?},{:?},{n:?},{e:?},{r:?},{status}", pt.temperature, dist.mean, dist.sigma).unwrap();
        writeln!(dat, "{:?} {n:?}", pt.temperature).unwrap();
    }
    let mut files = vec![("temperature.csv".to_string(), csv)];
    if sec.plot {
        files.push(("temperature.dat".into(), dat));
    }
    Ok(Outputs {
        files,
        failure: partial_failure(failed, curve.len()),
    })
}

fn report_line(s: &mut String, name: &str, value: f64, unc: Option<f64>) {
    match unc {
        Some(u) => writeln!(s, "{name}\t{value:?}\t{u:?}").unwrap(),
        None => writeln!(s, "{name}\t{value:?}").unwrap(),
    }
}

pub(crate) fn fit_odmr(ctx: &Context) -> Result<Outputs, CliError> {
    let sec = ctx
        .config
        .fit_odmr
        .as_ref()
        .ok_or_else(|| ConfigError("config has no [fit_odmr] section".into()))?;
    let p = ctx.config.system()?;
    if let Some(m) = &sec.m_values {
        if m.len() != sec.n_peaks {
            return Err(ConfigError(format!("m_values has {} entries for {} peaks", m.len(), sec.n_peaks)).into());
        }
    }
    let data = load_spectrum(&ctx.config_dir, &sec.spectrum, sec.negate, sec.window_mhz)?;
    let opts = FitOptions {
        max_iterations: sec.max_iterations.unwrap_or(FitOptions::default().max_iterations),
    };
    let fit = fit_spectrum(&data, sec.n_peaks, None, opts).map_err(|e| CliError::Config(e.to_string()))?;

    let mut s = String::from("# nvdnp fit-odmr report\n# parameter\tvalue\tuncertainty\n");
    writeln!(s, "converged\t{}", fit.converged).unwrap();
    writeln!(s, "iterations\t{}", fit.iterations).unwrap();
    report_line(&mut s, "residual_norm", fit.residual_norm, None);
    report_line(&mut s, "baseline", fit.peaks.baseline, Some(fit.baseline_uncertainty));
    for (k, (pk, u)) in fit.peaks.peaks.iter().zip(&fit.uncertainties).enumerate() {
        report_line(&mut s, &format!("peak{}.center_mhz", k + 1), pk.center, Some(u.center));
        report_line(&mut s, &format!("peak{}.fwhm_mhz", k + 1), pk.fwhm, Some(u.fwhm));
        report_line(&mut s, &format!("peak{}.amplitude", k + 1), pk.amplitude, Some(u.amplitude));
    }
    let pinned: Vec<String> = fit.pinned.iter().map(|k| format!("peak{}", k + 1)).collect();
    writeln!(s, "pinned\t{}", if pinned.is_empty() { "none".into() } else { pinned.join(",") }).unwrap();

    let mut failure = None;
    if let Some(m) = &sec.m_values {
        match polarization_from_amplitudes(&fit.amplitudes(), m, p.nuclear_spin, Some(&fit.amplitude_uncertainties())) {
            Ok(est) => report_line(&mut s, "polarization", est.p, Some(est.uncertainty)),
            Err(e) => {
                writeln!(s, "polarization\tundefined").unwrap();
                failure = Some(CliError::numerical(e));
            }
        }
    }
    if !fit.converged {
        failure = Some(CliError::NotConverged(format!("fit-odmr stopped after {} iterations", fit.iterations)));
    }
    Ok(Outputs {
        files: vec![("fit_odmr.txt".into(), s)],
        failure,
    })
}

pub(crate) fn fit_strain(ctx: &Context) -> Result<Outputs, CliError> {
    let sec = ctx
        .config
        .fit_strain
        .as_ref()
        .ok_or_else(|| ConfigError("config has no [fit_strain] section".into()))?;
    let data = load_spectrum(&ctx.config_dir, &sec.spectrum, sec.negate, sec.window_mhz)?;
    let opts = StrainFitOptions {
        fit_d_es: sec.fit_d_es,
        max_iterations: sec.max_iterations.unwrap_or(StrainFitOptions::default().max_iterations),
    };
    let fit = fit_strain_distribution(&data, sec.d_es_mhz, sec.natural_fwhm_mhz, opts)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut s = String::from("# nvdnp fit-strain report\n# parameter\tvalue\tuncertainty\n");
    writeln!(s, "converged\t{}", fit.converged).unwrap();
    writeln!(s, "iterations\t{}", fit.iterations).unwrap();
    report_line(&mut s, "residual_norm", fit.residual_norm, None);
    report_line(&mut s, "mean_mhz", fit.distribution.mean, None);
    report_line(&mut s, "sigma_mhz", fit.distribution.sigma, Some(fit.sigma_uncertainty));
    report_line(&mut s, "amplitude", fit.amplitude, Some(fit.amplitude_uncertainty));
    if sec.fit_d_es {
        report_line(&mut s, "d_es_mhz", fit.d_es, Some(fit.d_es_uncertainty));
    } else {
        report_line(&mut s, "d_es_mhz", fit.d_es, None);
    }
    writeln!(s, "sigma_at_zero\t{}", fit.sigma_at_zero).unwrap();
    writeln!(s, "unidentifiable\t{}", fit.unidentifiable).unwrap();
    let failure = (!fit.converged)
        .then(|| CliError::NotConverged(format!("fit-strain stopped after {} iterations", fit.iterations)));
    Ok(Outputs {
        files: vec![("fit_strain.txt".into(), s)],
        failure,
    })
}

/// Clean model spectrum for the `[synth]` section.
fn synth_model(cfg: &RunConfig) -> Result<(OdmrSpectrum, f64, String), ConfigError> {
    let sec = cfg.synth_section()?;
    let grid = linear_grid(sec.start_mhz, sec.stop_mhz, sec.count);
    let clean = if let Some(o) = &sec.odmr {
        model_spectrum(&synth_peaks(o)?, &grid)?
    } else {
        let e = sec.esodmr.as_ref().expect("validated");
        let dist = StrainDistribution::new(e.mean_mhz, e.sigma_mhz);
        let shape = esodmr_lineshape(&dist, e.d_es_mhz, e.natural_fwhm_mhz, &grid)?;
        shape.with_contrast(shape.contrast().iter().map(|c| e.amplitude * c).collect())?
    };
    Ok((clean, sec.noise, sec.output.clone()))
}

/// Adds N(0, noise²) to each point from a ChaCha8 stream seeded with `seed`.
pub fn add_noise(clean: &OdmrSpectrum, noise: f64, seed: u64) -> crate::Result<OdmrSpectrum> {
    if noise == 0.0 {
        return Ok(clean.clone());
    }
    let normal = Normal::new(0.0, noise).map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    clean.with_contrast(clean.contrast().iter().map(|c| c + normal.sample(&mut rng)).collect())
}

pub(crate) fn synth(ctx: &Context) -> Result<Outputs, CliError> {
    let (clean, noise, name) = synth_model(&ctx.config)?;
    let noisy = add_noise(&clean, noise, ctx.seed).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Outputs::ok(vec![(name, noisy.to_text())]))
}

pub(crate) fn write_outputs(dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
