use std::path::PathBuf;

use rayon::prelude::*;

use super::checkpoint::Checkpoint;
use super::spec::{SweepParameter, SweepSpec};
use super::strain::StrainDistribution;
use crate::error::{Error, Result};
use crate::model::{simulate, DissipationParams, NVSystemParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    /// Carries the error kind of the failed evaluation.
    Failed(String),
}

impl PointStatus {
    pub fn label(&self) -> String {
        match self {
            PointStatus::Ok => "ok".into(),
            PointStatus::Failed(kind) => format!("failed:{kind}"),
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(PointStatus::Ok),
            _ => s
                .strip_prefix("failed:")
                .filter(|k| !k.is_empty())
                .map(|k| PointStatus::Failed(k.to_string())),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, PointStatus::Ok)
    }
}

/// One evaluated grid point. Failed points carry NaN observables.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub i: usize,
    pub j: usize,
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub nuclear: f64,
    pub electron: f64,
    pub residual: f64,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis1: Vec<f64>,
    pub axis2: Option<Vec<f64>>,
    /// Row-major over (axis1, axis2).
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.as_ref().map_or(1, Vec::len))
    }

    pub fn point(&self, i: usize, j: usize) -> &SweepPoint {
        let (_, n2) = self.shape();
        &self.points[i * n2 + j]
    }

    fn grid(&self, f: impl Fn(&SweepPoint) -> f64) -> Vec<Vec<f64>> {
        let (_, n2) = self.shape();
        self.points.chunks(n2).map(|row| row.iter().map(&f).collect()).collect()
    }

    /// Nuclear polarization indexed `[i][j]`.
    pub fn nuclear_grid(&self) -> Vec<Vec<f64>> {
        self.grid(|p| p.nuclear)
    }

    pub fn electron_grid(&self) -> Vec<Vec<f64>> {
        self.grid(|p| p.electron)
    }

    /// Nuclear polarization along axis 1 (first column for two-axis sweeps).
    pub fn nuclear_curve(&self) -> Vec<f64> {
        self.nuclear_grid().into_iter().map(|r| r[0]).collect()
    }

    pub fn failed_count(&self) -> usize {
        self.points.iter().filter(|p| !p.status.is_ok()).count()
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Worker count for a private thread pool; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub checkpoint: Option<PathBuf>,
}

pub(crate) fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidParameter("thread count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn evaluate(spec: &SweepSpec, i: usize, j: usize) -> SweepPoint {
    let v1 = spec.axis1.values()[i];
    let v2 = spec.axis2.map(|a| a.values()[j]);
    let outcome = spec.point(i, j).and_then(|(p, _, _)| simulate(&p, &spec.dissipation));
    match outcome {
        Ok(sim) => SweepPoint {
            i,
            j,
            axis1: v1,
            axis2: v2,
            nuclear: sim.nuclear_polarization,
            electron: sim.electron_polarization,
            residual: sim.report.residual_norm,
            status: PointStatus::Ok,
        },
        Err(e) => SweepPoint {
            i,
            j,
            axis1: v1,
            axis2: v2,
            nuclear: f64::NAN,
            electron: f64::NAN,
            residual: f64::NAN,
            status: PointStatus::Failed(e.kind().to_string()),
        },
    }
}

/// Evaluates every grid point of `spec`.
///
/// Points that fail are marked rather than aborting the run. With a checkpoint path, points
/// already recorded there are reused and new ones are appended as they finish; the file is
/// rewritten in grid order at the end.
pub fn run_sweep(spec: &SweepSpec, opts: &SweepOptions) -> Result<SweepResult> {
    spec.validate()?;
    let (n1, n2) = spec.shape();

    let (checkpoint, done) = match &opts.checkpoint {
        Some(path) => {
            let (cp, done) = Checkpoint::open(path, spec)?;
            (Some(cp), done)
        }
        None => (None, Vec::new()),
    };

    let mut slots: Vec<Option<SweepPoint>> = vec![None; n1 * n2];
    for p in done {
        let k = p.i * n2 + p.j;
        slots[k] = Some(p);
    }
    let pending: Vec<usize> = (0..n1 * n2).filter(|&k| slots[k].is_none()).collect();

    let fresh: Vec<Result<SweepPoint>> = with_threads(opts.threads, || {
        pending
            .par_iter()
            .map(|&k| {
                let p = evaluate(spec, k / n2, k % n2);
                if let Some(cp) = &checkpoint {
                    cp.append(&p)?;
                }
                Ok(p)
            })
            .collect()
    })?;
    for p in fresh {
        let p = p?;
        let k = p.i * n2 + p.j;
        slots[k] = Some(p);
    }

    let points: Vec<SweepPoint> = slots.into_iter().map(|p| p.expect("every slot filled")).collect();
    if let Some(cp) = checkpoint {
        cp.finish(&points)?;
    }
    Ok(SweepResult {
        axis1: spec.axis1.values(),
        axis2: spec.axis2.map(|a| a.values()),
        points,
    })
}

/// One-dimensional sweep of the axial field.
pub fn sweep_field(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.axis1.parameter != SweepParameter::BAxialGauss || spec.axis2.is_some() {
        return Err(Error::InvalidParameter(
            "sweep_field needs a single b_axial_gauss axis".into(),
        ));
    }
    run_sweep(spec, &SweepOptions::default())
}

/// Field (outer) by strain (inner) map.
pub fn scan_field_strain(spec: &SweepSpec) -> Result<SweepResult> {
    let ok = spec.axis1.parameter == SweepParameter::BAxialGauss
        && spec.axis2.map(|a| a.parameter) == Some(SweepParameter::EEsMhz);
    if !ok {
        return Err(Error::InvalidParameter(
            "scan_field_strain needs axes (b_axial_gauss, e_es_mhz)".into(),
        ));
    }
    run_sweep(spec, &SweepOptions::default())
}

/// Ensemble-averaged polarizations over a strain distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedPolarization {
    pub nuclear: f64,
    pub electron: f64,
    /// Largest steady-state residual among the quadrature nodes.
    pub max_residual: f64,
}

/// Expectation of the steady-state polarizations over `dist`, with `system.e_es` replaced
/// by each quadrature node.
pub fn strain_averaged_polarization(
    system: &NVSystemParams,
    dissipation: &DissipationParams,
    dist: &StrainDistribution,
) -> Result<AveragedPolarization> {
    let nodes = dist.nodes()?;
    let sims: Vec<_> = nodes
        .par_iter()
        .map(|&(e, _)| simulate(&system.with_strain(e), dissipation))
        .collect();
    let mut avg = AveragedPolarization {
        nuclear: 0.0,
        electron: 0.0,
        max_residual: 0.0,
    };
    for (sim, &(_, w)) in sims.into_iter().zip(&nodes) {
        let sim = sim?;
        avg.nuclear += w * sim.nuclear_polarization;
        avg.electron += w * sim.electron_polarization;
        avg.max_residual = avg.max_residual.max(sim.report.residual_norm);
    }
    Ok(avg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureRow {
    pub temperature: f64,
    pub distribution: StrainDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperaturePoint {
    pub temperature: f64,
    pub distribution: StrainDistribution,
    pub outcome: Result<AveragedPolarization>,
}

/// Strain-averaged polarization for each row of a temperature table. Rows fail individually.
pub fn temperature_curve(
    system: &NVSystemParams,
    dissipation: &DissipationParams,
    table: &[TemperatureRow],
) -> Result<Vec<TemperaturePoint>> {
    if table.is_empty() {
        return Err(Error::InvalidParameter("temperature table is empty".into()));
    }
    system.validate()?;
    dissipation.validate()?;
    for row in table {
        row.distribution.validate()?;
    }
    Ok(table
        .iter()
        .map(|row| TemperaturePoint {
            temperature: row.temperature,
            distribution: row.distribution,
            outcome: strain_averaged_polarization(system, dissipation, &row.distribution),
        })
        .collect())
}
