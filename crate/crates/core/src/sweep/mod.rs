//! Parameter sweeps over field, strain and hyperfine couplings, strain-distribution
//! averaging and temperature curves.

mod checkpoint;
mod engine;
mod spec;
mod strain;

pub use checkpoint::COLUMNS as CHECKPOINT_COLUMNS;
pub use engine::{
    run_sweep, scan_field_strain, strain_averaged_polarization, sweep_field, temperature_curve,
    AveragedPolarization, PointStatus, SweepOptions, SweepPoint, SweepResult, TemperaturePoint,
    TemperatureRow,
};
pub(crate) use engine::with_threads;
pub use spec::{Axis, SweepParameter, SweepSpec};
pub use strain::{gauss_hermite, StrainDistribution, DEFAULT_QUADRATURE_NODES};
