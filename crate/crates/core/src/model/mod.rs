//! Excited-state spin model: Hamiltonian, jump operators, Lindblad generator and the pump
//! calibration that ties the leak ratio to a target electron polarization.

mod calibrate;
mod dissipation;
mod hamiltonian;
mod liouvillian;
mod params;

pub use calibrate::{calibrate_pump, zero_field_electron_polarization, CALIBRATION_TOL};
pub use dissipation::{build_collapse_ops, CollapseKind, CollapseOperator};
pub use hamiltonian::{build_hamiltonian, build_hyperfine};
pub use liouvillian::{liouvillian, Liouvillian};
pub use params::{
    DissipationParams, HyperfineTensor, NVSystemParams, D_ES_MHZ, GAMMA_ELECTRON_MHZ_PER_GAUSS,
    GAMMA_N14_MHZ_PER_GAUSS, HYPERFINE_MHZ,
};

use crate::error::Result;
use crate::solver::{electron_polarization, nuclear_polarization, steady_state, SteadyStateReport};

/// Generator for a full parameter set.
pub fn build_liouvillian(p: &NVSystemParams, d: &DissipationParams) -> Result<Liouvillian> {
    let h = build_hamiltonian(p)?;
    let ops = build_collapse_ops(d, p.nuclear_spin)?;
    liouvillian(&h, &ops)
}

/// Steady state of one parameter point together with its polarizations.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub report: SteadyStateReport,
    pub nuclear_polarization: f64,
    pub electron_polarization: f64,
}

pub fn simulate(p: &NVSystemParams, d: &DissipationParams) -> Result<Simulation> {
    let l = build_liouvillian(p, d)?;
    let report = steady_state(&l)?;
    let dims = p.dims();
    let nuclear_polarization = nuclear_polarization(&report.rho, &dims, p.nuclear_spin)?;
    let electron_polarization = electron_polarization(&report.rho, &dims)?;
    Ok(Simulation {
        report,
        nuclear_polarization,
        electron_polarization,
    })
}
