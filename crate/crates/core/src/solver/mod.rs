//! Stationary states of the Lindblad generator, time evolution, and the reduced-state
//! observables used throughout (partial trace, nuclear and electron polarization).

mod density;
pub mod expm;
mod observables;
mod steady;

pub use density::DensityMatrix;
pub use observables::{electron_polarization, nuclear_polarization, partial_trace};
pub use steady::{evolve, slowest_relaxation_rate, steady_state, SteadyStateReport, TOL_NULL};
