//! Steady-state Lindblad modelling of optically pumped nuclear-spin polarization at the
//! NV-center excited-state level anti-crossing, together with the ODMR analysis used to
//! read polarization back out of measured spectra.

pub mod cli;
pub mod error;
pub mod model;
pub mod odmr;
pub mod solver;
pub mod spinops;
pub mod sweep;

pub use error::{Error, Result};
