use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinops::SpinQuantumNumber;

/// Electron gyromagnetic ratio for g ≈ 2, MHz/G.
pub const GAMMA_ELECTRON_MHZ_PER_GAUSS: f64 = 2.8025;
/// ¹⁴N gyromagnetic ratio, MHz/G.
pub const GAMMA_N14_MHZ_PER_GAUSS: f64 = 3.077e-4;
/// Excited-state zero-field splitting, MHz.
pub const D_ES_MHZ: f64 = 1400.0;
pub const HYPERFINE_MHZ: f64 = 40.0;

/// Hyperfine coupling I·A·S in MHz, either axially symmetric about the NV axis or a
/// general symmetric tensor (rows index the nuclear component, columns the electron one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HyperfineTensor {
    Axial { a_par: f64, a_perp: f64 },
    Full([[f64; 3]; 3]),
}

impl HyperfineTensor {
    pub fn as_matrix(&self) -> [[f64; 3]; 3] {
        match *self {
            HyperfineTensor::Axial { a_par, a_perp } => {
                [[a_perp, 0.0, 0.0], [0.0, a_perp, 0.0], [0.0, 0.0, a_par]]
            }
            HyperfineTensor::Full(a) => a,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.as_matrix();
        if a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("hyperfine tensor must be finite".into()));
        }
        if let HyperfineTensor::Full(_) = self {
            let mut asym: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    asym = asym.max((a[i][j] - a[j][i]).abs());
                }
            }
            if asym > 1e-12 {
                return Err(Error::AsymmetricTensor { asymmetry: asym });
            }
        }
        Ok(())
    }
}

/// Coherent part of the excited-state model. Frequencies in MHz, fields in gauss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NVSystemParams {
    pub d_es: f64,
    pub e_es: f64,
    pub b_field: [f64; 3],
    pub gamma_e: f64,
    pub gamma_n: f64,
    pub hyperfine: HyperfineTensor,
    pub nuclear_spin: SpinQuantumNumber,
}

impl Default for NVSystemParams {
    fn default() -> Self {
        Self {
            d_es: D_ES_MHZ,
            e_es: 0.0,
            b_field: [0.0; 3],
            gamma_e: GAMMA_ELECTRON_MHZ_PER_GAUSS,
            gamma_n: GAMMA_N14_MHZ_PER_GAUSS,
            hyperfine: HyperfineTensor::Axial {
                a_par: HYPERFINE_MHZ,
                a_perp: HYPERFINE_MHZ,
            },
            nuclear_spin: SpinQuantumNumber::ONE,
        }
    }
}

impl NVSystemParams {
    pub fn validate(&self) -> Result<()> {
        let scalars = [self.d_es, self.e_es, self.gamma_e, self.gamma_n];
        if scalars.iter().chain(self.b_field.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("system parameters must be finite".into()));
        }
        if self.d_es <= 0.0 {
            return Err(Error::InvalidParameter(format!("d_es must be > 0, got {}", self.d_es)));
        }
        if self.gamma_e <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_e must be > 0, got {}",
                self.gamma_e
            )));
        }
        if self.gamma_n.abs() >= self.gamma_e {
            return Err(Error::InvalidParameter(
                "|gamma_n| must be smaller than gamma_e".into(),
            ));
        }
        self.hyperfine.validate()
    }

    /// Subsystem dimensions `[electron, nucleus]`.
    pub fn dims(&self) -> [usize; 2] {
        [3, self.nuclear_spin.dim()]
    }

    pub fn hilbert_dim(&self) -> usize {
        3 * self.nuclear_spin.dim()
    }

    /// Same parameters with an axial field of `b_gauss` (transverse components kept).
    pub fn with_axial_field(mut self, b_gauss: f64) -> Self {
        self.b_field[2] = b_gauss;
        self
    }

    pub fn with_strain(mut self, e_es: f64) -> Self {
        self.e_es = e_es;
        self
    }
}

/// Incoherent processes. Rates in MHz (1/µs), relaxation times in µs.
/// An infinite relaxation time switches the corresponding channel off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationParams {
    pub pump_rate: f64,
    pub pump_leak_ratio: f64,
    pub t1_electron: f64,
    pub t1_nuclear: f64,
}

impl Default for DissipationParams {
    fn default() -> Self {
        Self {
            pump_rate: 10.0,
            pump_leak_ratio: 0.1,
            t1_electron: 100.0,
            t1_nuclear: 1000.0,
        }
    }
}

impl DissipationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.pump_rate.is_finite() && self.pump_rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pump_rate must be finite and >= 0, got {}",
                self.pump_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.pump_leak_ratio) {
            return Err(Error::InvalidParameter(format!(
                "pump_leak_ratio must lie in [0, 1], got {}",
                self.pump_leak_ratio
            )));
        }
        for (name, t) in [("t1_electron", self.t1_electron), ("t1_nuclear", self.t1_nuclear)] {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    pub fn electron_relaxation_rate(&self) -> f64 {
        0.5 / self.t1_electron
    }

    pub fn nuclear_relaxation_rate(&self) -> f64 {
        0.5 / self.t1_nuclear
    }
}
