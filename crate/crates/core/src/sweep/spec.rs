use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DissipationParams, HyperfineTensor, NVSystemParams};

/// Parameter that a sweep axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    BAxialGauss,
    EEsMhz,
    APerpMhz,
    AParMhz,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::BAxialGauss => "b_axial_gauss",
            SweepParameter::EEsMhz => "e_es_mhz",
            SweepParameter::APerpMhz => "a_perp_mhz",
            SweepParameter::AParMhz => "a_par_mhz",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "b_axial_gauss" => Ok(SweepParameter::BAxialGauss),
            "e_es_mhz" => Ok(SweepParameter::EEsMhz),
            "a_perp_mhz" => Ok(SweepParameter::APerpMhz),
            "a_par_mhz" => Ok(SweepParameter::AParMhz),
            other => Err(Error::InvalidParameter(format!("unknown sweep parameter '{other}'"))),
        }
    }

    /// Writes `value` into `p`. Hyperfine axes need the axial tensor form.
    pub fn apply(self, p: &mut NVSystemParams, value: f64) -> Result<()> {
        match self {
            SweepParameter::BAxialGauss => p.b_field[2] = value,
            SweepParameter::EEsMhz => p.e_es = value,
            SweepParameter::APerpMhz | SweepParameter::AParMhz => match &mut p.hyperfine {
                HyperfineTensor::Axial { a_par, a_perp } => {
                    if self == SweepParameter::APerpMhz {
                        *a_perp = value;
                    } else {
                        *a_par = value;
                    }
                }
                HyperfineTensor::Full(_) => {
                    return Err(Error::InvalidParameter(format!(
                        "sweeping {} requires an axial hyperfine tensor",
                        self.name()
                    )))
                }
            },
        }
        Ok(())
    }
}

/// Evenly spaced axis including both end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(parameter: SweepParameter, start: f64, stop: f64, count: usize) -> Self {
        Self {
            parameter,
            start,
            stop,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter(format!("{} axis needs count >= 1", self.parameter.name())));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start > self.stop {
            return Err(Error::InvalidParameter(format!(
                "{} axis needs finite start <= stop, got {}..{}",
                self.parameter.name(),
                self.start,
                self.stop
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub system: NVSystemParams,
    pub dissipation: DissipationParams,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
}

impl SweepSpec {
    pub fn one_axis(system: NVSystemParams, dissipation: DissipationParams, axis: Axis) -> Self {
        Self {
            system,
            dissipation,
            axis1: axis,
            axis2: None,
        }
    }

    pub fn two_axes(system: NVSystemParams, dissipation: DissipationParams, axis1: Axis, axis2: Axis) -> Self {
        Self {
            system,
            dissipation,
            axis1,
            axis2: Some(axis2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.dissipation.validate()?;
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.parameter == self.axis1.parameter {
                return Err(Error::InvalidParameter("both sweep axes vary the same parameter".into()));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.count, self.axis2.map_or(1, |a| a.count))
    }

    /// Parameters at grid index (i, j) with their axis values.
    pub fn point(&self, i: usize, j: usize) -> Result<(NVSystemParams, f64, Option<f64>)> {
        let mut p = self.system;
        let v1 = self.axis1.values()[i];
        self.axis1.parameter.apply(&mut p, v1)?;
        let v2 = match &self.axis2 {
            Some(a2) => {
                let v = a2.values()[j];
                a2.parameter.apply(&mut p, v)?;
                Some(v)
            }
            None => None,
        };
        Ok((p, v1, v2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_hit_end_points() {
        let a = Axis::new(SweepParameter::BAxialGauss, 0.0, 1000.0, 21);
        let v = a.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 500.0);
        assert_eq!(v[20], 1000.0);
        assert_eq!(Axis::new(SweepParameter::EEsMhz, 3.0, 3.0, 1).values(), vec![3.0]);
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::new(SweepParameter::BAxialGauss, 0.0, 1.0, 0).validate().is_err());
        assert!(Axis::new(SweepParameter::BAxialGauss, 2.0, 1.0, 3).validate().is_err());
    }

    #[test]
    fn parameter_names_round_trip() {
        for p in [
            SweepParameter::BAxialGauss,
            SweepParameter::EEsMhz,
            SweepParameter::APerpMhz,
            SweepParameter::AParMhz,
        ] {
            assert_eq!(SweepParameter::parse(p.name()).unwrap(), p);
        }
        assert!(SweepParameter::parse("temperature").is_err());
    }

    #[test]
    fn hyperfine_axis_needs_axial_tensor() {
        let mut p = NVSystemParams {
            hyperfine: HyperfineTensor::Full([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            ..Default::default()
        };
        assert!(SweepParameter::APerpMhz.apply(&mut p, 3.0).is_err());
        let mut p = NVSystemParams::default();
        SweepParameter::APerpMhz.apply(&mut p, 3.0).unwrap();
        assert_eq!(p.hyperfine, HyperfineTensor::Axial { a_par: 40.0, a_perp: 3.0 });
    }

    #[test]
    fn same_parameter_twice_rejected() {
        let a = Axis::new(SweepParameter::BAxialGauss, 0.0, 1.0, 2);
        let s = SweepSpec::two_axes(NVSystemParams::default(), DissipationParams::default(), a, a);
        assert!(s.validate().is_err());
    }
}
