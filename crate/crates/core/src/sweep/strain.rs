use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default Gauss–Hermite order for strain averaging.
pub const DEFAULT_QUADRATURE_NODES: usize = 32;

/// Normal distribution of the spin-strain coupling E_es across an ensemble, in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrainDistribution {
    pub mean: f64,
    pub sigma: f64,
    pub n_quadrature: usize,
}

impl StrainDistribution {
    pub fn new(mean: f64, sigma: f64) -> Self {
        Self {
            mean,
            sigma,
            n_quadrature: DEFAULT_QUADRATURE_NODES,
        }
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.n_quadrature = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "strain distribution needs finite mean and sigma >= 0, got mean {} sigma {}",
                self.mean, self.sigma
            )));
        }
        if self.n_quadrature == 0 {
            return Err(Error::InvalidParameter("n_quadrature must be positive".into()));
        }
        Ok(())
    }

    /// Strain values and probability weights (summing to one) for the expectation over the
    /// distribution. A zero-width distribution collapses to its mean.
    pub fn nodes(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        if self.sigma == 0.0 {
            return Ok(vec![(self.mean, 1.0)]);
        }
        let (x, w) = gauss_hermite(self.n_quadrature);
        let norm = std::f64::consts::PI.sqrt();
        Ok(x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| (self.mean + std::f64::consts::SQRT_2 * self.sigma * xi, wi / norm))
            .collect())
    }

    /// E[f(E)] by Gauss–Hermite quadrature.
    pub fn expectation<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut acc = 0.0;
        for (e, w) in self.nodes()? {
            acc += w * f(e)?;
        }
        Ok(acc)
    }
}

/// Nodes and weights of the n-point Gauss–Hermite rule for the weight e^{−x²},
/// nodes in descending order.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    // π^{-1/4}
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // Orthonormal Hermite recurrence.
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_order_rules() {
        let (x, w) = gauss_hermite(1);
        assert!(x[0].abs() < 1e-15 && (w[0] - PI.sqrt()).abs() < 1e-14);
        let (x, w) = gauss_hermite(2);
        assert!((x[0] - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((w[0] - PI.sqrt() / 2.0).abs() < 1e-14);
        // 3-point: ±√(3/2), 0 with weights √π/6, 2√π/3
        let (x, w) = gauss_hermite(3);
        assert!((x[0] - 1.5f64.sqrt()).abs() < 1e-14 && x[1].abs() < 1e-14);
        assert!((w[0] - PI.sqrt() / 6.0).abs() < 1e-14);
        assert!((w[1] - 2.0 * PI.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn normal_moments_are_exact() {
        for n in [8, 32, 64] {
            let d = StrainDistribution::new(3.0, 2.0).with_nodes(n);
            let m0 = d.expectation(|_| Ok(1.0)).unwrap();
            let m1 = d.expectation(|e| Ok(e)).unwrap();
            let var = d.expectation(|e| Ok((e - 3.0).powi(2))).unwrap();
            let k4 = d.expectation(|e| Ok((e - 3.0).powi(4))).unwrap();
            assert!((m0 - 1.0).abs() < 1e-13, "n={n} m0={m0}");
            assert!((m1 - 3.0).abs() < 1e-12);
            assert!((var - 4.0).abs() < 1e-11);
            assert!((k4 - 3.0 * 16.0).abs() < 1e-9);
        }
    }

    #[test]
    fn smooth_expectation_matches_closed_form() {
        // E[cos(aX)] = cos(a μ) exp(−a²σ²/2)
        let (mu, sigma, a) = (0.4, 1.3, 1.7);
        let d = StrainDistribution::new(mu, sigma).with_nodes(64);
        let got = d.expectation(|e| Ok((a * e).cos())).unwrap();
        let want = (a * mu).cos() * (-(a * sigma).powi(2) / 2.0).exp();
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn zero_width_is_point_evaluation() {
        let d = StrainDistribution::new(7.5, 0.0);
        assert_eq!(d.nodes().unwrap(), vec![(7.5, 1.0)]);
    }

    #[test]
    fn invalid_distribution_rejected() {
        assert!(StrainDistribution::new(0.0, -1.0).nodes().is_err());
        assert!(StrainDistribution::new(0.0, 1.0).with_nodes(0).nodes().is_err());
    }
}
