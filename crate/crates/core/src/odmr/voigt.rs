//! Faddeeva function and Voigt profile.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const TERMS: usize = 40;

struct Weideman {
    l: f64,
    a: [f64; TERMS],
}

// Coefficients of the rational expansion of w(z) in the upper half plane
// (J.A.C. Weideman, SIAM J. Numer. Anal. 31, 1994).
fn weideman() -> &'static Weideman {
    static W: OnceLock<Weideman> = OnceLock::new();
    W.get_or_init(|| {
        let n = TERMS;
        let m = 2 * n;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        let f = |k: i64| {
            let t = l * (k as f64 * PI / m as f64 / 2.0).tan();
            (-t * t).exp() * (l * l + t * t)
        };
        let mut a = [0.0; TERMS];
        for (j, aj) in a.iter_mut().enumerate() {
            let j = (j + 1) as f64;
            let mut s = 0.0;
            for k in -(m as i64) + 1..m as i64 {
                s += f(k) * (PI * k as f64 * j / m as f64).cos();
            }
            *aj = s / (2 * m) as f64;
        }
        Weideman { l, a }
    })
}

/// w(z) = exp(−z²) erfc(−iz) for Im z ≥ 0.
pub fn faddeeva(z: Complex64) -> Complex64 {
    let w = weideman();
    let i = Complex64::i();
    let lmiz = w.l - i * z;
    let zz = (w.l + i * z) / lmiz;
    let mut p = Complex64::new(0.0, 0.0);
    for &aj in w.a.iter().rev() {
        p = p * zz + aj;
    }
    2.0 * p / (lmiz * lmiz) + 1.0 / (PI.sqrt() * lmiz)
}

/// Voigt density (unit area) at offset `x` for Gaussian width `sigma` and Lorentzian
/// half-width `gamma`, together with its derivatives in `x` and `sigma`.
pub fn voigt(x: f64, sigma: f64, gamma: f64) -> (f64, f64, f64) {
    let s2 = sigma * std::f64::consts::SQRT_2;
    let z = Complex64::new(x, gamma) / s2;
    let w = faddeeva(z);
    let dw = -2.0 * z * w + Complex64::new(0.0, 2.0 / PI.sqrt());
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let v = w.re * norm;
    let dv_dx = (dw / s2).re * norm;
    let dv_dsigma = (dw * (-z / sigma)).re * norm - v / sigma;
    (v, dv_dx, dv_dsigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_axis_matches_scaled_erfc() {
        // w(iy) = exp(y²) erfc(y)
        let cases = [
            (0.0, 1.0),
            (0.5, 0.615_690_344_192_925_9),
            (1.0, 0.427_583_576_155_807_0),
            (3.0, 0.179_001_151_181_389_98),
        ];
        for (y, want) in cases {
            let w = faddeeva(Complex64::new(0.0, y));
            assert!((w.re - want).abs() < 1e-12, "y={y}: {} vs {want}", w.re);
            assert!(w.im.abs() < 1e-12);
        }
    }

    #[test]
    fn real_axis_dawson() {
        // Im w(x) = 2/√π · D(x); D(1) = 0.5380795069127684
        let w = faddeeva(Complex64::new(1.0, 0.0));
        assert!((w.re - (-1.0f64).exp()).abs() < 1e-12);
        assert!((w.im - 2.0 / PI.sqrt() * 0.538_079_506_912_768_4).abs() < 1e-12);
    }

    fn direct_voigt(x: f64, sigma: f64, gamma: f64) -> f64 {
        // trapezoid over the Gaussian variable on ±12σ
        let n = 200_000;
        let h = 24.0 * sigma / n as f64;
        let mut s = 0.0;
        for k in 0..=n {
            let e = -12.0 * sigma + h * k as f64;
            let g = (-(e * e) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
            let l = gamma / PI / ((x - e).powi(2) + gamma * gamma);
            let wt = if k == 0 || k == n { 0.5 } else { 1.0 };
            s += wt * g * l;
        }
        s * h
    }

    #[test]
    fn voigt_matches_direct_convolution() {
        for &(sigma, gamma) in &[(1.0, 1.0), (50.0, 10.0), (5.0, 10.0), (200.0, 5.0)] {
            for &x in &[0.0, 3.0, 0.7 * sigma, 3.0 * sigma] {
                let (v, _, _) = voigt(x, sigma, gamma);
                let want = direct_voigt(x, sigma, gamma);
                assert!((v - want).abs() < 1e-9 * want.max(1e-6), "σ={sigma} γ={gamma} x={x}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn voigt_derivatives_match_finite_differences() {
        let (x, s, g) = (7.0, 12.0, 4.0);
        let (_, dx, ds) = voigt(x, s, g);
        let h = 1e-5;
        let fdx = (voigt(x + h, s, g).0 - voigt(x - h, s, g).0) / (2.0 * h);
        let fds = (voigt(x, s + h, g).0 - voigt(x, s - h, g).0) / (2.0 * h);
        assert!((dx - fdx).abs() < 1e-9);
        assert!((ds - fds).abs() < 1e-9);
    }
}
