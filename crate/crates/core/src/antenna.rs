//! ULA array factor and its piecewise multi-cosine approximation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::max_side_lobe_index;

/// Side-lobe extrema of an N-element half-wavelength ULA.
///
/// Index 0 is the main lobe (x = 0, χ = 1); indices 1..=k_max are side lobes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UlaPattern {
    n_antennas: usize,
    x: Vec<f64>,
    chi: Vec<f64>,
}

impl UlaPattern {
    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn k_max(&self) -> usize {
        self.chi.len() - 1
    }

    /// Extremum abscissae x_k in the array-factor variable x = (π/2) sin φ.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Lobe levels χ_k, with χ_0 = 1.
    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    /// Angular extent covered by modeled lobes: |φ| ≤ (2k_max+2)/N.
    pub fn support(&self) -> f64 {
        (2 * self.k_max() + 2) as f64 / self.n_antennas as f64
    }

    /// E_φ[G_mc(φ)] for φ uniform on the 120° sector.
    pub fn sector_mean_gain(&self) -> f64 {
        3.0 / (PI * self.n_antennas as f64) * self.chi.iter().sum::<f64>()
    }
}

/// sin²(N x) / (N² sin² x), with the removable singularities at x = jπ set to 1.
pub fn array_factor(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    let s = x.sin();
    if s.abs() < 1e-12 {
        // |sin(Nx)/(N sin x)| → 1 at multiples of π
        return 1.0;
    }
    let v = (nf * x).sin() / (nf * s);
    v * v
}

/// Normalized ULA gain G_act(φ) with half-wavelength spacing.
pub fn theoretical_gain(phi: f64, n: usize) -> f64 {
    array_factor(0.5 * PI * phi.sin(), n).min(1.0)
}

/// Pole-free form of N tan x − tan(N x) multiplied by cos x cos(N x).
fn extremum_residual(x: f64, nf: f64) -> f64 {
    nf * (nf * x).cos() * x.sin() - (nf * x).sin() * x.cos()
}

/// Solves N tan x = tan(N x) on each side-lobe interval (kπ/N, (k+1)π/N).
pub fn side_lobe_extrema(n: usize, k_max: usize) -> Result<UlaPattern> {
    if n < 2 {
        return Err(Error::Config(format!("array needs at least 2 elements, got {n}")));
    }
    let bound = max_side_lobe_index(n);
    if k_max > bound {
        return Err(Error::Config(format!(
            "k_max = {k_max} exceeds floor(N*sqrt(3)/4 - 1) = {bound} for N = {n}"
        )));
    }
    let nf = n as f64;
    let mut x = vec![0.0];
    let mut chi = vec![1.0];
    for k in 1..=k_max {
        let mut lo = k as f64 * PI / nf;
        let mut hi = (k + 1) as f64 * PI / nf;
        let mut f_lo = extremum_residual(lo, nf);
        let f_hi = extremum_residual(hi, nf);
        if f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
            return Err(Error::RootNotBracketed(k));
        }
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = extremum_residual(mid, nf);
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        let xk = 0.5 * (lo + hi);
        x.push(xk);
        chi.push(array_factor(xk, n));
    }
    Ok(UlaPattern {
        n_antennas: n,
        x,
        chi,
    })
}

/// Multi-cosine gain: cos²(Nπφ/4) on the main lobe |φ| ≤ 2/N, χ_k sin²(Nπφ/2)
/// on side lobe k (2k/N ≤ |φ| ≤ (2k+2)/N), zero past lobe k_max.
pub fn multicosine_gain(phi: f64, pattern: &UlaPattern) -> f64 {
    let nf = pattern.n_antennas as f64;
    let u = phi.abs() * nf;
    if u <= 2.0 {
        let c = (PI * u / 4.0).cos();
        return c * c;
    }
    let k = ((u - 2.0) / 2.0).floor() as usize + 1;
    if k > pattern.k_max() {
        return 0.0;
    }
    let s = (PI * u / 2.0).sin();
    pattern.chi[k] * s * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_lobe_normalization() {
        assert_eq!(theoretical_gain(0.0, 64), 1.0);
        let p = side_lobe_extrema(64, 9).unwrap();
        assert_eq!(multicosine_gain(0.0, &p), 1.0);
        assert_eq!(p.chi()[0], 1.0);
    }

    #[test]
    fn first_null() {
        let n = 64;
        let phi = (2.0 / n as f64).asin();
        assert!(theoretical_gain(phi, n) < 1e-28);
        let p = side_lobe_extrema(n, 9).unwrap();
        assert!(multicosine_gain(2.0 / n as f64, &p) < 1e-30);
    }

    #[test]
    fn two_elements_without_side_lobes() {
        let p = side_lobe_extrema(2, 0).unwrap();
        assert_eq!(p.chi(), &[1.0]);
        assert_eq!(p.k_max(), 0);
        assert_eq!(multicosine_gain(1.04, &p), 0.0);
    }

    #[test]
    fn rejects_excess_lobes() {
        assert!(matches!(side_lobe_extrema(64, 27), Err(Error::Config(_))));
        assert!(side_lobe_extrema(64, 26).is_ok());
        assert!(side_lobe_extrema(1, 0).is_err());
    }

    #[test]
    fn residuals_vanish() {
        let n = 64;
        let p = side_lobe_extrema(n, 26).unwrap();
        let nf = n as f64;
        for &x in &p.x()[1..] {
            // residual of the tangent form, relative to its size
            let lhs = nf * x.tan();
            let rhs = (nf * x).tan();
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs(), "{lhs} vs {rhs}");
        }
        for w in p.chi()[1..].windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn first_side_lobe_level() {
        // golden-section maximization of the array factor over (π/N, 2π/N)
        let n = 64;
        let f = |x: f64| array_factor(x, n);
        let (mut a, mut b) = (PI / n as f64, 2.0 * PI / n as f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let x_star = 0.5 * (a + b);
        let p = side_lobe_extrema(n, 1).unwrap();
        assert!((p.x()[1] - x_star).abs() < 1e-8);
        assert!((p.chi()[1] - f(x_star)).abs() < 1e-8);
        // about −13.3 dB for large N
        assert!((10.0 * p.chi()[1].log10() + 13.26).abs() < 0.05);
    }

    #[test]
    fn side_lobe_midpoints_hit_levels() {
        let n = 64;
        let p = side_lobe_extrema(n, 9).unwrap();
        for k in 1..=9 {
            let phi = (2 * k + 1) as f64 / n as f64;
            assert!((multicosine_gain(phi, &p) - p.chi()[k]).abs() < 1e-15);
            assert!((multicosine_gain(-phi, &p) - p.chi()[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn sector_mean_matches_quadrature() {
        let p = side_lobe_extrema(64, 9).unwrap();
        let h = 1e-6;
        let steps = (PI / 3.0 / h) as usize;
        let mut sum = 0.0;
        for i in 0..steps {
            sum += multicosine_gain((i as f64 + 0.5) * h, &p);
        }
        let mean = sum * h * 3.0 / PI;
        assert!((mean - p.sector_mean_gain()).abs() < 1e-6);
    }
}
