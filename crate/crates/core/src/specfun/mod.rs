//! Numerical building blocks: quadrature rules, the complex Gamma function,
//! hypergeometric functions and oscillatory semi-infinite integrals.

pub mod gamma;
pub mod hyper;
pub mod oscillatory;
pub mod quad;

use num_complex::Complex64;

pub use gamma::gamma;
pub use hyper::{appell_f1, gauss_2f1};
pub use oscillatory::{oscillatory_semi_infinite, WynnEpsilon};
pub use quad::{adaptive_gk, gauss_legendre, tanh_sinh_unit, CompositeRule, Estimate};

pub type ComplexValue = Complex64;

/// Tolerances shared by the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Hard upper limit on the integration variable of semi-infinite integrals.
    pub truncation_q_max: f64,
    /// Drop the tail once the integrand envelope is negligible.
    pub taper: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-7,
            rel_tol: 1e-9,
            max_subdivisions: 100_000,
            truncation_q_max: f64::INFINITY,
            taper: true,
        }
    }
}

/// Generalized binomial coefficient binom(a, l) = a(a−1)…(a−l+1)/l!.
pub fn gen_binom(a: f64, l: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..l {
        v *= (a - i as f64) / (i + 1) as f64;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(gen_binom(-0.5, 0), 1.0);
        assert_eq!(gen_binom(-0.5, 1), -0.5);
        assert_eq!(gen_binom(-0.5, 2), 0.375);
        assert_eq!(gen_binom(4.0, 2), 6.0);
        for m in 1..6u32 {
            for l in m..m + 4 {
                assert_eq!(gen_binom((m - 1) as f64, l), 0.0);
            }
        }
    }
}
