//! Characteristic functions, Gil-Pelaez inversion, moments of the conditional
//! CDF and the beta approximation of the meta distribution.
//!
//! Per base station at distance r, with beam angle and fading averaged out,
//! the characteristic function of the exposure is
//!
//! φ₁(q, r) = κ₀ + 6/(Nπ²) Σ_k ζ_k(r, q),   κ₀ = 1 − 6(1 + k_max)/(Nπ),
//!
//! where κ₀ is the probability that the user sits outside every modeled lobe.
//! Products of φ₁ over a layout give the conditional CF; the probability
//! generating functional of the PPP gives the unconditioned CF and the
//! second-order kernels γ±.

mod beta;
mod closed;
mod moments;
mod radial;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::antenna::{side_lobe_extrema, UlaPattern};
use crate::error::{Error, Result};
use crate::model::NetworkConfig;
use crate::ppp::PppRealization;
use crate::specfun::{gen_binom, oscillatory_semi_infinite, Estimate, QuadratureSpec};

pub use beta::{beta_fit, meta_from_moments, BetaParams, MetaCurve, MetaMethod, MomentDenominator};
pub use moments::{crossing_point, GilPelaezRule, MomentCurve, MomentTerms, OmegaSign};
pub use radial::RadialRule;

/// Which of the two independent evaluation routes to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfMethod {
    /// Closed form with ₂F₁ (and Appell F₁ for γ± at z = 0).
    ClosedForm,
    /// Gauss-Legendre quadrature of the PGFL exponent over r.
    Radial,
}

/// Sign of the second argument of γ±.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaSign {
    /// γ₊(q, q') = E[φ(q|Ψ) φ(q'|Ψ)].
    Plus,
    /// γ₋(q, q') = E[φ(q|Ψ) conj φ(q'|Ψ)].
    Minus,
}

/// Network configuration together with its lobe pattern and the constants
/// shared by every CF evaluation.
#[derive(Debug, Clone)]
pub struct ExposureModel {
    cfg: NetworkConfig,
    pattern: UlaPattern,
    /// binom(−1/2, l)·binom(m−1, l), l = 0..m−1.
    coeffs: Vec<f64>,
    kappa0: f64,
    radial: RadialRule,
}

impl ExposureModel {
    pub fn new(cfg: NetworkConfig) -> Result<Self> {
        let pattern = side_lobe_extrema(cfg.n_antennas(), cfg.k_max())?;
        Self::with_pattern(cfg, pattern)
    }

    pub fn with_pattern(cfg: NetworkConfig, pattern: UlaPattern) -> Result<Self> {
        if pattern.n_antennas() != cfg.n_antennas() || pattern.k_max() != cfg.k_max() {
            return Err(Error::Config(format!(
                "pattern (N = {}, k_max = {}) does not match config (N = {}, k_max = {})",
                pattern.n_antennas(),
                pattern.k_max(),
                cfg.n_antennas(),
                cfg.k_max()
            )));
        }
        let m = cfg.fading_shape();
        let coeffs = (0..m as u32)
            .map(|l| gen_binom(-0.5, l) * gen_binom((m - 1) as f64, l))
            .collect();
        let kappa0 = 1.0 - 6.0 * (1 + cfg.k_max()) as f64 / (cfg.n_antennas() as f64 * PI);
        let radial = RadialRule::new(&cfg);
        Ok(Self {
            cfg,
            pattern,
            coeffs,
            kappa0,
            radial,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn pattern(&self) -> &UlaPattern {
        &self.pattern
    }

    pub fn radial_rule(&self) -> &RadialRule {
        &self.radial
    }

    /// Probability mass of zero gain for one BS: 1 − 6(1+k_max)/(Nπ).
    pub fn zero_gain_probability(&self) -> f64 {
        self.kappa0
    }

    fn lobe_weight(&self) -> f64 {
        6.0 / (self.cfg.n_antennas() as f64 * PI * PI)
    }

    /// ζ as a function of a = qχS̄/m (a may be negative, giving the conjugate).
    fn zeta_of(&self, a: f64) -> Complex64 {
        let p = self.cfg.fading_shape() as f64 - 0.5;
        let w = Complex64::new(0.0, a);
        let mut poly = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            poly = poly * w + c;
        }
        let magnitude = PI * (1.0 + a * a).powf(-0.5 * p);
        poly * Complex64::from_polar(magnitude, p * a.atan())
    }

    /// ζ_k(r, q) = π Σ_l binom(−1/2,l) binom(m−1,l) (ja)^l / (1 − ja)^(m−1/2),
    /// a = qχ_kS̄(r)/m.
    pub fn zeta_k(&self, r: f64, q: f64, k: usize) -> Complex64 {
        let m = self.cfg.fading_shape() as f64;
        self.zeta_of(q * self.pattern.chi()[k] * self.cfg.mean_power_kernel(r) / m)
    }

    /// φ₁ for a BS whose mean power density is `s_bar`.
    pub(crate) fn per_bs_cf_at_power(&self, q: f64, s_bar: f64) -> Complex64 {
        if q == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let m = self.cfg.fading_shape() as f64;
        let scale = q * s_bar / m;
        let sum: Complex64 = self.pattern.chi().iter().map(|&chi| self.zeta_of(scale * chi)).sum();
        self.kappa0 + sum * self.lobe_weight()
    }

    /// CF of one BS's exposure at distance r, averaged over beam and fading.
    pub fn per_bs_cf(&self, q: f64, r: f64) -> Complex64 {
        self.per_bs_cf_at_power(q, self.cfg.mean_power_kernel(r))
    }

    /// φ(q|Ψ) = Π_i φ₁(q, r_i).
    pub fn cf_conditional(&self, q: f64, realization: &PppRealization) -> Complex64 {
        realization
            .radii
            .iter()
            .map(|&r| self.per_bs_cf(q, r))
            .fold(Complex64::new(1.0, 0.0), |acc, v| acc * v)
    }

    /// lim_{q→∞} φ(q|Ψ): the probability that every BS misses the user.
    pub fn conditional_atom(&self, realization: &PppRealization) -> f64 {
        self.kappa0.powi(realization.len() as i32)
    }

    /// Gil-Pelaez inversion of φ(q|Ψ). The atom at zero exposure is split
    /// off analytically so the remaining integrand decays.
    pub fn cdf_conditional(
        &self,
        te: f64,
        realization: &PppRealization,
        spec: &QuadratureSpec,
    ) -> Result<Estimate> {
        check_threshold(te)?;
        let atom = self.conditional_atom(realization);
        let powers: Vec<f64> = realization
            .radii
            .iter()
            .map(|&r| self.cfg.mean_power_kernel(r))
            .collect();
        let g = |q: f64| {
            let phi = powers
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &s| acc * self.per_bs_cf_at_power(q, s));
            (phi - atom) * Complex64::from_polar(1.0, -q * te)
        };
        let est = oscillatory_semi_infinite(g, 2.0 * PI / te, spec)?;
        Ok(Estimate {
            value: (0.5 + 0.5 * atom - est.value / PI).clamp(0.0, 1.0),
            error: est.error / PI,
        })
    }

    /// ln φ_E(q) by the selected route.
    pub fn cf_exponent(&self, q: f64, method: CfMethod, spec: &QuadratureSpec) -> Result<Complex64> {
        if q < 0.0 {
            return Ok(self.cf_exponent(-q, method, spec)?.conj());
        }
        match method {
            CfMethod::Radial => Ok(self.radial.cf_exponent(self, q)),
            CfMethod::ClosedForm => closed::cf_exponent(self, q, spec),
        }
    }

    /// Unconditioned CF φ_E(q) = E_Ψ[φ(q|Ψ)].
    pub fn cf_unconditioned(&self, q: f64, method: CfMethod, spec: &QuadratureSpec) -> Result<Complex64> {
        Ok(self.cf_exponent(q, method, spec)?.exp())
    }

    /// lim_{q→∞} φ_E(q) = P[S = 0].
    pub fn unconditioned_atom(&self) -> f64 {
        (-2.0 * PI * self.cfg.density() * (1.0 - self.kappa0) * self.radial.total_weight()).exp()
    }

    /// M₁(T) = E_Ψ[F(T|Ψ)] by adaptive Gil-Pelaez inversion of φ_E.
    pub fn moment1(&self, te: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        check_threshold(te)?;
        let atom = self.unconditioned_atom();
        let g = |q: f64| {
            let phi = self.radial.cf_exponent(self, q).exp();
            (phi - atom) * Complex64::from_polar(1.0, -q * te)
        };
        let est = oscillatory_semi_infinite(g, 2.0 * PI / te, spec)?;
        Ok(Estimate {
            value: (0.5 + 0.5 * atom - est.value / PI).clamp(0.0, 1.0),
            error: est.error / PI,
        })
    }

    /// γ±(q, q') by the selected route. The closed form needs z = 0.
    pub fn gamma_pm(
        &self,
        q: f64,
        q2: f64,
        sign: GammaSign,
        method: CfMethod,
        spec: &QuadratureSpec,
    ) -> Result<Complex64> {
        let q2 = match sign {
            GammaSign::Plus => q2,
            GammaSign::Minus => -q2,
        };
        let exponent = match method {
            CfMethod::Radial => self.radial.gamma_exponent(self, q, q2),
            CfMethod::ClosedForm => closed::gamma_exponent(self, q, q2, spec)?,
        };
        Ok(exponent.exp())
    }
}

fn check_threshold(te: f64) -> Result<()> {
    if te > 0.0 && te.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("exposure threshold must be positive, got {te}")))
    }
}
