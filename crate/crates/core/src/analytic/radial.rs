//! Fixed radial rule for the PGFL exponents.
//!
//! Integrals ∫_{r_e}^{τ} f(r) r dr are mapped to t = ln(r² + z²), where the
//! mean power S̄ = P_t e^{−αt/2}/(4π) is a plain exponential. ζ(qχS̄/m) then
//! has its nearest complex singularity at distance π/α from the real t axis
//! for every q, so composite Gauss-Legendre panels of fixed width give
//! near machine precision independent of q.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::ExposureModel;
use crate::model::NetworkConfig;
use crate::specfun::CompositeRule;

const PANEL_WIDTH: f64 = 0.5;
const PANEL_POINTS: usize = 8;

#[derive(Debug, Clone)]
pub struct RadialRule {
    radii: Vec<f64>,
    /// Weights for ∫ f(r) r dr.
    weights: Vec<f64>,
    powers: Vec<f64>,
    total: f64,
}

impl RadialRule {
    pub fn new(cfg: &NetworkConfig) -> Self {
        Self::with_panels(cfg, PANEL_WIDTH, PANEL_POINTS)
    }

    pub fn with_panels(cfg: &NetworkConfig, width: f64, points: usize) -> Self {
        let z2 = cfg.height() * cfg.height();
        let lo = (cfg.exclusion_radius().powi(2) + z2).ln();
        let hi = (cfg.radius().powi(2) + z2).ln();
        let rule = CompositeRule::uniform(lo, hi, width, points);
        let mut radii = Vec::with_capacity(rule.len());
        let mut weights = Vec::with_capacity(rule.len());
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let e = t.exp();
            // r dr = ½ d(r²) = ½ e^t dt
            radii.push((e - z2).max(0.0).sqrt());
            weights.push(0.5 * e * w);
        }
        let powers = radii.iter().map(|&r| cfg.mean_power_kernel(r)).collect();
        let total = weights.iter().sum();
        Self {
            radii,
            weights,
            powers,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Rule value of ∫ r dr = (τ² − r_e²)/2.
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    /// −2πλ ∫ (1 − φ₁(q, r)) r dr.
    pub fn cf_exponent(&self, model: &ExposureModel, q: f64) -> Complex64 {
        if q == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (&w, &s) in self.weights.iter().zip(&self.powers) {
            acc += (1.0 - model.per_bs_cf_at_power(q, s)) * w;
        }
        acc * (-2.0 * PI * model.config().density())
    }

    /// −2πλ ∫ (1 − φ₁(q, r) φ₁(q2, r)) r dr; a negative q2 conjugates its factor.
    pub fn gamma_exponent(&self, model: &ExposureModel, q: f64, q2: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&w, &s) in self.weights.iter().zip(&self.powers) {
            let a = model.per_bs_cf_at_power(q, s);
            let b = model.per_bs_cf_at_power(q2, s);
            acc += (1.0 - a * b) * w;
        }
        acc * (-2.0 * PI * model.config().density())
    }

    /// E|φ(q|Ψ)|² − P[S = 0 twice]: decays to zero as q grows.
    pub(crate) fn second_moment_envelope(&self, model: &ExposureModel, q: f64) -> f64 {
        let lambda = model.config().density();
        let mut acc = 0.0;
        for (&w, &s) in self.weights.iter().zip(&self.powers) {
            acc += (1.0 - model.per_bs_cf_at_power(q, s).norm_sqr()) * w;
        }
        let k0 = model.zero_gain_probability();
        let floor = (-2.0 * PI * lambda * (1.0 - k0 * k0) * self.total).exp();
        ((-2.0 * PI * lambda * acc).exp() - floor).max(0.0)
    }
}
