//! Beta moment matching and the approximate meta distribution.

use serde::Serialize;
use statrs::function::beta::beta_reg;

use super::{ExposureModel, OmegaSign};
use crate::error::{Error, Result};
use crate::specfun::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaParams {
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
}

impl BetaParams {
    pub fn mean(&self) -> f64 {
        self.alpha_tilde / (self.alpha_tilde + self.beta_tilde)
    }

    /// E[X²] = α(α+1)/((α+β)(α+β+1)).
    pub fn second_moment(&self) -> f64 {
        let (a, b) = (self.alpha_tilde, self.beta_tilde);
        a * (a + 1.0) / ((a + b) * (a + b + 1.0))
    }

    /// P[X > s] = 1 − I_s(α̃, β̃).
    pub fn survival(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        if s >= 1.0 {
            return 0.0;
        }
        (1.0 - beta_reg(self.alpha_tilde, self.beta_tilde, s)).clamp(0.0, 1.0)
    }

    /// Reliability s with survival(s) = level, by bisection.
    pub fn survival_quantile(&self, level: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.survival(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Denominator used in the moment-matching factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MomentDenominator {
    /// M₂ − M₁², the variance; reproduces both moments.
    #[default]
    Variance,
    /// M₂ − M₂², kept for comparison with the printed formula.
    Printed,
}

/// α̃ = M₁ f, β̃ = (1 − M₁) f with f = M₁(1 − M₁)/D − 1.
pub fn beta_fit(m1: f64, m2: f64, denominator: MomentDenominator) -> Result<BetaParams> {
    if !(m1 > 0.0 && m1 < 1.0) {
        return Err(Error::MomentRange(format!("M1 = {m1} must lie in (0, 1)")));
    }
    if !(m2 > 0.0 && m2 < 1.0) {
        return Err(Error::MomentRange(format!("M2 = {m2} must lie in (0, 1)")));
    }
    let variance = m2 - m1 * m1;
    if variance <= 1e-14 * m1 {
        return Err(Error::DegenerateVariance { m1, m2 });
    }
    let d = match denominator {
        MomentDenominator::Variance => variance,
        MomentDenominator::Printed => m2 - m2 * m2,
    };
    let factor = m1 * (1.0 - m1) / d - 1.0;
    let params = BetaParams {
        alpha_tilde: m1 * factor,
        beta_tilde: (1.0 - m1) * factor,
    };
    if !(params.alpha_tilde > 0.0 && params.beta_tilde > 0.0) {
        return Err(Error::MomentRange(format!(
            "moment match gives non-positive shape ({}, {})",
            params.alpha_tilde, params.beta_tilde
        )));
    }
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetaMethod {
    BetaApprox,
    Empirical,
}

impl MetaMethod {
    pub fn tag(self) -> &'static str {
        match self {
            MetaMethod::BetaApprox => "beta-approx",
            MetaMethod::Empirical => "empirical",
        }
    }
}

/// Meta distribution P[F(T|Ψ) > s] over a grid of reliability levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaCurve {
    pub te: f64,
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Binomial standard errors for empirical curves.
    pub stderr: Option<Vec<f64>>,
    pub method: MetaMethod,
}

impl MetaCurve {
    /// Reliability s where the curve falls to `level`, by linear interpolation.
    pub fn quantile_at(&self, level: f64) -> Option<f64> {
        for i in 1..self.s_grid.len() {
            let (v0, v1) = (self.values[i - 1], self.values[i]);
            if v0 >= level && v1 <= level && v0 > v1 {
                let t = (v0 - level) / (v0 - v1);
                return Some(self.s_grid[i - 1] + t * (self.s_grid[i] - self.s_grid[i - 1]));
            }
        }
        None
    }

    /// sup_s |self − other| on a shared grid.
    pub fn sup_distance(&self, other: &MetaCurve) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Beta-approximate meta curve from given moments.
pub fn meta_from_moments(
    te: f64,
    m1: f64,
    m2: f64,
    s_grid: &[f64],
    denominator: MomentDenominator,
) -> Result<MetaCurve> {
    let params = beta_fit(m1, m2, denominator)?;
    Ok(MetaCurve {
        te,
        s_grid: s_grid.to_vec(),
        values: s_grid.iter().map(|&s| params.survival(s)).collect(),
        stderr: None,
        method: MetaMethod::BetaApprox,
    })
}

impl ExposureModel {
    /// Beta-approximate meta distribution at threshold `te` (W/m²).
    pub fn meta_beta(&self, te: f64, s_grid: &[f64], spec: &QuadratureSpec) -> Result<MetaCurve> {
        if let Some(&s) = s_grid.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
            return Err(Error::Domain(format!("reliability levels must lie in (0, 1), got {s}")));
        }
        let terms = self.moment_terms(te, self.envelope_cutoff(), true)?;
        let m1 = terms.m1();
        let m2 = terms.m2(OmegaSign::Derived, (spec.abs_tol * 1e3).max(1e-4))?;
        meta_from_moments(te, m1, m2, s_grid, MomentDenominator::Variance)
    }
}
