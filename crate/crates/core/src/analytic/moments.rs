//! First and second moments of the conditional CDF through a fixed
//! Gil-Pelaez rule.
//!
//! For a threshold T write H(Ψ) = ∫₀^∞ Im[φ(q|Ψ) e^{−jqT}] q⁻¹ dq, so that
//! F(T|Ψ) = 1/2 − H/π. A fixed rule H ≈ Σ_i Im[c_i φ(q_i|Ψ)] turns the moments
//! into finite sums:
//!
//! M₁ = 1/2 − E[H]/π,   M₂ = 1/4 − E[H]/π + E[H²]/π²,
//! E[H²] = ½ Σ_ik Re[c_i c̄_k γ₋(q_i, q_k) − c_i c_k γ₊(q_i, q_k)].
//!
//! The rule covers (0, q_min] with a one-point slope estimate, [q_min, Q] with
//! Gauss-Legendre panels (logarithmic until a panel would exceed half an
//! oscillation period, then half-period panels), (Q, ∞) by one integration
//! by parts, and carries the zero-exposure atom on a node at q = ∞ where
//! every per-BS factor equals κ₀.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use serde::Serialize;

use super::ExposureModel;
use crate::error::{Error, Result};
use crate::specfun::{gauss_legendre, QuadratureSpec};

const LOG_PANEL_WIDTH: f64 = 0.5;
const PANEL_POINTS: usize = 8;
/// The rule stops at Q = TAIL_PHASE / T unless the CF envelope vanishes earlier.
const TAIL_PHASE: f64 = 300.0;
/// q_min·(T + S̄(r_e)) is held at this value.
const LOW_PHASE: f64 = 1e-3;
/// E|φ(q|Ψ)|² level treated as negligible.
const ENVELOPE_FLOOR: f64 = 1e-14;

/// Sign convention for ω(q, q') in the second moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaSign {
    /// ω = ½Re[γ₋ v₁v̄₂] − ½Re[γ₊ v₁v₂], from Im x = (x − x̄)/(2j).
    Derived,
    /// ω = ½Re[γ₋ v₁v̄₂ + γ₊ v₁v₂].
    TheoremPrinted,
    /// ω = ½Re[γ₊ v₁v₂] − ½Re[γ₋ v₁v̄₂].
    AppendixPrinted,
}

impl OmegaSign {
    pub const ALL: [OmegaSign; 3] = [OmegaSign::Derived, OmegaSign::TheoremPrinted, OmegaSign::AppendixPrinted];

    pub fn tag(self) -> &'static str {
        match self {
            OmegaSign::Derived => "derived",
            OmegaSign::TheoremPrinted => "theorem-printed",
            OmegaSign::AppendixPrinted => "appendix-printed",
        }
    }

    fn index(self) -> usize {
        match self {
            OmegaSign::Derived => 0,
            OmegaSign::TheoremPrinted => 1,
            OmegaSign::AppendixPrinted => 2,
        }
    }
}

/// Nodes and complex coefficients of the fixed Gil-Pelaez rule for one T.
#[derive(Debug, Clone)]
pub struct GilPelaezRule {
    te: f64,
    nodes: Vec<f64>,
    coeffs: Vec<Complex64>,
    /// Coefficient of the q = ∞ node.
    atom: Complex64,
    tail_q: f64,
}

impl GilPelaezRule {
    pub fn new(te: f64, q_min: f64, q_end: f64) -> Self {
        let half_period = PI / te;
        let q_end = q_end.max(q_min * 4.0);
        let (gx, gw) = gauss_legendre(PANEL_POINTS);
        let phase = |q: f64| Complex64::from_polar(1.0, -q * te);
        let mut nodes = Vec::new();
        let mut coeffs = Vec::new();

        // (0, q_min]: Im[φ e^{−jqT}]/q is flat near 0, so the piece is Im[·] at q_min
        nodes.push(q_min);
        coeffs.push(phase(q_min));

        let mut lo = q_min;
        while lo < q_end * (1.0 - 1e-12) {
            let log_hi = lo * LOG_PANEL_WIDTH.exp();
            if log_hi - lo <= half_period {
                let hi = log_hi.min(q_end);
                let (ua, ub) = (lo.ln(), hi.ln());
                let (c, h) = (0.5 * (ua + ub), 0.5 * (ub - ua));
                for (x, w) in gx.iter().zip(&gw) {
                    let q = (c + h * x).exp();
                    nodes.push(q);
                    coeffs.push(phase(q) * (h * w));
                }
                lo = hi;
            } else {
                let hi = (lo + half_period).min(q_end);
                let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (x, w) in gx.iter().zip(&gw) {
                    let q = c + h * x;
                    nodes.push(q);
                    coeffs.push(phase(q) * (h * w / q));
                }
                lo = hi;
            }
        }

        // ∫_Q^∞ ψ(q) e^{−jqT}/q dq ≈ ψ(Q) e^{−jQT}/(jQT)
        let tail = phase(q_end) / Complex64::new(0.0, q_end * te);
        nodes.push(q_end);
        coeffs.push(tail);

        // φ = ψ + φ(∞); the constant contributes −φ(∞)π/2 exactly and is
        // removed from every finite node
        let sum: Complex64 = coeffs.iter().sum();
        let atom = -sum - Complex64::new(0.0, PI / 2.0);
        Self {
            te,
            nodes,
            coeffs,
            atom,
            tail_q: q_end,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.te
    }

    /// Finite nodes, in the order of `coefficients`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn atom_coefficient(&self) -> Complex64 {
        self.atom
    }

    pub fn tail_start(&self) -> f64 {
        self.tail_q
    }

    pub fn len(&self) -> usize {
        self.nodes.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// H for a CF given at the finite nodes and its limit at infinity.
    pub fn apply(&self, values: &[Complex64], limit: f64) -> f64 {
        let finite: f64 = self.coeffs.iter().zip(values).map(|(c, v)| (c * v).im).sum();
        finite + (self.atom * limit).im
    }

    /// F(T) = 1/2 − H/π for the CF `phi` with atom `limit` at zero.
    pub fn cdf(&self, phi: impl Fn(f64) -> Complex64, limit: f64) -> f64 {
        let values: Vec<Complex64> = self.nodes.iter().map(|&q| phi(q)).collect();
        0.5 - self.apply(&values, limit) / PI
    }
}

/// Raw ingredients of M₁ and M₂ at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentTerms {
    pub te: f64,
    /// E[H].
    pub mean_h: f64,
    /// E[H²] under each ω sign convention, indexed like `OmegaSign::ALL`.
    pub mean_h2: [f64; 3],
    /// Truncation estimate for M₁.
    pub error: f64,
}

impl MomentTerms {
    pub fn m1(&self) -> f64 {
        0.5 - self.mean_h / PI
    }

    /// M₂ without any range check.
    pub fn m2_raw(&self, sign: OmegaSign) -> f64 {
        0.25 - self.mean_h / PI + self.mean_h2[sign.index()] / (PI * PI)
    }

    /// M₂ after checking m1² − tol ≤ m2 ≤ m1 + tol and 2m1 − 1 − tol ≤ m2.
    pub fn m2(&self, sign: OmegaSign, tol: f64) -> Result<f64> {
        let m1 = self.m1().clamp(0.0, 1.0);
        let m2 = self.m2_raw(sign);
        let lower = (m1 * m1).max(2.0 * m1 - 1.0);
        if !m2.is_finite() || m2 > m1 + tol || m2 < lower - tol {
            return Err(Error::MomentRange(format!(
                "M2 = {m2} outside [{lower}, {m1}] at T = {:e} W/m2 ({sign:?} convention)",
                self.te
            )));
        }
        Ok(m2.clamp(0.0, m1))
    }
}

/// M₁ and M₂ over a threshold grid (W/m²).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCurve {
    pub te_grid: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    /// Error estimate of m1: quadrature truncation, or MC standard error.
    pub err1: Vec<f64>,
    pub err2: Vec<f64>,
}

impl MomentCurve {
    pub fn len(&self) -> usize {
        self.te_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.te_grid.is_empty()
    }

    /// Threshold where M₁ crosses 1/2, by linear interpolation in the grid variable.
    pub fn median_crossing(&self) -> Option<f64> {
        crossing_point(&self.te_grid, &self.m1, 0.5)
    }

    /// Grid point with the largest M₁ − M₂.
    pub fn max_gap(&self) -> Option<(f64, f64)> {
        self.te_grid
            .iter()
            .zip(self.m1.iter().zip(&self.m2))
            .map(|(&t, (a, b))| (t, a - b))
            .max_by(|x, y| x.1.total_cmp(&y.1))
    }
}

/// First upward crossing of `level` by y(x), linearly interpolated.
pub fn crossing_point(x: &[f64], y: &[f64], level: f64) -> Option<f64> {
    for i in 1..x.len() {
        let (y0, y1) = (y[i - 1] - level, y[i] - level);
        if y0 <= 0.0 && y1 >= 0.0 && y1 > y0 {
            return Some(x[i - 1] + (x[i] - x[i - 1]) * (-y0) / (y1 - y0));
        }
    }
    None
}

impl ExposureModel {
    /// Smallest q on a quarter-decade scan where E|φ(q|Ψ)|² (minus its atom
    /// floor) drops below 1e-14; infinity if it never does.
    pub fn envelope_cutoff(&self) -> f64 {
        let rule = self.radial_rule();
        let s_max = self.config().mean_power_kernel(self.config().exclusion_radius());
        let mut q = 1.0 / s_max;
        for _ in 0..120 {
            if rule.second_moment_envelope(self, q) <= ENVELOPE_FLOOR {
                return q;
            }
            q *= 10f64.powf(0.25);
        }
        f64::INFINITY
    }

    /// Fixed Gil-Pelaez rule for threshold `te`.
    pub fn gil_pelaez_rule(&self, te: f64, envelope_cutoff: f64) -> GilPelaezRule {
        let s_max = self.config().mean_power_kernel(self.config().exclusion_radius());
        let q_min = LOW_PHASE / (te + s_max);
        let q_end = envelope_cutoff.min(TAIL_PHASE / te);
        GilPelaezRule::new(te, q_min, q_end)
    }

    /// φ₁(q, r_j) on the radial nodes for every rule node (last row: q = ∞).
    fn per_bs_table(&self, rule: &GilPelaezRule) -> (Array2<f64>, Array2<f64>) {
        let powers = self.radial_rule().powers();
        let rows = rule.nodes().len() + 1;
        let mut re = Array2::zeros((rows, powers.len()));
        let mut im = Array2::zeros((rows, powers.len()));
        for (i, &q) in rule.nodes().iter().enumerate() {
            for (j, &s) in powers.iter().enumerate() {
                let v = self.per_bs_cf_at_power(q, s);
                re[[i, j]] = v.re;
                im[[i, j]] = v.im;
            }
        }
        re.row_mut(rows - 1).fill(self.zero_gain_probability());
        (re, im)
    }

    /// E[H] and, when `second` is set, E[H²] for all sign conventions.
    pub fn moment_terms(&self, te: f64, envelope_cutoff: f64, second: bool) -> Result<MomentTerms> {
        super::check_threshold(te)?;
        let rule = self.gil_pelaez_rule(te, envelope_cutoff);
        let (x, y) = self.per_bs_table(&rule);
        let weights = Array1::from(self.radial_rule().weights().to_vec());
        let total = self.radial_rule().total_weight();
        let scale = -2.0 * PI * self.config().density();

        let mut coeffs = rule.coefficients().to_vec();
        coeffs.push(rule.atom_coefficient());

        // E[φ(q_i|Ψ)] = exp(−2πλ Σ_j W_j (1 − φ₁(q_i, r_j)))
        let sx = x.dot(&weights);
        let sy = y.dot(&weights);
        let mut mean_h = 0.0;
        for (i, c) in coeffs.iter().enumerate() {
            let phi = (Complex64::new(total - sx[i], -sy[i]) * scale).exp();
            mean_h += (c * phi).im;
        }
        if !mean_h.is_finite() {
            return Err(Error::NonFinite(te));
        }

        let tail_q = rule.tail_start();
        let envelope = self.radial_rule().second_moment_envelope(self, tail_q).sqrt();
        let error = 2.0 * envelope / (tail_q * te).powi(2) / PI + 1e-12;

        let mut mean_h2 = [f64::NAN; 3];
        if second {
            let xw = &x * &weights.view().insert_axis(Axis(0));
            let yw = &y * &weights.view().insert_axis(Axis(0));
            let xx = xw.dot(&x.t());
            let yy = yw.dot(&y.t());
            let xy = xw.dot(&y.t());
            let n = coeffs.len();
            let (mut s_minus, mut s_plus) = (0.0, 0.0);
            for i in 0..n {
                let ci = coeffs[i];
                let (mut acc_minus, mut acc_plus) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for k in 0..n {
                    let (a, b, cxy, cyx) = (xx[[i, k]], yy[[i, k]], xy[[i, k]], xy[[k, i]]);
                    let g_plus = (Complex64::new(total - (a - b), -(cxy + cyx)) * scale).exp();
                    let g_minus = (Complex64::new(total - (a + b), -(cyx - cxy)) * scale).exp();
                    acc_minus += coeffs[k].conj() * g_minus;
                    acc_plus += coeffs[k] * g_plus;
                }
                s_minus += (ci * acc_minus).re;
                s_plus += (ci * acc_plus).re;
            }
            mean_h2 = [
                0.5 * (s_minus - s_plus),
                0.5 * (s_minus + s_plus),
                0.5 * (s_plus - s_minus),
            ];
            if mean_h2.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(te));
            }
        }
        Ok(MomentTerms {
            te,
            mean_h,
            mean_h2,
            error,
        })
    }

    /// M₂(T) with the chosen ω convention, range-checked.
    pub fn moment2(&self, te: f64, sign: OmegaSign, spec: &QuadratureSpec) -> Result<f64> {
        let terms = self.moment_terms(te, self.envelope_cutoff(), true)?;
        terms.m2(sign, m2_tolerance(spec))
    }

    /// M₁ (and M₂ if `second`) on a threshold grid in W/m².
    pub fn moment_curve(
        &self,
        te_grid: &[f64],
        sign: OmegaSign,
        second: bool,
        spec: &QuadratureSpec,
    ) -> Result<MomentCurve> {
        let cutoff = self.envelope_cutoff();
        let terms = crate::par_map(te_grid, |&te| self.moment_terms(te, cutoff, second));
        let tol = m2_tolerance(spec);
        let mut curve = MomentCurve {
            te_grid: te_grid.to_vec(),
            m1: Vec::with_capacity(te_grid.len()),
            m2: Vec::with_capacity(te_grid.len()),
            err1: Vec::with_capacity(te_grid.len()),
            err2: Vec::with_capacity(te_grid.len()),
        };
        for t in terms {
            let t = t?;
            let m1 = t.m1().clamp(0.0, 1.0);
            curve.m1.push(m1);
            curve.err1.push(t.error);
            if second {
                curve.m2.push(t.m2(sign, tol)?);
                curve.err2.push(2.0 * t.error);
            } else {
                curve.m2.push(f64::NAN);
                curve.err2.push(f64::NAN);
            }
        }
        Ok(curve)
    }
}

/// Slack allowed on the M₂ range check.
fn m2_tolerance(spec: &QuadratureSpec) -> f64 {
    (spec.abs_tol * 1e3).max(1e-4)
}
