//! Semi-infinite oscillatory integrals of the Gil-Pelaez form
//! ∫₀^∞ Im[g(q)] / q dq.
//!
//! The range is cut into panels: geometric panels below half an oscillation
//! period, then half-period panels. Each panel is integrated adaptively and
//! the partial sums are extrapolated with Wynn's ε-algorithm, which handles
//! the slowly decaying alternating tails typical of characteristic functions
//! with atoms or algebraic decay.

use num_complex::Complex64;

use super::quad::{adaptive_gk, Estimate};
use super::QuadratureSpec;
use crate::error::{Error, Result};

/// Number of geometric panels covering (0, period/2].
const GEOMETRIC_PANELS: i32 = 48;
/// Envelope level, relative to |g(0)|, below which the tail is dropped.
const ENVELOPE_CUTOFF: f64 = 1e-8;

/// Incremental Wynn ε-algorithm on a scalar sequence.
#[derive(Debug, Default)]
pub struct WynnEpsilon {
    diagonal: Vec<f64>,
    estimates: Vec<f64>,
}

impl WynnEpsilon {
    /// Upper bound on table width; older columns add noise rather than accuracy.
    const MAX_WIDTH: usize = 40;

    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the next partial sum and returns the current extrapolated limit.
    pub fn push(&mut self, s: f64) -> f64 {
        let mut next = Vec::with_capacity(self.diagonal.len() + 1);
        next.push(s);
        for k in 0..self.diagonal.len() {
            let delta = next[k] - self.diagonal[k];
            if delta == 0.0 || !delta.is_finite() {
                break;
            }
            let before = if k == 0 { 0.0 } else { self.diagonal[k - 1] };
            let value = before + 1.0 / delta;
            if !value.is_finite() {
                break;
            }
            next.push(value);
        }
        next.truncate(Self::MAX_WIDTH);
        self.diagonal = next;
        let last_even = (self.diagonal.len() - 1) & !1;
        let estimate = self.diagonal[last_even];
        self.estimates.push(estimate);
        estimate
    }

    /// Spread of the last three extrapolated values.
    pub fn error(&self) -> f64 {
        let n = self.estimates.len();
        if n < 3 {
            return f64::INFINITY;
        }
        let e = &self.estimates[n - 3..];
        (e[2] - e[1]).abs() + (e[1] - e[0]).abs()
    }
}

/// ∫₀^∞ Im[g(q)] / q dq for a complex function `g` whose oscillation has
/// period `period` in q, with `Im[g(q)]/q` finite as q → 0⁺.
pub fn oscillatory_semi_infinite<G>(g: G, period: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    G: Fn(f64) -> Complex64,
{
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Domain(format!("oscillation period must be positive, got {period}")));
    }
    let reference = g(0.0).norm();
    let floor = if reference > 0.0 {
        ENVELOPE_CUTOFF * reference
    } else {
        0.0
    };
    let integrand = |q: f64| -> f64 {
        let v = g(q);
        v.im / q
    };
    let panel_tol = spec.abs_tol / 64.0;
    let half = 0.5 * period;

    // (0, half]: one panel near zero, then geometric growth
    let mut edges = vec![0.0];
    for k in (0..GEOMETRIC_PANELS).rev() {
        edges.push(half * 2f64.powi(-k));
    }
    let mut total = 0.0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1].min(spec.truncation_q_max));
        if b <= a {
            break;
        }
        let est = adaptive_gk(integrand, a, b, panel_tol, spec.rel_tol, spec.max_subdivisions)?;
        if !est.value.is_finite() {
            return Err(Error::NonFinite(b));
        }
        total += est.value;
        error += est.error;
    }
    if half >= spec.truncation_q_max {
        return finish(total, error, spec);
    }

    // half-period panels with extrapolation
    let mut wynn = WynnEpsilon::new();
    wynn.push(total);
    let mut q = half;
    let mut stable = 0;
    let mut panels = 0usize;
    loop {
        let upper = (q + half).min(spec.truncation_q_max);
        let est = adaptive_gk(integrand, q, upper, panel_tol, spec.rel_tol, spec.max_subdivisions)?;
        if !est.value.is_finite() {
            return Err(Error::NonFinite(upper));
        }
        total += est.value;
        error += est.error;
        q = upper;
        panels += 1;

        let envelope = g(q).norm();
        // integration by parts: |tail| ≲ 2·|g(q)| / (q·T) = |g(q)|·period/(π q)
        let tail_bound = envelope * period / (std::f64::consts::PI * q);
        if spec.taper && (envelope <= floor || tail_bound <= 0.1 * spec.abs_tol) {
            return finish(total, error + tail_bound, spec);
        }

        let extrapolated = wynn.push(total);
        let spread = wynn.error();
        if panels >= 6 && spread <= 0.1 * spec.abs_tol {
            stable += 1;
            if stable >= 2 {
                return finish(extrapolated, error + spread, spec);
            }
        } else {
            stable = 0;
        }
        if q >= spec.truncation_q_max || panels >= spec.max_subdivisions {
            let err = error + spread.min(tail_bound);
            if err <= spec.abs_tol {
                let value = if spread < tail_bound { extrapolated } else { total };
                return Ok(Estimate { value, error: err });
            }
            return Err(Error::NonConvergence {
                what: "oscillatory semi-infinite integral",
                estimate: extrapolated,
                error: err,
            });
        }
    }
}

fn finish(value: f64, error: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if error > spec.abs_tol * 10.0 {
        return Err(Error::NonConvergence {
            what: "oscillatory semi-infinite integral",
            estimate: value,
            error,
        });
    }
    Ok(Estimate { value, error })
}
