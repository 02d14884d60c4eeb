//! Closed-form PGFL exponents.
//!
//! ∫ ζ_k(r, q) r dr has an antiderivative in terms of ₂F₁ for any height z.
//! The product ∫ ζ_k(r, q) ζ_p(r, q') r dr reduces to Appell F₁ only for
//! z = 0, where S̄ is a pure power of r.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::ExposureModel;
use crate::error::{Error, Result};
use crate::specfun::{appell_f1, gauss_2f1, QuadratureSpec};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Σ_l binom(−1/2,l) binom(m−1,l) · T_l(x), the antiderivative of ζ_k(r, q)·r/π
/// evaluated at r = x, for q > 0:
///
/// T_l(x) = −2(x²+z²) ₂F₁(1, 1−l+2/α; 1/2−l+m+2/α; −j/a) / ((4 + α(2m−2l−1)) (ja)^(1−l) (1−ja)^(m−3/2)),
/// a = qχ_kS̄(x)/m.
fn zeta_antiderivative(model: &ExposureModel, x: f64, q: f64, chi: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let cfg = model.config();
    let m = cfg.fading_shape();
    let mf = m as f64;
    let alpha = cfg.alpha();
    let rho = x * x + cfg.height() * cfg.height();
    let a = q * chi * cfg.mean_power_kernel(x) / mf;
    let arg = Complex64::new(0.0, -1.0 / a);
    let denominator_power = Complex64::new(1.0, -a).powf(mf - 1.5);
    let mut acc = c(0.0);
    for (l, &coeff) in model.coeffs.iter().enumerate() {
        let lf = l as f64;
        let f = gauss_2f1(c(1.0), c(1.0 - lf + 2.0 / alpha), c(0.5 - lf + mf + 2.0 / alpha), arg, spec)?;
        let ja_power = Complex64::new(0.0, a).powi(1 - l as i32);
        let denom = (4.0 + alpha * (2.0 * mf - 2.0 * lf - 1.0)) * ja_power * denominator_power;
        acc += coeff * (-2.0 * rho) * f / denom;
    }
    Ok(acc)
}

/// ∫_{r_e}^{τ} ζ_k(r, q) r dr for q ≥ 0.
fn zeta_radial_integral(model: &ExposureModel, q: f64, k: usize, spec: &QuadratureSpec) -> Result<Complex64> {
    let cfg = model.config();
    if q == 0.0 {
        return Ok(c(0.5 * PI * (cfg.radius().powi(2) - cfg.exclusion_radius().powi(2))));
    }
    let chi = model.pattern().chi()[k];
    let upper = zeta_antiderivative(model, cfg.radius(), q, chi, spec)?;
    let lower = zeta_antiderivative(model, cfg.exclusion_radius(), q, chi, spec)?;
    Ok((upper - lower) * PI)
}

/// Same, for any real q (negative q conjugates).
fn zeta_radial_integral_signed(model: &ExposureModel, q: f64, k: usize, spec: &QuadratureSpec) -> Result<Complex64> {
    let v = zeta_radial_integral(model, q.abs(), k, spec)?;
    Ok(if q < 0.0 { v.conj() } else { v })
}

/// ln φ_E(q) = −6λ(1+k_max)/N [r²] + 12λ/(Nπ) Σ_k ∫ ζ_k(r, q) r dr.
pub(super) fn cf_exponent(model: &ExposureModel, q: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if q == 0.0 {
        return Ok(c(0.0));
    }
    let cfg = model.config();
    let lambda = cfg.density();
    let span = cfg.radius().powi(2) - cfg.exclusion_radius().powi(2);
    let mut sum = c(0.0);
    for k in 0..=cfg.k_max() {
        sum += zeta_radial_integral(model, q, k, spec)?;
    }
    let n = cfg.n_antennas() as f64;
    let lobes = (1 + cfg.k_max()) as f64;
    Ok(c(-6.0 * lambda * lobes / n * span) + sum * (12.0 * lambda / (n * PI)))
}

/// (ja)^l (−ja)^(−p) for signed real a, with every power on its principal branch.
fn scaled_power(a: f64, l: usize, p: f64) -> Complex64 {
    let jl = Complex64::new(0.0, a).powi(l as i32);
    // arg(−ja) = −sign(a)·π/2
    jl * Complex64::from_polar(a.abs().powf(-p), a.signum() * PI * p / 2.0)
}

/// z = 0 antiderivative K(X) of ζ_k(r, q) ζ_p(r, q') r dr / π² on [0, X], per (l, l'):
///
/// K = X²/(α e) (ja)^l (jb)^l' (−ja)^(−p) (−jb)^(−p) F₁(e; p, p; e+1; −j/a, −j/b),
/// p = m − 1/2, e = 2m − 1 − l − l' + 2/α, a and b evaluated at X.
fn product_antiderivative(
    model: &ExposureModel,
    x: f64,
    q: f64,
    q2: f64,
    chi: f64,
    chi2: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let cfg = model.config();
    let mf = cfg.fading_shape() as f64;
    let alpha = cfg.alpha();
    let p = mf - 0.5;
    let s = cfg.mean_power_kernel(x);
    let a = q * chi * s / mf;
    let b = q2 * chi2 * s / mf;
    let z1 = Complex64::new(0.0, -1.0 / a);
    let z2 = Complex64::new(0.0, -1.0 / b);
    let mut acc = c(0.0);
    for (l, &cl) in model.coeffs.iter().enumerate() {
        for (l2, &cl2) in model.coeffs.iter().enumerate() {
            let e = 2.0 * mf - 1.0 - (l + l2) as f64 + 2.0 / alpha;
            let f1 = appell_f1(c(e), c(p), c(p), c(e + 1.0), z1, z2, spec)?;
            let pre = x * x / (alpha * e) * scaled_power(a, l, p) * scaled_power(b, l2, p);
            acc += cl * cl2 * pre * f1;
        }
    }
    Ok(acc)
}

/// ∫_{r_e}^{τ} ζ_k(r, q) ζ_p(r, q2) r dr at z = 0, q > 0, q2 ≠ 0 of either sign.
fn product_radial_integral(
    model: &ExposureModel,
    q: f64,
    q2: f64,
    k: usize,
    p: usize,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let cfg = model.config();
    let chi = model.pattern().chi();
    let upper = product_antiderivative(model, cfg.radius(), q, q2, chi[k], chi[p], spec)?;
    let lower = product_antiderivative(model, cfg.exclusion_radius(), q, q2, chi[k], chi[p], spec)?;
    Ok((upper - lower) * (PI * PI))
}

/// ln γ(q, q2) = −2πλ ∫ (1 − φ₁(q, r) φ₁(q2, r)) r dr, with q2 < 0 meaning the
/// conjugate factor. Requires z = 0.
pub(super) fn gamma_exponent(model: &ExposureModel, q: f64, q2: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let cfg = model.config();
    if cfg.height() != 0.0 {
        return Err(Error::Domain(format!(
            "closed-form gamma kernel needs z = 0, got z = {}",
            cfg.height()
        )));
    }
    if q == 0.0 {
        return cf_exponent_signed(model, q2, spec);
    }
    if q2 == 0.0 {
        return cf_exponent_signed(model, q, spec);
    }
    let conj_outer = q < 0.0;
    let (q, q2) = if conj_outer { (-q, -q2) } else { (q, q2) };
    let k0 = model.zero_gain_probability();
    let w = model.lobe_weight();
    let half_span = 0.5 * (cfg.radius().powi(2) - cfg.exclusion_radius().powi(2));
    let mut linear = c(0.0);
    let mut product = c(0.0);
    for k in 0..=cfg.k_max() {
        linear += zeta_radial_integral(model, q, k, spec)?;
        linear += zeta_radial_integral_signed(model, q2, k, spec)?;
        for p in 0..=cfg.k_max() {
            product += product_radial_integral(model, q, q2, k, p, spec)?;
        }
    }
    let inner = c((1.0 - k0 * k0) * half_span) - linear * (k0 * w) - product * (w * w);
    let v = inner * (-2.0 * PI * cfg.density());
    Ok(if conj_outer { v.conj() } else { v })
}

fn cf_exponent_signed(model: &ExposureModel, q: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let v = cf_exponent(model, q.abs(), spec)?;
    Ok(if q < 0.0 { v.conj() } else { v })
}
