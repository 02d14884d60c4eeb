//! Gauss ₂F₁ and Appell F₁ through their Euler integral representations.
//!
//! Only the region where the Euler integral converges is supported; no
//! analytic continuation is attempted. Endpoint singularities of the kernel
//! are absorbed by tanh-sinh quadrature on [0, 1].

use num_complex::Complex64;

use super::gamma::gamma;
use super::quad::tanh_sinh_unit;
use super::QuadratureSpec;
use crate::error::{Error, Result};

const MAX_DE_LEVEL: usize = 12;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `1 − t·z` stays off the branch cut of the principal power for every
/// t ∈ [0, 1] unless z is real and ≥ 1.
fn segment_clear_of_cut(z: Complex64) -> bool {
    !(z.im == 0.0 && z.re >= 1.0) && z.re.is_finite() && z.im.is_finite()
}

/// Complex power of a positive real base given through its logarithm.
fn pow_from_ln(ln_base: f64, exponent: Complex64) -> Complex64 {
    (exponent * ln_base).exp()
}

/// ₂F₁(a, b; c; z) from
/// Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^(b−1) (1−t)^(c−b−1) (1−tz)^(−a) dt.
///
/// ₂F₁ is symmetric in (a, b); when only the swapped pair satisfies
/// Re c > Re b > 0 the roles are exchanged.
pub fn gauss_2f1(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let valid = |b: Complex64| c.re > b.re && b.re > 0.0;
    let (a, b) = if valid(b) {
        (a, b)
    } else if valid(a) {
        (b, a)
    } else {
        return Err(Error::Domain(format!(
            "2F1 Euler integral needs Re c > Re b > 0 (a = {a}, b = {b}, c = {c})"
        )));
    };
    if !segment_clear_of_cut(z) {
        return Err(Error::Domain(format!("2F1 argument {z} on the branch cut")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(one());
    }
    let e1 = b - 1.0;
    let e2 = c - b - 1.0;
    let integral = tanh_sinh_unit(
        |t: f64, tc: f64| {
            pow_from_ln(t.ln(), e1) * pow_from_ln(tc.ln(), e2) * (one() - z * t).powc(-a)
        },
        1e-300,
        spec.rel_tol,
        MAX_DE_LEVEL,
    )?;
    Ok(gamma(c) / (gamma(b) * gamma(c - b)) * integral.value)
}

/// Appell F₁(a; b₁, b₂; c; z₁, z₂) from
/// Γ(c)/(Γ(a)Γ(c−a)) ∫₀¹ t^(a−1) (1−t)^(c−a−1) (1−tz₁)^(−b₁) (1−tz₂)^(−b₂) dt.
pub fn appell_f1(
    a: Complex64,
    b1: Complex64,
    b2: Complex64,
    c: Complex64,
    z1: Complex64,
    z2: Complex64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(c.re > a.re && a.re > 0.0) {
        return Err(Error::Domain(format!(
            "F1 Euler integral needs Re c > Re a > 0 (a = {a}, c = {c})"
        )));
    }
    if !segment_clear_of_cut(z1) || !segment_clear_of_cut(z2) {
        return Err(Error::Domain(format!(
            "F1 arguments {z1}, {z2} make 1 - t z vanish or cross the cut"
        )));
    }
    let e1 = a - 1.0;
    let e2 = c - a - 1.0;
    let integral = tanh_sinh_unit(
        |t: f64, tc: f64| {
            pow_from_ln(t.ln(), e1)
                * pow_from_ln(tc.ln(), e2)
                * (one() - z1 * t).powc(-b1)
                * (one() - z2 * t).powc(-b2)
        },
        1e-300,
        spec.rel_tol,
        MAX_DE_LEVEL,
    )?;
    Ok(gamma(c) / (gamma(a) * gamma(c - a)) * integral.value)
}
