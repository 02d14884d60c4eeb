//! Complex Gamma function (Lanczos, g = 7, n = 9) with reflection for Re z < 1/2.

use std::f64::consts::PI;

use num_complex::Complex64;

#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::from(PI) / (s * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::from(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm()
    }

    #[test]
    fn real_values() {
        assert!(close(gamma(1.0.into()), 1.0.into(), 1e-14));
        assert!(close(gamma(5.0.into()), 24.0.into(), 1e-14));
        assert!(close(gamma(0.5.into()), PI.sqrt().into(), 1e-14));
        assert!(close(gamma((-0.5).into()), (-2.0 * PI.sqrt()).into(), 1e-13));
        assert!(close(gamma(Complex64::new(3.7, 0.0)), statrs::function::gamma::gamma(3.7).into(), 1e-13));
    }

    #[test]
    fn complex_value() {
        // Γ(1 + i)
        let g = gamma(Complex64::new(1.0, 1.0));
        assert!(close(g, Complex64::new(0.498_015_668_118_356, -0.154_949_828_301_810_7), 1e-13));
    }

    #[test]
    fn recurrence() {
        let z = Complex64::new(0.3, -1.7);
        assert!(close(gamma(z + 1.0), z * gamma(z), 1e-13));
    }
}
