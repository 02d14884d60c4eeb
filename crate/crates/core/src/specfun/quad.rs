//! Quadrature building blocks: adaptive Gauss–Kronrod, tanh-sinh on [0, 1],
//! and Gauss–Legendre node generation for fixed composite rules.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values a quadrature rule can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// An integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V = f64> {
    pub value: V,
    pub error: f64,
}

#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Gauss–Kronrod panel. Returns the Kronrod value, the
/// |Kronrod − Gauss| error and the largest |f| seen at the nodes.
pub fn gk21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (Estimate<V>, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK21[10];
    let mut gauss = V::zero();
    let mut peak = fc.magnitude();
    for j in 0..10 {
        let dx = half * XGK21[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        peak = peak.max(f1.magnitude()).max(f2.magnitude());
        let pair = f1 + f2;
        kronrod = kronrod + pair * WGK21[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG10[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (
        Estimate {
            value: kronrod,
            error: (kronrod - gauss).magnitude(),
        },
        peak,
    )
}

struct Segment<V> {
    a: f64,
    b: f64,
    est: Estimate<V>,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration on `[a, b]`, bisecting the
/// panel with the largest error until the total error drops below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gk<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Estimate<V>> {
    if a == b {
        return Ok(Estimate {
            value: V::zero(),
            error: 0.0,
        });
    }
    let (first, _) = gk21(&mut f, a, b);
    check_finite(first.value, a)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, est: first });
    let mut splits = 0;
    while total_err > abs_tol.max(rel_tol * total.magnitude()) {
        if splits >= max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive Gauss-Kronrod",
                estimate: total.magnitude(),
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(worst);
            break;
        }
        let (left, _) = gk21(&mut f, worst.a, mid);
        let (right, _) = gk21(&mut f, mid, worst.b);
        check_finite(left.value, worst.a)?;
        check_finite(right.value, mid)?;
        total = total - worst.est.value + left.value + right.value;
        total_err += left.error + right.error - worst.est.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            est: right,
        });
        splits += 1;
    }
    // re-sum to shed accumulated rounding from the incremental updates
    let mut value = V::zero();
    let mut error = 0.0;
    for seg in heap.iter() {
        value = value + seg.est.value;
        error += seg.est.error;
    }
    Ok(Estimate { value, error })
}

fn check_finite<V: QuadValue>(v: V, at: f64) -> Result<()> {
    if v.magnitude().is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(at))
    }
}

/// Half-width of the tanh-sinh abscissa range; at x = 6 the mapped point
/// sits about 1e-275 from the endpoint.
const DE_X_MAX: f64 = 6.0;

/// Tanh-sinh (double-exponential) quadrature on [0, 1].
///
/// The integrand receives both `t` and `1 − t`, each computed without
/// cancellation, so algebraic endpoint singularities such as
/// `t^(b−1) (1−t)^(c−b−1)` can be evaluated accurately right up to the ends.
pub fn tanh_sinh_unit<V: QuadValue, F: FnMut(f64, f64) -> V>(
    mut f: F,
    abs_tol: f64,
    rel_tol: f64,
    max_level: usize,
) -> Result<Estimate<V>> {
    use std::f64::consts::FRAC_PI_2;
    let mut node = |x: f64| -> V {
        let y = FRAC_PI_2 * x.sinh();
        let t = 1.0 / (1.0 + (-2.0 * y).exp());
        let tc = 1.0 / (1.0 + (2.0 * y).exp());
        let w = std::f64::consts::PI * x.cosh() * t * tc;
        if w == 0.0 || t == 0.0 || tc == 0.0 {
            return V::zero();
        }
        f(t, tc) * w
    };

    let mut h = 0.5;
    let n0 = (DE_X_MAX / h) as i64;
    let mut sum = node(0.0);
    for i in 1..=n0 {
        let x = i as f64 * h;
        sum = sum + node(x) + node(-x);
    }
    check_finite(sum, 0.5)?;
    let mut estimate = sum * h;
    let mut last_diff = f64::INFINITY;
    for _level in 1..=max_level {
        h *= 0.5;
        let n = (DE_X_MAX / h) as i64;
        let mut odd = V::zero();
        let mut i = 1;
        while i <= n {
            let x = i as f64 * h;
            odd = odd + node(x) + node(-x);
            i += 2;
        }
        check_finite(odd, 0.5)?;
        sum = sum + odd;
        let refined = sum * h;
        let diff = (refined - estimate).magnitude();
        estimate = refined;
        if diff <= abs_tol.max(rel_tol * estimate.magnitude()) {
            return Ok(Estimate {
                value: estimate,
                error: diff,
            });
        }
        last_diff = diff;
    }
    Err(Error::NonConvergence {
        what: "tanh-sinh",
        estimate: estimate.magnitude(),
        error: last_diff,
    })
}

/// Gauss–Legendre nodes and weights on [−1, 1] via Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A fixed composite Gauss–Legendre rule: nodes and weights for
/// ∫ g(x) dx over a sequence of panels.
#[derive(Debug, Clone, Default)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Appends a Gauss–Legendre panel `[a, b]` using reference nodes `(x, w)`.
    pub fn push_panel(&mut self, a: f64, b: f64, reference: &(Vec<f64>, Vec<f64>)) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (x, w) in reference.0.iter().zip(&reference.1) {
            self.nodes.push(c + h * x);
            self.weights.push(h * w);
        }
    }

    /// Uniform panels of width at most `max_width` on `[a, b]`.
    pub fn uniform(a: f64, b: f64, max_width: f64, points: usize) -> Self {
        let reference = gauss_legendre(points);
        let panels = (((b - a) / max_width).ceil() as usize).max(1);
        let width = (b - a) / panels as f64;
        let mut rule = Self::default();
        for i in 0..panels {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == panels { b } else { lo + width };
            rule.push_panel(lo, hi, &reference);
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<V: QuadValue>(&self, mut f: impl FnMut(f64) -> V) -> V {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(V::zero(), |acc, (&x, &w)| acc + f(x) * w)
    }
}
