//! Cross-route checks that need more than one module.

use metaemf::analytic::{CfMethod, ExposureModel, GammaSign};
use metaemf::model::dbm_to_watt;
use metaemf::montecarlo::empirical_conditional_cdf;
use metaemf::ppp::{sample_realization, Lane, PppRealization, StreamId};
use metaemf::specfun::QuadratureSpec;
use metaemf::NetworkConfig;
use num_complex::Complex64;

fn mean_and_stderr(values: &[Complex64]) -> (Complex64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<Complex64>() / n;
    let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn layouts(cfg: &NetworkConfig, seed: u64, n: u64) -> Vec<PppRealization> {
    (0..n)
        .map(|i| sample_realization(cfg, StreamId::new(seed, i, Lane::Geometry)))
        .collect()
}

#[test]
fn gamma_routes_agree_at_ground_level() {
    let model = ExposureModel::new(NetworkConfig::reference().with_height(0.0).unwrap()).unwrap();
    let spec = QuadratureSpec::default();
    let qs = [3e3, 3e4, 3e5, 3e6, 3e7];
    for &q in &qs {
        for &q2 in &qs {
            for sign in [GammaSign::Plus, GammaSign::Minus] {
                let a = model.gamma_pm(q, q2, sign, CfMethod::ClosedForm, &spec).unwrap();
                let b = model.gamma_pm(q, q2, sign, CfMethod::Radial, &spec).unwrap();
                assert!((a - b).norm() / b.norm() < 1e-5, "({q}, {q2}, {sign:?}): {a} vs {b}");
            }
        }
    }
}

#[test]
fn unconditioned_cf_is_the_layout_average() {
    let model = ExposureModel::new(NetworkConfig::reference()).unwrap();
    let spec = QuadratureSpec::default();
    let ps = layouts(model.config(), 21, 1000);
    for q in [1e4, 1e5, 1e6] {
        let samples: Vec<Complex64> = ps.iter().map(|p| model.cf_conditional(q, p)).collect();
        let (mean, se) = mean_and_stderr(&samples);
        for method in [CfMethod::ClosedForm, CfMethod::Radial] {
            let exact = model.cf_unconditioned(q, method, &spec).unwrap();
            assert!((exact - mean).norm() < 3.0 * se, "q = {q}: {exact} vs {mean} ± {se}");
        }
    }
}

#[test]
fn gamma_plus_is_the_layout_average() {
    let model = ExposureModel::new(NetworkConfig::reference()).unwrap();
    let spec = QuadratureSpec::default();
    let ps = layouts(model.config(), 22, 1000);
    for (q, q2) in [(1e5, 3e5), (1e6, 1e6), (3e4, 2e6)] {
        let samples: Vec<Complex64> = ps
            .iter()
            .map(|p| model.cf_conditional(q, p) * model.cf_conditional(q2, p))
            .collect();
        let (mean, se) = mean_and_stderr(&samples);
        let exact = model.gamma_pm(q, q2, GammaSign::Plus, CfMethod::Radial, &spec).unwrap();
        assert!((exact - mean).norm() < 3.0 * se, "({q}, {q2}): {exact} vs {mean} ± {se}");
        let samples: Vec<Complex64> = ps
            .iter()
            .map(|p| model.cf_conditional(q, p) * model.cf_conditional(q2, p).conj())
            .collect();
        let (mean, se) = mean_and_stderr(&samples);
        let exact = model.gamma_pm(q, q2, GammaSign::Minus, CfMethod::Radial, &spec).unwrap();
        assert!((exact - mean).norm() < 3.0 * se, "({q}, {q2}) minus: {exact} vs {mean} ± {se}");
    }
}

#[test]
fn doubling_time_draws_halves_the_variance() {
    let model = ExposureModel::new(NetworkConfig::reference()).unwrap();
    let layout = sample_realization(model.config(), StreamId::new(5, 0, Lane::Geometry));
    let te = [dbm_to_watt(-38.0)];
    let reps = 600u64;
    let variance = |n_time: usize, offset: u64| {
        let f: Vec<f64> = (0..reps)
            .map(|i| {
                let s = StreamId::new(6, offset + i, Lane::Time);
                empirical_conditional_cdf(model.config(), model.pattern(), &layout, &te, n_time, s).unwrap()[0]
            })
            .collect();
        let mean = f.iter().sum::<f64>() / reps as f64;
        f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64
    };
    let ratio = variance(100, 0) / variance(200, reps);
    // sample-variance ratio of two 600-draw sets has relative spread ≈ √(4/600)
    let sigma = 2.0 * (4.0 / reps as f64).sqrt();
    assert!((ratio - 2.0).abs() < 3.0 * sigma, "ratio {ratio}");
}
