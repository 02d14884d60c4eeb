//! Property checks shared by the `properties` and `acceptance` targets.
//!
//! Each property drives its own proptest runner so the acceptance harness
//! can report it on one line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use metaemf::analytic::{beta_fit, CfMethod, ExposureModel, MomentDenominator, OmegaSign};
use metaemf::antenna::{multicosine_gain, side_lobe_extrema, theoretical_gain};
use metaemf::model::*;
use metaemf::montecarlo::{conditional_cdf_table, sample_exposures, DrawMode, McPlan};
use metaemf::ppp::{sample_realization, Lane, PppRealization, StreamId};
use metaemf::specfun::{appell_f1, gauss_2f1, gen_binom, QuadratureSpec};
use metaemf::{ConfigDocument, NetworkConfig};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;

pub struct Property {
    pub name: &'static str,
    pub cases: u32,
    pub run: fn(u32) -> Result<(), String>,
}

pub const PROPERTIES: &[Property] = &[
    Property { name: "model.kernel-decreasing", cases: 1000, run: kernel_decreasing },
    Property { name: "model.kappa-cancellation", cases: 1000, run: kappa_cancellation },
    Property { name: "model.unit-round-trips", cases: 1000, run: unit_round_trips },
    Property { name: "specfun.reduction-identities", cases: 1000, run: reduction_identities },
    Property { name: "specfun.binomial-termination", cases: 1000, run: binomial_termination },
    Property { name: "antenna.bounds-and-symmetry", cases: 1000, run: gain_bounds_symmetry },
    Property { name: "antenna.continuity-and-peaks", cases: 1000, run: continuity_and_peaks },
    Property { name: "ppp.radii-in-annulus", cases: 1000, run: radii_in_annulus },
    Property { name: "ppp.unit-aggregation", cases: 1000, run: unit_aggregation },
    Property { name: "ppp.stream-independence", cases: 1000, run: stream_independence },
    Property { name: "analytic.cf-bounded-and-conjugate", cases: 1000, run: cf_bounded },
    Property { name: "analytic.beta-round-trip", cases: 1000, run: beta_round_trip },
    // each case needs two full moment evaluations
    Property { name: "analytic.moment-consistency", cases: 48, run: moment_consistency },
    Property { name: "montecarlo.moment-bounds", cases: 1000, run: mc_moment_bounds },
    Property { name: "montecarlo.determinism", cases: 200, run: mc_determinism },
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn reference() -> &'static ExposureModel {
    static MODEL: OnceLock<ExposureModel> = OnceLock::new();
    MODEL.get_or_init(|| ExposureModel::new(NetworkConfig::reference()).unwrap())
}

fn config_strategy() -> impl Strategy<Value = NetworkConfig> {
    (2.05f64..6.0, 0.0f64..100.0, 0.0f64..80.0, 0.5f64..5.0, 0.0f64..50.0, 1u32..6).prop_map(|(alpha, z, p_t, tau, r_e, m)| {
        let doc = ConfigDocument {
            alpha,
            z,
            p_t,
            tau,
            r_e,
            m_fading: m as f64,
            ..ConfigDocument::reference()
        };
        NetworkConfig::from_document(&doc).unwrap()
    })
}

fn kernel_decreasing(cases: u32) -> Result<(), String> {
    run(cases, (config_strategy(), 0.0f64..5000.0, 1e-6f64..5000.0), |(cfg, r1, dr)| {
        prop_assert!(cfg.mean_power_kernel(r1) > cfg.mean_power_kernel(r1 + dr));
        prop_assert!(cfg.mean_power_kernel(r1 + dr) > 0.0);
        Ok(())
    })
}

fn kappa_cancellation(cases: u32) -> Result<(), String> {
    run(cases, (config_strategy(), 0.0f64..5000.0), |(cfg, r)| {
        let via_loss = cfg.transmit_power() * cfg.path_loss(r) * cfg.kappa() / (4.0 * PI);
        prop_assert!(rel(via_loss, cfg.mean_power_kernel(r)) < 1e-12);
        Ok(())
    })
}

fn unit_round_trips(cases: u32) -> Result<(), String> {
    run(cases, (-200.0f64..200.0, 1e-6f64..1e6), |(dbm, x)| {
        prop_assert!(rel(watt_to_dbm(dbm_to_watt(dbm)), dbm) < 1e-12 || dbm.abs() < 1e-9);
        prop_assert!(rel(dbm_to_watt(watt_to_dbm(x)), x) < 1e-12);
        prop_assert!(rel(m_to_km(km_to_m(x)), x) < 1e-12);
        prop_assert!(rel(per_m2_to_per_km2(per_km2_to_per_m2(x)), x) < 1e-12);
        Ok(())
    })
}

fn complex(lo: f64, hi: f64, im: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, -im..im).prop_map(|(re, im)| Complex64::new(re, im))
}

fn disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn reduction_identities(cases: u32) -> Result<(), String> {
    let params = (
        complex(0.2, 3.0, 0.5),
        complex(0.2, 3.0, 0.5),
        complex(-2.0, 3.0, 1.0),
        complex(-2.0, 3.0, 1.0),
        // arguments reach well outside the unit disk, as in the exponents
        prop_oneof![disk(0.9), (-6.0f64..6.0).prop_map(|im| Complex64::new(0.0, im))],
    );
    run(cases, params, |(a, dc, b1, b2, z)| {
        let spec = QuadratureSpec::default();
        let c = a + dc;
        let zero = Complex64::new(0.0, 0.0);
        let f = appell_f1(a, b1, b2, c, z, zero, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let g = gauss_2f1(b1, a, c, z, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(crel(f, g) < 1e-10, "z2 = 0: {f} vs {g}");
        let f = appell_f1(a, b1, b2, c, z, z, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let g = gauss_2f1(b1 + b2, a, c, z, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(crel(f, g) < 1e-10, "z2 = z1: {f} vs {g}");
        Ok(())
    })
}

fn binomial_termination(cases: u32) -> Result<(), String> {
    run(cases, (1u32..20, 0u32..30), |(m, extra)| {
        prop_assert_eq!(gen_binom((m - 1) as f64, m + extra), 0.0);
        prop_assert_eq!(gen_binom(-0.5, 0), 1.0);
        Ok(())
    })
}

fn pattern_strategy() -> impl Strategy<Value = (usize, usize)> {
    (2usize..512).prop_flat_map(|n| (Just(n), 0..=max_side_lobe_index(n)))
}

fn gain_bounds_symmetry(cases: u32) -> Result<(), String> {
    run(cases, (pattern_strategy(), -PI / 3.0..PI / 3.0), |((n, k), phi)| {
        let pattern = side_lobe_extrema(n, k).unwrap();
        let g = multicosine_gain(phi, &pattern);
        prop_assert!((0.0..=1.0).contains(&g));
        prop_assert_eq!(g, multicosine_gain(-phi, &pattern));
        let t = theoretical_gain(phi, n);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
        prop_assert!((t - theoretical_gain(-phi, n)).abs() < 1e-12);
        Ok(())
    })
}

fn continuity_and_peaks(cases: u32) -> Result<(), String> {
    run(cases, pattern_strategy(), |(n, k)| {
        let pattern = side_lobe_extrema(n, k).unwrap();
        let nf = n as f64;
        let chi = pattern.chi();
        let x = pattern.x();
        prop_assert_eq!(chi[0], 1.0);
        prop_assert!(x.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(chi[1..].windows(2).all(|w| w[0] > w[1]));
        for b in 1..=k + 1 {
            let edge = 2.0 * b as f64 / nf;
            let jump = multicosine_gain(edge * (1.0 - 1e-15), &pattern) - multicosine_gain(edge * (1.0 + 1e-15), &pattern);
            prop_assert!(jump.abs() < 1e-12, "edge {b}: jump {jump}");
        }
        for (j, &c) in chi.iter().enumerate().skip(1) {
            let peak = multicosine_gain((2 * j + 1) as f64 / nf, &pattern);
            prop_assert!((peak - c).abs() < 1e-8);
            prop_assert!(c > 0.0 && c <= 1.0);
        }
        Ok(())
    })
}

fn sparse_config() -> impl Strategy<Value = NetworkConfig> {
    (0.0f64..20.0, 0.1f64..3.0, 0.0f64..50.0).prop_filter_map("r_e below tau", |(lambda, tau, r_e)| {
        let doc = ConfigDocument {
            lambda_bs: lambda,
            tau,
            r_e,
            ..ConfigDocument::reference()
        };
        NetworkConfig::from_document(&doc).ok()
    })
}

fn radii_in_annulus(cases: u32) -> Result<(), String> {
    run(cases, (sparse_config(), any::<u64>(), any::<u64>()), |(cfg, seed, idx)| {
        let p = sample_realization(&cfg, StreamId::new(seed, idx, Lane::Geometry));
        for &r in &p.radii {
            prop_assert!(r >= cfg.exclusion_radius() && r <= cfg.radius());
        }
        Ok(())
    })
}

fn unit_aggregation(cases: u32) -> Result<(), String> {
    let model = reference();
    let cfg = model.config();
    let radii = proptest::collection::vec(cfg.exclusion_radius()..cfg.radius(), 0..40);
    run(cases, (radii, any::<u64>()), |(radii, seed)| {
        let p = PppRealization::from_radii(radii);
        let draws = sample_exposures(cfg, model.pattern(), &p, 5, StreamId::new(seed, 0, Lane::Time), DrawMode::Unit);
        let exact: f64 = p.radii.iter().map(|&r| cfg.mean_power_kernel(r)).sum();
        for s in draws {
            prop_assert!((s - exact).abs() <= 1e-12 * exact.max(f64::MIN_POSITIVE));
        }
        Ok(())
    })
}

fn stream_independence(cases: u32) -> Result<(), String> {
    let lane = prop_oneof![Just(Lane::Geometry), Just(Lane::Time), Just(Lane::Aux)];
    run(cases, (any::<u64>(), any::<u64>(), lane.clone(), any::<u64>(), any::<u64>(), lane), |(s1, r1, l1, s2, r2, l2)| {
        let a = StreamId::new(s1, r1, l1);
        let b = StreamId::new(s2, r2, l2);
        let (mut ga, mut gb) = (a.rng(), b.rng());
        let da: [u64; 4] = std::array::from_fn(|_| ga.random());
        let db: [u64; 4] = std::array::from_fn(|_| gb.random());
        prop_assert_eq!(a == b, da == db);
        Ok(())
    })
}

fn cf_bounded(cases: u32) -> Result<(), String> {
    let model = reference();
    let cfg = model.config();
    let radii = proptest::collection::vec(cfg.exclusion_radius()..cfg.radius(), 0..30);
    run(cases, (radii, 2.0f64..11.0, 1e-8f64..1e-2), |(radii, log_q, te)| {
        let q = 10f64.powf(log_q);
        let p = PppRealization::from_radii(radii);
        let phi = model.cf_conditional(q, &p);
        prop_assert!(phi.norm() <= 1.0 + 1e-12);
        let phi_e = model.cf_unconditioned(q, CfMethod::Radial, &QuadratureSpec::default()).unwrap();
        prop_assert!(phi_e.norm() <= 1.0 + 1e-12);
        let x = phi * Complex64::from_polar(1.0, -q * te);
        let j = Complex64::new(0.0, 1.0);
        let via_conj = (x - x.conj()) / (2.0 * j);
        prop_assert!((via_conj.re - x.im).abs() <= 1e-15 && via_conj.im.abs() <= 1e-15);
        Ok(())
    })
}

fn beta_round_trip(cases: u32) -> Result<(), String> {
    run(cases, (0.01f64..0.99, 0.001f64..0.999, 0.0f64..1.0, 0.0f64..1.0), |(m1, frac, s1, s2)| {
        // m1² < m2 < m1
        let m2 = m1 * m1 + frac * (m1 - m1 * m1);
        let p = beta_fit(m1, m2, MomentDenominator::Variance).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!((p.mean() - m1).abs() < 1e-10);
        prop_assert!((p.second_moment() - m2).abs() < 1e-10);
        let (lo, hi) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
        prop_assert!(p.survival(lo) >= p.survival(hi));
        Ok(())
    })
}

fn moment_consistency(cases: u32) -> Result<(), String> {
    let model = reference();
    let cutoff = model.envelope_cutoff();
    run(cases, (-60.0f64..-10.0, 0.1f64..5.0, 0.01f64..0.99), |(te_dbm, step, s)| {
        let lo = model.moment_terms(dbm_to_watt(te_dbm), cutoff, true).unwrap();
        let hi = model.moment_terms(dbm_to_watt(te_dbm + step), cutoff, true).unwrap();
        for t in [&lo, &hi] {
            let (m1, m2) = (t.m1(), t.m2_raw(OmegaSign::Derived));
            prop_assert!((-1e-6..=1.0 + 1e-6).contains(&m1));
            prop_assert!(m2 <= m1 + 1e-6, "m2 {m2} > m1 {m1}");
            prop_assert!(m2 >= m1 * m1 - 1e-6, "m2 {m2} < m1² {}", m1 * m1);
        }
        prop_assert!(hi.m1() >= lo.m1() - 1e-7);
        let fit = |t: &metaemf::analytic::MomentTerms| {
            beta_fit(t.m1(), t.m2(OmegaSign::Derived, 1e-4).ok()?, MomentDenominator::Variance).ok()
        };
        if let (Some(a), Some(b)) = (fit(&lo), fit(&hi)) {
            prop_assert!(b.survival(s) >= a.survival(s) - 1e-6);
        }
        Ok(())
    })
}

fn mc_moment_bounds(cases: u32) -> Result<(), String> {
    let model = reference();
    let grid: Vec<f64> = (0..6).map(|i| dbm_to_watt(-60.0 + 10.0 * i as f64)).collect();
    run(cases, (any::<u64>(), 1usize..4, 1usize..20), |(seed, n_real, n_time)| {
        let plan = McPlan::new(n_real, n_time, seed, grid.clone(), vec![]).unwrap();
        let table = conditional_cdf_table(&plan, model.config(), model.pattern()).unwrap();
        for row in &table.rows {
            prop_assert!(row.windows(2).all(|w| w[0] <= w[1]));
        }
        let m = table.moments();
        for j in 0..m.len() {
            prop_assert!((0.0..=1.0).contains(&m.m1[j]) && (0.0..=1.0).contains(&m.m2[j]));
            prop_assert!(m.m2[j] <= m.m1[j]);
        }
        Ok(())
    })
}

fn mc_determinism(cases: u32) -> Result<(), String> {
    let model = reference();
    let grid = vec![dbm_to_watt(-45.0), dbm_to_watt(-35.0)];
    run(cases, (any::<u64>(), 1usize..6), |(seed, n_real)| {
        let plan = McPlan::new(n_real, 10, seed, grid.clone(), vec![]).unwrap();
        let a = conditional_cdf_table(&plan, model.config(), model.pattern()).unwrap();
        let b = conditional_cdf_table(&plan, model.config(), model.pattern()).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        Ok(())
    })
}
