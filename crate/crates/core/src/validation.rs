//! Paired analytic and Monte-Carlo checks, one group per acceptance criterion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{beta_fit, CfMethod, ExposureModel, MomentDenominator, MomentTerms, OmegaSign};
use crate::antenna::{multicosine_gain, side_lobe_extrema, theoretical_gain};
use crate::error::Result;
use crate::model::{dbm_to_watt, max_side_lobe_index, NetworkConfig};
use crate::montecarlo::{cf_estimate, conditional_cdf_table, ConditionalTable, McPlan};
use crate::specfun::{appell_f1, gauss_2f1, oscillatory_semi_infinite, QuadratureSpec};

/// One line of the validation report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tol: f64,
    /// Monte-Carlo standard error of `observed`, when it is an MC quantity.
    pub stderr: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// Passes when |observed − expected| ≤ tol.
    pub fn near(name: impl Into<String>, expected: f64, observed: f64, tol: f64, stderr: Option<f64>) -> Self {
        Self {
            name: name.into(),
            expected,
            observed,
            tol,
            stderr,
            pass: (observed - expected).abs() <= tol,
        }
    }

    /// Negative control: passes when the distance `observed` exceeds tol.
    pub fn exceeds(name: impl Into<String>, observed: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            expected: 0.0,
            observed,
            tol,
            stderr: None,
            pass: observed > tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub master_seed: u64,
    pub n_realizations: usize,
    pub n_time: usize,
    /// Multiplies every tolerance; values below 1 tighten the suite.
    pub tol_scale: f64,
    /// Randomized parameter sets for the special-function checks.
    pub special_cases: usize,
    #[serde(skip)]
    pub spec: QuadratureSpec,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            master_seed: 1,
            n_realizations: 1000,
            n_time: 1000,
            tol_scale: 1.0,
            special_cases: 100,
            spec: QuadratureSpec::default(),
        }
    }
}

impl SuiteOptions {
    fn tol(&self, t: f64) -> f64 {
        t * self.tol_scale
    }
}

/// Beta-approximate meta values at the criterion points for one exclusion radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub r_e: f64,
    pub median_dbm: f64,
    pub meta_m32_s069: f64,
    pub meta_m23_s090: f64,
    pub meta_m41_s090: f64,
    /// Reliability where the −41 dBm/m² curve equals 0.9.
    pub quantile_m41: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub sensitivity: Vec<SensitivityRow>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Threshold grid −60…−10 dBm/m² in 0.5 dB steps.
pub fn default_grid_dbm() -> Vec<f64> {
    (0..=100).map(|i| -60.0 + 0.5 * i as f64).collect()
}

/// Reliability grid 0.01…0.99.
pub fn default_s_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// The default side-lobe count clipped to what N admits.
pub fn sweep_k_max(n: usize) -> usize {
    9.min(max_side_lobe_index(n))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn pochhammer_step(x: Complex64, n: usize) -> Complex64 {
    x + n as f64
}

/// ₂F₁ by its power series, for |z| well inside the unit disk.
fn series_2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..2000 {
        term *= pochhammer_step(a, n) * pochhammer_step(b, n) / (pochhammer_step(c, n) * (n + 1) as f64) * z;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// F₁ = Σ_m (a)_m (b₁)_m / ((c)_m m!) z₁^m ₂F₁(a+m, b₂; c+m; z₂).
fn series_f1(a: Complex64, b1: Complex64, b2: Complex64, c: Complex64, z1: Complex64, z2: Complex64) -> Complex64 {
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut sum = series_2f1(a, b2, c, z2);
    for m in 0..2000 {
        coeff *= pochhammer_step(a, m) * pochhammer_step(b1, m) / (pochhammer_step(c, m) * (m + 1) as f64) * z1;
        let term = coeff * series_2f1(a + (m + 1) as f64, b2, c + (m + 1) as f64, z2);
        sum += term;
        if coeff.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

fn random_disk<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.random::<f64>(), PI * (2.0 * rng.random::<f64>() - 1.0))
}

fn random_complex<R: Rng>(rng: &mut R, lo: f64, hi: f64, im: f64) -> Complex64 {
    Complex64::new(rng.random_range(lo..hi), rng.random_range(-im..im))
}

/// Criterion 1: ₂F₁/F₁ against series oracles and reduction identities,
/// and Gil-Pelaez inversion of the unit exponential.
pub fn special_functions(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let spec = &opts.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.master_seed);
    let (mut worst_2f1, mut worst_f1, mut worst_red) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..opts.special_cases {
        let a = random_complex(&mut rng, -1.5, 2.5, 0.5);
        let b = random_complex(&mut rng, 0.3, 2.5, 0.3);
        let c = b + random_complex(&mut rng, 0.3, 2.5, 0.3);
        let z = random_disk(&mut rng, 0.6);
        worst_2f1 = worst_2f1.max(rel(gauss_2f1(a, b, c, z, spec)?, series_2f1(a, b, c, z)));

        let a = random_complex(&mut rng, 0.3, 2.5, 0.3);
        let c = a + random_complex(&mut rng, 0.3, 2.5, 0.3);
        let b1 = random_complex(&mut rng, -1.5, 2.5, 0.5);
        let b2 = random_complex(&mut rng, -1.5, 2.5, 0.5);
        let z1 = random_disk(&mut rng, 0.5);
        let z2 = random_disk(&mut rng, 0.5);
        worst_f1 = worst_f1.max(rel(appell_f1(a, b1, b2, c, z1, z2, spec)?, series_f1(a, b1, b2, c, z1, z2)));

        let zero = Complex64::new(0.0, 0.0);
        let lhs = appell_f1(a, b1, b2, c, z1, zero, spec)?;
        worst_red = worst_red.max(rel(lhs, gauss_2f1(b1, a, c, z1, spec)?));
        let lhs = appell_f1(a, b1, b2, c, z1, z1, spec)?;
        worst_red = worst_red.max(rel(lhs, gauss_2f1(b1 + b2, a, c, z1, spec)?));
    }

    let mut worst_gp = 0.0f64;
    for i in 1..=40 {
        let t = 0.25 * i as f64;
        let g = |q: f64| Complex64::new(1.0, 0.0) / Complex64::new(1.0, -q) * Complex64::from_polar(1.0, -q * t);
        let est = oscillatory_semi_infinite(g, 2.0 * PI / t, spec)?;
        worst_gp = worst_gp.max((0.5 - est.value / PI - (1.0 - (-t).exp())).abs());
    }

    Ok(vec![
        Check::near("c1.2f1-vs-series", 0.0, worst_2f1, opts.tol(1e-8), None),
        Check::near("c1.f1-vs-series", 0.0, worst_f1, opts.tol(1e-8), None),
        Check::near("c1.f1-reductions", 0.0, worst_red, opts.tol(1e-8), None),
        Check::near("c1.gil-pelaez-exponential", 0.0, worst_gp, opts.tol(1e-5), None),
    ])
}

/// Maximum of `f` on [lo, hi] by a dense scan refined with golden sections.
fn numeric_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n = 2000;
    let h = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + h * i as f64)
        .max_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap_or(lo);
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) < f(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    f(0.5 * (a + b))
}

/// Criterion 2: multi-cosine peaks, agreement with the exact ULA gain, continuity.
pub fn antenna(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [16usize, 64, 256] {
        let pattern = side_lobe_extrema(n, sweep_k_max(n))?;
        let nf = n as f64;
        let chi = pattern.chi();
        let (mut peak, mut exact, mut jump) = (0.0f64, 0.0f64, 0.0f64);
        for (k, &c) in chi.iter().enumerate().skip(1) {
            let mid = (2 * k + 1) as f64 / nf;
            peak = peak.max((multicosine_gain(mid, &pattern) - c).abs());
            let lo = (2.0 * k as f64 / nf).asin();
            let hi = (2.0 * (k + 1) as f64 / nf).asin();
            exact = exact.max((numeric_max(|phi| theoretical_gain(phi, n), lo, hi) - c).abs());
        }
        for k in 1..=pattern.k_max() + 1 {
            let b = 2.0 * k as f64 / nf;
            let left = multicosine_gain(b * (1.0 - 1e-15), &pattern);
            let right = multicosine_gain(b * (1.0 + 1e-15), &pattern);
            jump = jump.max((left - right).abs());
        }
        checks.push(Check::near(format!("c2.n{n}.peaks-equal-chi"), 0.0, peak, opts.tol(1e-15), None));
        checks.push(Check::near(format!("c2.n{n}.peaks-vs-exact-gain"), 0.0, exact, opts.tol(1e-6), None));
        checks.push(Check::near(format!("c2.n{n}.continuity"), 0.0, jump, opts.tol(1e-12), None));
    }
    Ok(checks)
}

/// Criterion 3: closed-form vs radial φ_E over six decades, and both vs MC.
pub fn cf_dual_path(cfg: &NetworkConfig, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let model = ExposureModel::new(cfg.clone())?;
    let spec = &opts.spec;
    let mut worst = 0.0f64;
    for i in 0..=12 {
        let q = 10f64.powf(3.0 + 0.5 * i as f64);
        let a = model.cf_unconditioned(q, CfMethod::ClosedForm, spec)?;
        let b = model.cf_unconditioned(q, CfMethod::Radial, spec)?;
        worst = worst.max(rel(a, b));
    }
    let mut checks = vec![Check::near("c3.closed-vs-radial", 0.0, worst, opts.tol(1e-6), None)];

    let qs = [1e4, 1e5, 1e6, 1e7];
    let mc = cf_estimate(cfg, model.pattern(), &qs, opts.n_realizations.max(2), 16, opts.master_seed)?;
    for est in &mc {
        for (label, method) in [("closed", CfMethod::ClosedForm), ("radial", CfMethod::Radial)] {
            let exact = model.cf_unconditioned(est.q, method, spec)?;
            checks.push(Check {
                name: format!("c3.{label}-vs-mc.q{:e}", est.q),
                expected: 0.0,
                observed: (exact - est.value).norm(),
                tol: opts.tol(3.0 * est.stderr),
                stderr: Some(est.stderr),
                pass: (exact - est.value).norm() <= opts.tol(3.0 * est.stderr),
            });
        }
    }
    Ok(checks)
}

/// Analytic moment terms and the MC table on the default grid.
pub struct MomentRun {
    pub grid_dbm: Vec<f64>,
    pub analytic: Vec<MomentTerms>,
    pub table: ConditionalTable,
}

pub fn moment_run(cfg: &NetworkConfig, opts: &SuiteOptions) -> Result<MomentRun> {
    let model = ExposureModel::new(cfg.clone())?;
    let grid_dbm = default_grid_dbm();
    let grid: Vec<f64> = grid_dbm.iter().map(|&d| dbm_to_watt(d)).collect();
    let cutoff = model.envelope_cutoff();
    let analytic = crate::par_map(&grid, |&te| model.moment_terms(te, cutoff, true))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let plan = McPlan::new(opts.n_realizations, opts.n_time, opts.master_seed, grid, vec![])?;
    let table = conditional_cdf_table(&plan, cfg, model.pattern())?;
    Ok(MomentRun {
        grid_dbm,
        analytic,
        table,
    })
}

/// Criteria 4 and 5: moment curves against MC, with both printed ω signs as negative controls.
pub fn moments(run: &MomentRun, opts: &SuiteOptions) -> Vec<Check> {
    let mc = run.table.moments();
    let sup = |f: &dyn Fn(&MomentTerms) -> f64, mc_values: &[f64], mc_err: &[f64]| {
        run.analytic
            .iter()
            .zip(mc_values.iter().zip(mc_err))
            .map(|(t, (&m, &e))| ((f(t) - m).abs(), e))
            .fold((0.0f64, 0.0f64), |acc, x| if x.0 > acc.0 { x } else { acc })
    };
    let (d1, e1) = sup(&|t| t.m1(), &mc.m1, &mc.err1);
    let m1: Vec<f64> = run.analytic.iter().map(|t| t.m1()).collect();
    let median = crate::analytic::crossing_point(&run.grid_dbm, &m1, 0.5).unwrap_or(f64::NAN);
    let mut checks = vec![
        Check::near("c4.m1-vs-mc", 0.0, d1, opts.tol(0.02), Some(e1)),
        Check::near("c4.median-crossing-dbm", -38.0, median, opts.tol(1.5), None),
    ];
    for sign in OmegaSign::ALL {
        let (d2, e2) = sup(&|t| t.m2_raw(sign), &mc.m2, &mc.err2);
        checks.push(match sign {
            OmegaSign::Derived => Check::near("c5.m2-vs-mc", 0.0, d2, opts.tol(0.02), Some(e2)),
            _ => Check::exceeds(format!("c5.negative-control.{}", sign.tag()), d2, opts.tol(0.02)),
        });
    }
    checks
}

fn beta_params(model: &ExposureModel, te_dbm: f64) -> Result<crate::analytic::BetaParams> {
    let terms = model.moment_terms(dbm_to_watt(te_dbm), model.envelope_cutoff(), true)?;
    beta_fit(terms.m1(), terms.m2(OmegaSign::Derived, 1e-4)?, MomentDenominator::Variance)
}

fn sensitivity_row(cfg: &NetworkConfig, r_e: f64, opts: &SuiteOptions) -> Result<SensitivityRow> {
    let model = ExposureModel::new(cfg.with_exclusion_radius(r_e)?)?;
    let grid = default_grid_dbm();
    let te: Vec<f64> = grid.iter().map(|&d| dbm_to_watt(d)).collect();
    let curve = model.moment_curve(&te, OmegaSign::Derived, false, &opts.spec)?;
    let p32 = beta_params(&model, -32.0)?;
    let p23 = beta_params(&model, -23.0)?;
    let p41 = beta_params(&model, -41.0)?;
    Ok(SensitivityRow {
        r_e,
        median_dbm: crate::analytic::crossing_point(&grid, &curve.m1, 0.5).unwrap_or(f64::NAN),
        meta_m32_s069: p32.survival(0.69),
        meta_m23_s090: p23.survival(0.90),
        meta_m41_s090: p41.survival(0.90),
        quantile_m41: p41.survival_quantile(0.9),
    })
}

/// Criterion 6 meta values, the alternative reading of the −41 dBm/m² point,
/// and the sensitivity to the exclusion radius.
pub fn meta_points(cfg: &NetworkConfig, opts: &SuiteOptions) -> Result<(Vec<Check>, Vec<SensitivityRow>)> {
    let mut radii = vec![1.0, 10.0, 50.0, cfg.exclusion_radius()];
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let rows = radii
        .iter()
        .map(|&r| sensitivity_row(cfg, r, opts))
        .collect::<Result<Vec<_>>>()?;
    let base = rows
        .iter()
        .find(|r| r.r_e == cfg.exclusion_radius())
        .expect("configured radius is in the list");
    let checks = vec![
        Check::near("c6.meta(-32,0.69)", 0.90, base.meta_m32_s069, opts.tol(0.03), None),
        Check::near("c6.meta(-23,0.90)", 0.90, base.meta_m23_s090, opts.tol(0.03), None),
        Check::near("c6.meta(-41,0.90)", 0.22, base.meta_m41_s090, opts.tol(0.04), None),
        Check::near("c6.alt.quantile(-41,0.90)", 0.22, base.quantile_m41, opts.tol(0.04), None),
    ];
    Ok((checks, rows))
}

/// Criteria 7 and 8: reliability at meta = 0.9 for N ∈ {16, 64, 256}, and
/// the beta-vs-empirical sup distance at −32 dBm/m².
pub fn antenna_sweep(cfg: &NetworkConfig, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let te_dbm = -32.0;
    let s_grid = default_s_grid();
    let mut checks = Vec::new();
    for (n, target) in [(16usize, 0.14), (64, 0.69), (256, 0.92)] {
        let ncfg = cfg.with_antennas(n, sweep_k_max(n))?;
        let model = ExposureModel::new(ncfg.clone())?;
        let params = beta_params(&model, te_dbm)?;
        checks.push(Check::near(
            format!("c7.n{n}.reliability-at-0.9"),
            target,
            params.survival_quantile(0.9),
            opts.tol(0.05),
            None,
        ));
        let plan = McPlan::new(opts.n_realizations, opts.n_time, opts.master_seed, vec![dbm_to_watt(te_dbm)], vec![])?;
        let empirical = conditional_cdf_table(&plan, &ncfg, model.pattern())?.meta(0, &s_grid);
        let (dist, se) = s_grid
            .iter()
            .zip(empirical.values.iter().zip(empirical.stderr.as_deref().unwrap_or(&[])))
            .map(|(&s, (&v, &e))| ((params.survival(s) - v).abs(), e))
            .fold((0.0f64, 0.0f64), |acc, x| if x.0 > acc.0 { x } else { acc });
        checks.push(Check::near(format!("c8.n{n}.beta-vs-empirical"), 0.0, dist, opts.tol(0.05), Some(se)));
    }
    Ok(checks)
}

/// Criterion 9 (determinism part): identical bytes for 1, 2 and all workers.
pub fn determinism(cfg: &NetworkConfig, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let model = ExposureModel::new(cfg.clone())?;
    let grid: Vec<f64> = [-50.0, -38.0, -25.0].iter().map(|&d| dbm_to_watt(d)).collect();
    let plan = McPlan::new(64, 200, opts.master_seed, grid, vec![])?;
    let run = |workers: Option<usize>| -> Result<String> {
        let table = crate::with_workers(workers, || conditional_cdf_table(&plan, cfg, model.pattern()))??;
        Ok(serde_json::to_string(&table)?)
    };
    let reference = run(Some(1))?;
    let mismatches = [Some(2), None]
        .into_iter()
        .map(run)
        .collect::<Result<Vec<_>>>()?
        .iter()
        .filter(|s| **s != reference)
        .count();
    Ok(vec![Check::near("c9.determinism-across-workers", 0.0, mismatches as f64, 0.0, None)])
}

/// Every criterion, in order.
pub fn run_all(cfg: &NetworkConfig, opts: &SuiteOptions) -> Result<Report> {
    let mut checks = special_functions(opts)?;
    checks.extend(antenna(opts)?);
    checks.extend(cf_dual_path(cfg, opts)?);
    checks.extend(moments(&moment_run(cfg, opts)?, opts));
    let (meta, sensitivity) = meta_points(cfg, opts)?;
    checks.extend(meta);
    checks.extend(antenna_sweep(cfg, opts)?);
    checks.extend(determinism(cfg, opts)?);
    Ok(Report { checks, sensitivity })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_oracles() {
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.3, -0.2);
        let log = -(one - z).ln() / z;
        assert!(rel(series_2f1(one, one, one * 2.0, z), log) < 1e-14);
        // F₁ with z₂ = 0 is ₂F₁
        let (a, b1, b2, c) = (one * 0.7, one * 1.3, one * 2.2, one * 2.9);
        assert!(rel(series_f1(a, b1, b2, c, z, Complex64::new(0.0, 0.0)), series_2f1(a, b1, c, z)) < 1e-14);
    }

    #[test]
    fn special_function_checks_pass() {
        let opts = SuiteOptions {
            special_cases: 10,
            ..SuiteOptions::default()
        };
        for c in special_functions(&opts).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn forced_tolerance_fails() {
        let opts = SuiteOptions {
            special_cases: 3,
            tol_scale: 1e-12,
            ..SuiteOptions::default()
        };
        assert!(special_functions(&opts).unwrap().iter().any(|c| !c.pass));
    }

    #[test]
    fn antenna_checks_pass() {
        for c in antenna(&SuiteOptions::default()).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }
}
