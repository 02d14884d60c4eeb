//! Brute-force estimators over PPP realizations and time draws.
//!
//! Each realization owns three RNG lanes derived from (master seed,
//! realization index), so results do not depend on how realizations are
//! spread over workers. Reductions run in realization order.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{MetaCurve, MetaMethod, MomentCurve};
use crate::antenna::{multicosine_gain, UlaPattern};
use crate::error::{Error, Result};
use crate::model::NetworkConfig;
use crate::ppp::{sample_beam_angle, sample_fading, sample_realization, Lane, PppRealization, StreamId};

/// Size and seeding of a Monte-Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McPlan {
    pub n_realizations: usize,
    pub n_time: usize,
    pub master_seed: u64,
    /// Thresholds in W/m², sorted ascending.
    pub te_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
}

impl McPlan {
    pub fn new(n_realizations: usize, n_time: usize, master_seed: u64, te_grid: Vec<f64>, s_grid: Vec<f64>) -> Result<Self> {
        let plan = Self {
            n_realizations,
            n_time,
            master_seed,
            te_grid,
            s_grid,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// 10³ realizations × 10³ time draws.
    pub fn desk(master_seed: u64, te_grid: Vec<f64>, s_grid: Vec<f64>) -> Result<Self> {
        Self::new(1000, 1000, master_seed, te_grid, s_grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_realizations == 0 || self.n_time == 0 {
            return Err(Error::Config("n_realizations and n_time must be at least 1".into()));
        }
        check_sorted(&self.te_grid)
    }
}

fn check_sorted(te_grid: &[f64]) -> Result<()> {
    if te_grid.is_empty() {
        return Err(Error::Config("threshold grid is empty".into()));
    }
    if te_grid.iter().any(|t| !t.is_finite()) || te_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("threshold grid must be finite and sorted".into()));
    }
    Ok(())
}

/// How gains and fadings are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DrawMode {
    #[default]
    Random,
    /// Every gain and fading forced to 1 (test hook).
    Unit,
}

/// `n_time` exposure draws S = Σ S̄(r_i) G(ξ_i) |h_i|² for one layout, sorted.
pub fn sample_exposures(
    cfg: &NetworkConfig,
    pattern: &UlaPattern,
    realization: &PppRealization,
    n_time: usize,
    stream: StreamId,
    mode: DrawMode,
) -> Vec<f64> {
    let powers: Vec<f64> = realization.radii.iter().map(|&r| cfg.mean_power_kernel(r)).collect();
    let m = cfg.fading_shape();
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(n_time);
    for _ in 0..n_time {
        let mut s = 0.0;
        for &p in &powers {
            match mode {
                DrawMode::Unit => s += p,
                DrawMode::Random => {
                    let g = multicosine_gain(sample_beam_angle(&mut rng), pattern);
                    // a null costs no fading draw
                    if g > 0.0 {
                        s += p * g * sample_fading(m, &mut rng);
                    }
                }
            }
        }
        out.push(s);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Fraction of sorted samples strictly below each threshold.
fn rank_cdf(sorted: &[f64], te_grid: &[f64]) -> Vec<f64> {
    let n = sorted.len() as f64;
    te_grid
        .iter()
        .map(|&te| sorted.partition_point(|&s| s < te) as f64 / n)
        .collect()
}

/// Empirical F(T|Ψ) on a sorted threshold grid.
pub fn empirical_conditional_cdf(
    cfg: &NetworkConfig,
    pattern: &UlaPattern,
    realization: &PppRealization,
    te_grid: &[f64],
    n_time: usize,
    stream: StreamId,
) -> Result<Vec<f64>> {
    empirical_conditional_cdf_with(cfg, pattern, realization, te_grid, n_time, stream, DrawMode::Random)
}

pub fn empirical_conditional_cdf_with(
    cfg: &NetworkConfig,
    pattern: &UlaPattern,
    realization: &PppRealization,
    te_grid: &[f64],
    n_time: usize,
    stream: StreamId,
    mode: DrawMode,
) -> Result<Vec<f64>> {
    check_sorted(te_grid)?;
    if n_time == 0 {
        return Err(Error::Config("n_time must be at least 1".into()));
    }
    let sorted = sample_exposures(cfg, pattern, realization, n_time, stream, mode);
    Ok(rank_cdf(&sorted, te_grid))
}

/// Empirical conditional CDFs of every realization in a plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalTable {
    pub te_grid: Vec<f64>,
    /// rows[i][j] = F̂(te_grid[j] | Ψ_i).
    pub rows: Vec<Vec<f64>>,
    pub n_time: usize,
}

impl ConditionalTable {
    pub fn n_realizations(&self) -> usize {
        self.rows.len()
    }

    /// Column j of the table.
    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + Clone + '_ {
        self.rows.iter().map(move |r| r[j])
    }

    /// Spatial means of F̂ and F̂² with normal-approximation standard errors.
    pub fn moments(&self) -> MomentCurve {
        let n = self.rows.len() as f64;
        let mut curve = MomentCurve {
            te_grid: self.te_grid.clone(),
            m1: Vec::new(),
            m2: Vec::new(),
            err1: Vec::new(),
            err2: Vec::new(),
        };
        for j in 0..self.te_grid.len() {
            let (m1, v1) = mean_and_stderr(self.column(j), n);
            let (m2, v2) = mean_and_stderr(self.column(j).map(|f| f * f), n);
            curve.m1.push(m1);
            curve.m2.push(m2);
            curve.err1.push(v1);
            curve.err2.push(v2);
        }
        curve
    }

    /// Fraction of realizations with F̂(te_grid[j]) > s, with binomial standard errors.
    pub fn meta(&self, j: usize, s_grid: &[f64]) -> MetaCurve {
        let n = self.rows.len() as f64;
        let mut values = Vec::with_capacity(s_grid.len());
        let mut stderr = Vec::with_capacity(s_grid.len());
        for &s in s_grid {
            let p = self.column(j).filter(|&f| f > s).count() as f64 / n;
            values.push(p);
            stderr.push((p * (1.0 - p) / n).sqrt());
        }
        MetaCurve {
            te: self.te_grid[j],
            s_grid: s_grid.to_vec(),
            values,
            stderr: Some(stderr),
            method: MetaMethod::Empirical,
        }
    }
}

/// Mean and its standard error, summed in iteration order.
fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

/// Runs every realization of the plan and tabulates its conditional CDF.
pub fn conditional_cdf_table(plan: &McPlan, cfg: &NetworkConfig, pattern: &UlaPattern) -> Result<ConditionalTable> {
    plan.validate()?;
    let indices: Vec<u64> = (0..plan.n_realizations as u64).collect();
    let rows = crate::par_map(&indices, |&i| {
        let layout = sample_realization(cfg, StreamId::new(plan.master_seed, i, Lane::Geometry));
        let sorted = sample_exposures(
            cfg,
            pattern,
            &layout,
            plan.n_time,
            StreamId::new(plan.master_seed, i, Lane::Time),
            DrawMode::Random,
        );
        rank_cdf(&sorted, &plan.te_grid)
    });
    Ok(ConditionalTable {
        te_grid: plan.te_grid.clone(),
        rows,
        n_time: plan.n_time,
    })
}

/// Empirical M₁ and M₂ on the plan's threshold grid.
pub fn empirical_moments(plan: &McPlan, cfg: &NetworkConfig, pattern: &UlaPattern) -> Result<MomentCurve> {
    Ok(conditional_cdf_table(plan, cfg, pattern)?.moments())
}

/// Empirical meta distribution at one threshold.
pub fn empirical_meta(
    plan: &McPlan,
    te: f64,
    s_grid: &[f64],
    cfg: &NetworkConfig,
    pattern: &UlaPattern,
) -> Result<MetaCurve> {
    let single = McPlan {
        te_grid: vec![te],
        ..plan.clone()
    };
    Ok(conditional_cdf_table(&single, cfg, pattern)?.meta(0, s_grid))
}

/// Monte-Carlo estimate of E[e^{jqS}] with its standard error per q.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CfEstimate {
    pub q: f64,
    pub value: Complex64,
    /// Standard error of the real and imaginary parts, combined in quadrature.
    pub stderr: f64,
}

/// Averages e^{jqS} over `n_realizations` layouts with `n_time` draws each.
/// Standard errors come from the spread of the per-layout means.
pub fn cf_estimate(
    cfg: &NetworkConfig,
    pattern: &UlaPattern,
    q_grid: &[f64],
    n_realizations: usize,
    n_time: usize,
    master_seed: u64,
) -> Result<Vec<CfEstimate>> {
    if n_realizations < 2 || n_time == 0 {
        return Err(Error::Config("cf_estimate needs at least 2 realizations and 1 time draw".into()));
    }
    let indices: Vec<u64> = (0..n_realizations as u64).collect();
    let per_layout: Vec<Vec<Complex64>> = crate::par_map(&indices, |&i| {
        let layout = sample_realization(cfg, StreamId::new(master_seed, i, Lane::Geometry));
        let draws = sample_exposures(
            cfg,
            pattern,
            &layout,
            n_time,
            StreamId::new(master_seed, i, Lane::Aux),
            DrawMode::Random,
        );
        q_grid
            .iter()
            .map(|&q| draws.iter().map(|&s| Complex64::from_polar(1.0, q * s)).sum::<Complex64>() / n_time as f64)
            .collect()
    });
    let n = n_realizations as f64;
    Ok(q_grid
        .iter()
        .enumerate()
        .map(|(j, &q)| {
            let (re, se_re) = mean_and_stderr(per_layout.iter().map(|v| v[j].re), n);
            let (im, se_im) = mean_and_stderr(per_layout.iter().map(|v| v[j].im), n);
            CfEstimate {
                q,
                value: Complex64::new(re, im),
                stderr: se_re.hypot(se_im),
            }
        })
        .collect())
}
