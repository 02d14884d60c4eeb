use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use metaemf::analytic::{meta_from_moments, ExposureModel, MetaCurve, MomentDenominator, OmegaSign};
use metaemf::antenna::{multicosine_gain, theoretical_gain};
use metaemf::model::{dbm_to_watt, max_side_lobe_index, watt_to_dbm};
use metaemf::montecarlo::{conditional_cdf_table, empirical_conditional_cdf, McPlan};
use metaemf::ppp::{sample_realization, Lane, PppRealization, StreamId};
use metaemf::specfun::QuadratureSpec;
use metaemf::validation::{self, Check, SuiteOptions};
use metaemf::{with_workers, ConfigDocument, NetworkConfig};
use serde_json::json;

use crate::output::{sink, write_manifest, Cell, CliError, RunManifest, Table};
use crate::{Cli, Command, CommonArgs, Denominator, MetaMethodArg, MomentMethod, Omega, PlanArgs, SGrid, TeGrid};

/// Config file (or reference), then flag overrides.
pub fn effective_config(common: &CommonArgs) -> Result<ConfigDocument, CliError> {
    let mut doc = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
        }
        None => ConfigDocument::reference(),
    };
    if let Some(n) = common.n_antennas {
        doc.n_antennas = n;
        if common.k_max.is_none() {
            doc.k_max = doc.k_max.min(max_side_lobe_index(n as usize) as u32);
        }
    }
    if let Some(k) = common.k_max {
        doc.k_max = k;
    }
    if let Some(r) = common.r_e {
        doc.r_e = r;
    }
    if let Some(l) = common.lambda_bs {
        doc.lambda_bs = l;
    }
    if let Some(m) = common.m_fading {
        doc.m_fading = m as f64;
    }
    Ok(doc)
}

fn linspace(lo: f64, hi: f64, step: f64, what: &str) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CliError::Usage(format!("{what} grid needs finite min <= max and step > 0")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    // Rounded so grid points print as typed.
    Ok((0..=n).map(|i| ((lo + step * i as f64) * 1e9).round() / 1e9).collect())
}

fn te_grid(g: &TeGrid) -> Result<Vec<f64>, CliError> {
    linspace(g.te_min, g.te_max, g.te_step, "threshold")
}

fn s_grid(g: &SGrid) -> Result<Vec<f64>, CliError> {
    let s = linspace(g.s_min, g.s_max, g.s_step, "reliability")?;
    if s.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Err(CliError::Usage("reliability levels must lie in (0, 1)".into()));
    }
    Ok(s)
}

fn plan(args: &PlanArgs, seed: u64, te: Vec<f64>) -> Result<McPlan, CliError> {
    McPlan::new(args.realizations, args.time_draws, seed, te, vec![])
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn omega(o: Omega) -> OmegaSign {
    match o {
        Omega::Derived => OmegaSign::Derived,
        Omega::TheoremPrinted => OmegaSign::TheoremPrinted,
        Omega::AppendixPrinted => OmegaSign::AppendixPrinted,
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let doc = effective_config(&cli.common)?;
    let cfg = NetworkConfig::from_document(&doc).map_err(|e| CliError::Usage(e.to_string()))?;
    let summary = with_workers(cli.common.workers, || dispatch(cli, &cfg))??;
    write_manifest(&RunManifest {
        tool: "metaemf",
        version: env!("CARGO_PKG_VERSION"),
        command: std::env::args().collect(),
        config: doc,
        master_seed: cli.common.seed,
        workers: cli.common.workers,
        duration_s: start.elapsed().as_secs_f64(),
        output: cli.common.out.clone(),
        summary: summary.0,
    })?;
    summary.1
}

/// Summary for the manifest, and the command's final status.
type Outcome = (serde_json::Value, Result<(), CliError>);

fn dispatch(cli: &Cli, cfg: &NetworkConfig) -> Result<Outcome, CliError> {
    let out = cli.common.out.as_deref();
    let seed = cli.common.seed;
    match &cli.command {
        Command::Gain { points } => gain(cfg, *points, out),
        Command::Cdf {
            realization,
            index,
            grid,
            time_draws,
        } => {
            let layout = match realization {
                Some(path) => {
                    let file = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    PppRealization::read_csv(BufReader::new(file), cfg).map_err(|e| CliError::Usage(e.to_string()))?
                }
                None => sample_realization(cfg, StreamId::new(seed, *index, Lane::Geometry)),
            };
            cdf(cfg, &layout, &te_grid(grid)?, *time_draws, seed, *index, out)
        }
        Command::Moments {
            grid,
            method,
            omega: o,
            plan: p,
        } => moments(cfg, &te_grid(grid)?, *method, omega(*o), p, seed, out),
        Command::Meta {
            te,
            grid,
            method,
            denominator,
            plan: p,
        } => meta(cfg, *te, &s_grid(grid)?, *method, *denominator, p, seed, out),
        Command::Validate {
            plan: p,
            tol_scale,
            special_cases,
            only,
        } => {
            let opts = SuiteOptions {
                master_seed: seed,
                n_realizations: p.realizations,
                n_time: p.time_draws,
                tol_scale: *tol_scale,
                special_cases: *special_cases,
                spec: QuadratureSpec::default(),
            };
            validate(cfg, &opts, only, out)
        }
    }
}

fn ok(summary: serde_json::Value) -> Result<Outcome, CliError> {
    Ok((summary, Ok(())))
}

fn gain(cfg: &NetworkConfig, points: usize, out: Option<&std::path::Path>) -> Result<Outcome, CliError> {
    if points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let model = ExposureModel::new(cfg.clone())?;
    let n = cfg.n_antennas();
    let mut table = Table::new(&["phi_rad", "g_theoretical", "g_multicosine"]);
    for i in 0..points {
        let phi = -PI / 3.0 + 2.0 * PI / 3.0 * i as f64 / points as f64;
        table.push(vec![phi.into(), theoretical_gain(phi, n).into(), multicosine_gain(phi, model.pattern()).into()]);
    }
    table.write(sink(out)?)?;
    ok(json!({ "chi": model.pattern().chi(), "x": model.pattern().x() }))
}

fn cdf(
    cfg: &NetworkConfig,
    layout: &PppRealization,
    grid_dbm: &[f64],
    time_draws: usize,
    seed: u64,
    index: u64,
    out: Option<&std::path::Path>,
) -> Result<Outcome, CliError> {
    let model = ExposureModel::new(cfg.clone())?;
    let spec = QuadratureSpec::default();
    let te: Vec<f64> = grid_dbm.iter().map(|&d| dbm_to_watt(d)).collect();
    let analytic = metaemf_par(&te, |&t| model.cdf_conditional(t, layout, &spec))?;
    let empirical = if time_draws > 0 {
        let stream = StreamId::new(seed, index, Lane::Time);
        empirical_conditional_cdf(cfg, model.pattern(), layout, &te, time_draws, stream)?
    } else {
        vec![f64::NAN; te.len()]
    };
    let mut table = Table::new(&["te_dbm", "analytic", "err", "empirical"]);
    for (i, &d) in grid_dbm.iter().enumerate() {
        let mut row: Vec<Cell> = vec![d.into(), analytic[i].value.into(), analytic[i].error.into()];
        row.push(if time_draws > 0 { empirical[i].into() } else { Cell::Text("") });
        table.push(row);
    }
    table.write(sink(out)?)?;
    let total = layout.total_mean_power(cfg);
    ok(json!({
        "n_bs": layout.len(),
        "total_mean_power_dbm": if total > 0.0 { Some(watt_to_dbm(total)) } else { None },
        "atom": model.conditional_atom(layout),
        "time_draws": time_draws,
    }))
}

/// Evaluates a fallible function on each item, in order.
fn metaemf_par<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> metaemf::Result<U> + Sync + Send,
) -> Result<Vec<U>, CliError> {
    Ok(items.iter().map(f).collect::<metaemf::Result<Vec<U>>>()?)
}

fn moments(
    cfg: &NetworkConfig,
    grid_dbm: &[f64],
    method: MomentMethod,
    sign: OmegaSign,
    p: &PlanArgs,
    seed: u64,
    out: Option<&std::path::Path>,
) -> Result<Outcome, CliError> {
    let model = ExposureModel::new(cfg.clone())?;
    let te: Vec<f64> = grid_dbm.iter().map(|&d| dbm_to_watt(d)).collect();
    let curve = match method {
        MomentMethod::Analytic => model.moment_curve(&te, sign, true, &QuadratureSpec::default())?,
        MomentMethod::Empirical => conditional_cdf_table(&plan(p, seed, te)?, cfg, model.pattern())?.moments(),
    };
    let mut table = Table::new(&["te_dbm", "m1", "m2", "err1", "err2"]);
    for (i, &d) in grid_dbm.iter().enumerate() {
        table.push(vec![d.into(), curve.m1[i].into(), curve.m2[i].into(), curve.err1[i].into(), curve.err2[i].into()]);
    }
    table.write(sink(out)?)?;
    let median = metaemf::analytic::crossing_point(grid_dbm, &curve.m1, 0.5);
    let gap = grid_dbm
        .iter()
        .zip(curve.m1.iter().zip(&curve.m2))
        .map(|(&d, (a, b))| (d, a - b))
        .max_by(|x, y| x.1.total_cmp(&y.1));
    ok(json!({
        "method": format!("{method:?}").to_lowercase(),
        "omega": sign.tag(),
        "median_crossing_dbm": median,
        "max_gap": gap.map(|(d, g)| json!({ "te_dbm": d, "m1_minus_m2": g })),
    }))
}

#[allow(clippy::too_many_arguments)]
fn meta(
    cfg: &NetworkConfig,
    te_dbm: f64,
    s: &[f64],
    method: MetaMethodArg,
    denominator: Denominator,
    p: &PlanArgs,
    seed: u64,
    out: Option<&std::path::Path>,
) -> Result<Outcome, CliError> {
    let model = ExposureModel::new(cfg.clone())?;
    let te = dbm_to_watt(te_dbm);
    let denom = match denominator {
        Denominator::Variance => MomentDenominator::Variance,
        Denominator::Printed => MomentDenominator::Printed,
    };
    let beta = || -> metaemf::Result<MetaCurve> {
        let terms = model.moment_terms(te, model.envelope_cutoff(), true)?;
        meta_from_moments(te, terms.m1(), terms.m2(OmegaSign::Derived, 1e-4)?, s, denom)
    };
    let (curve, distance) = match method {
        MetaMethodArg::Beta => (beta()?, None),
        MetaMethodArg::Empirical => {
            let table = conditional_cdf_table(&plan(p, seed, vec![te])?, cfg, model.pattern())?;
            let empirical = table.meta(0, s);
            let distance = beta().ok().map(|b| b.sup_distance(&empirical));
            (empirical, distance)
        }
    };
    let mut table = Table::new(&["s", "value", "method"]);
    for (&si, &v) in curve.s_grid.iter().zip(&curve.values) {
        table.push(vec![si.into(), v.into(), Cell::Text(curve.method.tag())]);
    }
    table.write(sink(out)?)?;
    ok(json!({
        "te_dbm": te_dbm,
        "method": curve.method.tag(),
        "reliability_at_0.9": curve.quantile_at(0.9),
        "sup_distance_to_beta": distance,
        "stderr_max": curve.stderr.as_ref().map(|e| e.iter().cloned().fold(0.0, f64::max)),
    }))
}

fn validate(cfg: &NetworkConfig, opts: &SuiteOptions, only: &[u8], out: Option<&std::path::Path>) -> Result<Outcome, CliError> {
    if let Some(c) = only.iter().find(|&&c| !(1..=9).contains(&c)) {
        return Err(CliError::Usage(format!("unknown criterion {c}")));
    }
    let wants = |c: u8| only.is_empty() || only.contains(&c);
    let mut checks: Vec<Check> = Vec::new();
    let mut sensitivity = Vec::new();
    if wants(1) {
        checks.extend(validation::special_functions(opts)?);
    }
    if wants(2) {
        checks.extend(validation::antenna(opts)?);
    }
    if wants(3) {
        checks.extend(validation::cf_dual_path(cfg, opts)?);
    }
    if wants(4) || wants(5) {
        checks.extend(validation::moments(&validation::moment_run(cfg, opts)?, opts));
    }
    if wants(6) {
        let (c, rows) = validation::meta_points(cfg, opts)?;
        checks.extend(c);
        sensitivity = rows;
    }
    if wants(7) || wants(8) {
        checks.extend(validation::antenna_sweep(cfg, opts)?);
    }
    if wants(9) {
        checks.extend(validation::determinism(cfg, opts)?);
    }
    checks.retain(|c| {
        let n: u8 = c.name[1..].split('.').next().and_then(|d| d.parse().ok()).unwrap_or(0);
        wants(n)
    });
    if let Some(c) = checks.iter().find(|c| !(c.observed.is_finite() && c.expected.is_finite() && c.tol.is_finite())) {
        return Err(CliError::NonFinite(c.name.clone()));
    }
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &checks)?;
    writeln!(w)?;
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    for c in &failed {
        eprintln!("FAIL {}: observed {} expected {} tol {}", c.name, c.observed, c.expected, c.tol);
    }
    let status = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed(failed.len()))
    };
    Ok((
        json!({
            "checks": checks.len(),
            "failed": failed.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(),
            "sensitivity": sensitivity,
        }),
        status,
    ))
}

use std::io::Write as _;
