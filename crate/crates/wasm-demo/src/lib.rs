//! wasm-bindgen exports for the static page in `www/`.
//!
//! Every function takes the antenna count and exclusion radius and builds
//! the reference scenario around them. Results come back as flat arrays.

use metaemf::analytic::{ExposureModel, OmegaSign};
use metaemf::antenna::{multicosine_gain, theoretical_gain};
use metaemf::model::{dbm_to_watt, max_side_lobe_index};
use metaemf::specfun::QuadratureSpec;
use metaemf::NetworkConfig;
use wasm_bindgen::prelude::*;

fn model(n_antennas: u32, r_e: f64) -> Result<ExposureModel, metaemf::Error> {
    let n = n_antennas as usize;
    let cfg = NetworkConfig::reference()
        .with_antennas(n, max_side_lobe_index(n).min(9))?
        .with_exclusion_radius(r_e)?;
    ExposureModel::new(cfg)
}

fn js(e: metaemf::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[phi, exact, multicosine]` triples over [−π/3, π/3).
#[wasm_bindgen]
pub fn gain_pattern(n_antennas: u32, points: u32) -> Result<Vec<f64>, JsError> {
    let m = model(n_antennas, 10.0).map_err(js)?;
    let mut out = Vec::with_capacity(3 * points as usize);
    for i in 0..points {
        let phi = -std::f64::consts::PI / 3.0 * (1.0 - 2.0 * i as f64 / points as f64);
        out.extend([phi, theoretical_gain(phi, m.config().n_antennas()), multicosine_gain(phi, m.pattern())]);
    }
    Ok(out)
}

/// `[te_dbm, m1]` pairs: the mean conditional CDF.
#[wasm_bindgen]
pub fn moment_curve(n_antennas: u32, r_e: f64, te_min: f64, te_max: f64, step: f64) -> Result<Vec<f64>, JsError> {
    if !(step > 0.0 && te_min <= te_max) {
        return Err(JsError::new("threshold grid needs min <= max and step > 0"));
    }
    let m = model(n_antennas, r_e).map_err(js)?;
    let n = ((te_max - te_min) / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| te_min + step * i as f64).collect();
    let te: Vec<f64> = grid.iter().map(|&d| dbm_to_watt(d)).collect();
    let curve = m
        .moment_curve(&te, OmegaSign::Derived, false, &QuadratureSpec::default())
        .map_err(js)?;
    Ok(grid.iter().zip(&curve.m1).flat_map(|(&d, &v)| [d, v]).collect())
}

/// `[s, P(F > s)]` pairs of the beta-approximated meta distribution.
#[wasm_bindgen]
pub fn meta_curve(n_antennas: u32, r_e: f64, te_dbm: f64, points: u32) -> Result<Vec<f64>, JsError> {
    let m = model(n_antennas, r_e).map_err(js)?;
    let s: Vec<f64> = (1..points).map(|i| i as f64 / points as f64).collect();
    let curve = m
        .meta_beta(dbm_to_watt(te_dbm), &s, &QuadratureSpec::default())
        .map_err(js)?;
    Ok(curve.s_grid.iter().zip(&curve.values).flat_map(|(&x, &v)| [x, v]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_peaks_at_broadside() {
        let g = gain_pattern(64, 8).unwrap();
        assert_eq!(g.len(), 24);
        assert_eq!(g[0], -std::f64::consts::PI / 3.0);
        assert_eq!(&g[12..15], &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn meta_is_decreasing() {
        let v = meta_curve(64, 10.0, -32.0, 10).unwrap();
        let vals: Vec<f64> = v.chunks(2).map(|p| p[1]).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(model(0, 10.0).is_err());
    }
}
