//! Network configuration, unit conversions and the mean received power density.
//!
//! Everything inside the crate works in SI units (W, m, Hz, BS/m²). The JSON
//! config document uses the customary external units (GHz, BS/km², dBm, km)
//! and is converted once on load.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Exclusion radius used when the document does not provide one, m.
pub const DEFAULT_EXCLUSION_RADIUS_M: f64 = 10.0;

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

pub fn km_to_m(km: f64) -> f64 {
    km * 1e3
}

pub fn m_to_km(m: f64) -> f64 {
    m * 1e-3
}

pub fn per_km2_to_per_m2(density: f64) -> f64 {
    density * 1e-6
}

pub fn per_m2_to_per_km2(density: f64) -> f64 {
    density * 1e6
}

/// Largest side-lobe index whose lobe stays inside the ±60° sector of a ULA
/// with `n` elements: `floor(n·√3/4 − 1)`, clamped at zero.
pub fn max_side_lobe_index(n: usize) -> usize {
    let bound = (n as f64 * 3f64.sqrt() / 4.0 - 1.0).floor();
    if bound < 0.0 {
        0
    } else {
        bound as usize
    }
}

/// External-unit configuration document, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    /// Carrier frequency, GHz.
    pub f: f64,
    /// Base-station density, BS/km².
    pub lambda_bs: f64,
    /// Transmit power, dBm.
    pub p_t: f64,
    pub n_antennas: u32,
    pub alpha: f64,
    /// BS height above the user plane, m.
    pub z: f64,
    /// Network disk radius, km.
    pub tau: f64,
    /// Exclusion radius, m.
    #[serde(default = "default_exclusion_radius")]
    pub r_e: f64,
    /// Nakagami shape; must be a positive integer (accepted as a number so
    /// that `2.5` is reported as a model error rather than a parse error).
    pub m_fading: f64,
    pub k_max: u32,
}

fn default_exclusion_radius() -> f64 {
    DEFAULT_EXCLUSION_RADIUS_M
}

impl ConfigDocument {
    /// Parameters of the reference scenario: 3.5 GHz, 10 BS/km², 66 dBm,
    /// 64 antennas, α = 3.25, 30 m height, 3 km disk, m = 3, nine side lobes.
    pub fn reference() -> Self {
        Self {
            f: 3.5,
            lambda_bs: 10.0,
            p_t: 66.0,
            n_antennas: 64,
            alpha: 3.25,
            z: 30.0,
            tau: 3.0,
            r_e: DEFAULT_EXCLUSION_RADIUS_M,
            m_fading: 3.0,
            k_max: 9,
        }
    }
}

/// Validated model parameters in SI units. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    f: f64,
    lambda_bs: f64,
    p_t: f64,
    n_antennas: usize,
    alpha: f64,
    z: f64,
    tau: f64,
    r_e: f64,
    m_fading: usize,
    k_max: usize,
    kappa: f64,
}

impl NetworkConfig {
    pub fn from_document(doc: &ConfigDocument) -> Result<Self> {
        if !(doc.m_fading.is_finite() && doc.m_fading >= 1.0 && doc.m_fading.fract() == 0.0) {
            return Err(Error::Config(format!(
                "m_fading must be a positive integer, got {}",
                doc.m_fading
            )));
        }
        let cfg = Self {
            f: doc.f * 1e9,
            lambda_bs: per_km2_to_per_m2(doc.lambda_bs),
            p_t: dbm_to_watt(doc.p_t),
            n_antennas: doc.n_antennas as usize,
            alpha: doc.alpha,
            z: doc.z,
            tau: km_to_m(doc.tau),
            r_e: doc.r_e,
            m_fading: doc.m_fading as usize,
            k_max: doc.k_max as usize,
            kappa: 0.0,
        };
        cfg.validated()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ConfigDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn reference() -> Self {
        Self::from_document(&ConfigDocument::reference()).expect("reference config is valid")
    }

    fn validated(mut self) -> Result<Self> {
        let finite = [
            self.f,
            self.lambda_bs,
            self.p_t,
            self.alpha,
            self.z,
            self.tau,
            self.r_e,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("all parameters must be finite".into()));
        }
        if self.f <= 0.0 {
            return Err(Error::Config(format!("frequency must be positive, got {} Hz", self.f)));
        }
        if self.lambda_bs < 0.0 {
            return Err(Error::Config("density must be nonnegative".into()));
        }
        if self.p_t <= 0.0 {
            return Err(Error::Config("transmit power must be positive".into()));
        }
        if self.alpha <= 2.0 {
            return Err(Error::Config(format!(
                "path-loss exponent must exceed 2, got {}",
                self.alpha
            )));
        }
        if self.z < 0.0 {
            return Err(Error::Config("BS height must be nonnegative".into()));
        }
        if !(self.r_e >= 0.0 && self.r_e < self.tau) {
            return Err(Error::Config(format!(
                "need 0 <= r_e < tau, got r_e = {} m, tau = {} m",
                self.r_e, self.tau
            )));
        }
        if self.r_e == 0.0 && self.z == 0.0 {
            return Err(Error::Config(
                "r_e = 0 with z = 0 puts a base station on the user".into(),
            ));
        }
        if self.n_antennas < 2 {
            return Err(Error::Config("need at least 2 antennas".into()));
        }
        if self.m_fading < 1 {
            return Err(Error::Config("m_fading must be at least 1".into()));
        }
        let bound = max_side_lobe_index(self.n_antennas);
        if self.k_max > bound {
            return Err(Error::Config(format!(
                "k_max = {} exceeds floor(N*sqrt(3)/4 - 1) = {} for N = {}",
                self.k_max, bound, self.n_antennas
            )));
        }
        self.kappa = (4.0 * PI * self.f / SPEED_OF_LIGHT).powi(2);
        Ok(self)
    }

    /// Back to external units, e.g. for run manifests.
    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            f: self.f * 1e-9,
            lambda_bs: per_m2_to_per_km2(self.lambda_bs),
            p_t: watt_to_dbm(self.p_t),
            n_antennas: self.n_antennas as u32,
            alpha: self.alpha,
            z: self.z,
            tau: m_to_km(self.tau),
            r_e: self.r_e,
            m_fading: self.m_fading as f64,
            k_max: self.k_max as u32,
        }
    }

    fn modified(&self, edit: impl FnOnce(&mut ConfigDocument)) -> Result<Self> {
        let mut doc = self.to_document();
        edit(&mut doc);
        Self::from_document(&doc)
    }

    pub fn with_antennas(&self, n: usize, k_max: usize) -> Result<Self> {
        self.modified(|d| {
            d.n_antennas = n as u32;
            d.k_max = k_max as u32;
        })
    }

    pub fn with_exclusion_radius(&self, r_e: f64) -> Result<Self> {
        self.modified(|d| d.r_e = r_e)
    }

    pub fn with_height(&self, z: f64) -> Result<Self> {
        self.modified(|d| d.z = z)
    }

    /// Density given in BS/km².
    pub fn with_density_per_km2(&self, lambda: f64) -> Result<Self> {
        self.modified(|d| d.lambda_bs = lambda)
    }

    pub fn with_fading(&self, m: usize) -> Result<Self> {
        self.modified(|d| d.m_fading = m as f64)
    }

    /// Disk radius given in km.
    pub fn with_radius_km(&self, tau: f64) -> Result<Self> {
        self.modified(|d| d.tau = tau)
    }

    /// Carrier frequency, Hz.
    pub fn frequency(&self) -> f64 {
        self.f
    }

    /// BS density, 1/m².
    pub fn density(&self) -> f64 {
        self.lambda_bs
    }

    /// Transmit power, W.
    pub fn transmit_power(&self) -> f64 {
        self.p_t
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn height(&self) -> f64 {
        self.z
    }

    pub fn radius(&self) -> f64 {
        self.tau
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.r_e
    }

    pub fn fading_shape(&self) -> usize {
        self.m_fading
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Free-space constant (4π f / c₀)².
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Maximum array gain, equal to the element count.
    pub fn max_gain(&self) -> f64 {
        self.n_antennas as f64
    }

    /// Mean number of base stations in the annulus [r_e, τ].
    pub fn mean_bs_count(&self) -> f64 {
        self.lambda_bs * PI * (self.tau * self.tau - self.r_e * self.r_e)
    }

    /// Path-loss attenuation κ⁻¹ (r² + z²)^(−α/2).
    pub fn path_loss(&self, r: f64) -> f64 {
        (r * r + self.z * self.z).powf(-self.alpha / 2.0) / self.kappa
    }

    /// Mean incident power density from a BS at horizontal distance `r`
    /// with unit gain and unit fading, W/m².
    pub fn mean_power_kernel(&self, r: f64) -> f64 {
        self.p_t * (r * r + self.z * self.z).powf(-self.alpha / 2.0) / (4.0 * PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_document_is_valid() {
        let cfg = NetworkConfig::reference();
        assert_eq!(cfg.n_antennas(), 64);
        assert_eq!(cfg.k_max(), 9);
        assert!(rel(cfg.radius(), 3000.0) < 1e-15);
        assert!(rel(cfg.density(), 1e-5) < 1e-15);
        let kappa = (4.0 * PI * 3.5e9 / SPEED_OF_LIGHT).powi(2);
        assert!(rel(cfg.kappa(), kappa) < 1e-15);
    }

    #[test]
    fn k_max_bound() {
        assert_eq!(max_side_lobe_index(64), 26);
        assert_eq!(max_side_lobe_index(16), 5);
        assert_eq!(max_side_lobe_index(256), 109);
        assert_eq!(max_side_lobe_index(2), 0);
        let mut doc = ConfigDocument::reference();
        doc.k_max = 26;
        assert!(NetworkConfig::from_document(&doc).is_ok());
        doc.k_max = 27;
        assert!(matches!(NetworkConfig::from_document(&doc), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_invalid_documents() {
        let mut doc = ConfigDocument::reference();
        doc.alpha = 2.0;
        assert!(NetworkConfig::from_document(&doc).is_err());

        let mut doc = ConfigDocument::reference();
        doc.m_fading = 2.5;
        assert!(NetworkConfig::from_document(&doc).is_err());

        let mut doc = ConfigDocument::reference();
        doc.r_e = 3000.0;
        assert!(NetworkConfig::from_document(&doc).is_err());

        let mut doc = ConfigDocument::reference();
        doc.n_antennas = 1;
        doc.k_max = 0;
        assert!(NetworkConfig::from_document(&doc).is_err());
    }

    #[test]
    fn json_missing_and_unknown_fields() {
        let ok = r#"{"f":3.5,"lambda_bs":10,"p_t":66,"n_antennas":64,"alpha":3.25,
                     "z":30,"tau":3,"m_fading":3,"k_max":9}"#;
        let cfg = NetworkConfig::from_json(ok).unwrap();
        assert_eq!(cfg.exclusion_radius(), DEFAULT_EXCLUSION_RADIUS_M);

        let missing = r#"{"f":3.5,"lambda_bs":10,"p_t":66,"n_antennas":64,"alpha":3.25,
                          "z":30,"tau":3,"m_fading":3}"#;
        let err = NetworkConfig::from_json(missing).unwrap_err();
        assert!(err.to_string().contains("k_max"), "{err}");

        let unknown = r#"{"f":3.5,"lambda_bs":10,"p_t":66,"n_antennas":64,"alpha":3.25,
                          "z":30,"tau":3,"m_fading":3,"k_max":9,"shadowing":8}"#;
        assert!(NetworkConfig::from_json(unknown).is_err());
    }

    #[test]
    fn power_conversions() {
        assert!(rel(dbm_to_watt(30.0), 1.0) < 1e-15);
        assert!(rel(dbm_to_watt(0.0), 1e-3) < 1e-15);
        assert!(rel(dbm_to_watt(66.0), 3981.071705534972) < 1e-12);
        assert!((watt_to_dbm(1.0) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_hand_values() {
        let mut doc = ConfigDocument::reference();
        doc.p_t = 30.0;
        doc.z = 0.0;
        doc.alpha = 3.0;
        let cfg = NetworkConfig::from_document(&doc).unwrap();
        assert!(rel(cfg.mean_power_kernel(1.0), 1.0 / (4.0 * PI)) < 1e-12);
        assert!(rel(cfg.mean_power_kernel(2.0), 0.125 / (4.0 * PI)) < 1e-12);
        assert!(rel(1.0 / (4.0 * PI), 0.0795775) < 1e-6);
        assert!(rel(0.125 / (4.0 * PI), 0.0099472) < 1e-5);
    }

    #[test]
    fn kernel_reference_value_and_kappa_cancellation() {
        let cfg = NetworkConfig::reference();
        let expected = 3981.071705534972 * (100.0f64 * 100.0 + 900.0).powf(-1.625) / (4.0 * PI);
        assert!(rel(cfg.mean_power_kernel(100.0), expected) < 1e-12);
        for r in [10.0, 55.5, 100.0, 1234.0, 3000.0] {
            let via_loss = cfg.transmit_power() * cfg.path_loss(r) * cfg.kappa() / (4.0 * PI);
            assert!(rel(via_loss, cfg.mean_power_kernel(r)) < 1e-12);
        }
    }

    #[test]
    fn document_round_trip() {
        let cfg = NetworkConfig::reference();
        let back = NetworkConfig::from_document(&cfg.to_document()).unwrap();
        assert!(rel(back.transmit_power(), cfg.transmit_power()) < 1e-12);
        assert!(rel(back.density(), cfg.density()) < 1e-12);
        assert!(rel(back.radius(), cfg.radius()) < 1e-12);
    }
}
