//! Poisson base-station layouts and the per-draw randomness of the
//! Monte-Carlo path.
//!
//! Every random quantity is drawn from a ChaCha8 stream addressed by
//! (master seed, realization index, lane), so any realization can be
//! regenerated independently of the order in which work is scheduled.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::NetworkConfig;

/// Independent sub-streams of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Lane {
    /// BS count and radii.
    Geometry,
    /// Fading and beam angles.
    Time,
    /// Auxiliary draws used by estimators (e.g. CF checks).
    Aux,
}

impl Lane {
    fn index(self) -> u128 {
        match self {
            Lane::Geometry => 0,
            Lane::Time => 1,
            Lane::Aux => 2,
        }
    }
}

/// Address of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StreamId {
    pub master_seed: u64,
    pub realization: u64,
    pub lane: Lane,
}

impl StreamId {
    pub fn new(master_seed: u64, realization: u64, lane: Lane) -> Self {
        Self {
            master_seed,
            realization,
            lane,
        }
    }

    /// ChaCha8 generator keyed by the master seed, stream = realization,
    /// lane selecting a disjoint 2⁶⁴-word block of the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.realization);
        rng.set_word_pos(self.lane.index() << 64);
        rng
    }
}

/// One sampled layout: horizontal BS distances from the user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PppRealization {
    pub radii: Vec<f64>,
    pub seed_tag: Option<StreamId>,
}

impl PppRealization {
    pub fn from_radii(radii: Vec<f64>) -> Self {
        Self {
            radii,
            seed_tag: None,
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Σ_i S̄(r_i): the exposure with every gain and fading set to one.
    pub fn total_mean_power(&self, cfg: &NetworkConfig) -> f64 {
        self.radii.iter().map(|&r| cfg.mean_power_kernel(r)).sum()
    }

    /// Writes one radius per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "radius_m")?;
        for r in &self.radii {
            writeln!(out, "{r:e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, cfg: &NetworkConfig) -> Result<Self> {
        let mut radii = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || (i == 0 && t == "radius_m") {
                continue;
            }
            let r: f64 = t
                .parse()
                .map_err(|_| Error::Realization(format!("line {}: not a number: {t:?}", i + 1)))?;
            if !(r >= cfg.exclusion_radius() && r <= cfg.radius()) {
                return Err(Error::Realization(format!(
                    "line {}: radius {r} outside [{}, {}]",
                    i + 1,
                    cfg.exclusion_radius(),
                    cfg.radius()
                )));
            }
            radii.push(r);
        }
        Ok(Self::from_radii(radii))
    }
}

/// Uniform draw on (0, 1].
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Poisson number of BSs, each at a distance uniform in area on [r_e, τ].
pub fn sample_realization(cfg: &NetworkConfig, stream: StreamId) -> PppRealization {
    let mut rng = stream.rng();
    let mean = cfg.mean_bs_count();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("finite positive mean").sample(&mut rng) as usize
    } else {
        0
    };
    let lo = cfg.exclusion_radius().powi(2);
    let hi = cfg.radius().powi(2);
    let radii = (0..count)
        .map(|_| {
            let r2 = lo + (hi - lo) * rng.random::<f64>();
            r2.sqrt().clamp(cfg.exclusion_radius(), cfg.radius())
        })
        .collect();
    PppRealization {
        radii,
        seed_tag: Some(stream),
    }
}

/// Nakagami-m power gain |h|² ~ Gamma(m, 1/m): the mean of m unit exponentials.
pub fn sample_fading<R: Rng + ?Sized>(m: usize, rng: &mut R) -> f64 {
    let mut log_sum = 0.0;
    let mut product = 1.0;
    for _ in 0..m {
        product *= open_unit(rng);
        if product < 1e-250 {
            log_sum += product.ln();
            product = 1.0;
        }
    }
    -(log_sum + product.ln()) / m as f64
}

/// Beam direction relative to the user, uniform on [−π/3, π/3).
pub fn sample_beam_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (rng.random::<f64>() * 2.0 - 1.0) * PI / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::{multicosine_gain, side_lobe_extrema};

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = StreamId::new(7, 3, Lane::Geometry);
        let x: Vec<u64> = (0..4).map(|_| a.rng().random()).collect();
        assert!(x.windows(2).all(|w| w[0] == w[1]));
        let mut r1 = a.rng();
        let mut r2 = StreamId::new(7, 3, Lane::Time).rng();
        let mut r3 = StreamId::new(7, 4, Lane::Geometry).rng();
        let v1: u64 = r1.random();
        assert_ne!(v1, r2.random::<u64>());
        assert_ne!(v1, r3.random::<u64>());
    }

    #[test]
    fn empty_when_density_vanishes() {
        let cfg = NetworkConfig::reference().with_density_per_km2(0.0).unwrap();
        for i in 0..10 {
            assert!(sample_realization(&cfg, StreamId::new(1, i, Lane::Geometry)).is_empty());
        }
    }

    #[test]
    fn mean_count() {
        let cfg = NetworkConfig::reference();
        let mean = cfg.mean_bs_count();
        assert!((mean - 282.7).abs() < 0.05);
        let n = 10_000;
        let total: usize = (0..n)
            .map(|i| sample_realization(&cfg, StreamId::new(11, i, Lane::Geometry)).len())
            .sum();
        let sample_mean = total as f64 / n as f64;
        let se = (mean / n as f64).sqrt();
        assert!((sample_mean - mean).abs() < 3.0 * se, "{sample_mean} vs {mean}");
    }

    #[test]
    fn radii_uniform_in_area() {
        let cfg = NetworkConfig::reference();
        let (lo, hi) = (cfg.exclusion_radius().powi(2), cfg.radius().powi(2));
        let mut u: Vec<f64> = Vec::new();
        let mut i = 0;
        while u.len() < 100_000 {
            let p = sample_realization(&cfg, StreamId::new(5, i, Lane::Geometry));
            for &r in &p.radii {
                assert!(r >= cfg.exclusion_radius() && r <= cfg.radius());
                u.push((r * r - lo) / (hi - lo));
            }
            i += 1;
        }
        u.sort_by(f64::total_cmp);
        let n = u.len() as f64;
        let d = u
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample KS statistic
        assert!(d < 1.628 / n.sqrt(), "D = {d}");
    }

    #[test]
    fn fading_moments_and_cdf() {
        let mut rng = StreamId::new(3, 0, Lane::Time).rng();
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut below = 0usize;
        for _ in 0..n {
            let h = sample_fading(3, &mut rng);
            assert!(h >= 0.0);
            sum += h;
            below += usize::from(h < 1.0);
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.005);
        let cdf = 1.0 - (-3f64).exp() * (1.0 + 3.0 + 4.5);
        assert!((below as f64 / n as f64 - cdf).abs() < 0.005);
    }

    #[test]
    fn unit_exponential_for_m1() {
        let mut rng = StreamId::new(9, 0, Lane::Time).rng();
        let n = 200_000;
        let above = (0..n).filter(|_| sample_fading(1, &mut rng) > 1.0).count();
        assert!((above as f64 / n as f64 - (-1f64).exp()).abs() < 0.005);
    }

    #[test]
    fn beam_angles() {
        let p = side_lobe_extrema(64, 9).unwrap();
        let mut rng = StreamId::new(4, 0, Lane::Time).rng();
        let n = 1_000_000;
        let mut gain = 0.0;
        let mut angles = Vec::with_capacity(n);
        for _ in 0..n {
            let phi = sample_beam_angle(&mut rng);
            assert!((-PI / 3.0..PI / 3.0).contains(&phi));
            gain += multicosine_gain(phi, &p);
            angles.push(phi);
        }
        assert!((gain / n as f64 - p.sector_mean_gain()).abs() < 0.002);
        angles.sort_by(f64::total_cmp);
        let nf = n as f64;
        let d = angles
            .iter()
            .enumerate()
            .map(|(i, &x)| ((x + PI / 3.0) / (2.0 * PI / 3.0) - (i as f64 + 0.5) / nf).abs())
            .fold(0.0, f64::max);
        assert!(d < 1.628 / nf.sqrt());
    }

    #[test]
    fn csv_round_trip() {
        let cfg = NetworkConfig::reference();
        let p = sample_realization(&cfg, StreamId::new(2, 0, Lane::Geometry));
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = PppRealization::read_csv(&buf[..], &cfg).unwrap();
        assert_eq!(back.radii, p.radii);
        assert!(PppRealization::read_csv(&b"radius_m\n5.0\n"[..], &cfg).is_err());
        assert!(PppRealization::read_csv(&b"abc\n"[..], &cfg).is_err());
    }
}
