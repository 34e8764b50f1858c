//! Network geometry and large-scale fading.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Height difference between AP antennas (10 m) and UEs (1.5 m).
pub const AP_UE_HEIGHT_DIFF: f64 = 8.5;

/// Urban microcell pathloss at 1 m, in dB.
pub const PATHLOSS_INTERCEPT_DB: f64 = 30.5;
/// Urban microcell pathloss slope, dB per decade of distance.
pub const PATHLOSS_SLOPE_DB: f64 = 36.7;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Side of the square simulation area in meters.
    pub area_side: f64,
    pub num_aps: usize,
    pub num_ues: usize,
    pub num_pilots: usize,
    /// Coherence block length in samples.
    pub coherence_len: usize,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    /// Pilot transmit power in W.
    pub pilot_tx_power: f64,
    /// Uplink data transmit power in W.
    pub uplink_tx_power: f64,
    /// Noise figure as a linear factor.
    pub noise_figure: f64,
    /// Noise temperature in K.
    pub noise_temp: f64,
    /// Boltzmann constant in J/K.
    pub boltzmann: f64,
    /// Log-normal shadowing standard deviation in dB.
    pub shadowing_sigma: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            area_side: 1000.0,
            num_aps: 100,
            num_ues: 40,
            num_pilots: 10,
            coherence_len: 200,
            bandwidth: 20e6,
            pilot_tx_power: 0.1,
            uplink_tx_power: 0.1,
            noise_figure: 9.0,
            noise_temp: 290.0,
            boltzmann: 1.381e-23,
            shadowing_sigma: 4.0,
            realizations: 200,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_aps < 1 {
            return fail("num_aps must be at least 1".into());
        }
        if self.num_ues < 1 {
            return fail("num_ues must be at least 1".into());
        }
        if self.num_pilots < 1 || self.num_pilots > self.coherence_len {
            return fail(format!(
                "num_pilots must lie in [1, coherence_len = {}], got {}",
                self.coherence_len, self.num_pilots
            ));
        }
        let positive = [
            ("area_side", self.area_side),
            ("bandwidth", self.bandwidth),
            ("pilot_tx_power", self.pilot_tx_power),
            ("uplink_tx_power", self.uplink_tx_power),
            ("noise_figure", self.noise_figure),
            ("noise_temp", self.noise_temp),
            ("boltzmann", self.boltzmann),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return fail(format!("{name} must be strictly positive, got {value}"));
            }
        }
        if !(self.shadowing_sigma >= 0.0 && self.shadowing_sigma.is_finite()) {
            return fail(format!(
                "shadowing_sigma must be non-negative, got {}",
                self.shadowing_sigma
            ));
        }
        Ok(())
    }

    /// Pilot SNR normalized by the noise power.
    pub fn rho_p(&self) -> f64 {
        self.pilot_tx_power / noise_power(self)
    }

    /// Uplink data SNR normalized by the noise power.
    pub fn rho_u(&self) -> f64 {
        self.uplink_tx_power / noise_power(self)
    }

    /// Fraction of the bandwidth that carries uplink data: (1 - τp/τc) / 2.
    pub fn prelog(&self) -> f64 {
        (1.0 - self.num_pilots as f64 / self.coherence_len as f64) / 2.0
    }
}

/// Thermal noise power `B · k_B · T0 · W` in watts.
pub fn noise_power(cfg: &SimConfig) -> f64 {
    cfg.bandwidth * cfg.boltzmann * cfg.noise_temp * cfg.noise_figure
}

/// Distance on the torus of side `side`: the minimum over the 3×3 grid of
/// translated copies of `b`. For points inside the square the minimum
/// separates per axis, which keeps the result exactly symmetric.
pub fn wrap_distance(a: Point, b: Point, side: f64) -> f64 {
    let axis = |u: f64, v: f64| {
        let d = (u - v).abs();
        d.min((side - d).abs())
    };
    axis(a[0], b[0]).hypot(axis(a[1], b[1]))
}

/// Linear large-scale gain for a link of length `d` meters with `shadow_db`
/// of log-normal shadowing.
pub fn large_scale_coefficient(d: f64, shadow_db: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "link distance must be positive, got {d}"
        )));
    }
    let gain_db = -PATHLOSS_INTERCEPT_DB - PATHLOSS_SLOPE_DB * d.log10() + shadow_db;
    Ok(10f64.powf(gain_db / 10.0))
}

/// Per-realization RNG seed: the master seed xored with a hash of the index.
pub fn realization_seed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index)
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One Monte Carlo drop of APs and UEs.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub ap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    /// `M × K` linear large-scale fading gains.
    pub beta: Array2<f64>,
}

impl NetworkRealization {
    pub fn num_aps(&self) -> usize {
        self.beta.nrows()
    }

    pub fn num_ues(&self) -> usize {
        self.beta.ncols()
    }
}

/// Draw realization `index` for `cfg`. The result is a pure function of
/// `(cfg, cfg.seed, index)`.
pub fn generate_realization(cfg: &SimConfig, index: u64) -> NetworkRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(realization_seed(cfg.seed, index));
    let side = cfg.area_side;
    let draw_point = |rng: &mut ChaCha8Rng| -> Point {
        [rng.random::<f64>() * side, rng.random::<f64>() * side]
    };
    let ap_positions: Vec<Point> = (0..cfg.num_aps).map(|_| draw_point(&mut rng)).collect();
    let ue_positions: Vec<Point> = (0..cfg.num_ues).map(|_| draw_point(&mut rng)).collect();

    let shadowing = Normal::new(0.0, cfg.shadowing_sigma).expect("validated sigma");
    let beta = Array2::from_shape_fn((cfg.num_aps, cfg.num_ues), |(m, k)| {
        let planar = wrap_distance(ap_positions[m], ue_positions[k], side);
        let d = planar.hypot(AP_UE_HEIGHT_DIFF);
        let shadow_db = shadowing.sample(&mut rng);
        large_scale_coefficient(d, shadow_db).expect("distance is at least the height difference")
    });

    NetworkRealization {
        ap_positions,
        ue_positions,
        beta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(a.abs())
    }

    #[test]
    fn wrap_distance_examples() {
        assert_eq!(wrap_distance([0.0, 0.0], [500.0, 0.0], 1000.0), 500.0);
        assert!((wrap_distance([0.0, 0.0], [999.0, 0.0], 1000.0) - 1.0).abs() < 1e-9);
        assert!(
            (wrap_distance([0.0, 0.0], [999.0, 999.0], 1000.0) - 2f64.sqrt()).abs() < 1e-9
        );
    }

    #[test]
    fn pathloss_examples() {
        assert!(rel_close(large_scale_coefficient(1.0, 0.0).unwrap(), 8.912509e-4, 1e-6));
        assert!(rel_close(large_scale_coefficient(10.0, 0.0).unwrap(), 1.905461e-7, 1e-6));
        let base = large_scale_coefficient(1.0, 0.0).unwrap();
        assert!(rel_close(large_scale_coefficient(1.0, 10.0).unwrap(), 10.0 * base, 1e-12));
        assert!(large_scale_coefficient(0.0, 0.0).is_err());
        assert!(large_scale_coefficient(-3.0, 0.0).is_err());
    }

    #[test]
    fn pathloss_decreasing_on_grid() {
        let gains: Vec<f64> = (1..=1400)
            .map(|d| large_scale_coefficient(d as f64, 0.0).unwrap())
            .collect();
        assert!(gains.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn noise_power_examples() {
        let cfg = SimConfig::default();
        assert!(rel_close(noise_power(&cfg), 7.20882e-13, 1e-5));
        let cfg = SimConfig {
            noise_figure: 1.0,
            ..SimConfig::default()
        };
        assert!(rel_close(noise_power(&cfg), 8.0098e-14, 1e-5));
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = [
            SimConfig { bandwidth: 0.0, ..SimConfig::default() },
            SimConfig { num_aps: 0, ..SimConfig::default() },
            SimConfig { num_ues: 0, ..SimConfig::default() },
            SimConfig { num_pilots: 0, ..SimConfig::default() },
            SimConfig { num_pilots: 201, ..SimConfig::default() },
            SimConfig { area_side: -1.0, ..SimConfig::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn realization_is_deterministic_and_streams_differ() {
        let cfg = SimConfig { seed: 11, ..SimConfig::default() };
        let a = generate_realization(&cfg, 3);
        let b = generate_realization(&cfg, 3);
        let c = generate_realization(&cfg, 4);
        assert_eq!(a, b);
        assert_ne!(a.ue_positions, c.ue_positions);
    }

    #[test]
    fn realization_shape_and_positivity() {
        let cfg = SimConfig::default();
        let r = generate_realization(&cfg, 0);
        assert_eq!(r.beta.dim(), (100, 40));
        assert_eq!(r.beta.iter().filter(|b| **b > 0.0 && b.is_finite()).count(), 4000);
        for p in r.ap_positions.iter().chain(&r.ue_positions) {
            assert!((0.0..1000.0).contains(&p[0]) && (0.0..1000.0).contains(&p[1]));
        }
    }
}
