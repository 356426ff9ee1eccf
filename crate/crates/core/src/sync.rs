//! GNSS/ephemeris-based timing advance and Doppler pre-compensation.
//!
//! The UE knows its own position and the satellite's orbit, so it computes
//! delay and Doppler itself. What remains is a bounded estimation error,
//! injected here and compared with terrestrial TDD tolerances.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::duplexing::timing_advance;
use crate::error::{Error, Result};
use crate::geometry::{doppler_shift, ConstellationGeometry, UePlacement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorDistribution {
    Uniform,
    /// Normal with σ = bound/3, redrawn until inside the bound.
    TruncatedGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnssErrorModel {
    pub timing_error_bound_s: f64,
    pub frequency_error_bound_ppm: f64,
    pub distribution: ErrorDistribution,
}

impl Default for GnssErrorModel {
    fn default() -> Self {
        Self {
            timing_error_bound_s: 0.13e-6,
            frequency_error_bound_ppm: 0.1,
            distribution: ErrorDistribution::Uniform,
        }
    }
}

impl GnssErrorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.timing_error_bound_s >= 0.0 && self.timing_error_bound_s.is_finite()) {
            return Err(Error::invalid("sync.timing_error_bound_us", "must be >= 0"));
        }
        if !(self.frequency_error_bound_ppm >= 0.0 && self.frequency_error_bound_ppm.is_finite()) {
            return Err(Error::invalid("sync.frequency_error_bound_ppm", "must be >= 0"));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, bound: f64, rng: &mut R) -> f64 {
        if bound == 0.0 {
            return 0.0;
        }
        match self.distribution {
            ErrorDistribution::Uniform => rng.random_range(-bound..=bound),
            ErrorDistribution::TruncatedGaussian => {
                let normal = Normal::new(0.0, bound / 3.0).expect("positive sigma");
                loop {
                    let e: f64 = normal.sample(rng);
                    if e.abs() <= bound {
                        return e;
                    }
                }
            }
        }
    }
}

/// Terrestrial TDD tolerances the residuals are compared against. The
/// defaults (3 µs, 0.05 ppm) are external assumptions, not derived here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncThresholds {
    pub timing_s: f64,
    pub frequency_ppm: f64,
}

impl Default for SyncThresholds {
    fn default() -> Self {
        Self {
            timing_s: 3e-6,
            frequency_ppm: 0.05,
        }
    }
}

impl SyncThresholds {
    pub fn validate(&self) -> Result<()> {
        if self.timing_s.is_nan() || self.timing_s <= 0.0 {
            return Err(Error::invalid("sync.timing_threshold_us", "must be > 0"));
        }
        if self.frequency_ppm.is_nan() || self.frequency_ppm <= 0.0 {
            return Err(Error::invalid("sync.frequency_threshold_ppm", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyncBudget {
    pub residual_timing_s: f64,
    pub residual_frequency_hz: f64,
    pub timing_threshold_s: f64,
    pub frequency_threshold_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RequirementCheck {
    pub timing_pass: bool,
    pub frequency_pass: bool,
    /// Threshold minus residual; negative when failing.
    pub timing_margin_s: f64,
    pub frequency_margin_hz: f64,
}

impl RequirementCheck {
    pub fn passed(&self) -> bool {
        self.timing_pass && self.frequency_pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingEstimate {
    pub estimate_s: f64,
    pub residual_s: f64,
}

pub fn estimate_timing_advance<R: Rng + ?Sized>(
    geom: &ConstellationGeometry,
    ue: &UePlacement,
    err: &GnssErrorModel,
    rng: &mut R,
) -> TimingEstimate {
    let sight = geom.sight_line(ue, 1.0);
    let e = err.draw(err.timing_error_bound_s, rng);
    TimingEstimate {
        estimate_s: timing_advance(sight.delay_s) + e,
        residual_s: e.abs(),
    }
}

/// Frequency left over after the UE pre-compensates its predicted Doppler.
pub fn doppler_precompensation<R: Rng + ?Sized>(
    geom: &ConstellationGeometry,
    ue: &UePlacement,
    carrier_hz: f64,
    err: &GnssErrorModel,
    rng: &mut R,
) -> f64 {
    let truth = doppler_shift(geom.radial_velocity(ue), carrier_hz);
    let eps_ppm = err.draw(err.frequency_error_bound_ppm, rng);
    let predicted = truth + carrier_hz * eps_ppm * 1e-6;
    (truth - predicted).abs()
}

pub fn check_requirements(budget: &SyncBudget) -> RequirementCheck {
    RequirementCheck {
        timing_pass: budget.residual_timing_s <= budget.timing_threshold_s,
        frequency_pass: budget.residual_frequency_hz <= budget.frequency_threshold_hz,
        timing_margin_s: budget.timing_threshold_s - budget.residual_timing_s,
        frequency_margin_hz: budget.frequency_threshold_hz - budget.residual_frequency_hz,
    }
}

/// Listening window a random-access occasion needs to hear every UE.
pub fn random_access_window(geom: &ConstellationGeometry) -> f64 {
    geom.differential_delay()
}

/// Aggregate of many per-UE synchronization draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyncReport {
    pub draws: usize,
    pub timing_error_bound_us: f64,
    pub frequency_error_bound_ppm: f64,
    pub carrier_ghz: f64,
    pub timing_threshold_us: f64,
    pub frequency_threshold_hz: f64,
    /// Thresholds are terrestrial figures supplied by config.
    pub thresholds_are_external_assumptions: bool,
    pub max_timing_residual_us: f64,
    pub mean_timing_residual_us: f64,
    pub max_frequency_residual_hz: f64,
    pub mean_frequency_residual_hz: f64,
    pub timing_pass_fraction: f64,
    pub frequency_pass_fraction: f64,
    pub random_access_window_ms: f64,
}

/// Accumulates per-UE residuals into a [`SyncReport`].
#[derive(Debug, Clone)]
pub struct SyncAccumulator {
    err: GnssErrorModel,
    thresholds: SyncThresholds,
    carrier_hz: f64,
    n: usize,
    timing_sum: f64,
    timing_max: f64,
    freq_sum: f64,
    freq_max: f64,
    timing_pass: usize,
    freq_pass: usize,
}

impl SyncAccumulator {
    pub fn new(err: GnssErrorModel, thresholds: SyncThresholds, carrier_hz: f64) -> Self {
        Self {
            err,
            thresholds,
            carrier_hz,
            n: 0,
            timing_sum: 0.0,
            timing_max: 0.0,
            freq_sum: 0.0,
            freq_max: 0.0,
            timing_pass: 0,
            freq_pass: 0,
        }
    }

    pub fn frequency_threshold_hz(&self) -> f64 {
        self.thresholds.frequency_ppm * 1e-6 * self.carrier_hz
    }

    pub fn push(&mut self, residual_timing_s: f64, residual_frequency_hz: f64) {
        let check = check_requirements(&SyncBudget {
            residual_timing_s,
            residual_frequency_hz,
            timing_threshold_s: self.thresholds.timing_s,
            frequency_threshold_hz: self.frequency_threshold_hz(),
        });
        self.n += 1;
        self.timing_sum += residual_timing_s;
        self.timing_max = self.timing_max.max(residual_timing_s);
        self.freq_sum += residual_frequency_hz;
        self.freq_max = self.freq_max.max(residual_frequency_hz);
        self.timing_pass += check.timing_pass as usize;
        self.freq_pass += check.frequency_pass as usize;
    }

    pub fn finish(&self, geom: &ConstellationGeometry) -> SyncReport {
        let n = self.n.max(1) as f64;
        SyncReport {
            draws: self.n,
            timing_error_bound_us: self.err.timing_error_bound_s * 1e6,
            frequency_error_bound_ppm: self.err.frequency_error_bound_ppm,
            carrier_ghz: self.carrier_hz / 1e9,
            timing_threshold_us: self.thresholds.timing_s * 1e6,
            frequency_threshold_hz: self.frequency_threshold_hz(),
            thresholds_are_external_assumptions: true,
            max_timing_residual_us: self.timing_max * 1e6,
            mean_timing_residual_us: self.timing_sum / n * 1e6,
            max_frequency_residual_hz: self.freq_max,
            mean_frequency_residual_hz: self.freq_sum / n,
            timing_pass_fraction: self.timing_pass as f64 / n,
            frequency_pass_fraction: self.freq_pass as f64 / n,
            random_access_window_ms: random_access_window(geom) * 1e3,
        }
    }
}

/// Draws `draws` UEs and their synchronization residuals from one seeded stream.
pub fn sync_campaign<R: Rng + ?Sized>(
    geom: &ConstellationGeometry,
    carrier_hz: f64,
    err: &GnssErrorModel,
    thresholds: &SyncThresholds,
    draws: usize,
    rng: &mut R,
) -> SyncReport {
    let mut acc = SyncAccumulator::new(*err, *thresholds, carrier_hz);
    for _ in 0..draws {
        let ue = geom.sample_ue(rng);
        let t = estimate_timing_advance(geom, &ue, err, rng);
        let f = doppler_precompensation(geom, &ue, carrier_hz, err, rng);
        acc.push(t.residual_s, f);
    }
    acc.finish(geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom() -> ConstellationGeometry {
        ConstellationGeometry::new(600.0, 10f64.to_radians()).unwrap()
    }

    #[test]
    fn zero_bounds_give_zero_residuals() {
        let err = GnssErrorModel {
            timing_error_bound_s: 0.0,
            frequency_error_bound_ppm: 0.0,
            distribution: ErrorDistribution::Uniform,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ue = geom().sample_ue(&mut rng);
        let t = estimate_timing_advance(&geom(), &ue, &err, &mut rng);
        assert_eq!(t.residual_s, 0.0);
        assert!((t.estimate_s - timing_advance(geom().sight_line(&ue, 1.0).delay_s)).abs() < 1e-18);
        assert_eq!(doppler_precompensation(&geom(), &ue, 20e9, &err, &mut rng), 0.0);
    }

    #[test]
    fn uniform_timing_residual_statistics() {
        let err = GnssErrorModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = geom();
        let n = 100_000;
        let res: Vec<f64> = (0..n)
            .map(|_| {
                let ue = g.sample_ue(&mut rng);
                estimate_timing_advance(&g, &ue, &err, &mut rng).residual_s
            })
            .collect();
        let b = 0.13e-6;
        assert!(res.iter().all(|&r| r <= b && r <= 3e-6));
        let mean = res.iter().sum::<f64>() / n as f64;
        // |U(-b, b)| is U(0, b): mean b/2, sd b/√12
        let sigma = b / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - b / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn frequency_residual_bounds() {
        for (dist, seed) in [(ErrorDistribution::Uniform, 3), (ErrorDistribution::TruncatedGaussian, 4)] {
            let err = GnssErrorModel { distribution: dist, ..Default::default() };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = geom();
            for _ in 0..20_000 {
                let ue = g.sample_ue(&mut rng);
                assert!(doppler_precompensation(&g, &ue, 20e9, &err, &mut rng) <= 2000.0 * (1.0 + 1e-12));
                assert!(doppler_precompensation(&g, &ue, 30e9, &err, &mut rng) <= 3000.0 * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn requirement_checks() {
        let zero = check_requirements(&SyncBudget {
            residual_timing_s: 0.0,
            residual_frequency_hz: 0.0,
            timing_threshold_s: 3e-6,
            frequency_threshold_hz: 1000.0,
        });
        assert!(zero.passed());
        assert_eq!(zero.timing_margin_s, 3e-6);
        assert_eq!(zero.frequency_margin_hz, 1000.0);

        let mixed = check_requirements(&SyncBudget {
            residual_timing_s: 0.13e-6,
            residual_frequency_hz: 2000.0,
            timing_threshold_s: 3e-6,
            frequency_threshold_hz: 0.05e-6 * 20e9,
        });
        assert!(mixed.timing_pass);
        assert!(!mixed.frequency_pass);
        assert!(mixed.frequency_margin_hz < 0.0);

        let edge = check_requirements(&SyncBudget {
            residual_timing_s: 3e-6,
            residual_frequency_hz: 1000.0,
            timing_threshold_s: 3e-6,
            frequency_threshold_hz: 1000.0,
        });
        assert!(edge.passed());
    }

    #[test]
    fn requirement_check_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let b = SyncBudget {
                residual_timing_s: rng.random_range(0.0..5e-6),
                residual_frequency_hz: rng.random_range(0.0..3000.0),
                timing_threshold_s: 3e-6,
                frequency_threshold_hz: 1000.0,
            };
            let smaller = SyncBudget {
                residual_timing_s: b.residual_timing_s * rng.random::<f64>(),
                residual_frequency_hz: b.residual_frequency_hz * rng.random::<f64>(),
                ..b
            };
            let (x, y) = (check_requirements(&b), check_requirements(&smaller));
            assert!(!x.timing_pass || y.timing_pass);
            assert!(!x.frequency_pass || y.frequency_pass);
        }
    }

    #[test]
    fn access_window() {
        assert!((random_access_window(&geom()) * 1e3 - 4.441_857).abs() < 1e-6);
        let nadir = ConstellationGeometry::new(600.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(random_access_window(&nadir).abs() < 1e-15);
        let high = ConstellationGeometry::new(1200.0, 10f64.to_radians()).unwrap();
        assert!((random_access_window(&high) * 1e3 - 6.440_930).abs() < 1e-6);
    }

    #[test]
    fn campaign_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = sync_campaign(
            &geom(),
            20e9,
            &GnssErrorModel::default(),
            &SyncThresholds::default(),
            10_000,
            &mut rng,
        );
        assert_eq!(r.timing_pass_fraction, 1.0);
        assert!((r.frequency_threshold_hz - 1000.0).abs() < 1e-9);
        // uniform ±2 kHz against a 1 kHz threshold passes about half the time
        assert!((r.frequency_pass_fraction - 0.5).abs() < 0.03);
        assert!(r.thresholds_are_external_assumptions);
    }
}
