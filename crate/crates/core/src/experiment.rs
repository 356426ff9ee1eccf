//! UE drops, per-scheme evaluation and empirical distributions.
//!
//! Each UE draws from its own ChaCha stream keyed by `(seed, ue_index)`, so
//! results do not depend on how the work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::duplexing::{density_from_snr, ue_overlap, resource_share, FrameScheme};
use crate::error::{Error, Result};
use crate::sync::{doppler_precompensation, estimate_timing_advance, SyncAccumulator, SyncReport};

/// One TDD scheme's result for one UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeOutcome {
    pub overlap_s: f64,
    pub dl_time_fraction: f64,
    /// `None` when the FDD baseline carries nothing.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UeRecord {
    pub ue_index: usize,
    pub central_angle: f64,
    pub azimuth: f64,
    pub elevation: f64,
    pub slant_range_km: f64,
    pub delay_s: f64,
    pub doppler_hz: f64,
    pub snr_db: f64,
    pub timing_residual_s: f64,
    pub frequency_residual_hz: f64,
    pub schemes: Vec<SchemeOutcome>,
}

impl UeRecord {
    pub fn is_degenerate(&self) -> bool {
        self.schemes.iter().any(|s| s.ratio.is_none())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutput {
    pub schemes: Vec<FrameScheme>,
    pub records: Vec<UeRecord>,
    pub sync: SyncReport,
}

impl RunOutput {
    pub fn scheme_ids(&self) -> Vec<String> {
        self.schemes.iter().map(FrameScheme::id).collect()
    }

    /// Non-degenerate ratios of scheme `k`, in UE order.
    pub fn ratios(&self, k: usize) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.schemes[k].ratio).collect()
    }

    pub fn summary(&self) -> Result<Vec<SchemeSummary>> {
        summarize(&self.records, &self.schemes)
    }

    pub fn cdfs(&self) -> Result<Vec<(String, CdfSeries)>> {
        (0..self.schemes.len())
            .map(|k| Ok((self.schemes[k].id(), empirical_cdf(&self.ratios(k))?)))
            .collect()
    }
}

fn evaluate_ue(cfg: &ScenarioConfig, ctx: &Context, ue_index: usize) -> Result<UeRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.experiment.seed);
    rng.set_stream(ue_index as u64);

    let ue = ctx.geom.sample_ue(&mut rng);
    let sight = ctx.geom.sight_line(&ue, ctx.link.carrier_hz);
    let timing = estimate_timing_advance(&ctx.geom, &ue, &ctx.gnss, &mut rng);
    let freq = doppler_precompensation(&ctx.geom, &ue, ctx.link.carrier_hz, &ctx.gnss, &mut rng);

    let snr_db = ctx.link.cnr_db(sight.slant_range_km)?;
    let den = density_from_snr(&ctx.baseline, sight.delay_s, snr_db, &ctx.link, &ctx.aging);
    let schemes = ctx
        .schemes
        .iter()
        .map(|s| {
            let share = resource_share(s, sight.delay_s);
            let num = density_from_snr(s, sight.delay_s, snr_db, &ctx.link, &ctx.aging);
            SchemeOutcome {
                overlap_s: ue_overlap(sight.delay_s, s).total_length_s,
                dl_time_fraction: share.dl_time_fraction,
                ratio: (den > 0.0).then(|| num / den),
            }
        })
        .collect();

    Ok(UeRecord {
        ue_index,
        central_angle: ue.central_angle,
        azimuth: ue.azimuth,
        elevation: sight.elevation,
        slant_range_km: sight.slant_range_km,
        delay_s: sight.delay_s,
        doppler_hz: sight.doppler_hz,
        snr_db,
        timing_residual_s: timing.residual_s,
        frequency_residual_hz: freq,
        schemes,
    })
}

struct Context {
    geom: crate::geometry::ConstellationGeometry,
    link: crate::channel::LinkBudgetParams,
    aging: crate::channel::CsiAgingModel,
    gnss: crate::sync::GnssErrorModel,
    baseline: FrameScheme,
    schemes: Vec<FrameScheme>,
}

/// Runs the configured scenario. Deterministic for a fixed config.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let ctx = Context {
        geom: cfg.geometry()?,
        link: cfg.link_params(),
        aging: cfg.aging_model(),
        gnss: cfg.gnss_error(),
        baseline: cfg.fdd_baseline(),
        schemes: cfg.tdd_schemes(),
    };
    if ctx.geom.coverage_central_angle() <= 0.0 {
        return Err(Error::invalid(
            "geometry.min_elevation_deg",
            "coverage area is a single point; nothing to sample",
        ));
    }

    let n = cfg.experiment.num_ues;
    #[cfg(feature = "parallel")]
    let records: Vec<UeRecord> = {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| evaluate_ue(cfg, &ctx, i))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let records: Vec<UeRecord> = (0..n).map(|i| evaluate_ue(cfg, &ctx, i)).collect::<Result<_>>()?;

    let mut acc = SyncAccumulator::new(ctx.gnss, cfg.sync_thresholds(), ctx.link.carrier_hz);
    for r in &records {
        acc.push(r.timing_residual_s, r.frequency_residual_hz);
    }
    Ok(RunOutput {
        schemes: ctx.schemes,
        records,
        sync: acc.finish(&ctx.geom),
    })
}

/// Empirical distribution function sampled at each distinct value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfSeries {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CdfSeries {
    /// F(x): share of samples at or below `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else {
            self.probabilities[k - 1]
        }
    }

    /// Smallest sample with F(x) >= p.
    pub fn quantile(&self, p: f64) -> f64 {
        let k = self.probabilities.partition_point(|&q| q < p);
        self.values[k.min(self.values.len() - 1)]
    }
}

pub fn empirical_cdf(values: &[f64]) -> Result<CdfSeries> {
    if values.is_empty() {
        return Err(Error::Empty("empirical_cdf"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out = CdfSeries {
        values: Vec::new(),
        probabilities: Vec::new(),
    };
    for (i, &v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        if out.values.last() == Some(&v) {
            *out.probabilities.last_mut().unwrap() = p;
        } else {
            out.values.push(v);
            out.probabilities.push(p);
        }
    }
    Ok(out)
}

/// Share of `values` strictly above `threshold`.
pub fn fraction_above(values: &[f64], threshold: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("fraction_above"));
    }
    Ok(values.iter().filter(|&&v| v > threshold).count() as f64 / values.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub scheme: String,
    pub label: String,
    pub count: usize,
    pub degenerate: usize,
    pub mean_ratio: f64,
    pub median_ratio: f64,
    pub fraction_above_one: f64,
}

pub fn summarize(records: &[UeRecord], schemes: &[FrameScheme]) -> Result<Vec<SchemeSummary>> {
    if records.is_empty() {
        return Err(Error::Empty("summarize"));
    }
    schemes
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut ratios: Vec<f64> = records.iter().filter_map(|r| r.schemes[k].ratio).collect();
            if ratios.is_empty() {
                return Err(Error::Empty("summarize: every record is degenerate"));
            }
            let degenerate = records.len() - ratios.len();
            ratios.sort_by(f64::total_cmp);
            let m = ratios.len();
            let median = if m % 2 == 1 {
                ratios[m / 2]
            } else {
                0.5 * (ratios[m / 2 - 1] + ratios[m / 2])
            };
            Ok(SchemeSummary {
                scheme: s.id(),
                label: s.to_string(),
                count: m,
                degenerate,
                mean_ratio: ratios.iter().sum::<f64>() / m as f64,
                median_ratio: median,
                fraction_above_one: fraction_above(&ratios, 1.0)?,
            })
        })
        .collect()
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKey {
    SicDb,
    DopplerSpread,
    FrameLength,
}

impl SweepKey {
    pub fn parse(key: &str) -> Result<Self> {
        match key {
            "sic_db" | "duplexing.pou_sic_db" => Ok(SweepKey::SicDb),
            "doppler_spread" | "aging.doppler_spread_hz" => Ok(SweepKey::DopplerSpread),
            "frame_length" | "duplexing.frame_ms" => Ok(SweepKey::FrameLength),
            other => Err(Error::invalid(
                other,
                "not sweepable (expected sic_db, doppler_spread or frame_length)",
            )),
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            SweepKey::SicDb => "sic_db",
            SweepKey::DopplerSpread => "doppler_spread_hz",
            SweepKey::FrameLength => "frame_ms",
        }
    }

    fn override_for(self, value: f64) -> String {
        match self {
            SweepKey::SicDb => format!("duplexing.pou_sic_db=[{}]", toml_float(value)),
            SweepKey::DopplerSpread => format!("aging.doppler_spread_hz={}", toml_float(value)),
            SweepKey::FrameLength => format!("duplexing.frame_ms={}", toml_float(value)),
        }
    }
}

fn toml_float(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub summaries: Vec<SchemeSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub key: &'static str,
    /// Column prefixes, one per scheme slot.
    pub slots: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Re-runs the scenario once per value. For a SIC sweep the POU list
/// collapses to the single swept level and its slot is called `pou`.
pub fn sweep(cfg: &ScenarioConfig, key: SweepKey, values: &[f64]) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::Empty("sweep values"));
    }
    let mut rows = Vec::with_capacity(values.len());
    let mut slots = Vec::new();
    for &v in values {
        let cfg_v = cfg.with_overrides(&[key.override_for(v)])?;
        let out = run(&cfg_v)?;
        if slots.is_empty() {
            slots = out
                .schemes
                .iter()
                .map(|s| match (key, s.kind) {
                    (SweepKey::SicDb, crate::duplexing::SchemeKind::TddPou) => "pou".to_string(),
                    _ => s.id(),
                })
                .collect();
        }
        rows.push(SweepRow {
            value: v,
            summaries: out.summary()?,
        });
    }
    Ok(SweepTable {
        key: key.column(),
        slots,
        rows,
    })
}
