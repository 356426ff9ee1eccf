//! FDD baseline and the three TDD frame-structure schemes.
//!
//! Every TDD frame puts its downlink span at the head of the frame and its
//! uplink span at the tail. A UE receives the downlink at `[0, αT)` in its
//! own time base and must start its uplink `2τ` early, so the uplink window
//! slides back by `δ = 2τ mod T` and may overlap the downlink it is still
//! receiving. How each scheme pays for that overlap is what separates them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{avg_se_over_window, self_interference_sinr, CsiAgingModel, LinkBudgetParams};
use crate::error::{Error, Result};
use crate::geometry::SightLine;

/// Clean SNR below this is treated as no link at all.
pub const DEGENERATE_SNR_DB: f64 = -30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    Fdd,
    /// Extended frame with a proportional 1-in-14 guard.
    TddEfs,
    /// UE-specific guard covering exactly the UE's own overlap.
    TddUsg,
    /// No guard; the UE transmits over part of its downlink and cancels the leakage.
    TddPou,
}

impl SchemeKind {
    pub fn is_tdd(self) -> bool {
        self != SchemeKind::Fdd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameScheme {
    pub kind: SchemeKind,
    pub frame_length_s: f64,
    /// Share of the frame (TDD) or of the band (FDD) given to the downlink.
    pub dl_fraction: f64,
    /// EFS only.
    pub guard_slot_fraction: f64,
    /// FDD only.
    pub fdd_guard_band_fraction: f64,
    /// POU only. `f64::INFINITY` is perfect cancellation.
    pub sic_db: f64,
    /// Common timing-advance offset subtracted before the mod-T reduction.
    pub common_ta_offset_s: f64,
    /// Fixed SNR back-off applied to this scheme's downlink, dB.
    pub snr_backoff_db: f64,
}

impl FrameScheme {
    fn base(kind: SchemeKind, frame_length_s: f64, dl_fraction: f64) -> Self {
        Self {
            kind,
            frame_length_s,
            dl_fraction,
            guard_slot_fraction: 0.0,
            fdd_guard_band_fraction: 0.0,
            sic_db: f64::INFINITY,
            common_ta_offset_s: 0.0,
            snr_backoff_db: 0.0,
        }
    }

    pub fn fdd(frame_length_s: f64, dl_fraction: f64, guard_band_fraction: f64) -> Self {
        Self {
            fdd_guard_band_fraction: guard_band_fraction,
            ..Self::base(SchemeKind::Fdd, frame_length_s, dl_fraction)
        }
    }

    pub fn efs(frame_length_s: f64, dl_fraction: f64, guard_slot_fraction: f64) -> Self {
        Self {
            guard_slot_fraction,
            ..Self::base(SchemeKind::TddEfs, frame_length_s, dl_fraction)
        }
    }

    pub fn usg(frame_length_s: f64, dl_fraction: f64) -> Self {
        Self::base(SchemeKind::TddUsg, frame_length_s, dl_fraction)
    }

    pub fn pou(frame_length_s: f64, dl_fraction: f64, sic_db: f64) -> Self {
        Self {
            sic_db,
            ..Self::base(SchemeKind::TddPou, frame_length_s, dl_fraction)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let key = |field: &str| format!("duplexing.{field}");
        if !(self.frame_length_s > 0.0 && self.frame_length_s.is_finite()) {
            return Err(Error::invalid(key("frame_ms"), "must be > 0"));
        }
        if !(self.dl_fraction > 0.0 && self.dl_fraction < 1.0) {
            return Err(Error::invalid(key("dl_fraction"), "must lie in (0, 1)"));
        }
        if !(0.0..1.0).contains(&self.guard_slot_fraction) {
            return Err(Error::invalid(key("guard_slot_fraction"), "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.fdd_guard_band_fraction) {
            return Err(Error::invalid(key("fdd_guard_band"), "must lie in [0, 1)"));
        }
        if self.sic_db.is_nan() || self.sic_db < 0.0 {
            return Err(Error::invalid(key("pou_sic_db"), "must be >= 0"));
        }
        if !self.common_ta_offset_s.is_finite() {
            return Err(Error::invalid(key("common_ta_offset_ms"), "must be finite"));
        }
        if !self.snr_backoff_db.is_finite() {
            return Err(Error::invalid(key("fdd_backoff_db"), "must be finite"));
        }
        Ok(())
    }

    /// Short machine identifier used in CSV headers.
    pub fn id(&self) -> String {
        match self.kind {
            SchemeKind::Fdd => "fdd".into(),
            SchemeKind::TddEfs => "efs".into(),
            SchemeKind::TddUsg => "usg".into(),
            SchemeKind::TddPou if self.sic_db.is_infinite() => "pou_inf".into(),
            SchemeKind::TddPou => format!("pou_{}db", trim_float(self.sic_db)),
        }
    }

    /// Reduced timing advance `δ` in `[0, T)`.
    pub fn reduced_advance(&self, delay_s: f64) -> f64 {
        let t = self.frame_length_s;
        let d = (timing_advance(delay_s) - self.common_ta_offset_s).rem_euclid(t);
        // rem_euclid can return t itself for tiny negative inputs
        if d >= t {
            0.0
        } else {
            d
        }
    }
}

impl fmt::Display for FrameScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SchemeKind::Fdd => write!(f, "FDD"),
            SchemeKind::TddEfs => write!(f, "TDD-EFS"),
            SchemeKind::TddUsg => write!(f, "TDD-USG"),
            SchemeKind::TddPou => write!(f, "TDD-POU ({} dB)", trim_float(self.sic_db)),
        }
    }
}

fn trim_float(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Intervals of the frame, in UE-local time, where the UE transmits while receiving.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OverlapWindow {
    pub intervals: Vec<(f64, f64)>,
    pub total_length_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResourceShare {
    pub bandwidth_fraction: f64,
    pub dl_time_fraction: f64,
    pub overlap_fraction: f64,
}

/// Guard period that lets every UE finish receiving before advancing its uplink.
pub fn required_guard_period(max_delay_s: f64) -> f64 {
    2.0 * max_delay_s
}

/// Round-trip timing advance relative to satellite frame timing.
pub fn timing_advance(delay_s: f64) -> f64 {
    2.0 * delay_s
}

/// Overlap between the UE's downlink reception and its advanced uplink.
pub fn ue_overlap(delay_s: f64, scheme: &FrameScheme) -> OverlapWindow {
    let t = scheme.frame_length_s;
    let dl_end = scheme.dl_fraction * t;
    let delta = scheme.reduced_advance(delay_s);
    if delta == 0.0 {
        return OverlapWindow::default();
    }

    let ul_start = dl_end - delta;
    let ul_end = t - delta;
    // uplink window mapped into [0, T) as at most two linear pieces
    let pieces: [(f64, f64); 2] = if ul_start < 0.0 {
        [(ul_start + t, t), (0.0, ul_end)]
    } else {
        [(ul_start, ul_end), (0.0, 0.0)]
    };

    let mut intervals: Vec<(f64, f64)> = pieces
        .iter()
        .map(|&(a, b)| (a.max(0.0), b.min(dl_end)))
        .filter(|(a, b)| b > a)
        .collect();
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total_length_s = intervals.iter().map(|(a, b)| b - a).sum();
    OverlapWindow {
        intervals,
        total_length_s,
    }
}

/// Time/frequency resources a scheme gives the downlink of a UE at `delay_s`.
pub fn resource_share(scheme: &FrameScheme, delay_s: f64) -> ResourceShare {
    let alpha = scheme.dl_fraction;
    match scheme.kind {
        SchemeKind::Fdd => ResourceShare {
            bandwidth_fraction: alpha * (1.0 - scheme.fdd_guard_band_fraction),
            dl_time_fraction: 1.0,
            overlap_fraction: 0.0,
        },
        SchemeKind::TddEfs => ResourceShare {
            bandwidth_fraction: 1.0,
            dl_time_fraction: alpha * (1.0 - scheme.guard_slot_fraction),
            overlap_fraction: 0.0,
        },
        SchemeKind::TddUsg => {
            let lost = ue_overlap(delay_s, scheme).total_length_s / scheme.frame_length_s;
            ResourceShare {
                bandwidth_fraction: 1.0,
                dl_time_fraction: alpha * (1.0 - lost),
                overlap_fraction: 0.0,
            }
        }
        SchemeKind::TddPou => ResourceShare {
            bandwidth_fraction: 1.0,
            dl_time_fraction: alpha,
            overlap_fraction: ue_overlap(delay_s, scheme).total_length_s / scheme.frame_length_s,
        },
    }
}

/// Age of the CSI at the start of the downlink span. TDD estimates on the
/// uplink and needs one trip; FDD needs the pilot down and the feedback up.
pub fn csi_age_offset(kind: SchemeKind, delay_s: f64) -> f64 {
    match kind {
        SchemeKind::Fdd => 2.0 * delay_s,
        _ => delay_s,
    }
}

/// Downlink bit/s/Hz normalised to the total time-frequency resources, for
/// a UE with one-way delay `delay_s` and clean SNR `snr_db`.
pub fn density_from_snr(
    scheme: &FrameScheme,
    delay_s: f64,
    snr_db: f64,
    link: &LinkBudgetParams,
    aging: &CsiAgingModel,
) -> f64 {
    let snr_db = snr_db - scheme.snr_backoff_db;
    if snr_db < DEGENERATE_SNR_DB {
        return 0.0;
    }
    let share = resource_share(scheme, delay_s);
    let offset = csi_age_offset(scheme.kind, delay_s);
    let window = share.dl_time_fraction * scheme.frame_length_s;
    let clean = avg_se_over_window(10f64.powf(snr_db / 10.0), aging, offset, window);
    let impaired = if share.overlap_fraction > 0.0 {
        let si = self_interference_sinr(link, snr_db, scheme.sic_db);
        avg_se_over_window(10f64.powf(si / 10.0), aging, offset, window)
    } else {
        0.0
    };
    share.bandwidth_fraction
        * ((share.dl_time_fraction - share.overlap_fraction) * clean + share.overlap_fraction * impaired)
}

pub fn dl_throughput_density(
    scheme: &FrameScheme,
    sight: &SightLine,
    link: &LinkBudgetParams,
    aging: &CsiAgingModel,
) -> Result<f64> {
    let snr_db = link.cnr_db(sight.slant_range_km)?;
    Ok(density_from_snr(scheme, sight.delay_s, snr_db, link, aging))
}

/// `scheme` density over `baseline` density. `None` when the baseline
/// carries nothing, which marks the UE as degenerate.
pub fn efficiency_ratio(
    scheme: &FrameScheme,
    baseline: &FrameScheme,
    sight: &SightLine,
    link: &LinkBudgetParams,
    aging: &CsiAgingModel,
) -> Result<Option<f64>> {
    let den = dl_throughput_density(baseline, sight, link, aging)?;
    if den <= 0.0 {
        return Ok(None);
    }
    Ok(Some(dl_throughput_density(scheme, sight, link, aging)? / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::spectral_efficiency;
    use proptest::prelude::*;

    const MS: f64 = 1e-3;

    fn link() -> LinkBudgetParams {
        LinkBudgetParams {
            eirp_density_dbw_mhz: 4.0,
            ue_g_over_t_db_k: 15.9,
            ue_noise_figure_db: 1.2,
            ue_tx_power_dbm: 50.0,
            carrier_hz: 20e9,
            bandwidth_hz: 400e6,
        }
    }

    /// Brute-force tick counter: frame split into `ticks` cells, count cells
    /// that are both downlink reception and (advanced) uplink transmission.
    fn tick_overlap(delay_s: f64, alpha: f64, t: f64, ticks: usize) -> f64 {
        let delta = (2.0 * delay_s).rem_euclid(t);
        let dt = t / ticks as f64;
        let mut hits = 0usize;
        for i in 0..ticks {
            let x = (i as f64 + 0.5) * dt;
            let rx = x < alpha * t;
            // uplink occupies [αT, T) at the satellite; UE sends it δ earlier
            let ul_local = (x + delta).rem_euclid(t);
            let tx = ul_local >= alpha * t;
            if rx && tx {
                hits += 1;
            }
        }
        hits as f64 * dt
    }

    #[test]
    fn guard_and_advance() {
        assert!((required_guard_period(6.443 * MS) - 12.886 * MS).abs() < 1e-15);
        assert!((required_guard_period(0.9e-6) - 1.8e-6).abs() < 1e-18);
        assert_eq!(required_guard_period(0.0), 0.0);
        assert!((timing_advance(2.0014 * MS) - 4.0028 * MS).abs() < 1e-15);
        assert_eq!(timing_advance(0.0), 0.0);
    }

    #[test]
    fn overlap_examples() {
        let usg = FrameScheme::usg(1.0 * MS, 0.7);
        assert_eq!(ue_overlap(0.0, &usg), OverlapWindow::default());
        assert_eq!(ue_overlap(2.5 * MS, &usg).total_length_s, 0.0);

        let w = ue_overlap(6.443 * MS, &usg);
        assert_eq!(w.intervals.len(), 1);
        assert!(w.intervals[0].0.abs() < 1e-15);
        assert!((w.intervals[0].1 - 0.114 * MS).abs() < 1e-12);
        assert!((w.total_length_s - 0.114 * MS).abs() < 1e-12);

        let w = ue_overlap(2.0014 * MS, &usg);
        assert!((w.intervals[0].0 - 0.6972 * MS).abs() < 1e-12);
        assert!((w.intervals[0].1 - 0.7 * MS).abs() < 1e-15);
        assert!((w.total_length_s - 0.0028 * MS).abs() < 1e-12);
    }

    #[test]
    fn overlap_closed_form() {
        // with the downlink at the frame head the overlap is min(δ, T-δ, (1-α)T, αT)
        for &alpha in &[0.3, 0.5, 0.7] {
            let s = FrameScheme::usg(1.0, alpha);
            for k in 0..200 {
                let delta = k as f64 / 200.0;
                let w = ue_overlap(delta / 2.0, &s);
                let expect = delta.min(1.0 - delta).min(1.0 - alpha).min(alpha);
                assert!((w.total_length_s - expect).abs() < 1e-12);
                assert!(w.intervals.len() <= 1);
            }
        }
    }

    #[test]
    fn resource_share_examples() {
        let fdd = FrameScheme::fdd(MS, 0.7, 0.05);
        assert!((resource_share(&fdd, 3.0 * MS).bandwidth_fraction - 0.665).abs() < 1e-15);
        let efs = FrameScheme::efs(182.0 * MS, 0.7, 1.0 / 14.0);
        assert!((resource_share(&efs, 3.0 * MS).dl_time_fraction - 0.65).abs() < 1e-15);
        let pou = FrameScheme::pou(MS, 0.7, 130.0);
        let r = resource_share(&pou, 6.443 * MS);
        assert_eq!(r.dl_time_fraction, 0.7);
        assert!((r.overlap_fraction - 0.114).abs() < 1e-9);
    }

    #[test]
    fn closed_form_ratio_without_aging() {
        let aging = CsiAgingModel::disabled();
        let fdd = FrameScheme::fdd(MS, 0.7, 0.05);
        let pou = FrameScheme::pou(MS, 0.7, f64::INFINITY);
        let snr_db = 8.0;
        let se = spectral_efficiency(10f64.powf(0.8));
        let d = 3.0 * MS; // 2τ = 6 frames, δ = 0
        let p = density_from_snr(&pou, d, snr_db, &link(), &aging);
        let f = density_from_snr(&fdd, d, snr_db, &link(), &aging);
        assert!((p - 0.7 * se).abs() < 1e-12);
        assert!((f - 0.665 * se).abs() < 1e-12);
        assert!((p / f - 0.7 / 0.665).abs() < 1e-12);
        assert!((f / f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn usg_charges_overlap() {
        let aging = CsiAgingModel::disabled();
        let usg = FrameScheme::usg(MS, 0.7);
        let se = spectral_efficiency(10.0);
        let v = density_from_snr(&usg, 6.443 * MS, 10.0, &link(), &aging);
        assert!((v - 0.7 * (1.0 - 0.114) * se).abs() < 1e-9);
    }

    #[test]
    fn efs_density_against_fine_quadrature() {
        // independent route: J0 power series, Simpson's rule with 20k panels
        fn j0_series(x: f64) -> f64 {
            let q = -(x * x) / 4.0;
            let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 1.0f64);
            while term.abs() > 1e-17 * sum.abs().max(1.0) {
                term *= q / (k * k);
                sum += term;
                k += 1.0;
            }
            sum
        }
        let (f, snr, tau) = (10.0, 10.0, 4e-3);
        let window = 0.65 * 0.182;
        let se = |t: f64| {
            let r = j0_series(std::f64::consts::TAU * f * (tau + t));
            (1.0 + r * r * snr / (1.0 + (1.0 - r * r) * snr)).log2()
        };
        let n = 20_000;
        let h = window / n as f64;
        let mut acc = se(0.0) + se(window);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * se(i as f64 * h);
        }
        let oracle = 0.65 * acc * h / 3.0 / window;

        let aging = CsiAgingModel::new(f, 64).unwrap();
        let efs = FrameScheme::efs(0.182, 0.7, 1.0 / 14.0);
        let v = density_from_snr(&efs, tau, 10.0, &link(), &aging);
        assert!(((v - oracle) / oracle).abs() < 5e-3, "{v} vs {oracle}");
    }

    #[test]
    fn degenerate_baseline_flagged() {
        let aging = CsiAgingModel::disabled();
        let fdd = FrameScheme::fdd(MS, 0.7, 0.05);
        assert_eq!(density_from_snr(&fdd, 2.0 * MS, -31.0, &link(), &aging), 0.0);
        let faint = LinkBudgetParams { eirp_density_dbw_mhz: -60.0, ..link() };
        let sight = SightLine {
            elevation: 0.3,
            slant_range_km: 1900.0,
            delay_s: 1900.0 / crate::geometry::SPEED_OF_LIGHT_KM_S,
            radial_velocity_km_s: 0.0,
            doppler_hz: 0.0,
        };
        let usg = FrameScheme::usg(MS, 0.7);
        assert_eq!(efficiency_ratio(&usg, &fdd, &sight, &faint, &aging).unwrap(), None);
    }

    #[test]
    fn scheme_ids() {
        assert_eq!(FrameScheme::pou(MS, 0.7, 130.0).id(), "pou_130db");
        assert_eq!(FrameScheme::pou(MS, 0.7, 112.5).id(), "pou_112.5db");
        assert_eq!(FrameScheme::pou(MS, 0.7, 130.0).to_string(), "TDD-POU (130 dB)");
        assert_eq!(FrameScheme::efs(0.182, 0.7, 1.0 / 14.0).id(), "efs");
    }

    proptest! {
        #[test]
        fn overlap_matches_tick_oracle(delay in 0.0f64..0.02, alpha in 0.05f64..0.95, t in 1e-4f64..0.01) {
            let s = FrameScheme::usg(t, alpha);
            let exact = ue_overlap(delay, &s).total_length_s;
            let ticks = 100_000;
            let brute = tick_overlap(delay, alpha, t, ticks);
            // two boundaries, each worth at most one tick
            prop_assert!((exact - brute).abs() <= 2.0 * t / ticks as f64 + 1e-15);
        }

        #[test]
        fn overlap_period_half_frame(delay in 0.0f64..0.01, alpha in 0.5f64..0.95, t in 1e-4f64..0.01) {
            let s = FrameScheme::usg(t, alpha);
            let a = ue_overlap(delay, &s).total_length_s;
            let b = ue_overlap(delay + t / 2.0, &s).total_length_s;
            prop_assert!((a - b).abs() < 1e-9 * t);
            prop_assert!(a <= (1.0 - alpha) * t + 1e-12 * t);
        }

        #[test]
        fn overlap_intervals_disjoint(delay in 0.0f64..0.01, alpha in 0.05f64..0.95) {
            let s = FrameScheme::pou(1e-3, alpha, 120.0);
            let w = ue_overlap(delay, &s);
            let sum: f64 = w.intervals.iter().map(|(a, b)| b - a).sum();
            prop_assert!((sum - w.total_length_s).abs() < 1e-18);
            prop_assert!(w.total_length_s <= alpha.min(1.0 - alpha) * 1e-3 + 1e-15);
            for pair in w.intervals.windows(2) {
                prop_assert!(pair[0].1 <= pair[1].0);
            }
        }

        #[test]
        fn shares_in_unit_range(delay in 0.0f64..0.01, alpha in 0.05f64..0.95, kind in 0usize..4) {
            let s = match kind {
                0 => FrameScheme::fdd(1e-3, alpha, 0.05),
                1 => FrameScheme::efs(0.182, alpha, 1.0 / 14.0),
                2 => FrameScheme::usg(1e-3, alpha),
                _ => FrameScheme::pou(1e-3, alpha, 100.0),
            };
            let r = resource_share(&s, delay);
            for v in [r.bandwidth_fraction, r.dl_time_fraction, r.overlap_fraction] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(r.overlap_fraction <= r.dl_time_fraction);
        }

        #[test]
        fn pou_monotone_in_sic(delay in 0.002f64..0.0065, snr_db in -5.0f64..20.0, lo in 60.0f64..140.0, step in 0.0f64..40.0) {
            let aging = CsiAgingModel::new(9.0, 32).unwrap();
            let a = density_from_snr(&FrameScheme::pou(1e-3, 0.7, lo), delay, snr_db, &link(), &aging);
            let b = density_from_snr(&FrameScheme::pou(1e-3, 0.7, lo + step), delay, snr_db, &link(), &aging);
            prop_assert!(b >= a - 1e-12);
        }

        #[test]
        fn perfect_pou_dominates_usg(delay in 0.002f64..0.0065, snr_db in -5.0f64..20.0, fd in 0.0f64..30.0) {
            let aging = CsiAgingModel::new(fd, 64).unwrap();
            let pou = density_from_snr(&FrameScheme::pou(1e-3, 0.7, f64::INFINITY), delay, snr_db, &link(), &aging);
            let usg = density_from_snr(&FrameScheme::usg(1e-3, 0.7), delay, snr_db, &link(), &aging);
            prop_assert!(pou >= usg * (1.0 - 1e-9));
        }
    }
}
