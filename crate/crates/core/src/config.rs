//! Scenario configuration.
//!
//! A TOML file with one table per module. Values use km, GHz, MHz, ms and
//! µs where the key name says so. Every key has a default, so an empty file
//! is the reference scenario. `key=value` overrides address keys by their
//! dotted path (`duplexing.dl_fraction=0.6`).

use serde::{Deserialize, Serialize};

use crate::channel::{CsiAgingModel, LinkBudgetParams};
use crate::duplexing::FrameScheme;
use crate::error::{Error, Result};
use crate::geometry::ConstellationGeometry;
use crate::sync::{ErrorDistribution, GnssErrorModel, SyncThresholds};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub altitude_km: f64,
    pub min_elevation_deg: f64,
    pub earth_radius_km: f64,
    pub gravitational_parameter: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            altitude_km: 600.0,
            min_elevation_deg: 10.0,
            earth_radius_km: crate::geometry::EARTH_RADIUS_KM,
            gravitational_parameter: crate::geometry::EARTH_MU_KM3_S2,
        }
    }
}

/// Link-budget defaults are Ka-band VSAT figures (EIRP density, G/T, NF)
/// except `ue_tx_power_dbm`, which is the effective self-interference
/// source power at the receiver input and is calibrated, not tabulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub eirp_density_dbw_mhz: f64,
    pub ue_g_over_t_db_k: f64,
    pub ue_noise_figure_db: f64,
    pub ue_tx_power_dbm: f64,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            eirp_density_dbw_mhz: 4.0,
            ue_g_over_t_db_k: 15.9,
            ue_noise_figure_db: 1.2,
            ue_tx_power_dbm: 50.0,
            carrier_ghz: 20.0,
            bandwidth_mhz: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgingConfig {
    /// Residual Doppler spread after shift compensation.
    pub doppler_spread_hz: f64,
    pub integration_steps: usize,
}

impl Default for AgingConfig {
    fn default() -> Self {
        Self {
            doppler_spread_hz: 9.0,
            integration_steps: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DuplexingConfig {
    pub dl_fraction: f64,
    /// Frame length of USG, POU.
    pub frame_ms: f64,
    pub efs_frame_ms: f64,
    pub guard_slot_fraction: f64,
    pub fdd_frame_ms: f64,
    pub fdd_guard_band: f64,
    pub fdd_backoff_db: f64,
    pub common_ta_offset_ms: f64,
    /// Any of `efs`, `usg`, `pou`; `pou` expands to one scheme per SIC level.
    pub schemes: Vec<String>,
    pub pou_sic_db: Vec<f64>,
}

impl Default for DuplexingConfig {
    fn default() -> Self {
        Self {
            dl_fraction: 0.7,
            frame_ms: 1.0,
            efs_frame_ms: 182.0,
            guard_slot_fraction: 1.0 / 14.0,
            fdd_frame_ms: 1.0,
            fdd_guard_band: 0.05,
            fdd_backoff_db: 0.0,
            common_ta_offset_ms: 0.0,
            schemes: vec!["efs".into(), "usg".into(), "pou".into()],
            pou_sic_db: vec![100.0, 130.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyncConfig {
    pub timing_error_bound_us: f64,
    pub frequency_error_bound_ppm: f64,
    pub distribution: ErrorDistribution,
    pub timing_threshold_us: f64,
    pub frequency_threshold_ppm: f64,
    /// Number of draws for the standalone sync campaign.
    pub draws: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        let err = GnssErrorModel::default();
        let thr = SyncThresholds::default();
        Self {
            timing_error_bound_us: err.timing_error_bound_s * 1e6,
            frequency_error_bound_ppm: err.frequency_error_bound_ppm,
            distribution: err.distribution,
            timing_threshold_us: thr.timing_s * 1e6,
            frequency_threshold_ppm: thr.frequency_ppm,
            draws: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_ues: usize,
    pub seed: u64,
    pub records_csv: String,
    pub cdf_csv: String,
    pub summary_json: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            num_ues: 10_000,
            seed: 20_240_601,
            records_csv: "records.csv".into(),
            cdf_csv: "cdf.csv".into(),
            summary_json: "summary.json".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub link: LinkConfig,
    pub aging: AgingConfig,
    pub duplexing: DuplexingConfig,
    pub sync: SyncConfig,
    pub experiment: ExperimentConfig,
}

impl ScenarioConfig {
    /// Parses TOML text, applies `key=value` overrides, then validates.
    pub fn from_toml_with_overrides<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<Self> {
        let mut value: toml::Value = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for ov in overrides {
            apply_override(&mut value, ov.as_ref())?;
        }
        Self::from_value(value)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides::<&str>(text, &[])
    }

    pub fn from_path<S: AsRef<str>>(path: &std::path::Path, overrides: &[S]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_with_overrides(&text, overrides)
    }

    fn from_value(value: toml::Value) -> Result<Self> {
        let cfg: Self = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            Error::invalid(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same config with further overrides applied.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut value = toml::Value::try_from(self).map_err(|e| Error::Parse(e.to_string()))?;
        for ov in overrides {
            apply_override(&mut value, ov.as_ref())?;
        }
        Self::from_value(value)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must be > 0, got {v}")))
            }
        }
        fn unit_open(key: &str, v: f64) -> Result<()> {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must lie in (0, 1), got {v}")))
            }
        }
        fn unit_half_open(key: &str, v: f64) -> Result<()> {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must lie in [0, 1), got {v}")))
            }
        }

        let g = &self.geometry;
        positive("geometry.altitude_km", g.altitude_km)?;
        positive("geometry.earth_radius_km", g.earth_radius_km)?;
        positive("geometry.gravitational_parameter", g.gravitational_parameter)?;
        if !(g.min_elevation_deg > 0.0 && g.min_elevation_deg <= 90.0) {
            return Err(Error::invalid(
                "geometry.min_elevation_deg",
                format!("must lie in (0, 90], got {}", g.min_elevation_deg),
            ));
        }

        self.link_params().validate()?;
        self.aging_model().validate()?;

        let d = &self.duplexing;
        unit_open("duplexing.dl_fraction", d.dl_fraction)?;
        positive("duplexing.frame_ms", d.frame_ms)?;
        positive("duplexing.efs_frame_ms", d.efs_frame_ms)?;
        positive("duplexing.fdd_frame_ms", d.fdd_frame_ms)?;
        unit_half_open("duplexing.guard_slot_fraction", d.guard_slot_fraction)?;
        unit_half_open("duplexing.fdd_guard_band", d.fdd_guard_band)?;
        if !d.fdd_backoff_db.is_finite() {
            return Err(Error::invalid("duplexing.fdd_backoff_db", "must be finite"));
        }
        if !d.common_ta_offset_ms.is_finite() {
            return Err(Error::invalid("duplexing.common_ta_offset_ms", "must be finite"));
        }
        if d.schemes.is_empty() {
            return Err(Error::invalid("duplexing.schemes", "must not be empty"));
        }
        for s in &d.schemes {
            if !matches!(s.as_str(), "efs" | "usg" | "pou") {
                return Err(Error::invalid(
                    "duplexing.schemes",
                    format!("unknown scheme `{s}` (expected efs, usg or pou)"),
                ));
            }
        }
        if d.schemes.iter().any(|s| s == "pou") {
            if d.pou_sic_db.is_empty() {
                return Err(Error::invalid("duplexing.pou_sic_db", "must not be empty when pou is enabled"));
            }
            if let Some(bad) = d.pou_sic_db.iter().find(|v| v.is_nan() || **v < 0.0) {
                return Err(Error::invalid("duplexing.pou_sic_db", format!("levels must be >= 0, got {bad}")));
            }
        }

        self.gnss_error().validate()?;
        self.sync_thresholds().validate()?;

        if self.experiment.num_ues == 0 {
            return Err(Error::invalid("experiment.num_ues", "must be >= 1"));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ConstellationGeometry> {
        let g = &self.geometry;
        ConstellationGeometry::with_constants(
            g.earth_radius_km,
            g.gravitational_parameter,
            g.altitude_km,
            g.min_elevation_deg.to_radians(),
        )
    }

    pub fn link_params(&self) -> LinkBudgetParams {
        let l = &self.link;
        LinkBudgetParams {
            eirp_density_dbw_mhz: l.eirp_density_dbw_mhz,
            ue_g_over_t_db_k: l.ue_g_over_t_db_k,
            ue_noise_figure_db: l.ue_noise_figure_db,
            ue_tx_power_dbm: l.ue_tx_power_dbm,
            carrier_hz: l.carrier_ghz * 1e9,
            bandwidth_hz: l.bandwidth_mhz * 1e6,
        }
    }

    pub fn aging_model(&self) -> CsiAgingModel {
        CsiAgingModel {
            doppler_spread_hz: self.aging.doppler_spread_hz,
            integration_steps: self.aging.integration_steps,
        }
    }

    pub fn fdd_baseline(&self) -> FrameScheme {
        let d = &self.duplexing;
        FrameScheme {
            snr_backoff_db: d.fdd_backoff_db,
            ..FrameScheme::fdd(d.fdd_frame_ms * 1e-3, d.dl_fraction, d.fdd_guard_band)
        }
    }

    /// TDD schemes in configured order, POU expanded per SIC level.
    pub fn tdd_schemes(&self) -> Vec<FrameScheme> {
        let d = &self.duplexing;
        let offset = d.common_ta_offset_ms * 1e-3;
        let mut out = Vec::new();
        for name in &d.schemes {
            match name.as_str() {
                "efs" => out.push(FrameScheme::efs(d.efs_frame_ms * 1e-3, d.dl_fraction, d.guard_slot_fraction)),
                "usg" => out.push(FrameScheme::usg(d.frame_ms * 1e-3, d.dl_fraction)),
                "pou" => out.extend(
                    d.pou_sic_db
                        .iter()
                        .map(|&sic| FrameScheme::pou(d.frame_ms * 1e-3, d.dl_fraction, sic)),
                ),
                _ => {}
            }
        }
        for s in &mut out {
            s.common_ta_offset_s = offset;
        }
        out
    }

    pub fn gnss_error(&self) -> GnssErrorModel {
        GnssErrorModel {
            timing_error_bound_s: self.sync.timing_error_bound_us * 1e-6,
            frequency_error_bound_ppm: self.sync.frequency_error_bound_ppm,
            distribution: self.sync.distribution,
        }
    }

    pub fn sync_thresholds(&self) -> SyncThresholds {
        SyncThresholds {
            timing_s: self.sync.timing_threshold_us * 1e-6,
            frequency_ppm: self.sync.frequency_threshold_ppm,
        }
    }
}

/// Applies one `section.key=value` override. The value is read as a TOML
/// literal and falls back to a bare string.
pub fn apply_override(root: &mut toml::Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::invalid(assignment, "override must look like key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let (section, field) = key
        .split_once('.')
        .ok_or_else(|| Error::invalid(key, "override key must be section.field"))?;

    let known = toml::Value::try_from(ScenarioConfig::default()).expect("defaults serialize");
    let known_field = known
        .get(section)
        .and_then(|s| s.get(field))
        .is_some();
    if !known_field {
        return Err(Error::invalid(key, "unknown config key"));
    }

    let parsed = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let table = root
        .as_table_mut()
        .ok_or_else(|| Error::Parse("config root is not a table".into()))?;
    let section_table = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let section_table = section_table
        .as_table_mut()
        .ok_or_else(|| Error::invalid(section, "expected a table"))?;
    section_table.insert(field.to_string(), parsed);
    Ok(())
}
