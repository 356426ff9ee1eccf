//! Text artifacts: `records.csv`, `cdf.csv`, `summary.json` and sweep tables.
//!
//! Numbers are written with six significant digits, `.` as the decimal
//! separator and `\n` line endings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::duplexing::required_guard_period;
use crate::error::{Error, Result};
use crate::experiment::{RunOutput, SchemeSummary, SweepTable};
use crate::geometry::{doppler_shift, propagation_delay, ConstellationGeometry, UePlacement};
use crate::sync::SyncReport;

/// Formats like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig(x: f64) -> String {
    format_sig(x, 6)
}

pub fn records_csv(out: &RunOutput) -> String {
    let mut s = String::from(
        "ue_index,central_angle_deg,elevation_deg,slant_range_km,delay_ms,doppler_khz,snr_db",
    );
    for id in out.scheme_ids() {
        let _ = write!(s, ",{id}_overlap_ms,{id}_ratio");
    }
    s.push('\n');
    for r in &out.records {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{}",
            r.ue_index,
            sig(r.central_angle.to_degrees()),
            sig(r.elevation.to_degrees()),
            sig(r.slant_range_km),
            sig(r.delay_s * 1e3),
            sig(r.doppler_hz / 1e3),
            sig(r.snr_db),
        );
        for o in &r.schemes {
            let _ = write!(s, ",{},{}", sig(o.overlap_s * 1e3), sig(o.ratio.unwrap_or(f64::NAN)));
        }
        s.push('\n');
    }
    s
}

pub fn cdf_csv(out: &RunOutput) -> Result<String> {
    let mut s = String::from("scheme,ratio,cumulative_probability\n");
    for (id, cdf) in out.cdfs()? {
        for (v, p) in cdf.values.iter().zip(&cdf.probabilities) {
            let _ = writeln!(s, "{id},{},{}", sig(*v), sig(*p));
        }
    }
    Ok(s)
}

/// Headline geometry of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub altitude_km: f64,
    pub min_elevation_deg: f64,
    pub carrier_ghz: f64,
    pub orbital_velocity_km_s: f64,
    pub min_slant_range_km: f64,
    pub max_slant_range_km: f64,
    pub min_delay_ms: f64,
    pub max_delay_ms: f64,
    pub differential_delay_ms: f64,
    pub required_guard_period_ms: f64,
    pub max_doppler_khz: f64,
    pub coverage_radius_km: f64,
}

impl GeometryReport {
    pub fn new(geom: &ConstellationGeometry, carrier_hz: f64) -> Self {
        let max_range = geom.max_slant_range();
        let max_delay = propagation_delay(max_range);
        // footprint edge straight ahead on the ground track
        let edge = UePlacement {
            central_angle: geom.coverage_central_angle(),
            azimuth: 0.0,
        };
        Self {
            altitude_km: geom.altitude_km,
            min_elevation_deg: geom.min_elevation_rad.to_degrees(),
            carrier_ghz: carrier_hz / 1e9,
            orbital_velocity_km_s: geom.orbital_velocity(),
            min_slant_range_km: geom.altitude_km,
            max_slant_range_km: max_range,
            min_delay_ms: propagation_delay(geom.altitude_km) * 1e3,
            max_delay_ms: max_delay * 1e3,
            differential_delay_ms: geom.differential_delay() * 1e3,
            required_guard_period_ms: required_guard_period(max_delay) * 1e3,
            max_doppler_khz: doppler_shift(geom.radial_velocity(&edge), carrier_hz) / 1e3,
            coverage_radius_km: geom.coverage_radius(),
        }
    }

    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        Ok(Self::new(&cfg.geometry()?, cfg.link_params().carrier_hz))
    }

    /// Rows of (label, value, unit).
    pub fn rows(&self) -> Vec<(&'static str, f64, &'static str)> {
        vec![
            ("altitude", self.altitude_km, "km"),
            ("minimum elevation", self.min_elevation_deg, "deg"),
            ("carrier", self.carrier_ghz, "GHz"),
            ("orbital velocity", self.orbital_velocity_km_s, "km/s"),
            ("min slant range", self.min_slant_range_km, "km"),
            ("max slant range", self.max_slant_range_km, "km"),
            ("min one-way delay", self.min_delay_ms, "ms"),
            ("max one-way delay", self.max_delay_ms, "ms"),
            ("differential delay", self.differential_delay_ms, "ms"),
            ("required guard period", self.required_guard_period_ms, "ms"),
            ("max Doppler shift", self.max_doppler_khz, "kHz"),
            ("coverage radius", self.coverage_radius_km, "km"),
        ]
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for (label, v, unit) in self.rows() {
            let _ = writeln!(s, "{label:<24}{:>14} {unit}", sig(v));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub num_ues: usize,
    pub seed: u64,
    pub doppler_spread_hz: f64,
    pub geometry: GeometryReport,
    pub schemes: Vec<SchemeSummary>,
    pub sync: SyncReport,
}

impl RunSummary {
    pub fn new(cfg: &ScenarioConfig, out: &RunOutput) -> Result<Self> {
        Ok(Self {
            num_ues: cfg.experiment.num_ues,
            seed: cfg.experiment.seed,
            doppler_spread_hz: cfg.aging.doppler_spread_hz,
            geometry: GeometryReport::from_config(cfg)?,
            schemes: out.summary()?,
            sync: out.sync.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Per-scheme table printed after a run.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<18}{:>12}{:>12}{:>12}{:>8}{:>12}\n",
            "scheme", "frac>1", "mean", "median", "n", "degenerate"
        );
        for x in &self.schemes {
            let _ = writeln!(
                s,
                "{:<18}{:>12}{:>12}{:>12}{:>8}{:>12}",
                x.label,
                sig(x.fraction_above_one),
                sig(x.mean_ratio),
                sig(x.median_ratio),
                x.count,
                x.degenerate
            );
        }
        s
    }
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut s = String::from(table.key);
    for slot in &table.slots {
        let _ = write!(
            s,
            ",{slot}_fraction_above_one,{slot}_mean_ratio,{slot}_median_ratio,{slot}_degenerate"
        );
    }
    s.push('\n');
    for row in &table.rows {
        s.push_str(&sig(row.value));
        for x in &row.summaries {
            let _ = write!(
                s,
                ",{},{},{},{}",
                sig(x.fraction_above_one),
                sig(x.mean_ratio),
                sig(x.median_ratio),
                x.degenerate
            );
        }
        s.push('\n');
    }
    s
}

/// Paths of the three run artifacts.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub records: PathBuf,
    pub cdf: PathBuf,
    pub summary: PathBuf,
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)
}

/// Writes records, CDF and summary into `dir` using the configured file names.
pub fn write_run(dir: &Path, cfg: &ScenarioConfig, out: &RunOutput) -> Result<(RunArtifacts, RunSummary)> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let summary = RunSummary::new(cfg, out)?;
    let paths = RunArtifacts {
        records: dir.join(&cfg.experiment.records_csv),
        cdf: dir.join(&cfg.experiment.cdf_csv),
        summary: dir.join(&cfg.experiment.summary_json),
    };
    write_file(&paths.records, &records_csv(out))?;
    write_file(&paths.cdf, &cdf_csv(out)?)?;
    write_file(&paths.summary, &summary.to_json())?;
    Ok((paths, summary))
}
