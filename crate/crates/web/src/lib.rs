//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers or `key=value` override lines and
//! returns a JSON string; the page does all drawing itself.

use leo_tdd_core::experiment::{self, SweepKey};
use leo_tdd_core::output::GeometryReport;
use leo_tdd_core::ScenarioConfig;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Most points kept per CDF curve sent to the page.
const MAX_CDF_POINTS: usize = 256;

#[derive(Debug, Serialize)]
struct Curve {
    scheme: String,
    label: String,
    fraction_above_one: f64,
    points: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
struct Simulation {
    num_ues: usize,
    geometry: GeometryReport,
    curves: Vec<Curve>,
}

#[derive(Debug, Serialize)]
struct SweepSeries {
    key: &'static str,
    values: Vec<f64>,
    slots: Vec<String>,
    /// `fraction_above_one[slot][row]`
    fraction_above_one: Vec<Vec<f64>>,
}

fn config_from_lines(overrides: &str) -> Result<ScenarioConfig, String> {
    let lines: Vec<&str> = overrides
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    ScenarioConfig::from_toml_with_overrides("", &lines).map_err(|e| e.to_string())
}

fn thin(points: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    if points.len() <= MAX_CDF_POINTS {
        return points;
    }
    let last = points.len() - 1;
    (0..MAX_CDF_POINTS)
        .map(|i| points[i * last / (MAX_CDF_POINTS - 1)])
        .collect()
}

/// Headline geometry for one orbit, as JSON.
pub fn geometry_json(altitude_km: f64, min_elevation_deg: f64, carrier_ghz: f64) -> Result<String, String> {
    let cfg = config_from_lines(&format!(
        "geometry.altitude_km={altitude_km:?}\ngeometry.min_elevation_deg={min_elevation_deg:?}\nlink.carrier_ghz={carrier_ghz:?}"
    ))?;
    let report = GeometryReport::from_config(&cfg).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

/// Runs a scenario and returns thinned CDF curves per scheme.
pub fn simulate_json(overrides: &str) -> Result<String, String> {
    let cfg = config_from_lines(overrides)?;
    let out = experiment::run(&cfg).map_err(|e| e.to_string())?;
    let summary = out.summary().map_err(|e| e.to_string())?;
    let cdfs = out.cdfs().map_err(|e| e.to_string())?;
    let curves = summary
        .into_iter()
        .zip(cdfs)
        .map(|(s, (_, cdf))| Curve {
            scheme: s.scheme,
            label: s.label,
            fraction_above_one: s.fraction_above_one,
            points: thin(
                cdf.values
                    .iter()
                    .zip(&cdf.probabilities)
                    .map(|(&x, &p)| [x, p])
                    .collect(),
            ),
        })
        .collect();
    let sim = Simulation {
        num_ues: cfg.experiment.num_ues,
        geometry: GeometryReport::from_config(&cfg).map_err(|e| e.to_string())?,
        curves,
    };
    Ok(serde_json::to_string(&sim).expect("simulation serializes"))
}

/// Fraction of UEs beating FDD at each SIC level in `sic_values` (comma separated).
pub fn sic_sweep_json(overrides: &str, sic_values: &str) -> Result<String, String> {
    let cfg = config_from_lines(overrides)?;
    let values = sic_values
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("not a number: `{s}`")))
        .collect::<Result<Vec<f64>, String>>()?;
    let table = experiment::sweep(&cfg, SweepKey::SicDb, &values).map_err(|e| e.to_string())?;
    let fraction_above_one = (0..table.slots.len())
        .map(|k| table.rows.iter().map(|r| r.summaries[k].fraction_above_one).collect())
        .collect();
    let series = SweepSeries {
        key: table.key,
        values,
        slots: table.slots,
        fraction_above_one,
    };
    Ok(serde_json::to_string(&series).expect("sweep serializes"))
}

#[wasm_bindgen]
pub fn geometry(altitude_km: f64, min_elevation_deg: f64, carrier_ghz: f64) -> Result<String, JsValue> {
    geometry_json(altitude_km, min_elevation_deg, carrier_ghz).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(overrides: &str) -> Result<String, JsValue> {
    simulate_json(overrides).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sic_sweep(overrides: &str, sic_values: &str) -> Result<String, JsValue> {
    sic_sweep_json(overrides, sic_values).map_err(|e| JsValue::from_str(&e))
}
