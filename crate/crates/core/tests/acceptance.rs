//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use leo_tdd_core::channel::{avg_se_over_window, CsiAgingModel};
use leo_tdd_core::duplexing::{ue_overlap, FrameScheme};
use leo_tdd_core::experiment::{self, fraction_above, SweepKey};
use leo_tdd_core::geometry::ConstellationGeometry;
use leo_tdd_core::output::{self, GeometryReport};
use leo_tdd_core::sync::sync_campaign;
use leo_tdd_core::ScenarioConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within_pct(name: &str, got: f64, want: f64, pct: f64) -> Result<String, String> {
    let err = ((got - want) / want).abs() * 100.0;
    if err <= pct {
        Ok(format!("{name} {got:.4} (want {want}, {err:.3}%)"))
    } else {
        Err(format!("{name} {got:.4} vs {want}: {err:.3}% > {pct}%"))
    }
}

fn geometry_golden() -> Outcome {
    let g = ConstellationGeometry::new(600.0, 10f64.to_radians()).unwrap();
    let r = GeometryReport::new(&g, 30e9);
    let mut notes = vec![
        within_pct("min delay ms", r.min_delay_ms, 2.00, 0.5)?,
        within_pct("max delay ms", r.max_delay_ms, 6.44, 0.5)?,
        within_pct("differential delay ms", r.differential_delay_ms, 4.44, 0.5)?,
        within_pct("guard ms", r.required_guard_period_ms, 12.9, 0.5)?,
    ];
    if (r.coverage_radius_km - 1761.0).abs() > 5.0 {
        return Err(format!("coverage radius {} km outside 1761 ± 5", r.coverage_radius_km));
    }
    if (r.max_doppler_khz - 681.0).abs() > 1.0 {
        return Err(format!("max Doppler {} kHz outside 681 ± 1", r.max_doppler_khz));
    }
    for (h, v) in [(300.0, 7.730), (1500.0, 7.116)] {
        let got = ConstellationGeometry::new(h, 0.2).unwrap().orbital_velocity();
        notes.push(within_pct(&format!("v({h} km)"), got, v, 0.5)?);
    }
    Ok(format!(
        "radius {:.1} km, Doppler {:.1} kHz, {}",
        r.coverage_radius_km,
        r.max_doppler_khz,
        notes.len()
    ) + " scalar checks")
}

/// Counts frame ticks (cell centres) where the UE both receives and transmits.
fn tick_oracle(delay: f64, alpha: f64, t: f64, ticks: usize) -> f64 {
    let delta = (2.0 * delay).rem_euclid(t);
    let dt = t / ticks as f64;
    let hits = (0..ticks)
        .filter(|&i| {
            let x = (i as f64 + 0.5) * dt;
            x < alpha * t && (x + delta).rem_euclid(t) >= alpha * t
        })
        .count();
    hits as f64 * dt
}

fn overlap_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A11);
    let ticks = 100_000;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let delay = rng.random_range(0.0..0.01);
        let alpha = rng.random_range(0.05..0.95);
        let t = rng.random_range(1e-4..0.2);
        let exact = ue_overlap(delay, &FrameScheme::usg(t, alpha)).total_length_s;
        let brute = tick_oracle(delay, alpha, t, ticks);
        let in_ticks = (exact - brute).abs() / (t / ticks as f64);
        worst = worst.max(in_ticks);
    }
    if worst <= 1.0 {
        Ok(format!("1000 cases, worst deviation {worst:.3} tick"))
    } else {
        Err(format!("worst deviation {worst:.3} ticks > 1"))
    }
}

fn closed_form_ratio() -> Outcome {
    let cfg = ScenarioConfig::default()
        .with_overrides(&[
            "aging.doppler_spread_hz=0",
            "duplexing.pou_sic_db=[inf]",
            "duplexing.schemes=[\"pou\"]",
        ])
        .unwrap();
    let want = 0.7 / 0.665;
    let out = experiment::run(&cfg).map_err(|e| e.to_string())?;
    let worst = out
        .ratios(0)
        .iter()
        .map(|r| (r - want).abs())
        .fold(0.0, f64::max);

    // UEs whose round-trip advance is a whole number of frames (δ = 0)
    let link = cfg.link_params();
    let aging = cfg.aging_model();
    let pou = FrameScheme::pou(1e-3, 0.7, f64::INFINITY);
    let fdd = cfg.fdd_baseline();
    let mut worst_aligned = 0.0f64;
    for k in 4..13 {
        let delay = k as f64 * 0.5e-3;
        let snr = link.cnr_db(delay * leo_tdd_core::geometry::SPEED_OF_LIGHT_KM_S).unwrap();
        let num = leo_tdd_core::duplexing::density_from_snr(&pou, delay, snr, &link, &aging);
        let den = leo_tdd_core::duplexing::density_from_snr(&fdd, delay, snr, &link, &aging);
        worst_aligned = worst_aligned.max((num / den - want).abs());
    }
    if worst <= 1e-9 && worst_aligned <= 1e-9 {
        Ok(format!("{} UEs, max |ratio - 1.0526| = {:.2e}", out.records.len(), worst.max(worst_aligned)))
    } else {
        Err(format!("max deviation {worst:.3e} (drops), {worst_aligned:.3e} (δ=0)"))
    }
}

fn figure_reproduction() -> Outcome {
    let cfg = ScenarioConfig::default();
    if cfg.experiment.num_ues != 10_000 {
        return Err("default UE count is not 10^4".into());
    }
    let start = Instant::now();
    let out = experiment::run(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let frac: Vec<f64> = (0..out.schemes.len())
        .map(|k| fraction_above(&out.ratios(k), 1.0).unwrap())
        .collect();
    let ids = out.scheme_ids();
    let get = |id: &str| frac[ids.iter().position(|x| x == id).unwrap()];
    let (efs, usg, p100, p130) = (get("efs"), get("usg"), get("pou_100db"), get("pou_130db"));
    let line = format!("EFS {efs:.4}  POU@100 {p100:.4}  USG {usg:.4}  POU@130 {p130:.4}  ({elapsed:.2} s)");
    let checks = [
        (efs < p100 && p100 < usg && usg < p130, "(a) ordering EFS < POU@100 < USG < POU@130"),
        (efs < 0.25, "(b) EFS < 0.25"),
        ((0.48..=0.78).contains(&usg), "(c) USG in [0.48, 0.78]"),
        ((0.28..=0.58).contains(&p100), "(d) POU@100 in [0.28, 0.58]"),
        ((0.63..=0.93).contains(&p130), "(e) POU@130 in [0.63, 0.93]"),
        (elapsed < 60.0, "runtime < 60 s"),
    ];
    match checks.iter().find(|(ok, _)| !ok) {
        None => Ok(line),
        Some((_, what)) => Err(format!("{what} violated: {line}")),
    }
}

fn sic_monotone() -> Outcome {
    let cfg = ScenarioConfig::default();
    let levels = [90.0, 100.0, 110.0, 120.0, 130.0];
    let table = experiment::sweep(&cfg, SweepKey::SicDb, &levels).map_err(|e| e.to_string())?;
    let slot = table.slots.iter().position(|s| s == "pou").unwrap();
    let series: Vec<f64> = table.rows.iter().map(|r| r.summaries[slot].fraction_above_one).collect();
    let text = series.iter().map(|f| format!("{f:.4}")).collect::<Vec<_>>().join(" ");
    if series.windows(2).all(|w| w[1] >= w[0]) {
        Ok(format!("fraction>1 over 90..130 dB: {text}"))
    } else {
        Err(format!("not monotone: {text}"))
    }
}

fn sync_budget() -> Outcome {
    let cfg = ScenarioConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.experiment.seed);
    let r = sync_campaign(
        &cfg.geometry().unwrap(),
        20e9,
        &cfg.gnss_error(),
        &cfg.sync_thresholds(),
        100_000,
        &mut rng,
    );
    let ok = r.draws == 100_000
        && r.max_timing_residual_us <= 0.13
        && r.max_frequency_residual_hz <= 2000.0
        && r.timing_threshold_us == 3.0
        && r.timing_pass_fraction == 1.0;
    let line = format!(
        "max timing {:.4} us, max frequency {:.1} Hz, timing pass {:.3}",
        r.max_timing_residual_us, r.max_frequency_residual_hz, r.timing_pass_fraction
    );
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn determinism() -> Outcome {
    let cfg = ScenarioConfig::default();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let out = experiment::run(&cfg).map_err(|e| e.to_string())?;
        output::write_run(d.path(), &cfg, &out).map_err(|e| e.to_string())?;
    }
    for name in ["records.csv", "cdf.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        if a != b {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok("records.csv and cdf.csv byte-identical across two runs".into())
}

/// J0 by its power series, independent of the library implementation.
fn j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 1.0f64);
    while term.abs() > 1e-18 * sum.abs().max(1.0) || k < 5.0 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn numerical_integration() -> Outcome {
    let cfg = ScenarioConfig::default();
    let aging = cfg.aging_model();
    let (snr, offset, window) = (10.0, 2e-3, 118.3e-3);
    let got = avg_se_over_window(snr, &aging, offset, window);

    let panels = 100_000;
    let h = window / panels as f64;
    let se = |t: f64| {
        let r = j0_series(std::f64::consts::TAU * aging.doppler_spread_hz * (offset + t));
        (1.0 + r * r * snr / (1.0 + (1.0 - r * r) * snr)).log2()
    };
    let mut acc = 0.5 * (se(0.0) + se(window));
    for i in 1..panels {
        acc += se(i as f64 * h);
    }
    let reference = acc * h / window;
    let rel = ((got - reference) / reference).abs();

    let zero = 2.404_825_557_695_773 / (std::f64::consts::TAU * 10.0);
    let rho = CsiAgingModel::new(10.0, 64).unwrap().correlation(zero);

    if rel <= 1e-3 && rho.abs() <= 1e-4 {
        Ok(format!("quadrature rel. error {rel:.2e}, J0 at first zero {rho:.1e}"))
    } else {
        Err(format!("quadrature rel. error {rel:.3e} (limit 1e-3), J0 at zero {rho:.3e} (limit 1e-4)"))
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("geometry golden suite", geometry_golden),
        ("overlap arithmetic oracle", overlap_oracle),
        ("closed-form POU ratio", closed_form_ratio),
        ("CDF qualitative reproduction", figure_reproduction),
        ("SIC monotonicity sweep", sic_monotone),
        ("sync budget", sync_budget),
        ("determinism", determinism),
        ("numerical integration", numerical_integration),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
