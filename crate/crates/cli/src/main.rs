use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leo_tdd_core::experiment::{self, SweepKey};
use leo_tdd_core::output::{self, GeometryReport};
use leo_tdd_core::sync::sync_campaign;
use leo_tdd_core::{Error, ScenarioConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXIT_VALIDATION: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "leo-tdd", version, about = "TDD vs FDD downlink efficiency for a LEO satellite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario TOML. Built-in defaults are used when absent.
    #[arg(long, env = "LEO_TDD_CONFIG")]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set duplexing.dl_fraction=0.6`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Shorthand for `--set experiment.seed=<u64>`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Drop UEs, evaluate every scheme and write records.csv, cdf.csv, summary.json.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print delay, Doppler and footprint figures for the configured orbit.
    Geom {
        #[command(flatten)]
        common: Common,
    },
    /// Draw GNSS synchronization residuals and check them against TDD tolerances.
    Sync {
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the scenario for each value of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// sic_db, doppler_spread or frame_length.
        #[arg(long)]
        key: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

fn load(common: &Common) -> Result<ScenarioConfig, Error> {
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("experiment.seed={seed}"));
    }
    match &common.config {
        Some(path) => ScenarioConfig::from_path(path, &overrides),
        None => ScenarioConfig::from_toml_with_overrides("", &overrides),
    }
}

fn cmd_run(common: &Common, out_dir: &Path) -> Result<(), Error> {
    let cfg = load(common)?;
    let out = experiment::run(&cfg)?;
    let (paths, summary) = output::write_run(out_dir, &cfg, &out)?;
    print!("{}", summary.table());
    for p in [&paths.records, &paths.cdf, &paths.summary] {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_geom(common: &Common) -> Result<(), Error> {
    let cfg = load(common)?;
    print!("{}", GeometryReport::from_config(&cfg)?.table());
    Ok(())
}

fn cmd_sync(common: &Common) -> Result<(), Error> {
    let cfg = load(common)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.experiment.seed);
    let report = sync_campaign(
        &cfg.geometry()?,
        cfg.link_params().carrier_hz,
        &cfg.gnss_error(),
        &cfg.sync_thresholds(),
        cfg.sync.draws,
        &mut rng,
    );
    let verdict = |f: f64| if f == 1.0 { "PASS" } else { "FAIL" };
    println!(
        "timing    max {:>10} us  threshold {:>8} us  pass {:>8}  {}",
        output::format_sig(report.max_timing_residual_us, 6),
        output::format_sig(report.timing_threshold_us, 6),
        output::format_sig(report.timing_pass_fraction, 6),
        verdict(report.timing_pass_fraction)
    );
    println!(
        "frequency max {:>10} Hz  threshold {:>8} Hz  pass {:>8}  {}",
        output::format_sig(report.max_frequency_residual_hz, 6),
        output::format_sig(report.frequency_threshold_hz, 6),
        output::format_sig(report.frequency_pass_fraction, 6),
        verdict(report.frequency_pass_fraction)
    );
    println!("thresholds are external assumptions (terrestrial TDD figures from config)");
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}

fn cmd_sweep(common: &Common, out_dir: &Path, key: &str, values: &[f64]) -> Result<(), Error> {
    let key = SweepKey::parse(key)?;
    let cfg = load(common)?;
    let table = experiment::sweep(&cfg, key, values)?;
    let csv = output::sweep_csv(&table);
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let path = out_dir.join(format!("sweep_{}.csv", key.column()));
    output::write_file(&path, &csv)?;
    print!("{csv}");
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run { common, out } => cmd_run(common, out),
        Command::Geom { common } => cmd_geom(common),
        Command::Sync { common } => cmd_sync(common),
        Command::Sweep { common, out, key, values } => cmd_sweep(common, out, key, values),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => EXIT_IO,
                _ => EXIT_VALIDATION,
            })
        }
    }
}
