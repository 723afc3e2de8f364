//! Command-line front end.
//!
//! Configuration precedence is flags, then the `--config` file, then the
//! built-in defaults. Exit status: 0 on success, 1 on usage, configuration
//! or I/O errors, 2 on numerical or validation failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::channel::{sample_channels, ScenarioConfig};
use crate::error::{Error, Result};
use crate::report::{self, Manifest, PlotKind};
use crate::sim::{self, energy_stage, equal_power_grid, rate_stage};
use crate::validate::{run_validation, ValidationOptions};
use crate::wet::{EnergySolution, TimeShareSchedule};
use crate::wit::RateCurvePoint;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const DEFAULT_SNR_GRID: &str = "0,10,20,30,40,50,60";

#[derive(Debug, Parser)]
#[command(
    name = "wetwit",
    version,
    about = "Energy beamforming and coexisting MIMO link simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Histogram of the number of energy beams per K, with mean harvested energy.
    Table1 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Average information rate versus SNR for both energy schemes (P_E = P_I).
    Fig3 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Comma-separated SNR grid in dB.
        #[arg(long, default_value = DEFAULT_SNR_GRID)]
        snr: String,
    },
    /// One realization dumped as JSON on stdout.
    Single {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Comma-separated SNR grid in dB (P_E = P_I); default is the configured P_I and P_E.
        #[arg(long)]
        snr: Option<String>,
    },
    /// Runs the invariant and oracle suite; exits 0 iff every check passes.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Trials per K for the per-trial properties.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        oracle_instances: usize,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat `key = value` configuration file; `#` starts a comment.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "WETWIT_OUTPUT_DIR", default_value = "wetwit-out")]
    pub output_dir: PathBuf,
    /// Base seed; overrides `rng_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

/// One flag per configuration key. Values accept the same syntax as the
/// config file, including `dBm`, `W` and `dB` suffixes.
#[derive(Debug, Default, Args)]
pub struct ConfigOverrides {
    #[arg(long = "m-e", visible_alias = "M_E")]
    pub m_e: Option<String>,
    #[arg(long = "n-e", visible_alias = "N_E")]
    pub n_e: Option<String>,
    /// Number of energy receivers; a comma-separated list for `table1`.
    #[arg(long = "k", visible_alias = "K")]
    pub k: Option<String>,
    #[arg(long = "m-i", visible_alias = "M_I")]
    pub m_i: Option<String>,
    /// Receive antennas at the information receiver; a list for `fig3`.
    #[arg(long = "n-i", visible_alias = "N_I")]
    pub n_i: Option<String>,
    #[arg(long = "p-e", visible_alias = "P_E", allow_hyphen_values = true)]
    pub p_e: Option<String>,
    #[arg(long = "p-i", visible_alias = "P_I", allow_hyphen_values = true)]
    pub p_i: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma2: Option<String>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long = "t", visible_alias = "T")]
    pub t: Option<String>,
    /// `uniform` or comma-separated weights.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub pathloss_et_er: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub pathloss_it_ir: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub pathloss_et_ir: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rician_k_factor: Option<String>,
    /// `steering` or `aligned`.
    #[arg(long)]
    pub los_model: Option<String>,
    #[arg(long)]
    pub rng_seed: Option<String>,
}

impl ConfigOverrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let all = [
            ("m_e", &self.m_e),
            ("n_e", &self.n_e),
            ("k", &self.k),
            ("m_i", &self.m_i),
            ("n_i", &self.n_i),
            ("p_e", &self.p_e),
            ("p_i", &self.p_i),
            ("sigma2", &self.sigma2),
            ("eta", &self.eta),
            ("t", &self.t),
            ("alpha", &self.alpha),
            ("pathloss_et_er", &self.pathloss_et_er),
            ("pathloss_it_ir", &self.pathloss_it_ir),
            ("pathloss_et_ir", &self.pathloss_et_ir),
            ("rician_k_factor", &self.rician_k_factor),
            ("los_model", &self.los_model),
            ("rng_seed", &self.rng_seed),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }
}

fn parse_list<T: std::str::FromStr>(what: &str, text: &str) -> Result<Vec<T>> {
    let items = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("{what}: cannot parse '{s}'")))
        })
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("{what}: empty list")));
    }
    Ok(items)
}

/// Defaults, then the config file, then flags. Keys in `list_keys` are left
/// to the caller, which treats them as lists.
pub fn effective_config(common: &CommonArgs, list_keys: &[&str]) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &common.config {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for (key, value) in common.overrides.pairs() {
        if !list_keys.contains(&key) {
            cfg.set(key, value)?;
        }
    }
    if let Some(seed) = common.seed {
        cfg.rng_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidInput(_) | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn finish(agg: &sim::AggregateResult) -> i32 {
    if agg.flagged() {
        eprintln!(
            "error: {} of {} trials failed ({:.3}%), above the {:.1}% limit",
            agg.failures.len(),
            agg.records,
            100.0 * agg.failure_rate(),
            100.0 * sim::MAX_FAILURE_RATE
        );
        for f in agg.failures.iter().take(5) {
            eprintln!("  K = {}, N_I = {}, trial {}: {}", f.k, f.n_i, f.trial_index, f.message);
        }
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Table1 { common, trials } => {
            init_logging(common.verbose);
            let cfg = effective_config(&common, &["k"])?;
            let k_values: Vec<usize> = match &common.overrides.k {
                Some(list) => parse_list("K", list)?,
                None => vec![10, 20, 40],
            };
            log::info!("table1: K = {k_values:?}, {trials} trials, seed {}", cfg.rng_seed);
            let agg = sim::run_table1(&cfg, &k_values, trials, common.threads)?;

            let dir = &common.output_dir;
            prepare_output(dir)?;
            write_file(&dir.join("table1.csv"), &report::table1_csv(&agg)?)?;
            let mut outputs = vec!["table1.csv".to_string()];
            if !agg.rank_rows.is_empty() {
                report::emit_svg_plot(&agg, PlotKind::RankHistogram, &dir.join("rank_histogram.svg"))?;
                outputs.push("rank_histogram.svg".into());
            }
            let mut manifest = Manifest::new("table1", &cfg, trials, &agg);
            manifest.k_values = k_values;
            manifest.outputs = outputs;
            manifest.write(&dir.join("manifest.json"))?;

            for row in &agg.rank_rows {
                let hist: Vec<String> = row.histogram.iter().map(|(d, c)| format!("d_E={d}: {c}")).collect();
                println!(
                    "K = {:>3}  {}  mean per-ER energy {:.4} mW",
                    row.k,
                    hist.join(", "),
                    row.mean_theta_mw
                );
            }
            Ok(finish(&agg))
        }
        Command::Fig3 { common, trials, snr } => {
            init_logging(common.verbose);
            let cfg = effective_config(&common, &["n_i"])?;
            let n_i_values: Vec<usize> = match &common.overrides.n_i {
                Some(list) => parse_list("N_I", list)?,
                None => vec![1, 2, 4],
            };
            let snr_grid: Vec<f64> = parse_list("SNR", &snr)?;
            log::info!("fig3: N_I = {n_i_values:?}, SNR = {snr_grid:?} dB, {trials} trials");
            let agg = sim::run_fig3(&cfg, &n_i_values, &snr_grid, trials, common.threads)?;

            let dir = &common.output_dir;
            prepare_output(dir)?;
            write_file(&dir.join("fig3.csv"), &report::fig3_csv(&agg)?)?;
            let mut outputs = vec!["fig3.csv".to_string()];
            if !agg.rate_rows.is_empty() {
                report::emit_svg_plot(&agg, PlotKind::RateVsSnr, &dir.join("rate_vs_snr.svg"))?;
                outputs.push("rate_vs_snr.svg".into());
            }
            let mut manifest = Manifest::new("fig3", &cfg, trials, &agg);
            manifest.n_i_values = n_i_values;
            manifest.snr_grid_db = snr_grid;
            manifest.outputs = outputs;
            manifest.write(&dir.join("manifest.json"))?;

            for r in &agg.rate_rows {
                println!(
                    "N_I = {}  SNR {:>5} dB  {:<10}  {:.4} ± {:.4} bits/s/Hz",
                    r.n_i,
                    r.snr_db,
                    r.scheme.as_str(),
                    r.mean_rate,
                    r.stderr
                );
            }
            Ok(finish(&agg))
        }
        Command::Single { common, trial, snr } => {
            init_logging(common.verbose);
            let cfg = effective_config(&common, &[])?;
            let grid = match &snr {
                Some(list) => equal_power_grid(&cfg, &parse_list("SNR", list)?),
                None => vec![(cfg.p_i, cfg.p_e)],
            };
            let out = single(&cfg, trial, &grid)?;
            let json = serde_json::to_string_pretty(&out).map_err(|e| Error::Io(e.to_string()))?;
            println!("{json}");
            Ok(EXIT_OK)
        }
        Command::Validate {
            common,
            trials,
            oracle_instances,
        } => {
            init_logging(common.verbose);
            let cfg = effective_config(&common, &["k"])?;
            let k_values: Vec<usize> = match &common.overrides.k {
                Some(list) => parse_list("K", list)?,
                None => vec![10, 20, 40],
            };
            let opts = ValidationOptions {
                trials,
                k_values,
                oracle_instances,
                threads: common.threads,
            };
            let report = run_validation(&cfg, &opts)?;
            for c in &report.checks {
                println!("{c}");
            }
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_NUMERICAL })
        }
    }
}

/// Everything about one realization.
#[derive(Debug, Serialize)]
pub struct SingleOutput {
    pub version: String,
    pub trial: u64,
    pub seed_used: u64,
    pub config_text: String,
    pub energy: EnergySolution,
    pub schedule: TimeShareSchedule,
    /// Joules, `η` applied.
    pub per_er_energy: Vec<f64>,
    pub theta_per_er_mw: f64,
    pub interference_rank: usize,
    pub rate_points: Vec<RateCurvePoint>,
}

pub fn single(cfg: &ScenarioConfig, trial: u64, grid: &[(f64, f64)]) -> Result<SingleOutput> {
    let ch = sample_channels(cfg, trial)?;
    let stage = energy_stage(cfg, &ch)?;
    let (rate_points, _, interference_rank) = rate_stage(cfg, &ch.f, &ch.h, &stage, grid)?;
    Ok(SingleOutput {
        version: report::version_string(),
        trial,
        seed_used: ch.seed_used,
        config_text: cfg.to_text(),
        theta_per_er_mw: 1e3 * cfg.eta * stage.solution.theta_opt / cfg.k as f64,
        energy: stage.solution,
        schedule: stage.schedule,
        per_er_energy: stage.per_er_energy,
        interference_rank,
        rate_points,
    })
}
