//! Monte Carlo harness for the rank table and the rate-versus-SNR curves.
//!
//! Each trial runs the whole pipeline (channels, energy beamforming,
//! schedule, both rate optimizations) and checks the per-trial invariants
//! before returning. A violated invariant or a solver error marks the record
//! failed instead of aborting the run; aggregation excludes and counts it.
//!
//! Trials run on a bounded rayon pool. Results are collected in trial order
//! and aggregation sorts its input, so the output does not depend on the
//! worker count or on completion order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    dbm_to_watts, per_trial_seed, sample_energy_channels, sample_info_channels, watts_to_dbm, ChannelRealization,
    ScenarioConfig,
};
use crate::error::{Error, Result};
use crate::numerics::{numerical_rank, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::wet::{
    build_schedule, harvested_energy, harvested_energy_schedule, solve_p1, EnergySolution, TimeShareSchedule,
};
use crate::wit::{solve_p2, solve_p3, RateCurvePoint, Scheme};

/// Relative duality gap accepted for an energy solution.
pub const GAP_TOL: f64 = 1e-6;
/// Relative error accepted between the solver's trace and `P_E`.
pub const POWER_TOL: f64 = 1e-6;
/// Relative slack on `Q_k ≥ η α_k Θ*`, in units of `η Θ*`.
pub const FAIRNESS_TOL: f64 = 1e-9;
/// Relative error accepted between schedule and covariance energies.
pub const SCHEDULE_ENERGY_TOL: f64 = 1e-9;
/// Absolute slack (bits/s/Hz) on single-beam ≥ multi-beam.
pub const DOMINANCE_TOL: f64 = 1e-9;
/// Failure fraction above which a run is flagged.
pub const MAX_FAILURE_RATE: f64 = 1e-3;

/// Numbers that are checked inside a trial, kept for inspection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialDiagnostics {
    pub solver_iterations: usize,
    pub duality_gap: f64,
    /// `|tr S_E(raw) − P_E| / P_E`.
    pub power_error: f64,
    /// `max_k Q_k / min_k Q_k − 1`; zero when every receiver harvests the same.
    pub energy_spread: f64,
    /// Largest relative gap between schedule and covariance energies.
    pub schedule_energy_error: f64,
    /// Smallest `R_single − R_multi` over the power grid (`+inf` on an empty grid).
    pub dominance_margin: f64,
    /// Numerical rank of `F S_E* Fᴴ`.
    pub interference_rank: usize,
}

/// Outcome of one trial at one receive-antenna count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial_index: u64,
    pub k: usize,
    pub n_i: usize,
    pub d_e: usize,
    /// `Θ*` at the configured `P_E`, joules, unit efficiency.
    pub theta_opt: f64,
    /// `η Θ* / K` in mW: the fair share reported per receiver.
    pub theta_per_er_mw: f64,
    /// Harvested energy per receiver with `η` applied, joules.
    pub per_er_energy: Vec<f64>,
    pub rate_points: Vec<RateCurvePoint>,
    pub diagnostics: Option<TrialDiagnostics>,
    pub failure: Option<String>,
}

impl ExperimentRecord {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }

    fn failed(config: &ScenarioConfig, trial_index: u64, err: &Error) -> Self {
        Self {
            trial_index,
            k: config.k,
            n_i: config.n_i,
            d_e: 0,
            theta_opt: 0.0,
            theta_per_er_mw: 0.0,
            per_er_energy: Vec::new(),
            rate_points: Vec::new(),
            diagnostics: None,
            failure: Some(err.to_string()),
        }
    }
}

/// Energy-side results of a trial, shared by every receive-antenna count.
#[derive(Clone, Debug)]
pub struct EnergyStage {
    pub solution: EnergySolution,
    pub schedule: TimeShareSchedule,
    pub per_er_energy: Vec<f64>,
    pub energy_spread: f64,
    pub schedule_energy_error: f64,
    pub power_error: f64,
}

fn violation(msg: String) -> Error {
    Error::InvariantViolation(msg)
}

/// Solves the energy problem for `channels` and checks the certificate,
/// power tightness, the fairness constraints and schedule energy equivalence.
pub fn energy_stage(config: &ScenarioConfig, channels: &ChannelRealization) -> Result<EnergyStage> {
    let solution = solve_p1(channels, config)?;
    if !(solution.duality_gap <= GAP_TOL) {
        return Err(violation(format!(
            "duality gap {:e} above {GAP_TOL:e}",
            solution.duality_gap
        )));
    }
    let power_error = (solution.raw_power - config.p_e).abs() / config.p_e;
    if !(power_error <= POWER_TOL) {
        return Err(violation(format!("power constraint slack {power_error:e}")));
    }
    let schedule = build_schedule(&solution, config)?;

    let alpha = config.alpha_weights();
    let floor = config.eta * solution.theta_opt;
    let mut per_er_energy = Vec::with_capacity(channels.g.len());
    let mut schedule_energy_error: f64 = 0.0;
    for (k, (g, &a)) in channels.g.iter().zip(&alpha).enumerate() {
        let q = harvested_energy(&solution.s_e_opt, g, config.eta, config.t)?;
        if q < a * floor - FAIRNESS_TOL * floor {
            return Err(violation(format!(
                "receiver {k} harvests {q:e} J, below its share {:e} J",
                a * floor
            )));
        }
        let q_sched = harvested_energy_schedule(&schedule, g, config.eta)?;
        let rel = (q_sched - q).abs() / q.abs().max(f64::MIN_POSITIVE);
        if !(rel <= SCHEDULE_ENERGY_TOL) {
            return Err(violation(format!("receiver {k}: schedule energy differs by {rel:e}")));
        }
        schedule_energy_error = schedule_energy_error.max(rel);
        per_er_energy.push(q);
    }
    let hi = per_er_energy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = per_er_energy.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EnergyStage {
        solution,
        schedule,
        per_er_energy,
        energy_spread: hi / lo - 1.0,
        schedule_energy_error,
        power_error,
    })
}

/// Rates of both schemes over `power_grid`, checking single-beam dominance.
/// Returns the curve, the smallest dominance margin and the interference rank.
pub fn rate_stage(
    config: &ScenarioConfig,
    f: &ComplexMatrix,
    h: &ComplexMatrix,
    stage: &EnergyStage,
    power_grid: &[(f64, f64)],
) -> Result<(Vec<RateCurvePoint>, f64, usize)> {
    let mut points = Vec::with_capacity(power_grid.len());
    let mut margin = f64::INFINITY;
    for &(p_i, p_e) in power_grid {
        let sol = stage.solution.scaled_to_power(p_e);
        let sched = stage.schedule.scaled_to_power(p_e);
        let multi = solve_p2(&sol.s_e_opt, f, h, config.sigma2, p_i)?.rate;
        let single = solve_p3(&sched, f, h, config.sigma2, p_i)?.average_rate;
        if single < multi - DOMINANCE_TOL {
            return Err(violation(format!(
                "single-beam rate {single} below multi-beam {multi} at P_I = {p_i:e} W"
            )));
        }
        margin = margin.min(single - multi);
        points.push(RateCurvePoint {
            p_i,
            p_e,
            rate_multibeam: multi,
            rate_singlebeam: single,
            d_e: sol.d_e,
        });
    }
    let rank = numerical_rank(&f.sandwich(&stage.solution.s_e_opt)?, DEFAULT_RANK_TOL)?;
    Ok((points, margin, rank))
}

fn record(
    config: &ScenarioConfig,
    trial_index: u64,
    stage: &EnergyStage,
    rates: (Vec<RateCurvePoint>, f64, usize),
) -> ExperimentRecord {
    let (rate_points, dominance_margin, interference_rank) = rates;
    let sol = &stage.solution;
    ExperimentRecord {
        trial_index,
        k: config.k,
        n_i: config.n_i,
        d_e: sol.d_e,
        theta_opt: sol.theta_opt,
        theta_per_er_mw: 1e3 * config.eta * sol.theta_opt / config.k as f64,
        per_er_energy: stage.per_er_energy.clone(),
        rate_points,
        diagnostics: Some(TrialDiagnostics {
            solver_iterations: sol.solver_iterations,
            duality_gap: sol.duality_gap,
            power_error: stage.power_error,
            energy_spread: stage.energy_spread,
            schedule_energy_error: stage.schedule_energy_error,
            dominance_margin,
            interference_rank,
        }),
        failure: None,
    }
}

/// One full trial. Never returns an error: failures are recorded.
pub fn run_trial(config: &ScenarioConfig, trial_index: u64, power_grid: &[(f64, f64)]) -> ExperimentRecord {
    run_trial_multi(config, trial_index, &[config.n_i], power_grid)
        .pop()
        .expect("one record per receive-antenna count")
}

/// One trial evaluated at several receive-antenna counts. The energy links
/// do not depend on `N_I`, so the energy problem is solved once.
pub fn run_trial_multi(
    config: &ScenarioConfig,
    trial_index: u64,
    n_i_values: &[usize],
    power_grid: &[(f64, f64)],
) -> Vec<ExperimentRecord> {
    let configs: Vec<ScenarioConfig> = n_i_values
        .iter()
        .map(|&n_i| ScenarioConfig { n_i, ..config.clone() })
        .collect();
    let g = sample_energy_channels(config, trial_index);
    let energy_channels = ChannelRealization {
        g,
        f: ComplexMatrix::zeros(0, config.m_e),
        h: ComplexMatrix::zeros(0, config.m_i),
        seed_used: per_trial_seed(config.rng_seed, trial_index),
    };
    let stage = match energy_stage(config, &energy_channels) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("trial {trial_index} (K = {}): {e}", config.k);
            return configs
                .iter()
                .map(|c| ExperimentRecord::failed(c, trial_index, &e))
                .collect();
        }
    };
    configs
        .iter()
        .map(|c| {
            let out = sample_info_channels(c, trial_index).and_then(|(f, h)| rate_stage(c, &f, &h, &stage, power_grid));
            match out {
                Ok(rates) => record(c, trial_index, &stage, rates),
                Err(e) => {
                    log::warn!("trial {trial_index} (K = {}, N_I = {}): {e}", c.k, c.n_i);
                    ExperimentRecord::failed(c, trial_index, &e)
                }
            }
        })
        .collect()
}

/// Maps `f` over `0..count` on a pool of `threads` workers (0 = rayon's
/// default) and returns the results in index order.
pub fn parallel_trials<T, F>(count: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| (0..count as u64).into_par_iter().map(&f).collect()))
}

/// Information transmit power for a receive SNR: `P_I(dBm) = SNR + PL_IT-IR + σ²(dBm)`.
pub fn snr_to_power(config: &ScenarioConfig, snr_db: f64) -> f64 {
    dbm_to_watts(snr_db + config.pathloss_it_ir_db + watts_to_dbm(config.sigma2))
}

/// `(P_I, P_E)` pairs with `P_E = P_I` for each SNR.
pub fn equal_power_grid(config: &ScenarioConfig, snr_grid_db: &[f64]) -> Vec<(f64, f64)> {
    snr_grid_db
        .iter()
        .map(|&s| {
            let p = snr_to_power(config, s);
            (p, p)
        })
        .collect()
}

/// Rank-table records: `trials` trials for every `K`, no rate grid.
pub fn table1_records(
    config_base: &ScenarioConfig,
    k_values: &[usize],
    trials: usize,
    threads: usize,
) -> Result<Vec<ExperimentRecord>> {
    config_base.validate()?;
    let mut out = Vec::with_capacity(k_values.len() * trials);
    for &k in k_values {
        let cfg = ScenarioConfig {
            k,
            ..config_base.clone()
        };
        cfg.validate()?;
        out.extend(parallel_trials(trials, threads, |i| run_trial(&cfg, i, &[]))?);
    }
    Ok(out)
}

pub fn run_table1(
    config_base: &ScenarioConfig,
    k_values: &[usize],
    trials: usize,
    threads: usize,
) -> Result<AggregateResult> {
    aggregate(&table1_records(config_base, k_values, trials, threads)?, &[])
}

/// Rate-curve records: one per (trial, `N_I`), with `P_E = P_I` on the SNR grid.
pub fn fig3_records(
    config_base: &ScenarioConfig,
    n_i_values: &[usize],
    snr_grid_db: &[f64],
    trials: usize,
    threads: usize,
) -> Result<Vec<ExperimentRecord>> {
    config_base.validate()?;
    for &n_i in n_i_values {
        ScenarioConfig {
            n_i,
            ..config_base.clone()
        }
        .validate()?;
    }
    let grid = equal_power_grid(config_base, snr_grid_db);
    let nested = parallel_trials(trials, threads, |i| run_trial_multi(config_base, i, n_i_values, &grid))?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn run_fig3(
    config_base: &ScenarioConfig,
    n_i_values: &[usize],
    snr_grid_db: &[f64],
    trials: usize,
    threads: usize,
) -> Result<AggregateResult> {
    aggregate(
        &fig3_records(config_base, n_i_values, snr_grid_db, trials, threads)?,
        snr_grid_db,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub k: usize,
    /// `d_E → count`, successful trials only.
    pub histogram: BTreeMap<usize, usize>,
    pub mean_d_e: f64,
    /// Mean of `η Θ*/K`, mW.
    pub mean_theta_mw: f64,
    pub trials: usize,
}

impl RankRow {
    /// Most frequent `d_E`; the smaller value wins a tie.
    pub fn mode(&self) -> Option<usize> {
        self.histogram
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&d, _)| d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n_i: usize,
    pub snr_db: f64,
    pub scheme: Scheme,
    pub mean_rate: f64,
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureSummary {
    pub trial_index: u64,
    pub k: usize,
    pub n_i: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    /// Distinct `(K, trial)` pairs.
    pub trials: usize,
    /// Records aggregated (one per trial and `N_I`).
    pub records: usize,
    pub rank_rows: Vec<RankRow>,
    pub rate_rows: Vec<RateRow>,
    pub failures: Vec<FailureSummary>,
}

impl AggregateResult {
    pub fn is_empty(&self) -> bool {
        self.records == 0
    }

    pub fn failure_rate(&self) -> f64 {
        if self.records == 0 {
            0.0
        } else {
            self.failures.len() as f64 / self.records as f64
        }
    }

    /// True when failures exceed [`MAX_FAILURE_RATE`].
    pub fn flagged(&self) -> bool {
        self.failure_rate() > MAX_FAILURE_RATE
    }

    pub fn rate_row(&self, n_i: usize, snr_db: f64, scheme: Scheme) -> Option<&RateRow> {
        self.rate_rows
            .iter()
            .find(|r| r.n_i == n_i && r.snr_db == snr_db && r.scheme == scheme)
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Summarizes records. Input order does not matter. Rate-point `j` of every
/// record is labelled `snr_grid_db[j]`.
pub fn aggregate(records: &[ExperimentRecord], snr_grid_db: &[f64]) -> Result<AggregateResult> {
    let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.k, r.trial_index, r.n_i));

    let failures = sorted
        .iter()
        .filter_map(|r| {
            r.failure.as_ref().map(|m| FailureSummary {
                trial_index: r.trial_index,
                k: r.k,
                n_i: r.n_i,
                message: m.clone(),
            })
        })
        .collect();

    // rank statistics: one entry per (K, trial), from the first successful N_I
    let mut per_trial: BTreeMap<(usize, u64), Option<&ExperimentRecord>> = BTreeMap::new();
    for r in &sorted {
        let slot = per_trial.entry((r.k, r.trial_index)).or_insert(None);
        if slot.is_none() && r.is_ok() {
            *slot = Some(r);
        }
    }
    let mut by_k: BTreeMap<usize, Vec<&ExperimentRecord>> = BTreeMap::new();
    for ((k, _), r) in &per_trial {
        let entry = by_k.entry(*k).or_default();
        if let Some(r) = r {
            entry.push(r);
        }
    }
    let rank_rows = by_k
        .into_iter()
        .map(|(k, rs)| {
            let mut histogram = BTreeMap::new();
            for r in &rs {
                *histogram.entry(r.d_e).or_insert(0) += 1;
            }
            let d: Vec<f64> = rs.iter().map(|r| r.d_e as f64).collect();
            let th: Vec<f64> = rs.iter().map(|r| r.theta_per_er_mw).collect();
            RankRow {
                k,
                histogram,
                mean_d_e: mean_stderr(&d).0,
                mean_theta_mw: mean_stderr(&th).0,
                trials: rs.len(),
            }
        })
        .collect();

    let mut by_ni: BTreeMap<usize, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in sorted.iter().filter(|r| r.is_ok()) {
        if r.rate_points.len() != snr_grid_db.len() {
            return Err(Error::InvalidInput(format!(
                "record has {} rate points but the SNR grid has {}",
                r.rate_points.len(),
                snr_grid_db.len()
            )));
        }
        by_ni.entry(r.n_i).or_default().push(r);
    }
    let mut rate_rows = Vec::new();
    for (n_i, rs) in &by_ni {
        for (j, &snr_db) in snr_grid_db.iter().enumerate() {
            for scheme in [Scheme::MultiBeam, Scheme::SingleBeam] {
                let xs: Vec<f64> = rs.iter().map(|r| scheme.select(&r.rate_points[j])).collect();
                let (mean_rate, stderr) = mean_stderr(&xs);
                rate_rows.push(RateRow {
                    n_i: *n_i,
                    snr_db,
                    scheme,
                    mean_rate,
                    stderr,
                    trials: xs.len(),
                });
            }
        }
    }

    Ok(AggregateResult {
        trials: per_trial.len(),
        records: records.len(),
        rank_rows,
        rate_rows,
        failures,
    })
}
