//! Invariant suite behind the `validate` subcommand.
//!
//! Each check returns a [`CheckResult`] instead of panicking, so a run
//! reports every failure at once.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{dbm_to_watts, sample_channels, ScenarioConfig};
use crate::error::Result;
use crate::numerics::{ComplexMatrix, HermitianMatrix, C64};
use crate::oracle::{p1_bloch_search, rate_whitened_eig, waterfill_two_grid};
use crate::sim::{
    parallel_trials, run_trial, run_trial_multi, ExperimentRecord, DOMINANCE_TOL, GAP_TOL, POWER_TOL,
    SCHEDULE_ENERGY_TOL,
};
use crate::wet::{constraint_matrices, solve_p1};
use crate::wit::{rate, waterfill};

pub const P1_ORACLE_TOL: f64 = 1e-3;
pub const WATERFILL_ORACLE_TOL: f64 = 1e-4;
pub const RATE_FORM_TOL: f64 = 1e-9;
/// Fraction of trials whose interference rank must equal `min(N_I, d_E)`.
pub const INTERFERENCE_RANK_FRACTION: f64 = 0.99;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    /// Trials per `K` for the per-trial properties.
    pub trials: usize,
    pub k_values: Vec<usize>,
    /// Oracle instances per check.
    pub oracle_instances: usize,
    pub threads: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            trials: 200,
            k_values: vec![10, 20, 40],
            oracle_instances: 100,
            threads: 0,
        }
    }
}

/// `P_I = P_E ∈ {10, 20, 30, 40, 50}` dBm.
pub fn property_power_grid() -> Vec<(f64, f64)> {
    (1..=5)
        .map(|i| {
            let p = dbm_to_watts(10.0 * i as f64);
            (p, p)
        })
        .collect()
}

/// Per-trial records for every `K`, evaluated on [`property_power_grid`].
pub fn property_records(
    base: &ScenarioConfig,
    k_values: &[usize],
    trials: usize,
    threads: usize,
) -> Result<Vec<ExperimentRecord>> {
    let grid = property_power_grid();
    let mut out = Vec::new();
    for &k in k_values {
        let cfg = ScenarioConfig { k, ..base.clone() };
        cfg.validate()?;
        out.extend(parallel_trials(trials, threads, |i| run_trial(&cfg, i, &grid))?);
    }
    Ok(out)
}

fn failures_note(records: &[ExperimentRecord]) -> (usize, String) {
    let failed: Vec<&ExperimentRecord> = records.iter().filter(|r| !r.is_ok()).collect();
    let note = failed
        .first()
        .map(|r| {
            format!(
                "; first failure (K = {}, trial {}): {}",
                r.k,
                r.trial_index,
                r.failure.as_deref().unwrap_or("")
            )
        })
        .unwrap_or_default();
    (failed.len(), note)
}

/// Schedule energies equal covariance energies for every receiver.
pub fn check_schedule_energy(records: &[ExperimentRecord]) -> CheckResult {
    let (failed, note) = failures_note(records);
    let worst = records
        .iter()
        .filter_map(|r| r.diagnostics.as_ref())
        .map(|d| d.schedule_energy_error)
        .fold(0.0, f64::max);
    CheckResult::new(
        "schedule energy equivalence",
        failed == 0 && worst <= SCHEDULE_ENERGY_TOL,
        format!(
            "{} trials, max relative error {worst:.3e}, {failed} failed{note}",
            records.len()
        ),
    )
}

/// Single-beam rate never below multi-beam rate.
pub fn check_dominance(records: &[ExperimentRecord]) -> CheckResult {
    let (failed, note) = failures_note(records);
    let worst = records
        .iter()
        .filter_map(|r| r.diagnostics.as_ref())
        .map(|d| d.dominance_margin)
        .fold(f64::INFINITY, f64::min);
    let points: usize = records.iter().map(|r| r.rate_points.len()).sum();
    CheckResult::new(
        "single-beam dominance",
        failed == 0 && worst >= -DOMINANCE_TOL,
        format!("{points} rate points, smallest margin {worst:.3e} bits/s/Hz, {failed} failed{note}"),
    )
}

/// Duality gap, power tightness and the fairness constraints.
pub fn check_certificate(records: &[ExperimentRecord]) -> CheckResult {
    let (failed, note) = failures_note(records);
    let diags: Vec<_> = records.iter().filter_map(|r| r.diagnostics.as_ref()).collect();
    let gap = diags.iter().map(|d| d.duality_gap).fold(0.0, f64::max);
    let power = diags.iter().map(|d| d.power_error).fold(0.0, f64::max);
    let below = records
        .iter()
        .filter(|r| r.is_ok())
        .filter(|r| {
            let share = r.theta_per_er_mw * 1e-3;
            r.per_er_energy.iter().any(|&q| q < share * (1.0 - 1e-9))
        })
        .count();
    CheckResult::new(
        "energy optimality certificate",
        failed == 0 && gap <= GAP_TOL && power <= POWER_TOL && below == 0,
        format!(
            "max gap {gap:.3e}, max power error {power:.3e}, {below} trials below the fair share, {failed} failed{note}"
        ),
    )
}

/// `rank(F S_E* Fᴴ) = min(N_I, d_E)` on at least 99% of records.
pub fn check_interference_rank(records: &[ExperimentRecord]) -> CheckResult {
    let ok: Vec<&ExperimentRecord> = records.iter().filter(|r| r.is_ok()).collect();
    let hits = ok
        .iter()
        .filter(|r| r.diagnostics.as_ref().map(|d| d.interference_rank) == Some(r.n_i.min(r.d_e)))
        .count();
    let frac = if records.is_empty() {
        0.0
    } else {
        hits as f64 / records.len() as f64
    };
    CheckResult::new(
        "interference rank",
        frac >= INTERFERENCE_RANK_FRACTION,
        format!(
            "{hits}/{} trials match min(N_I, d_E) ({:.2}%)",
            records.len(),
            100.0 * frac
        ),
    )
}

/// Interference-rank records: every trial at `N_I = 1..=4`.
pub fn interference_records(base: &ScenarioConfig, trials: usize, threads: usize) -> Result<Vec<ExperimentRecord>> {
    base.validate()?;
    let nested = parallel_trials(trials, threads, |i| run_trial_multi(base, i, &[1, 2, 3, 4], &[]))?;
    Ok(nested.into_iter().flatten().collect())
}

/// Interior-point solution against the Bloch-ball search, two transmit
/// antennas and up to three receivers.
pub fn check_p1_oracle(base: &ScenarioConfig, instances: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for i in 0..instances {
        let cfg = ScenarioConfig {
            m_e: 2,
            k: 1 + i % 3,
            ..base.clone()
        };
        let out = sample_channels(&cfg, i as u64).and_then(|ch| {
            let sol = solve_p1(&ch, &cfg)?;
            let a = constraint_matrices(&ch, cfg.t);
            let brute = p1_bloch_search(&a, &cfg.alpha_weights(), cfg.p_e, 40)?;
            Ok((sol.theta_opt - brute).abs() / brute)
        });
        match out {
            Ok(e) => worst = worst.max(e),
            Err(e) => errors.push(format!("instance {i}: {e}")),
        }
    }
    CheckResult::new(
        "energy solver vs Bloch-ball search",
        errors.is_empty() && worst <= P1_ORACLE_TOL,
        format!(
            "{instances} instances, max relative error {worst:.3e}{}",
            first_error(&errors)
        ),
    )
}

fn first_error(errors: &[String]) -> String {
    errors
        .first()
        .map(|e| format!(", {} errors, first: {e}", errors.len()))
        .unwrap_or_default()
}

/// Log-uniform gains over nine decades.
fn random_gains(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.gen_range(-4.0..5.0))).collect()
}

/// Water-filling against a 1-D grid search on two streams, unit power.
pub fn check_waterfill_oracle(seed: u64, instances: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for i in 0..instances {
        let g = random_gains(&mut rng, 2);
        match waterfill(&g, 1.0) {
            Ok(wf) => {
                let (p1, p2) = waterfill_two_grid(g[0], g[1], 1.0, 10_000);
                worst = worst.max((wf.powers[0] - p1).abs()).max((wf.powers[1] - p2).abs());
            }
            Err(e) => errors.push(format!("instance {i}: {e}")),
        }
    }
    CheckResult::new(
        "water-filling vs grid search",
        errors.is_empty() && worst <= WATERFILL_ORACLE_TOL,
        format!(
            "{instances} gain pairs, max power error {worst:.3e}{}",
            first_error(&errors)
        ),
    )
}

/// KKT conditions of water-filling on random gain vectors.
pub fn check_waterfill_kkt(seed: u64, instances: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = rng.gen_range(1..=6);
        let g = random_gains(&mut rng, n);
        let p = 10f64.powf(rng.gen_range(-3.0..4.0));
        let Ok(wf) = waterfill(&g, p) else {
            worst = f64::INFINITY;
            continue;
        };
        let mu = wf.water_level;
        worst = worst.max((wf.powers.iter().sum::<f64>() - p).abs() / p);
        for (gj, pj) in g.iter().zip(&wf.powers) {
            let v = if *pj > 0.0 {
                (mu - 1.0 / gj - pj).abs() / mu
            } else {
                ((mu - 1.0 / gj) / mu).max(0.0)
            };
            worst = worst.max(v);
        }
    }
    CheckResult::new(
        "water-filling KKT",
        worst <= 1e-9,
        format!("{instances} gain vectors, max relative violation {worst:.3e}"),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * std::f64::consts::FRAC_1_SQRT_2
    })
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize, trace: f64) -> HermitianMatrix {
    let b = random_matrix(rng, rank, n);
    let s = b.gram();
    s.scale(trace / s.trace())
}

/// The log-det rate against the whitened-eigenvalue form.
pub fn check_rate_forms(seed: u64, instances: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for i in 0..instances {
        let n_i = rng.gen_range(1..=4);
        let m_e = rng.gen_range(1..=4);
        let m_i = rng.gen_range(1..=4);
        let f = random_matrix(&mut rng, n_i, m_e);
        let h = random_matrix(&mut rng, n_i, m_i);
        let (rank_e, tr_e) = (rng.gen_range(1..=m_e), 10f64.powf(rng.gen_range(-2.0..2.0)));
        let s_e = random_psd(&mut rng, m_e, rank_e, tr_e);
        let (rank_i, tr_i) = (rng.gen_range(1..=m_i), 10f64.powf(rng.gen_range(-2.0..2.0)));
        let s_i = random_psd(&mut rng, m_i, rank_i, tr_i);
        let sigma2 = 10f64.powf(rng.gen_range(-2.0..0.0));
        let out =
            rate(&s_e, &s_i, &f, &h, sigma2).and_then(|a| Ok((a, rate_whitened_eig(&s_e, &s_i, &f, &h, sigma2)?)));
        match out {
            Ok((a, b)) => worst = worst.max((a - b).abs() / b.abs().max(1.0)),
            Err(e) => errors.push(format!("instance {i}: {e}")),
        }
    }
    CheckResult::new(
        "rate formula vs whitened eigenvalues",
        errors.is_empty() && worst <= RATE_FORM_TOL,
        format!("{instances} instances, max error {worst:.3e}{}", first_error(&errors)),
    )
}

/// Runs every check.
pub fn run_validation(base: &ScenarioConfig, opts: &ValidationOptions) -> Result<ValidationReport> {
    let records = property_records(base, &opts.k_values, opts.trials, opts.threads)?;
    let rank_records = interference_records(base, opts.trials, opts.threads)?;
    let n = opts.oracle_instances;
    Ok(ValidationReport {
        checks: vec![
            check_schedule_energy(&records),
            check_dominance(&records),
            check_certificate(&records),
            check_interference_rank(&rank_records),
            check_p1_oracle(base, n.min(50)),
            check_waterfill_oracle(base.rng_seed, n),
            check_waterfill_kkt(base.rng_seed.wrapping_add(1), n),
            check_rate_forms(base.rng_seed.wrapping_add(2), n),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let opts = ValidationOptions {
            trials: 6,
            k_values: vec![4],
            oracle_instances: 12,
            threads: 2,
        };
        let report = run_validation(&ScenarioConfig::default(), &opts).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c}");
        }
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn failed_record_fails_checks() {
        let cfg = ScenarioConfig {
            k: 3,
            ..ScenarioConfig::default()
        };
        let mut recs = property_records(&cfg, &[3], 2, 1).unwrap();
        recs[1].failure = Some("injected".into());
        assert!(!check_schedule_energy(&recs).passed);
        assert!(!check_dominance(&recs).passed);
        let r = check_certificate(&recs);
        assert!(!r.passed && r.detail.contains("injected"));
    }
}
