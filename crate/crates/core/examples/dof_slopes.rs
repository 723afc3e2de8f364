//! High-SNR slopes of both schemes on trials with two energy beams.
//!
//! With `d_E = 2`, interference occupies `min(N_I, 2)` receive dimensions
//! under multi-beam transfer but only one under single-beam time sharing.
//!
//!     cargo run --release --example dof_slopes -- [trials]

use wetwit::channel::{dbm_to_watts, ScenarioConfig};
use wetwit::sim::{mean_stderr, parallel_trials, run_trial};
use wetwit::wit::{dof_estimate, Scheme};

fn main() -> wetwit::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let grid: Vec<(f64, f64)> = [60.0, 70.0, 80.0]
        .iter()
        .map(|&d| (dbm_to_watts(d), dbm_to_watts(d)))
        .collect();
    println!(
        "{:>4} {:>7} {:>11} {:>12}",
        "N_I", "trials", "multi-beam", "single-beam"
    );
    for n_i in [1, 2, 3, 4] {
        let cfg = ScenarioConfig {
            n_i,
            ..ScenarioConfig::default()
        };
        let records = parallel_trials(trials, 0, |i| run_trial(&cfg, i, &grid))?;
        let mut multi = Vec::new();
        let mut single = Vec::new();
        for r in records.iter().filter(|r| r.is_ok() && r.d_e == 2) {
            multi.push(dof_estimate(&r.rate_points, Scheme::MultiBeam)?);
            single.push(dof_estimate(&r.rate_points, Scheme::SingleBeam)?);
        }
        println!(
            "{n_i:>4} {:>7} {:>11.3} {:>12.3}",
            multi.len(),
            mean_stderr(&multi).0,
            mean_stderr(&single).0
        );
    }
    Ok(())
}
