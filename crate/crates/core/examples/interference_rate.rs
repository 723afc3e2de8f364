//! Information rate under energy-beam interference.
//!
//! Compares the rate reached against the multi-beam covariance with the
//! time-shared single-beam schedule at a few transmit powers, and shows
//! the water-filling allocation behind one point.
//!
//!     cargo run --release --example interference_rate -- [N_I]

use wetwit::channel::{dbm_to_watts, sample_channels, ScenarioConfig};
use wetwit::wet::{build_schedule, solve_p1};
use wetwit::wit::{solve_p2, solve_p3, waterfill};

fn main() -> wetwit::Result<()> {
    let n_i: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let cfg = ScenarioConfig {
        n_i,
        ..ScenarioConfig::default()
    };
    let ch = sample_channels(&cfg, 0)?;
    let sol = solve_p1(&ch, &cfg)?;
    let schedule = build_schedule(&sol, &cfg)?;
    println!("N_I = {n_i}, d_E = {}", sol.d_e);
    println!("{:>8} {:>12} {:>12}", "P (dBm)", "multi-beam", "single-beam");
    for dbm in [20.0, 40.0, 60.0, 80.0] {
        let p = dbm_to_watts(dbm);
        let multi = solve_p2(&sol.scaled_to_power(p).s_e_opt, &ch.f, &ch.h, cfg.sigma2, p)?;
        let single = solve_p3(&schedule.scaled_to_power(p), &ch.f, &ch.h, cfg.sigma2, p)?;
        println!("{dbm:>8} {:>12.4} {:>12.4}", multi.rate, single.average_rate);
    }

    let p = dbm_to_watts(40.0);
    let multi = solve_p2(&sol.scaled_to_power(p).s_e_opt, &ch.f, &ch.h, cfg.sigma2, p)?;
    println!(
        "\nwhitened stream gains at 40 dBm: {:?}",
        multi.gains.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>()
    );
    let wf = waterfill(&multi.gains, p)?;
    println!(
        "water level {:.4} W, powers {:?}",
        wf.water_level,
        wf.powers.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()
    );
    Ok(())
}
