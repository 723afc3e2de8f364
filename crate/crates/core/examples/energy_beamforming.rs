//! Fair energy beamforming for one channel draw.
//!
//! Solves the max-min harvested-energy problem, prints the optimal beams and
//! checks the result against the dual certificate.
//!
//!     cargo run --release --example energy_beamforming -- [K] [trial]

use wetwit::channel::{sample_channels, ScenarioConfig};
use wetwit::wet::{harvested_energy, sdp_certificate, solve_p1};

fn main() -> wetwit::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let trial: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = ScenarioConfig {
        k,
        ..ScenarioConfig::default()
    };

    let ch = sample_channels(&cfg, trial)?;
    let sol = solve_p1(&ch, &cfg)?;
    println!(
        "K = {k}, trial {trial}: {} interior-point iterations",
        sol.solver_iterations
    );
    println!("Theta* = {:.6e} J (unit efficiency)", sol.theta_opt);
    println!("energy beams d_E = {}", sol.d_e);
    for (i, (gamma, w)) in sol.beams().iter().enumerate() {
        let entries: Vec<String> = w.iter().map(|z| format!("{:+.3}{:+.3}i", z.re, z.im)).collect();
        println!("  beam {i}: power {gamma:.4} W, w = [{}]", entries.join(", "));
    }
    println!("relative duality gap {:.2e}", sdp_certificate(&sol, &ch, &cfg)?);

    let share = cfg.eta * sol.theta_opt / k as f64;
    let mut energies = Vec::with_capacity(k);
    for g in &ch.g {
        energies.push(harvested_energy(&sol.s_e_opt, g, cfg.eta, cfg.t)?);
    }
    let binding = energies.iter().filter(|&&q| q <= share * (1.0 + 1e-6)).count();
    println!(
        "fair share {:.4e} J; {binding} of {k} receivers sit at it, the rest harvest up to {:.4e} J",
        share,
        energies.iter().copied().fold(0.0, f64::max)
    );
    Ok(())
}
