//! Seeded channel draws: Rician energy links and Rayleigh interference links.
//!
//!     cargo run --release --example channel_sampling -- [trials]

use wetwit::channel::{per_trial_seed, sample_channels, ScenarioConfig};

fn main() -> wetwit::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let cfg = ScenarioConfig::default();
    let (mut g_pow, mut f_pow, mut h_pow) = (0.0, 0.0, 0.0);
    for i in 0..trials {
        let ch = sample_channels(&cfg, i)?;
        g_pow += ch.g.iter().map(|g| g.frobenius_norm().powi(2)).sum::<f64>() / (cfg.k * cfg.m_e * cfg.n_e) as f64;
        f_pow += ch.f.frobenius_norm().powi(2) / (cfg.n_i * cfg.m_e) as f64;
        h_pow += ch.h.frobenius_norm().powi(2) / (cfg.n_i * cfg.m_i) as f64;
    }
    let n = trials as f64;
    println!("mean entry power over {trials} trials:");
    println!(
        "  energy links {:.3e} (path loss {} dB)",
        g_pow / n,
        cfg.pathloss_et_er_db
    );
    println!(
        "  ET -> IR     {:.3e} (path loss {} dB)",
        f_pow / n,
        cfg.pathloss_et_ir_db
    );
    println!(
        "  IT -> IR     {:.3e} (path loss {} dB)",
        h_pow / n,
        cfg.pathloss_it_ir_db
    );

    let a = sample_channels(&cfg, 3)?;
    let b = sample_channels(&cfg, 3)?;
    println!(
        "trial 3 seed {:#018x}, redraw identical: {}",
        per_trial_seed(cfg.rng_seed, 3),
        a == b
    );
    Ok(())
}
