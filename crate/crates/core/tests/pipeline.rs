//! Library-level properties of the energy, information and time-sharing
//! stages on randomly seeded realizations.

use proptest::prelude::*;
use wetwit::channel::{sample_channels, ScenarioConfig};
use wetwit::wet::{
    build_schedule, constraint_matrices, fair_objective, harvested_energy, harvested_energy_schedule, solve_p1,
};
use wetwit::wit::{rate, solve_p2, solve_p3, waterfill};

fn config(k: usize, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        k,
        rng_seed: seed,
        ..ScenarioConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_schedule_and_rates_are_consistent(k in 2usize..30, seed in any::<u64>(), trial in 0u64..1000) {
        let cfg = config(k, seed);
        let ch = sample_channels(&cfg, trial).unwrap();
        let sol = solve_p1(&ch, &cfg).unwrap();

        prop_assert!((sol.s_e_opt.trace() - cfg.p_e).abs() <= 1e-9 * cfg.p_e);
        prop_assert!(sol.duality_gap <= 1e-6);
        prop_assert!(sol.d_e >= 1 && sol.d_e <= cfg.m_e);

        // every receiver gets at least its share of Θ*
        let a = constraint_matrices(&ch, cfg.t);
        let alpha = cfg.alpha_weights();
        let theta = fair_objective(&a, &alpha, &sol.s_e_opt).unwrap();
        prop_assert!((theta - sol.theta_opt).abs() <= 1e-9 * sol.theta_opt);

        // time sharing delivers the same energy to every receiver
        let schedule = build_schedule(&sol, &cfg).unwrap();
        prop_assert_eq!(schedule.len(), sol.d_e);
        for g in &ch.g {
            let e_cov = harvested_energy(&sol.s_e_opt, g, cfg.eta, cfg.t).unwrap();
            let e_sch = harvested_energy_schedule(&schedule, g, cfg.eta).unwrap();
            prop_assert!((e_cov - e_sch).abs() <= 1e-9 * e_cov.max(1e-300));
        }

        // single-beam energy never hurts the information link more
        for p_i in [1e-3, 1.0, 1e3] {
            let multi = solve_p2(&sol.s_e_opt, &ch.f, &ch.h, cfg.sigma2, p_i).unwrap();
            let single = solve_p3(&schedule, &ch.f, &ch.h, cfg.sigma2, p_i).unwrap();
            prop_assert!(single.average_rate >= multi.rate - 1e-9);
            let check = rate(&sol.s_e_opt, &multi.s_i_opt, &ch.f, &ch.h, cfg.sigma2).unwrap();
            prop_assert!((check - multi.rate).abs() <= 1e-8 * multi.rate.max(1.0));
            prop_assert!((multi.s_i_opt.trace() - p_i).abs() <= 1e-9 * p_i);
        }
    }

    #[test]
    fn waterfilling_spends_exactly_the_budget(
        gains in proptest::collection::vec(0.0f64..1e3, 1..6),
        p in 1e-6f64..1e6,
    ) {
        let wf = waterfill(&gains, p).unwrap();
        let total: f64 = wf.powers.iter().sum();
        if gains.iter().any(|&g| g > 0.0) {
            prop_assert!((total - p).abs() <= 1e-12 * p);
        }
        for (&g, &q) in gains.iter().zip(&wf.powers) {
            prop_assert!(q >= 0.0);
            if q > 0.0 {
                prop_assert!((q + 1.0 / g - wf.water_level).abs() <= 1e-9 * wf.water_level);
            }
        }
    }
}
