//! Seeded channel realizations.
//!
//! Energy links (transmitter to each energy receiver) are Rician: a rank-1
//! unit-modulus line-of-sight matrix plus circularly-symmetric Gaussian
//! scatter, mixed by the K-factor to unit average power per entry. By default
//! the line-of-sight part is a pair of half-wavelength ULA steering vectors
//! at a uniformly random angle per receiver (receivers spread around the
//! transmitter at equal distance); [`LosModel::Aligned`] uses the all-ones
//! matrix for every receiver instead. The links into the
//! information receiver are Rayleigh. Path loss enters as one scalar
//! amplitude factor per link type.
//!
//! Each trial gets its own seed from [`per_trial_seed`]. Energy links and
//! information links are drawn from separate ChaCha streams of that seed, so
//! changing `n_i` or `m_i` leaves the energy channels of a trial untouched.

mod config;

pub use config::{db_to_linear, dbm_to_watts, watts_to_dbm, EnergyProfile, LosModel, ScenarioConfig, CONFIG_KEYS};

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{numerical_rank, ComplexMatrix, C64, DEFAULT_RANK_TOL};

const ENERGY_STREAM: u64 = 0;
const INFO_STREAM: u64 = 1;

/// Redraw budget for the full-rank requirement on `F` and `H`.
const MAX_REDRAWS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// One `n_e × m_e` matrix per energy receiver.
    pub g: Vec<ComplexMatrix>,
    /// Energy transmitter to information receiver, `n_i × m_e`.
    pub f: ComplexMatrix,
    /// Information transmitter to information receiver, `n_i × m_i`.
    pub h: ComplexMatrix,
    pub seed_used: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial_index` under `base_seed`.
///
/// `splitmix64(base + splitmix64(i))`: every step is a bijection of `u64`,
/// so distinct trial indices always map to distinct seeds.
pub fn per_trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(splitmix64(trial_index)))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Standard circularly-symmetric complex Gaussian, `E|z|² = 1`.
fn cn01(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn rayleigh(rng: &mut ChaCha8Rng, rows: usize, cols: usize, amplitude: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| cn01(rng) * amplitude)
}

fn full_rank(m: &ComplexMatrix) -> Result<bool> {
    let gram = if m.rows() <= m.cols() {
        m.adjoint().gram()
    } else {
        m.gram()
    };
    Ok(numerical_rank(&gram, DEFAULT_RANK_TOL)? == m.rows().min(m.cols()))
}

fn rayleigh_full_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, amplitude: f64) -> Result<ComplexMatrix> {
    let mut m = rayleigh(rng, rows, cols, amplitude);
    for _ in 0..MAX_REDRAWS {
        if full_rank(&m)? {
            break;
        }
        m = rayleigh(rng, rows, cols, amplitude);
    }
    Ok(m)
}

/// Rician energy links of one trial.
pub fn sample_energy_channels(config: &ScenarioConfig, trial_index: u64) -> Vec<ComplexMatrix> {
    let seed = per_trial_seed(config.rng_seed, trial_index);
    let mut rng = stream(seed, ENERGY_STREAM);
    let amplitude = db_to_linear(-config.pathloss_et_er_db).sqrt();
    let (los, scatter) = if config.rician_k_factor_db == f64::INFINITY {
        (1.0, 0.0)
    } else {
        let kappa = db_to_linear(config.rician_k_factor_db);
        ((kappa / (kappa + 1.0)).sqrt(), (1.0 / (kappa + 1.0)).sqrt())
    };
    (0..config.k)
        .map(|_| {
            let (rx, tx) = match config.los_model {
                LosModel::Aligned => (
                    vec![C64::new(1.0, 0.0); config.n_e],
                    vec![C64::new(1.0, 0.0); config.m_e],
                ),
                LosModel::Steering => {
                    let aod: f64 = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
                    let aoa: f64 = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
                    (steering(config.n_e, aoa), steering(config.m_e, aod))
                }
            };
            ComplexMatrix::from_fn(config.n_e, config.m_e, |r, c| {
                let fade = cn01(&mut rng);
                (rx[r] * tx[c] * los + fade * scatter) * amplitude
            })
        })
        .collect()
}

/// Half-wavelength ULA response `e^{jπ m sin θ}`, `m = 0..n`.
fn steering(n: usize, theta: f64) -> Vec<C64> {
    let phase = PI * theta.sin();
    (0..n).map(|m| C64::from_polar(1.0, phase * m as f64)).collect()
}

/// Rayleigh links `(F, H)` into the information receiver, redrawn until both
/// are numerically full rank.
pub fn sample_info_channels(config: &ScenarioConfig, trial_index: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let seed = per_trial_seed(config.rng_seed, trial_index);
    let mut rng = stream(seed, INFO_STREAM);
    let f_amp = db_to_linear(-config.pathloss_et_ir_db).sqrt();
    let h_amp = db_to_linear(-config.pathloss_it_ir_db).sqrt();
    let f = rayleigh_full_rank(&mut rng, config.n_i, config.m_e, f_amp)?;
    let h = rayleigh_full_rank(&mut rng, config.n_i, config.m_i, h_amp)?;
    Ok((f, h))
}

pub fn sample_channels(config: &ScenarioConfig, trial_index: u64) -> Result<ChannelRealization> {
    let g = sample_energy_channels(config, trial_index);
    let (f, h) = sample_info_channels(config, trial_index)?;
    Ok(ChannelRealization {
        g,
        f,
        h,
        seed_used: per_trial_seed(config.rng_seed, trial_index),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn trial_seed_is_deterministic_and_distinct() {
        assert_eq!(per_trial_seed(42, 7), per_trial_seed(42, 7));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let s: u64 = rng.gen();
            assert_ne!(per_trial_seed(s, 0), per_trial_seed(s, 1));
        }
        let seeds: HashSet<u64> = (0..10_000).map(|i| per_trial_seed(9, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }

    #[test]
    fn same_trial_same_realization() {
        let cfg = ScenarioConfig::default();
        assert_eq!(sample_channels(&cfg, 3).unwrap(), sample_channels(&cfg, 3).unwrap());
        assert_ne!(sample_channels(&cfg, 3).unwrap(), sample_channels(&cfg, 4).unwrap());
    }

    #[test]
    fn dimensions_follow_config() {
        let cfg = ScenarioConfig {
            m_e: 3,
            n_e: 2,
            k: 5,
            m_i: 2,
            n_i: 4,
            ..Default::default()
        };
        let ch = sample_channels(&cfg, 0).unwrap();
        assert_eq!(ch.g.len(), 5);
        assert!(ch.g.iter().all(|g| g.shape() == (2, 3)));
        assert_eq!(ch.f.shape(), (4, 3));
        assert_eq!(ch.h.shape(), (4, 2));
        assert!(full_rank(&ch.f).unwrap() && full_rank(&ch.h).unwrap());
    }

    #[test]
    fn energy_links_independent_of_info_dimensions() {
        let a = ScenarioConfig {
            n_i: 1,
            ..Default::default()
        };
        let b = ScenarioConfig {
            n_i: 4,
            m_i: 2,
            ..Default::default()
        };
        assert_eq!(sample_energy_channels(&a, 11), sample_energy_channels(&b, 11));
    }

    #[test]
    fn pure_line_of_sight_limit() {
        let cfg = ScenarioConfig {
            rician_k_factor_db: f64::INFINITY,
            los_model: LosModel::Aligned,
            ..Default::default()
        };
        for trial in 0..5 {
            for g in sample_energy_channels(&cfg, trial) {
                for z in g.data() {
                    assert_eq!(*z, C64::new(1e-2, 0.0));
                }
            }
        }
    }

    #[test]
    fn pathloss_scales_energy_amplitude() {
        // 40 dB → amplitude 1e-2; with a huge K-factor the entries sit at the LOS value.
        let cfg = ScenarioConfig {
            rician_k_factor_db: 200.0,
            ..Default::default()
        };
        let g = &sample_energy_channels(&cfg, 0)[0];
        assert!(g.data().iter().all(|z| (z.norm() - 1e-2).abs() < 1e-10));
    }

    #[test]
    fn steering_line_of_sight_is_deterministic_per_trial() {
        let cfg = ScenarioConfig {
            rician_k_factor_db: f64::INFINITY,
            n_e: 2,
            ..Default::default()
        };
        let a = sample_energy_channels(&cfg, 4);
        assert_eq!(a, sample_energy_channels(&cfg, 4));
        for g in &a {
            // rank-1 unit-modulus outer product scaled by the path loss
            assert!(g.data().iter().all(|z| (z.norm() - 1e-2).abs() < 1e-12));
            assert!((g.gram().trace() - 8.0 * 1e-4).abs() < 1e-15);
            assert_eq!(crate::numerics::numerical_rank(&g.gram(), 1e-9).unwrap(), 1);
        }
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn rayleigh_mean_power_matches_pathloss() {
        let cfg = ScenarioConfig {
            n_i: 1,
            m_i: 1,
            ..Default::default()
        };
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|t| sample_info_channels(&cfg, t).unwrap().1[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean / 1e-8 - 1.0).abs() < 0.02, "mean power {mean}");
    }

    #[test]
    fn rician_mean_power_and_cross_user_correlation() {
        let cfg = ScenarioConfig {
            k: 2,
            m_e: 1,
            ..Default::default()
        };
        let n = 100_000u64;
        let kappa = db_to_linear(5.0);
        let los = (kappa / (kappa + 1.0)).sqrt() * 1e-2;
        let cfg = ScenarioConfig {
            los_model: LosModel::Aligned,
            ..cfg
        };
        let (mut p0, mut cross, mut v0, mut v1) = (0.0, C64::new(0.0, 0.0), 0.0, 0.0);
        for t in 0..n {
            let g = sample_energy_channels(&cfg, t);
            let a = g[0][(0, 0)];
            let b = g[1][(0, 0)];
            p0 += a.norm_sqr();
            let (da, db) = (a - los, b - los);
            cross += da * db.conj();
            v0 += da.norm_sqr();
            v1 += db.norm_sqr();
        }
        let nf = n as f64;
        assert!((p0 / nf / 1e-4 - 1.0).abs() < 0.02);
        let rho = cross.norm() / (v0 * v1).sqrt();
        assert!(rho < 0.02, "cross-correlation {rho}");
    }
}
