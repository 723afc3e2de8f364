//! Scenario configuration and its flat `key = value` text form.
//!
//! ```text
//! # comments start with '#'
//! k = 20
//! p_e = 30dBm        # plain numbers are watts; a dBm suffix converts
//! alpha = uniform    # or an explicit comma-separated list of K weights
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Line-of-sight component of the Rician energy links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosModel {
    /// Outer product of half-wavelength ULA steering vectors, with an
    /// angle of departure (and of arrival, for multi-antenna receivers)
    /// drawn uniformly per receiver and trial.
    Steering,
    /// All-ones matrix shared by every receiver.
    Aligned,
}

impl LosModel {
    fn parse(v: &str) -> Option<Self> {
        match v.to_ascii_lowercase().as_str() {
            "steering" => Some(LosModel::Steering),
            "aligned" => Some(LosModel::Aligned),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            LosModel::Steering => "steering",
            LosModel::Aligned => "aligned",
        }
    }
}

/// Target split of the total harvested energy across energy receivers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyProfile {
    /// `α_k = 1/K`.
    Uniform,
    Weights(Vec<f64>),
}

impl EnergyProfile {
    pub fn weights(&self, k: usize) -> Vec<f64> {
        match self {
            EnergyProfile::Uniform => vec![1.0 / k as f64; k],
            EnergyProfile::Weights(w) => w.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Antennas at the energy transmitter.
    pub m_e: usize,
    /// Antennas at each energy receiver.
    pub n_e: usize,
    /// Number of energy receivers.
    pub k: usize,
    /// Antennas at the information transmitter.
    pub m_i: usize,
    /// Antennas at the information receiver.
    pub n_i: usize,
    /// Energy transmitter power budget, watts.
    pub p_e: f64,
    /// Information transmitter power budget, watts.
    pub p_i: f64,
    /// Receiver noise power, watts.
    pub sigma2: f64,
    /// Harvesting efficiency; applied only when energies are reported.
    pub eta: f64,
    /// Block length, seconds.
    pub t: f64,
    pub alpha: EnergyProfile,
    pub pathloss_et_er_db: f64,
    pub pathloss_it_ir_db: f64,
    pub pathloss_et_ir_db: f64,
    /// Rician K-factor of the transmitter-to-receiver energy links, dB.
    /// `inf` gives a pure line-of-sight channel.
    pub rician_k_factor_db: f64,
    pub los_model: LosModel,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            m_e: 4,
            n_e: 1,
            k: 20,
            m_i: 4,
            n_i: 4,
            p_e: dbm_to_watts(30.0),
            p_i: dbm_to_watts(30.0),
            sigma2: dbm_to_watts(-70.0),
            eta: 0.5,
            t: 1.0,
            alpha: EnergyProfile::Uniform,
            pathloss_et_er_db: 40.0,
            pathloss_it_ir_db: 80.0,
            pathloss_et_ir_db: 80.0,
            rician_k_factor_db: 5.0,
            los_model: LosModel::Steering,
            rng_seed: 0,
        }
    }
}

/// Every key accepted by [`ScenarioConfig::set`], in file order.
pub const CONFIG_KEYS: &[&str] = &[
    "m_e",
    "n_e",
    "k",
    "m_i",
    "n_i",
    "p_e",
    "p_i",
    "sigma2",
    "eta",
    "t",
    "alpha",
    "pathloss_et_er",
    "pathloss_it_ir",
    "pathloss_et_ir",
    "rician_k_factor",
    "los_model",
    "rng_seed",
];

impl ScenarioConfig {
    pub fn alpha_weights(&self) -> Vec<f64> {
        self.alpha.weights(self.k)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        for (name, v) in [
            ("m_e", self.m_e),
            ("n_e", self.n_e),
            ("k", self.k),
            ("m_i", self.m_i),
            ("n_i", self.n_i),
        ] {
            if v < 1 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        for (name, v) in [
            ("p_e", self.p_e),
            ("p_i", self.p_i),
            ("sigma2", self.sigma2),
            ("t", self.t),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        for (name, v) in [
            ("pathloss_et_er", self.pathloss_et_er_db),
            ("pathloss_it_ir", self.pathloss_it_ir_db),
            ("pathloss_et_ir", self.pathloss_et_ir_db),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.rician_k_factor_db.is_nan() || self.rician_k_factor_db == f64::NEG_INFINITY {
            return bad("rician_k_factor must be a number or inf".into());
        }
        let w = self.alpha_weights();
        if w.len() != self.k {
            return bad(format!("alpha has {} entries but k = {}", w.len(), self.k));
        }
        if w.iter().any(|&a| !(a >= 0.0)) {
            return bad("alpha entries must be non-negative".into());
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return bad(format!("alpha must sum to 1, sums to {sum}"));
        }
        Ok(())
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let key_norm = key.trim().to_ascii_lowercase().replace('-', "_");
        let count = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Config(format!("{key}: expected a count, got '{v}'")))
        };
        let real = |v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Config(format!("{key}: expected a number, got '{v}'")))
        };
        let power = |v: &str| -> Result<f64> {
            let lower = v.to_ascii_lowercase();
            if let Some(dbm) = lower.strip_suffix("dbm") {
                Ok(dbm_to_watts(real(dbm.trim())?))
            } else {
                real(lower.strip_suffix('w').unwrap_or(&lower).trim())
            }
        };
        let db = |v: &str| -> Result<f64> {
            let lower = v.to_ascii_lowercase();
            real(lower.strip_suffix("db").unwrap_or(&lower).trim())
        };
        match key_norm.as_str() {
            "m_e" => self.m_e = count(value)?,
            "n_e" => self.n_e = count(value)?,
            "k" => self.k = count(value)?,
            "m_i" => self.m_i = count(value)?,
            "n_i" => self.n_i = count(value)?,
            "p_e" => self.p_e = power(value)?,
            "p_i" => self.p_i = power(value)?,
            "sigma2" => self.sigma2 = power(value)?,
            "eta" => self.eta = real(value)?,
            "t" => self.t = real(value)?,
            "alpha" => {
                self.alpha = if value.eq_ignore_ascii_case("uniform") {
                    EnergyProfile::Uniform
                } else {
                    EnergyProfile::Weights(value.split(',').map(|s| real(s.trim())).collect::<Result<Vec<_>>>()?)
                }
            }
            "pathloss_et_er" => self.pathloss_et_er_db = db(value)?,
            "pathloss_it_ir" => self.pathloss_it_ir_db = db(value)?,
            "pathloss_et_ir" => self.pathloss_et_ir_db = db(value)?,
            "rician_k_factor" => self.rician_k_factor_db = db(value)?,
            "los_model" => {
                self.los_model = LosModel::parse(value)
                    .ok_or_else(|| Error::Config(format!("{key}: expected 'steering' or 'aligned', got '{value}'")))?
            }
            "rng_seed" | "seed" => {
                self.rng_seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("{key}: expected an unsigned integer, got '{value}'")))?
            }
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies the assignments in a config file body on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config file body; parsing it back reproduces `self` exactly.
    pub fn to_text(&self) -> String {
        let alpha = match &self.alpha {
            EnergyProfile::Uniform => "uniform".to_string(),
            EnergyProfile::Weights(w) => w.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","),
        };
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("m_e", self.m_e.to_string());
        kv("n_e", self.n_e.to_string());
        kv("k", self.k.to_string());
        kv("m_i", self.m_i.to_string());
        kv("n_i", self.n_i.to_string());
        kv("p_e", format!("{:?}", self.p_e));
        kv("p_i", format!("{:?}", self.p_i));
        kv("sigma2", format!("{:?}", self.sigma2));
        kv("eta", format!("{:?}", self.eta));
        kv("t", format!("{:?}", self.t));
        kv("alpha", alpha);
        kv("pathloss_et_er", format!("{:?}", self.pathloss_et_er_db));
        kv("pathloss_it_ir", format!("{:?}", self.pathloss_it_ir_db));
        kv("pathloss_et_ir", format!("{:?}", self.pathloss_et_ir_db));
        kv("rician_k_factor", format!("{:?}", self.rician_k_factor_db));
        kv("los_model", self.los_model.as_str().to_string());
        kv("rng_seed", self.rng_seed.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_are_valid() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        assert!((c.p_e - 1.0).abs() < 1e-15);
        assert!((c.sigma2 - 1e-10).abs() < 1e-24);
    }

    #[test]
    fn parses_comments_and_units() {
        let c = ScenarioConfig::from_text(
            "# header\n k = 2 \nalpha = 0.25, 0.75 # skewed\np_i = 40dBm\nrician_k_factor = inf\n",
        )
        .unwrap();
        assert_eq!(c.k, 2);
        assert_eq!(c.alpha_weights(), vec![0.25, 0.75]);
        assert!((c.p_i - 10.0).abs() < 1e-12);
        assert!(c.rician_k_factor_db.is_infinite());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScenarioConfig::from_text("bogus = 1").is_err());
        assert!(ScenarioConfig::from_text("k = two").is_err());
        assert!(ScenarioConfig::from_text("k = 2\nalpha = 0.5,0.6").is_err());
        assert!(ScenarioConfig::from_text("k = 3\nalpha = 0.5,0.5").is_err());
        assert!(ScenarioConfig::from_text("eta = 0").is_err());
        assert!(ScenarioConfig::from_text("m_e = 0").is_err());
        assert!(ScenarioConfig::from_text("no equals sign").is_err());
        assert!(ScenarioConfig::from_text("los_model = sideways").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(k in 1usize..6, p_e in 1e-3f64..1e5, seed in any::<u64>(), kf in -10.0f64..20.0, aligned in any::<bool>(), raw in proptest::collection::vec(0.01f64..1.0, 6)) {
            let total: f64 = raw[..k].iter().sum();
            let weights: Vec<f64> = raw[..k].iter().map(|x| x / total).collect();
            let c = ScenarioConfig {
                k,
                p_e,
                rng_seed: seed,
                rician_k_factor_db: kf,
                los_model: if aligned { LosModel::Aligned } else { LosModel::Steering },
                alpha: EnergyProfile::Weights(weights),
                ..ScenarioConfig::default()
            };
            let mut back = ScenarioConfig::default();
            back.apply_text(&c.to_text()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
