//! Interference-limited MIMO rate maximization at the information link.
//!
//! The receiver sees `F S_E Fᴴ + σ² I` as colored noise. Whitening by its
//! inverse square root turns the problem into a standard MIMO channel
//! `W H`, solved by water-filling over the squared singular values. The
//! optimal covariance is built in the right-singular basis; any covariance
//! with the same eigenbasis and eigenvalues gives the same rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{logdet_hpd, psd_inverse_sqrt, right_svd, ComplexMatrix, HermitianMatrix};
use crate::wet::TimeShareSchedule;

/// Gains at or below this fraction of the strongest gain are treated as
/// exact zeros (rank-deficient whitened channel).
const ZERO_GAIN_REL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitSolution {
    /// `S_I*`, watts.
    pub s_i_opt: HermitianMatrix,
    /// bits/s/Hz.
    pub rate: f64,
    /// Water level `μ`, watts.
    pub water_level: f64,
    pub active_streams: usize,
    /// Effective stream gains `s_j²` of the whitened channel.
    pub gains: Vec<f64>,
    /// Power per stream.
    pub powers: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P3Solution {
    pub blocks: Vec<WitSolution>,
    /// `(1/T) Σ t_i R_i`.
    pub average_rate: f64,
}

/// One point of a rate-versus-power curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurvePoint {
    pub p_i: f64,
    pub p_e: f64,
    pub rate_multibeam: f64,
    pub rate_singlebeam: f64,
    pub d_e: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    MultiBeam,
    SingleBeam,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::MultiBeam => "multibeam",
            Scheme::SingleBeam => "singlebeam",
        }
    }

    pub fn select(self, p: &RateCurvePoint) -> f64 {
        match self {
            Scheme::MultiBeam => p.rate_multibeam,
            Scheme::SingleBeam => p.rate_singlebeam,
        }
    }
}

fn interference_plus_noise(s_e: &HermitianMatrix, f: &ComplexMatrix, sigma2: f64) -> Result<HermitianMatrix> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "noise power must be positive, got {sigma2}"
        )));
    }
    Ok(f.sandwich(s_e)?.add_identity(sigma2))
}

fn check_dims(s_e: &HermitianMatrix, f: &ComplexMatrix, h: &ComplexMatrix) -> Result<()> {
    if f.cols() != s_e.dim() {
        return Err(Error::dims("rate (F columns vs S_E)", s_e.dim(), f.cols()));
    }
    if f.rows() != h.rows() {
        return Err(Error::dims("rate (F rows vs H rows)", h.rows(), f.rows()));
    }
    Ok(())
}

/// `log2 det(I + (F S_E Fᴴ + σ² I)⁻¹ H S_I Hᴴ)`, evaluated as
/// `log2 det(Q + H S_I Hᴴ) − log2 det(Q)` with `Q` the interference-plus-noise
/// covariance.
pub fn rate(
    s_e: &HermitianMatrix,
    s_i: &HermitianMatrix,
    f: &ComplexMatrix,
    h: &ComplexMatrix,
    sigma2: f64,
) -> Result<f64> {
    check_dims(s_e, f, h)?;
    if h.cols() != s_i.dim() {
        return Err(Error::dims("rate (H columns vs S_I)", s_i.dim(), h.cols()));
    }
    let q = interference_plus_noise(s_e, f, sigma2)?;
    if s_i.matrix().is_zero() {
        return Ok(0.0);
    }
    let signal = h.sandwich(s_i)?;
    let total = q.add(&signal)?;
    Ok((logdet_hpd(&total)? - logdet_hpd(&q)?).max(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaterFill {
    pub powers: Vec<f64>,
    pub water_level: f64,
}

/// Water-filling `p_j = max(0, μ − 1/g_j)` with `Σ p_j = P`.
///
/// `μ` is bracketed by bisection on `[0, P + max 1/g_j]`; once the active
/// set is known the level is recomputed in closed form so the power sum is
/// exact to rounding. All-zero gains give an all-zero allocation.
pub fn waterfill(gains: &[f64], total_power: f64) -> Result<WaterFill> {
    if !(total_power > 0.0) || !total_power.is_finite() {
        return Err(Error::InvalidInput(format!(
            "water-filling power must be positive, got {total_power}"
        )));
    }
    if gains.iter().any(|g| !(g.is_finite())) {
        return Err(Error::InvalidInput("water-filling gains must be finite".into()));
    }
    let g_max = gains.iter().copied().fold(0.0, f64::max);
    let usable: Vec<bool> = gains.iter().map(|&g| g > 0.0 && g > ZERO_GAIN_REL * g_max).collect();
    if !usable.iter().any(|&u| u) {
        return Ok(WaterFill {
            powers: vec![0.0; gains.len()],
            water_level: 0.0,
        });
    }
    let inv: Vec<f64> = gains.iter().map(|&g| 1.0 / g).collect();
    let filled = |mu: f64| -> f64 {
        inv.iter()
            .zip(&usable)
            .filter(|(_, &u)| u)
            .map(|(&i, _)| (mu - i).max(0.0))
            .sum()
    };

    let max_inv = inv
        .iter()
        .zip(&usable)
        .filter(|(_, &u)| u)
        .map(|(&i, _)| i)
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, total_power + max_inv);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * hi || mid <= lo || mid >= hi {
            break;
        }
        if filled(mid) < total_power {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut active: Vec<usize> = (0..gains.len()).filter(|&j| usable[j] && inv[j] < hi).collect();
    let mut mu;
    loop {
        mu = (total_power + active.iter().map(|&j| inv[j]).sum::<f64>()) / active.len() as f64;
        // drop streams the closed form puts below the floor
        match active.iter().position(|&j| inv[j] >= mu) {
            Some(_) if active.len() > 1 => {
                let worst = *active
                    .iter()
                    .max_by(|&&a, &&b| inv[a].total_cmp(&inv[b]))
                    .expect("non-empty");
                active.retain(|&j| j != worst);
            }
            _ => break,
        }
    }
    let mut powers = vec![0.0; gains.len()];
    for &j in &active {
        powers[j] = (mu - inv[j]).max(0.0);
    }
    // `μ − 1/g` cancels badly when `1/g ≫ P`; restore the budget exactly
    let sum: f64 = powers.iter().sum();
    if sum > 0.0 {
        powers.iter_mut().for_each(|p| *p *= total_power / sum);
    }
    Ok(WaterFill {
        powers,
        water_level: mu,
    })
}

/// Optimal information covariance against the fixed energy covariance `s_e`.
pub fn solve_p2(
    s_e: &HermitianMatrix,
    f: &ComplexMatrix,
    h: &ComplexMatrix,
    sigma2: f64,
    p_i: f64,
) -> Result<WitSolution> {
    check_dims(s_e, f, h)?;
    let q = interference_plus_noise(s_e, f, sigma2)?;
    let w = psd_inverse_sqrt(&q)?;
    let whitened = w.matrix().matmul(h);
    let svd = right_svd(&whitened)?;
    let gains: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    let wf = waterfill(&gains, p_i)?;

    let m_i = h.cols();
    let v = &svd.right_vectors;
    let s_i = ComplexMatrix::from_fn(m_i, m_i, |r, c| v[(r, c)] * wf.powers[c]).matmul(&v.adjoint());
    let s_i_opt = HermitianMatrix::new(s_i)?;
    let rate = gains.iter().zip(&wf.powers).map(|(g, p)| (1.0 + g * p).log2()).sum();
    Ok(WitSolution {
        s_i_opt,
        rate,
        water_level: wf.water_level,
        active_streams: wf.powers.iter().filter(|&&p| p > 0.0).count(),
        gains,
        powers: wf.powers,
    })
}

/// Per-sub-block optimization for the single-beam schedule.
pub fn solve_p3(
    schedule: &TimeShareSchedule,
    f: &ComplexMatrix,
    h: &ComplexMatrix,
    sigma2: f64,
    p_i: f64,
) -> Result<P3Solution> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let blocks = schedule
        .sub_blocks
        .iter()
        .map(|b| solve_p2(&b.covariance, f, h, sigma2, p_i))
        .collect::<Result<Vec<_>>>()?;
    let average_rate = schedule
        .sub_blocks
        .iter()
        .zip(&blocks)
        .map(|(b, s)| b.duration * s.rate)
        .sum::<f64>()
        / schedule.t;
    Ok(P3Solution { blocks, average_rate })
}

/// Least-squares slope of rate against `log2(P_I)`.
pub fn dof_estimate(curve: &[RateCurvePoint], scheme: Scheme) -> Result<f64> {
    let xs: Vec<f64> = curve.iter().map(|p| p.p_i.log2()).collect();
    let ys: Vec<f64> = curve.iter().map(|p| scheme.select(p)).collect();
    least_squares_slope(&xs, &ys)
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::InvalidInput(format!(
            "slope fit needs at least two paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput("slope fit needs distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
