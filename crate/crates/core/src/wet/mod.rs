//! Fair multiuser energy beamforming and the single-beam time-sharing
//! schedule built from its solution.
//!
//! The beamforming problem maximizes `Θ` over transmit covariances `S ⪰ 0`
//! with `tr S ≤ P_E`, subject to `T·tr(G_kᴴ G_k S) ≥ α_k Θ` for every
//! receiver. It is solved in a normalized frame (power 1, constraint
//! matrices divided by their mean trace) by the interior-point solver in
//! [`sdp`] on the real embedding
//!
//! ```text
//! φ(S) = [ Re S  −Im S ]      tr(φ(A) φ(S)) = 2 Re tr(A S)
//!        [ Im S   Re S ]
//! ```
//!
//! with `Θ` and the `K + 1` slacks in the nonnegative block. The dual of the
//! problem is `min P_E·λ_max(Σ μ_k A_k)` over `μ ≥ 0, Σ α_k μ_k = 1`, which
//! [`sdp_certificate`] evaluates to bound the optimality gap.

pub mod sdp;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, ScenarioConfig};
use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eig, rank_of_values, trace_product, ComplexMatrix, EigDecomposition, HermitianMatrix, C64,
    DEFAULT_RANK_TOL,
};

pub use sdp::{SdpSettings, SdpSolution};

/// Optimal energy covariance of the fair beamforming problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySolution {
    /// `S_E*`, watts. Eigen-components below the rank tolerance are removed
    /// and their mass redistributed, so its rank is exactly `d_e` and its
    /// trace is exactly `p_e`.
    pub s_e_opt: HermitianMatrix,
    /// `Θ*` in joules with unit harvesting efficiency.
    pub theta_opt: f64,
    pub eig: EigDecomposition,
    /// Number of energy beams.
    pub d_e: usize,
    /// Relative duality gap from [`sdp_certificate`].
    pub duality_gap: f64,
    pub solver_iterations: usize,
    /// Dual multipliers `μ_k`, normalized so that `Σ α_k μ_k = 1`.
    pub dual_multipliers: Vec<f64>,
    /// Trace of the solver's covariance before rank cleanup, watts.
    pub raw_power: f64,
    /// Power budget the solution was computed for, watts.
    pub p_e: f64,
}

impl EnergySolution {
    /// Same solution for a different power budget; the problem is linear in `P_E`.
    pub fn scaled_to_power(&self, p_e: f64) -> Self {
        let r = p_e / self.p_e;
        Self {
            s_e_opt: self.s_e_opt.scale(r),
            theta_opt: self.theta_opt * r,
            eig: EigDecomposition {
                values: self.eig.values.iter().map(|v| v * r).collect(),
                vectors: self.eig.vectors.clone(),
            },
            raw_power: self.raw_power * r,
            p_e,
            ..self.clone()
        }
    }

    /// Energy beams `(γ_i, w_i)` with `γ_i > 0`, in schedule order.
    pub fn beams(&self) -> Vec<(f64, Vec<C64>)> {
        (0..self.d_e)
            .map(|i| (self.eig.values[i], self.eig.vector(i)))
            .collect()
    }
}

/// One sub-block of the single-beam scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubBlock {
    /// Sub-block length `t_i`, seconds.
    pub duration: f64,
    /// Unit-norm beam `w_i`.
    pub beam: Vec<C64>,
    /// `P_E w_i w_iᴴ`, watts.
    pub covariance: HermitianMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeShareSchedule {
    pub sub_blocks: Vec<SubBlock>,
    /// Block length `T`, seconds.
    pub t: f64,
    pub p_e: f64,
}

impl TimeShareSchedule {
    pub fn len(&self) -> usize {
        self.sub_blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sub_blocks.is_empty()
    }

    /// `(1/T) Σ t_i S_{E,i}`.
    pub fn average_covariance(&self) -> HermitianMatrix {
        let n = self.sub_blocks.first().map_or(0, |b| b.covariance.dim());
        let mut acc = ComplexMatrix::zeros(n, n);
        for b in &self.sub_blocks {
            acc = acc.add(&b.covariance.matrix().scale(b.duration / self.t));
        }
        HermitianMatrix::new(acc).expect("square by construction")
    }

    pub fn scaled_to_power(&self, p_e: f64) -> Self {
        let r = p_e / self.p_e;
        Self {
            sub_blocks: self
                .sub_blocks
                .iter()
                .map(|b| SubBlock {
                    duration: b.duration,
                    beam: b.beam.clone(),
                    covariance: b.covariance.scale(r),
                })
                .collect(),
            t: self.t,
            p_e,
        }
    }
}

/// `T·G_kᴴ G_k` for every receiver.
pub fn constraint_matrices(channels: &ChannelRealization, t: f64) -> Vec<HermitianMatrix> {
    channels.g.iter().map(|g| g.gram().scale(t)).collect()
}

fn check_gk(s_e: &HermitianMatrix, g_k: &ComplexMatrix) -> Result<()> {
    if g_k.cols() != s_e.dim() {
        return Err(Error::dims("harvested_energy", s_e.dim(), g_k.cols()));
    }
    Ok(())
}

/// `η T Re tr(G_kᴴ G_k S_E)`, joules.
pub fn harvested_energy(s_e: &HermitianMatrix, g_k: &ComplexMatrix, eta: f64, t: f64) -> Result<f64> {
    check_gk(s_e, g_k)?;
    Ok(eta * t * trace_product(&g_k.gram(), s_e)?)
}

/// Energy collected over all sub-blocks: `Σ_i η t_i Re tr(G_kᴴ G_k S_{E,i})`.
pub fn harvested_energy_schedule(schedule: &TimeShareSchedule, g_k: &ComplexMatrix, eta: f64) -> Result<f64> {
    let gram = g_k.gram();
    let mut total = 0.0;
    for b in &schedule.sub_blocks {
        check_gk(&b.covariance, g_k)?;
        total += eta * b.duration * trace_product(&gram, &b.covariance)?;
    }
    Ok(total)
}

/// Embeds a complex Hermitian `a` as `φ(a)/2` (row-major, `2n × 2n`).
fn embed_half(a: &HermitianMatrix, scale: f64) -> Vec<f64> {
    let n = a.dim();
    let m = 2 * n;
    let mut out = vec![0.0; m * m];
    let h = 0.5 * scale;
    for r in 0..n {
        for c in 0..n {
            let z = a[(r, c)];
            out[r * m + c] = h * z.re;
            out[(r + n) * m + c + n] = h * z.re;
            out[r * m + c + n] = -h * z.im;
            out[(r + n) * m + c] = h * z.im;
        }
    }
    out
}

/// Hermitian matrix represented by a (possibly unstructured) real symmetric `2n × 2n` block.
fn extract_hermitian(x: &[f64], n: usize) -> HermitianMatrix {
    let m = 2 * n;
    let s = ComplexMatrix::from_fn(n, n, |r, c| {
        let re = 0.5 * (x[r * m + c] + x[(r + n) * m + c + n]);
        let im = 0.5 * (x[(r + n) * m + c] - x[r * m + c + n]);
        C64::new(re, im)
    });
    HermitianMatrix::new(s).expect("square")
}

/// `Θ` achieved by a covariance: `min_k tr(A_k S)/α_k` over receivers with `α_k > 0`.
pub fn fair_objective(a: &[HermitianMatrix], alpha: &[f64], s_e: &HermitianMatrix) -> Result<f64> {
    let mut theta = f64::INFINITY;
    for (ak, &al) in a.iter().zip(alpha) {
        if al > 0.0 {
            theta = theta.min(trace_product(ak, s_e)? / al);
        }
    }
    Ok(theta)
}

/// Solves the fair energy beamforming problem with default solver settings
/// and the default rank tolerance.
pub fn solve_p1(channels: &ChannelRealization, config: &ScenarioConfig) -> Result<EnergySolution> {
    solve_p1_with(channels, config, &SdpSettings::default(), DEFAULT_RANK_TOL)
}

pub fn solve_p1_with(
    channels: &ChannelRealization,
    config: &ScenarioConfig,
    settings: &SdpSettings,
    rank_tol: f64,
) -> Result<EnergySolution> {
    let k = channels.g.len();
    let alpha = config.alpha_weights();
    if alpha.len() != k {
        return Err(Error::dims("solve_p1 (alpha)", k, alpha.len()));
    }
    let m_e = channels
        .g
        .first()
        .map(|g| g.cols())
        .ok_or_else(|| Error::DegenerateProblem("no energy receivers".into()))?;
    if channels.g.iter().any(|g| g.cols() != m_e) {
        return Err(Error::dims("solve_p1 (G_k columns)", m_e, "mixed"));
    }
    let a = constraint_matrices(channels, config.t);
    if a.iter().all(|ak| ak.matrix().is_zero()) {
        return Err(Error::DegenerateProblem("every energy channel is zero".into()));
    }
    if let Some(idx) = a
        .iter()
        .zip(&alpha)
        .position(|(ak, &al)| al > 0.0 && ak.matrix().is_zero())
    {
        return Err(Error::DegenerateProblem(format!(
            "receiver {idx} has a zero channel but a positive energy share"
        )));
    }

    // normalized frame: mean trace of A_k is 1, power budget is 1
    let scale = a.iter().map(|ak| ak.trace()).sum::<f64>() / k as f64;
    let n = 2 * m_e;
    let lp = k + 2; // Θ, s_1..s_K, s_0
    let mut a_sym = Vec::with_capacity(k + 1);
    let mut a_lp = Vec::with_capacity(k + 1);
    for (idx, ak) in a.iter().enumerate() {
        a_sym.push(embed_half(ak, 1.0 / scale));
        let mut row = vec![0.0; lp];
        row[0] = -alpha[idx];
        row[1 + idx] = -1.0;
        a_lp.push(row);
    }
    let mut power = vec![0.0; n * n];
    for i in 0..n {
        power[i * n + i] = 0.5;
    }
    a_sym.push(power);
    let mut row = vec![0.0; lp];
    row[k + 1] = 1.0;
    a_lp.push(row);
    let mut b = vec![0.0; k + 1];
    b[k] = 1.0;
    let mut c_lp = vec![0.0; lp];
    c_lp[0] = -1.0;

    let problem = sdp::SdpProblem {
        n,
        lp,
        c_sym: vec![0.0; n * n],
        c_lp,
        a_sym,
        a_lp,
        b,
    };
    let sol = sdp::solve_sdp(&problem, settings)?;

    let raw = extract_hermitian(&sol.x_sym, m_e).scale(config.p_e);
    let raw_power = raw.trace();
    let raw_eig = hermitian_eig(&raw)?;
    let d_e = rank_of_values(&raw_eig.values, rank_tol);

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..d_e).map(|i| (raw_eig.values[i], raw_eig.vector(i))).collect();
    pairs.sort_by(|(ga, wa), (gb, wb)| {
        gb.total_cmp(ga).then_with(|| {
            wa.iter()
                .zip(wb)
                .map(|(x, y)| x.re.total_cmp(&y.re))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let kept: f64 = pairs.iter().map(|(g, _)| g).sum();
    let mut values = vec![0.0; m_e];
    let mut vectors = ComplexMatrix::zeros(m_e, m_e);
    for (i, (g, w)) in pairs.iter().enumerate() {
        values[i] = g * config.p_e / kept;
        for (r, z) in w.iter().enumerate() {
            vectors[(r, i)] = *z;
        }
    }
    for i in d_e..m_e {
        for r in 0..m_e {
            vectors[(r, i)] = raw_eig.vectors[(r, i)];
        }
    }
    let eig = EigDecomposition { values, vectors };
    let s_e_opt = eig.reconstruct();
    let theta_opt = fair_objective(&a, &alpha, &s_e_opt)?;

    let mut mu: Vec<f64> = sol.y[..k].iter().map(|&v| v.max(0.0)).collect();
    let norm: f64 = mu.iter().zip(&alpha).map(|(m, a)| m * a).sum();
    if norm > 0.0 {
        mu.iter_mut().for_each(|m| *m /= norm);
    }

    let mut solution = EnergySolution {
        s_e_opt,
        theta_opt,
        eig,
        d_e,
        duality_gap: f64::INFINITY,
        solver_iterations: sol.iterations,
        dual_multipliers: mu,
        raw_power,
        p_e: config.p_e,
    };
    solution.duality_gap = sdp_certificate(&solution, channels, config)?;
    if !(solution.duality_gap <= 1e-6) {
        return Err(Error::SolverFailure {
            iterations: sol.iterations,
            gap: solution.duality_gap,
            primal_infeasibility: sol.primal_infeasibility,
            dual_infeasibility: sol.dual_infeasibility,
            last_objective: sol.primal_objective,
        });
    }
    Ok(solution)
}

/// Relative duality gap `(P_E·λ_max(Σ μ_k A_k) − Θ*)/Θ*` of a candidate
/// solution, using its stored multipliers. Non-negative up to rounding for
/// any feasible primal/dual pair.
pub fn sdp_certificate(
    solution: &EnergySolution,
    channels: &ChannelRealization,
    config: &ScenarioConfig,
) -> Result<f64> {
    let a = constraint_matrices(channels, config.t);
    if solution.dual_multipliers.len() != a.len() {
        return Err(Error::dims("sdp_certificate", a.len(), solution.dual_multipliers.len()));
    }
    let n = a.first().map_or(0, |x| x.dim());
    let mut weighted = HermitianMatrix::zeros(n);
    for (ak, &m) in a.iter().zip(&solution.dual_multipliers) {
        weighted = weighted.add(&ak.scale(m))?;
    }
    let lmax = hermitian_eig(&weighted)?.values.first().copied().unwrap_or(0.0);
    Ok((solution.p_e * lmax - solution.theta_opt) / solution.theta_opt)
}

/// Time-sharing schedule over the energy beams of `solution`:
/// `t_i = γ_i T / Σ_j γ_j` and `S_{E,i} = P_E w_i w_iᴴ`.
pub fn build_schedule(solution: &EnergySolution, config: &ScenarioConfig) -> Result<TimeShareSchedule> {
    if solution.d_e == 0 {
        return Err(Error::EmptySchedule);
    }
    let beams = solution.beams();
    let total: f64 = beams.iter().map(|(g, _)| g).sum();
    let sub_blocks = beams
        .into_iter()
        .map(|(g, w)| SubBlock {
            duration: g * config.t / total,
            covariance: HermitianMatrix::outer(&w, solution.p_e),
            beam: w,
        })
        .collect();
    Ok(TimeShareSchedule {
        sub_blocks,
        t: config.t,
        p_e: solution.p_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channels, EnergyProfile};
    use crate::numerics::{numerical_rank, C64};

    fn realization(g: Vec<ComplexMatrix>) -> ChannelRealization {
        ChannelRealization {
            g,
            f: ComplexMatrix::identity(1),
            h: ComplexMatrix::identity(1),
            seed_used: 0,
        }
    }

    fn cfg(k: usize, m_e: usize) -> ScenarioConfig {
        ScenarioConfig {
            k,
            m_e,
            p_e: 1.0,
            t: 1.0,
            eta: 1.0,
            ..Default::default()
        }
    }

    /// Square `G` with `Gᴴ G = diag(d)`.
    fn diag_channel(d: &[f64]) -> ComplexMatrix {
        let n = d.len();
        ComplexMatrix::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(d[r].sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn single_receiver_matches_dominant_eigenvector() {
        let g = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(1.0, -0.5),
            ],
        )
        .unwrap();
        let ch = realization(vec![g.clone()]);
        let sol = solve_p1(&ch, &cfg(1, 2)).unwrap();
        let lmax = hermitian_eig(&g.gram()).unwrap().values[0];
        assert!((sol.theta_opt - lmax).abs() < 1e-7 * lmax);
        assert_eq!(sol.d_e, 1);
        assert!(sol.duality_gap.abs() < 1e-9);
        assert!((sol.dual_multipliers[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_orthogonal_receivers_split_power() {
        let ch = realization(vec![diag_channel(&[1.0, 0.0]), diag_channel(&[0.0, 1.0])]);
        let sol = solve_p1(&ch, &cfg(2, 2)).unwrap();
        assert!((sol.theta_opt - 1.0).abs() < 1e-7);
        assert_eq!(sol.d_e, 2);
        let expect = HermitianMatrix::from_real_diagonal(&[0.5, 0.5]);
        assert!(sol.s_e_opt.matrix().sub(expect.matrix()).frobenius_norm() < 1e-7);
        // hand dual: μ = (1, 1)
        assert!((sol.dual_multipliers[0] - 1.0).abs() < 1e-6);
        assert!((sol.dual_multipliers[1] - 1.0).abs() < 1e-6);
        assert!(sol.duality_gap.abs() < 1e-9);
    }

    #[test]
    fn duplicate_receivers_double_theta() {
        let g = ComplexMatrix::from_vec(1, 2, vec![C64::new(1.0, 0.0), C64::new(0.3, 0.4)]).unwrap();
        let one = solve_p1(&realization(vec![g.clone()]), &cfg(1, 2)).unwrap();
        let two = solve_p1(&realization(vec![g.clone(), g]), &cfg(2, 2)).unwrap();
        assert!((two.theta_opt - 2.0 * one.theta_opt).abs() < 1e-7 * one.theta_opt);
        assert!(two.s_e_opt.matrix().sub(one.s_e_opt.matrix()).frobenius_norm() < 1e-6);
    }

    #[test]
    fn suboptimal_primal_has_positive_gap() {
        let ch = sample_channels(&cfg(5, 4), 0).unwrap();
        let config = cfg(5, 4);
        let sol = solve_p1(&ch, &config).unwrap();
        let a = constraint_matrices(&ch, 1.0);
        let iso = HermitianMatrix::identity(4).scale(0.25);
        let worse = EnergySolution {
            theta_opt: fair_objective(&a, &config.alpha_weights(), &iso).unwrap(),
            s_e_opt: iso,
            ..sol
        };
        assert!(sdp_certificate(&worse, &ch, &config).unwrap() > 1e-3);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let zero = ComplexMatrix::zeros(1, 2);
        assert!(matches!(
            solve_p1(&realization(vec![zero.clone(), zero.clone()]), &cfg(2, 2)),
            Err(Error::DegenerateProblem(_))
        ));
        let g = ComplexMatrix::from_vec(1, 2, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(matches!(
            solve_p1(&realization(vec![g.clone(), zero.clone()]), &cfg(2, 2)),
            Err(Error::DegenerateProblem(_))
        ));
        // a zero channel with zero energy share is fine
        let skewed = ScenarioConfig {
            alpha: EnergyProfile::Weights(vec![1.0, 0.0]),
            ..cfg(2, 2)
        };
        assert!(solve_p1(&realization(vec![g, zero]), &skewed).is_ok());
    }

    #[test]
    fn harvested_energy_examples() {
        let g = diag_channel(&[1.0, 1.0, 1.0]);
        assert_eq!(harvested_energy(&HermitianMatrix::zeros(3), &g, 1.0, 1.0).unwrap(), 0.0);
        // row selector picking antennas 0 and 2
        let sel = ComplexMatrix::from_fn(2, 3, |r, c| {
            if (r, c) == (0, 0) || (r, c) == (1, 2) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let s = HermitianMatrix::from_real_diagonal(&[0.1, 0.2, 0.3]);
        assert!((harvested_energy(&s, &sel, 1.0, 1.0).unwrap() - 0.4).abs() < 1e-15);
        assert!(harvested_energy(&HermitianMatrix::zeros(2), &sel, 1.0, 1.0).is_err());
    }

    #[test]
    fn harvested_energy_matches_naive_trace() {
        let mut r = crate::numerics::test_util::rng(8);
        let g = crate::numerics::test_util::random_matrix(&mut r, 2, 4);
        let s = crate::numerics::test_util::random_psd(&mut r, 4, 3);
        let mut naive = C64::new(0.0, 0.0);
        let ghg = g.adjoint().matmul(&g);
        for i in 0..4 {
            for j in 0..4 {
                naive += ghg[(i, j)] * s[(j, i)];
            }
        }
        let q = harvested_energy(&s, &g, 1.0, 1.0).unwrap();
        assert!((q - naive.re).abs() < 1e-12);
    }

    #[test]
    fn schedule_examples() {
        let w = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let config = ScenarioConfig { t: 2.0, ..cfg(1, 2) };
        let eig = hermitian_eig(&HermitianMatrix::outer(&w, 3.0)).unwrap();
        let sol = EnergySolution {
            s_e_opt: HermitianMatrix::outer(&w, 3.0),
            theta_opt: 1.0,
            eig,
            d_e: 1,
            duality_gap: 0.0,
            solver_iterations: 0,
            dual_multipliers: vec![1.0],
            raw_power: 3.0,
            p_e: 3.0,
        };
        let sched = build_schedule(&sol, &config).unwrap();
        assert_eq!(sched.len(), 1);
        assert_eq!(sched.sub_blocks[0].duration, 2.0);
        assert!((sched.sub_blocks[0].covariance.trace() - 3.0).abs() < 1e-14);

        let d = HermitianMatrix::from_real_diagonal(&[0.5, 0.5]);
        let sol2 = EnergySolution {
            eig: hermitian_eig(&d).unwrap(),
            s_e_opt: d,
            d_e: 2,
            p_e: 1.0,
            raw_power: 1.0,
            dual_multipliers: vec![1.0, 1.0],
            ..sol.clone()
        };
        let sched = build_schedule(
            &sol2,
            &ScenarioConfig {
                t: 1.0,
                ..config.clone()
            },
        )
        .unwrap();
        assert_eq!(sched.len(), 2);
        assert!(sched.sub_blocks.iter().all(|b| (b.duration - 0.5).abs() < 1e-15));

        let empty = EnergySolution { d_e: 0, ..sol };
        assert!(matches!(build_schedule(&empty, &config), Err(Error::EmptySchedule)));
    }

    #[test]
    fn random_instance_properties() {
        let config = ScenarioConfig {
            k: 20,
            ..Default::default()
        };
        for trial in 0..10 {
            let ch = sample_channels(&config, trial).unwrap();
            let sol = solve_p1(&ch, &config).unwrap();
            assert!(sol.duality_gap <= 1e-6 && sol.duality_gap >= -1e-9);
            assert!((sol.raw_power - config.p_e).abs() <= 1e-6 * config.p_e);
            assert_eq!(numerical_rank(&sol.s_e_opt, DEFAULT_RANK_TOL).unwrap(), sol.d_e);
            let a = constraint_matrices(&ch, config.t);
            for (ak, al) in a.iter().zip(config.alpha_weights()) {
                let e = trace_product(ak, &sol.s_e_opt).unwrap();
                assert!(e >= al * sol.theta_opt - 1e-9 * sol.theta_opt);
            }
            let sched = build_schedule(&sol, &config).unwrap();
            let total: f64 = sched.sub_blocks.iter().map(|b| b.duration).sum();
            assert!((total - config.t).abs() <= 1e-9 * config.t);
            let avg = sched.average_covariance();
            let err = avg.matrix().sub(sol.s_e_opt.matrix()).frobenius_norm();
            assert!(err <= 1e-8 * sol.s_e_opt.frobenius_norm());
            for g in &ch.g {
                let q = harvested_energy(&sol.s_e_opt, g, 1.0, config.t).unwrap();
                let qs = harvested_energy_schedule(&sched, g, 1.0).unwrap();
                assert!((q - qs).abs() <= 1e-9 * q);
                let half = harvested_energy_schedule(&sched, g, 0.5).unwrap();
                assert_eq!(half, 0.5 * qs);
            }
            // power doubling doubles Θ*
            let doubled = solve_p1(
                &ch,
                &ScenarioConfig {
                    p_e: 2.0 * config.p_e,
                    ..config.clone()
                },
            )
            .unwrap();
            assert!((doubled.theta_opt / sol.theta_opt - 2.0).abs() < 1e-6);
        }
    }
}
