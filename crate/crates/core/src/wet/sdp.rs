//! Small dense primal-dual interior-point solver for SDPs with one real
//! symmetric block and one nonnegative (diagonal) block:
//!
//! ```text
//! min  <C_s, X> + c_l·x      s.t.  <A_i, X> + a_i·x = b_i,   X ⪰ 0, x ≥ 0
//! max  b·y                   s.t.  Σ y_i A_i + Z = C_s,  Σ y_i a_i + z = c_l,  Z ⪰ 0, z ≥ 0
//! ```
//!
//! Search directions are HKM (`dX = sym((R_c − X dZ) Z⁻¹)`), combined with a
//! Mehrotra predictor-corrector and a fraction-to-the-boundary step rule.
//! Sizes are tiny (block ≤ 16, a few dozen constraints), so everything is
//! dense and allocation is not a concern.

use log::debug;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix, HermitianMatrix, C64};

#[derive(Clone, Debug)]
pub struct SdpSettings {
    pub max_iterations: usize,
    /// Relative duality gap target.
    pub gap_tol: f64,
    /// Relative primal and dual infeasibility target.
    pub feas_tol: f64,
    /// Fraction-to-the-boundary factor.
    pub step_fraction: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            step_fraction: 0.98,
        }
    }
}

/// Problem data. Symmetric matrices are dense row-major `n × n`.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub n: usize,
    pub lp: usize,
    pub c_sym: Vec<f64>,
    pub c_lp: Vec<f64>,
    pub a_sym: Vec<Vec<f64>>,
    pub a_lp: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x_sym: Vec<f64>,
    pub x_lp: Vec<f64>,
    pub y: Vec<f64>,
    pub z_sym: Vec<f64>,
    pub z_lp: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

// ---- small dense real kernels -------------------------------------------

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `<A, B>` for symmetric `A` and arbitrary `B`, i.e. `tr(A B)`.
fn trace_prod(a: &[f64], b: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[i * n + j] * b[j * n + i];
        }
    }
    s
}

fn symmetrize(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lower Cholesky factor, `None` if not numerically positive definite.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L L^T x = rhs` in place.
fn cholesky_solve(l: &[f64], n: usize, rhs: &mut [f64]) {
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i * n + k] * rhs[k];
        }
        rhs[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in i + 1..n {
            s -= l[k * n + i] * rhs[k];
        }
        rhs[i] = s / l[i * n + i];
    }
}

fn spd_inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let l = cholesky(a, n)?;
    let mut inv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|x| *x = 0.0);
        col[j] = 1.0;
        cholesky_solve(&l, n, &mut col);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    symmetrize(&mut inv, n);
    Some(inv)
}

fn min_eigenvalue(a: &[f64], n: usize) -> f64 {
    let m = ComplexMatrix::from_fn(n, n, |r, c| C64::new(a[r * n + c], 0.0));
    let h = HermitianMatrix::new(m).expect("square");
    match hermitian_eig(&h) {
        Ok(e) => e.values.last().copied().unwrap_or(0.0),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Largest `α` with `X + α dX ⪰ 0`, given the Cholesky factor of `X`.
fn max_step_sym(chol_x: &[f64], dx: &[f64], n: usize) -> f64 {
    // W = L⁻¹ dX L⁻ᵀ; step bound is −1/λ_min(W).
    let mut y = dx.to_vec();
    // columns of L⁻¹ dX
    for c in 0..n {
        for i in 0..n {
            let mut s = y[i * n + c];
            for k in 0..i {
                s -= chol_x[i * n + k] * y[k * n + c];
            }
            y[i * n + c] = s / chol_x[i * n + i];
        }
    }
    // W = L⁻¹ (L⁻¹ dX)ᵀ
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = y[j * n + i];
        }
    }
    for c in 0..n {
        for i in 0..n {
            let mut s = w[i * n + c];
            for k in 0..i {
                s -= chol_x[i * n + k] * w[k * n + c];
            }
            w[i * n + c] = s / chol_x[i * n + i];
        }
    }
    symmetrize(&mut w, n);
    let lmin = min_eigenvalue(&w, n);
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn max_step_lp(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&v, &d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

// ---- solver ---------------------------------------------------------------

struct Direction {
    dx_sym: Vec<f64>,
    dx_lp: Vec<f64>,
    dy: Vec<f64>,
    dz_sym: Vec<f64>,
    dz_lp: Vec<f64>,
}

impl SdpProblem {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn validate(&self) -> Result<()> {
        let (n, lp, m) = (self.n, self.lp, self.m());
        let ok = self.c_sym.len() == n * n
            && self.c_lp.len() == lp
            && self.a_sym.len() == m
            && self.a_lp.len() == m
            && self.a_sym.iter().all(|a| a.len() == n * n)
            && self.a_lp.iter().all(|a| a.len() == lp);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("inconsistent SDP problem dimensions".into()))
        }
    }

    /// `A(X, x)`.
    fn apply(&self, x_sym: &[f64], x_lp: &[f64]) -> Vec<f64> {
        (0..self.m())
            .map(|i| trace_prod(&self.a_sym[i], x_sym, self.n) + inner(&self.a_lp[i], x_lp))
            .collect()
    }

    /// `Σ y_i (A_i, a_i)`.
    fn adjoint(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut s = vec![0.0; self.n * self.n];
        let mut l = vec![0.0; self.lp];
        for (i, &yi) in y.iter().enumerate() {
            for (d, a) in s.iter_mut().zip(&self.a_sym[i]) {
                *d += yi * a;
            }
            for (d, a) in l.iter_mut().zip(&self.a_lp[i]) {
                *d += yi * a;
            }
        }
        (s, l)
    }
}

/// Runs the interior-point method from the standard identity start.
pub fn solve_sdp(problem: &SdpProblem, settings: &SdpSettings) -> Result<SdpSolution> {
    problem.validate()?;
    let n = problem.n;
    let lp = problem.lp;
    let m = problem.m();
    let nu = (n + lp) as f64;

    let mut x_sym = vec![0.0; n * n];
    let mut z_sym = vec![0.0; n * n];
    for i in 0..n {
        x_sym[i * n + i] = 1.0;
        z_sym[i * n + i] = 1.0;
    }
    let mut x_lp = vec![1.0; lp];
    let mut z_lp = vec![1.0; lp];
    let mut y = vec![0.0; m];

    let b_norm = norm(&problem.b);
    let c_norm = (norm(&problem.c_sym).powi(2) + norm(&problem.c_lp).powi(2)).sqrt();

    let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::NAN);
    for iter in 0..=settings.max_iterations {
        // residuals
        let ax = problem.apply(&x_sym, &x_lp);
        let rp: Vec<f64> = problem.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let (aty_s, aty_l) = problem.adjoint(&y);
        let rd_sym: Vec<f64> = (0..n * n).map(|i| problem.c_sym[i] - aty_s[i] - z_sym[i]).collect();
        let rd_lp: Vec<f64> = (0..lp).map(|i| problem.c_lp[i] - aty_l[i] - z_lp[i]).collect();

        let pobj = inner(&problem.c_sym, &x_sym) + inner(&problem.c_lp, &x_lp);
        let dobj = inner(&problem.b, &y);
        let xz = inner(&x_sym, &z_sym) + inner(&x_lp, &z_lp);
        let scale = 1.0_f64.max(pobj.abs()).max(dobj.abs());
        let gap = xz.max((pobj - dobj).abs()) / scale;
        let pinf = norm(&rp) / (1.0 + b_norm);
        let dinf = (norm(&rd_sym).powi(2) + norm(&rd_lp).powi(2)).sqrt() / (1.0 + c_norm);
        last = (gap, pinf, dinf, pobj);

        debug!("sdp iter={iter} pobj={pobj:.12e} dobj={dobj:.12e} gap={gap:.3e} pinf={pinf:.3e} dinf={dinf:.3e}");

        if gap <= settings.gap_tol && pinf <= settings.feas_tol && dinf <= settings.feas_tol {
            return Ok(SdpSolution {
                x_sym,
                x_lp,
                y,
                z_sym,
                z_lp,
                primal_objective: pobj,
                dual_objective: dobj,
                gap,
                primal_infeasibility: pinf,
                dual_infeasibility: dinf,
                iterations: iter,
            });
        }
        if iter == settings.max_iterations || !gap.is_finite() {
            break;
        }

        let mu = xz / nu;
        let z_inv = match spd_inverse(&z_sym, n) {
            Some(zi) => zi,
            None => break,
        };

        // Schur complement M_ij = tr(A_i X A_j Z⁻¹) + Σ a_il x_l/z_l a_jl
        let mut schur = vec![0.0; m * m];
        for j in 0..m {
            let t = matmul(&matmul(&x_sym, &problem.a_sym[j], n), &z_inv, n);
            for i in 0..m {
                let mut v = trace_prod(&problem.a_sym[i], &t, n);
                for l in 0..lp {
                    v += problem.a_lp[i][l] * x_lp[l] / z_lp[l] * problem.a_lp[j][l];
                }
                schur[i * m + j] = v;
            }
        }
        symmetrize(&mut schur, m);
        let schur_chol = match cholesky(&schur, m) {
            Some(l) => l,
            None => {
                // Tiny diagonal shift; the system is only ill-conditioned near the end.
                let shift = 1e-14 * (0..m).map(|i| schur[i * m + i].abs()).fold(0.0, f64::max);
                let mut shifted = schur.clone();
                for i in 0..m {
                    shifted[i * m + i] += shift.max(1e-300);
                }
                match cholesky(&shifted, m) {
                    Some(l) => l,
                    None => break,
                }
            }
        };

        let xz_sym = matmul(&x_sym, &z_sym, n);
        let direction = |rc_sym: &[f64], rc_lp: &[f64]| -> Direction {
            // G = (R_c − X R_d) Z⁻¹
            let x_rd = matmul(&x_sym, &rd_sym, n);
            let diff: Vec<f64> = rc_sym.iter().zip(&x_rd).map(|(a, b)| a - b).collect();
            let g_sym = matmul(&diff, &z_inv, n);
            let g_lp: Vec<f64> = (0..lp).map(|l| (rc_lp[l] - x_lp[l] * rd_lp[l]) / z_lp[l]).collect();
            let mut dy: Vec<f64> = (0..m)
                .map(|i| rp[i] - trace_prod(&problem.a_sym[i], &g_sym, n) - inner(&problem.a_lp[i], &g_lp))
                .collect();
            cholesky_solve(&schur_chol, m, &mut dy);
            let (ady_s, ady_l) = problem.adjoint(&dy);
            let dz_sym: Vec<f64> = (0..n * n).map(|i| rd_sym[i] - ady_s[i]).collect();
            let dz_lp: Vec<f64> = (0..lp).map(|i| rd_lp[i] - ady_l[i]).collect();
            let x_dz = matmul(&x_sym, &dz_sym, n);
            let tmp: Vec<f64> = rc_sym.iter().zip(&x_dz).map(|(a, b)| a - b).collect();
            let mut dx_sym = matmul(&tmp, &z_inv, n);
            symmetrize(&mut dx_sym, n);
            let dx_lp: Vec<f64> = (0..lp).map(|l| (rc_lp[l] - x_lp[l] * dz_lp[l]) / z_lp[l]).collect();
            Direction {
                dx_sym,
                dx_lp,
                dy,
                dz_sym,
                dz_lp,
            }
        };

        let chol_x = match cholesky(&x_sym, n) {
            Some(l) => l,
            None => break,
        };
        let chol_z = match cholesky(&z_sym, n) {
            Some(l) => l,
            None => break,
        };
        let step_lengths = |d: &Direction| -> (f64, f64) {
            let ap = max_step_sym(&chol_x, &d.dx_sym, n).min(max_step_lp(&x_lp, &d.dx_lp));
            let ad = max_step_sym(&chol_z, &d.dz_sym, n).min(max_step_lp(&z_lp, &d.dz_lp));
            (ap, ad)
        };

        // predictor
        let rc_aff: Vec<f64> = xz_sym.iter().map(|v| -v).collect();
        let rc_aff_lp: Vec<f64> = (0..lp).map(|l| -x_lp[l] * z_lp[l]).collect();
        let aff = direction(&rc_aff, &rc_aff_lp);
        let (ap, ad) = step_lengths(&aff);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut mu_aff = 0.0;
        {
            let xa: Vec<f64> = (0..n * n).map(|i| x_sym[i] + ap * aff.dx_sym[i]).collect();
            let za: Vec<f64> = (0..n * n).map(|i| z_sym[i] + ad * aff.dz_sym[i]).collect();
            mu_aff += inner(&xa, &za);
            for l in 0..lp {
                mu_aff += (x_lp[l] + ap * aff.dx_lp[l]) * (z_lp[l] + ad * aff.dz_lp[l]);
            }
            mu_aff /= nu;
        }
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let second = matmul(&aff.dx_sym, &aff.dz_sym, n);
        let mut rc = vec![0.0; n * n];
        for i in 0..n * n {
            rc[i] = -xz_sym[i] - second[i];
        }
        for i in 0..n {
            rc[i * n + i] += sigma * mu;
        }
        let rc_lp: Vec<f64> = (0..lp)
            .map(|l| sigma * mu - x_lp[l] * z_lp[l] - aff.dx_lp[l] * aff.dz_lp[l])
            .collect();
        let d = direction(&rc, &rc_lp);
        let (ap, ad) = step_lengths(&d);
        let ap = (settings.step_fraction * ap).min(1.0);
        let ad = (settings.step_fraction * ad).min(1.0);
        if !(ap > 0.0 && ad > 0.0) || !ap.is_finite() || !ad.is_finite() {
            break;
        }

        for i in 0..n * n {
            x_sym[i] += ap * d.dx_sym[i];
            z_sym[i] += ad * d.dz_sym[i];
        }
        for l in 0..lp {
            x_lp[l] += ap * d.dx_lp[l];
            z_lp[l] += ad * d.dz_lp[l];
        }
        for i in 0..m {
            y[i] += ad * d.dy[i];
        }
        symmetrize(&mut x_sym, n);
        symmetrize(&mut z_sym, n);
    }

    Err(Error::SolverFailure {
        iterations: settings.max_iterations,
        gap: last.0,
        primal_infeasibility: last.1,
        dual_infeasibility: last.2,
        last_objective: last.3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// min X + x1 + 2 x2  s.t. x1 + x2 = 1 with a decoupled 1×1 block → 1.
    #[test]
    fn solves_tiny_lp() {
        let p = SdpProblem {
            n: 1,
            lp: 2,
            c_sym: vec![1.0],
            c_lp: vec![1.0, 2.0],
            a_sym: vec![vec![0.0]],
            a_lp: vec![vec![1.0, 1.0]],
            b: vec![1.0],
        };
        let s = solve_sdp(&p, &SdpSettings::default()).unwrap();
        assert!((s.primal_objective - 1.0).abs() < 1e-7);
        assert!((s.x_lp[0] - 1.0).abs() < 1e-7);
    }

    /// min <C, X> s.t. tr X = 1, X ⪰ 0 → λ_min(C).
    #[test]
    fn min_eigenvalue_sdp() {
        let c = vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        let p = SdpProblem {
            n: 3,
            lp: 0,
            c_sym: c.clone(),
            c_lp: vec![],
            a_sym: vec![vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]],
            a_lp: vec![vec![]],
            b: vec![1.0],
        };
        let s = solve_sdp(&p, &SdpSettings::default()).unwrap();
        let lmin = min_eigenvalue(&c, 3);
        assert!(
            (s.primal_objective - lmin).abs() < 1e-7,
            "{} vs {lmin}",
            s.primal_objective
        );
        assert!((s.dual_objective - lmin).abs() < 1e-7);
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let p = SdpProblem {
            n: 2,
            lp: 0,
            c_sym: vec![0.0; 3],
            c_lp: vec![],
            a_sym: vec![],
            a_lp: vec![],
            b: vec![],
        };
        assert!(solve_sdp(&p, &SdpSettings::default()).is_err());
    }

    #[test]
    fn reports_failure_when_budget_exhausted() {
        let c = vec![2.0, 1.0, 1.0, 3.0];
        let p = SdpProblem {
            n: 2,
            lp: 0,
            c_sym: c,
            c_lp: vec![],
            a_sym: vec![vec![1.0, 0.0, 0.0, 1.0]],
            a_lp: vec![vec![]],
            b: vec![1.0],
        };
        let settings = SdpSettings {
            max_iterations: 2,
            ..Default::default()
        };
        assert!(matches!(solve_sdp(&p, &settings), Err(Error::SolverFailure { .. })));
    }

    #[test]
    fn step_bounds() {
        assert_eq!(max_step_lp(&[1.0, 2.0], &[-0.5, 1.0]), 2.0);
        assert_eq!(max_step_lp(&[1.0], &[1.0]), f64::INFINITY);
        let l = cholesky(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        // I + α diag(-2, 1) loses definiteness at α = 0.5
        assert!((max_step_sym(&l, &[-2.0, 0.0, 0.0, 1.0], 2) - 0.5).abs() < 1e-14);
    }
}
