//! Slow reference implementations used to cross-check the fast solvers.
//!
//! None of these share code paths with the optimizers they check: the
//! energy problem is searched directly over the Bloch ball of 2×2 density
//! matrices, water-filling over a 1-D grid, and the rate through LU
//! determinants instead of Cholesky.

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, psd_inverse_sqrt, ComplexMatrix, HermitianMatrix, C64};

/// `Θ` of the Bloch-ball point `r` for two-antenna constraint matrices,
/// with `S = (P/2)(I + r·σ)`.
fn bloch_theta(coeffs: &[(f64, [f64; 3], f64)], p: f64, r: [f64; 3]) -> f64 {
    coeffs
        .iter()
        .map(|(tr, v, alpha)| 0.5 * p * (tr + v[0] * r[0] + v[1] * r[1] + v[2] * r[2]) / alpha)
        .fold(f64::INFINITY, f64::min)
}

fn clamp_to_ball(r: [f64; 3]) -> [f64; 3] {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if n > 1.0 {
        [r[0] / n, r[1] / n, r[2] / n]
    } else {
        r
    }
}

/// Brute-force optimum of `max_S min_k tr(A_k S)/α_k` over 2×2 PSD `S` with
/// `tr S = P`.
///
/// Every such `S` is `(P/2)(I + x σ_x + y σ_y + z σ_z)` with `|r| ≤ 1`, and
/// `tr(A σ_x) = 2 Re a₁₂`, `tr(A σ_y) = −2 Im a₁₂`, `tr(A σ_z) = a₁₁ − a₂₂`.
/// A spherical grid of `resolution` points per axis is followed by a
/// shrinking lattice search from the best grid point. Lattice moves leave
/// the axes, so they follow the ridges where two receivers tie.
pub fn p1_bloch_search(a: &[HermitianMatrix], alpha: &[f64], p: f64, resolution: usize) -> Result<f64> {
    if a.len() != alpha.len() {
        return Err(Error::dims("p1_bloch_search", a.len(), alpha.len()));
    }
    if a.iter().any(|ak| ak.dim() != 2) {
        return Err(Error::InvalidInput("the Bloch-ball oracle needs 2×2 matrices".into()));
    }
    let coeffs: Vec<(f64, [f64; 3], f64)> = a
        .iter()
        .zip(alpha)
        .filter(|(_, &al)| al > 0.0)
        .map(|(ak, &al)| {
            let a12 = ak[(0, 1)];
            (
                ak.trace(),
                [2.0 * a12.re, -2.0 * a12.im, ak[(0, 0)].re - ak[(1, 1)].re],
                al,
            )
        })
        .collect();
    if coeffs.is_empty() {
        return Err(Error::InvalidInput("no receiver with a positive share".into()));
    }

    let n = resolution.max(4);
    let mut best = (bloch_theta(&coeffs, p, [0.0; 3]), [0.0; 3]);
    for ir in 1..=n {
        let rad = ir as f64 / n as f64;
        for it in 0..=n {
            let theta = std::f64::consts::PI * it as f64 / n as f64;
            for ip in 0..2 * n {
                let phi = std::f64::consts::PI * ip as f64 / n as f64;
                let r = [
                    rad * theta.sin() * phi.cos(),
                    rad * theta.sin() * phi.sin(),
                    rad * theta.cos(),
                ];
                let v = bloch_theta(&coeffs, p, r);
                if v > best.0 {
                    best = (v, r);
                }
            }
        }
    }

    // zoom: a 9×9×9 lattice around the incumbent, projected onto the ball,
    // halving the spacing whenever it brings no improvement
    let mut h = 1.0 / n as f64;
    while h > 1e-11 {
        let mut improved = false;
        let centre = best.1;
        for i in -4..=4 {
            for j in -4..=4 {
                for l in -4..=4 {
                    let d = [i as f64, j as f64, l as f64];
                    let r = clamp_to_ball([
                        centre[0] + d[0] * h / 4.0,
                        centre[1] + d[1] * h / 4.0,
                        centre[2] + d[2] * h / 4.0,
                    ]);
                    let v = bloch_theta(&coeffs, p, r);
                    if v > best.0 {
                        best = (v, r);
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best.0)
}

/// Two-stream water-filling by maximizing `log2(1+g₁p) + log2(1+g₂(P−p))`
/// over a uniform grid on `[0, P]`, then golden-section refinement between
/// the grid neighbours of the best point. Returns `(p₁, p₂)`.
pub fn waterfill_two_grid(g1: f64, g2: f64, p: f64, grid: usize) -> (f64, f64) {
    let f = |x: f64| (1.0 + g1 * x).log2() + (1.0 + g2 * (p - x)).log2();
    let n = grid.max(2);
    let h = p / n as f64;
    let best = (0..=n)
        .map(|i| i as f64 * h)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("non-empty grid");
    let (mut lo, mut hi) = ((best - h).max(0.0), (best + h).min(p));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - ratio * (hi - lo);
        let m2 = lo + ratio * (hi - lo);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let x = 0.5 * (lo + hi);
    // the optimum may sit on an end point
    let x = [0.0, x, p]
        .into_iter()
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("three candidates");
    (x, p - x)
}

/// `ln |det a|` through Gaussian elimination with partial pivoting.
pub fn lu_log_abs_det(a: &ComplexMatrix) -> Result<f64> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::dims("lu_log_abs_det", n, a.cols()));
    }
    let mut m: Vec<C64> = a.data().to_vec();
    let mut acc = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i * n + col].norm().total_cmp(&m[j * n + col].norm()))
            .expect("non-empty range");
        let pv = m[piv * n + col];
        if pv.norm() == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if piv != col {
            for c in 0..n {
                m.swap(piv * n + c, col * n + c);
            }
        }
        acc += pv.norm().ln();
        for r in col + 1..n {
            let factor = m[r * n + col] / pv;
            for c in col..n {
                let v = m[col * n + c];
                m[r * n + c] -= factor * v;
            }
        }
    }
    Ok(acc)
}

/// Rate as `log2 |det(Q + H S_I Hᴴ)| − log2 |det Q|` with LU determinants.
pub fn rate_lu(
    s_e: &HermitianMatrix,
    s_i: &HermitianMatrix,
    f: &ComplexMatrix,
    h: &ComplexMatrix,
    sigma2: f64,
) -> Result<f64> {
    let q = f.sandwich(s_e)?.add_identity(sigma2);
    let total = q.add(&h.sandwich(s_i)?)?;
    Ok((lu_log_abs_det(total.matrix())? - lu_log_abs_det(q.matrix())?) / std::f64::consts::LN_2)
}

/// Rate as `Σ log2(1 + λ_j)` over the eigenvalues of `W H S_I Hᴴ W`, with
/// `W = Q^{-1/2}`.
pub fn rate_whitened_eig(
    s_e: &HermitianMatrix,
    s_i: &HermitianMatrix,
    f: &ComplexMatrix,
    h: &ComplexMatrix,
    sigma2: f64,
) -> Result<f64> {
    let q = f.sandwich(s_e)?.add_identity(sigma2);
    let w = psd_inverse_sqrt(&q)?;
    let m = w.matrix().matmul(h).sandwich(s_i)?;
    Ok(hermitian_eig(&m)?
        .values
        .iter()
        .map(|l| (1.0 + l.max(0.0)).log2())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::logdet_hpd;
    use crate::numerics::test_util::{random_matrix, random_psd, rng};

    #[test]
    fn bloch_search_known_cases() {
        // single receiver: Θ = P λ_max
        let a = HermitianMatrix::from_real_diagonal(&[3.0, 1.0]);
        let th = p1_bloch_search(&[a], &[1.0], 2.0, 24).unwrap();
        assert!((th - 6.0).abs() < 1e-9);
        // orthogonal receivers with equal shares: S = diag(P/2, P/2)
        let a1 = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let a2 = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        let th = p1_bloch_search(&[a1, a2], &[0.5, 0.5], 1.0, 24).unwrap();
        assert!((th - 1.0).abs() < 1e-9);
        assert!(p1_bloch_search(&[HermitianMatrix::identity(3)], &[1.0], 1.0, 8).is_err());
    }

    #[test]
    fn two_stream_grid_known_case() {
        // equal gains split evenly; the flat top limits accuracy to about sqrt(eps)
        let (p1, p2) = waterfill_two_grid(1.0, 1.0, 2.0, 1000);
        assert!((p1 - 1.0).abs() < 1e-6 && (p2 - 1.0).abs() < 1e-6);
        // a dead stream gets nothing
        let (p1, _) = waterfill_two_grid(1.0, 1e-9, 1.0, 1000);
        assert!((p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lu_agrees_with_cholesky() {
        let mut r = rng(8);
        for _ in 0..20 {
            let a = random_psd(&mut r, 4, 4).add_identity(0.1);
            let lu = lu_log_abs_det(a.matrix()).unwrap() / std::f64::consts::LN_2;
            assert!((lu - logdet_hpd(&a).unwrap()).abs() < 1e-10);
        }
        assert_eq!(lu_log_abs_det(&ComplexMatrix::zeros(2, 2)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn rate_forms_agree() {
        let mut r = rng(9);
        let f = random_matrix(&mut r, 3, 4);
        let h = random_matrix(&mut r, 3, 2);
        let s_e = random_psd(&mut r, 4, 2);
        let s_i = random_psd(&mut r, 2, 1);
        let a = rate_lu(&s_e, &s_i, &f, &h, 0.5).unwrap();
        let b = rate_whitened_eig(&s_e, &s_i, &f, &h, 0.5).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}
