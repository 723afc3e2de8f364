//! Dense complex linear algebra for the small matrices that appear in the
//! energy and information transmission problems (at most a few dozen rows).
//!
//! Everything here is a pure function of its inputs. Hermitian
//! eigendecompositions use cyclic complex Jacobi rotations, which give
//! eigenvalues with small relative error even for the strongly graded
//! interference-plus-noise covariances seen at high transmit power.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance used to count the energy beams of a covariance.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Sweep budget for the Jacobi eigensolver.
const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims("ComplexMatrix::from_vec", rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Single-column matrix holding `v`.
    pub fn column_vector(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Elementwise sum. Panics on shape mismatch.
    pub fn add(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Elementwise difference. Panics on shape mismatch.
    pub fn sub(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `A^H A` as a Hermitian matrix.
    pub fn gram(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.adjoint().matmul(self))
    }

    /// `A S A^H` for Hermitian `S`.
    pub fn sandwich(&self, s: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.cols != s.dim() {
            return Err(Error::dims("sandwich", self.cols, s.dim()));
        }
        Ok(HermitianMatrix::symmetrized(
            self.matmul(s.matrix()).matmul(&self.adjoint()),
        ))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Plain serialized form: shape plus separate real and imaginary parts.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        if r.re.len() != r.rows * r.cols || r.im.len() != r.re.len() {
            return Err(serde::de::Error::custom("matrix entry count does not match shape"));
        }
        let data = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        Ok(ComplexMatrix {
            rows: r.rows,
            cols: r.cols,
            data,
        })
    }
}

/// Square complex matrix kept exactly Hermitian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Symmetrizes `m` as `(m + m^H)/2`; fails if `m` is not square.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::dims(
                "HermitianMatrix::new",
                "square",
                format!("{}x{}", m.rows, m.cols),
            ));
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(mut m: ComplexMatrix) -> Self {
        let n = m.rows;
        for r in 0..n {
            m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
            for c in r + 1..n {
                let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
                m[(r, c)] = avg;
                m[(c, r)] = avg.conj();
            }
        }
        HermitianMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        HermitianMatrix(m)
    }

    /// `scale * v v^H`.
    pub fn outer(v: &[C64], scale: f64) -> Self {
        let n = v.len();
        HermitianMatrix::symmetrized(ComplexMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj() * scale))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn add(&self, rhs: &HermitianMatrix) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::dims("HermitianMatrix::add", self.dim(), rhs.dim()));
        }
        Ok(HermitianMatrix(self.0.add(&rhs.0)))
    }

    /// `self + s I`.
    pub fn add_identity(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..self.dim() {
            m[(i, i)] += s;
        }
        HermitianMatrix(m)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    /// Quadratic form `v^H A v` (real for Hermitian `A`).
    pub fn quadratic_form(&self, v: &[C64]) -> f64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..n {
            let mut row = C64::new(0.0, 0.0);
            for c in 0..n {
                row += self.0[(r, c)] * v[c];
            }
            acc += v[r].conj() * row;
        }
        acc.re
    }

    /// Smallest eigenvalue ≥ −1e-9 × largest eigenvalue.
    pub fn is_psd(&self) -> Result<bool> {
        let eig = hermitian_eig(self)?;
        let max = eig.values.first().copied().unwrap_or(0.0);
        let min = eig.values.last().copied().unwrap_or(0.0);
        Ok(min >= -1e-9 * max.abs().max(0.0))
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in non-increasing order.
///
/// Each eigenvector is phase-normalized so that its largest-magnitude entry
/// is real and positive, which makes the decomposition reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors stored as columns.
    pub vectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// `U diag(f(λ)) U^H`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |r, c| self.vectors[(r, c)] * f(self.values[c]));
        HermitianMatrix::symmetrized(scaled.matmul(&self.vectors.adjoint()))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map_values(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<EigDecomposition> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let frobenius = m.frobenius_norm();

    let off_norm = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += m[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = frobenius == 0.0 || n <= 1;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_JACOBI_SWEEPS {
        let off = off_norm(&m);
        if off <= 1e-15 * frobenius {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Negligible against both diagonal entries: drop it.
                if sweeps > 4 && b < 1e-3 * f64::EPSILON * (app.abs().min(aqq.abs())) {
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / b;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau.abs() > 1e150 {
                    0.5 / tau
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let col_q = phase.conj() * c;
                let col_p = phase.conj() * s;
                for k in 0..n {
                    let x = m[(k, p)];
                    let y = m[(k, q)];
                    m[(k, p)] = x * c - y * col_p;
                    m[(k, q)] = x * s + y * col_q;
                }
                for k in 0..n {
                    let x = m[(p, k)];
                    let y = m[(q, k)];
                    m[(p, k)] = x * c - y * (phase * s);
                    m[(q, k)] = x * s + y * (phase * c);
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                for k in 0..n {
                    let x = v[(k, p)];
                    let y = v[(k, q)];
                    v[(k, p)] = x * c - y * col_p;
                    v[(k, q)] = x * s + y * col_q;
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&m);
        if off > 1e-12 * frobenius {
            return Err(Error::EigNoConvergence {
                sweeps,
                off_norm: off,
                frobenius,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re).then(i.cmp(&j)));

    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        normalize_phase(&mut col);
        for (r, z) in col.into_iter().enumerate() {
            vectors[(r, dst)] = z;
        }
    }
    Ok(EigDecomposition { values, vectors })
}

/// Rotates `v` so that its first largest-magnitude entry is real positive.
pub fn normalize_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag > 0.0 {
        let rot = v[best].conj() / best_mag;
        for z in v.iter_mut() {
            *z *= rot;
        }
        v[best] = C64::new(v[best].re, 0.0);
    }
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
pub fn cholesky(a: &HermitianMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            let min_eigenvalue = hermitian_eig(a)
                .ok()
                .and_then(|e| e.values.last().copied())
                .unwrap_or(d);
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Hermitian positive-definite `B` with `B A B = I`.
pub fn psd_inverse_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = hermitian_eig(a)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig.map_values(|x| 1.0 / x.sqrt()))
}

/// `log2 det(A)` for Hermitian positive-definite `A`, via Cholesky.
pub fn logdet_hpd(a: &HermitianMatrix) -> Result<f64> {
    let l = cholesky(a)?;
    Ok((0..a.dim()).map(|i| 2.0 * l[(i, i)].re.log2()).sum())
}

/// `Re tr(A B)`. Each term is formed symmetrically, so swapping the
/// arguments gives a bit-identical result.
pub fn trace_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dims("trace_product", a.dim(), b.dim()));
    }
    // tr(AB) = Σ_ij a_ij b_ji = Σ_ij a_ij conj(b_ij) for Hermitian B.
    Ok(a.matrix()
        .data()
        .iter()
        .zip(b.matrix().data())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum())
}

/// Number of eigenvalues strictly above `rel_tol × λ_max`; zero for the zero matrix.
pub fn numerical_rank(a: &HermitianMatrix, rel_tol: f64) -> Result<usize> {
    Ok(rank_of_values(&hermitian_eig(a)?.values, rel_tol))
}

/// Rank count on a non-increasing eigenvalue list.
pub fn rank_of_values(values: &[f64], rel_tol: f64) -> usize {
    let max = values.first().copied().unwrap_or(0.0);
    if !(max > 0.0) {
        return 0;
    }
    values.iter().filter(|&&x| x > rel_tol * max).count()
}

/// Singular values with right singular vectors.
#[derive(Clone, Debug)]
pub struct RightSvd {
    /// Non-increasing.
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns (`cols × cols`).
    pub right_vectors: ComplexMatrix,
}

/// Singular values and right singular vectors of `b`, from the
/// eigendecomposition of `b^H b`.
pub fn right_svd(b: &ComplexMatrix) -> Result<RightSvd> {
    let eig = hermitian_eig(&b.gram())?;
    Ok(RightSvd {
        singular_values: eig.values.iter().map(|&x| x.max(0.0).sqrt()).collect(),
        right_vectors: eig.vectors,
    })
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
    }

    pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        HermitianMatrix::new(random_matrix(rng, n, n)).unwrap()
    }

    pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> HermitianMatrix {
        random_matrix(rng, rank, n).gram()
    }

    pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        hermitian_eig(&random_hermitian(rng, n)).unwrap().vectors
    }
}
