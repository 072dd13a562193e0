//! Dense complex matrix kernel.
//!
//! Every operator in the crate is a [`CMat`]: a dense matrix of `Complex<f64>`
//! entries. The kernel provides adjoints, (q-)commutators, the hermitian
//! eigendecomposition, singular-value based rank and kernel extraction, and the
//! positive-definite powers `M^{1/2}`, `M^{-1/2}`, `M^{-1}`.
//!
//! Rank and kernel decisions always use a threshold relative to the largest
//! singular value; nothing is ever compared against an exact zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical thresholds shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative residual accepted for identities and eigen-equations.
    pub residual_tol: f64,
    /// Singular values below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Relative gap under which two eigenvalues belong to one cluster.
    pub cluster_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            rank_tol: 1e-10,
            cluster_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn new(residual_tol: f64, rank_tol: f64, cluster_tol: f64) -> Result<Self> {
        for (name, v) in [
            ("residual_tol", residual_tol),
            ("rank_tol", rank_tol),
            ("cluster_tol", cluster_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(Self {
            residual_tol,
            rank_tol,
            cluster_tol,
        })
    }
}

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMat(DMatrix<C64>);

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMat {}x{} {:?}", self.rows(), self.cols(), self.0.as_slice())
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMat(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMat(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "from_row_major",
                left: (rows, cols),
                right: (entries.len(), 1),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMat(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        CMat::from_fn(n, n, |i, j| if i == j { C64::from(diag[i]) } else { ZERO })
    }

    /// Stacks column vectors. `rows` fixes the shape when `cols` is empty.
    pub fn from_columns(rows: usize, cols: &[CVec]) -> Self {
        CMat::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        CMat(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.0[(i, j)] = z;
    }

    pub fn column(&self, j: usize) -> CVec {
        self.0.column(j).into_owned()
    }

    pub fn columns(&self) -> Vec<CVec> {
        (0..self.cols()).map(|j| self.column(j)).collect()
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        CMat(self.0.adjoint())
    }

    pub fn scale(&self, z: C64) -> CMat {
        CMat(&self.0 * z)
    }

    pub fn scale_real(&self, r: f64) -> CMat {
        self.scale(C64::from(r))
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        &self.0 * v
    }

    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(CMat(&self.0 * &other.0))
    }

    pub fn fro_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_exactly_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows())
                .all(|i| (0..self.cols()).all(|j| i == j || self.0[(i, j)] == ZERO))
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols()))
            .map(|i| self.0[(i, i)])
            .collect()
    }

    /// `||M - M^dagger||_F / ||M||_F`, zero for the zero matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        rel(
            (&self.0 - self.0.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            self.fro_norm(),
        )
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        CMat(self.0.kronecker(&other.0))
    }

    /// Top-left `n x n` block.
    pub fn leading_block(&self, n: usize) -> CMat {
        CMat(self.0.view((0, 0), (n, n)).into_owned())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        CMat(&self.0 * &rhs.0)
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        CMat(&self.0 + &rhs.0)
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        CMat(&self.0 - &rhs.0)
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat(-&self.0)
    }
}

/// `residual / scale`, or the bare residual when the scale vanishes.
pub fn rel(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.fro_norm()
}

fn check_same_square(op: &'static str, a: &CMat, b: &CMat) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op,
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            op,
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

/// `AB - BA`.
pub fn commutator(a: &CMat, b: &CMat) -> Result<CMat> {
    check_same_square("commutator", a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// `AB - q BA`.
pub fn q_commutator(a: &CMat, b: &CMat, q: f64) -> Result<CMat> {
    check_same_square("q_commutator", a, b)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
    }
    Ok(&(a * b) - &(b * a).scale_real(q))
}

/// Gram matrix `G[i][j] = <v_i, v_j>`, conjugate-linear in the first slot.
pub fn gram(vectors: &[CVec]) -> Result<CMat> {
    let n = vectors.first().map_or(0, |v| v.len());
    if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::ShapeMismatch {
            op: "gram",
            left: (n, 1),
            right: (bad.len(), 1),
        });
    }
    Ok(CMat::from_fn(vectors.len(), vectors.len(), |i, j| {
        vectors[i].dotc(&vectors[j])
    }))
}

/// Eigenpairs of a hermitian matrix, values ascending, vectors as unit columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigResult {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let v = self.vectors.inner();
        let n = v.nrows();
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = C64::from(f(lam));
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        CMat(scaled * v.adjoint())
    }
}

/// Rotates `v` so its dominant component is real and positive.
pub(crate) fn canonical_phase(v: &mut CVec) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(z) = v.iter().copied().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|c| *c *= phase);
    }
}

/// Index of the first component attaining the largest modulus.
pub fn dominant_index(v: &CVec) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-9))
        .unwrap_or(0)
}

pub fn hermitian_eig(m: &CMat, tol: &ToleranceConfig) -> Result<EigResult> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "hermitian_eig",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = m.hermiticity_residual();
    if residual > tol.residual_tol {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.rows();

    // Number-basis operators are exactly diagonal; keep their basis exact.
    if m.is_exactly_diagonal() {
        let diag: Vec<f64> = m.diagonal().iter().map(|z| z.re).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let values = order.iter().map(|&i| diag[i]).collect();
        let vectors = CMat::from_fn(n, n, |i, j| if i == order[j] { ONE } else { ZERO });
        return Ok(EigResult { values, vectors });
    }

    let h = (m.inner() + m.inner().adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 100_000).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<CVec> = order
        .iter()
        .map(|&i| {
            let mut v = eig.eigenvectors.column(i).into_owned();
            let norm = v.norm();
            v /= C64::from(norm);
            canonical_phase(&mut v);
            v
        })
        .collect();
    Ok(EigResult {
        values,
        vectors: CMat::from_columns(n, &cols),
    })
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.inner().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rank_of(m: &CMat, tol: &ToleranceConfig) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_tol * smax).count()
}

/// Orthonormal basis of `ker(M)` as columns; the result has zero columns when
/// the kernel is trivial.
pub fn kernel_basis(m: &CMat, tol: &ToleranceConfig) -> CMat {
    let (rows, cols) = m.shape();
    // Pad wide matrices so the SVD yields a full set of right singular vectors.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m.inner());
        p
    } else {
        m.inner().clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut basis: Vec<CVec> = (0..v_t.nrows())
        .filter(|&i| smax == 0.0 || svd.singular_values[i] <= tol.rank_tol * smax)
        .map(|i| {
            let mut v: CVec = v_t.row(i).adjoint();
            canonical_phase(&mut v);
            v
        })
        .collect();
    basis.sort_by_key(dominant_index);
    CMat::from_columns(cols, &basis)
}

/// Solves `A Y = B` by LU; `None` when `A` is singular.
pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    if !a.is_square() || a.rows() != b.rows() {
        return None;
    }
    a.inner().clone().lu().solve(b.inner()).map(CMat)
}

/// `M^{1/2}`, `M^{-1/2}` and `M^{-1}` of a hermitian positive-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivePowers {
    pub sqrt: CMat,
    pub inv_sqrt: CMat,
    pub inv: CMat,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl PositivePowers {
    pub fn condition(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }
}

pub fn positive_powers(m: &CMat, tol: &ToleranceConfig) -> Result<PositivePowers> {
    let eig = hermitian_eig(m, tol)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    let max = eig.values.last().copied().unwrap_or(0.0);
    let norm = min.abs().max(max.abs());
    if !(min > tol.rank_tol * norm) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(PositivePowers {
        sqrt: eig.apply(f64::sqrt),
        inv_sqrt: eig.apply(|l| 1.0 / l.sqrt()),
        inv: eig.apply(|l| 1.0 / l),
        min_eigenvalue: min,
        max_eigenvalue: max,
    })
}

/// `exp(t G)` for hermitian `G`.
pub fn hermitian_exp(g: &CMat, t: f64, tol: &ToleranceConfig) -> Result<CMat> {
    Ok(hermitian_eig(g, tol)?.apply(|l| (t * l).exp()))
}
