//! Dense complex linear algebra used throughout the crate.
//!
//! [`ComplexMatrix`] and [`ComplexVector`] are thin value types over
//! `nalgebra` storage. They guarantee finite entries and expose the handful of
//! decompositions the relational layer needs: tensor products, partial traces,
//! a full (square-factor) SVD and a Hermitian eigendecomposition, both with
//! deterministic ordering and phase conventions. The decompositions run on
//! `faer`, whose complex SVD is accurate to a few ulp at these sizes.

use crate::error::{shape_err, Error, Result};
use crate::io::{MatrixJson, VectorJson};
use crate::policy::NumericPolicy;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Sub};

pub use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix(DMatrix<C64>);

/// Dense complex column vector with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorJson", into = "VectorJson")]
pub struct ComplexVector(DVector<C64>);

fn all_finite<'a>(mut it: impl Iterator<Item = &'a C64>) -> bool {
    it.all(|z| z.re.is_finite() && z.im.is_finite())
}

impl ComplexMatrix {
    pub fn from_inner(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Contract("matrix dimensions must be positive".into()));
        }
        if !all_finite(m.iter()) {
            return Err(Error::Contract("matrix entries must be finite".into()));
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(shape_err(
                "from_row_major",
                format!("{rows}x{cols} = {} entries", rows.saturating_mul(cols)),
                format!("{} entries", entries.len()),
            ));
        }
        Self::from_inner(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Builds a real matrix from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Contract("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0))).collect();
        Self::from_row_major(rows.len(), cols, entries)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        let m = DMatrix::from_fn(rows, cols, f);
        debug_assert!(all_finite(m.iter()));
        Self(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// Rectangular `rows x cols` matrix with `values` on the main diagonal.
    pub fn rect_diag(rows: usize, cols: usize, values: &[f64]) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            if i == j && i < values.len() {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
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

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        let (r, c) = self.shape();
        (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| self.0[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`; infinite for mismatched shapes.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Checked product.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols() != rhs.rows() {
            return Err(shape_err(
                "matmul",
                format!("lhs cols = rhs rows ({})", self.cols()),
                format!("{}", rhs.rows()),
            ));
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    /// Checked matrix-vector product.
    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols() != v.dim() {
            return Err(shape_err(
                "apply",
                format!("vector of dim {}", self.cols()),
                format!("dim {}", v.dim()),
            ));
        }
        Ok(ComplexVector(&self.0 * &v.0))
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector(self.0.column(j).into_owned())
    }

    pub fn row(&self, i: usize) -> ComplexVector {
        ComplexVector(self.0.row(i).transpose())
    }

    /// `max |h - h^dagger|` over entries.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `max |U^dagger U - I|` over entries.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = self.adjoint() * self;
        g.max_abs_diff(&ComplexMatrix::identity(self.rows()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on mismatched inner dimensions; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * &rhs.0)
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Contract("vector dimension must be positive".into()));
        }
        if !all_finite(entries.iter()) {
            return Err(Error::Contract("vector entries must be finite".into()));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_inner(v: DVector<C64>) -> Result<Self> {
        Self::new(v.iter().copied().collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// Standard basis vector `|k>` of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> C64 {
        self.0[i]
    }

    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn inner(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// Unit vector along `self`; fails for vectors of (numerically) zero norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE.sqrt() {
            return Err(Error::Contract("cannot normalize a zero vector".into()));
        }
        Ok(Self(&self.0 / C64::new(n, 0.0)))
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn dot(&self, other: &ComplexVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `|self><other|`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        ComplexMatrix(&self.0 * other.0.adjoint())
    }

    /// `|self><self|`.
    pub fn projector(&self) -> ComplexMatrix {
        self.outer(self)
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Multiplies by the unit phase that makes the first entry of modulus
    /// above `tol` real and positive.
    pub fn fix_phase(&self, tol: f64) -> Self {
        match self.0.iter().find(|z| z.norm() > tol) {
            Some(z) => {
                let phase = z.conj() / z.norm();
                self.scale(phase)
            }
            None => self.clone(),
        }
    }

    /// Smallest `|<self|other>|`-based distance up to a global phase:
    /// `min_theta max_i |self_i - e^{i theta} other_i|` evaluated at the
    /// overlap-aligning phase.
    pub fn max_abs_diff_up_to_phase(&self, other: &ComplexVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let ov = other.dot(self);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        self.max_abs_diff(&other.scale(phase))
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexVector[")?;
        for z in self.0.iter() {
            write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, " ]")
    }
}

fn check_size(op: &'static str, rows: usize, cols: usize, limit: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(e) if e <= limit => Ok(()),
        Some(e) => Err(Error::Size { op, entries: e, limit }),
        None => Err(Error::Size { op, entries: usize::MAX, limit }),
    }
}

/// Kronecker product `a ⊗ b` with the default size limit.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_product_with(a, b, &NumericPolicy::DEFAULT)
}

/// Kronecker product; entry `(i*b.rows + k, j*b.cols + l)` is `a[i,j] * b[k,l]`.
pub fn tensor_product_with(a: &ComplexMatrix, b: &ComplexMatrix, policy: &NumericPolicy) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows()).ok_or(Error::Size {
        op: "tensor_product",
        entries: usize::MAX,
        limit: policy.max_entries,
    })?;
    let cols = a.cols().checked_mul(b.cols()).ok_or(Error::Size {
        op: "tensor_product",
        entries: usize::MAX,
        limit: policy.max_entries,
    })?;
    check_size("tensor_product", rows, cols, policy.max_entries)?;
    Ok(ComplexMatrix(a.0.kronecker(&b.0)))
}

/// `a ⊗ b` for vectors, index `i * b.dim + k`.
pub fn tensor_vector(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    ComplexVector(a.0.kronecker(&b.0))
}

/// Which factor of a bipartite space is traced out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TracedSide {
    /// Trace out the system factor (first); the apparatus factor remains.
    S,
    /// Trace out the apparatus factor (second); the system factor remains.
    A,
}

/// Partial trace of an operator on `S ⊗ A` with composite index `i * dim_a + j`.
pub fn partial_trace(rho_sa: &ComplexMatrix, dim_s: usize, dim_a: usize, traced: TracedSide) -> Result<ComplexMatrix> {
    let d = dim_s
        .checked_mul(dim_a)
        .ok_or_else(|| shape_err("partial_trace", "finite composite dimension", "overflow"))?;
    if dim_s == 0 || dim_a == 0 || rho_sa.shape() != (d, d) {
        return Err(shape_err(
            "partial_trace",
            format!("{d}x{d} for dims {dim_s}x{dim_a}"),
            format!("{}x{}", rho_sa.rows(), rho_sa.cols()),
        ));
    }
    let m = &rho_sa.0;
    Ok(match traced {
        TracedSide::A => ComplexMatrix::from_fn(dim_s, dim_s, |i, j| {
            (0..dim_a).map(|k| m[(i * dim_a + k, j * dim_a + k)]).sum()
        }),
        TracedSide::S => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_s).map(|k| m[(k * dim_a + i, k * dim_a + j)]).sum()
        }),
    })
}

/// Full singular value decomposition `m = u · diag(sigma) · v`.
///
/// `u` is `rows x rows` and `v` is `cols x cols`, both unitary; `sigma` has
/// `min(rows, cols)` entries in descending order (stable for ties).
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// `u · diag(sigma) · v` with a rectangular diagonal middle factor.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::rect_diag(self.u.cols(), self.v.rows(), &self.sigma);
        &(&self.u * &d) * &self.v
    }

    /// Number of singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let max = self.sigma.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > tol * max).count()
    }
}

/// Descending order, ties keep their original index order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

fn to_faer(m: &DMatrix<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Multiplies `v` by the unit phase that makes its first significant entry real and positive,
/// returning that phase.
fn normalize_phase(v: &mut [C64]) -> C64 {
    match v.iter().find(|z| z.norm() > 1e-12).copied() {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v.iter_mut().for_each(|x| *x *= phase);
            phase
        }
        None => ONE,
    }
}

/// SVD with the default policy.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    svd_with(m, &NumericPolicy::DEFAULT)
}

/// Full SVD `m = u · diag(sigma) · v`, backed by `faer`.
///
/// Singular values are descending (stable for ties). The first significant
/// entry of every column of `u` is real and nonnegative, with the compensating
/// phase applied to the matching row of `v`; rows of `v` beyond `min(N, M)`
/// get the same convention on their own.
pub fn svd_with(m: &ComplexMatrix, policy: &NumericPolicy) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let dec = to_faer(&m.0).svd().map_err(|_| Error::NoConvergence {
        op: "svd",
        iterations: policy.max_iterations,
    })?;
    let (fu, fs, fv) = (dec.U(), dec.S().column_vector(), dec.V());
    let sv: Vec<f64> = (0..k).map(|i| fs[i].re).collect();
    let order = descending_order(&sv);
    let sigma: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    // columns beyond k carry no singular value and keep their backend order
    let perm: Vec<usize> = order.iter().copied().chain(k..rows.max(cols)).collect();

    let mut u = DMatrix::from_element(rows, rows, ZERO);
    let mut v = DMatrix::from_element(cols, cols, ZERO);
    for (dst, &src) in perm.iter().enumerate() {
        let mut ucol: Vec<C64> = if src < rows { (0..rows).map(|i| fu[(i, src)]).collect() } else { Vec::new() };
        // row `dst` of v is the conjugate of column `src` of faer's V
        let mut vrow: Vec<C64> = if src < cols { (0..cols).map(|j| fv[(j, src)].conj()).collect() } else { Vec::new() };
        if dst < k {
            let phase = normalize_phase(&mut ucol);
            vrow.iter_mut().for_each(|x| *x /= phase);
        } else {
            normalize_phase(&mut ucol);
            normalize_phase(&mut vrow);
        }
        if dst < rows {
            u.set_column(dst, &DVector::from_vec(ucol));
        }
        if dst < cols {
            v.set_row(dst, &DVector::from_vec(vrow).transpose());
        }
    }
    Ok(Svd {
        u: ComplexMatrix(u),
        sigma,
        v: ComplexMatrix(v),
    })
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are descending (stable for ties); eigenvector `k` is column
/// `k` of `vectors`, with its first significant entry real and positive.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEigen> {
    eig_hermitian_with(h, &NumericPolicy::DEFAULT)
}

pub fn eig_hermitian_with(h: &ComplexMatrix, policy: &NumericPolicy) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(shape_err("eig_hermitian", "square matrix", format!("{}x{}", h.rows(), h.cols())));
    }
    let defect = h.hermitian_defect();
    if defect > policy.hermitian_tol {
        return Err(Error::Contract(format!(
            "eig_hermitian: input is not Hermitian (max |h - h^dagger| = {defect:e} > {:e})",
            policy.hermitian_tol
        )));
    }
    let sym = (&h.0 + h.0.adjoint()) * C64::new(0.5, 0.0);
    let dec = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence {
            op: "eig_hermitian",
            iterations: policy.max_iterations,
        })?;
    let n = h.rows();
    let (fs, fv) = (dec.S().column_vector(), dec.U());
    let vals: Vec<f64> = (0..n).map(|i| fs[i].re).collect();
    let order = descending_order(&vals);
    let values = order.iter().map(|&i| vals[i]).collect();
    let cols: Vec<DVector<C64>> = order
        .iter()
        .map(|&j| {
            let mut c: Vec<C64> = (0..n).map(|i| fv[(i, j)]).collect();
            normalize_phase(&mut c);
            DVector::from_vec(c)
        })
        .collect();
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix(DMatrix::from_columns(&cols)),
    })
}

/// Validates a density matrix: square, Hermitian, unit trace, positive semidefinite.
pub fn check_density(rho: &ComplexMatrix, policy: &NumericPolicy) -> Result<()> {
    if !rho.is_square() {
        return Err(shape_err("density", "square matrix", format!("{}x{}", rho.rows(), rho.cols())));
    }
    let defect = rho.hermitian_defect();
    if defect > policy.hermitian_tol {
        return Err(Error::Contract(format!(
            "density matrix is not Hermitian (max |rho - rho^dagger| = {defect:e})"
        )));
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > policy.normalization_tol {
        return Err(Error::Contract(format!("density matrix trace is {tr}, expected 1")));
    }
    let eig = eig_hermitian_with(rho, policy)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -policy.psd_tol {
        return Err(Error::Contract(format!(
            "density matrix is not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}
