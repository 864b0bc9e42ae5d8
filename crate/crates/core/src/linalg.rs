// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices and the operator-space geometry built on them.
//!
//! Operators on a `d`-dimensional Hilbert space are stored as row-major
//! [`ComplexMatrix`] values. The Hilbert–Schmidt inner product
//! `<A, B> = tr(A† B)` coincides with the standard inner product of the
//! row-major entry vectors, which is how [`OperatorSubspace`] treats them.
//!
//! Eigen- and singular value decompositions are delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Numerical thresholds shared across the crate.
pub mod tol {
    /// Relative threshold on singular values for numerical rank.
    pub const RANK: f64 = 1e-9;
    /// Absolute floor below which a matrix counts as zero.
    pub const ZERO_FLOOR: f64 = 1e-12;
    /// Relative Frobenius threshold for Hermiticity.
    pub const HERMITIAN: f64 = 1e-9;
    /// Relative threshold for complex scalar equality.
    pub const SCALAR: f64 = 1e-9;
    /// Smallest admissible eigenvalue of a positive semidefinite operator.
    pub const PSD: f64 = 1e-9;
}

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `|x − y| ≤ tol · max(1, |x|, |y|)` with the crate-wide scalar tolerance.
pub fn approx_eq(x: C64, y: C64) -> bool {
    (x - y).norm() <= tol::SCALAR * 1f64.max(x.norm()).max(y.norm())
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
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
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix must have positive shape".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&r).expect("well-formed real rows")
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let e: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&e)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| columns[c][r]))
    }

    /// `|ψ⟩⟨φ|`.
    pub fn outer(psi: &[C64], phi: &[C64]) -> Self {
        Self::from_fn(psi.len(), phi.len(), |r, c| psi[r] * phi[c].conj())
    }

    /// Rank-one projection `|ψ⟩⟨ψ| / ‖ψ‖²`.
    pub fn projector(psi: &[C64]) -> Self {
        let n2 = norm(psi).powi(2);
        Self::outer(psi, psi).scale(ONE / n2)
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries; also the vectorization used for operator spaces.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        out
    }

    /// `A v` for a column vector `v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = other.shape();
        Self::from_fn(self.rows * r2, self.cols * c2, |r, c| {
            self[(r / r2, c / c2)] * other[(r % r2, c % c2)]
        })
    }

    /// `A B − B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Frobenius distance from Hermiticity, `‖A − A†‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && self.hermiticity_residual() <= tol::HERMITIAN * 1f64.max(self.frobenius_norm())
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Frobenius distance from unitarity, `‖A† A − 𝟙‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Self::identity(self.cols)).frobenius_norm()
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
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

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

// Vector helpers. Vectors are plain slices of complex numbers.

/// `⟨a, b⟩`, conjugate-linear in `a`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|z| z / n).collect()
}

/// Hilbert–Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "hs_inner needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(inner(a.as_slice(), b.as_slice()))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors; column `i` belongs to `values[i]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// `Σ λᵢ vᵢ vᵢ†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (i, &l) in self.values.iter().enumerate() {
            let v = self.vector(i);
            out += &ComplexMatrix::outer(&v, &v).scale_real(l);
        }
        out
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "hermitian_eig needs a square matrix, got {:?}",
            a.shape()
        )));
    }
    if !a.is_hermitian() {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (||A - A†||_F = {:.3e})",
            a.hermiticity_residual()
        )));
    }
    let eig = a.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..a.rows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(a.rows(), a.rows(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(HermitianEig { values, vectors })
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `tol × σ_max`; zero when `σ_max` is below
/// the absolute floor.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> usize {
    let sv = singular_values(a);
    let max = sv.first().copied().unwrap_or(0.0);
    if max <= tol::ZERO_FLOOR {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// HS-orthonormal basis of a subspace of `L(ℂ^d)`.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    dim_h: usize,
    basis: Vec<ComplexMatrix>,
    tol: f64,
}

impl OperatorSubspace {
    pub fn zero(dim_h: usize, tol: f64) -> Self {
        OperatorSubspace {
            dim_h,
            basis: Vec::new(),
            tol,
        }
    }

    /// Wraps a basis that is already HS-orthonormal, checking it.
    pub fn from_orthonormal(dim_h: usize, basis: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        for b in &basis {
            if b.shape() != (dim_h, dim_h) {
                return Err(Error::Dimension(format!(
                    "basis element of shape {:?} in a space of {dim_h}x{dim_h} operators",
                    b.shape()
                )));
            }
        }
        let s = OperatorSubspace { dim_h, basis, tol };
        let err = s.orthonormality_defect();
        if err > 1e-8 {
            return Err(Error::Domain(format!(
                "basis is not orthonormal (defect {err:.3e})"
            )));
        }
        Ok(s)
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let g = inner(a.as_slice(), b.as_slice());
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Orthogonal projection of `m` onto the subspace.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_h, self.dim_h);
        for b in &self.basis {
            let c = inner(b.as_slice(), m.as_slice());
            out += &b.scale(c);
        }
        out
    }

    /// Relative distance of `m` from the subspace.
    pub fn distance(&self, m: &ComplexMatrix) -> f64 {
        (m - &self.project(m)).frobenius_norm()
    }

    pub fn contains(&self, m: &ComplexMatrix) -> bool {
        self.distance(m) <= 1e-9 * 1f64.max(m.frobenius_norm())
    }
}

/// Orthonormal basis of `span(mats)`, obtained from the eigendecomposition of
/// the HS Gram matrix. The dimension is the numerical rank of that Gram matrix.
pub fn span_orthonormalize(mats: &[ComplexMatrix], tol: f64) -> Result<OperatorSubspace> {
    let first = mats
        .first()
        .ok_or_else(|| Error::Dimension("cannot infer dimension of an empty family".into()))?;
    let d = first.rows();
    if !first.is_square() || mats.iter().any(|m| m.shape() != (d, d)) {
        return Err(Error::Dimension(
            "span_orthonormalize needs equal square shapes".into(),
        ));
    }
    let n = mats.len();
    let gram = ComplexMatrix::from_fn(n, n, |i, j| inner(mats[i].as_slice(), mats[j].as_slice()));
    let eig = hermitian_eig(&gram)?;
    let max = eig.values.first().copied().unwrap_or(0.0);
    if max <= tol::ZERO_FLOOR * tol::ZERO_FLOOR {
        return Ok(OperatorSubspace::zero(d, tol));
    }
    let mut basis = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= tol * max {
            break;
        }
        let coeffs = eig.vector(k);
        let mut b = ComplexMatrix::zeros(d, d);
        for (m, c) in mats.iter().zip(&coeffs) {
            b += &m.scale(*c);
        }
        let norm = b.frobenius_norm();
        basis.push(b.scale_real(1.0 / norm));
    }
    Ok(OperatorSubspace { dim_h: d, basis, tol })
}

/// HS-orthogonal complement inside `L(ℂ^d)`.
pub fn orthogonal_complement(s: &OperatorSubspace) -> OperatorSubspace {
    let d = s.dim_h;
    let n = d * d;
    let mut q = ComplexMatrix::identity(n);
    for b in &s.basis {
        q = &q - &ComplexMatrix::outer(b.as_slice(), b.as_slice());
    }
    let q = q.hermitian_part();
    let eig = hermitian_eig(&q).expect("I - P is Hermitian by construction");
    let basis = eig
        .values
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l > 0.5)
        .map(|(k, _)| {
            ComplexMatrix::from_row_major(d, d, eig.vector(k)).expect("d*d entries")
        })
        .collect();
    OperatorSubspace {
        dim_h: d,
        basis,
        tol: s.tol,
    }
}

/// HS-orthonormal basis of Hermitian matrices spanning the real span of the
/// Hermitian inputs. For a *-closed span this is also a complex basis.
pub fn hermitian_span_basis(mats: &[ComplexMatrix], tol: f64) -> Result<Vec<ComplexMatrix>> {
    let Some(first) = mats.first() else {
        return Ok(Vec::new());
    };
    let d = first.rows();
    for m in mats {
        if m.shape() != (d, d) {
            return Err(Error::Dimension("hermitian_span_basis shape mismatch".into()));
        }
        if !m.is_hermitian() {
            return Err(Error::Domain("hermitian_span_basis needs Hermitian inputs".into()));
        }
    }
    let n = mats.len();
    let gram = DMatrix::<f64>::from_fn(n, n, |i, j| {
        inner(mats[i].as_slice(), mats[j].as_slice()).re
    });
    let eig = gram.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if max <= tol::ZERO_FLOOR * tol::ZERO_FLOOR {
        return Ok(Vec::new());
    }
    let mut basis = Vec::new();
    for k in 0..n {
        let lambda = eig.eigenvalues[k];
        if lambda <= tol * max {
            continue;
        }
        let mut b = ComplexMatrix::zeros(d, d);
        for (i, m) in mats.iter().enumerate() {
            b += &m.scale_real(eig.eigenvectors[(i, k)]);
        }
        let b = b.hermitian_part();
        let norm = b.frobenius_norm();
        basis.push(b.scale_real(1.0 / norm));
    }
    Ok(basis)
}

/// Pauli matrices `σ₁, σ₂, σ₃`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let s1 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let s2 = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("2x2");
    let s3 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    [s1, s2, s3]
}
