//! Dense complex vectors and matrices.
//!
//! Everything the simulator does is expressed through these two types:
//! gate construction (Kronecker products), state evolution (matrix-vector
//! products) and spectral entropies (Hermitian eigendecomposition). Values
//! are immutable once built; every operation returns a fresh value.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default ceiling on the number of qubits a matrix side may span.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Default tolerance for structural checks (unitary, Hermitian, density).
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Eigenvalues with magnitude at or below this are clipped to zero before logs.
pub const EIGEN_CLIP: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense complex column vector.
#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![ZERO; dim] }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &ComplexVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// The projector-like outer product |self⟩⟨self|.
    pub fn outer(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut data = Vec::with_capacity(n * n);
        for a in &self.data {
            for b in &self.data {
                data.push(a * b.conj());
            }
        }
        ComplexMatrix { rows: n, cols: n, data }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        ComplexVector {
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dims differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}

/// A dense complex matrix stored row-major with 0-based indices.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("matrix must be at least 1x1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, order);
        for i in 0..order {
            m.data[i * order + i] = ONE;
        }
        m
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            data: (0..self.rows).map(|i| self.get(i, j)).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    /// Largest modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Block-diagonal matrix with the given square blocks along the diagonal.
    pub fn block_diagonal(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        if blocks.iter().any(|b| !b.is_square()) {
            return Err(Error::DimensionMismatch("blocks must be square".into()));
        }
        let order: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(order, order);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(offset + i, offset + j, b.get(i, j));
                }
            }
            offset += b.rows;
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
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
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues (descending) and matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// V·diag(λ)·V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::new(l, 0.0))
            .collect();
        let v = &self.eigenvectors;
        &(v * &ComplexMatrix::diagonal(&lambda)) * &v.dagger()
    }

    /// Eigenvalues with tiny magnitudes snapped to zero.
    pub fn clipped(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .map(|&l| if l.abs() <= EIGEN_CLIP { 0.0 } else { l })
            .collect()
    }
}

fn side_qubits(side: usize) -> usize {
    side.next_power_of_two().trailing_zeros() as usize
}

/// Kronecker product `a ⊗ b` with the default qubit ceiling.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_product_within(a, b, DEFAULT_MAX_QUBITS)
}

/// Kronecker product `a ⊗ b`, refusing results whose sides exceed `2^max_qubits`.
pub fn tensor_product_within(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_qubits: usize,
) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let limit = 1usize.checked_shl(max_qubits as u32).unwrap_or(usize::MAX);
    match (rows, cols) {
        (Some(r), Some(c)) if r <= limit && c <= limit => {}
        (r, c) => {
            let side = r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX));
            return Err(Error::TooLarge {
                qubits: side_qubits(side),
                ceiling: max_qubits,
            });
        }
    }
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut data = vec![ZERO; rows * cols];
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a.get(ai, aj);
            if x == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                let row = ai * b.rows + bi;
                let base = row * cols + aj * b.cols;
                for bj in 0..b.cols {
                    data[base + bj] = x * b.get(bi, bj);
                }
            }
        }
    }
    Ok(ComplexMatrix { rows, cols, data })
}

/// Kronecker product of a sequence of factors, left to right.
pub fn tensor_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("empty tensor product".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, m| tensor_product(&acc, m))
}

/// Matrix-vector product.
pub fn apply(u: &ComplexMatrix, v: &ComplexVector) -> Result<ComplexVector> {
    if u.cols != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot apply {}x{} matrix to vector of dim {}",
            u.rows,
            u.cols,
            v.dim()
        )));
    }
    let data = (0..u.rows)
        .map(|i| {
            u.data[i * u.cols..(i + 1) * u.cols]
                .iter()
                .zip(&v.data)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    Ok(ComplexVector { data })
}

/// True iff `max |m†m − I| ≤ tol`.
pub fn check_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let product = &m.dagger() * m;
    product.approx_eq(&ComplexMatrix::identity(m.rows), tol)
}

/// True iff `m` is Hermitian, has unit trace and no eigenvalue below `-tol`.
pub fn check_density(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_hermitian(tol) {
        return false;
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return false;
    }
    match hermitian_eig(m) {
        Ok(spec) => spec.eigenvalues.iter().all(|&l| l >= -tol),
        Err(_) => false,
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back sorted in descending order, with eigenvectors in the
/// matching columns.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let scale = m.data.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let deviation = m.hermitian_deviation();
    if deviation > STRUCTURE_TOL * scale {
        return Err(Error::NotHermitian(deviation));
    }

    let n = m.rows;
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    let mut a = m.clone();
    for i in 0..n {
        let d = a.get(i, i).re;
        a.set(i, i, Complex64::new(d, 0.0));
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a.get(i, j).norm_sqr();
            }
        }
        s.sqrt()
    };
    let total = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = f64::EPSILON * total.max(f64::MIN_POSITIVE);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_norm(&a) > target {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).re.total_cmp(&a.get(i, i).re));
    let eigenvalues = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors.set(row, new_col, v.get(row, old_col));
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation zeroing the (p, q) entry of a Hermitian matrix.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let magnitude = apq.norm();
    if magnitude <= f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / magnitude;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * magnitude);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G acts on the (p, q) plane: G_pp = c, G_pq = s, G_qp = -s·conj(phase), G_qq = c·conj(phase).
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.rows;
    // A ← A·G
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * g_pp + akq * g_qp);
        a.set(k, q, akp * g_pq + akq * g_qq);
    }
    // A ← G†·A
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, g_pp.conj() * apk + g_qp.conj() * aqk);
        a.set(q, k, g_pq.conj() * apk + g_qq.conj() * aqk);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    let dp = a.get(p, p).re;
    let dq = a.get(q, q).re;
    a.set(p, p, Complex64::new(dp, 0.0));
    a.set(q, q, Complex64::new(dq, 0.0));
    // V ← V·G
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * g_pp + vkq * g_qp);
        v.set(k, q, vkp * g_pq + vkq * g_qq);
    }
}
