//! Dense complex linear algebra for small matrices (dimension at most 64).
//!
//! Everything here is a plain value type plus pure functions: a row-major
//! [`ComplexMatrix`], a cyclic Jacobi eigensolver for Hermitian matrices, a
//! one-sided Jacobi SVD, Kronecker products and unitary exponentials.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type Complex = Complex64;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

/// Shorthand for `Complex::new(re, im)`.
#[inline]
pub const fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[Complex]>>(rows: &[R]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(
            rows.iter().all(|r| r.as_ref().len() == ncols),
            "ragged rows"
        );
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self {
            rows: rows.len(),
            cols: ncols,
            data,
        }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        m
    }

    /// Outer product `|ket><bra|`.
    pub fn outer(ket: &[Complex], bra: &[Complex]) -> Self {
        Self::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj())
    }

    /// Matrix unit `E_ij = |i><j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
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

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(c(k, 0.0))
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |a_ij - b_ij|`. Panics if the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |a_ij - conj(a_ji)|`, or infinity for non-square matrices.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Hermitian within `tol` and smallest eigenvalue at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match hermitian_eigen(&self.hermitian_part(), false) {
            Ok(spec) => spec.eigenvalues.first().is_none_or(|&l| l >= -tol),
            Err(_) => false,
        }
    }

    /// `(A + A^dag) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `A B A^dag`, the conjugation used for Kraus actions.
    pub fn sandwich(&self, middle: &Self) -> Self {
        &(self * middle) * &self.adjoint()
    }
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
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
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues in ascending order, optionally with eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<ComplexMatrix>,
}

fn check_square_capped(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if a.rows > tolerance::MAX_DIM {
        return Err(Error::SizeCap {
            dim: a.rows,
            cap: tolerance::MAX_DIM,
        });
    }
    Ok(a.rows)
}

/// Rotation parameters `(cos, sin, tan)` that annihilate the off-diagonal
/// entry of magnitude `g` between diagonal entries `app` and `aqq`.
#[inline]
fn jacobi_angle(app: f64, aqq: f64, g: f64) -> (f64, f64, f64) {
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    (cs, t * cs, t)
}

/// Applies `M <- M J` on columns `p, q` where
/// `J = [[c, s e], [-s conj(e), c]]` in the `(p, q)` block.
#[inline]
#[allow(clippy::too_many_arguments)]
fn rotate_columns(m: &mut [Complex], rows: usize, cols: usize, p: usize, q: usize, cs: f64, sn: f64, e: Complex) {
    let ec = e.conj();
    for k in 0..rows {
        let mkp = m[k * cols + p];
        let mkq = m[k * cols + q];
        m[k * cols + p] = mkp * cs - ec * mkq * sn;
        m[k * cols + q] = e * mkp * sn + mkq * cs;
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending; equal values keep the order in which the
/// sweeps left them on the diagonal.
pub fn hermitian_eigen(a: &ComplexMatrix, want_vectors: bool) -> Result<Spectrum> {
    let n = check_square_capped(a)?;
    let residual = a.hermitian_residual();
    if !(residual <= tolerance::HERMITIAN) {
        return Err(Error::NotHermitian { residual });
    }
    let mut m = a.hermitian_part().data;
    for i in 0..n {
        m[i * n + i].im = 0.0;
    }
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n).data);
    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = tolerance::JACOBI_OFF_DIAGONAL * scale;

    let off_norm = |m: &[Complex]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..tolerance::JACOBI_MAX_SWEEPS {
        if off_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                // Negligible next to both diagonal entries: drop it outright.
                let g100 = 100.0 * g;
                if app.abs() + g100 == app.abs() && aqq.abs() + g100 == aqq.abs() {
                    m[p * n + q] = ZERO;
                    m[q * n + p] = ZERO;
                    continue;
                }
                let e = apq / g;
                let (cs, sn, t) = jacobi_angle(app, aqq, g);
                rotate_columns(&mut m, n, n, p, q, cs, sn, e);
                // Row update with J^dag = [[c, -s e], [s conj(e), c]].
                let ec = e.conj();
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = mpk * cs - e * mqk * sn;
                    m[q * n + k] = ec * mpk * sn + mqk * cs;
                }
                m[p * n + q] = ZERO;
                m[q * n + p] = ZERO;
                m[p * n + p] = c(app - t * g, 0.0);
                m[q * n + q] = c(aqq + t * g, 0.0);
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, n, n, p, q, cs, sn, e);
                }
            }
        }
    }
    if !converged && off_norm(&m) > threshold {
        return Err(Error::NoConvergence {
            sweeps: tolerance::JACOBI_MAX_SWEEPS,
        });
    }

    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]));
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a, false)?.eigenvalues)
}

fn norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Extends an orthonormal set of vectors in `C^dim` to a full basis.
fn complete_basis(mut basis: Vec<Vec<Complex>>, dim: usize) -> Vec<Vec<Complex>> {
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![ZERO; dim];
        v[i] = ONE;
        // Two Gram-Schmidt passes.
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk -= proj * bk;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-3 {
            basis.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    basis
}

/// Singular value decomposition `A = U diag(s) V^dag` by one-sided Jacobi.
///
/// `U` is `rows x rows`, `V` is `cols x cols`, both unitary; `s` has
/// `min(rows, cols)` entries in descending order.
pub fn svd(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let (m, n) = (a.rows, a.cols);
    if m > tolerance::MAX_DIM || n > tolerance::MAX_DIM {
        return Err(Error::SizeCap {
            dim: m.max(n),
            cap: tolerance::MAX_DIM,
        });
    }
    if m < n {
        // Wide input: factor the adjoint, which has more rows than columns.
        let (u, s, v) = svd(&a.adjoint())?;
        return Ok((v, s, u));
    }
    let mut w = a.data.clone();
    let mut v = ComplexMatrix::identity(n).data;
    let floor = f64::EPSILON * a.frobenius_norm().powi(2);
    let mut converged = false;
    for _ in 0..tolerance::JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..m {
                    let wp = w[k * n + p];
                    let wq = w[k * n + q];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let g = gamma.norm();
                if g <= floor || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = gamma / g;
                let (cs, sn, _) = jacobi_angle(alpha, beta, g);
                rotate_columns(&mut w, m, n, p, q, cs, sn, e);
                rotate_columns(&mut v, n, n, p, q, cs, sn, e);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: tolerance::JACOBI_MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| w[k * n + j].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let k = m.min(n);
    let s: Vec<f64> = order[..k].iter().map(|&j| norms[j]).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = smax * f64::EPSILON * (m.max(n) as f64);

    let mut ucols = Vec::with_capacity(m);
    for &j in &order[..k] {
        if norms[j] > cutoff && norms[j] > 0.0 {
            ucols.push((0..m).map(|r| w[r * n + j] / norms[j]).collect::<Vec<_>>());
        } else {
            break;
        }
    }
    let ucols = complete_basis(ucols, m);
    let u = ComplexMatrix::from_fn(m, m, |i, j| ucols[j][i]);
    let vm = ComplexMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok((u, s, vm))
}

/// Kronecker product; the left factor owns the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > tolerance::MAX_DIM || cols > tolerance::MAX_DIM {
        return Err(Error::SizeCap {
            dim: rows.max(cols),
            cap: tolerance::MAX_DIM,
        });
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, col| {
        a[(r / b.rows, col / b.cols)] * b[(r % b.rows, col % b.cols)]
    }))
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `exp(i theta H)` for Hermitian `H`.
pub fn expi_hermitian(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eigen(h, true)?;
    let q = spec.eigenvectors.expect("eigenvectors requested");
    let n = h.rows;
    let phases: Vec<Complex> = spec
        .eigenvalues
        .iter()
        .map(|&l| Complex::from_polar(1.0, theta * l))
        .collect();
    let qd = ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]);
    Ok(&qd * &q.adjoint())
}
