//! Dense complex matrices and vectors sized for structures with N ≤ 256.
//!
//! Everything is row-major over `Complex64`. Deviations are always measured in
//! the max-entry norm. The Hermitian eigensolver is a cyclic Jacobi iteration:
//! deterministic, free of external dependencies, and accurate to ~1e−14 at the
//! matrix sizes that occur here.

use num_complex::Complex64;

use crate::{Error, Result};

pub type ComplexVector = Vec<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged row lengths".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix with the given states as columns.
    pub fn from_columns(cols: &[ComplexVector]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::Shape("ragged column lengths".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| cols[j][i]))
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

    pub fn column(&self, j: usize) -> ComplexVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "trace of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Kronecker product; index (a, b) of the result maps to a·cols(rhs) + b.
    pub fn tensor(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<ComplexVector> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    pub fn scale(&self, z: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * z).collect(),
        }
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape("add: dimension mismatch".into()));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.add(&rhs.scale(-ONE))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry deviation between two same-shaped matrices.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> Result<f64> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape("diff: dimension mismatch".into()));
        }
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Max-entry deviation of M†M from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        match self.adjoint().matmul(self) {
            Ok(p) => p
                .max_abs_diff(&ComplexMatrix::identity(self.cols))
                .unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_deviation() <= tol
    }

    /// Max-entry deviation from the adjoint.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint()).unwrap_or(f64::INFINITY)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Inner product ⟨u|v⟩, conjugate-linear in the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(Error::Shape(format!(
            "inner: lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(u.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Tensor product of vectors; index (a, b) maps to a·len(v) + b.
pub fn tensor_vec(u: &[Complex64], v: &[Complex64]) -> ComplexVector {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

pub fn max_abs_diff_vec(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Rescales by a unit phase so the first component with |·| > threshold becomes
/// real and positive. Leaves (numerically) zero vectors untouched.
pub fn phase_normalize(v: &mut [Complex64], threshold: f64) {
    if let Some(lead) = v.iter().find(|z| z.norm() > threshold) {
        let phase = lead / lead.norm();
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigendecomposition {
    /// Max-entry residual of M·v − λ·v over all eigenpairs.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        let mut worst = 0.0_f64;
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            let mv = m.apply(&v).expect("shape checked at decomposition");
            for (a, b) in mv.iter().zip(&v) {
                worst = worst.max((a - b * lambda).norm());
            }
        }
        worst
    }
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
///
/// `tol` bounds the accepted hermiticity deviation of the input. The returned
/// eigenvalues are sorted ascending with eigenvector columns permuted to match.
pub fn eig_hermitian(m: &ComplexMatrix, tol: f64) -> Result<Eigendecomposition> {
    if !m.is_square() {
        return Err(Error::Shape(format!("eig of {}x{} matrix", m.rows, m.cols)));
    }
    let dev = m.hermiticity_deviation();
    if dev > tol {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (deviation {dev:.3e})"
        )));
    }
    let n = m.rows;
    let mut a = m.clone();
    // Symmetrize so rounding in the input cannot bias one triangle.
    for p in 0..n {
        a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
        for q in p + 1..n {
            let avg = (a[(p, q)] + a[(q, p)].conj()) * 0.5;
            a[(p, q)] = avg;
            a[(q, p)] = avg.conj();
        }
    }
    let mut vecs = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(1e-300);
    let stop = scale * 1e-15;

    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let absa = apq.norm();
                if absa <= stop * 1e-2 {
                    continue;
                }
                let phase = apq / absa;
                let d = a[(p, p)].re - a[(q, q)].re;
                // Inner rotation angle; |t| ≤ 1 keeps cyclic Jacobi convergent.
                let tau = d / (2.0 * absa);
                let sgn = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = 1.0 / (tau + sgn * (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let cs = Complex64::new(c, 0.0);
                let sp = phase * s; // s·e^{iφ}
                let spc = sp.conj(); // s·e^{−iφ}

                // A ← A·U with U = [[c, −s·e^{iφ}], [s·e^{−iφ}, c]] on (p, q).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cs * akp + spc * akq;
                    a[(k, q)] = -sp * akp + cs * akq;
                }
                // A ← U†·A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cs * apk + sp * aqk;
                    a[(q, k)] = -spc * apk + cs * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                // V ← V·U accumulates eigenvectors as columns.
                for k in 0..n {
                    let vkp = vecs[(k, p)];
                    let vkq = vecs[(k, q)];
                    vecs[(k, p)] = cs * vkp + spc * vkq;
                    vecs[(k, q)] = -sp * vkp + cs * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(Eigendecomposition { values, vectors })
}
