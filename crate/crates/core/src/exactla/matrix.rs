use std::fmt;

use serde::{Deserialize, Serialize};

use super::subspace::Subspace;
use super::zn::Zn;
use crate::error::{Error, Result};

/// Dense row-major matrix over `Z/p^k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Zn,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(ring: Zn, rows: usize, cols: usize) -> Self {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: Zn, n: usize) -> Self {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(
        ring: Zn,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(ring.reduce(f(r, c)));
            }
        }
        Matrix {
            ring,
            rows,
            cols,
            data,
        }
    }

    /// Builds from explicit rows; entries must already be reduced.
    pub fn from_rows(ring: Zn, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "ragged rows: {} vs {}",
                    row.len(),
                    cols
                )));
            }
            ring.check_reduced(row)?;
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            ring,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(ring: Zn, len: usize, columns: &[Vec<u64>]) -> Self {
        Matrix::from_fn(ring, len, columns.len(), |r, c| columns[c][r])
    }

    pub fn from_flat(ring: Zn, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        ring.check_reduced(&data)?;
        Ok(Matrix {
            ring,
            rows,
            cols,
            data,
        })
    }

    pub fn ring(&self) -> Zn {
        self.ring
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.ring.reduce(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn as_flat(&self) -> &[u64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.ring, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(
                self.ring.modulus(),
                other.ring.modulus(),
            ));
        }
        let m = self.ring.modulus();
        let mut out = Matrix::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = (out.data[idx] + a * other.get(k, j)) % m;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.ring.dot(self.row(r), v))
            .collect())
    }

    /// Determinant by Euclidean row reduction; valid over any `Z/p^k`.
    pub fn det(&self) -> Result<u64> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let ring = self.ring;
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut det = 1 % ring.modulus();
        for col in 0..n {
            // Euclid on the column until at most one nonzero entry remains at or below `col`.
            loop {
                let mut best: Option<usize> = None;
                for r in col..n {
                    if a[r][col] != 0 && best.is_none_or(|b| a[r][col] < a[b][col]) {
                        best = Some(r);
                    }
                }
                let Some(p) = best else {
                    return Ok(0);
                };
                if p != col {
                    a.swap(p, col);
                    det = ring.neg(det);
                }
                let pivot = a[col][col];
                let mut done = true;
                for r in col + 1..n {
                    if a[r][col] != 0 {
                        let q = a[r][col] / pivot;
                        let (top, bottom) = a.split_at_mut(r);
                        let pivot_row = &top[col];
                        for (x, &y) in bottom[0].iter_mut().zip(pivot_row) {
                            *x = ring.sub(*x, ring.mul(q % ring.modulus(), y));
                        }
                        if bottom[0][col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            det = ring.mul(det, a[col][col]);
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan with unit pivots, or `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let ring = self.ring;
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut inv = Matrix::identity(ring, n).row_vecs();
        for col in 0..n {
            let p = (col..n).find(|&r| ring.is_unit(a[r][col]))?;
            a.swap(p, col);
            inv.swap(p, col);
            let s = ring.inv(a[col][col])?;
            a[col] = ring.scale_vec(s, &a[col]);
            inv[col] = ring.scale_vec(s, &inv[col]);
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let f = ring.neg(a[r][col]);
                    let (pa, pi) = (a[col].clone(), inv[col].clone());
                    ring.axpy(&mut a[r], f, &pa);
                    ring.axpy(&mut inv[r], f, &pi);
                }
            }
        }
        Some(Matrix {
            ring,
            rows: n,
            cols: n,
            data: inv.concat(),
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.det().is_ok_and(|d| self.ring.is_unit(d))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(rre_form(self)?.rank)
    }

    pub fn to_serde(&self) -> MatrixJson {
        MatrixJson(self.row_vecs())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Matrix(mod {}) {:?}",
            self.ring.modulus(),
            self.row_vecs()
        )
    }
}

/// JSON shape of a matrix: a list of rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<u64>>);

impl MatrixJson {
    pub fn into_matrix(self, ring: Zn) -> Result<Matrix> {
        Matrix::from_rows(ring, &self.0)
    }
}

/// Output of [`rre_form`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduction {
    pub rank: usize,
    /// Reduced row-echelon form, same shape as the input (zero rows at the bottom).
    pub echelon: Matrix,
    pub pivots: Vec<usize>,
    /// Null space of the input as a subspace of the column space.
    pub kernel: Subspace,
}

/// Reduced row-echelon form over a prime field, with rank and kernel.
pub fn rre_form(matrix: &Matrix) -> Result<RowReduction> {
    let ring = matrix.ring;
    ring.require_field()?;
    let (rows, cols) = (matrix.rows, matrix.cols);
    let mut a = matrix.row_vecs();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(p, r);
        let s = ring.inv(a[r][col]).expect("nonzero in a field");
        a[r] = ring.scale_vec(s, &a[r]);
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let f = ring.neg(row[col]);
                ring.axpy(row, f, &pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
    }
    let rank = pivots.len();
    let mut kernel_vectors = Vec::new();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = ring.neg(a[row][free]);
        }
        kernel_vectors.push(v);
    }
    let kernel = Subspace::span(ring, cols, &kernel_vectors)?;
    let echelon = Matrix {
        ring,
        rows,
        cols,
        data: a.concat(),
    };
    Ok(RowReduction {
        rank,
        echelon,
        pivots,
        kernel,
    })
}

/// Result of [`solve_affine`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    /// One solution `x` with `A x = b`.
    Solution(Vec<u64>),
    /// No solution; `certificate` is a row combination `y` with `yA = 0` and `y.b != 0`.
    Infeasible { certificate: Vec<u64> },
}

impl AffineSolution {
    pub fn solution(&self) -> Option<&[u64]> {
        match self {
            AffineSolution::Solution(x) => Some(x),
            AffineSolution::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, AffineSolution::Solution(_))
    }
}

/// Solves `A x = b` over a prime field.
pub fn solve_affine(a: &Matrix, b: &[u64]) -> Result<AffineSolution> {
    let ring = a.ring;
    ring.require_field()?;
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            a.rows
        )));
    }
    ring.check_reduced(b)?;
    let augmented = Matrix::from_fn(ring, a.rows, a.cols + 1, |r, c| {
        if c < a.cols {
            a.get(r, c)
        } else {
            b[r]
        }
    });
    let red = rre_form(&augmented)?;
    if red.pivots.last() == Some(&a.cols) {
        let left_kernel = rre_form(&a.transpose())?.kernel;
        let certificate = left_kernel
            .basis()
            .iter()
            .find(|y| ring.dot(y, b) != 0)
            .cloned()
            .expect("an inconsistent system has a separating left-kernel vector");
        return Ok(AffineSolution::Infeasible { certificate });
    }
    let mut x = vec![0u64; a.cols];
    for (row, &p) in red.pivots.iter().enumerate() {
        x[p] = red.echelon.get(row, a.cols);
    }
    Ok(AffineSolution::Solution(x))
}
