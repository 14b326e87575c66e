//! Exact dense linear algebra over C and over k.

mod eigen;
mod span;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::fields::{Const, Field, FieldElement, FieldError, Poly};

pub use eigen::{joint_characteristic_spaces, JointSpace};
pub use span::Span;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("entry ({row}, {col}) lies outside the lower off-diagonal block")]
    NotOffDiagonal { row: usize, col: usize },
    #[error("maps {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("eigenvalue outside the constant tower: residual factor {factor}")]
    EigenvalueOutsideTower { factor: String },
    #[error("matrix has non-constant entries")]
    NotConstant,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatrixK = Matrix<FieldElement>;
pub type MatrixC = Matrix<Const>;

impl<T: Field> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    /// Matrix unit E_{ij}.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.data[i * cols + j] = T::one();
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Row-major entries (the vectorization used for matrix spaces).
    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<T> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| {
            let e = self.get(i, j);
            if i == j { e.is_one() } else { e.is_zero() }
        }))
    }

    /// Nonzero positions.
    pub fn support(&self) -> BTreeSet<(usize, usize)> {
        let mut s = BTreeSet::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_zero() {
                    s.insert((i, j));
                }
            }
        }
        s
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Field, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    fn check_same(&self, rhs: &Self) {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch {}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols);
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_same(rhs);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.plus(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_same(rhs);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.minus(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.negate())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        self.map(|a| a.times(c))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "product shape");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.plus(&a.times(b));
                    }
                }
                acc
            })
            .collect()
    }

    /// [self, rhs] = self·rhs − rhs·self.
    pub fn bracket(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inverse().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let b = m.get(r, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).minus(&f.times(b));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column (free entry 1).
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = r.get(k, free).negate();
            }
            out.push(v);
        }
        out
    }

    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(MatrixError::Singular);
        }
        Ok(r.block(0, n, n, 2 * n))
    }

    /// Some solution of self·v = b.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (i, x) in b.iter().enumerate() {
            aug.set(i, self.cols, x.clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![T::zero(); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            v[p] = r.get(k, self.cols).clone();
        }
        Some(v)
    }

    pub fn determinant(&self) -> Result<T, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(T::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.negate();
            }
            let piv = m.get(c, c).clone();
            det = det.times(&piv);
            let inv = piv.inverse()?;
            for i in c + 1..n {
                let f = m.get(i, c).times(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).minus(&f.times(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Least-degree monic polynomial annihilating the matrix (Krylov on matrix powers).
    pub fn minimal_polynomial(&self) -> Result<Poly<T>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let mut span = Span::new(self.rows * self.cols);
        let mut power = Self::identity(self.rows);
        loop {
            if let Some(coords) = span.coordinates(power.entries()) {
                // power = Σ c_k A^k
                let mut coeffs: Vec<T> = coords.into_iter().map(|c| c.negate()).collect();
                coeffs.push(T::one());
                return Ok(Poly::new(coeffs));
            }
            span.insert(power.entries());
            power = power.mul(self);
        }
    }

    /// Evaluate a polynomial at the matrix.
    pub fn eval_poly(&self, p: &Poly<T>) -> Self {
        let mut acc = Self::zeros(self.rows, self.cols);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..self.rows {
                let v = acc.get(i, i).plus(c);
                acc.set(i, i, v);
            }
        }
        acc
    }
}

impl MatrixK {
    pub fn derive(&self) -> Self {
        self.map(|a| a.derive())
    }

    pub fn from_const(m: &MatrixC) -> Self {
        m.map(|c| FieldElement::constant(c.clone()))
    }

    pub fn to_const(&self) -> Result<MatrixC, MatrixError> {
        self.try_map(|a| a.as_constant().ok_or(MatrixError::NotConstant))
    }

    pub fn is_constant(&self) -> bool {
        self.entries().iter().all(|a| a.is_constant())
    }
}

/// The lower off-diagonal slot of a 2×2 block layout: rows `top..n`, columns `0..top`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffDiagonalSlot {
    pub top: usize,
    pub size: usize,
}

impl OffDiagonalSlot {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.top && i < self.size && j < self.top
    }

    pub fn check<T: Field>(&self, b: &Matrix<T>) -> Result<(), MatrixError> {
        if b.rows() != self.size || b.cols() != self.size {
            return Err(MatrixError::DimensionMismatch(format!("expected {0}x{0}", self.size)));
        }
        for (i, j) in b.support() {
            if !self.contains(i, j) {
                return Err(MatrixError::NotOffDiagonal { row: i, col: j });
            }
        }
        Ok(())
    }
}

/// exp(B) = Id + B for B supported on the off-diagonal slot.
pub fn nilpotent_exp<T: Field>(slot: OffDiagonalSlot, b: &Matrix<T>) -> Result<Matrix<T>, MatrixError> {
    slot.check(b)?;
    Ok(Matrix::identity(slot.size).add(b))
}

/// log(Id + B) = B for B supported on the off-diagonal slot.
pub fn nilpotent_log<T: Field>(slot: OffDiagonalSlot, p: &Matrix<T>) -> Result<Matrix<T>, MatrixError> {
    let b = p.sub(&Matrix::identity(slot.size));
    slot.check(&b)?;
    Ok(b)
}
