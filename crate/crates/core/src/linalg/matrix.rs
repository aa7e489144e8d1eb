use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::scalar::{inv_mod, mul_mod, Field, Scalar};
use crate::error::{Error, Result};
use crate::par;

/// Dense row-major storage, one backend per field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Entries {
    Q(Vec<BigRational>),
    Fp(Vec<u64>, u64),
}

/// A dense matrix over an exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Entries,
}

// Arithmetic on raw entries, shared by both backends.
trait Ops: Sync {
    type E: Clone + Send + Sync;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
}

struct QOps;
struct FpOps(u64);

impl Ops for QOps {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
}

impl Ops for FpOps {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.0 - b) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.0)
    }
}

const PAR_THRESHOLD: usize = 1 << 14;

/// Gauss-Jordan elimination in place. Returns pivot columns.
fn rref_in_place<O: Ops>(ops: &O, rows: usize, cols: usize, data: &mut [O::E]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(found) = (r..rows).find(|&i| !ops.is_zero(&data[i * cols + c])) else {
            continue;
        };
        if found != r {
            for j in 0..cols {
                data.swap(found * cols + j, r * cols + j);
            }
        }
        let inv = ops.inv(&data[r * cols + c]);
        for j in c..cols {
            let v = ops.mul(&data[r * cols + j], &inv);
            data[r * cols + j] = v;
        }
        let pivot_row: Vec<O::E> = data[r * cols..(r + 1) * cols].to_vec();
        let eliminate = |i: usize, row: &mut [O::E]| {
            if i == r || ops.is_zero(&row[c]) {
                return;
            }
            let factor = row[c].clone();
            for j in c..cols {
                if !ops.is_zero(&pivot_row[j]) {
                    row[j] = ops.sub(&row[j], &ops.mul(&factor, &pivot_row[j]));
                }
            }
        };
        par::for_each_chunk_mut(data, cols, rows * cols >= PAR_THRESHOLD, eliminate);
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn matmul<O: Ops>(ops: &O, a: &[O::E], b: &[O::E], n: usize, k: usize, m: usize) -> Vec<O::E> {
    let mut out = vec![ops.zero(); n * m];
    let body = |i: usize, row: &mut [O::E]| {
        for l in 0..k {
            let x = &a[i * k + l];
            if ops.is_zero(x) {
                continue;
            }
            for j in 0..m {
                let y = &b[l * m + j];
                if !ops.is_zero(y) {
                    row[j] = ops.add(&row[j], &ops.mul(x, y));
                }
            }
        }
    };
    if m > 0 {
        par::for_each_chunk_mut(&mut out, m, n * k * m >= PAR_THRESHOLD * 8, body);
    }
    out
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        let data = match field {
            Field::Rational => Entries::Q(vec![BigRational::zero(); rows * cols]),
            Field::Prime(p) => Entries::Fp(vec![0; rows * cols], p),
        };
        Matrix { rows, cols, data }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows of scalars. All rows must have `cols` entries.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<Scalar>]) -> Result<Self> {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if v.field() != field {
                    return Err(Error::InvalidField(format!("entry ({i},{j}) is over {}", v.field())));
                }
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, field.int(v));
            }
        }
        m
    }

    /// A single column.
    pub fn column(field: Field, v: &[Scalar]) -> Self {
        let mut m = Self::zeros(field, v.len(), 1);
        for (i, x) in v.iter().enumerate() {
            m.set(i, 0, x.clone());
        }
        m
    }

    pub fn field(&self) -> Field {
        match &self.data {
            Entries::Q(_) => Field::Rational,
            Entries::Fp(_, p) => Field::Prime(*p),
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

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {:?}", self.shape());
        match &self.data {
            Entries::Q(d) => Scalar::Q(d[i * self.cols + j].clone()),
            Entries::Fp(d, p) => Scalar::Fp { value: d[i * self.cols + j], p: *p },
        }
    }

    pub fn is_entry_zero(&self, i: usize, j: usize) -> bool {
        match &self.data {
            Entries::Q(d) => d[i * self.cols + j].is_zero(),
            Entries::Fp(d, _) => d[i * self.cols + j] == 0,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {:?}", self.shape());
        let idx = i * self.cols + j;
        match (&mut self.data, v) {
            (Entries::Q(d), Scalar::Q(x)) => d[idx] = x,
            (Entries::Fp(d, p), Scalar::Fp { value, p: q }) if *p == q => d[idx] = value,
            (_, v) => panic!("field mismatch writing {v:?}"),
        }
    }

    /// `self[i][j] += v`.
    pub fn add_at(&mut self, i: usize, j: usize, v: &Scalar) {
        if v.is_zero() {
            return;
        }
        let idx = i * self.cols + j;
        match (&mut self.data, v) {
            (Entries::Q(d), Scalar::Q(x)) => d[idx] += x,
            (Entries::Fp(d, p), Scalar::Fp { value, .. }) => d[idx] = (d[idx] + value) % *p,
            (_, v) => panic!("field mismatch adding {v:?}"),
        }
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Entries::Q(d) => d.iter().all(|x| x.is_zero()),
            Entries::Fp(d, _) => d.iter().all(|&x| x == 0),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.is_entry_zero(i, j) {
                    t.set(j, i, self.get(i, j));
                }
            }
        }
        t
    }

    /// Matrix product. Panics on shape mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch {:?} * {:?}", self.shape(), other.shape());
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let data = match (&self.data, &other.data) {
            (Entries::Q(a), Entries::Q(b)) => Entries::Q(matmul(&QOps, a, b, n, k, m)),
            (Entries::Fp(a, p), Entries::Fp(b, q)) if p == q => {
                Entries::Fp(matmul(&FpOps(*p), a, b, n, k, m), *p)
            }
            _ => panic!("field mismatch in product"),
        };
        Matrix { rows: n, cols: m, data }
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        self.mul(&Matrix::column(self.field(), v)).col(0)
    }

    fn zip_with(&self, other: &Matrix, sign: bool) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        let data = match (&self.data, &other.data) {
            (Entries::Q(a), Entries::Q(b)) => Entries::Q(
                a.iter().zip(b).map(|(x, y)| if sign { x + y } else { x - y }).collect(),
            ),
            (Entries::Fp(a, p), Entries::Fp(b, q)) if p == q => Entries::Fp(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| if sign { (x + y) % p } else { (x + p - y) % p })
                    .collect(),
                *p,
            ),
            _ => panic!("field mismatch in sum"),
        };
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, true)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, false)
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut out = self.clone();
        match (&mut out.data, s) {
            (Entries::Q(d), Scalar::Q(x)) => d.iter_mut().for_each(|e| *e *= x),
            (Entries::Fp(d, p), Scalar::Fp { value, .. }) => {
                let p = *p;
                d.iter_mut().for_each(|e| *e = mul_mod(*e, *value, p))
            }
            _ => panic!("field mismatch in scale"),
        }
        out
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&self.field().int(-1))
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                if !block.is_entry_zero(i, j) || !self.is_entry_zero(r0 + i, c0 + j) {
                    self.set(r0 + i, c0 + j, block.get(i, j));
                }
            }
        }
    }

    /// Adds `block` into `self` at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                if !block.is_entry_zero(i, j) {
                    self.add_at(r0 + i, c0 + j, &block.get(i, j));
                }
            }
        }
    }

    pub fn block(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(self.field(), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if !self.is_entry_zero(r0 + i, c0 + j) {
                    out.set(i, j, self.get(r0 + i, c0 + j));
                }
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field(), self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                if !self.is_entry_zero(i, j) {
                    out.set(i, jj, self.get(i, j));
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field(), rows.len(), self.cols);
        for (ii, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                if !self.is_entry_zero(i, j) {
                    out.set(ii, j, self.get(i, j));
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Matrix::zeros(self.field(), self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut out = Matrix::zeros(self.field(), self.rows + other.rows, self.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, 0, other);
        out
    }

    /// Reduced row echelon form and the strictly increasing pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut out = self.clone();
        let pivots = match &mut out.data {
            Entries::Q(d) => rref_in_place(&QOps, self.rows, self.cols, d),
            Entries::Fp(d, p) => rref_in_place(&FpOps(*p), self.rows, self.cols, d),
        };
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns form a basis of the right kernel `{x : self * x = 0}`.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let field = self.field();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(field, self.cols, free.len());
        for (n, &f) in free.iter().enumerate() {
            k.set(f, n, field.one());
            for (row, &pc) in pivots.iter().enumerate() {
                if !r.is_entry_zero(row, f) {
                    k.set(pc, n, r.get(row, f).neg());
                }
            }
        }
        k
    }

    /// Rows forming a basis of the row space (the nonzero rows of the rref).
    pub fn row_space(&self) -> Matrix {
        let (r, pivots) = self.rref();
        r.block(0, pivots.len(), 0, self.cols)
    }

    /// Columns forming a basis of the column space, taken from `self`.
    pub fn column_space(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }

    /// Solves `self * x = b`. `Ok(None)` iff `b` is not in the image.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let rhs = Matrix::column(self.field(), b);
        Ok(self.solve_matrix(&rhs)?.map(|x| x.col(0)))
    }

    /// Solves `self * X = B` column by column; `None` if any column is unreachable.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, matrix has {}",
                b.rows, self.rows
            )));
        }
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.field(), self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                if !r.is_entry_zero(row, self.cols + j) {
                    x.set(pc, j, r.get(row, self.cols + j));
                }
            }
        }
        Ok(Some(x))
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let id = Matrix::identity(self.field(), self.rows);
        let x = self.solve_matrix(&id).ok()??;
        if self.rank() == self.rows {
            Some(x)
        } else {
            None
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field(), self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.is_entry_zero(i, j) {
                    continue;
                }
                let a = self.get(i, j);
                out.set_block(i * other.rows, j * other.cols, &other.scale(&a));
            }
        }
        out
    }

    /// Direct sum (block diagonal).
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field(), self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field())?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dimension of the intersection of two column spaces.
pub fn intersection_dim(a: &Matrix, b: &Matrix) -> usize {
    a.rank() + b.rank() - a.hstack(b).rank()
}

/// Basis (as columns) of the intersection of the column spaces of `a` and `b`.
pub fn intersection(a: &Matrix, b: &Matrix) -> Matrix {
    let a = a.column_space();
    let b = b.column_space();
    // x in ker [a | -b] gives a*x_a = b*x_b.
    let k = a.hstack(&b.neg()).kernel_basis();
    let coeffs = k.block(0, a.cols(), 0, k.cols());
    a.mul(&coeffs).column_space()
}
