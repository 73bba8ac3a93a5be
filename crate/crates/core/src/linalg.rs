//! Dense exact matrices over a [`Field`].
//!
//! Every decomposition uses the same pivot rule: scan columns left to right
//! and take the first nonzero entry top-down among the unreduced rows. All
//! bases, sections and solutions produced downstream inherit this
//! determinism.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::field::{Field, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Row-reduced echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: Matrix,
}

/// Solution set `particular + span(kernel columns)` of a linear system.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vec<Scalar>,
    pub kernel: Matrix,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self::scalar(field, n, field.one())
    }

    pub fn scalar(field: Field, n: usize, s: Scalar) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn diagonal(field: Field, diag: &[Scalar]) -> Self {
        let mut m = Self::zeros(field, diag.len(), diag.len());
        for (i, s) in diag.iter().enumerate() {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { field, rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Integer entries reduced into the field.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            field,
            rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect(),
        )
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Uniform entries over `F_l`; small integers in `-3..=3` over `Q`.
    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| random_scalar(field, rng)).collect();
        Self { field, rows, cols, data }
    }

    pub fn random_invertible<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    pub fn column_vector(field: Field, v: &[Scalar]) -> Self {
        Self::from_columns(field, v.len(), &[v.to_vec()])
    }

    pub fn field(&self) -> Field {
        self.field
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

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| self.field.is_zero(v))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        self.field.is_one(v)
                    } else {
                        self.field.is_zero(v)
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = f.mul_add(&out.data[idx], a, b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector product");
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        acc = f.mul_add(&acc, a, b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(&Field, &Scalar, &Scalar) -> Scalar) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "elementwise shape");
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| op(&f, a, b)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a, s)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> Scalar {
        let f = self.field;
        (0..self.rows.min(self.cols)).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    /// Horizontal concatenation; all blocks must have `rows` rows.
    pub fn hstack(field: Field, rows: usize, blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack rows");
            out.set_block(0, offset, b);
            offset += b.cols;
        }
        out
    }

    pub fn vstack(field: Field, cols: usize, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack cols");
            out.set_block(offset, 0, b);
            offset += b.rows;
        }
        out
    }

    pub fn block_diag(field: Field, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &Matrix) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row + i, col + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(row + i, col + j).clone());
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out.set(ii, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// Kronecker product, row index `i*other.rows + k`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if f.is_zero(a) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, f.mul(a, other.get(k, l)));
                    }
                }
            }
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            let pivot_row: Vec<Scalar> = m.row(r)[c..].to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                let neg = f.neg(&factor);
                for (off, pv) in pivot_row.iter().enumerate() {
                    if f.is_zero(pv) {
                        continue;
                    }
                    let idx = i * m.cols + c + off;
                    m.data[idx] = f.mul_add(&m.data[idx], &neg, pv);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { rank: pivots.len(), pivots, reduced: m }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Columns form a basis of the right kernel, one per free column.
    pub fn kernel_basis(&self) -> Matrix {
        let f = self.field;
        let rr = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (jj, &fc) in free.iter().enumerate() {
            k.set(fc, jj, f.one());
            for (row, &pc) in rr.pivots.iter().enumerate() {
                k.set(pc, jj, f.neg(rr.reduced.get(row, fc)));
            }
        }
        k
    }

    /// The pivot columns of `self`: a basis of the column space made of
    /// original columns.
    pub fn image_basis(&self) -> Matrix {
        let rr = self.rref();
        self.select_columns(&rr.pivots)
    }

    pub fn solve(&self, b: &[Scalar]) -> Option<Solution> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let f = self.field;
        let aug = Matrix::hstack(f, self.rows, &[self, &Matrix::column_vector(f, b)]);
        let rr = aug.rref();
        if rr.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &pc) in rr.pivots.iter().enumerate() {
            x[pc] = rr.reduced.get(row, self.cols).clone();
        }
        Some(Solution { particular: x, kernel: self.kernel_basis() })
    }

    /// A particular solution `X` of `self * X = rhs`, or `None`.
    pub fn solve_matrix(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(rhs.rows, self.rows, "right-hand side rows");
        let f = self.field;
        let aug = Matrix::hstack(f, self.rows, &[self, rhs]);
        let rr = aug.rref();
        if rr.pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(f, self.cols, rhs.cols);
        for (row, &pc) in rr.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, rr.reduced.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let x = self.solve_matrix(&Matrix::identity(self.field, self.rows))?;
        (self.rank() == self.rows).then_some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Greedily picks candidate columns that extend the (independent) columns
    /// of `self`; returns the chosen candidate indices.
    pub fn extend_with(&self, candidates: &Matrix) -> Vec<usize> {
        let combined = Matrix::hstack(self.field, self.rows, &[self, candidates]);
        combined
            .rref()
            .pivots
            .into_iter()
            .filter(|&p| p >= self.cols)
            .map(|p| p - self.cols)
            .collect()
    }

    /// Characteristic polynomial `det(t I - A)`, monic of degree `n`.
    ///
    /// Over `Q` this runs Faddeev–LeVerrier; over `F_l` (where division by
    /// `k` can fail) it reduces to Hessenberg form first.
    pub fn char_poly(&self) -> Polynomial {
        assert!(self.is_square(), "char_poly of a non-square matrix");
        match self.field {
            Field::Rational => self.char_poly_faddeev(),
            Field::Prime(_) => self.char_poly_hessenberg(),
        }
    }

    pub(crate) fn char_poly_faddeev(&self) -> Polynomial {
        let f = self.field;
        let n = self.rows;
        let mut coeffs = vec![f.zero(); n + 1];
        coeffs[n] = f.one();
        let mut m = Matrix::zeros(f, n, n);
        for k in 1..=n {
            m = self.mul(&m).add(&Matrix::scalar(f, n, coeffs[n - k + 1].clone()));
            let tr = self.mul(&m).trace();
            let kk = f.from_u64(k as u64);
            coeffs[n - k] = f.neg(&f.div(&tr, &kk).expect("k invertible in characteristic 0"));
        }
        Polynomial::new(f, coeffs)
    }

    pub(crate) fn char_poly_hessenberg(&self) -> Polynomial {
        let f = self.field;
        let n = self.rows;
        let mut h = self.clone();
        for j in 0..n.saturating_sub(2) {
            let Some(p) = (j + 1..n).find(|&i| !f.is_zero(h.get(i, j))) else {
                continue;
            };
            if p != j + 1 {
                for c in 0..n {
                    h.data.swap(p * n + c, (j + 1) * n + c);
                }
                for r in 0..n {
                    h.data.swap(r * n + p, r * n + j + 1);
                }
            }
            let piv_inv = f.inv(h.get(j + 1, j)).expect("nonzero pivot");
            for k in j + 2..n {
                let u = f.mul(h.get(k, j), &piv_inv);
                if f.is_zero(&u) {
                    continue;
                }
                let neg_u = f.neg(&u);
                for c in 0..n {
                    let v = f.mul_add(h.get(k, c), &neg_u, h.get(j + 1, c));
                    h.set(k, c, v);
                }
                for r in 0..n {
                    let v = f.mul_add(h.get(r, j + 1), &u, h.get(r, k));
                    h.set(r, j + 1, v);
                }
            }
        }
        // p_m = (t - h_mm) p_{m-1} - sum_i h_{i,m} (prod_{k=i+1}^{m} h_{k,k-1}) p_{i-1}
        let mut polys: Vec<Polynomial> = vec![Polynomial::one(f)];
        for m in 1..=n {
            let lin = Polynomial::new(f, vec![f.neg(h.get(m - 1, m - 1)), f.one()]);
            let mut pm = lin.mul(&polys[m - 1]);
            let mut prod = f.one();
            for i in (1..m).rev() {
                prod = f.mul(&prod, h.get(i, i - 1));
                let coeff = f.mul(h.get(i - 1, m - 1), &prod);
                if !f.is_zero(&coeff) {
                    pm = pm.sub(&polys[i - 1].scale(&coeff));
                }
            }
            polys.push(pm);
        }
        polys.pop().expect("at least p_0")
    }

    /// Basis of `ker (A - lambda I)^n`, `n = dim`.
    pub fn generalized_eigenspace(&self, lambda: &Scalar) -> Matrix {
        assert!(self.is_square(), "generalized eigenspace of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Matrix::zeros(self.field, 0, 0);
        }
        let shifted = self.sub(&Matrix::scalar(self.field, n, lambda.clone()));
        // Iterate kernels until they stabilise; cheaper than forming the n-th power.
        let mut power = shifted.clone();
        let mut dim = power.cols - power.rank();
        loop {
            let next = power.mul(&shifted);
            let next_dim = next.cols - next.rank();
            if next_dim == dim {
                return power.kernel_basis();
            }
            power = next;
            dim = next_dim;
        }
    }
}

pub fn random_scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Scalar {
    match field {
        Field::Prime(p) => Scalar::Mod(rng.gen_range(0..p)),
        Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(rng.gen_range(-3i64..=3)))),
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{}x{} [", self.field, self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Dense univariate polynomial, coefficients in ascending degree order with
/// no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn one(field: Field) -> Self {
        Self::new(field, vec![field.one()])
    }

    /// `prod (t - r)`.
    pub fn from_roots(field: Field, roots: &[Scalar]) -> Self {
        roots.iter().fold(Self::one(field), |acc, r| {
            acc.mul(&Self::new(field, vec![field.neg(r), field.one()]))
        })
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| self.field.is_one(c))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let f = self.field;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(f, vec![]);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.mul_add(&out[i + j], a, b);
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        (0..e).fold(Self::one(self.field), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, s: &Scalar) -> Polynomial {
        Self::new(self.field, self.coeffs.iter().map(|c| self.field.mul(c, s)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = f.zero();
        Self::new(
            f,
            (0..n)
                .map(|i| {
                    f.sub(self.coeffs.get(i).unwrap_or(&zero), other.coeffs.get(i).unwrap_or(&zero))
                })
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let f = self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field.is_zero(c))
            .map(|(i, c)| format!("{c}t^{i}"))
            .collect();
        write!(f, "Poly<{}>({})", self.field, terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::Prime(7)
    }

    #[test]
    fn rref_identity_and_zero() {
        let rr = Matrix::identity(f7(), 3).rref();
        assert_eq!(rr.rank, 3);
        assert_eq!(rr.pivots, vec![0, 1, 2]);
        let rr = Matrix::zeros(f7(), 2, 4).rref();
        assert_eq!(rr.rank, 0);
        assert!(rr.pivots.is_empty());
    }

    #[test]
    fn rref_rank_one_mod_seven() {
        // row2 - 4*row1 = (1-8, 2-16) = (0, 0) mod 7
        let a = Matrix::from_i64(f7(), &[&[2, 4], &[1, 2]]);
        let rr = a.rref();
        assert_eq!(rr.rank, 1);
        assert_eq!(rr.pivots, vec![0]);
        assert_eq!(rr.reduced, Matrix::from_i64(f7(), &[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(f7(), 3).kernel_basis().cols(), 0);
        assert_eq!(Matrix::zeros(f7(), 3, 3).kernel_basis().cols(), 3);
        let f5 = Field::Prime(5);
        let k = Matrix::from_i64(f5, &[&[1, 1]]).kernel_basis();
        assert_eq!(k, Matrix::from_i64(f5, &[&[4], &[1]]));
    }

    #[test]
    fn solve_examples() {
        let f = f7();
        let b = vec![f.from_i64(3), f.from_i64(5)];
        let s = Matrix::identity(f, 2).solve(&b).unwrap();
        assert_eq!(s.particular, b);
        assert!(Matrix::zeros(f, 2, 2).solve(&b).is_none());
        let a = Matrix::from_i64(f, &[&[1, 2], &[2, 4]]);
        let s = a.solve(&[f.from_i64(1), f.from_i64(2)]).unwrap();
        assert_eq!(s.particular, vec![f.from_i64(1), f.from_i64(0)]);
        assert_eq!(s.kernel, Matrix::from_i64(f, &[&[5], &[1]]));
    }

    #[test]
    fn char_poly_examples() {
        let z = Matrix::zeros(f7(), 2, 2).char_poly();
        assert_eq!(z.coeffs(), &[Scalar::Mod(0), Scalar::Mod(0), Scalar::Mod(1)]);
        let q = Field::Rational;
        let d = Matrix::diagonal(q, &[q.from_i64(2), q.from_i64(4)]).char_poly();
        assert_eq!(d, Polynomial::from_roots(q, &[q.from_i64(2), q.from_i64(4)]));
        // companion matrix of t^2 + t + 1 over F_5
        let f5 = Field::Prime(5);
        let c = Matrix::from_i64(f5, &[&[0, -1], &[1, -1]]).char_poly();
        assert_eq!(c, Polynomial::new(f5, vec![f5.one(), f5.one(), f5.one()]));
    }

    #[test]
    fn char_poly_routes_agree_on_rationals() {
        let q = Field::Rational;
        let a = Matrix::from_i64(q, &[&[1, 2, 0, 3], &[4, -1, 2, 0], &[0, 5, 1, 1], &[2, 0, -3, 2]]);
        assert_eq!(a.char_poly_faddeev(), a.char_poly_hessenberg());
    }

    #[test]
    fn generalized_eigenspace_examples() {
        let f = f7();
        let q = f.from_i64(2);
        let qi = Matrix::scalar(f, 3, q.clone());
        assert_eq!(qi.generalized_eigenspace(&q).cols(), 3);
        let d = Matrix::diagonal(f, &[f.one(), q.clone()]);
        assert_eq!(d.generalized_eigenspace(&q).cols(), 1);
        let j = Matrix::from_i64(f, &[&[2, 1], &[0, 2]]);
        assert_eq!(j.generalized_eigenspace(&q).cols(), 2);
        assert_eq!(j.generalized_eigenspace(&f.one()).cols(), 0);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = f7();
        let a = Matrix::from_i64(f, &[&[1, 2, 3], &[0, 1, 4], &[5, 6, 0]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(Matrix::from_i64(f, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
