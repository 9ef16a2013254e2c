//! Dense matrices, RREF-canonical subspaces of `F^m` and of `Mat_n(F)`,
//! the trace form and the quadratic form `c2` with its polar form `b2`.
//!
//! Matrices are vectorized in row-major order. That order is part of the
//! canonical form of a [`Subspace`] and of the space file format, so it is
//! fixed.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Elem, Field, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("matrix is singular")]
    Singular,
    #[error("space file: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The PRNG behind every seeded generator in the crate: ChaCha8 keyed by
/// `SeedableRng::seed_from_u64(seed)`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// The unit matrix `E_{i,j}` (zero-based indices).
    pub fn unit(field: &Field, n: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        m.set(i, j, field.one());
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Elem>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_int(v)).collect())
                .collect(),
        )
    }

    /// Square matrix from a row-major vector of length `n^2`.
    pub fn from_vec(field: &Field, n: usize, v: &[Elem]) -> Matrix {
        assert_eq!(v.len(), n * n);
        Matrix {
            field: field.clone(),
            rows: n,
            cols: n,
            data: v.to_vec(),
        }
    }

    pub fn column(field: &Field, v: &[Elem]) -> Matrix {
        Matrix {
            field: field.clone(),
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: &Field, cols: &[Vec<Elem>]) -> Matrix {
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(field, r, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
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

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    /// Row-major entries.
    pub fn as_vec(&self) -> &[Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(&Elem, &Elem) -> Elem) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| op(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| self.field.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| self.field.sub(a, b))
    }

    pub fn scale(&self, c: &Elem) -> Matrix {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| self.field.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), &f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        let f = &self.field;
        (0..self.rows)
            .map(|i| (0..self.cols).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(self.get(i, j), &v[j]))))
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Elem {
        assert!(self.is_square());
        (0..self.rows).fold(self.field.zero(), |acc, i| self.field.add(&acc, self.get(i, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| self.field.is_zero(a))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.field.is_zero(self.get(i, j))))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(&self.field, rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j).clone());
            }
        }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vectors();
        rref(&self.field, &mut rows).len()
    }

    pub fn det(&self) -> Elem {
        assert!(self.is_square());
        let f = &self.field;
        let n = self.rows;
        let mut a = self.row_vectors();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !f.is_zero(&a[r][c])) else {
                return f.zero();
            };
            if p != c {
                a.swap(p, c);
                det = f.neg(&det);
            }
            let pivot = a[c][c].clone();
            det = f.mul(&det, &pivot);
            let inv = f.invert(&pivot).unwrap();
            for r in c + 1..n {
                if f.is_zero(&a[r][c]) {
                    continue;
                }
                let factor = f.mul(&a[r][c], &inv);
                let (top, bottom) = a.split_at_mut(r);
                for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                    *x = f.sub(x, &f.mul(&factor, y));
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix, MatError> {
        if !self.is_square() {
            return Err(MatError::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut rows: Vec<Vec<Elem>> = (0..n)
            .map(|i| {
                let mut r = self.row(i);
                r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
                r
            })
            .collect();
        let pivots = rref(f, &mut rows);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(MatError::Singular);
        }
        Ok(Matrix::from_rows(
            f,
            rows.into_iter().map(|r| r[n..].to_vec()).collect(),
        ))
    }

    /// `P M P^-1`.
    pub fn conjugate(&self, p: &Matrix) -> Result<Matrix, MatError> {
        Ok(p.mul(self).mul(&p.inverse()?))
    }

    /// Basis of the right kernel `{v : M v = 0}` in canonical RREF form.
    pub fn kernel(&self) -> Vec<Vec<Elem>> {
        nullspace(&self.field, &self.row_vectors(), self.cols).basis
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|a| self.field.format_elem(a)).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Reduces `rows` in place to reduced row echelon form, dropping zero rows.
/// Returns the pivot columns.
pub fn rref(field: &Field, rows: &mut Vec<Vec<Elem>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(i) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, i);
        let inv = field.invert(&rows[r][c]).unwrap();
        if !field.is_one(&inv) {
            for v in rows[r].iter_mut().skip(c) {
                *v = field.mul(v, &inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || field.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for j in c..ncols {
                if !field.is_zero(&pivot_row[j]) {
                    row[j] = field.sub(&row[j], &field.mul(&factor, &pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// `{v in F^ncols : row . v = 0 for every row}`.
pub fn nullspace(field: &Field, rows: &[Vec<Elem>], ncols: usize) -> VecSpace {
    let mut rows = rows.to_vec();
    let pivots = rref(field, &mut rows);
    let mut vectors = vec![];
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(&rows[i][free]);
        }
        vectors.push(v);
    }
    VecSpace::span(field, ncols, vectors)
}

/// Solves `A x = b`, returning one solution when consistent.
pub fn solve(a: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    let f = a.field();
    let n = a.cols();
    let mut rows: Vec<Vec<Elem>> = (0..a.rows())
        .map(|i| {
            let mut r = a.row(i);
            r.push(b[i].clone());
            r
        })
        .collect();
    let pivots = rref(f, &mut rows);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![f.zero(); n];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = rows[i][n].clone();
    }
    Some(x)
}

pub fn dot(field: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
}

/// A subspace of `F^ambient` with its RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VecSpace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<Elem>>,
}

impl PartialOrd for VecSpace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VecSpace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient, self.basis.len(), &self.basis).cmp(&(other.ambient, other.basis.len(), &other.basis))
    }
}

impl VecSpace {
    pub fn span(field: &Field, ambient: usize, mut vectors: Vec<Vec<Elem>>) -> VecSpace {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length mismatch");
        rref(field, &mut vectors);
        VecSpace {
            field: field.clone(),
            ambient,
            basis: vectors,
        }
    }

    /// Wraps a basis already known to be in RREF.
    pub fn from_rref(field: &Field, ambient: usize, basis: Vec<Vec<Elem>>) -> VecSpace {
        VecSpace {
            field: field.clone(),
            ambient,
            basis,
        }
    }

    pub fn zero(field: &Field, ambient: usize) -> VecSpace {
        VecSpace::span(field, ambient, vec![])
    }

    pub fn full(field: &Field, ambient: usize) -> VecSpace {
        let basis = (0..ambient)
            .map(|i| {
                (0..ambient)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect()
            })
            .collect();
        VecSpace {
            field: field.clone(),
            ambient,
            basis,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|v| v.iter().position(|a| !self.field.is_zero(a)).unwrap())
            .collect()
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the space.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        let coords: Vec<Elem> = self.pivots().iter().map(|&p| v[p].clone()).collect();
        let recombined = self.combine(&coords);
        (recombined.as_slice() == v).then_some(coords)
    }

    pub fn combine(&self, coords: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            if f.is_zero(c) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                *o = f.add(o, &f.mul(c, x));
            }
        }
        out
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_space(&self, other: &VecSpace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &VecSpace) -> VecSpace {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        VecSpace::span(&self.field, self.ambient, all)
    }

    /// Orthogonal complement for the standard dot product.
    pub fn annihilator(&self) -> VecSpace {
        nullspace(&self.field, &self.basis, self.ambient)
    }

    /// Computed as `(A^o + B^o)^o`.
    pub fn intersect(&self, other: &VecSpace) -> VecSpace {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }
}

/// A linear subspace of `Mat_n(F)`, stored as an RREF basis of row-major
/// vectorized matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    space: VecSpace,
}

impl Subspace {
    pub fn span(field: &Field, n: usize, mats: &[Matrix]) -> Result<Subspace, MatError> {
        for m in mats {
            if m.rows() != n || m.cols() != n {
                return Err(MatError::DimensionMismatch(format!(
                    "expected {n}x{n}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.field() != field {
                return Err(MatError::FieldMismatch(field.to_string(), m.field().to_string()));
            }
        }
        Ok(Subspace {
            n,
            space: VecSpace::span(field, n * n, mats.iter().map(|m| m.as_vec().to_vec()).collect()),
        })
    }

    pub fn from_space(n: usize, space: VecSpace) -> Subspace {
        assert_eq!(space.ambient(), n * n);
        Subspace { n, space }
    }

    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace::from_space(n, VecSpace::zero(field, n * n))
    }

    pub fn full(field: &Field, n: usize) -> Subspace {
        Subspace::from_space(n, VecSpace::full(field, n * n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn field(&self) -> &Field {
        self.space.field()
    }

    pub fn space(&self) -> &VecSpace {
        &self.space
    }

    pub fn basis(&self) -> Vec<Matrix> {
        self.space
            .basis()
            .iter()
            .map(|v| Matrix::from_vec(self.field(), self.n, v))
            .collect()
    }

    /// The member with the given coordinates in the canonical basis.
    pub fn member(&self, coords: &[Elem]) -> Matrix {
        Matrix::from_vec(self.field(), self.n, &self.space.combine(coords))
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        m.rows() == self.n && m.cols() == self.n && self.space.contains(m.as_vec())
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        self.n == other.n && self.space.contains_space(&other.space)
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), MatError> {
        if self.n != other.n {
            return Err(MatError::DimensionMismatch(format!("n = {} vs {}", self.n, other.n)));
        }
        if self.field() != other.field() {
            return Err(MatError::FieldMismatch(
                self.field().to_string(),
                other.field().to_string(),
            ));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, MatError> {
        self.check_compatible(other)?;
        Ok(Subspace::from_space(self.n, self.space.sum(&other.space)))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, MatError> {
        self.check_compatible(other)?;
        Ok(Subspace::from_space(self.n, self.space.intersect(&other.space)))
    }

    pub fn transpose(&self) -> Subspace {
        let mats: Vec<Matrix> = self.basis().iter().map(Matrix::transpose).collect();
        Subspace::span(self.field(), self.n, &mats).unwrap()
    }

    /// `{u : tr(u v) = 0 for all v in S}`. Since `tr(u v) = <u, v^T>` in the
    /// row-major coordinates, this is the dot annihilator of `S^T`.
    pub fn trace_orthocomplement(&self) -> Subspace {
        Subspace::from_space(self.n, self.transpose().space.annihilator())
    }

    /// `P S P^-1`, re-canonicalized.
    pub fn conjugate(&self, p: &Matrix) -> Result<Subspace, MatError> {
        let pinv = p.inverse()?;
        let mats: Vec<Matrix> = self.basis().iter().map(|b| p.mul(b).mul(&pinv)).collect();
        Subspace::span(self.field(), self.n, &mats)
    }
}

pub fn span(field: &Field, n: usize, mats: &[Matrix]) -> Result<Subspace, MatError> {
    Subspace::span(field, n, mats)
}

pub fn intersect(s: &Subspace, t: &Subspace) -> Result<Subspace, MatError> {
    s.intersect(t)
}

pub fn sum(s: &Subspace, t: &Subspace) -> Result<Subspace, MatError> {
    s.sum(t)
}

pub fn membership(m: &Matrix, s: &Subspace) -> bool {
    s.contains(m)
}

/// `tr(A B)`.
pub fn trace_form(a: &Matrix, b: &Matrix) -> Elem {
    let f = a.field();
    let n = a.rows();
    let mut acc = f.zero();
    for i in 0..n {
        for k in 0..n {
            acc = f.add(&acc, &f.mul(a.get(i, k), b.get(k, i)));
        }
    }
    acc
}

pub fn trace_orthocomplement(s: &Subspace) -> Subspace {
    s.trace_orthocomplement()
}

/// Sum of the principal 2x2 minors: the coefficient of `t^(n-2)` in the
/// characteristic polynomial.
pub fn c2(m: &Matrix) -> Elem {
    let f = m.field();
    let n = m.rows();
    let mut acc = f.zero();
    for i in 0..n {
        for j in i + 1..n {
            let minor = f.sub(&f.mul(m.get(i, i), m.get(j, j)), &f.mul(m.get(i, j), m.get(j, i)));
            acc = f.add(&acc, &minor);
        }
    }
    acc
}

/// `tr(A) tr(B) - tr(AB)`.
pub fn b2(a: &Matrix, b: &Matrix) -> Elem {
    let f = a.field();
    f.sub(&f.mul(&a.trace(), &b.trace()), &trace_form(a, b))
}

pub fn conjugate_space(s: &Subspace, p: &Matrix) -> Result<Subspace, MatError> {
    s.conjugate(p)
}

pub fn random_matrix<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let data = (0..rows * cols).map(|_| field.random_elem(rng)).collect();
    Matrix {
        field: field.clone(),
        rows,
        cols,
        data,
    }
}

/// Rejection-samples an invertible matrix from `rng`.
pub fn random_invertible_with<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
    loop {
        let m = random_matrix(field, n, n, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Deterministic per `seed` (see [`seeded_rng`]).
pub fn random_invertible(field: &Field, n: usize, seed: u64) -> Matrix {
    random_invertible_with(field, n, &mut seeded_rng(seed))
}

/// A uniformly drawn spanning set, reduced; may fall short of `dim` only if
/// `dim > n^2`.
pub fn random_subspace<R: Rng + ?Sized>(field: &Field, n: usize, dim: usize, rng: &mut R) -> Subspace {
    let dim = dim.min(n * n);
    let mut s = Subspace::zero(field, n);
    while s.dim() < dim {
        let m = random_matrix(field, n, n, rng);
        s = s.sum(&Subspace::span(field, n, &[m]).unwrap()).unwrap();
    }
    s
}

/// Serializes a list of matrices in the space file layout.
pub fn write_matrices(field: &Field, n: usize, mats: &[Matrix]) -> String {
    let mut out = format!("field {field}\nn {n} dim {}\n", mats.len());
    for m in mats {
        out.push_str(&m.to_string());
    }
    out
}

/// Space file: `field <spec>`, `n <n> dim <d>`, then `d` blocks of `n`
/// lines with `n` element literals each.
pub fn write_space(s: &Subspace) -> String {
    write_matrices(s.field(), s.n(), &s.basis())
}

/// Parses the blocks of a space file without canonicalizing them.
pub fn parse_matrices(text: &str) -> Result<(Field, usize, Vec<Matrix>), MatError> {
    let bad = |msg: &str| MatError::Parse(msg.to_string());
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let field_line = lines.next().ok_or_else(|| bad("missing field line"))?;
    let spec = field_line
        .strip_prefix("field ")
        .ok_or_else(|| bad("first line must be `field <spec>`"))?;
    let field = Field::parse(spec)?;
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("missing `n <n> dim <d>` line"))?
        .split_whitespace()
        .collect();
    let (n, d) = match header.as_slice() {
        ["n", n, "dim", d] => (
            n.parse::<usize>().map_err(|_| bad("bad n"))?,
            d.parse::<usize>().map_err(|_| bad("bad dim"))?,
        ),
        _ => return Err(bad("second line must be `n <n> dim <d>`")),
    };
    let mut mats = Vec::with_capacity(d);
    for _ in 0..d {
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| bad("truncated matrix block"))?;
            let row = line
                .split_whitespace()
                .map(|tok| field.parse_elem(tok))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != n {
                return Err(bad("row length differs from n"));
            }
            rows.push(row);
        }
        mats.push(Matrix::from_rows(&field, rows));
    }
    if lines.next().is_some() {
        return Err(bad("trailing content after the last block"));
    }
    Ok((field, n, mats))
}

pub fn parse_space(text: &str) -> Result<Subspace, MatError> {
    let (field, n, mats) = parse_matrices(text)?;
    Subspace::span(&field, n, &mats)
}
