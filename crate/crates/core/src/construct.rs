//! Constructive lemmas: completing a regular Hessenberg matrix to a target
//! characteristic polynomial, erasure witnesses (non-triangularizable
//! bordered matrices), and the symmetric construction in characteristic 2.

use thiserror::Error;

use crate::field::{Elem, Field};
use crate::matspace::{solve, MatError, Matrix, VecSpace};
use crate::poly::{char_poly, companion, poly_trace, split_completely, Poly, PolyError};
use crate::spaces::{is_projective_rep, odometer};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("matrix is not regular Hessenberg")]
    NotRegularHessenberg,
    #[error("target trace differs from the matrix trace")]
    TraceMismatch,
    #[error("target polynomial must be monic of degree {0}")]
    BadTarget(usize),
    #[error("column C is zero")]
    ZeroColumn,
    #[error("block C is zero")]
    ZeroC,
    #[error("{0} has no monic quadratic without roots")]
    NoRootlessQuadratic(String),
    #[error("needs characteristic 2, got {0}")]
    NotCharacteristicTwo(String),
    #[error("lambda is a square")]
    SquareLambda,
    #[error("S A is not symmetric, or S is not a symmetric invertible matrix")]
    NotSelfadjoint,
    #[error("the form with Gram matrix S is alternating")]
    AlternatingGram,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

pub fn is_regular_hessenberg(m: &Matrix) -> bool {
    let f = m.field();
    let n = m.rows();
    m.is_square()
        && (0..n).all(|i| (0..n).all(|j| i <= j + 1 || f.is_zero(m.get(i, j))))
        && (1..n).all(|i| !f.is_zero(m.get(i, i - 1)))
}

fn with_top_row(m: &Matrix, row: &[Elem]) -> Matrix {
    let f = m.field();
    let mut out = m.clone();
    for (j, r) in row.iter().enumerate() {
        out.set(0, j + 1, f.add(m.get(0, j + 1), r));
    }
    out
}

/// The row `R` such that adding `R` to entries `(1,2), ..., (1,n)` of `m`
/// gives characteristic polynomial `r`.
///
/// The characteristic polynomial is affine in `R` (only the first row
/// moves), so it is evaluated at `R = 0` and at each unit row, and the
/// coefficients of `t^0, ..., t^(n-2)` give a square linear system.
pub fn hessenberg_complete(m: &Matrix, r: &Poly) -> Result<Vec<Elem>, ConstructError> {
    let f = m.field();
    let n = m.rows();
    if !is_regular_hessenberg(m) {
        return Err(ConstructError::NotRegularHessenberg);
    }
    if r.degree() != Some(n) || !r.is_monic() {
        return Err(ConstructError::BadTarget(n));
    }
    if poly_trace(r)? != m.trace() {
        return Err(ConstructError::TraceMismatch);
    }
    if n == 1 {
        return Ok(vec![]);
    }
    let base = char_poly(m);
    let mut system = Matrix::zeros(f, n - 1, n - 1);
    for j in 0..n - 1 {
        let mut unit = vec![f.zero(); n - 1];
        unit[j] = f.one();
        let delta = char_poly(&with_top_row(m, &unit)).sub(&base);
        for i in 0..n - 1 {
            system.set(i, j, delta.coeff(i));
        }
    }
    let rhs: Vec<Elem> = (0..n - 1).map(|i| f.sub(&r.coeff(i), &base.coeff(i))).collect();
    let row = solve(&system, &rhs).expect("the completion system is always solvable");
    debug_assert!(system.is_invertible());
    assert_eq!(&char_poly(&with_top_row(m, &row)), r, "completion must hit the target");
    Ok(row)
}

/// A monic quadratic without roots: `t^2 - ν` with `ν` the least
/// non-square over odd finite fields, `t^2 + t + ν` with the least such `ν`
/// over even finite fields, `t^2 - 2` over `Q` and `t^2 - x` over `F_p(x)`.
pub fn rootless_quadratic(field: &Field) -> Result<Poly, ConstructError> {
    let none = || ConstructError::NoRootlessQuadratic(field.to_string());
    let candidate = match (field.elements(), field.variable()) {
        (Ok(elems), _) if field.characteristic() == 2 => elems
            .iter()
            .map(|nu| Poly::new(field, vec![nu.clone(), field.one(), field.one()]))
            .find(|p| elems.iter().all(|a| !field.is_zero(&p.eval(a)))),
        (Ok(elems), _) => elems
            .iter()
            .find(|nu| field.is_square(nu).is_none())
            .map(|nu| Poly::new(field, vec![field.neg(nu), field.zero(), field.one()])),
        (Err(_), Some(x)) => Some(Poly::new(field, vec![field.neg(&x), field.zero(), field.one()])),
        (Err(_), None) => Some(Poly::from_ints(field, &[-2, 0, 1])),
    };
    let q = candidate.ok_or_else(none)?;
    if split_completely(&q)?.splits() {
        return Err(none());
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasureWitness {
    pub a: Elem,
    pub r: Vec<Elem>,
    /// `[[a, R], [C, N]]`.
    pub bordered: Matrix,
    /// Rootless quadratic dividing the bordered matrix's characteristic
    /// polynomial.
    pub obstruction: Poly,
}

pub fn bordered(a: &Elem, r: &[Elem], c: &[Elem], n_block: &Matrix) -> Matrix {
    let f = n_block.field();
    let n = n_block.rows();
    let mut m = Matrix::zeros(f, n + 1, n + 1);
    m.set(0, 0, a.clone());
    for j in 0..n {
        m.set(0, j + 1, r[j].clone());
        m.set(j + 1, 0, c[j].clone());
    }
    m.set_block(1, 1, n_block);
    m
}

/// Finds `(a, R)` with `[[a, R], [C, N]]` not triangularizable.
///
/// In a basis starting with the Krylov chain `e_1, M e_1, ...` of
/// `M = [[0, 0], [C, N]]`, the first `d` columns of `M` form the companion
/// matrix `C(p)` over zeros. Perturbing the first row only touches that
/// block, so `a'` fixes the trace and Hessenberg completion sets the
/// block's characteristic polynomial to `t^(d-2) q(t)` with `q` rootless.
pub fn erasure_witness(n_block: &Matrix, c: &[Elem]) -> Result<ErasureWitness, ConstructError> {
    let f = n_block.field();
    let n = n_block.rows();
    if !n_block.is_square() || c.len() != n {
        return Err(ConstructError::DimensionMismatch(format!(
            "N is {}x{}, C has length {}",
            n_block.rows(),
            n_block.cols(),
            c.len()
        )));
    }
    if c.iter().all(|x| f.is_zero(x)) {
        return Err(ConstructError::ZeroColumn);
    }
    let q = rootless_quadratic(f)?;
    let zero_row = vec![f.zero(); n];
    let m = bordered(&f.zero(), &zero_row, c, n_block);
    let size = n + 1;
    let mut cols: Vec<Vec<Elem>> = vec![];
    let mut span = VecSpace::zero(f, size);
    let mut v = vec![f.zero(); size];
    v[0] = f.one();
    while !span.contains(&v) {
        cols.push(v.clone());
        span = VecSpace::span(f, size, cols.clone());
        v = m.mul_vec(&v);
    }
    let d = cols.len();
    for j in 0..size {
        let mut e = vec![f.zero(); size];
        e[j] = f.one();
        if !span.contains(&e) {
            cols.push(e);
            span = VecSpace::span(f, size, cols.clone());
        }
    }
    let basis = Matrix::from_columns(f, &cols);
    let basis_inv = basis.inverse()?;
    let reduced = basis_inv.mul(&m).mul(&basis);
    let block = reduced.submatrix(0..d, 0..d);
    let target = Poly::t(f).pow(d as u32 - 2).mul(&q);
    let a_new = f.sub(&poly_trace(&target)?, &block.trace());
    let mut shifted = block.clone();
    shifted.set(0, 0, f.add(block.get(0, 0), &a_new));
    let r_new = hessenberg_complete(&shifted, &target)?;
    let mut w_new = vec![f.zero(); size];
    w_new[0] = a_new;
    w_new[1..d].clone_from_slice(&r_new);
    // w^T = w'^T Q^-1.
    let w = basis_inv.transpose().mul_vec(&w_new);
    let (a, r) = (w[0].clone(), w[1..].to_vec());
    let out = bordered(&a, &r, c, n_block);
    assert!(divides(&q, &char_poly(&out)), "erasure witness must have q as a factor");
    Ok(ErasureWitness {
        a,
        r,
        bordered: out,
        obstruction: q,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialErasureWitness {
    /// `alpha I_2`, trace zero in characteristic 2.
    pub a: Matrix,
    /// One nonzero row `R`, the other zero.
    pub b: Matrix,
    /// `[[A, B], [C, D]]`.
    pub full: Matrix,
    pub reduced: ErasureWitness,
}

/// `p | f`. A rootless quadratic factor certifies that `f` does not split,
/// which avoids factoring `f` itself.
pub fn divides(p: &Poly, f: &Poly) -> bool {
    f.divrem(p).1.is_zero()
}

/// Characteristic 2 variant with a `2 x 2` block `A` in `sl_2`: a nonzero
/// column `C_j` of `C` is used, `A = alpha I_2` and row `j` of `B` equal to
/// `R`, where `(alpha, R)` is an erasure witness for `(D, C_j)`. The span
/// of `e_j, e_3, ..., e_k` is then invariant with restriction
/// `[[alpha, R], [C_j, D]]`.
pub fn special_erasure_witness(c: &Matrix, d: &Matrix) -> Result<SpecialErasureWitness, ConstructError> {
    let f = d.field();
    if f.characteristic() != 2 {
        return Err(ConstructError::NotCharacteristicTwo(f.to_string()));
    }
    let k2 = d.rows();
    if !d.is_square() || c.rows() != k2 || c.cols() != 2 {
        return Err(ConstructError::DimensionMismatch(format!(
            "C is {}x{}, D is {}x{}",
            c.rows(),
            c.cols(),
            d.rows(),
            d.cols()
        )));
    }
    let j = (0..2)
        .find(|&j| c.col(j).iter().any(|x| !f.is_zero(x)))
        .ok_or(ConstructError::ZeroC)?;
    let reduced = erasure_witness(d, &c.col(j))?;
    let a = Matrix::identity(f, 2).scale(&reduced.a);
    let mut b = Matrix::zeros(f, 2, k2);
    for (col, v) in reduced.r.iter().enumerate() {
        b.set(j, col, v.clone());
    }
    let mut full = Matrix::zeros(f, k2 + 2, k2 + 2);
    full.set_block(0, 0, &a);
    full.set_block(0, 2, &b);
    full.set_block(2, 0, c);
    full.set_block(2, 2, d);
    assert!(
        divides(&reduced.obstruction, &char_poly(&full)),
        "special erasure witness must not be triangularizable"
    );
    Ok(SpecialErasureWitness { a, b, full, reduced })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendixBReport {
    pub s_symmetric: bool,
    pub s_invertible: bool,
    /// `S A = Diag(0, 1, λ)` entry for entry.
    pub sa_diagonal: bool,
    pub char_poly: Poly,
    /// `χ_A = t (t^2 - λ)` exactly.
    pub char_poly_matches: bool,
    pub splits: bool,
    /// Non-split factor when `χ_A` does not split.
    pub obstruction: Option<Poly>,
}

impl AppendixBReport {
    pub fn holds(&self) -> bool {
        self.s_symmetric && self.s_invertible && self.sa_diagonal && self.char_poly_matches && !self.splits
    }
}

/// `A = [[0,0,0],[0,0,λ],[0,1,0]]` and `S = [[1,0,0],[0,0,1],[0,1,0]]`:
/// `A` is selfadjoint for the symmetric form with Gram matrix `S` and has
/// characteristic polynomial `t (t^2 - λ)`.
pub fn appendix_b_construction(
    field: &Field,
    lambda: &Elem,
) -> Result<(Matrix, Matrix, AppendixBReport), ConstructError> {
    if field.is_square(lambda).is_some() {
        return Err(ConstructError::SquareLambda);
    }
    let (z, o) = (field.zero(), field.one());
    let a = Matrix::from_rows(
        field,
        vec![
            vec![z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), lambda.clone()],
            vec![z.clone(), o.clone(), z.clone()],
        ],
    );
    let s = Matrix::from_ints(field, &[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
    let mut diag = Matrix::zeros(field, 3, 3);
    diag.set(1, 1, o);
    diag.set(2, 2, lambda.clone());
    let chi = char_poly(&a);
    let expected = Poly::t(field).mul(&Poly::new(field, vec![field.neg(lambda), z, field.one()]));
    let split = split_completely(&chi)?;
    let report = AppendixBReport {
        s_symmetric: s.is_symmetric(),
        s_invertible: s.is_invertible(),
        sa_diagonal: s.mul(&a) == diag,
        char_poly_matches: chi == expected,
        splits: split.splits(),
        obstruction: split.witness().cloned(),
        char_poly: chi,
    };
    Ok((a, s, report))
}

/// `v^T S u`.
fn form(s: &Matrix, u: &[Elem], v: &[Elem]) -> Elem {
    crate::matspace::dot(s.field(), u, &s.mul_vec(v))
}

fn is_alternating(s: &Matrix, basis: &[Vec<Elem>]) -> bool {
    let f = s.field();
    let diag_zero = basis.iter().all(|b| f.is_zero(&form(s, b, b)));
    let off_zero = basis.iter().all(|u| basis.iter().all(|v| f.is_zero(&form(s, u, v))));
    diag_zero && (f.characteristic() == 2 || off_zero)
}

fn coefficient_set(field: &Field) -> Vec<Elem> {
    match field.elements() {
        Ok(e) => e,
        Err(_) => {
            let mut set = vec![field.zero(), field.one(), field.from_int(-1), field.from_int(2)];
            set.extend(field.variable());
            set.dedup();
            set
        }
    }
}

/// Members of the span of `basis` with coefficients from `coeffs` and
/// first nonzero coefficient 1, in odometer order.
fn candidates(field: &Field, basis: &[Vec<Elem>], coeffs: &[Elem]) -> Vec<Vec<Elem>> {
    let k = coeffs.len() as u64;
    let dim = basis.len();
    let len = basis.first().map_or(0, Vec::len);
    (1..k.pow(dim as u32))
        .map(|i| odometer(i, k, dim))
        .filter(|d| is_projective_rep(d))
        .map(|d| {
            d.iter().zip(basis).fold(vec![field.zero(); len], |acc, (&c, b)| {
                acc.iter()
                    .zip(b)
                    .map(|(x, y)| field.add(x, &field.mul(&coeffs[c as usize], y)))
                    .collect()
            })
        })
        .collect()
}

/// Tries to find `P` with `P A P^-1` symmetric, by building a basis
/// `w_1, ..., w_n` with `w_i^T S w_j = δ_ij`; then `P = W^-1`.
///
/// Each step takes the first candidate `v` with `v^T S v` a nonzero square
/// whose orthogonal complement is not alternating, and scales it to
/// `v^T S v = 1`. Returns `None` when some step has no such candidate.
/// Over infinite fields candidates use a small coefficient set, so `None`
/// is not a proof of impossibility.
pub fn symmetrize_attempt(a: &Matrix, s: &Matrix) -> Result<Option<(Matrix, Matrix)>, ConstructError> {
    let f = a.field();
    let n = a.rows();
    if !s.is_symmetric() || !s.is_invertible() || !s.mul(a).is_symmetric() || s.rows() != n {
        return Err(ConstructError::NotSelfadjoint);
    }
    let full: Vec<Vec<Elem>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect();
    if is_alternating(s, &full) {
        return Err(ConstructError::AlternatingGram);
    }
    let coeffs = coefficient_set(f);
    let mut current = full;
    let mut chosen = vec![];
    while !current.is_empty() {
        let mut pick = None;
        for v in candidates(f, &current, &coeffs) {
            let qv = form(s, &v, &v);
            if f.is_zero(&qv) {
                continue;
            }
            let Some(root) = f.is_square(&qv) else { continue };
            let rows: Vec<Vec<Elem>> = vec![s.mul_vec(&v)];
            let orth: Vec<Vec<Elem>> = nullspace_within(f, &current, &rows);
            if orth.is_empty() || !is_alternating(s, &orth) {
                let inv = f.invert(&root).expect("square root of a nonzero value is nonzero");
                pick = Some((v.iter().map(|x| f.mul(x, &inv)).collect::<Vec<_>>(), orth));
                break;
            }
        }
        let Some((w, orth)) = pick else { return Ok(None) };
        chosen.push(w);
        current = orth;
    }
    let w = Matrix::from_columns(f, &chosen);
    let p = w.inverse()?;
    let b = p.mul(a).mul(&w);
    debug_assert!(b.is_symmetric());
    Ok(Some((p, b)))
}

/// Basis of `{u in span(basis) : row . u = 0 for all rows}`.
fn nullspace_within(field: &Field, basis: &[Vec<Elem>], rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let k = basis.len();
    let coeff_rows: Vec<Vec<Elem>> = rows
        .iter()
        .map(|r| basis.iter().map(|b| crate::matspace::dot(field, r, b)).collect())
        .collect();
    let kernel = crate::matspace::nullspace(field, &coeff_rows, k);
    let len = basis.first().map_or(0, Vec::len);
    kernel
        .basis()
        .iter()
        .map(|c| {
            c.iter().zip(basis).fold(vec![field.zero(); len], |acc, (x, b)| {
                acc.iter().zip(b).map(|(s, y)| field.add(s, &field.mul(x, y))).collect()
            })
        })
        .collect()
}

/// Companion matrix of `r` perturbed back to zero first row entries, used
/// by examples: the regular Hessenberg matrix `C(t^n)`.
pub fn nilpotent_companion(field: &Field, n: usize) -> Matrix {
    companion(&Poly::t(field).pow(n as u32)).expect("t^n is monic")
}
