//! Triangularizability and diagonalisability oracles for single matrices,
//! the weak triangularizability check for spaces, and the standard spaces
//! `Sym_n`, `Alt_n`, `sl_n`, `T_n`, `D_n` and joints.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Elem, Field};
use crate::matspace::{seeded_rng, solve, MatError, Matrix, Subspace};
use crate::poly::{char_poly, split_completely, Poly, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("exhaustive checks need a finite field, got {0}")]
    InfiniteFieldExhaustive(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `P M P^-1` is upper triangular.
    Triangularizable { conjugator: Matrix },
    /// A monic factor of `χ_M` of degree at least 2 with no root.
    NotTriangularizable { obstruction: Poly },
}

impl Certificate {
    pub fn is_triangularizable(&self) -> bool {
        matches!(self, Certificate::Triangularizable { .. })
    }

    pub fn conjugator(&self) -> Option<&Matrix> {
        match self {
            Certificate::Triangularizable { conjugator } => Some(conjugator),
            Certificate::NotTriangularizable { .. } => None,
        }
    }

    pub fn obstruction(&self) -> Option<&Poly> {
        match self {
            Certificate::Triangularizable { .. } => None,
            Certificate::NotTriangularizable { obstruction } => Some(obstruction),
        }
    }
}

/// Whether `χ_M` splits over the field of `M`.
pub fn splits(m: &Matrix) -> Result<bool, PolyError> {
    Ok(split_completely(&char_poly(m))?.splits())
}

/// Decides triangularizability of `m` and builds a certificate.
///
/// The conjugator comes from eigenvector deflation: at each step the least
/// root `λ` is taken, together with the first RREF basis vector `v` of
/// `ker(M - λI)`. `v` replaces the standard vector at its pivot, and the
/// process recurses on the lower-right block. Matrices that are already
/// upper triangular get the identity.
pub fn triangularizable(m: &Matrix) -> Result<Certificate, PolyError> {
    assert!(m.is_square());
    let split = split_completely(&char_poly(m))?;
    if let Some(w) = split.witness() {
        return Ok(Certificate::NotTriangularizable { obstruction: w.clone() });
    }
    let p = deflate(m)?;
    debug_assert!(m.conjugate(&p).unwrap().is_upper_triangular());
    Ok(Certificate::Triangularizable { conjugator: p })
}

fn deflate(m: &Matrix) -> Result<Matrix, PolyError> {
    let f = m.field();
    let n = m.rows();
    if m.is_upper_triangular() {
        return Ok(Matrix::identity(f, n));
    }
    let roots = split_completely(&char_poly(m))?;
    let lambda = roots.roots().iter().min().expect("split polynomial has a root").clone();
    let shifted = m.sub(&Matrix::identity(f, n).scale(&lambda));
    let v = shifted
        .kernel()
        .into_iter()
        .next()
        .expect("eigenvalue has an eigenvector");
    let pivot = v.iter().position(|a| !f.is_zero(a)).unwrap();
    let mut cols = vec![v];
    for j in (0..n).filter(|&j| j != pivot) {
        let mut e = vec![f.zero(); n];
        e[j] = f.one();
        cols.push(e);
    }
    let q = Matrix::from_columns(f, &cols);
    let qinv = q.inverse().expect("completed eigenbasis is invertible");
    let reduced = qinv.mul(m).mul(&q);
    let inner = deflate(&reduced.submatrix(1..n, 1..n))?;
    let mut lift = Matrix::identity(f, n);
    lift.set_block(1, 1, &inner);
    Ok(lift.mul(&qinv))
}

/// Minimal polynomial of `v` under `m`: the first linear relation among
/// `v, Mv, M^2 v, ...`.
pub fn local_minimal_poly(m: &Matrix, v: &[Elem]) -> Poly {
    let f = m.field();
    let mut krylov: Vec<Vec<Elem>> = vec![v.to_vec()];
    loop {
        let next = m.mul_vec(krylov.last().unwrap());
        let a = Matrix::from_columns(f, &krylov);
        if let Some(c) = solve(&a, &next) {
            let mut coeffs: Vec<Elem> = c.iter().map(|x| f.neg(x)).collect();
            coeffs.push(f.one());
            return Poly::new(f, coeffs);
        }
        krylov.push(next);
    }
}

/// Minimal polynomial as the lcm of the local minimal polynomials of the
/// standard basis vectors.
pub fn minimal_poly(m: &Matrix) -> Poly {
    let f = m.field();
    let n = m.rows();
    (0..n).fold(Poly::one(f), |acc, i| {
        let mut e = vec![f.zero(); n];
        e[i] = f.one();
        acc.lcm(&local_minimal_poly(m, &e))
    })
}

/// True iff the minimal polynomial splits with distinct roots.
pub fn diagonalisable(m: &Matrix) -> Result<bool, PolyError> {
    let mu = minimal_poly(m);
    if mu.degree() == Some(0) {
        return Ok(true);
    }
    match split_completely(&mu)? {
        crate::poly::SplitResult::Splits { roots } => Ok(roots.windows(2).all(|w| w[0] != w[1])),
        _ => Ok(false),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakVerdict {
    AllTriangularizable,
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakCheckReport {
    pub verdict: WeakVerdict,
    pub counterexample: Option<Matrix>,
    pub mode: CheckMode,
    pub samples_checked: u64,
}

impl WeakCheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == WeakVerdict::AllTriangularizable
    }
}

/// Digits of `index` in base `q`, coordinate 0 least significant.
pub fn odometer(index: u64, q: u64, len: usize) -> Vec<u64> {
    let mut rest = index;
    (0..len)
        .map(|_| {
            let d = rest % q;
            rest /= q;
            d
        })
        .collect()
}

/// True iff the first nonzero digit is 1: the projective representative
/// of its scalar class.
pub fn is_projective_rep(digits: &[u64]) -> bool {
    digits.iter().find(|&&d| d != 0) == Some(&1)
}

/// Projective representatives of `F_q^len \ {0}` in odometer order.
pub fn projective_points(field: &Field, len: usize) -> Result<Vec<Vec<Elem>>, SpaceError> {
    let q = field
        .order()
        .ok_or_else(|| SpaceError::InfiniteFieldExhaustive(field.to_string()))?;
    let total = q.pow(len as u32);
    Ok((1..total)
        .map(|i| odometer(i, q, len))
        .filter(|d| is_projective_rep(d))
        .map(|d| d.into_iter().map(|x| field.element(x)).collect())
        .collect())
}

const CHUNK: u64 = 4096;

/// Exhaustive mode scans one member per scalar class (first nonzero
/// coordinate 1) in odometer order and stops at the first member whose
/// characteristic polynomial does not split. The scan runs in parallel
/// chunks; the reported counterexample is always the least one.
pub fn weakly_triangularizable(s: &Subspace, mode: CheckMode) -> Result<WeakCheckReport, SpaceError> {
    weak_check_with(s, mode, splits)
}

/// Same scan as [`weakly_triangularizable`] with the diagonalisability
/// oracle.
pub fn weakly_diagonalisable(s: &Subspace, mode: CheckMode) -> Result<WeakCheckReport, SpaceError> {
    weak_check_with(s, mode, diagonalisable)
}

fn weak_check_with<F>(s: &Subspace, mode: CheckMode, oracle: F) -> Result<WeakCheckReport, SpaceError>
where
    F: Fn(&Matrix) -> Result<bool, PolyError> + Sync,
{
    let f = s.field();
    let d = s.dim();
    match mode {
        CheckMode::Exhaustive => {
            let q = f
                .order()
                .ok_or_else(|| SpaceError::InfiniteFieldExhaustive(f.to_string()))?;
            let total = q.checked_pow(d as u32).expect("space too large to enumerate");
            let mut checked = 0u64;
            let mut start = 1;
            while start < total {
                let end = (start + CHUNK).min(total);
                let hit = (start..end).into_par_iter().find_map_first(|i| {
                    let digits = odometer(i, q, d);
                    if !is_projective_rep(&digits) {
                        return None;
                    }
                    let coords: Vec<Elem> = digits.into_iter().map(|x| f.element(x)).collect();
                    let m = s.member(&coords);
                    match oracle(&m) {
                        Ok(true) => None,
                        Ok(false) => Some(Ok((i, m))),
                        Err(e) => Some(Err(e)),
                    }
                });
                match hit {
                    Some(found) => {
                        let (i, m) = found?;
                        checked += (start..=i).filter(|&k| is_projective_rep(&odometer(k, q, d))).count() as u64;
                        return Ok(WeakCheckReport {
                            verdict: WeakVerdict::Counterexample,
                            counterexample: Some(m),
                            mode,
                            samples_checked: checked,
                        });
                    }
                    None => {
                        checked += (start..end).filter(|&k| is_projective_rep(&odometer(k, q, d))).count() as u64;
                    }
                }
                start = end;
            }
            Ok(WeakCheckReport {
                verdict: WeakVerdict::AllTriangularizable,
                counterexample: None,
                mode,
                samples_checked: checked,
            })
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = seeded_rng(seed);
            for k in 0..samples {
                let coords: Vec<Elem> = (0..d).map(|_| f.random_elem(&mut rng)).collect();
                let m = s.member(&coords);
                if !oracle(&m)? {
                    return Ok(WeakCheckReport {
                        verdict: WeakVerdict::Counterexample,
                        counterexample: Some(m),
                        mode,
                        samples_checked: k + 1,
                    });
                }
            }
            Ok(WeakCheckReport {
                verdict: WeakVerdict::AllTriangularizable,
                counterexample: None,
                mode,
                samples_checked: samples,
            })
        }
    }
}

/// Symmetric matrices, basis `E_ii` and `E_ij + E_ji` (`i < j`).
pub fn sym_space(field: &Field, n: usize) -> Subspace {
    let mut mats = vec![];
    for i in 0..n {
        for j in i..n {
            let mut m = Matrix::unit(field, n, i, j);
            m.set(j, i, field.one());
            mats.push(m);
        }
    }
    Subspace::span(field, n, &mats).unwrap()
}

/// Alternating matrices: skew-symmetric with zero diagonal.
pub fn alt_space(field: &Field, n: usize) -> Subspace {
    let mut mats = vec![];
    for i in 0..n {
        for j in i + 1..n {
            mats.push(Matrix::unit(field, n, i, j).sub(&Matrix::unit(field, n, j, i)));
        }
    }
    Subspace::span(field, n, &mats).unwrap()
}

/// Trace-zero matrices.
pub fn sl_space(field: &Field, n: usize) -> Subspace {
    let mut mats = vec![];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                mats.push(Matrix::unit(field, n, i, j));
            } else if i + 1 < n {
                mats.push(Matrix::unit(field, n, i, i).sub(&Matrix::unit(field, n, n - 1, n - 1)));
            }
        }
    }
    Subspace::span(field, n, &mats).unwrap()
}

pub fn upper_triangular_space(field: &Field, n: usize) -> Subspace {
    let mats: Vec<Matrix> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| Matrix::unit(field, n, i, j))
        .collect();
    Subspace::span(field, n, &mats).unwrap()
}

/// A random `dim`-dimensional subspace of `T_n`, conjugated by a random
/// invertible matrix. Always weakly triangularizable.
pub fn random_triangularizable_space<R: rand::Rng + ?Sized>(
    field: &Field,
    n: usize,
    dim: usize,
    rng: &mut R,
) -> Subspace {
    let t = upper_triangular_space(field, n);
    let dim = dim.min(t.dim());
    let mut s = Subspace::zero(field, n);
    while s.dim() < dim {
        let coords: Vec<Elem> = (0..t.dim()).map(|_| field.random_elem(rng)).collect();
        s = s.sum(&Subspace::span(field, n, &[t.member(&coords)]).unwrap()).unwrap();
    }
    let p = crate::matspace::random_invertible_with(field, n, rng);
    s.conjugate(&p).unwrap()
}

pub fn diagonal_space(field: &Field, n: usize) -> Subspace {
    let mats: Vec<Matrix> = (0..n).map(|i| Matrix::unit(field, n, i, i)).collect();
    Subspace::span(field, n, &mats).unwrap()
}

/// The block space `[[A, C], [0, B]]` with `A` in `a`, `B` in `b` and `C`
/// arbitrary.
pub fn joint(a: &Subspace, b: &Subspace) -> Result<Subspace, SpaceError> {
    if a.field() != b.field() {
        return Err(SpaceError::FieldMismatch(a.field().to_string(), b.field().to_string()));
    }
    let f = a.field();
    let (n, p) = (a.n(), b.n());
    let size = n + p;
    let mut mats = vec![];
    for m in a.basis() {
        let mut big = Matrix::zeros(f, size, size);
        big.set_block(0, 0, &m);
        mats.push(big);
    }
    for m in b.basis() {
        let mut big = Matrix::zeros(f, size, size);
        big.set_block(n, n, &m);
        mats.push(big);
    }
    for i in 0..n {
        for j in n..size {
            mats.push(Matrix::unit(f, size, i, j));
        }
    }
    Ok(Subspace::span(f, size, &mats)?)
}

/// Joint of a sequence of blocks, nested from the left.
pub fn joint_chain(blocks: &[Subspace]) -> Result<Subspace, SpaceError> {
    let (first, rest) = blocks.split_first().expect("at least one block");
    rest.iter().try_fold(first.clone(), |acc, b| joint(&acc, b))
}

/// A pair `(a, b)` with `a^2 + b^2` not a square, or `None` when the field
/// is Pythagorean. Finite fields are scanned in element order.
pub fn pythagorean_witness(field: &Field) -> Option<(Elem, Elem)> {
    let sum_sq = |a: &Elem, b: &Elem| field.add(&field.mul(a, a), &field.mul(b, b));
    if field.characteristic() == 2 {
        return None;
    }
    if let Ok(elems) = field.elements() {
        for a in &elems {
            for b in &elems {
                if field.is_square(&sum_sq(a, b)).is_none() {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
        return None;
    }
    let candidates = match field.variable() {
        Some(x) => (field.one(), x),
        None => (field.one(), field.one()),
    };
    field
        .is_square(&sum_sq(&candidates.0, &candidates.1))
        .is_none()
        .then_some(candidates)
}

/// `[[a, b], [b, -a]]`, whose characteristic polynomial is `t^2 - (a^2 + b^2)`.
pub fn pythagorean_matrix(field: &Field, a: &Elem, b: &Elem) -> Matrix {
    Matrix::from_rows(field, vec![vec![a.clone(), b.clone()], vec![b.clone(), field.neg(a)]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matspace::random_invertible;

    fn field(s: &str) -> Field {
        Field::parse(s).unwrap()
    }

    #[test]
    fn strictly_upper_is_triangularizable_with_identity() {
        let f = field("F3");
        let m = Matrix::from_ints(&f, &[&[0, 1, 2], &[0, 0, 1], &[0, 0, 0]]);
        let cert = triangularizable(&m).unwrap();
        assert_eq!(cert.conjugator(), Some(&Matrix::identity(&f, 3)));
    }

    #[test]
    fn pythagorean_matrix_over_f3_is_obstructed() {
        let f = field("F3");
        let m = Matrix::from_ints(&f, &[&[1, 1], &[1, -1]]);
        let cert = triangularizable(&m).unwrap();
        assert_eq!(cert.obstruction(), Some(&Poly::parse(&f, "t^2 - 2").unwrap()));
    }

    #[test]
    fn swap_matrix_certificate() {
        let f = field("F3");
        let m = Matrix::from_ints(&f, &[&[0, 1], &[1, 0]]);
        let p = triangularizable(&m).unwrap().conjugator().unwrap().clone();
        assert!(m.conjugate(&p).unwrap().is_upper_triangular());
        let first = p.inverse().unwrap().col(0);
        assert_eq!(first, vec![f.one(), f.one()]);
    }

    #[test]
    fn diagonalisable_examples() {
        let f = field("F3");
        assert!(diagonalisable(&Matrix::identity(&f, 3)).unwrap());
        assert!(!diagonalisable(&Matrix::unit(&f, 2, 0, 1)).unwrap());
        assert!(diagonalisable(&Matrix::from_ints(&f, &[&[0, 1], &[1, 0]])).unwrap());
        assert_eq!(
            minimal_poly(&Matrix::unit(&f, 2, 0, 1)),
            Poly::parse(&f, "t^2").unwrap()
        );
    }

    #[test]
    fn weak_check_examples() {
        let f3 = field("F3");
        let t3 = weakly_triangularizable(&upper_triangular_space(&f3, 3), CheckMode::Exhaustive).unwrap();
        assert!(t3.passed());
        assert_eq!(t3.samples_checked, (3u64.pow(6) - 1) / 2);
        let mat2 = weakly_triangularizable(&Subspace::full(&f3, 2), CheckMode::Exhaustive).unwrap();
        let cex = mat2.counterexample.unwrap();
        assert!(!splits(&cex).unwrap());
        let f2 = field("F2");
        assert!(weakly_triangularizable(&sl_space(&f2, 2), CheckMode::Exhaustive)
            .unwrap()
            .passed());
        let q = field("Q");
        assert!(matches!(
            weakly_triangularizable(&sym_space(&q, 2), CheckMode::Exhaustive),
            Err(SpaceError::InfiniteFieldExhaustive(_))
        ));
    }

    #[test]
    fn constructor_dimensions() {
        for spec in ["F2", "F3", "F4", "Q"] {
            let f = field(spec);
            for n in 1..=4 {
                assert_eq!(sym_space(&f, n).dim(), n * (n + 1) / 2);
                assert_eq!(alt_space(&f, n).dim(), n * (n - 1) / 2);
                assert_eq!(sl_space(&f, n).dim(), n * n - 1);
                assert_eq!(upper_triangular_space(&f, n).dim(), n * (n + 1) / 2);
                assert_eq!(diagonal_space(&f, n).dim(), n);
            }
        }
        let f2 = field("F2");
        assert_eq!(
            alt_space(&f2, 2).basis(),
            vec![Matrix::from_ints(&f2, &[&[0, 1], &[1, 0]])]
        );
    }

    #[test]
    fn joint_examples() {
        let f2 = field("F2");
        let m1 = Subspace::full(&f2, 1);
        assert_eq!(joint(&m1, &m1).unwrap(), upper_triangular_space(&f2, 2));
        assert_eq!(joint(&sl_space(&f2, 2), &m1).unwrap().dim(), 6);
        let f3 = field("F3");
        assert!(matches!(
            joint(&m1, &Subspace::full(&f3, 1)),
            Err(SpaceError::FieldMismatch(..))
        ));
    }

    #[test]
    fn pythagorean_examples() {
        let f3 = field("F3");
        assert_eq!(pythagorean_witness(&f3), Some((f3.one(), f3.one())));
        assert_eq!(pythagorean_witness(&field("F2")), None);
        let q = field("Q");
        assert_eq!(pythagorean_witness(&q), Some((q.one(), q.one())));
        let fx = field("F3(x)");
        let (a, b) = pythagorean_witness(&fx).unwrap();
        assert!(!splits(&pythagorean_matrix(&fx, &a, &b)).unwrap());
    }

    #[test]
    fn sym2_fails_in_odd_characteristic() {
        for spec in ["F3", "F5", "F7", "F9"] {
            let f = field(spec);
            let report = weakly_triangularizable(&sym_space(&f, 2), CheckMode::Exhaustive).unwrap();
            assert!(!report.passed());
            let (a, b) = pythagorean_witness(&f).unwrap();
            let m = pythagorean_matrix(&f, &a, &b);
            assert!(sym_space(&f, 2).contains(&m));
            assert!(!splits(&m).unwrap());
        }
    }

    #[test]
    fn weak_check_is_conjugation_invariant() {
        let f = field("F3");
        for seed in 0..5 {
            let p = random_invertible(&f, 2, seed);
            for s in [sym_space(&f, 2), upper_triangular_space(&f, 2), sl_space(&f, 2)] {
                let a = weakly_triangularizable(&s, CheckMode::Exhaustive).unwrap().passed();
                let b = weakly_triangularizable(&s.conjugate(&p).unwrap(), CheckMode::Exhaustive)
                    .unwrap()
                    .passed();
                assert_eq!(a, b);
            }
        }
    }
}
