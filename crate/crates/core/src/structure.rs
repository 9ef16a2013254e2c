//! Adapted vectors, 2-complexes, avoiding bases, dimension identities for
//! the trace-orthogonal complement, invariant subspaces, and the
//! decomposition of a space along its invariant flag.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Elem, Field, DEFAULT_SAMPLE_HEIGHT};
use crate::matspace::{nullspace, MatError, Matrix, Subspace, VecSpace};
use crate::poly::char_poly;
use crate::search::enumerate_subspaces;
use crate::spaces::{
    is_projective_rep, joint_chain, odometer, projective_points, weakly_triangularizable, CheckMode, SpaceError,
};

/// Largest `n` for invariant-subspace scans.
pub const MAX_INVARIANT_N: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructError {
    #[error("zero vector")]
    ZeroVector,
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("profile violation: {0}")]
    ProfileViolation(String),
    #[error("no avoiding basis found")]
    NotFound,
    #[error("invariant subspaces do not form a chain")]
    NotAChain,
    #[error("needs a finite field, got {0}")]
    InfiniteField(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

fn require_finite(field: &Field) -> Result<u64, StructError> {
    field
        .order()
        .ok_or_else(|| StructError::InfiniteField(field.to_string()))
}

fn subspaces_of(field: &Field, n: usize, d: usize) -> Result<Vec<VecSpace>, StructError> {
    require_finite(field)?;
    Ok(enumerate_subspaces(field, n, d)
        .map_err(|_| StructError::InfiniteField(field.to_string()))?
        .collect())
}

fn nonzero(field: &Field, x: &[Elem]) -> Result<(), StructError> {
    if x.iter().all(|a| field.is_zero(a)) {
        Err(StructError::ZeroVector)
    } else {
        Ok(())
    }
}

/// Linear conditions on `r` for `x r^T` to lie in `S`.
fn rank_one_rows(s: &Subspace, x: &[Elem]) -> Vec<Vec<Elem>> {
    let f = s.field();
    let n = s.n();
    s.space()
        .annihilator()
        .basis()
        .iter()
        .map(|a| {
            (0..n)
                .map(|j| (0..n).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&a[i * n + j], &x[i]))))
                .collect()
        })
        .collect()
}

/// `dim(S ∩ Hom(V, Fx))`: the members of `S` with range inside `Fx`.
pub fn range_dim(s: &Subspace, x: &[Elem]) -> Result<usize, StructError> {
    nonzero(s.field(), x)?;
    Ok(nullspace(s.field(), &rank_one_rows(s, x), s.n()).dim())
}

/// Dimension of `{u in S : range(u) ⊆ Fx, tr(u) = 0}`. Such `u` are
/// `x r^T` with `r . x = 0`.
pub fn inadapted_dim(s: &Subspace, x: &[Elem]) -> Result<usize, StructError> {
    nonzero(s.field(), x)?;
    let mut rows = rank_one_rows(s, x);
    rows.push(x.to_vec());
    Ok(nullspace(s.field(), &rows, s.n()).dim())
}

pub fn is_adapted(s: &Subspace, x: &[Elem]) -> Result<bool, StructError> {
    Ok(inadapted_dim(s, x)? == 0)
}

/// Candidate vectors in scan order: projective points over finite fields,
/// otherwise integer vectors of height at most [`DEFAULT_SAMPLE_HEIGHT`]
/// whose first nonzero entry is 1.
pub fn scan_points(field: &Field, n: usize) -> Vec<Vec<Elem>> {
    if field.is_finite() {
        return projective_points(field, n).unwrap();
    }
    let h = DEFAULT_SAMPLE_HEIGHT;
    let base = (2 * h + 1) as u64;
    let value = |d: u64| if d as i64 <= h { d as i64 } else { h - d as i64 };
    (1..base.pow(n as u32))
        .map(|i| odometer(i, base, n))
        .filter(|d| is_projective_rep(d))
        .map(|d| d.into_iter().map(|x| field.from_int(value(x))).collect())
        .collect()
}

/// The first adapted vector in scan order. Over infinite fields the scan
/// is a bounded sample and `None` proves nothing.
pub fn find_adapted(s: &Subspace) -> Result<Option<Vec<Elem>>, StructError> {
    let points = scan_points(s.field(), s.n());
    let hit = points.par_iter().position_first(|x| is_adapted(s, x).unwrap());
    Ok(hit.map(|i| points[i].clone()))
}

/// An `n`-tuple of subspaces of `F^n` with `dim V_i = ⌊(i+1)/2⌋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoComplex {
    members: Vec<VecSpace>,
}

impl TwoComplex {
    pub fn new(members: Vec<VecSpace>) -> Result<TwoComplex, StructError> {
        let n = members.len();
        for (i, v) in members.iter().enumerate() {
            if v.ambient() != n || v.dim() != (i + 2) / 2 {
                return Err(StructError::ProfileViolation(format!(
                    "member {} has dim {} in F^{}, expected {} in F^{n}",
                    i + 1,
                    v.dim(),
                    v.ambient(),
                    (i + 2) / 2
                )));
            }
        }
        Ok(TwoComplex { members })
    }

    pub fn members(&self) -> &[VecSpace] {
        &self.members
    }

    pub fn covers(&self, x: &[Elem]) -> bool {
        self.members.iter().any(|v| v.contains(x))
    }
}

/// True iff no 2-complex contains every adapted vector. Exhaustive over
/// all 2-complexes, so limited to `2 <= n <= 3`.
pub fn check_two_complex_lemma(s: &Subspace) -> Result<bool, StructError> {
    let f = s.field();
    let n = s.n();
    require_finite(f)?;
    if n < 2 {
        return Err(StructError::NotApplicable("2-complexes need n >= 2".into()));
    }
    if n > 3 {
        return Err(StructError::TooLarge(format!("2-complex enumeration for n = {n}")));
    }
    let points = projective_points(f, n)?;
    if points.len() > 128 {
        return Err(StructError::TooLarge(format!("{} projective points", points.len())));
    }
    let mask = |v: &VecSpace| -> u128 {
        points
            .iter()
            .enumerate()
            .filter(|(_, x)| v.contains(x))
            .fold(0, |m, (i, _)| m | 1 << i)
    };
    let mut adapted = 0u128;
    for (i, x) in points.iter().enumerate() {
        if is_adapted(s, x)? {
            adapted |= 1 << i;
        }
    }
    let lines: Vec<u128> = subspaces_of(f, n, 1)?.iter().map(mask).collect();
    let tails: Vec<u128> = if n == 3 {
        subspaces_of(f, n, 2)?.iter().map(mask).collect()
    } else {
        vec![0]
    };
    let escapes = lines.par_iter().all(|&a| {
        lines
            .iter()
            .all(|&b| tails.iter().all(|&c| adapted & !(a | b | c) != 0))
    });
    Ok(escapes)
}

/// A basis of `F^n` avoiding every listed subspace. The list must hold
/// exactly `p` subspaces of each dimension `1..n-1`, with `|F| > p`.
///
/// Vectors are taken greedily in scan order; independence is a matroid
/// condition, so the greedy choice succeeds whenever the allowed vectors
/// span `F^n`.
pub fn avoiding_basis(field: &Field, n: usize, subspaces: &[VecSpace]) -> Result<Vec<Vec<Elem>>, StructError> {
    if n >= 2 {
        let p = subspaces.len() / (n - 1);
        if subspaces.len() != p * (n - 1) {
            return Err(StructError::ProfileViolation(format!(
                "{} subspaces is not a multiple of n - 1 = {}",
                subspaces.len(),
                n - 1
            )));
        }
        for k in 1..n {
            let count = subspaces.iter().filter(|v| v.dim() == k).count();
            if count != p {
                return Err(StructError::ProfileViolation(format!(
                    "{count} subspaces of dim {k}, expected {p}"
                )));
            }
        }
        if field.order().is_some_and(|q| q <= p as u64) {
            return Err(StructError::ProfileViolation(format!(
                "|F| = {} is not > p = {p}",
                field.order().unwrap()
            )));
        }
    } else if !subspaces.is_empty() {
        return Err(StructError::ProfileViolation("n = 1 admits no proper subspaces".into()));
    }
    if subspaces.iter().any(|v| v.ambient() != n) {
        return Err(StructError::ProfileViolation("ambient dimension differs from n".into()));
    }
    let mut chosen: Vec<Vec<Elem>> = vec![];
    let mut span = VecSpace::zero(field, n);
    for x in scan_points(field, n) {
        if chosen.len() == n {
            break;
        }
        if span.contains(&x) || subspaces.iter().any(|v| v.contains(&x)) {
            continue;
        }
        span = VecSpace::span(field, n, [span.basis().to_vec(), vec![x.clone()]].concat());
        chosen.push(x);
    }
    if chosen.len() == n {
        Ok(chosen)
    } else {
        Err(StructError::NotFound)
    }
}

/// `Hom(V, W)`: matrices whose columns lie in `W`.
pub fn hom_into(w: &VecSpace) -> Subspace {
    let f = w.field();
    let n = w.ambient();
    let mats: Vec<Matrix> = w
        .basis()
        .iter()
        .flat_map(|b| {
            (0..n).map(move |j| {
                let mut m = Matrix::zeros(f, n, n);
                for (i, v) in b.iter().enumerate() {
                    m.set(i, j, v.clone());
                }
                m
            })
        })
        .collect();
    Subspace::span(f, n, &mats).unwrap()
}

/// `(dim T ∩ Hom(V, W), dim {u|_W : u in T^⊥})`. The two always sum to
/// `dim(W) * n`.
pub fn restriction_dims(t: &Subspace, w: &VecSpace) -> Result<(usize, usize), StructError> {
    if w.dim() == 0 {
        return Err(StructError::NotApplicable("W must be nonzero".into()));
    }
    let f = t.field();
    let inside = t.intersect(&hom_into(w))?.dim();
    let images: Vec<Vec<Elem>> = t
        .trace_orthocomplement()
        .basis()
        .iter()
        .map(|u| w.basis().iter().flat_map(|b| u.mul_vec(b)).collect())
        .collect();
    let restricted = VecSpace::span(f, w.dim() * t.n(), images).dim();
    Ok((inside, restricted))
}

/// Rank of `x̂ : u -> u(x)` on `S^⊥`. Panics if it differs from
/// `n - dim(S ∩ Hom(V, Fx))`.
pub fn dual_rank(s: &Subspace, x: &[Elem]) -> Result<usize, StructError> {
    nonzero(s.field(), x)?;
    let images: Vec<Vec<Elem>> = s.trace_orthocomplement().basis().iter().map(|u| u.mul_vec(x)).collect();
    let rank = VecSpace::span(s.field(), s.n(), images).dim();
    assert_eq!(rank, s.n() - range_dim(s, x)?, "dual rank identity failed");
    Ok(rank)
}

/// Maximum of [`dual_rank`] over all projective points.
pub fn max_dual_rank(s: &Subspace) -> Result<usize, StructError> {
    let points = projective_points(s.field(), s.n()).map_err(|_| StructError::InfiniteField(s.field().to_string()))?;
    points
        .par_iter()
        .map(|x| dual_rank(s, x))
        .try_reduce(|| 0, |a, b| Ok(a.max(b)))
}

/// Every subspace of `F^n` invariant under all members of `S`, by
/// dimension ascending and scan order within a dimension.
pub fn invariant_subspaces(s: &Subspace) -> Result<Vec<VecSpace>, StructError> {
    let f = s.field();
    let n = s.n();
    require_finite(f)?;
    if n > MAX_INVARIANT_N {
        return Err(StructError::TooLarge(format!("invariant subspaces for n = {n}")));
    }
    let basis = s.basis();
    let mut out = vec![];
    for d in 0..=n {
        let candidates = subspaces_of(f, n, d)?;
        out.extend(
            candidates
                .into_par_iter()
                .filter(|w| {
                    basis
                        .iter()
                        .all(|m| w.basis().iter().all(|v| w.contains(&m.mul_vec(v))))
                })
                .collect::<Vec<_>>(),
        );
    }
    Ok(out)
}

pub fn is_irreducible(s: &Subspace) -> Result<bool, StructError> {
    Ok(invariant_subspaces(s)?.len() == 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// The invariant chain `{0} ⊂ V_1 ⊂ ... ⊂ F^n`.
    pub flag: Vec<VecSpace>,
    pub block_dims: Vec<usize>,
    /// Induced spaces on the successive quotients.
    pub blocks: Vec<Subspace>,
    /// `P` with `P S P^-1` block upper triangular along the flag.
    pub conjugator: Matrix,
}

#[derive(Serialize)]
struct DecompositionJson {
    block_dims: Vec<usize>,
    flag: Vec<Vec<Vec<String>>>,
    conjugator: Vec<Vec<String>>,
}

impl Decomposition {
    pub fn to_json(&self) -> String {
        let f = self.conjugator.field();
        let text = |v: &[Elem]| v.iter().map(|a| f.format_elem(a)).collect::<Vec<_>>();
        serde_json::to_string(&DecompositionJson {
            block_dims: self.block_dims.clone(),
            flag: self
                .flag
                .iter()
                .map(|v| v.basis().iter().map(|b| text(b)).collect())
                .collect(),
            conjugator: self.conjugator.row_vectors().iter().map(|r| text(r)).collect(),
        })
        .unwrap()
    }
}

/// Splits `S` along its invariant flag. Fails with `NotAChain` when the
/// invariant subspaces are not totally ordered.
pub fn decompose(s: &Subspace) -> Result<Decomposition, StructError> {
    let f = s.field();
    let n = s.n();
    let flag = invariant_subspaces(s)?;
    let chain = flag
        .windows(2)
        .all(|w| w[0].dim() < w[1].dim() && w[1].contains_space(&w[0]));
    if !chain {
        return Err(StructError::NotAChain);
    }
    let mut cols: Vec<Vec<Elem>> = vec![];
    let mut span = VecSpace::zero(f, n);
    for v in &flag[1..] {
        for b in v.basis() {
            if !span.contains(b) {
                cols.push(b.clone());
                span = VecSpace::span(f, n, cols.clone());
            }
        }
    }
    let q = Matrix::from_columns(f, &cols);
    let p = q.inverse()?;
    let conj = s.conjugate(&p)?;
    let mut blocks = vec![];
    let mut block_dims = vec![];
    for w in flag.windows(2) {
        let (lo, hi) = (w[0].dim(), w[1].dim());
        let mats: Vec<Matrix> = conj.basis().iter().map(|m| m.submatrix(lo..hi, lo..hi)).collect();
        blocks.push(Subspace::span(f, hi - lo, &mats)?);
        block_dims.push(hi - lo);
    }
    assert!(
        joint_chain(&blocks)?.contains_space(&conj),
        "conjugated space must lie in the joint of its blocks"
    );
    Ok(Decomposition {
        flag,
        block_dims,
        blocks,
        conjugator: p,
    })
}

/// `|GL_n(F_q)|`.
pub fn gl_order(q: u64, n: usize) -> u128 {
    let qn = (q as u128).pow(n as u32);
    (0..n).map(|i| qn - (q as u128).pow(i as u32)).product()
}

/// All invertible `n x n` matrices, in odometer order of their row-major
/// entries. Fails when the group order exceeds `cap`.
pub fn general_linear_group(field: &Field, n: usize, cap: u64) -> Result<Vec<Matrix>, StructError> {
    let q = require_finite(field)?;
    let order = gl_order(q, n);
    if order > cap as u128 {
        return Err(StructError::TooLarge(format!(
            "|GL_{n}({field})| = {order} exceeds {cap}"
        )));
    }
    let total = q.pow((n * n) as u32);
    Ok((0..total)
        .into_par_iter()
        .filter_map(|i| {
            let entries: Vec<Elem> = odometer(i, q, n * n).into_iter().map(|d| field.element(d)).collect();
            let m = Matrix::from_vec(field, n, &entries);
            m.is_invertible().then_some(m)
        })
        .collect())
}

/// Least canonical form among all conjugates of `s`.
pub fn orbit_canonical_form(s: &Subspace, group: &[Matrix]) -> Subspace {
    group
        .par_iter()
        .map(|p| s.conjugate(p).unwrap())
        .min()
        .unwrap_or_else(|| s.clone())
}

/// Similarity invariants used when the group is too large to enumerate:
/// dimension, irreducibility, weak-check verdict and the sorted list of
/// characteristic polynomials of all members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub dim: usize,
    pub irreducible: bool,
    pub weakly_triangularizable: bool,
    pub char_polys: Vec<String>,
}

pub fn fingerprint(s: &Subspace) -> Result<Fingerprint, StructError> {
    let f = s.field();
    let q = require_finite(f)?;
    let d = s.dim();
    let mut char_polys: Vec<String> = (0..q.pow(d as u32))
        .into_par_iter()
        .map(|i| {
            let coords: Vec<Elem> = odometer(i, q, d).into_iter().map(|x| f.element(x)).collect();
            char_poly(&s.member(&coords)).to_string()
        })
        .collect();
    char_polys.sort();
    Ok(Fingerprint {
        dim: d,
        irreducible: is_irreducible(s)?,
        weakly_triangularizable: weakly_triangularizable(s, CheckMode::Exhaustive)?.passed(),
        char_polys,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    /// Decided by comparing orbit canonical forms.
    Exact(bool),
    /// Heuristic: fingerprints agree or not.
    Fingerprint(bool),
}

impl Similarity {
    pub fn holds(self) -> bool {
        match self {
            Similarity::Exact(b) | Similarity::Fingerprint(b) => b,
        }
    }
}

/// Similarity of two spaces of the same matrix size, exact when
/// `|GL_n(F_q)| <= cap`.
pub fn spaces_similar(a: &Subspace, b: &Subspace, cap: u64) -> Result<Similarity, StructError> {
    if a.n() != b.n() || a.dim() != b.dim() || a.field() != b.field() {
        return Ok(Similarity::Exact(false));
    }
    match general_linear_group(a.field(), a.n(), cap) {
        Ok(group) => Ok(Similarity::Exact(
            orbit_canonical_form(a, &group) == orbit_canonical_form(b, &group),
        )),
        Err(StructError::TooLarge(_)) => Ok(Similarity::Fingerprint(fingerprint(a)? == fingerprint(b)?)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matspace::random_invertible;
    use crate::spaces::{joint, sl_space, sym_space, upper_triangular_space};

    fn field(s: &str) -> Field {
        Field::parse(s).unwrap()
    }

    fn vector(f: &Field, v: &[i64]) -> Vec<Elem> {
        v.iter().map(|&x| f.from_int(x)).collect()
    }

    #[test]
    fn adapted_examples() {
        let f = field("F3");
        let t2 = upper_triangular_space(&f, 2);
        assert_eq!(inadapted_dim(&t2, &vector(&f, &[1, 0])).unwrap(), 1);
        assert!(is_adapted(&t2, &vector(&f, &[0, 1])).unwrap());
        assert!(is_adapted(&Subspace::zero(&f, 2), &vector(&f, &[1, 1])).unwrap());
        assert_eq!(inadapted_dim(&t2, &vector(&f, &[0, 0])), Err(StructError::ZeroVector));
        assert_eq!(find_adapted(&t2).unwrap(), Some(vector(&f, &[0, 1])));
    }

    #[test]
    fn two_complex_examples() {
        let f = field("F3");
        assert!(check_two_complex_lemma(&upper_triangular_space(&f, 2)).unwrap());
        assert!(check_two_complex_lemma(&upper_triangular_space(&f, 3)).unwrap());
        assert!(matches!(
            check_two_complex_lemma(&upper_triangular_space(&f, 4)),
            Err(StructError::TooLarge(_))
        ));
        let line = VecSpace::span(&f, 2, vec![vector(&f, &[1, 0])]);
        assert!(TwoComplex::new(vec![line.clone(), line]).is_ok());
    }

    #[test]
    fn avoiding_basis_examples() {
        let f3 = field("F3");
        let e1 = VecSpace::span(&f3, 2, vec![vector(&f3, &[1, 0])]);
        assert_eq!(
            avoiding_basis(&f3, 2, &[e1]).unwrap(),
            vec![vector(&f3, &[0, 1]), vector(&f3, &[1, 1])]
        );
        let line = VecSpace::span(&f3, 3, vec![vector(&f3, &[1, 0, 0])]);
        let plane = VecSpace::span(&f3, 3, vec![vector(&f3, &[0, 1, 0]), vector(&f3, &[0, 0, 1])]);
        let basis = avoiding_basis(&f3, 3, &[line.clone(), plane.clone()]).unwrap();
        assert_eq!(VecSpace::span(&f3, 3, basis.clone()).dim(), 3);
        assert!(basis.iter().all(|x| !line.contains(x) && !plane.contains(x)));
        let f2 = field("F2");
        let a = VecSpace::span(&f2, 2, vec![vector(&f2, &[1, 0])]);
        let b = VecSpace::span(&f2, 2, vec![vector(&f2, &[0, 1])]);
        assert!(matches!(
            avoiding_basis(&f2, 2, &[a, b]),
            Err(StructError::ProfileViolation(_))
        ));
    }

    #[test]
    fn restriction_and_dual_rank_examples() {
        let f = field("F3");
        let t2 = upper_triangular_space(&f, 2);
        let w = VecSpace::span(&f, 2, vec![vector(&f, &[1, 0])]);
        assert_eq!(restriction_dims(&t2, &w).unwrap(), (2, 0));
        assert_eq!(
            restriction_dims(&Subspace::full(&f, 2), &VecSpace::full(&f, 2)).unwrap(),
            (4, 0)
        );
        assert_eq!(restriction_dims(&Subspace::zero(&f, 2), &w).unwrap(), (0, 2));
        assert_eq!(dual_rank(&t2, &vector(&f, &[1, 0])).unwrap(), 0);
        assert_eq!(dual_rank(&t2, &vector(&f, &[0, 1])).unwrap(), 1);
        assert_eq!(max_dual_rank(&t2).unwrap(), 1);
    }

    #[test]
    fn invariant_subspace_examples() {
        let f3 = field("F3");
        let lattice = invariant_subspaces(&upper_triangular_space(&f3, 2)).unwrap();
        assert_eq!(lattice.len(), 3);
        assert_eq!(lattice[1], VecSpace::span(&f3, 2, vec![vector(&f3, &[1, 0])]));
        assert!(is_irreducible(&sym_space(&f3, 2)).unwrap());
        assert!(is_irreducible(&sl_space(&field("F2"), 2)).unwrap());
    }

    #[test]
    fn decompose_examples() {
        let f3 = field("F3");
        assert_eq!(
            decompose(&upper_triangular_space(&f3, 3)).unwrap().block_dims,
            vec![1, 1, 1]
        );
        assert_eq!(decompose(&sym_space(&f3, 2)).unwrap().block_dims, vec![2]);
        let f2 = field("F2");
        let j = joint(&sl_space(&f2, 2), &Subspace::full(&f2, 1)).unwrap();
        let p = random_invertible(&f2, 3, 7);
        let dec = decompose(&j.conjugate(&p).unwrap()).unwrap();
        assert_eq!(dec.block_dims, vec![2, 1]);
        assert!(spaces_similar(&dec.blocks[0], &sl_space(&f2, 2), 100_000)
            .unwrap()
            .holds());
        assert!(matches!(
            decompose(&Subspace::zero(&f3, 2)),
            Err(StructError::NotAChain)
        ));
        assert!(dec.to_json().starts_with("{\"block_dims\":[2,1],\"flag\":"));
    }

    #[test]
    fn group_orders() {
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(3, 2), 48);
        assert_eq!(general_linear_group(&field("F3"), 2, 100).unwrap().len(), 48);
        assert_eq!(general_linear_group(&field("F2"), 3, 1000).unwrap().len(), 168);
    }
}
