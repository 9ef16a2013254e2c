//! Univariate polynomials in `t` over a [`Field`]: characteristic
//! polynomials, the splitting oracle, and companion matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{Elem, Field, FieldError};
use crate::fpoly::{self, FpPoly};
use crate::matspace::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("splitting over {field} is only decided up to degree 3 for the supported shapes; got {poly}")]
    UnsupportedDegree { field: String, poly: String },
    #[error("polynomial must be monic of degree at least 1")]
    NotMonic,
    #[error("cannot parse polynomial {0:?}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitResult {
    /// Roots with multiplicity, ascending in the field's element order.
    Splits { roots: Vec<Elem> },
    /// `witness` is a monic factor of degree >= 2 without roots in the field;
    /// `roots` lists the linear factors removed before it.
    DoesNotSplit { roots: Vec<Elem>, witness: Poly },
}

impl SplitResult {
    pub fn splits(&self) -> bool {
        matches!(self, SplitResult::Splits { .. })
    }

    pub fn witness(&self) -> Option<&Poly> {
        match self {
            SplitResult::Splits { .. } => None,
            SplitResult::DoesNotSplit { witness, .. } => Some(witness),
        }
    }

    pub fn roots(&self) -> &[Elem] {
        match self {
            SplitResult::Splits { roots } | SplitResult::DoesNotSplit { roots, .. } => roots,
        }
    }
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &Field) -> Poly {
        Poly::new(field, vec![])
    }

    pub fn one(field: &Field) -> Poly {
        Poly::new(field, vec![field.one()])
    }

    /// `t`
    pub fn t(field: &Field) -> Poly {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    /// `t - a`
    pub fn linear(field: &Field, a: &Elem) -> Poly {
        Poly::new(field, vec![field.neg(a), field.one()])
    }

    /// Monic polynomial from integer coefficients, ascending.
    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| self.field.is_one(c))
    }

    pub fn leading(&self) -> Option<&Elem> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.add(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.sub(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn scale(&self, c: &Elem) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|a| self.field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    /// Euclidean division by a nonzero polynomial.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        let f = &self.field;
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = f.invert(divisor.leading().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![f.zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = f.mul(&rem[top], &lead_inv);
            let shift = top - dd;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = f.sub(&rem[shift + j], &f.mul(&c, b));
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(|c| f.is_zero(c)) {
                rem.pop();
            }
        }
        (Poly::new(f, quot), Poly::new(f, rem))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => self.scale(&self.field.invert(lc).unwrap()),
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let g = self.gcd(other);
        self.mul(other).divrem(&g).0.monic()
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(&self.field), |acc, _| acc.mul(self))
    }

    /// Parses `t^3 - t + 2`. Coefficients are element literals of the field;
    /// multi-term coefficients (rational functions) must be parenthesized.
    pub fn parse(field: &Field, s: &str) -> Result<Poly, PolyError> {
        let bad = || PolyError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms: Vec<(bool, String)> = vec![];
        let mut cur = String::new();
        let mut negative = false;
        let mut depth = 0i32;
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            let splits = (ch == '+' || ch == '-') && depth == 0 && !matches!(prev, None | Some('/') | Some('^'));
            if splits {
                terms.push((negative, std::mem::take(&mut cur)));
                negative = ch == '-';
            } else if (ch == '-' || ch == '+') && prev.is_none() {
                negative = ch == '-';
            } else {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        terms.push((negative, cur));
        let mut out = Poly::zero(field);
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(bad());
            }
            let (coef, exp) = match find_top_level(&term, 't') {
                None => (term.as_str(), 0u32),
                Some(pos) => {
                    let rest = &term[pos + 1..];
                    let exp = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').and_then(|e| e.parse().ok()).ok_or_else(bad)?
                    };
                    (term[..pos].trim_end_matches('*'), exp)
                }
            };
            let mut c = if coef.is_empty() {
                field.one()
            } else {
                field.parse_elem(strip_outer_parens(coef))?
            };
            if neg {
                c = field.neg(&c);
            }
            let mut mono = vec![field.zero(); exp as usize + 1];
            mono[exp as usize] = c;
            out = out.add(&Poly::new(field, mono));
        }
        Ok(out)
    }
}

fn strip_outer_parens(s: &str) -> &str {
    let Some(inner) = s.strip_prefix('(').and_then(|c| c.strip_suffix(')')) else {
        return s;
    };
    let mut depth = 0i32;
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return s;
        }
    }
    if depth == 0 {
        inner
    } else {
        s
    }
}

fn find_top_level(s: &str, target: char) -> Option<usize> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == target && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = &self.field;
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let (negative, mag) = match c {
                Elem::Rat(r) if r.is_negative() => (true, Elem::Rat(-r)),
                _ => (false, c.clone()),
            };
            let lit = f.format_elem(&mag);
            let lit = if lit.contains(['+', '/']) || (lit.contains('-') && i > 0) {
                format!("({lit})")
            } else {
                lit
            };
            match (first, negative) {
                (true, true) => write!(out, "-")?,
                (true, false) => {}
                (false, true) => write!(out, " - ")?,
                (false, false) => write!(out, " + ")?,
            }
            first = false;
            let unit = f.is_one(&mag);
            match i {
                0 => write!(out, "{lit}")?,
                1 if unit => write!(out, "t")?,
                1 => write!(out, "{lit}t")?,
                _ if unit => write!(out, "t^{i}")?,
                _ => write!(out, "{lit}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(tI - M)` by Berkowitz's division-free
/// algorithm, which is valid in every characteristic.
pub fn char_poly(m: &Matrix) -> Poly {
    let f = m.field();
    let n = m.rows();
    assert_eq!(n, m.cols(), "char_poly needs a square matrix");
    // vect holds coefficients of the characteristic polynomial of the
    // leading r x r submatrix, highest degree first.
    let mut vect: Vec<Elem> = vec![f.one()];
    for r in 0..n {
        // Partition the leading (r+1) x (r+1) block as [[A, R], [C, a]]
        // with a = m[r][r], R = m[0..r][r] (column), C = m[r][0..r] (row).
        let a = m.get(r, r).clone();
        let col: Vec<Elem> = (0..r).map(|i| m.get(i, r).clone()).collect();
        let row: Vec<Elem> = (0..r).map(|j| m.get(r, j).clone()).collect();
        // Toeplitz column: [1, -a, -C R, -C A R, -C A^2 R, ...]
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(f.one());
        toeplitz.push(f.neg(&a));
        let mut v = col.clone();
        for _ in 0..r {
            let dot = row
                .iter()
                .zip(&v)
                .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)));
            toeplitz.push(f.neg(&dot));
            v = (0..r)
                .map(|i| (0..r).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(m.get(i, j), &v[j]))))
                .collect();
        }
        let mut next = vec![f.zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = f.zero();
            for (j, c) in vect.iter().enumerate() {
                if i >= j && i - j < toeplitz.len() {
                    acc = f.add(&acc, &f.mul(&toeplitz[i - j], c));
                }
            }
            *slot = acc;
        }
        vect = next;
    }
    vect.reverse();
    Poly::new(f, vect)
}

/// Companion matrix with ones on the subdiagonal and `-c_0, ..., -c_{n-1}`
/// down the last column.
pub fn companion(p: &Poly) -> Result<Matrix, PolyError> {
    if !p.is_monic() || p.degree() == Some(0) {
        return Err(PolyError::NotMonic);
    }
    let f = p.field();
    let n = p.degree().unwrap();
    let mut m = Matrix::zeros(f, n, n);
    for i in 1..n {
        m.set(i, i - 1, f.one());
    }
    for i in 0..n {
        m.set(i, n - 1, f.neg(&p.coeff(i)));
    }
    Ok(m)
}

/// Minus the coefficient of `t^(d-1)`.
pub fn poly_trace(p: &Poly) -> Result<Elem, PolyError> {
    if !p.is_monic() || p.degree() == Some(0) {
        return Err(PolyError::NotMonic);
    }
    let d = p.degree().unwrap();
    Ok(p.field().neg(&p.coeff(d - 1)))
}

/// Exact decision whether a monic polynomial is a product of linear factors.
pub fn split_completely(p: &Poly) -> Result<SplitResult, PolyError> {
    if !p.is_monic() || p.degree() == Some(0) {
        return Err(PolyError::NotMonic);
    }
    let f = p.field();
    if f.is_finite() {
        let candidates = f.elements()?;
        Ok(deflate_by_candidates(p, &candidates))
    } else if f.characteristic() == 0 {
        split_over_rationals(p)
    } else {
        split_over_rational_functions(p)
    }
}

fn deflate_by_candidates(p: &Poly, candidates: &[Elem]) -> SplitResult {
    let f = p.field();
    let mut rest = p.clone();
    let mut roots = vec![];
    for a in candidates {
        while rest.degree().unwrap_or(0) >= 1 && f.is_zero(&rest.eval(a)) {
            rest = rest.divrem(&Poly::linear(f, a)).0;
            roots.push(a.clone());
        }
        if rest.degree() == Some(0) {
            break;
        }
    }
    if rest.degree() == Some(0) {
        SplitResult::Splits { roots }
    } else {
        SplitResult::DoesNotSplit { roots, witness: rest }
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = vec![];
    let mut large = vec![];
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn split_over_rationals(p: &Poly) -> Result<SplitResult, PolyError> {
    let f = p.field();
    let mut rest = p.clone();
    let mut roots = vec![];
    while rest.degree().unwrap() >= 1 && f.is_zero(&rest.coeff(0)) {
        rest = rest.divrem(&Poly::t(f)).0;
        roots.push(f.zero());
    }
    if rest.degree().unwrap() >= 1 {
        // primitive integer form
        let rats: Vec<BigRational> = rest
            .coeffs()
            .iter()
            .map(|c| match c {
                Elem::Rat(r) => r.clone(),
                _ => unreachable!(),
            })
            .collect();
        let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = rats.iter().map(|r| (r * &lcm).to_integer()).collect();
        let lead = ints.last().unwrap().clone();
        let constant = ints[0].clone();
        let mut candidates = vec![];
        for a in divisors(&constant) {
            for b in divisors(&lead) {
                let r = BigRational::new(a.clone(), b.clone());
                candidates.push(Elem::Rat(-r.clone()));
                candidates.push(Elem::Rat(r));
            }
        }
        candidates.sort();
        candidates.dedup();
        match deflate_by_candidates(&rest, &candidates) {
            SplitResult::Splits { roots: more } => roots.extend(more),
            SplitResult::DoesNotSplit { roots: more, witness } => {
                roots.extend(more);
                roots.sort();
                return Ok(SplitResult::DoesNotSplit { roots, witness });
            }
        }
    }
    roots.sort();
    Ok(SplitResult::Splits { roots })
}

fn split_over_rational_functions(p: &Poly) -> Result<SplitResult, PolyError> {
    let f = p.field();
    let unsupported = || PolyError::UnsupportedDegree {
        field: f.to_string(),
        poly: p.to_string(),
    };
    if p.degree().unwrap() > 3 {
        return Err(unsupported());
    }
    let mut rest = p.clone();
    let mut roots = vec![];
    while rest.degree().unwrap() >= 1 && f.is_zero(&rest.coeff(0)) {
        rest = rest.divrem(&Poly::t(f)).0;
        roots.push(f.zero());
    }
    match rest.degree().unwrap() {
        0 => {}
        1 => roots.push(f.neg(&rest.coeff(0))),
        2 => match quadratic_roots(&rest) {
            Some((r1, r2)) => {
                roots.push(r1);
                roots.push(r2);
            }
            None => {
                roots.sort();
                return Ok(SplitResult::DoesNotSplit { roots, witness: rest });
            }
        },
        _ => return Err(unsupported()),
    }
    roots.sort();
    Ok(SplitResult::Splits { roots })
}

/// Both roots of a monic quadratic over `F_p(x)` when they exist.
fn quadratic_roots(q: &Poly) -> Option<(Elem, Elem)> {
    let f = q.field();
    let b = q.coeff(1);
    let c = q.coeff(0);
    if f.characteristic() != 2 {
        let two = f.from_int(2);
        let disc = f.sub(&f.mul(&b, &b), &f.mul(&f.from_int(4), &c));
        let s = f.is_square(&disc)?;
        let r1 = f.div(&f.sub(&s, &b), &two).unwrap();
        let r2 = f.div(&f.sub(&f.neg(&s), &b), &two).unwrap();
        return Some((r1, r2));
    }
    if f.is_zero(&b) {
        // t^2 + c = (t + sqrt(c))^2
        let s = f.is_square(&c)?;
        return Some((s.clone(), s));
    }
    // t = b u turns the equation into u^2 + u = c / b^2 (Artin-Schreier).
    let d = f.div(&c, &f.mul(&b, &b)).unwrap();
    let u = artin_schreier_root(f, &d)?;
    let r1 = f.mul(&b, &u);
    let r2 = f.add(&r1, &b);
    Some((r1, r2))
}

/// Solves `u^2 + u = d` in `F_2(x)`. Writing `u = r/s` in lowest terms with
/// `s` monic forces `den(d) = s^2` and `r^2 + s r = num(d)`, and the map
/// `r -> r^2 + s r` is `F_2`-linear on coefficient vectors.
fn artin_schreier_root(f: &Field, d: &Elem) -> Option<Elem> {
    let Elem::Fun(rf) = d else { return None };
    let p = 2;
    let s = fpoly::sqrt(rf.denominator(), p)?;
    let target = rf.numerator();
    let bound = fpoly::degree(&s).unwrap_or(0).max(fpoly::degree(target).unwrap_or(0)) + 1;
    let rows = 2 * bound + s.len() + 1;
    // Column j is the image of x^j.
    let columns: Vec<FpPoly> = (0..bound)
        .map(|j| {
            let mut mono = vec![0u32; j + 1];
            mono[j] = 1;
            fpoly::add(&fpoly::mul(&mono, &mono, p), &fpoly::mul(&s, &mono, p), p)
        })
        .collect();
    // Gaussian elimination over F_2 on the augmented system.
    let mut eqs: Vec<(Vec<u8>, u8)> = (0..rows)
        .map(|i| {
            let lhs = columns
                .iter()
                .map(|col| col.get(i).copied().unwrap_or(0) as u8)
                .collect();
            (lhs, target.get(i).copied().unwrap_or(0) as u8)
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = vec![];
    for col in 0..bound {
        let Some(r) = (pivot_row..eqs.len()).find(|&r| eqs[r].0[col] == 1) else {
            continue;
        };
        eqs.swap(pivot_row, r);
        let pivot = eqs[pivot_row].clone();
        for (i, eq) in eqs.iter_mut().enumerate() {
            if i != pivot_row && eq.0[col] == 1 {
                for (a, b) in eq.0.iter_mut().zip(&pivot.0) {
                    *a ^= b;
                }
                eq.1 ^= pivot.1;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if eqs[pivot_row..].iter().any(|eq| eq.1 == 1) {
        return None;
    }
    let mut r = vec![0u32; bound];
    for (i, &col) in pivots.iter().enumerate() {
        r[col] = eqs[i].1 as u32;
    }
    fpoly::trim(&mut r);
    f.rational_function(&r, &s)
}
