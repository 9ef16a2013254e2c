//! Exact coefficient fields: prime fields `F_p`, prime-power fields
//! `F_p[t]/(m)`, the rationals, and rational functions `F_p(x)`.
//!
//! A [`Field`] is a cheap, shareable handle; elements are plain [`Elem`]
//! values kept in canonical form so that structural equality is equality
//! of field elements.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::fpoly::{self, FpPoly};

/// Largest prime-power order for which log/exp tables are built.
pub const MAX_PRIME_POWER_ORDER: u64 = 1 << 20;

/// Bound on integer coordinates drawn when sampling over `Q`.
pub const DEFAULT_SAMPLE_HEIGHT: i64 = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus {0} is not irreducible")]
    ReducibleModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field {0} is infinite")]
    InfiniteField(String),
    #[error("cannot parse field spec {0:?}")]
    BadSpec(String),
    #[error("cannot parse element {0:?} in {1}")]
    BadElement(String, String),
    #[error("field order {0} exceeds the supported maximum")]
    Unsupported(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime {
        p: u32,
    },
    /// `modulus` is monic of degree `k`, ascending coefficients.
    PrimePower {
        p: u32,
        k: u32,
        modulus: Vec<u32>,
    },
    Rationals,
    RationalFunction {
        p: u32,
    },
}

/// A reduced fraction of polynomials over `F_p` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: FpPoly,
    den: FpPoly,
}

impl RatFn {
    pub fn numerator(&self) -> &[u32] {
        &self.num
    }

    pub fn denominator(&self) -> &[u32] {
        &self.den
    }
}

impl PartialOrd for RatFn {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RatFn {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        fpoly::cmp(&self.den, &other.den).then_with(|| fpoly::cmp(&self.num, &other.num))
    }
}

/// A field element in canonical form. Elements of different fields must not
/// be mixed; the owning [`Field`] is not stored in the element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// Residue (prime fields) or base-`p` encoding of the reduced
    /// polynomial residue (prime-power fields).
    Fin(u32),
    Rat(BigRational),
    Fun(RatFn),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct FieldPredicates {
    pub nrc: bool,
    pub quadratically_closed: bool,
    pub pythagorean: bool,
    pub perfect: bool,
}

enum Kind {
    Prime {
        p: u32,
    },
    PrimePower {
        p: u32,
        k: u32,
        q: u32,
        /// exp[i] = g^i for a fixed primitive element g, i in 0..q-1.
        exp: Vec<u32>,
        /// log[a] for a != 0.
        log: Vec<u32>,
    },
    Rationals,
    RationalFunction {
        p: u32,
    },
}

struct Inner {
    spec: FieldSpec,
    kind: Kind,
}

#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.inner.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.spec.hash(state);
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.spec.fmt(f)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `q = p^k` when `q` is a prime power.
fn as_prime_power(q: u64) -> Option<(u32, u32)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut k = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        k += 1;
    }
    Some((p as u32, k))
}

impl FieldSpec {
    pub fn prime(p: u32) -> Self {
        FieldSpec::Prime { p }
    }

    /// Prime-power spec with the default modulus: the monic irreducible of
    /// degree `k` whose lower coefficients have the least base-`p` encoding.
    pub fn prime_power(p: u32, k: u32) -> Self {
        FieldSpec::PrimePower {
            p,
            k,
            modulus: fpoly::least_irreducible(p, k),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { p } => write!(f, "F{p}"),
            FieldSpec::PrimePower { p, k, modulus } => {
                let q = (*p as u64).pow(*k);
                if is_prime(*p as u64) && *k >= 1 && *modulus == fpoly::least_irreducible(*p, *k) {
                    write!(f, "F{q}")
                } else {
                    write!(f, "F{q}[{}]", fpoly::format(modulus, 't'))
                }
            }
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::RationalFunction { p } => write!(f, "F{p}(x)"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `F3`, `F9`, `F9[t^2+1]`, `Q`, `F2(x)`.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        let bad = || FieldError::BadSpec(s.to_string());
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let rest = s.strip_prefix('F').ok_or_else(bad)?;
        if let Some(p) = rest.strip_suffix("(x)") {
            let p: u64 = p.parse().map_err(|_| bad())?;
            if !is_prime(p) {
                return Err(FieldError::NonPrime(p));
            }
            return Ok(FieldSpec::RationalFunction { p: p as u32 });
        }
        let (order, modulus) = match rest.find('[') {
            Some(pos) => {
                let m = rest[pos + 1..].strip_suffix(']').ok_or_else(bad)?;
                (&rest[..pos], Some(m))
            }
            None => (rest, None),
        };
        let q: u64 = order.parse().map_err(|_| bad())?;
        let (p, k) = as_prime_power(q).ok_or(FieldError::NonPrime(q))?;
        if k == 1 && modulus.is_none() {
            return Ok(FieldSpec::Prime { p });
        }
        let modulus = match modulus {
            Some(m) => fpoly::parse(m, 't', p).ok_or_else(bad)?,
            None => fpoly::least_irreducible(p, k),
        };
        Ok(FieldSpec::PrimePower { p, k, modulus })
    }
}

/// Builds a field context from its spec, validating primality and
/// irreducibility of the modulus.
pub fn make_field(spec: FieldSpec) -> Result<Field, FieldError> {
    let kind = match &spec {
        FieldSpec::Prime { p } => {
            if !is_prime(*p as u64) || *p >= 1 << 31 {
                return Err(FieldError::NonPrime(*p as u64));
            }
            Kind::Prime { p: *p }
        }
        FieldSpec::RationalFunction { p } => {
            if !is_prime(*p as u64) || *p >= 1 << 31 {
                return Err(FieldError::NonPrime(*p as u64));
            }
            Kind::RationalFunction { p: *p }
        }
        FieldSpec::Rationals => Kind::Rationals,
        FieldSpec::PrimePower { p, k, modulus } => {
            let (p, k) = (*p, *k);
            if !is_prime(p as u64) {
                return Err(FieldError::NonPrime(p as u64));
            }
            let q = (p as u64)
                .checked_pow(k)
                .filter(|&q| q <= MAX_PRIME_POWER_ORDER)
                .ok_or(FieldError::Unsupported(u64::MAX))?;
            let mut m = modulus.clone();
            fpoly::trim(&mut m);
            if m.len() != k as usize + 1 || m[k as usize] != 1 || !fpoly::is_irreducible(&m, p) {
                return Err(FieldError::ReducibleModulus(fpoly::format(&m, 't')));
            }
            let (exp, log) = build_log_tables(p, k, q as u32, &m);
            Kind::PrimePower {
                p,
                k,
                q: q as u32,
                exp,
                log,
            }
        }
    };
    Ok(Field {
        inner: Arc::new(Inner { spec, kind }),
    })
}

fn encode(f: &[u32], p: u32) -> u32 {
    f.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut code: u32, p: u32, k: u32) -> FpPoly {
    let mut f = Vec::with_capacity(k as usize);
    for _ in 0..k {
        f.push(code % p);
        code /= p;
    }
    fpoly::trim(&mut f);
    f
}

fn build_log_tables(p: u32, k: u32, q: u32, modulus: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let order = (q - 1) as u64;
    let factors = prime_factors(order);
    let generator = (1..q)
        .map(|c| decode(c, p, k))
        .find(|g| {
            factors
                .iter()
                .all(|&r| !fpoly::is_one(&fpoly::pow_modpoly(g, order / r, modulus, p)))
        })
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = Vec::with_capacity(q as usize - 1);
    let mut log = vec![0u32; q as usize];
    let mut cur: FpPoly = vec![1];
    for i in 0..q - 1 {
        let code = encode(&cur, p);
        exp.push(code);
        log[code as usize] = i;
        cur = fpoly::rem(&fpoly::mul(&cur, &generator, p), modulus, p);
    }
    (exp, log)
}

impl Field {
    pub fn parse(spec: &str) -> Result<Field, FieldError> {
        make_field(spec.parse()?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    /// Characteristic; zero for `Q`.
    pub fn characteristic(&self) -> u32 {
        match &self.inner.kind {
            Kind::Prime { p } | Kind::PrimePower { p, .. } | Kind::RationalFunction { p } => *p,
            Kind::Rationals => 0,
        }
    }

    /// Number of elements for finite fields.
    pub fn order(&self) -> Option<u64> {
        match &self.inner.kind {
            Kind::Prime { p } => Some(*p as u64),
            Kind::PrimePower { q, .. } => Some(*q as u64),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    fn require_finite(&self) -> Result<u64, FieldError> {
        self.order().ok_or_else(|| FieldError::InfiniteField(self.to_string()))
    }

    pub fn zero(&self) -> Elem {
        match &self.inner.kind {
            Kind::Prime { .. } | Kind::PrimePower { .. } => Elem::Fin(0),
            Kind::Rationals => Elem::Rat(BigRational::zero()),
            Kind::RationalFunction { .. } => Elem::Fun(RatFn {
                num: vec![],
                den: vec![1],
            }),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        match &self.inner.kind {
            Kind::Prime { p } => Elem::Fin(n.rem_euclid(*p as i64) as u32),
            Kind::PrimePower { p, .. } => Elem::Fin(n.rem_euclid(*p as i64) as u32),
            Kind::Rationals => Elem::Rat(BigRational::from_integer(BigInt::from(n))),
            Kind::RationalFunction { p } => Elem::Fun(RatFn {
                num: fpoly::constant(n.rem_euclid(*p as i64) as u32, *p),
                den: vec![1],
            }),
        }
    }

    /// The transcendental `x` of `F_p(x)`.
    pub fn variable(&self) -> Option<Elem> {
        match &self.inner.kind {
            Kind::RationalFunction { .. } => Some(Elem::Fun(RatFn {
                num: vec![0, 1],
                den: vec![1],
            })),
            _ => None,
        }
    }

    /// Builds `num / den` in `F_p(x)`; `None` for other fields or `den == 0`.
    pub fn rational_function(&self, num: &[u32], den: &[u32]) -> Option<Elem> {
        let Kind::RationalFunction { p } = &self.inner.kind else {
            return None;
        };
        let mut den = den.to_vec();
        fpoly::trim(&mut den);
        if den.is_empty() {
            return None;
        }
        let num: FpPoly = num.iter().map(|c| c % p).collect();
        Some(Elem::Fun(reduce_ratfn(num, den, *p)))
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Fin(v) => *v == 0,
            Elem::Rat(r) => r.is_zero(),
            Elem::Fun(f) => f.num.is_empty(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.inner.kind, a, b) {
            (Kind::Prime { p }, Elem::Fin(x), Elem::Fin(y)) => Elem::Fin(((*x as u64 + *y as u64) % *p as u64) as u32),
            (Kind::PrimePower { p, k, .. }, Elem::Fin(x), Elem::Fin(y)) => {
                let (mut x, mut y) = (*x, *y);
                let mut out = 0;
                let mut place = 1;
                for _ in 0..*k {
                    out += ((x % p + y % p) % p) * place;
                    x /= p;
                    y /= p;
                    place *= p;
                }
                Elem::Fin(out)
            }
            (Kind::Rationals, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (Kind::RationalFunction { p }, Elem::Fun(x), Elem::Fun(y)) => {
                let num = fpoly::add(&fpoly::mul(&x.num, &y.den, *p), &fpoly::mul(&y.num, &x.den, *p), *p);
                let den = fpoly::mul(&x.den, &y.den, *p);
                Elem::Fun(reduce_ratfn(num, den, *p))
            }
            _ => panic!("element does not belong to {}", self),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (&self.inner.kind, a) {
            (Kind::Prime { p }, Elem::Fin(x)) => Elem::Fin((p - x) % p),
            (Kind::PrimePower { p, k, .. }, Elem::Fin(x)) => {
                let mut x = *x;
                let mut out = 0;
                let mut place = 1;
                for _ in 0..*k {
                    out += ((p - x % p) % p) * place;
                    x /= p;
                    place *= p;
                }
                Elem::Fin(out)
            }
            (Kind::Rationals, Elem::Rat(x)) => Elem::Rat(-x),
            (Kind::RationalFunction { p }, Elem::Fun(x)) => Elem::Fun(RatFn {
                num: fpoly::neg(&x.num, *p),
                den: x.den.clone(),
            }),
            _ => panic!("element does not belong to {}", self),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.inner.kind, a, b) {
            (Kind::Prime { p }, Elem::Fin(x), Elem::Fin(y)) => Elem::Fin(((*x as u64 * *y as u64) % *p as u64) as u32),
            (Kind::PrimePower { q, exp, log, .. }, Elem::Fin(x), Elem::Fin(y)) => {
                if *x == 0 || *y == 0 {
                    Elem::Fin(0)
                } else {
                    let e = (log[*x as usize] as u64 + log[*y as usize] as u64) % (*q as u64 - 1);
                    Elem::Fin(exp[e as usize])
                }
            }
            (Kind::Rationals, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Kind::RationalFunction { p }, Elem::Fun(x), Elem::Fun(y)) => {
                let num = fpoly::mul(&x.num, &y.num, *p);
                let den = fpoly::mul(&x.den, &y.den, *p);
                Elem::Fun(reduce_ratfn(num, den, *p))
            }
            _ => panic!("element does not belong to {}", self),
        }
    }

    pub fn invert(&self, a: &Elem) -> Result<Elem, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match (&self.inner.kind, a) {
            (Kind::Prime { p }, Elem::Fin(x)) => Elem::Fin(fpoly::inv_mod(*x, *p)),
            (Kind::PrimePower { q, exp, log, .. }, Elem::Fin(x)) => {
                let e = (*q - 1 - log[*x as usize]) % (*q - 1);
                Elem::Fin(exp[e as usize])
            }
            (Kind::Rationals, Elem::Rat(x)) => Elem::Rat(x.recip()),
            (Kind::RationalFunction { p }, Elem::Fun(x)) => Elem::Fun(reduce_ratfn(x.den.clone(), x.num.clone(), *p)),
            _ => panic!("element does not belong to {}", self),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, &self.invert(b)?))
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// A square root of `a` when one exists in the field.
    pub fn is_square(&self, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        match (&self.inner.kind, a) {
            (Kind::Prime { p }, Elem::Fin(x)) => fpoly::sqrt_mod(*x, *p).map(Elem::Fin),
            (Kind::PrimePower { q, exp, log, .. }, Elem::Fin(x)) => {
                let e = log[*x as usize];
                let half = if e % 2 == 0 {
                    e / 2
                } else if q % 2 == 0 {
                    (e + q - 1) / 2
                } else {
                    return None;
                };
                let r = Elem::Fin(exp[half as usize]);
                let other = self.neg(&r);
                Some(r.min(other))
            }
            (Kind::Rationals, Elem::Rat(x)) => {
                if x.is_negative() {
                    return None;
                }
                let n = x.numer().sqrt();
                let d = x.denom().sqrt();
                (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Elem::Rat(BigRational::new(n, d)))
            }
            (Kind::RationalFunction { p }, Elem::Fun(x)) => {
                // num and den are coprime, so num/den is a square iff both are.
                let n = fpoly::sqrt(&x.num, *p)?;
                let d = fpoly::sqrt(&x.den, *p)?;
                let (_, d) = fpoly::make_monic(&d, *p);
                Some(Elem::Fun(reduce_ratfn(n, d, *p)))
            }
            _ => panic!("element does not belong to {}", self),
        }
    }

    /// The element with canonical encoding `index` (finite fields only).
    pub fn element(&self, index: u64) -> Elem {
        Elem::Fin(index as u32)
    }

    pub fn index_of(&self, a: &Elem) -> Option<u64> {
        match a {
            Elem::Fin(v) => Some(*v as u64),
            _ => None,
        }
    }

    /// All elements in ascending canonical encoding: 0, 1, then the rest.
    pub fn elements(&self) -> Result<Vec<Elem>, FieldError> {
        let q = self.require_finite()?;
        Ok((0..q).map(|i| self.element(i)).collect())
    }

    pub fn predicates(&self) -> FieldPredicates {
        match &self.inner.kind {
            Kind::Rationals => FieldPredicates {
                nrc: true,
                quadratically_closed: false,
                pythagorean: false,
                perfect: true,
            },
            Kind::RationalFunction { p } => FieldPredicates {
                nrc: true,
                quadratically_closed: false,
                pythagorean: *p == 2,
                perfect: false,
            },
            _ => self.finite_predicates(),
        }
    }

    fn finite_predicates(&self) -> FieldPredicates {
        let elems = self.elements().expect("finite");
        let q = elems.len();
        let mut is_sq = vec![false; q];
        for a in &elems {
            let s = self.mul(a, a);
            is_sq[self.index_of(&s).unwrap() as usize] = true;
        }
        let nrc = is_sq.iter().any(|s| !s);
        let p = self.characteristic() as u64;
        let mut frob_hit = vec![false; q];
        for a in &elems {
            frob_hit[self.index_of(&self.pow(a, p)).unwrap() as usize] = true;
        }
        let perfect = frob_hit.iter().all(|&h| h);
        let squares: Vec<&Elem> = elems.iter().filter(|a| is_sq[self.idx(a)]).collect();
        let pythagorean = if q <= 4096 {
            squares
                .iter()
                .all(|a| squares.iter().all(|b| is_sq[self.idx(&self.add(a, b))]))
        } else {
            // Finite fields of odd order are never Pythagorean; even order always are.
            q.is_multiple_of(2)
        };
        let quadratically_closed = if q <= 64 {
            elems.iter().all(|b| {
                elems.iter().all(|c| {
                    elems.iter().any(|t| {
                        let v = self.add(&self.add(&self.mul(t, t), &self.mul(b, t)), c);
                        self.is_zero(&v)
                    })
                })
            })
        } else {
            false
        };
        FieldPredicates {
            nrc,
            quadratically_closed,
            pythagorean,
            perfect,
        }
    }

    fn idx(&self, a: &Elem) -> usize {
        self.index_of(a).unwrap() as usize
    }

    /// Parses an element literal: residues for finite fields (the base-`p`
    /// encoding for prime powers), `a/b` for `Q`, `(x^2+1)/x` for `F_p(x)`.
    pub fn parse_elem(&self, s: &str) -> Result<Elem, FieldError> {
        let s = s.trim();
        let bad = || FieldError::BadElement(s.to_string(), self.to_string());
        match &self.inner.kind {
            Kind::Prime { p } => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a, Some(b)),
                    None => (s, None),
                };
                let n: i64 = num.trim().parse().map_err(|_| bad())?;
                let n = Elem::Fin(n.rem_euclid(*p as i64) as u32);
                match den {
                    None => Ok(n),
                    Some(d) => {
                        let d: i64 = d.trim().parse().map_err(|_| bad())?;
                        self.div(&n, &Elem::Fin(d.rem_euclid(*p as i64) as u32))
                    }
                }
            }
            Kind::PrimePower { q, .. } => {
                let v: u32 = s.parse().map_err(|_| bad())?;
                if v >= *q {
                    return Err(bad());
                }
                Ok(Elem::Fin(v))
            }
            Kind::Rationals => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => (s, "1"),
                };
                let n: BigInt = num.parse().map_err(|_| bad())?;
                let d: BigInt = den.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Elem::Rat(BigRational::new(n, d)))
            }
            Kind::RationalFunction { p } => {
                let (num, den) = split_top_level_slash(s).ok_or_else(bad)?;
                let n = fpoly::parse(num, 'x', *p).ok_or_else(bad)?;
                let d = match den {
                    Some(d) => fpoly::parse(d, 'x', *p).ok_or_else(bad)?,
                    None => vec![1],
                };
                if d.is_empty() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Elem::Fun(reduce_ratfn(n, d, *p)))
            }
        }
    }

    pub fn format_elem(&self, a: &Elem) -> String {
        match a {
            Elem::Fin(v) => v.to_string(),
            Elem::Rat(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Elem::Fun(f) => {
                let wrap = |poly: &[u32]| {
                    let s = fpoly::format(poly, 'x');
                    if s.contains('+') {
                        format!("({s})")
                    } else {
                        s
                    }
                };
                if fpoly::is_one(&f.den) {
                    fpoly::format(&f.num, 'x')
                } else {
                    format!("{}/{}", wrap(&f.num), wrap(&f.den))
                }
            }
        }
    }

    /// A random element: uniform over finite fields, integers in
    /// `[-DEFAULT_SAMPLE_HEIGHT, DEFAULT_SAMPLE_HEIGHT]` over `Q`, and
    /// fractions of low-degree polynomials over `F_p(x)`.
    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        match &self.inner.kind {
            Kind::Prime { p } => Elem::Fin(rng.gen_range(0..*p)),
            Kind::PrimePower { q, .. } => Elem::Fin(rng.gen_range(0..*q)),
            Kind::Rationals => self.from_int(rng.gen_range(-DEFAULT_SAMPLE_HEIGHT..=DEFAULT_SAMPLE_HEIGHT)),
            Kind::RationalFunction { p } => {
                let num: FpPoly = (0..3).map(|_| rng.gen_range(0..*p)).collect();
                let mut den: FpPoly = (0..2).map(|_| rng.gen_range(0..*p)).collect();
                fpoly::trim(&mut den);
                if den.is_empty() || rng.gen_bool(0.5) {
                    den = vec![1];
                }
                Elem::Fun(reduce_ratfn(num, den, *p))
            }
        }
    }
}

fn reduce_ratfn(mut num: FpPoly, mut den: FpPoly, p: u32) -> RatFn {
    fpoly::trim(&mut num);
    fpoly::trim(&mut den);
    assert!(!den.is_empty(), "zero denominator");
    if num.is_empty() {
        return RatFn { num, den: vec![1] };
    }
    let g = fpoly::gcd(&num, &den, p);
    if !fpoly::is_one(&g) {
        num = fpoly::divrem(&num, &g, p).0;
        den = fpoly::divrem(&den, &g, p).0;
    }
    let lc = *den.last().unwrap();
    if lc != 1 {
        let inv = fpoly::inv_mod(lc, p);
        num = fpoly::scale(&num, inv, p);
        den = fpoly::scale(&den, inv, p);
    }
    RatFn { num, den }
}

fn split_top_level_slash(s: &str) -> Option<(&str, Option<&str>)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..i], Some(&s[i + 1..]))),
            _ => {}
        }
    }
    (depth == 0).then_some((s, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Field {
        Field::parse(s).unwrap()
    }

    #[test]
    fn make_field_examples() {
        let f3 = f("F3");
        assert_eq!(f3.elements().unwrap(), vec![Elem::Fin(0), Elem::Fin(1), Elem::Fin(2)]);
        let f4 = f("F4");
        assert_eq!(
            f4.spec(),
            &FieldSpec::PrimePower {
                p: 2,
                k: 2,
                modulus: vec![1, 1, 1]
            }
        );
        assert_eq!(f4.elements().unwrap().len(), 4);
        assert_eq!(Field::parse("F4").unwrap().to_string(), "F4");
        assert!(matches!(
            make_field(FieldSpec::Prime { p: 4 }),
            Err(FieldError::NonPrime(4))
        ));
        assert!(matches!(
            make_field(FieldSpec::PrimePower {
                p: 2,
                k: 2,
                modulus: vec![1, 0, 1]
            }),
            Err(FieldError::ReducibleModulus(_))
        ));
        assert!(matches!(f("Q").elements(), Err(FieldError::InfiniteField(_))));
    }

    #[test]
    fn inverses() {
        let f3 = f("F3");
        assert_eq!(f3.invert(&Elem::Fin(2)).unwrap(), Elem::Fin(2));
        for spec in ["F3", "F4", "Q", "F2(x)", "F9"] {
            let k = f(spec);
            assert_eq!(k.invert(&k.one()).unwrap(), k.one());
            assert_eq!(k.invert(&k.zero()), Err(FieldError::DivisionByZero));
        }
    }

    #[test]
    fn square_examples() {
        assert_eq!(f("F3").is_square(&Elem::Fin(2)), None);
        let q = f("Q");
        assert_eq!(q.is_square(&q.from_int(4)), Some(q.from_int(2)));
        let rf = f("F2(x)");
        assert_eq!(rf.is_square(&rf.variable().unwrap()), None);
        let x2 = rf.parse_elem("x^2/(x^2+1)").unwrap();
        let w = rf.is_square(&x2).unwrap();
        assert_eq!(rf.mul(&w, &w), x2);
    }

    #[test]
    fn predicate_examples() {
        let pr = f("F3").predicates();
        assert_eq!(
            pr,
            FieldPredicates {
                nrc: true,
                quadratically_closed: false,
                pythagorean: false,
                perfect: true
            }
        );
        let pr = f("F4").predicates();
        assert!(!pr.nrc && pr.perfect && pr.pythagorean && !pr.quadratically_closed);
        assert_eq!(
            f("Q").predicates(),
            FieldPredicates {
                nrc: true,
                quadratically_closed: false,
                pythagorean: false,
                perfect: true
            }
        );
        let pr = f("F2(x)").predicates();
        assert!(pr.nrc && pr.pythagorean && !pr.perfect);
        assert!(!f("F3(x)").predicates().pythagorean);
    }

    #[test]
    fn nrc_exactly_for_odd_order() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            assert_eq!(f(&format!("F{q}")).predicates().nrc, q % 2 == 1, "q = {q}");
        }
    }

    #[test]
    fn square_counts() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let k = f(&format!("F{q}"));
            let count = k
                .elements()
                .unwrap()
                .iter()
                .filter(|a| k.is_square(a).is_some())
                .count() as u64;
            let expected = if q % 2 == 1 { q.div_ceil(2) } else { q };
            assert_eq!(count, expected, "q = {q}");
        }
    }

    #[test]
    fn element_text() {
        let rf = f("F2(x)");
        let e = rf.parse_elem("(x^2+1)/x").unwrap();
        assert_eq!(rf.format_elem(&e), "(x^2+1)/x");
        let q = f("Q");
        assert_eq!(q.format_elem(&q.parse_elem("6/-4").unwrap()), "-3/2");
        assert_eq!(f("F3").parse_elem("-1").unwrap(), Elem::Fin(2));
        // canonical reduction: (x^2+x)/(x^2+1) = x/(x+1) over F2
        let a = rf.parse_elem("(x^2+x)/(x^2+1)").unwrap();
        assert_eq!(rf.format_elem(&a), "x/(x+1)");
    }

    #[test]
    fn spec_text_round_trip() {
        for s in ["F3", "F4", "F9", "Q", "F2(x)", "F5(x)", "F9[t^2+t+2]"] {
            assert_eq!(s.parse::<FieldSpec>().unwrap().to_string(), s);
        }
    }
}
