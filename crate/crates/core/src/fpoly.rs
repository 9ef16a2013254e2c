//! Dense univariate polynomials over a prime field `F_p`, stored as
//! ascending coefficient vectors of residues with trailing zeros stripped.
//!
//! These back the prime-power field construction (reduction modulo the
//! defining polynomial) and the rational function field `F_p(x)`.

use std::cmp::Ordering;

pub type FpPoly = Vec<u32>;

#[inline]
fn mulmod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, (p - 2) as u64, p)
}

pub fn pow_mod(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub fn trim(f: &mut FpPoly) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(f: &[u32]) -> Option<usize> {
    if f.is_empty() {
        None
    } else {
        Some(f.len() - 1)
    }
}

pub fn is_one(f: &[u32]) -> bool {
    f.len() == 1 && f[0] == 1
}

pub fn constant(c: u32, p: u32) -> FpPoly {
    let c = c % p;
    if c == 0 {
        vec![]
    } else {
        vec![c]
    }
}

pub fn add(f: &[u32], g: &[u32], p: u32) -> FpPoly {
    let mut out: FpPoly = (0..f.len().max(g.len()))
        .map(|i| (f.get(i).copied().unwrap_or(0) + g.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(&mut out);
    out
}

pub fn neg(f: &[u32], p: u32) -> FpPoly {
    f.iter().map(|&c| (p - c) % p).collect()
}

pub fn sub(f: &[u32], g: &[u32], p: u32) -> FpPoly {
    add(f, &neg(g, p), p)
}

pub fn scale(f: &[u32], c: u32, p: u32) -> FpPoly {
    let mut out: FpPoly = f.iter().map(|&a| mulmod(a, c, p)).collect();
    trim(&mut out);
    out
}

pub fn mul(f: &[u32], g: &[u32], p: u32) -> FpPoly {
    if f.is_empty() || g.is_empty() {
        return vec![];
    }
    let mut acc = vec![0u64; f.len() + g.len() - 1];
    let p64 = p as u64;
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            acc[i + j] = (acc[i + j] + a as u64 * b as u64) % p64;
        }
    }
    let mut out: FpPoly = acc.into_iter().map(|c| c as u32).collect();
    trim(&mut out);
    out
}

/// Euclidean division; panics on a zero divisor.
pub fn divrem(f: &[u32], g: &[u32], p: u32) -> (FpPoly, FpPoly) {
    let dg = degree(g).expect("division by the zero polynomial");
    let lead_inv = inv_mod(*g.last().unwrap(), p);
    let mut rem: FpPoly = f.to_vec();
    trim(&mut rem);
    if rem.len() < g.len() {
        return (vec![], rem);
    }
    let mut quot = vec![0u32; rem.len() - dg];
    while let Some(dr) = degree(&rem) {
        if dr < dg {
            break;
        }
        let c = mulmod(rem[dr], lead_inv, p);
        let shift = dr - dg;
        quot[shift] = c;
        for (j, &b) in g.iter().enumerate() {
            let t = mulmod(c, b, p);
            rem[shift + j] = (rem[shift + j] + p - t) % p;
        }
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

pub fn rem(f: &[u32], g: &[u32], p: u32) -> FpPoly {
    divrem(f, g, p).1
}

/// Scales to a monic polynomial; returns the leading coefficient removed.
pub fn make_monic(f: &[u32], p: u32) -> (u32, FpPoly) {
    match f.last() {
        None => (0, vec![]),
        Some(&lc) => (lc, scale(f, inv_mod(lc, p), p)),
    }
}

/// Monic gcd (zero when both inputs vanish).
pub fn gcd(f: &[u32], g: &[u32], p: u32) -> FpPoly {
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&a, p).1
}

pub fn pow_modpoly(base: &[u32], mut exp: u64, modulus: &[u32], p: u32) -> FpPoly {
    let mut acc = rem(&[1], modulus, p);
    let mut b = rem(base, modulus, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), modulus, p);
        }
        b = rem(&mul(&b, &b, p), modulus, p);
        exp >>= 1;
    }
    acc
}

/// Irreducibility over `F_p` by the gcd test against `x^(p^i) - x`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let Some(d) = degree(f) else { return false };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x: FpPoly = vec![0, 1];
    let mut frob = x.clone();
    for _ in 1..=d / 2 {
        frob = pow_modpoly(&frob, p as u64, f, p);
        let g = gcd(&sub(&frob, &x, p), f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Square root in `F_p[x]` of a polynomial, if one exists.
pub fn sqrt(f: &[u32], p: u32) -> Option<FpPoly> {
    let Some(d) = degree(f) else { return Some(vec![]) };
    if d % 2 == 1 {
        return None;
    }
    let lc = f[d];
    let root_lc = sqrt_mod(lc, p)?;
    let (_, monic) = make_monic(f, p);
    let g = if p == 2 {
        if monic.iter().skip(1).step_by(2).any(|&c| c != 0) {
            return None;
        }
        monic.iter().step_by(2).copied().collect::<FpPoly>()
    } else {
        let m = d / 2;
        let mut g = vec![0u32; m + 1];
        g[m] = 1;
        let half = inv_mod(2, p);
        for k in 1..=m {
            let target = 2 * m - k;
            let mut acc = monic[target];
            for i in (m - k + 1)..=m {
                let j = target - i;
                if j > m - k && j <= m {
                    acc = (acc + p - mulmod(g[i], g[j], p)) % p;
                }
            }
            g[m - k] = mulmod(acc, half, p);
        }
        g
    };
    let mut g = scale(&g, root_lc, p);
    trim(&mut g);
    if mul(&g, &g, p) == f {
        Some(g)
    } else {
        None
    }
}

/// Square root in `F_p` by Tonelli–Shanks; the smaller of the two roots.
pub fn sqrt_mod(a: u32, p: u32) -> Option<u32> {
    let a = a % p;
    if a == 0 || p == 2 {
        return Some(a);
    }
    if pow_mod(a, ((p - 1) / 2) as u64, p) != 1 {
        return None;
    }
    let mut s = 0;
    let mut q = p - 1;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| pow_mod(z, ((p - 1) / 2) as u64, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = pow_mod(z, q as u64, p);
    let mut t = pow_mod(a, q as u64, p);
    let mut r = pow_mod(a, q.div_ceil(2) as u64, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r.min(p - r))
}

/// Orders polynomials by degree, then by coefficients from the top.
pub fn cmp(f: &[u32], g: &[u32]) -> Ordering {
    f.len().cmp(&g.len()).then_with(|| f.iter().rev().cmp(g.iter().rev()))
}

/// Renders in the variable `var`, descending degree, without spaces.
pub fn format(f: &[u32], var: char) -> String {
    if f.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, &c) in f.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push('+');
        }
        match (i, c) {
            (0, c) => out.push_str(&c.to_string()),
            (_, 1) => {}
            (_, c) => out.push_str(&c.to_string()),
        }
        match i {
            0 => {}
            1 => out.push(var),
            _ => out.push_str(&format!("{var}^{i}")),
        }
    }
    out
}

/// Parses a polynomial in `var` with integer coefficients reduced mod `p`,
/// e.g. `x^2+2x+1` or `-x+3`. Parentheses around the whole are allowed.
pub fn parse(s: &str, var: char, p: u32) -> Option<FpPoly> {
    let mut s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    while s.starts_with('(') && s.ends_with(')') && balanced_inner(&s) {
        s = s[1..s.len() - 1].to_string();
    }
    if s.is_empty() {
        return None;
    }
    let mut out: FpPoly = vec![];
    let mut terms: Vec<(bool, String)> = vec![];
    let mut cur = String::new();
    let mut negative = false;
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push((negative, std::mem::take(&mut cur)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && i == 0 {
            negative = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    terms.push((negative, cur));
    for (neg_sign, term) in terms {
        if term.is_empty() {
            return None;
        }
        let (coef, exp) = match term.find(var) {
            None => (term.as_str(), 0usize),
            Some(pos) => {
                let coef = term[..pos].trim_end_matches('*');
                let rest = &term[pos + 1..];
                let exp = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')?.parse().ok()?
                };
                (coef, exp)
            }
        };
        let c: u64 = if coef.is_empty() { 1 } else { coef.parse().ok()? };
        let mut c = (c % p as u64) as u32;
        if neg_sign {
            c = (p - c) % p;
        }
        let mut mono = vec![0u32; exp + 1];
        mono[exp] = c;
        out = add(&out, &mono, p);
    }
    Some(out)
}

fn balanced_inner(s: &str) -> bool {
    let inner = &s[1..s.len() - 1];
    let mut depth = 0i32;
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Monic polynomials of degree `k` over `F_p` ordered by the integer
/// encoding of their lower coefficients; the first irreducible one.
pub fn least_irreducible(p: u32, k: u32) -> FpPoly {
    let count = (p as u64).pow(k);
    for code in 0..count {
        let mut f = vec![0u32; k as usize + 1];
        let mut c = code;
        for slot in f.iter_mut().take(k as usize) {
            *slot = (c % p as u64) as u32;
            c /= p as u64;
        }
        f[k as usize] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
