//! Dense polynomials over 𝔽_q, coefficients stored low degree first.
//!
//! Only what modulus selection and irreducibility testing need.

use super::BaseField;

pub fn trim(a: &mut Vec<u8>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(a: &[u8]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn sub(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = f.sub(x, y);
    }
    trim(&mut out);
    out
}

pub fn mul(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `m`.
pub fn rem(f: &BaseField, a: &[u8], m: &[u8]) -> Vec<u8> {
    let dm = degree(m).expect("modulus must be nonzero");
    let lead_inv = f.inv(m[dm]);
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        for j in 0..=dm {
            r[dr - dm + j] = f.sub(r[dr - dm + j], f.mul(c, m[j]));
        }
        trim(&mut r);
    }
    r
}

pub fn mulmod(f: &BaseField, a: &[u8], b: &[u8], m: &[u8]) -> Vec<u8> {
    rem(f, &mul(f, a, b), m)
}

pub fn gcd(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while degree(&b).is_some() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, if
/// gcd(a, m) = 1. The result has degree below deg m.
pub fn inv_mod(f: &BaseField, a: &[u8], m: &[u8]) -> Option<Vec<u8>> {
    // invariant: r0 ≡ s0·a, r1 ≡ s1·a (mod m)
    let (mut r0, mut r1) = (m.to_vec(), rem(f, a, m));
    let (mut s0, mut s1): (Vec<u8>, Vec<u8>) = (Vec::new(), vec![1]);
    trim(&mut r0);
    while let Some(d1) = degree(&r1) {
        let lead_inv = f.inv(r1[d1]);
        // r0 ← r0 mod r1, s0 ← s0 − quotient·s1, one quotient term at a time
        while let Some(d0) = degree(&r0) {
            if d0 < d1 {
                break;
            }
            let c = f.mul(r0[d0], lead_inv);
            let shift = d0 - d1;
            for (j, &v) in r1.iter().enumerate() {
                r0[shift + j] = f.sub(r0[shift + j], f.mul(c, v));
            }
            trim(&mut r0);
            if s0.len() < s1.len() + shift {
                s0.resize(s1.len() + shift, 0);
            }
            for (j, &v) in s1.iter().enumerate() {
                s0[shift + j] = f.sub(s0[shift + j], f.mul(c, v));
            }
            trim(&mut s0);
        }
        std::mem::swap(&mut r0, &mut r1);
        std::mem::swap(&mut s0, &mut s1);
    }
    // r0 is the gcd
    if degree(&r0) != Some(0) {
        return None;
    }
    let c = f.inv(r0[0]);
    let mut out: Vec<u8> = s0.iter().map(|&v| f.mul(v, c)).collect();
    trim(&mut out);
    Some(rem(f, &out, m))
}

/// `a^q mod m`.
fn frobenius(f: &BaseField, a: &[u8], m: &[u8]) -> Vec<u8> {
    let mut result = vec![1u8];
    let mut base = a.to_vec();
    let mut e = f.q();
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(f, &result, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        e >>= 1;
    }
    result
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: a monic f of degree n is irreducible iff X^{q^n} ≡ X (mod f)
/// and gcd(X^{q^{n/p}} − X, f) = 1 for every prime p dividing n.
pub fn is_irreducible(f: &BaseField, poly: &[u8]) -> bool {
    let n = match degree(poly) {
        Some(0) | None => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let x = vec![0u8, 1];
    // powers[i] = X^{q^i} mod poly
    let mut powers = vec![rem(f, &x, poly)];
    for i in 0..n {
        let next = frobenius(f, &powers[i], poly);
        powers.push(next);
    }
    if degree(&sub(f, &powers[n], &x)).is_some() {
        return false;
    }
    prime_divisors(n).into_iter().all(|p| {
        let g = gcd(f, &sub(f, &powers[n / p], &x), poly);
        degree(&g) == Some(0)
    })
}

/// Monic polynomial of degree n whose lower coefficients (c_{n-1}, …, c_0),
/// read as base-q digits, form the smallest number among irreducibles.
pub fn least_irreducible(f: &BaseField, n: usize) -> Vec<u8> {
    assert!(n >= 1);
    let q = f.q() as u128;
    let mut tail: u128 = 0;
    loop {
        let mut poly = vec![0u8; n + 1];
        poly[n] = 1;
        let mut t = tail;
        for c in poly.iter_mut().take(n) {
            *c = (t % q) as u8;
            t /= q;
        }
        if t == 0 && (n == 1 || poly[0] != 0) && is_irreducible(f, &poly) {
            return poly;
        }
        tail += 1;
    }
}
