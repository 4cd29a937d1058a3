//! The quotient ring 𝔽_{q^m}[X]/(P) for a monic P ∈ 𝔽_q[X] of degree n.
//!
//! Ring elements are coefficient vectors of length n, low degree first.

use crate::error::{domain, Error, Result};
use crate::field::{poly, BaseField, ExtField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealModulus {
    /// Monic, low degree first, length n + 1.
    coeffs: Vec<u8>,
    /// Nonzero terms below the leading one: (exponent, coefficient).
    terms: Vec<(usize, u8)>,
    irreducible: bool,
}

impl IdealModulus {
    pub fn new(base: &BaseField, coeffs: Vec<u8>) -> Result<Self> {
        let n = coeffs.len().checked_sub(1).filter(|&n| n >= 1);
        let Some(n) = n else {
            return domain("ideal modulus must have degree at least 1");
        };
        if coeffs[n] != 1 || coeffs.iter().any(|&c| c as u32 >= base.q()) {
            return domain("ideal modulus must be monic with coefficients in F_q");
        }
        let terms = (0..n).filter(|&e| coeffs[e] != 0).map(|e| (e, coeffs[e])).collect();
        let irreducible = poly::is_irreducible(base, &coeffs);
        Ok(Self { coeffs, terms, irreducible })
    }

    /// Polynomial with unit coefficients at the given exponents; the largest is
    /// the degree.
    pub fn from_exponents(base: &BaseField, exponents: &[usize]) -> Result<Self> {
        let Some(&n) = exponents.iter().max() else {
            return domain("empty exponent list");
        };
        let mut coeffs = vec![0u8; n + 1];
        for &e in exponents {
            if coeffs[e] != 0 {
                return domain(format!("repeated exponent {e}"));
            }
            coeffs[e] = 1;
        }
        Self::new(base, coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    /// Exponents of the nonzero terms, highest first.
    pub fn exponents(&self) -> Vec<usize> {
        (0..self.coeffs.len()).rev().filter(|&e| self.coeffs[e] != 0).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    /// Reduces a product of length up to 2n − 1 in place and truncates it to n.
    fn reduce<F: ExtField>(&self, field: &F, prod: &mut Vec<F::Elem>) {
        let n = self.degree();
        let base = field.base();
        for k in (n..prod.len()).rev() {
            if field.is_zero(&prod[k]) {
                continue;
            }
            let c = prod[k].clone();
            // X^k ≡ −Σ p_e X^{k−n+e}
            for &(e, p) in &self.terms {
                field.axpy(&mut prod[k - n + e], base.neg(p), &c);
            }
        }
        prod.truncate(n);
    }
}

fn check_len<F: ExtField>(a: &[F::Elem], p: &IdealModulus) -> Result<()> {
    if a.len() != p.degree() {
        return domain(format!("ring element has {} coefficients, expected {}", a.len(), p.degree()));
    }
    Ok(())
}

pub fn ring_add<F: ExtField>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| field.add(x, y)).collect()
}

pub fn ring_sub<F: ExtField>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| field.sub(x, y)).collect()
}

/// a·b mod P.
pub fn ring_mul<F: ExtField>(field: &F, a: &[F::Elem], b: &[F::Elem], p: &IdealModulus) -> Result<Vec<F::Elem>> {
    check_len::<F>(a, p)?;
    check_len::<F>(b, p)?;
    let n = p.degree();
    let mut prod = vec![field.zero(); 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        if field.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = field.mul(x, y);
            prod[i + j] = field.add(&prod[i + j], &t);
        }
    }
    p.reduce(field, &mut prod);
    Ok(prod)
}

/// a⁻¹ mod P by the extended Euclidean algorithm over 𝔽_{q^m}[X].
pub fn ring_inv<F: ExtField>(field: &F, a: &[F::Elem], p: &IdealModulus) -> Result<Vec<F::Elem>> {
    check_len::<F>(a, p)?;
    let trim = |v: &mut Vec<F::Elem>| {
        while v.last().is_some_and(|x| field.is_zero(x)) {
            v.pop();
        }
    };
    let embed = |c: u8| field.from_coords(&[c]);
    // invariant: r0 ≡ s0·a, r1 ≡ s1·a (mod P)
    let mut r0: Vec<F::Elem> = p.coeffs().iter().map(|&c| embed(c)).collect();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    let mut s0: Vec<F::Elem> = Vec::new();
    let mut s1 = vec![field.one()];
    while let Some(d1) = r1.len().checked_sub(1) {
        let lead_inv = field.inv(&r1[d1])?;
        while r0.len() > d1 {
            let d0 = r0.len() - 1;
            let c = field.mul(&r0[d0], &lead_inv);
            let shift = d0 - d1;
            for (j, v) in r1.iter().enumerate() {
                r0[shift + j] = field.sub(&r0[shift + j], &field.mul(&c, v));
            }
            trim(&mut r0);
            if s0.len() < s1.len() + shift {
                s0.resize(s1.len() + shift, field.zero());
            }
            for (j, v) in s1.iter().enumerate() {
                s0[shift + j] = field.sub(&s0[shift + j], &field.mul(&c, v));
            }
            trim(&mut s0);
        }
        std::mem::swap(&mut r0, &mut r1);
        std::mem::swap(&mut s0, &mut s1);
    }
    if r0.len() != 1 {
        return Err(Error::NotInvertible);
    }
    let c = field.inv(&r0[0])?;
    let mut out: Vec<F::Elem> = s0.iter().map(|v| field.mul(v, &c)).collect();
    // deg s0 < n already; pad to n coefficients
    out.resize(p.degree(), field.zero());
    Ok(out)
}

/// n × n matrix whose column j is X^j·h mod P.
pub fn ideal_matrix<F: ExtField>(field: &F, h: &[F::Elem], p: &IdealModulus) -> Result<Vec<Vec<F::Elem>>> {
    check_len::<F>(h, p)?;
    let n = p.degree();
    let mut rows = vec![vec![field.zero(); n]; n];
    let mut col = h.to_vec();
    for j in 0..n {
        for (row, c) in rows.iter_mut().zip(&col) {
            row[j] = c.clone();
        }
        // col ← X·col mod P
        col.insert(0, field.zero());
        p.reduce(field, &mut col);
    }
    Ok(rows)
}

/// Parity-check matrix (H₁ | H₂) of the ideal code defined by (h₁, h₂): the
/// syndrome of (e₁, e₂) is e₁h₁ + e₂h₂ mod P.
pub fn ideal_parity_matrix<F: ExtField>(
    field: &F,
    h1: &[F::Elem],
    h2: &[F::Elem],
    p: &IdealModulus,
) -> Result<Vec<Vec<F::Elem>>> {
    let a = ideal_matrix(field, h1, p)?;
    let b = ideal_matrix(field, h2, p)?;
    Ok(a.into_iter()
        .zip(b)
        .map(|(mut x, y)| {
            x.extend(y);
            x
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{BinaryExt, Gf2m, PrimeExt};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    /// a·b as Σ_j b_j (X^j a mod P), shifting one power at a time.
    fn shift_and_add<F: ExtField>(field: &F, a: &[F::Elem], b: &[F::Elem], p: &IdealModulus) -> Vec<F::Elem> {
        let n = p.degree();
        let mut acc = vec![field.zero(); n];
        let mut shifted = a.to_vec();
        for bj in b {
            for (x, y) in acc.iter_mut().zip(&shifted) {
                *x = field.add(x, &field.mul(bj, y));
            }
            let top = shifted.pop().unwrap();
            shifted.insert(0, field.zero());
            for (s, &c) in shifted.iter_mut().zip(p.coeffs()) {
                if c != 0 {
                    field.axpy(s, field.base().neg(c), &top);
                }
            }
        }
        acc
    }

    fn check<F: ExtField>(field: &F, p: &IdealModulus, seed: u64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = p.degree();
        for _ in 0..5 {
            let a: Vec<F::Elem> = (0..n).map(|_| field.random(&mut rng)).collect();
            let b: Vec<F::Elem> = (0..n).map(|_| field.random(&mut rng)).collect();
            let ab = ring_mul(field, &a, &b, p).unwrap();
            assert_eq!(ab, shift_and_add(field, &a, &b, p));
            assert_eq!(ab, ring_mul(field, &b, &a, p).unwrap());
            let inv = ring_inv(field, &a, p).unwrap();
            let mut one = vec![field.zero(); n];
            one[0] = field.one();
            assert_eq!(ring_mul(field, &a, &inv, p).unwrap(), one);
            // syndrome through the parity matrix equals the ring expression
            let h = ideal_parity_matrix(field, &a, &b, p).unwrap();
            let e1: Vec<F::Elem> = (0..n).map(|_| field.random(&mut rng)).collect();
            let e2: Vec<F::Elem> = (0..n).map(|_| field.random(&mut rng)).collect();
            let want = ring_add(field, &ring_mul(field, &e1, &a, p).unwrap(), &ring_mul(field, &e2, &b, p).unwrap());
            let e: Vec<F::Elem> = e1.iter().chain(&e2).cloned().collect();
            let got: Vec<F::Elem> = h
                .iter()
                .map(|row| row.iter().zip(&e).fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y))))
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn matches_shift_and_add_oracle() {
        let f = Gf2m::new(71).unwrap();
        let p = IdealModulus::from_exponents(f.base(), &[47, 5, 0]).unwrap();
        assert!(p.is_irreducible());
        check(&f, &p, 1);
        let f4 = BinaryExt::<2>::new(13).unwrap();
        let p4 = IdealModulus::new(f4.base(), vec![2, 0, 3, 1, 0, 1]).unwrap();
        check(&f4, &p4, 2);
        let f3 = PrimeExt::new(3, 11).unwrap();
        let p3 = IdealModulus::new(f3.base(), vec![1, 2, 0, 0, 0, 0, 0, 1]).unwrap();
        check(&f3, &p3, 3);
    }

    #[test]
    fn non_invertible_elements_are_reported() {
        let f = Gf2m::new(11).unwrap();
        // X^4 + 1 = (X + 1)^4 is reducible; X + 1 has no inverse
        let p = IdealModulus::from_exponents(f.base(), &[4, 0]).unwrap();
        assert!(!p.is_irreducible());
        let a = vec![f.one(), f.one(), f.zero(), f.zero()];
        assert_eq!(ring_inv(&f, &a, &p), Err(Error::NotInvertible));
        assert_eq!(ring_inv(&f, &[f.zero(); 4], &p), Err(Error::NotInvertible));
        assert!(ring_mul(&f, &a, &a[..3], &p).is_err());
    }

    #[test]
    fn exponent_round_trip() {
        let f = BaseField::new(2).unwrap();
        let p = IdealModulus::from_exponents(&f, &[53, 6, 2, 1, 0]).unwrap();
        assert_eq!(p.exponents(), vec![53, 6, 2, 1, 0]);
        assert!(IdealModulus::from_exponents(&f, &[5, 5, 0]).is_err());
    }
}
