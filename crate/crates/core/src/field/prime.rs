use rand::Rng;

use super::{poly, BaseField, ExtField};
use crate::error::{domain, Result};

/// 𝔽_{q^m} for an odd prime q, one byte per coordinate.
#[derive(Clone, Debug)]
pub struct PrimeExt {
    base: BaseField,
    m: usize,
    modulus: Vec<u8>,
}

impl PrimeExt {
    pub fn new(q: u32, m: usize) -> Result<Self> {
        let base = BaseField::new(q)?;
        if q == 2 || base.p() != q {
            return domain(format!("{q} is not an odd prime below 256"));
        }
        if m == 0 || m > 127 {
            return domain(format!("extension degree {m} outside 1..=127"));
        }
        let modulus = poly::least_irreducible(&base, m);
        Ok(Self { base, m, modulus })
    }
}

impl ExtField for PrimeExt {
    type Elem = Vec<u8>;

    fn base(&self) -> &BaseField {
        &self.base
    }

    fn m(&self) -> usize {
        self.m
    }

    fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    fn zero(&self) -> Vec<u8> {
        vec![0; self.m]
    }

    fn one(&self) -> Vec<u8> {
        let mut a = vec![0; self.m];
        a[0] = 1;
        a
    }

    fn is_zero(&self, a: &Vec<u8>) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }

    fn sub(&self, a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
        a.iter().zip(b).map(|(&x, &y)| self.base.sub(x, y)).collect()
    }

    fn neg(&self, a: &Vec<u8>) -> Vec<u8> {
        a.iter().map(|&x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
        let q = self.base.q();
        let m = self.m;
        let mut prod = vec![0u32; 2 * m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] += x as u32 * y as u32;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = prod[k] % q;
            if c == 0 {
                continue;
            }
            // X^k = X^{k-m}·X^m ≡ -X^{k-m}·(f - X^m)
            for j in 0..m {
                prod[k - m + j] += c * (q - self.modulus[j] as u32);
            }
        }
        prod[..m].iter().map(|&v| (v % q) as u8).collect()
    }

    fn scale(&self, a: &Vec<u8>, c: u8) -> Vec<u8> {
        a.iter().map(|&x| self.base.mul(x, c)).collect()
    }

    fn axpy(&self, acc: &mut Vec<u8>, c: u8, x: &Vec<u8>) {
        if c == 0 {
            return;
        }
        for (a, &v) in acc.iter_mut().zip(x) {
            *a = self.base.add(*a, self.base.mul(c, v));
        }
    }

    fn coord(&self, a: &Vec<u8>, i: usize) -> u8 {
        a[i]
    }

    fn from_coords(&self, coords: &[u8]) -> Vec<u8> {
        assert!(coords.len() <= self.m, "too many coordinates");
        assert!(coords.iter().all(|&c| (c as u32) < self.base.q()), "coordinate out of range");
        let mut a = coords.to_vec();
        a.resize(self.m, 0);
        a
    }

    fn leading(&self, a: &Vec<u8>) -> Option<usize> {
        a.iter().position(|&c| c != 0)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        let q = self.base.q();
        (0..self.m).map(|_| rng.gen_range(0..q) as u8).collect()
    }
}
