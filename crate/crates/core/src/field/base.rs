use crate::error::{domain, Result};
use crate::field::poly;

/// The base field 𝔽_q for q an odd prime below 256 or q = 2^s with s ≤ 8.
///
/// Elements are bytes in `0..q`. For q = 2^s the byte is the coefficient
/// vector of a polynomial in 𝔽_2[Z] modulo the least irreducible of degree s.
#[derive(Clone, Debug)]
pub struct BaseField {
    q: u32,
    p: u32,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl BaseField {
    pub fn new(q: u32) -> Result<Self> {
        if q == 2 || (q > 2 && q < 256 && is_prime(q)) {
            let mut mul = vec![0u8; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    mul[(a * q + b) as usize] = ((a * b) % q) as u8;
                }
            }
            return Ok(Self::with_mul(q, q, mul));
        }
        if q.is_power_of_two() && (4..=256).contains(&q) {
            let s = q.trailing_zeros() as usize;
            let gf2 = Self::new(2)?;
            let modulus = poly::least_irreducible(&gf2, s);
            let red: u32 = modulus.iter().take(s).enumerate().map(|(i, &c)| (c as u32) << i).sum();
            let mut mul = vec![0u8; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    let (mut acc, mut t) = (0u32, a);
                    for i in 0..s {
                        if (b >> i) & 1 == 1 {
                            acc ^= t;
                        }
                        t <<= 1;
                        if t & q != 0 {
                            t = (t ^ q) ^ red;
                        }
                    }
                    mul[(a * q + b) as usize] = acc as u8;
                }
            }
            return Ok(Self::with_mul(q, 2, mul));
        }
        domain(format!("base field size {q} must be an odd prime below 256 or 2^s with s <= 8"))
    }

    fn with_mul(q: u32, p: u32, mul: Vec<u8>) -> Self {
        let mut inv = vec![0u8; q as usize];
        for a in 1..q {
            for b in 1..q {
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u8;
                }
            }
        }
        Self { q, p, mul, inv }
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Characteristic.
    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Bits per serialized coordinate: ⌈log₂ q⌉.
    pub fn bits(&self) -> usize {
        (32 - (self.q - 1).leading_zeros()) as usize
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        if self.p == 2 {
            a ^ b
        } else {
            let s = a as u32 + b as u32;
            (if s >= self.q { s - self.q } else { s }) as u8
        }
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        if self.p == 2 || a == 0 {
            a
        } else {
            (self.q - a as u32) as u8
        }
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    /// Inverse of a nonzero scalar; `inv(0)` is 0.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_hold_for_every_supported_small_q() {
        for q in [2u32, 3, 4, 5, 7, 8, 16, 32, 256] {
            let f = BaseField::new(q).unwrap();
            for a in 0..q as u8 {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "q={q} a={a}");
                }
                for b in 0..q as u8 {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in [0u8, 1, (q - 1) as u8] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_unsupported_sizes() {
        for q in [0u32, 1, 6, 9, 12, 257, 512] {
            assert!(BaseField::new(q).is_err(), "q={q}");
        }
    }

    #[test]
    fn gf256_uses_the_least_octic() {
        let f = BaseField::new(256).unwrap();
        // 0x02 · 0x80 = Z^8 = Z^4 + Z^3 + Z + 1
        assert_eq!(f.mul(2, 0x80), 0x1b);
    }
}
