use rand::Rng;

use super::{clmul, poly, BaseField, ExtField};
use crate::error::{domain, Error, Result};

/// 𝔽_{q^m} for q = 2^S, bit-sliced: plane b of an element holds bit b of every
/// coordinate, coordinate i at bit position i. Requires m ≤ 127.
///
/// The default defining polynomial is the least binary irreducible of degree
/// m when it stays irreducible over 𝔽_q (always for q = 2, iff gcd(m, S) = 1
/// otherwise), else the least irreducible over 𝔽_q. With a binary modulus,
/// a product is a sum of plane-by-plane carry-less products.
#[derive(Clone, Debug)]
pub struct BinaryExt<const S: usize> {
    base: BaseField,
    m: usize,
    modulus: Vec<u8>,
    mask: u128,
    /// `reduce[c]` = c · X^m mod f.
    reduce: Vec<[u128; S]>,
    /// `scale_rows[c][j]` has bit b set when bit j of c·2^b is set.
    scale_rows: Vec<[u8; S]>,
    /// f − X^m as a bit vector, when f has 0/1 coefficients.
    binary_low: Option<u128>,
    /// `window_reduce[t]` = t(X)·X^m mod f for deg t < 4 (q = 2 only).
    window_reduce: [u128; 16],
    /// `alpha_pow[l]` = Z^l in 𝔽_q for l < 2S − 1.
    alpha_pow: [u8; 16],
    hardware: bool,
}

/// The binary extension 𝔽_{2^m} used by the cryptosystems.
pub type Gf2m = BinaryExt<1>;

impl<const S: usize> BinaryExt<S> {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > 127 {
            return domain(format!("extension degree {m} outside 1..=127"));
        }
        let base = BaseField::new(1u32 << S)?;
        let binary = poly::least_irreducible(&BaseField::new(2)?, m);
        let modulus =
            if S == 1 || poly::is_irreducible(&base, &binary) { binary } else { poly::least_irreducible(&base, m) };
        Self::with_modulus(m, modulus)
    }

    /// Uses an explicit monic irreducible defining polynomial (low degree first).
    pub fn with_modulus(m: usize, modulus: Vec<u8>) -> Result<Self> {
        if S == 0 || S > 8 {
            return domain("bit-sliced fields need 1 <= S <= 8");
        }
        if m == 0 || m > 127 {
            return domain(format!("extension degree {m} outside 1..=127"));
        }
        let base = BaseField::new(1u32 << S)?;
        let q = base.q() as usize;
        if modulus.len() != m + 1 || modulus[m] != 1 || modulus.iter().any(|&c| c as usize >= q) {
            return domain("defining polynomial must be monic of degree m");
        }
        if !poly::is_irreducible(&base, &modulus) {
            return domain("defining polynomial is reducible");
        }
        let mut scale_rows = vec![[0u8; S]; q];
        for (c, rows) in scale_rows.iter_mut().enumerate() {
            for b in 0..S {
                let img = base.mul(c as u8, 1 << b);
                for (j, row) in rows.iter_mut().enumerate() {
                    if (img >> j) & 1 == 1 {
                        *row |= 1 << b;
                    }
                }
            }
        }
        let mut alpha_pow = [0u8; 16];
        alpha_pow[0] = 1;
        for l in 1..(2 * S - 1).max(1) {
            alpha_pow[l] = base.mul(alpha_pow[l - 1], 2);
        }
        let binary_low = modulus[..m]
            .iter()
            .all(|&c| c <= 1)
            .then(|| modulus[..m].iter().enumerate().fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i)));
        let mut field = Self {
            base,
            m,
            modulus: modulus.clone(),
            mask: (1u128 << m) - 1,
            reduce: Vec::new(),
            scale_rows,
            binary_low,
            window_reduce: [0; 16],
            alpha_pow,
            hardware: clmul::hardware_available(),
        };
        // X^m ≡ -(f − X^m)
        let low: Vec<u8> = modulus[..m].iter().map(|&c| field.base.neg(c)).collect();
        let low = field.from_coords(&low);
        field.reduce = (0..q).map(|c| field.scale(&low, c as u8)).collect();
        if S == 1 {
            for t in 0..16usize {
                let mut acc = [0u128; S];
                for bit in (0..4).rev() {
                    field.mul_x(&mut acc);
                    if (t >> bit) & 1 == 1 {
                        field.axpy(&mut acc, 1, &low);
                    }
                }
                field.window_reduce[t] = acc[0];
            }
        }
        Ok(field)
    }

    /// Disables the carry-less multiply instruction (for cross-checks).
    pub fn portable(mut self) -> Self {
        self.hardware = false;
        self
    }

    #[inline]
    fn mul_x(&self, t: &mut [u128; S]) {
        let top = self.coord(t, self.m - 1);
        for plane in t.iter_mut() {
            *plane = (*plane << 1) & self.mask;
        }
        let r = &self.reduce[top as usize];
        for b in 0..S {
            t[b] ^= r[b];
        }
    }

    #[inline]
    fn occupied(a: &[u128; S]) -> u128 {
        a.iter().fold(0, |acc, p| acc | p)
    }

    /// Reduces a 256-bit binary polynomial modulo a binary f.
    #[inline]
    fn reduce_wide(&self, low: u128, mut hi: u128, mut lo: u128) -> u128 {
        let m = self.m;
        loop {
            let top = (lo >> m) | (hi << (128 - m));
            if top == 0 {
                return lo;
            }
            let (h2, l2) = clmul::mul128(top, low);
            hi = h2;
            lo = l2 ^ (lo & self.mask);
        }
    }

    /// q = 2 without hardware: 4-bit windows of b, top first, folding the four
    /// bits shifted out of the top through `window_reduce`.
    #[inline]
    fn mul_window(&self, a: u128, b: u128) -> u128 {
        let m = self.m;
        let mut table = [0u128; 16];
        table[1] = a;
        for k in 1..8 {
            let t = table[k];
            let carry = (t >> (m - 1)) & 1;
            table[2 * k] = ((t << 1) & self.mask) ^ (self.reduce[1][0] & carry.wrapping_neg());
            table[2 * k + 1] = table[2 * k] ^ a;
        }
        if m < 4 {
            let mut acc = 0u128;
            for i in (0..m).rev() {
                let carry = (acc >> (m - 1)) & 1;
                acc = ((acc << 1) & self.mask) ^ (self.reduce[1][0] & carry.wrapping_neg());
                acc ^= table[((b >> i) & 1) as usize];
            }
            return acc;
        }
        let top = 128 - b.leading_zeros() as usize;
        let mut i = top.div_ceil(4) * 4;
        let mut acc = 0u128;
        while i > 0 {
            i -= 4;
            let spill = (acc >> (m - 4)) as usize;
            acc = ((acc << 4) & self.mask) ^ self.window_reduce[spill];
            acc ^= table[((b >> i) & 0xf) as usize];
        }
        acc
    }

    /// a = Σ_j Z^j A_j(X): multiply planes pairwise, fold Z^l for l ≥ S back
    /// into the low planes, then reduce each plane modulo the binary f.
    fn mul_planes(&self, low: u128, a: &[u128; S], b: &[u128; S]) -> [u128; S] {
        let mut hi = [0u128; 15];
        let mut lo = [0u128; 15];
        for j in 0..S {
            if a[j] == 0 {
                continue;
            }
            for k in 0..S {
                if b[k] == 0 {
                    continue;
                }
                let (h, l) = clmul::mul128(a[j], b[k]);
                hi[j + k] ^= h;
                lo[j + k] ^= l;
            }
        }
        for l in (S..2 * S - 1).rev() {
            let v = self.alpha_pow[l];
            for t in 0..S {
                if (v >> t) & 1 == 1 {
                    hi[t] ^= hi[l];
                    lo[t] ^= lo[l];
                }
            }
        }
        let mut out = [0u128; S];
        for t in 0..S {
            out[t] = self.reduce_wide(low, hi[t], lo[t]);
        }
        out
    }

    /// Horner over the coordinates of b, top first: acc = acc·X + b_i·a.
    fn mul_horner(&self, a: &[u128; S], b: &[u128; S]) -> [u128; S] {
        let mut out = [0u128; S];
        let occ = Self::occupied(b);
        if occ == 0 {
            return out;
        }
        let top = 127 - occ.leading_zeros() as usize;
        let q = self.q() as usize;
        if q <= 16 {
            let mut multiples = [[0u128; S]; 16];
            for (c, slot) in multiples.iter_mut().enumerate().take(q).skip(1) {
                *slot = self.scale(a, c as u8);
            }
            for i in (0..=top).rev() {
                self.mul_x(&mut out);
                let t = &multiples[self.coord(b, i) as usize];
                for k in 0..S {
                    out[k] ^= t[k];
                }
            }
        } else {
            for i in (0..=top).rev() {
                self.mul_x(&mut out);
                self.axpy(&mut out, self.coord(b, i), a);
            }
        }
        out
    }

    /// Binary extended Euclid on bit vectors (q = 2).
    fn inv_binary(&self, a: u128) -> u128 {
        let full = self.reduce[1][0] | (1u128 << self.m);
        let (mut u, mut v) = (a, full);
        let (mut g1, mut g2) = (1u128, 0u128);
        while u != 1 {
            let du = 127 - u.leading_zeros() as i32;
            let dv = 127 - v.leading_zeros() as i32;
            let mut j = du - dv;
            if j < 0 {
                std::mem::swap(&mut u, &mut v);
                std::mem::swap(&mut g1, &mut g2);
                j = -j;
            }
            u ^= v << j;
            g1 ^= g2 << j;
        }
        g1 & self.mask
    }
}

impl<const S: usize> ExtField for BinaryExt<S> {
    type Elem = [u128; S];

    #[inline]
    fn base(&self) -> &BaseField {
        &self.base
    }

    #[inline]
    fn m(&self) -> usize {
        self.m
    }

    fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    #[inline]
    fn zero(&self) -> [u128; S] {
        [0; S]
    }

    fn one(&self) -> [u128; S] {
        let mut a = [0; S];
        a[0] = 1;
        a
    }

    #[inline]
    fn is_zero(&self, a: &[u128; S]) -> bool {
        a.iter().all(|&p| p == 0)
    }

    #[inline]
    fn add(&self, a: &[u128; S], b: &[u128; S]) -> [u128; S] {
        let mut out = *a;
        for i in 0..S {
            out[i] ^= b[i];
        }
        out
    }

    #[inline]
    fn sub(&self, a: &[u128; S], b: &[u128; S]) -> [u128; S] {
        self.add(a, b)
    }

    #[inline]
    fn neg(&self, a: &[u128; S]) -> [u128; S] {
        *a
    }

    #[inline]
    fn mul(&self, a: &[u128; S], b: &[u128; S]) -> [u128; S] {
        match self.binary_low {
            Some(low) if self.hardware => {
                if S == 1 {
                    let (hi, lo) = clmul::mul128(a[0], b[0]);
                    let mut out = [0u128; S];
                    out[0] = self.reduce_wide(low, hi, lo);
                    out
                } else {
                    self.mul_planes(low, a, b)
                }
            }
            _ if S == 1 => {
                let mut out = [0u128; S];
                if a[0] != 0 && b[0] != 0 {
                    out[0] = self.mul_window(a[0], b[0]);
                }
                out
            }
            _ => self.mul_horner(a, b),
        }
    }

    fn inv(&self, a: &[u128; S]) -> Result<[u128; S]> {
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        if S == 1 {
            let mut out = [0u128; S];
            out[0] = self.inv_binary(a[0]);
            return Ok(out);
        }
        let inv = poly::inv_mod(&self.base, &self.coords(a), &self.modulus).ok_or(Error::ZeroInverse)?;
        Ok(self.from_coords(&inv))
    }

    #[inline]
    fn scale(&self, a: &[u128; S], c: u8) -> [u128; S] {
        let mut out = [0u128; S];
        self.axpy(&mut out, c, a);
        out
    }

    #[inline]
    fn axpy(&self, acc: &mut [u128; S], c: u8, x: &[u128; S]) {
        if c == 0 {
            return;
        }
        if c == 1 {
            for b in 0..S {
                acc[b] ^= x[b];
            }
            return;
        }
        let rows = &self.scale_rows[c as usize];
        for j in 0..S {
            let mut sel = rows[j];
            while sel != 0 {
                let b = sel.trailing_zeros() as usize;
                acc[j] ^= x[b];
                sel &= sel - 1;
            }
        }
    }

    #[inline]
    fn coord(&self, a: &[u128; S], i: usize) -> u8 {
        let mut c = 0u8;
        for (b, plane) in a.iter().enumerate() {
            c |= (((plane >> i) & 1) as u8) << b;
        }
        c
    }

    fn from_coords(&self, coords: &[u8]) -> [u128; S] {
        assert!(coords.len() <= self.m, "too many coordinates");
        let mut a = [0u128; S];
        for (i, &c) in coords.iter().enumerate() {
            assert!((c as u32) < self.q(), "coordinate out of range");
            for (b, plane) in a.iter_mut().enumerate() {
                *plane |= (((c >> b) & 1) as u128) << i;
            }
        }
        a
    }

    #[inline]
    fn leading(&self, a: &[u128; S]) -> Option<usize> {
        let occ = Self::occupied(a);
        (occ != 0).then(|| occ.trailing_zeros() as usize)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> [u128; S] {
        let mut a = [0u128; S];
        for plane in a.iter_mut() {
            *plane = rng.gen::<u128>() & self.mask;
        }
        a
    }
}
