//! Arithmetic in 𝔽_q and in extensions 𝔽_{q^m} = 𝔽_q[X]/(f).
//!
//! An extension element is identified with its coordinate vector in the
//! polynomial basis (1, X, …, X^{m-1}); coordinate i is the coefficient of X^i.
//! Each implementation fixes f as a function of (q, m) alone (see
//! [`BinaryExt::new`] and [`PrimeExt::new`]), so two contexts with equal
//! (q, m) agree on every encoding.

mod base;
mod binary;
pub mod clmul;
pub mod poly;
mod prime;

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

pub use base::BaseField;
pub use binary::{BinaryExt, Gf2m};
pub use prime::PrimeExt;

use crate::error::{Error, Result};

/// An extension 𝔽_{q^m} of a base field 𝔽_q, viewed as an m-dimensional
/// 𝔽_q-vector space.
pub trait ExtField: Clone + Debug + Send + Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn base(&self) -> &BaseField;
    fn m(&self) -> usize;
    /// Defining polynomial, monic, low degree first (length m + 1).
    fn modulus(&self) -> &[u8];

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Multiplication by a scalar of 𝔽_q.
    fn scale(&self, a: &Self::Elem, c: u8) -> Self::Elem;
    /// `acc += c·x`.
    fn axpy(&self, acc: &mut Self::Elem, c: u8, x: &Self::Elem);

    fn coord(&self, a: &Self::Elem, i: usize) -> u8;
    /// Element with the given coordinates; missing trailing coordinates are 0.
    #[allow(clippy::wrong_self_convention)] // needs the field's context
    fn from_coords(&self, coords: &[u8]) -> Self::Elem;
    /// Index of the first nonzero coordinate.
    fn leading(&self, a: &Self::Elem) -> Option<usize>;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    #[inline]
    fn q(&self) -> u32 {
        self.base().q()
    }

    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem> {
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        let inv = poly::inv_mod(self.base(), &self.coords(a), self.modulus()).ok_or(Error::ZeroInverse)?;
        Ok(self.from_coords(&inv))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    fn coords(&self, a: &Self::Elem) -> Vec<u8> {
        (0..self.m()).map(|i| self.coord(a, i)).collect()
    }

    /// Serialized size: m coordinates of ⌈log₂ q⌉ bits, packed little-endian.
    fn element_bytes(&self) -> usize {
        (self.m() * self.base().bits()).div_ceil(8)
    }

    fn write_bytes(&self, a: &Self::Elem, out: &mut Vec<u8>) {
        let bits = self.base().bits();
        let start = out.len();
        out.resize(start + self.element_bytes(), 0);
        for i in 0..self.m() {
            let c = self.coord(a, i);
            for b in 0..bits {
                if (c >> b) & 1 == 1 {
                    let pos = i * bits + b;
                    out[start + pos / 8] |= 1 << (pos % 8);
                }
            }
        }
    }

    fn read_bytes(&self, bytes: &[u8]) -> Result<Self::Elem> {
        if bytes.len() != self.element_bytes() {
            return Err(Error::Format(format!("element needs {} bytes, got {}", self.element_bytes(), bytes.len())));
        }
        let bits = self.base().bits();
        let total = self.m() * bits;
        for pos in total..bytes.len() * 8 {
            if (bytes[pos / 8] >> (pos % 8)) & 1 == 1 {
                return Err(Error::Format("nonzero padding bits".into()));
            }
        }
        let mut coords = vec![0u8; self.m()];
        for (i, c) in coords.iter_mut().enumerate() {
            let mut v = 0u32;
            for b in 0..bits {
                let pos = i * bits + b;
                v |= (((bytes[pos / 8] >> (pos % 8)) & 1) as u32) << b;
            }
            if v >= self.q() {
                return Err(Error::Format(format!("coordinate {v} out of range")));
            }
            *c = v as u8;
        }
        Ok(self.from_coords(&coords))
    }
}

/// Bytes taken by [`pack_vector`] for `len` elements.
pub fn packed_len<F: ExtField>(field: &F, len: usize) -> usize {
    (len * field.m() * field.base().bits()).div_ceil(8)
}

/// Coordinates of every element as one little-endian bit stream of
/// ⌈log₂ q⌉-bit fields, zero-padded to a byte: ⌈len·m·⌈log₂ q⌉/8⌉ bytes.
pub fn pack_vector<F: ExtField>(field: &F, v: &[F::Elem]) -> Vec<u8> {
    let bits = field.base().bits();
    let mut out = vec![0u8; packed_len(field, v.len())];
    let mut pos = 0;
    for x in v {
        for i in 0..field.m() {
            let c = field.coord(x, i);
            for b in 0..bits {
                if (c >> b) & 1 == 1 {
                    out[pos / 8] |= 1 << (pos % 8);
                }
                pos += 1;
            }
        }
    }
    out
}

/// Inverse of [`pack_vector`]; rejects wrong lengths, nonzero padding and
/// out-of-range coordinates.
pub fn unpack_vector<F: ExtField>(field: &F, bytes: &[u8], len: usize) -> Result<Vec<F::Elem>> {
    if bytes.len() != packed_len(field, len) {
        return Err(Error::Format(format!("expected {} bytes, got {}", packed_len(field, len), bytes.len())));
    }
    let bits = field.base().bits();
    let bit = |pos: usize| (bytes[pos / 8] >> (pos % 8)) & 1;
    let total = len * field.m() * bits;
    if (total..bytes.len() * 8).any(|pos| bit(pos) == 1) {
        return Err(Error::Format("nonzero padding bits".into()));
    }
    let mut pos = 0;
    let mut out = Vec::with_capacity(len);
    let mut coords = vec![0u8; field.m()];
    for _ in 0..len {
        for c in coords.iter_mut() {
            let mut v = 0u32;
            for b in 0..bits {
                v |= (bit(pos) as u32) << b;
                pos += 1;
            }
            if v >= field.q() {
                return Err(Error::Format(format!("coordinate {v} out of range")));
            }
            *c = v as u8;
        }
        out.push(field.from_coords(&coords));
    }
    Ok(out)
}

/// Builds the m × n unfolding of a vector: column j holds the coordinates of
/// `v[j]`.
pub fn unfold<F: ExtField>(field: &F, v: &[F::Elem]) -> Vec<Vec<u8>> {
    (0..field.m()).map(|i| v.iter().map(|x| field.coord(x, i)).collect()).collect()
}

/// Rank weight: the 𝔽_q-dimension of the span of the coordinates.
pub fn rank_weight<F: ExtField>(field: &F, v: &[F::Elem]) -> usize {
    crate::subspace::Subspace::span(field, v).dim()
}

/// Generic computation to run on whichever implementation of 𝔽_{q^m} fits q.
pub trait FieldTask {
    type Output;
    fn run<F: ExtField>(self, field: &F) -> Self::Output;
}

/// Builds 𝔽_{q^m} (bit-sliced for q a power of two, generic for odd prime q)
/// and runs `task` on it.
pub fn with_field<T: FieldTask>(q: u32, m: usize, task: T) -> Result<T::Output> {
    Ok(match q {
        2 => task.run(&Gf2m::new(m)?),
        4 => task.run(&BinaryExt::<2>::new(m)?),
        8 => task.run(&BinaryExt::<3>::new(m)?),
        16 => task.run(&BinaryExt::<4>::new(m)?),
        32 => task.run(&BinaryExt::<5>::new(m)?),
        64 => task.run(&BinaryExt::<6>::new(m)?),
        128 => task.run(&BinaryExt::<7>::new(m)?),
        256 => task.run(&BinaryExt::<8>::new(m)?),
        _ => task.run(&PrimeExt::new(q, m)?),
    })
}
