//! 𝔽_q-subspaces of 𝔽_{q^m} in canonical reduced row echelon form.
//!
//! Pivot of a basis row = index of its first nonzero coordinate. Rows are kept
//! sorted by pivot, each pivot coordinate equals 1 and is zero in every other
//! row, so equal subspaces have identical representations.
//!
//! The `*_counted` variants add the number of base-field operations spent on
//! row reductions to a caller-owned counter (one row operation on an element
//! costs m).

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::field::ExtField;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace<E> {
    rows: Vec<E>,
    pivots: Vec<usize>,
}

impl<E: Clone + Eq> Default for Subspace<E> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<E: Clone + Eq> Subspace<E> {
    pub fn zero() -> Self {
        Self { rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Canonical basis, sorted by pivot.
    pub fn basis(&self) -> &[E] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

impl<E: Clone + Eq + std::fmt::Debug> Subspace<E> {
    pub fn span<'a, F>(field: &F, vectors: impl IntoIterator<Item = &'a E>) -> Self
    where
        F: ExtField<Elem = E>,
        E: 'a,
    {
        let mut s = Self::zero();
        for v in vectors {
            s.insert(field, v.clone());
        }
        s
    }

    pub fn full<F: ExtField<Elem = E>>(field: &F) -> Self {
        let mut rows = Vec::with_capacity(field.m());
        for i in 0..field.m() {
            let mut c = vec![0u8; i + 1];
            c[i] = 1;
            rows.push(field.from_coords(&c));
        }
        Self { rows, pivots: (0..field.m()).collect() }
    }

    /// Uniform random subspace of the given dimension: `dim` random elements,
    /// redrawn until independent. Also returns those generators.
    pub fn random<F, R>(field: &F, dim: usize, rng: &mut R) -> Result<(Self, Vec<E>)>
    where
        F: ExtField<Elem = E>,
        R: Rng + ?Sized,
    {
        if dim > field.m() {
            return domain(format!("dimension {dim} exceeds m = {}", field.m()));
        }
        loop {
            let gens: Vec<E> = (0..dim).map(|_| field.random(rng)).collect();
            let s = Self::span(field, &gens);
            if s.dim() == dim {
                return Ok((s, gens));
            }
        }
    }

    /// `v` minus its component along the pivots: zero iff `v` is in the space.
    pub fn reduce<F: ExtField<Elem = E>>(&self, field: &F, v: &E) -> E {
        let mut ops = 0;
        self.reduce_counted(field, v.clone(), &mut ops)
    }

    fn reduce_counted<F: ExtField<Elem = E>>(&self, field: &F, mut v: E, ops: &mut u64) -> E {
        let neg_needed = field.base().p() != 2;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = field.coord(&v, p);
            if c != 0 {
                let c = if neg_needed { field.base().neg(c) } else { c };
                field.axpy(&mut v, c, row);
                *ops += field.m() as u64;
            }
        }
        v
    }

    pub fn contains<F: ExtField<Elem = E>>(&self, field: &F, v: &E) -> bool {
        field.is_zero(&self.reduce(field, v))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the space.
    pub fn coordinates<F: ExtField<Elem = E>>(&self, field: &F, v: &E) -> Option<Vec<u8>> {
        if !self.contains(field, v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| field.coord(v, p)).collect())
    }

    /// Adds `v` to the space; returns whether the dimension grew.
    pub fn insert<F: ExtField<Elem = E>>(&mut self, field: &F, v: E) -> bool {
        let mut ops = 0;
        self.insert_counted(field, v, &mut ops)
    }

    pub fn insert_counted<F: ExtField<Elem = E>>(&mut self, field: &F, v: E, ops: &mut u64) -> bool {
        let mut v = self.reduce_counted(field, v, ops);
        let Some(p) = field.leading(&v) else {
            return false;
        };
        let lead = field.coord(&v, p);
        if lead != 1 {
            v = field.scale(&v, field.base().inv(lead));
            *ops += field.m() as u64;
        }
        let neg_needed = field.base().p() != 2;
        for row in self.rows.iter_mut() {
            let c = field.coord(row, p);
            if c != 0 {
                let c = if neg_needed { field.base().neg(c) } else { c };
                field.axpy(row, c, &v);
                *ops += field.m() as u64;
            }
        }
        let at = self.pivots.partition_point(|&x| x < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        true
    }

    pub fn sum<F: ExtField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let mut ops = 0;
        self.sum_counted(field, other, &mut ops)
    }

    pub fn sum_counted<F: ExtField<Elem = E>>(&self, field: &F, other: &Self, ops: &mut u64) -> Self {
        let (mut big, small) = if self.dim() >= other.dim() { (self.clone(), other) } else { (other.clone(), self) };
        for v in &small.rows {
            big.insert_counted(field, v.clone(), ops);
        }
        big
    }

    pub fn intersect<F: ExtField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let mut ops = 0;
        self.intersect_counted(field, other, &mut ops)
    }

    /// Kernel method: x = Σ λ_i a_i lies in B iff Σ λ_i red_B(a_i) = 0, so
    /// echelonizing the pairs (red_B(a_i), a_i) on the left half exposes the
    /// intersection in the right halves of rows whose left half vanishes.
    pub fn intersect_counted<F: ExtField<Elem = E>>(&self, field: &F, other: &Self, ops: &mut u64) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (a, b) = if self.dim() <= other.dim() { (self, other) } else { (other, self) };
        let m = field.m() as u64;
        let neg_needed = field.base().p() != 2;
        let mut pivots: Vec<(usize, E, E)> = Vec::new();
        let mut out = Self::zero();
        for a_i in &a.rows {
            let mut left = b.reduce_counted(field, a_i.clone(), ops);
            let mut right = a_i.clone();
            for (p, pl, pr) in &pivots {
                let c = field.coord(&left, *p);
                if c != 0 {
                    let c = if neg_needed { field.base().neg(c) } else { c };
                    field.axpy(&mut left, c, pl);
                    field.axpy(&mut right, c, pr);
                    *ops += 2 * m;
                }
            }
            match field.leading(&left) {
                None => {
                    out.insert_counted(field, right, ops);
                }
                Some(p) => {
                    let inv = field.base().inv(field.coord(&left, p));
                    let (l, r) = (field.scale(&left, inv), field.scale(&right, inv));
                    *ops += 2 * m;
                    let at = pivots.partition_point(|x| x.0 < p);
                    pivots.insert(at, (p, l, r));
                }
            }
        }
        out
    }

    /// a · S.
    pub fn scale_by<F: ExtField<Elem = E>>(&self, field: &F, a: &E) -> Self {
        if field.is_zero(a) {
            return Self::zero();
        }
        let images: Vec<E> = self.rows.iter().map(|r| field.mul(a, r)).collect();
        Self::span(field, &images)
    }

    /// f⁻¹ · S.
    pub fn scalar_shift<F: ExtField<Elem = E>>(&self, field: &F, f: &E) -> Result<Self> {
        let inv = field.inv(f)?;
        Ok(self.scale_by(field, &inv))
    }

    /// Product space ⟨a·b : a ∈ self, b ∈ other⟩.
    pub fn product<F: ExtField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let mut s = Self::zero();
        for a in &self.rows {
            for b in &other.rows {
                s.insert(field, field.mul(a, b));
            }
        }
        s
    }

    /// Product space with generators given as a list (not necessarily a basis).
    pub fn product_with<F: ExtField<Elem = E>>(&self, field: &F, generators: &[E], ops: &mut u64) -> Self {
        let mut s = Self::zero();
        for g in generators {
            for b in &self.rows {
                s.insert_counted(field, field.mul(g, b), ops);
            }
        }
        s
    }

    pub fn is_subspace_of<F: ExtField<Elem = E>>(&self, field: &F, other: &Self) -> bool {
        self.rows.iter().all(|v| other.contains(field, v))
    }

    /// One byte holding the dimension, then each basis row serialized as an
    /// element, in pivot order.
    pub fn encode<F: ExtField<Elem = E>>(&self, field: &F) -> Vec<u8> {
        assert!(self.dim() <= 255, "dimension does not fit the encoding");
        let mut out = vec![self.dim() as u8];
        for r in &self.rows {
            field.write_bytes(r, &mut out);
        }
        out
    }

    /// Inverse of [`Subspace::encode`]; rejects non-canonical input.
    pub fn decode<F: ExtField<Elem = E>>(field: &F, bytes: &[u8]) -> Result<Self> {
        let (&dim, rest) = bytes.split_first().ok_or_else(|| Error::Format("empty subspace encoding".into()))?;
        let eb = field.element_bytes();
        if rest.len() != dim as usize * eb {
            return Err(Error::Format("subspace encoding has the wrong length".into()));
        }
        let rows: Vec<E> = rest.chunks(eb).map(|c| field.read_bytes(c)).collect::<Result<_>>()?;
        let s = Self::span(field, &rows);
        if s.rows != rows {
            return Err(Error::Format("basis is not in reduced row echelon form".into()));
        }
        Ok(s)
    }
}

/// Vector of length n with coordinates drawn uniformly from `space`.
pub fn sample_vector_in<F, R>(field: &F, space: &Subspace<F::Elem>, n: usize, rng: &mut R) -> Vec<F::Elem>
where
    F: ExtField,
    R: Rng + ?Sized,
{
    let q = field.q();
    (0..n)
        .map(|_| {
            let mut x = field.zero();
            for b in space.basis() {
                field.axpy(&mut x, rng.gen_range(0..q) as u8, b);
            }
            x
        })
        .collect()
}

/// Vector of length n whose support is exactly `space`, by rejection.
pub fn sample_full_support<F, R>(field: &F, space: &Subspace<F::Elem>, n: usize, rng: &mut R) -> Result<Vec<F::Elem>>
where
    F: ExtField,
    R: Rng + ?Sized,
{
    if n < space.dim() {
        return domain(format!("{n} coordinates cannot span a space of dimension {}", space.dim()));
    }
    loop {
        let v = sample_vector_in(field, space, n, rng);
        if Subspace::span(field, &v).dim() == space.dim() {
            return Ok(v);
        }
    }
}

type VectorPair<E> = (Vec<E>, Vec<E>);

/// Two vectors of length n, each with support exactly `space`.
pub fn sample_support_pair<F, R>(
    field: &F,
    space: &Subspace<F::Elem>,
    n: usize,
    rng: &mut R,
) -> Result<VectorPair<F::Elem>>
where
    F: ExtField,
    R: Rng + ?Sized,
{
    let a = sample_full_support(field, space, n, rng)?;
    let b = sample_full_support(field, space, n, rng)?;
    Ok((a, b))
}

/// log₂ of the Gaussian binomial [m w]_q, the number of w-dimensional
/// subspaces of 𝔽_q^m.
pub fn gaussian_binomial_log2(m: usize, w: usize, q: u32) -> f64 {
    if w > m {
        return f64::NEG_INFINITY;
    }
    let lq = (q as f64).log2();
    let mut acc = 0.0;
    for i in 0..w {
        // log₂(q^m − q^i) − log₂(q^w − q^i)
        let top = m as f64 * lq + (-(q as f64).powi(i as i32 - m as i32)).ln_1p() / std::f64::consts::LN_2;
        let bot = w as f64 * lq + (-(q as f64).powi(i as i32 - w as i32)).ln_1p() / std::f64::consts::LN_2;
        acc += top - bot;
    }
    acc
}
