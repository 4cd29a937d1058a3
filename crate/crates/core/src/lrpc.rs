//! LRPC codes: homogeneous parity-check matrices of low weight, syndromes and
//! the basic decoder.
//!
//! A code is stored both as its parity-check matrix H over 𝔽_{q^m} and as the
//! coefficient matrix Ĥ over 𝔽_q: row (i·d + u), column j of Ĥ holds h_{iju},
//! where h_{ij} = Σ_u h_{iju} f_u.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::ExtField;
use crate::matrix::{ext_rank, FqMatrix};
use crate::ring::{ideal_parity_matrix, ring_inv, ring_mul, IdealModulus};
use crate::subspace::{sample_full_support, Subspace};

const MAX_RESAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Accept d·(n−k) < n, where the error system is underdetermined.
    #[serde(default)]
    pub allow_underdetermined: bool,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, d: usize) -> Self {
        Self { n, k, d, allow_underdetermined: false }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.k >= self.n {
            return domain(format!("need k < n, got n = {}, k = {}", self.n, self.k));
        }
        if self.d == 0 || self.d > m {
            return domain(format!("need 1 ≤ d ≤ m = {m}, got d = {}", self.d));
        }
        if self.d * (self.n - self.k) < self.n && !self.allow_underdetermined {
            return domain(format!(
                "d·(n−k) = {} < n = {}: error coordinates are not determined",
                self.d * (self.n - self.k),
                self.n
            ));
        }
        Ok(())
    }
}

/// (h₁, h₂, P) for codes whose parity-check matrix is (H₁ | H₂) with column j
/// of H_t equal to X^j·h_t mod P.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealForm<E> {
    pub h1: Vec<E>,
    pub h2: Vec<E>,
    pub modulus: IdealModulus,
}

#[derive(Clone, Debug)]
pub struct LrpcCode<F: ExtField> {
    n: usize,
    k: usize,
    h: Vec<Vec<F::Elem>>,
    f_basis: Vec<F::Elem>,
    support: Subspace<F::Elem>,
    coeffs: FqMatrix,
    ideal: Option<IdealForm<F::Elem>>,
}

/// Expresses elements of 𝔽_{q^m} in a fixed independent family (g_1, …, g_N).
#[derive(Clone, Debug)]
pub struct BasisSolver<E> {
    generators: Vec<E>,
    /// N coordinate positions at which the generators are independent.
    positions: Vec<usize>,
    /// Inverse of the N × N restriction to `positions`.
    inverse: FqMatrix,
}

impl<E: Clone + Eq + std::fmt::Debug> BasisSolver<E> {
    /// `None` if the generators are dependent.
    pub fn new<F: ExtField<Elem = E>>(field: &F, generators: &[E]) -> Option<Self> {
        let n = generators.len();
        let columns: Vec<Vec<u8>> =
            (0..field.m()).map(|c| generators.iter().map(|g| field.coord(g, c)).collect()).collect();
        let full = FqMatrix::from_rows(&columns);
        let positions = full.independent_rows(field.base(), n);
        if positions.len() < n {
            return None;
        }
        let inverse = full.select_rows(&positions).inverse(field.base())?;
        Some(Self { generators: generators.to_vec(), positions, inverse })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Coefficients λ with v = Σ λ_l g_l, or `None` if v is outside the span.
    pub fn solve<F: ExtField<Elem = E>>(&self, field: &F, v: &E) -> Option<Vec<u8>> {
        let b: Vec<u8> = self.positions.iter().map(|&c| field.coord(v, c)).collect();
        let x = self.inverse.mul_vec(field.base(), &b);
        (self.combine(field, &x) == *v).then_some(x)
    }

    pub fn combine<F: ExtField<Elem = E>>(&self, field: &F, coeffs: &[u8]) -> E {
        let mut acc = field.zero();
        for (g, &c) in self.generators.iter().zip(coeffs) {
            if c != 0 {
                field.axpy(&mut acc, c, g);
            }
        }
        acc
    }
}

impl<F: ExtField> LrpcCode<F> {
    /// Random LRPC code: a random d-dimensional F with a random basis, and
    /// uniform coefficients h_{iju}. Resamples the coefficients until the
    /// entries span F, H has full rank n − k and, when d(n−k) ≥ n, Ĥ has full
    /// column rank n.
    pub fn random<R: Rng + ?Sized>(field: &F, params: CodeParams, rng: &mut R) -> Result<Self> {
        params.validate(field.m())?;
        let CodeParams { n, k, d, .. } = params;
        let (support, f_basis) = Subspace::random(field, d, rng)?;
        let q = field.q();
        let rows = (n - k) * d;
        for _ in 0..MAX_RESAMPLES {
            let mut coeffs = FqMatrix::zeros(rows, n);
            for i in 0..rows {
                for j in 0..n {
                    coeffs.set(i, j, rng.gen_range(0..q) as u8);
                }
            }
            if rows >= n && coeffs.rank(field.base()) < n {
                continue;
            }
            let h = expand_entries(field, &coeffs, &f_basis, n - k, n);
            if Subspace::span(field, h.iter().flatten()).dim() != d {
                continue;
            }
            if ext_rank(field, &h) != n - k {
                continue;
            }
            return Ok(Self { n, k, h, f_basis, support, coeffs, ideal: None });
        }
        Err(Error::Domain(format!("no admissible code found for n = {n}, k = {k}, d = {d}")))
    }

    /// Ideal LRPC code over 𝔽_{q^m}[X]/(P): x, y with Supp(x) = Supp(y) = F
    /// and x invertible. The code's ideal form is (x, y), so the syndrome of
    /// (e₁, e₂) is e₁x + e₂y; it is the code of parity-check matrix (I | H)
    /// with H the ideal matrix of h = x⁻¹y, which is returned alongside.
    pub fn random_ideal<R: Rng + ?Sized>(
        field: &F,
        modulus: &IdealModulus,
        d: usize,
        rng: &mut R,
    ) -> Result<(Self, Vec<F::Elem>)> {
        let n = modulus.degree();
        if d == 0 || d > field.m() || d > n {
            return domain(format!("need 1 ≤ d ≤ min(m, deg P), got d = {d}"));
        }
        let (support, f_basis) = Subspace::random(field, d, rng)?;
        for _ in 0..MAX_RESAMPLES {
            let x = sample_full_support(field, &support, n, rng)?;
            let Ok(x_inv) = ring_inv(field, &x, modulus) else {
                continue;
            };
            let y = sample_full_support(field, &support, n, rng)?;
            let h = ring_mul(field, &x_inv, &y, modulus)?;
            let code = Self::from_ideal(field, x, y, modulus, f_basis)?;
            return Ok((code, h));
        }
        Err(Error::Domain("no invertible x found".into()))
    }

    /// Ideal code with parity-check matrix built from (h₁, h₂) whose
    /// coordinates lie in the span of `f_basis`.
    pub fn from_ideal(
        field: &F,
        h1: Vec<F::Elem>,
        h2: Vec<F::Elem>,
        modulus: &IdealModulus,
        f_basis: Vec<F::Elem>,
    ) -> Result<Self> {
        let h = ideal_parity_matrix(field, &h1, &h2, modulus)?;
        let mut code = Self::from_parts(field, h, f_basis)?;
        code.ideal = Some(IdealForm { h1, h2, modulus: modulus.clone() });
        Ok(code)
    }

    /// Code from an explicit parity-check matrix whose entries lie in the span
    /// of the independent family `f_basis`. H must have full rank.
    pub fn from_parts(field: &F, h: Vec<Vec<F::Elem>>, f_basis: Vec<F::Elem>) -> Result<Self> {
        let n_rows = h.len();
        let n = h.first().map_or(0, Vec::len);
        if n_rows == 0 || n <= n_rows || h.iter().any(|r| r.len() != n) {
            return domain("parity-check matrix must be (n−k) × n with 0 < n−k < n");
        }
        let d = f_basis.len();
        let solver = BasisSolver::new(field, &f_basis).ok_or_else(|| Error::Domain("f_basis is dependent".into()))?;
        let mut coeffs = FqMatrix::zeros(n_rows * d, n);
        for (i, row) in h.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let c =
                    solver.solve(field, x).ok_or_else(|| Error::Domain(format!("entry ({i}, {j}) is outside F")))?;
                for (u, &cu) in c.iter().enumerate() {
                    coeffs.set(i * d + u, j, cu);
                }
            }
        }
        if ext_rank(field, &h) != n_rows {
            return domain("parity-check matrix is not of full rank");
        }
        let support = Subspace::span(field, &f_basis);
        Ok(Self { n, k: n - n_rows, h, f_basis, support, coeffs, ideal: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.f_basis.len()
    }

    /// Parity-check matrix, (n−k) rows of length n.
    pub fn h(&self) -> &[Vec<F::Elem>] {
        &self.h
    }

    pub fn f_basis(&self) -> &[F::Elem] {
        &self.f_basis
    }

    pub fn support(&self) -> &Subspace<F::Elem> {
        &self.support
    }

    /// Ĥ, (n−k)·d × n over 𝔽_q.
    pub fn coeffs(&self) -> &FqMatrix {
        &self.coeffs
    }

    pub fn ideal(&self) -> Option<&IdealForm<F::Elem>> {
        self.ideal.as_ref()
    }

    /// H·yᵀ, computed as Σ_{u,j} h_{iju}·(f_u y_j): d·n extension
    /// multiplications, the rest are 𝔽_q-scalings.
    pub fn syndrome(&self, field: &F, y: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.check_len(y)?;
        let d = self.d();
        let fy: Vec<Vec<F::Elem>> = self.f_basis.iter().map(|f| y.iter().map(|x| field.mul(f, x)).collect()).collect();
        Ok((0..self.n - self.k)
            .map(|i| {
                let mut s = field.zero();
                for (u, row) in fy.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let c = self.coeffs.get(i * d + u, j);
                        if c != 0 {
                            field.axpy(&mut s, c, v);
                        }
                    }
                }
                s
            })
            .collect())
    }

    /// H·yᵀ by plain matrix-vector multiplication over 𝔽_{q^m}.
    pub fn syndrome_direct(&self, field: &F, y: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.check_len(y)?;
        Ok(self
            .h
            .iter()
            .map(|row| row.iter().zip(y).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b))))
            .collect())
    }

    fn check_len(&self, y: &[F::Elem]) -> Result<()> {
        if y.len() != self.n {
            return domain(format!("vector has length {}, expected {}", y.len(), self.n));
        }
        Ok(())
    }

    /// Systematic generator matrix G (k × n) with G·Hᵀ = 0.
    pub fn generator(&self, field: &F) -> SystematicGenerator<F::Elem> {
        let (n, r) = (self.n, self.n - self.k);
        let mut rows = self.h.clone();
        let pivots = crate::matrix::ext_rref(field, &mut rows);
        debug_assert_eq!(pivots.len(), r);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        // For free column t: x_t = 1, x_{pivot_i} = −rows[i][t].
        let gen_rows = free
            .iter()
            .map(|&t| {
                let mut g = vec![field.zero(); n];
                g[t] = field.one();
                for (i, &p) in pivots.iter().enumerate() {
                    g[p] = field.neg(&rows[i][t]);
                }
                g
            })
            .collect();
        SystematicGenerator { info_set: free, rows: gen_rows }
    }
}

fn expand_entries<F: ExtField>(
    field: &F,
    coeffs: &FqMatrix,
    f_basis: &[F::Elem],
    n_rows: usize,
    n: usize,
) -> Vec<Vec<F::Elem>> {
    let d = f_basis.len();
    (0..n_rows)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut x = field.zero();
                    for (u, f) in f_basis.iter().enumerate() {
                        let c = coeffs.get(i * d + u, j);
                        if c != 0 {
                            field.axpy(&mut x, c, f);
                        }
                    }
                    x
                })
                .collect()
        })
        .collect()
}

/// Generator matrix whose restriction to `info_set` is the identity, so the
/// message is read off a codeword at those positions.
#[derive(Clone, Debug)]
pub struct SystematicGenerator<E> {
    info_set: Vec<usize>,
    rows: Vec<Vec<E>>,
}

impl<E: Clone + Eq + std::fmt::Debug> SystematicGenerator<E> {
    pub fn rows(&self) -> &[Vec<E>] {
        &self.rows
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn encode<F: ExtField<Elem = E>>(&self, field: &F, message: &[E]) -> Result<Vec<E>> {
        if message.len() != self.rows.len() {
            return domain(format!("message has length {}, expected {}", message.len(), self.rows.len()));
        }
        let n = self.rows.first().map_or(0, Vec::len);
        let mut c = vec![field.zero(); n];
        for (x, row) in message.iter().zip(&self.rows) {
            for (cj, g) in c.iter_mut().zip(row) {
                *cj = field.add(cj, &field.mul(x, g));
            }
        }
        Ok(c)
    }

    pub fn message(&self, codeword: &[E]) -> Vec<E> {
        self.info_set.iter().map(|&j| codeword[j].clone()).collect()
    }
}

/// ⋂_i f_i⁻¹·S.
pub fn recover_support<F: ExtField>(
    field: &F,
    s: &Subspace<F::Elem>,
    f_basis: &[F::Elem],
) -> Result<Subspace<F::Elem>> {
    let mut ops = 0;
    recover_support_counted(field, s, f_basis, &mut ops)
}

pub fn recover_support_counted<F: ExtField>(
    field: &F,
    s: &Subspace<F::Elem>,
    f_basis: &[F::Elem],
    ops: &mut u64,
) -> Result<Subspace<F::Elem>> {
    let Some((first, rest)) = f_basis.split_first() else {
        return domain("empty f_basis");
    };
    let mut e = s.scalar_shift(field, first)?;
    for f in rest {
        if e.is_zero() {
            break;
        }
        e = e.intersect_counted(field, &s.scalar_shift(field, f)?, ops);
    }
    Ok(e)
}

/// Selected rows of Ĥ and the inverse of the resulting n × n block. The full
/// unfolded matrix Ĥ ⊗ I_r has its inverse block D_H ⊗ I_r, so only D_H is
/// stored.
#[derive(Clone, Debug)]
pub struct DecoderPrecomp {
    rows: Vec<usize>,
    inverse: FqMatrix,
}

impl DecoderPrecomp {
    /// Greedy, deterministic choice of n independent rows of Ĥ.
    pub fn new<F: ExtField>(field: &F, code: &LrpcCode<F>) -> Result<Self> {
        let rows = code.coeffs.independent_rows(field.base(), code.n);
        if rows.len() < code.n {
            return Err(Error::Singular);
        }
        let inverse = code.coeffs.select_rows(&rows).inverse(field.base()).ok_or(Error::Singular)?;
        Ok(Self { rows, inverse })
    }

    /// Row indices (i·d + u) of Ĥ forming the invertible block.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn inverse(&self) -> &FqMatrix {
        &self.inverse
    }

    /// Solves Ĥ_sel·x = b per error-basis index v; returns the coefficients
    /// and the number of 𝔽_q multiplications (n² per v).
    pub fn apply(&self, field_base: &crate::field::BaseField, rhs: &[Vec<u8>]) -> (Vec<Vec<u8>>, u64) {
        let n = self.inverse.rows() as u64;
        let out = rhs.iter().map(|b| self.inverse.mul_vec(field_base, b)).collect();
        (out, n * n * rhs.len() as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeStatus {
    Success,
    SyndromeDeficient,
    IntersectionTooBig,
    SystemInconsistent,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome<E> {
    pub status: DecodeStatus,
    pub error: Option<Vec<E>>,
    pub support: Option<Subspace<E>>,
    pub message: Option<Vec<E>>,
    pub syndrome_dim: usize,
}

impl<E> DecodeOutcome<E> {
    pub fn is_success(&self) -> bool {
        self.status == DecodeStatus::Success
    }
}

/// Solves H·eᵀ = s for e with coordinates in E. Uses the unfolded system in
/// the product basis {f_u e_v} when that family is independent (through
/// `precomp` if given, else by full elimination of Ĥ ⊗ I_r), and otherwise an
/// unfolded system over the canonical basis of 𝔽_{q^m}. `None` when no
/// solution exists or it is not unique.
pub fn solve_error_coordinates<F: ExtField>(
    field: &F,
    code: &LrpcCode<F>,
    e_space: &Subspace<F::Elem>,
    s: &[F::Elem],
    precomp: Option<&DecoderPrecomp>,
) -> Option<Vec<F::Elem>> {
    let (n, d) = (code.n, code.d());
    let eb = e_space.basis();
    let t = eb.len();
    if t == 0 {
        return s.iter().all(|x| field.is_zero(x)).then(|| vec![field.zero(); n]);
    }
    let base = field.base();
    let products: Vec<F::Elem> = code.f_basis.iter().flat_map(|f| eb.iter().map(move |e| field.mul(f, e))).collect();
    let coeffs: Vec<Vec<u8>> = match BasisSolver::new(field, &products) {
        Some(solver) => {
            // xs[i][u·t + v]: coefficient of f_u e_v in s_i
            let xs: Vec<Vec<u8>> = s.iter().map(|si| solver.solve(field, si)).collect::<Option<_>>()?;
            match precomp {
                Some(pc) => {
                    let rhs: Vec<Vec<u8>> =
                        (0..t).map(|v| pc.rows.iter().map(|&row| xs[row / d][(row % d) * t + v]).collect()).collect();
                    let (sol, _) = pc.apply(base, &rhs);
                    (0..n).map(|j| (0..t).map(|v| sol[v][j]).collect()).collect()
                }
                None => {
                    let n_rows = code.coeffs.rows();
                    let mut a = FqMatrix::zeros(n_rows * t, n * t);
                    let mut b = vec![0u8; n_rows * t];
                    for row in 0..n_rows {
                        for v in 0..t {
                            for j in 0..n {
                                a.set(row * t + v, j * t + v, code.coeffs.get(row, j));
                            }
                            b[row * t + v] = xs[row / d][(row % d) * t + v];
                        }
                    }
                    let (x, unique) = a.solve(base, &b)?;
                    if !unique {
                        return None;
                    }
                    x.chunks(t).map(<[u8]>::to_vec).collect()
                }
            }
        }
        None => {
            let m = field.m();
            let n_rows = n - code.k;
            let mut a = FqMatrix::zeros(n_rows * m, n * t);
            let mut b = vec![0u8; n_rows * m];
            for i in 0..n_rows {
                for j in 0..n {
                    for (v, ev) in eb.iter().enumerate() {
                        let p = field.mul(&code.h[i][j], ev);
                        for c in 0..m {
                            a.set(i * m + c, j * t + v, field.coord(&p, c));
                        }
                    }
                }
                for c in 0..m {
                    b[i * m + c] = field.coord(&s[i], c);
                }
            }
            let (x, unique) = a.solve(base, &b)?;
            if !unique {
                return None;
            }
            x.chunks(t).map(<[u8]>::to_vec).collect()
        }
    };
    let e: Vec<F::Elem> = coeffs
        .iter()
        .map(|cj| {
            let mut x = field.zero();
            for (c, ev) in cj.iter().zip(eb) {
                if *c != 0 {
                    field.axpy(&mut x, *c, ev);
                }
            }
            x
        })
        .collect();
    (code.syndrome(field, &e).ok()? == s).then_some(e)
}

/// The basic decoder for errors of rank at most r, with its precomputation
/// and an optional generator for message recovery.
#[derive(Clone, Debug)]
pub struct BasicDecoder<'a, F: ExtField> {
    code: &'a LrpcCode<F>,
    r: usize,
    precomp: Option<DecoderPrecomp>,
    generator: Option<SystematicGenerator<F::Elem>>,
}

impl<'a, F: ExtField> BasicDecoder<'a, F> {
    /// Falls back to full elimination when Ĥ has no invertible n × n block.
    pub fn new(field: &F, code: &'a LrpcCode<F>, r: usize) -> Self {
        Self { code, r, precomp: DecoderPrecomp::new(field, code).ok(), generator: None }
    }

    pub fn without_precomp(code: &'a LrpcCode<F>, r: usize) -> Self {
        Self { code, r, precomp: None, generator: None }
    }

    pub fn with_generator(mut self, field: &F) -> Self {
        self.generator = Some(self.code.generator(field));
        self
    }

    pub fn precomp(&self) -> Option<&DecoderPrecomp> {
        self.precomp.as_ref()
    }

    pub fn decode(&self, field: &F, y: &[F::Elem]) -> Result<DecodeOutcome<F::Elem>> {
        let s = self.code.syndrome(field, y)?;
        let s_space = Subspace::span(field, &s);
        let fail = |status, support| DecodeOutcome {
            status,
            error: None,
            support,
            message: None,
            syndrome_dim: s_space.dim(),
        };
        let e_space =
            if s_space.is_zero() { Subspace::zero() } else { recover_support(field, &s_space, &self.code.f_basis)? };
        if e_space.dim() > self.r {
            return Ok(fail(DecodeStatus::IntersectionTooBig, Some(e_space)));
        }
        let Some(e) = solve_error_coordinates(field, self.code, &e_space, &s, self.precomp.as_ref()) else {
            let status = if s_space.dim() < self.r * self.code.d() {
                DecodeStatus::SyndromeDeficient
            } else {
                DecodeStatus::SystemInconsistent
            };
            return Ok(fail(status, Some(e_space)));
        };
        let message = self.generator.as_ref().map(|g| {
            let c: Vec<F::Elem> = y.iter().zip(&e).map(|(a, b)| field.sub(a, b)).collect();
            g.message(&c)
        });
        Ok(DecodeOutcome {
            status: DecodeStatus::Success,
            error: Some(e),
            support: Some(e_space),
            message,
            syndrome_dim: s_space.dim(),
        })
    }
}

/// One-shot basic decoding; builds the precomputation on every call.
pub fn basic_decode<F: ExtField>(
    field: &F,
    code: &LrpcCode<F>,
    y: &[F::Elem],
    r: usize,
) -> Result<DecodeOutcome<F::Elem>> {
    BasicDecoder::new(field, code, r).decode(field, y)
}
