//! Syndrome-space expansion: growing S = ⟨s_1, …, s_{n−k}⟩ towards the
//! product space EF when dim S < rd, and rank support recovery built on it.
//!
//! Notation: S_i = f_i⁻¹·S and S_{ij} = S_i ∩ S_j, always taken from the
//! current S. Loops over index tuples run in lexicographic order.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::field::ExtField;
use crate::lrpc::recover_support_counted;
use crate::subspace::Subspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionFunction {
    /// S ← (S + f_i S_j) ∩ (S + f_k S_l).
    Fdecode,
    /// S ← S + F·S_{ij}.
    Fprob,
    /// Fixed number of intersections, d−2 guarded additions.
    Crypto,
    /// S ← S + F·(S_{ij} ∩ S_k). Experimental: no success guarantee is known.
    Tradeoff,
}

impl ExpansionFunction {
    /// Smallest m for which the function is meant to be used.
    pub fn min_m(self, r: usize, d: usize) -> usize {
        match self {
            Self::Fdecode => (3 * r * d).saturating_sub(2),
            Self::Fprob | Self::Crypto => 2 * r * d - r,
            Self::Tradeoff => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    pub function: ExpansionFunction,
    /// Reject updates that would push dim S above rd.
    pub dim_guard: bool,
    /// Refuse to run when m is below [`ExpansionFunction::min_m`].
    pub check_m: bool,
    /// Keep a copy of S after every accepted update.
    pub record_snapshots: bool,
}

impl ExpansionConfig {
    pub fn new(function: ExpansionFunction) -> Self {
        Self { function, dim_guard: true, check_m: true, record_snapshots: false }
    }

    pub fn validate(&self, m: usize, r: usize, d: usize) -> Result<()> {
        let min_d = match self.function {
            ExpansionFunction::Fdecode | ExpansionFunction::Fprob => 2,
            ExpansionFunction::Crypto | ExpansionFunction::Tradeoff => 3,
        };
        if d < min_d {
            return domain(format!("{:?} expansion needs d ≥ {min_d}, got {d}", self.function));
        }
        if r == 0 {
            return domain("r must be positive");
        }
        let min_m = self.function.min_m(r, d);
        if self.check_m && m < min_m {
            return domain(format!("{:?} expansion needs m ≥ {min_m}, got {m}", self.function));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionStatus {
    /// dim S reached rd.
    Reached,
    /// A full pass left dim S unchanged.
    Stalled,
    /// Fixed-shape run finished; no verdict.
    Completed,
}

#[derive(Clone, Debug)]
pub struct ExpansionReport<E> {
    pub intersections: u64,
    /// dim S at entry and after every pass.
    pub dims_visited: Vec<usize>,
    /// Base-field operations spent in row reductions.
    pub linalg_ops: u64,
    pub passes: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub snapshots: Vec<Subspace<E>>,
}

impl<E> Default for ExpansionReport<E> {
    fn default() -> Self {
        Self {
            intersections: 0,
            dims_visited: Vec::new(),
            linalg_ops: 0,
            passes: 0,
            accepted: 0,
            rejected: 0,
            snapshots: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Expansion<E> {
    pub space: Subspace<E>,
    pub status: ExpansionStatus,
    pub report: ExpansionReport<E>,
}

impl<E> Expansion<E> {
    pub fn reached(&self) -> bool {
        self.status == ExpansionStatus::Reached
    }
}

struct Run<'a, F: ExtField> {
    field: &'a F,
    f_basis: &'a [F::Elem],
    f_inv: Vec<F::Elem>,
    target: usize,
    config: ExpansionConfig,
    s: Subspace<F::Elem>,
    report: ExpansionReport<F::Elem>,
}

impl<'a, F: ExtField> Run<'a, F> {
    fn new(
        field: &'a F,
        s: &Subspace<F::Elem>,
        f_basis: &'a [F::Elem],
        r: usize,
        config: ExpansionConfig,
    ) -> Result<Self> {
        config.validate(field.m(), r, f_basis.len())?;
        let f_inv = f_basis.iter().map(|f| field.inv(f)).collect::<Result<_>>()?;
        let report = ExpansionReport { dims_visited: vec![s.dim()], ..Default::default() };
        Ok(Self { field, f_basis, f_inv, target: r * f_basis.len(), config, s: s.clone(), report })
    }

    fn scaled(&mut self, a: &F::Elem, x: &Subspace<F::Elem>) -> Subspace<F::Elem> {
        let mut out = Subspace::zero();
        for v in x.basis() {
            out.insert_counted(self.field, self.field.mul(a, v), &mut self.report.linalg_ops);
        }
        out
    }

    fn shifts(&mut self) -> Vec<Subspace<F::Elem>> {
        let s = self.s.clone();
        let inv = self.f_inv.clone();
        inv.iter().map(|a| self.scaled(a, &s)).collect()
    }

    fn intersect(&mut self, a: &Subspace<F::Elem>, b: &Subspace<F::Elem>) -> Subspace<F::Elem> {
        self.report.intersections += 1;
        a.intersect_counted(self.field, b, &mut self.report.linalg_ops)
    }

    fn sum(&mut self, a: &Subspace<F::Elem>, b: &Subspace<F::Elem>) -> Subspace<F::Elem> {
        a.sum_counted(self.field, b, &mut self.report.linalg_ops)
    }

    /// S + F·x.
    fn plus_f_times(&mut self, x: &Subspace<F::Elem>) -> Subspace<F::Elem> {
        let fx = x.product_with(self.field, self.f_basis, &mut self.report.linalg_ops);
        let s = self.s.clone();
        self.sum(&s, &fx)
    }

    /// Applies the guard; returns whether S grew.
    fn offer(&mut self, candidate: Subspace<F::Elem>) -> bool {
        if self.config.dim_guard && candidate.dim() > self.target {
            self.report.rejected += 1;
            return false;
        }
        if candidate == self.s {
            return false;
        }
        self.report.accepted += 1;
        self.s = candidate;
        if self.config.record_snapshots {
            self.report.snapshots.push(self.s.clone());
        }
        true
    }

    fn done(&self) -> bool {
        self.s.dim() == self.target
    }

    fn finish(self, status: ExpansionStatus) -> Expansion<F::Elem> {
        Expansion { space: self.s, status, report: self.report }
    }

    /// Repeats `pass` until S reaches rd or a pass leaves dim S unchanged.
    fn iterate(mut self, pass: impl Fn(&mut Self)) -> Expansion<F::Elem> {
        loop {
            if self.done() {
                return self.finish(ExpansionStatus::Reached);
            }
            let before = self.s.dim();
            pass(&mut self);
            self.report.passes += 1;
            self.report.dims_visited.push(self.s.dim());
            if self.done() {
                return self.finish(ExpansionStatus::Reached);
            }
            if self.s.dim() == before {
                return self.finish(ExpansionStatus::Stalled);
            }
        }
    }
}

/// Expansion with the configured function.
pub fn expand<F: ExtField>(
    field: &F,
    s: &Subspace<F::Elem>,
    f_basis: &[F::Elem],
    r: usize,
    config: ExpansionConfig,
) -> Result<Expansion<F::Elem>> {
    let run = Run::new(field, s, f_basis, r, config)?;
    Ok(match config.function {
        ExpansionFunction::Fdecode => run.iterate(fdecode_pass),
        ExpansionFunction::Fprob => run.iterate(fprob_pass),
        ExpansionFunction::Tradeoff => run.iterate(tradeoff_pass),
        ExpansionFunction::Crypto => crypto_run(run),
    })
}

pub fn expand_fdecode<F: ExtField>(
    field: &F,
    s: &Subspace<F::Elem>,
    f_basis: &[F::Elem],
    r: usize,
) -> Result<Expansion<F::Elem>> {
    expand(field, s, f_basis, r, ExpansionConfig::new(ExpansionFunction::Fdecode))
}

pub fn expand_fprob<F: ExtField>(
    field: &F,
    s: &Subspace<F::Elem>,
    f_basis: &[F::Elem],
    r: usize,
) -> Result<Expansion<F::Elem>> {
    expand(field, s, f_basis, r, ExpansionConfig::new(ExpansionFunction::Fprob))
}

pub fn expand_crypto<F: ExtField>(
    field: &F,
    s: &Subspace<F::Elem>,
    f_basis: &[F::Elem],
    r: usize,
) -> Result<Expansion<F::Elem>> {
    expand(field, s, f_basis, r, ExpansionConfig::new(ExpansionFunction::Crypto))
}

fn fdecode_pass<F: ExtField>(run: &mut Run<'_, F>) {
    let d = run.f_basis.len();
    // ratio[i][j] = f_i·f_j⁻¹, so f_i·S_j = ratio[i][j]·S
    let ratio: Vec<Vec<F::Elem>> =
        (0..d).map(|i| (0..d).map(|j| run.field.mul(&run.f_basis[i], &run.f_inv[j])).collect()).collect();
    let pairs: Vec<(usize, usize)> =
        (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        for &(k, l) in &pairs {
            if (i, j) == (k, l) {
                continue;
            }
            if run.done() {
                return;
            }
            let s = run.s.clone();
            let a = run.scaled(&ratio[i][j], &s);
            let a = run.sum(&s, &a);
            let b = run.scaled(&ratio[k][l], &s);
            let b = run.sum(&s, &b);
            let candidate = run.intersect(&a, &b);
            run.offer(candidate);
        }
    }
}

fn fprob_pass<F: ExtField>(run: &mut Run<'_, F>) {
    let d = run.f_basis.len();
    // S_{ij} = S_{ji}; reuse it while S is unchanged
    let mut cached: Vec<Vec<Option<Subspace<F::Elem>>>> = vec![vec![None; d]; d];
    let mut shifts = run.shifts();
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            if run.done() {
                return;
            }
            let sij = match cached[j][i].take().or_else(|| cached[i][j].take()) {
                Some(x) => x,
                None => {
                    let (a, b) = (shifts[i].clone(), shifts[j].clone());
                    run.intersect(&a, &b)
                }
            };
            let candidate = run.plus_f_times(&sij);
            if run.offer(candidate) {
                cached = vec![vec![None; d]; d];
                shifts = run.shifts();
            } else {
                cached[i][j] = Some(sij);
            }
        }
    }
}

fn tradeoff_pass<F: ExtField>(run: &mut Run<'_, F>) {
    let d = run.f_basis.len();
    for i in 0..d {
        for j in i + 1..d {
            for k in (0..d).filter(|&k| k != i && k != j) {
                if run.done() {
                    return;
                }
                let shifts = run.shifts();
                let sij = run.intersect(&shifts[i], &shifts[j]);
                let x = run.intersect(&sij, &shifts[k]);
                let candidate = run.plus_f_times(&x);
                run.offer(candidate);
            }
        }
    }
}

/// S_i from the input S only; S_{i,i+1} for every i, then for each window
/// (i, i+1, i+2) one more intersection S_{i,i+2} and one guarded update.
/// Always performs (d−1) + (d−2) intersections.
fn crypto_run<F: ExtField>(mut run: Run<'_, F>) -> Expansion<F::Elem> {
    let d = run.f_basis.len();
    let shifts = run.shifts();
    let adjacent: Vec<Subspace<F::Elem>> = (0..d - 1).map(|i| run.intersect(&shifts[i], &shifts[i + 1])).collect();
    for i in 0..d - 2 {
        let skip = run.intersect(&shifts[i], &shifts[i + 2]);
        // the three spaces overlap in general, so this is an ordinary sum
        let union = run.sum(&adjacent[i], &adjacent[i + 1]);
        let union = run.sum(&union, &skip);
        let candidate = run.plus_f_times(&union);
        run.offer(candidate);
    }
    run.report.passes = 1;
    run.report.dims_visited.push(run.s.dim());
    run.finish(ExpansionStatus::Completed)
}

#[derive(Clone, Debug)]
pub struct RsrOutcome<E> {
    /// Recovered support, `None` on failure.
    pub support: Option<Subspace<E>>,
    pub expanded: Subspace<E>,
    pub report: ExpansionReport<E>,
}

/// Rank support recovery: S = ⟨s⟩, fixed-shape expansion, then
/// E = ⋂ f_i⁻¹·S′. Succeeds iff dim E ≤ r and dim S′ = d·dim E, the shape
/// of a product space E·F with dim EF = d·dim E.
pub fn rsr<F: ExtField>(field: &F, f_basis: &[F::Elem], syndrome: &[F::Elem], r: usize) -> Result<RsrOutcome<F::Elem>> {
    let s = Subspace::span(field, syndrome);
    if s.is_zero() {
        return Ok(RsrOutcome { support: Some(Subspace::zero()), expanded: s, report: ExpansionReport::default() });
    }
    let Expansion { space, mut report, .. } = expand_crypto(field, &s, f_basis, r)?;
    let e = recover_support_counted(field, &space, f_basis, &mut report.linalg_ops)?;
    let ok = e.dim() <= r && space.dim() == f_basis.len() * e.dim();
    Ok(RsrOutcome { support: ok.then_some(e), expanded: space, report })
}
