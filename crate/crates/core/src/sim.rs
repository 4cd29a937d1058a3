//! Seeded Monte Carlo experiments over grids of (q, m, n, k, d, r).
//!
//! Trial t of a cell uses the generator ChaCha20 seeded with base_seed ⊕ t,
//! so any trial can be replayed alone. Trials run on a rayon pool and only
//! counts are merged, which makes results independent of the thread count.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::crypto::LrpcScheme;
use crate::error::{domain, Error, Result};
use crate::expansion::{expand, rsr, ExpansionConfig, ExpansionFunction};
use crate::field::{poly, with_field, BaseField, ExtField, FieldTask};
use crate::lrpc::{recover_support, BasicDecoder, CodeParams, LrpcCode};
use crate::params::{self, ParamSet, Scheme};
use crate::subspace::{sample_full_support, Subspace};

const PLANT_BUDGET: usize = 10_000;
const MAX_FAILING_SEEDS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub q: u32,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
}

impl Cell {
    pub fn rd(&self) -> usize {
        self.r * self.d
    }

    pub fn n_minus_k(&self) -> usize {
        self.n - self.k
    }

    pub fn validate(&self) -> Result<()> {
        if self.k >= self.n || self.d == 0 || self.r == 0 || self.d > self.m || self.r > self.m {
            return domain(format!("invalid cell {self:?}"));
        }
        BaseField::new(self.q)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Planting {
    /// E, F, e and H sampled independently.
    RandomError,
    /// Resampled until dim EF = rd and dim S = rd − l.
    ForcedCodim(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Basic,
    Fdecode,
    Fprob,
    Crypto,
    KemLoop,
}

/// Which rate a cell reports and checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Failure,
    Success,
    /// Fraction of trials whose planted syndrome has dim S < rd.
    Deficient,
    /// Fraction of trials that ended in the named stage.
    Stage(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tolerance {
    /// expected / factor ≤ observed ≤ expected · factor.
    Ratio { factor: f64 },
    /// observed ≤ expected · factor.
    Upper {
        #[serde(default = "one")]
        factor: f64,
    },
    /// |observed − expected| ≤ delta.
    Absolute { delta: f64 },
}

fn one() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

fn default_metric() -> Metric {
    Metric::Failure
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub algorithm: Algorithm,
    pub planting: Planting,
    pub trials: u64,
    pub base_seed: u64,
    pub grid: Vec<Cell>,
    #[serde(default = "default_metric")]
    pub metric: Metric,
    /// Reference value for the metric; defaults to the analytical prediction.
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<Tolerance>,
    /// Skip cells below the expansion function's minimum m.
    #[serde(default = "default_true")]
    pub check_m: bool,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if spec.trials == 0 {
            return domain("trials must be at least 1");
        }
        if spec.grid.is_empty() {
            return domain("empty grid");
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub name: String,
    pub cell: Cell,
    pub algorithm: Algorithm,
    pub planting: Planting,
    pub trials: u64,
    pub successes: u64,
    /// Failures by stage.
    pub failures: BTreeMap<String, u64>,
    pub metric: Metric,
    pub observed: f64,
    pub wilson: (f64, f64),
    pub predicted: Option<f64>,
    pub expected: Option<f64>,
    pub assertion: Option<Assertion>,
    /// Trials by codimension rd − dim S of the planted syndrome.
    pub codim_hist: BTreeMap<usize, u64>,
    /// Trials meeting the exact-recovery conditions of the basic decoder,
    /// and how many of those did not return the planted error.
    pub conditioned_trials: u64,
    pub conditioned_failures: u64,
    /// Smallest failing trial seeds, for replay.
    pub failing_seeds: Vec<u64>,
    pub skipped: Option<String>,
    pub wall_ms: u128,
}

impl CellResult {
    pub fn failures_total(&self) -> u64 {
        self.failures.values().sum()
    }

    pub fn failure_rate(&self) -> f64 {
        self.failures_total() as f64 / self.trials.max(1) as f64
    }

    fn skipped(spec: &ExperimentSpec, cell: Cell, reason: String) -> Self {
        Self {
            name: spec.name.clone(),
            cell,
            algorithm: spec.algorithm,
            planting: spec.planting,
            trials: 0,
            successes: 0,
            failures: BTreeMap::new(),
            metric: spec.metric.clone(),
            observed: 0.0,
            wilson: (0.0, 1.0),
            predicted: None,
            expected: spec.expected,
            assertion: None,
            codim_hist: BTreeMap::new(),
            conditioned_trials: 0,
            conditioned_failures: 0,
            failing_seeds: Vec::new(),
            skipped: Some(reason),
            wall_ms: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    /// No evaluated assertion failed.
    pub fn all_passed(&self) -> bool {
        self.cells.iter().all(|c| c.assertion.as_ref().is_none_or(|a| a.passed))
    }
}

/// 95% Wilson score interval for k successes out of n.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    // the endpoints are exact at k = 0 and k = n
    let lo = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

pub fn check_tolerance(observed: f64, expected: f64, tol: Tolerance) -> Assertion {
    let (passed, detail) = match tol {
        Tolerance::Ratio { factor } => (
            observed >= expected / factor && observed <= expected * factor,
            format!("observed {observed:.4e} vs expected {expected:.4e} within ×{factor}"),
        ),
        Tolerance::Upper { factor } => {
            (observed <= expected * factor, format!("observed {observed:.4e} ≤ {:.4e}", expected * factor))
        }
        Tolerance::Absolute { delta } => (
            (observed - expected).abs() <= delta,
            format!("observed {observed:.4} vs expected {expected:.4} ± {delta}"),
        ),
    };
    Assertion { passed, detail }
}

/// What was planted, for judging and replaying a trial.
#[derive(Clone, Debug)]
pub struct Truth<E> {
    pub e_space: Subspace<E>,
    pub ef: Subspace<E>,
    pub syndrome_space: Subspace<E>,
    /// Samples drawn before the planting condition held.
    pub attempts: usize,
}

#[derive(Clone, Debug)]
pub struct Instance<F: ExtField> {
    pub code: LrpcCode<F>,
    pub error: Vec<F::Elem>,
    pub syndrome: Vec<F::Elem>,
    pub truth: Truth<F::Elem>,
}

impl<F: ExtField> Instance<F> {
    pub fn codim(&self) -> usize {
        self.code.d() * self.truth.e_space.dim() - self.truth.syndrome_space.dim()
    }
}

/// Random code of the cell's shape, random E of dimension r and an error with
/// support exactly E; under forced-codim(l) everything is redrawn until
/// dim EF = rd and dim S = rd − l.
pub fn plant_instance<F: ExtField, R: Rng + ?Sized>(
    field: &F,
    cell: Cell,
    planting: Planting,
    rng: &mut R,
) -> Result<Instance<F>> {
    cell.validate()?;
    let mut params = CodeParams::new(cell.n, cell.k, cell.d);
    params.allow_underdetermined = true;
    if let Planting::ForcedCodim(l) = planting {
        if l > cell.rd() || cell.rd() - l > cell.n_minus_k() {
            return domain(format!(
                "codimension {l} is unreachable with rd = {} and n−k = {}",
                cell.rd(),
                cell.n_minus_k()
            ));
        }
    }
    for attempt in 1..=PLANT_BUDGET {
        let code = LrpcCode::random(field, params, rng)?;
        let (e_space, _) = Subspace::random(field, cell.r, rng)?;
        let error = sample_full_support(field, &e_space, cell.n, rng)?;
        let syndrome = code.syndrome(field, &error)?;
        let syndrome_space = Subspace::span(field, &syndrome);
        let ef = e_space.product(field, code.support());
        if let Planting::ForcedCodim(l) = planting {
            if ef.dim() != cell.rd() || syndrome_space.dim() != cell.rd() - l {
                continue;
            }
        }
        return Ok(Instance { code, error, syndrome, truth: Truth { e_space, ef, syndrome_space, attempts: attempt } });
    }
    Err(Error::Domain(format!("planting budget of {PLANT_BUDGET} exhausted")))
}

/// Analytical prediction of the failure rate (or, for the basic decoder, of
/// the syndrome-deficiency rate) where one applies.
pub fn predicted_rate(algorithm: Algorithm, planting: Planting, cell: &Cell) -> Option<f64> {
    let (q, nk, d, r) = (cell.q, cell.n_minus_k(), cell.d, cell.r);
    match (algorithm, planting) {
        (Algorithm::Basic, Planting::RandomError) if cell.rd() <= nk => {
            Some(analysis::basic_failure_log2(q, nk, d, r).exp2())
        }
        (Algorithm::Fdecode, _) if d == 2 && 3 * r < 2 * nk => Some(analysis::fdecode_d2_failure(q, nk, r)),
        (Algorithm::Fprob | Algorithm::Crypto, Planting::ForcedCodim(1)) => Some(if q == 2 {
            analysis::fprob_codim1_failure_q2(q, d, r)
        } else {
            analysis::fprob_codim1_failure(q, d, r)
        }),
        (Algorithm::Crypto | Algorithm::KemLoop, Planting::RandomError) => {
            analysis::failure_bound_log2(q, nk, d, r).ok().map(|b| b.total_log2.exp2())
        }
        _ => None,
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    trials: u64,
    successes: u64,
    failures: BTreeMap<&'static str, u64>,
    codim_hist: BTreeMap<usize, u64>,
    conditioned_trials: u64,
    conditioned_failures: u64,
    failing_seeds: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.successes += other.successes;
        for (k, v) in other.failures {
            *self.failures.entry(k).or_default() += v;
        }
        for (k, v) in other.codim_hist {
            *self.codim_hist.entry(k).or_default() += v;
        }
        self.conditioned_trials += other.conditioned_trials;
        self.conditioned_failures += other.conditioned_failures;
        self.failing_seeds.extend(other.failing_seeds);
        self.failing_seeds.sort_unstable();
        self.failing_seeds.truncate(MAX_FAILING_SEEDS);
        self
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    /// "success" or the failure stage.
    pub stage: &'static str,
    pub codim: Option<usize>,
    /// Whether the exact-recovery conditions held, and if so whether the
    /// planted error came back.
    pub conditioned: Option<bool>,
}

impl TrialOutcome {
    pub fn success(&self) -> bool {
        self.stage == "success"
    }
}

fn expansion_config(algorithm: Algorithm, check_m: bool) -> Option<ExpansionConfig> {
    let function = match algorithm {
        Algorithm::Fdecode => ExpansionFunction::Fdecode,
        Algorithm::Fprob => ExpansionFunction::Fprob,
        Algorithm::Crypto => ExpansionFunction::Crypto,
        Algorithm::Basic | Algorithm::KemLoop => return None,
    };
    let mut config = ExpansionConfig::new(function);
    config.check_m = check_m;
    Some(config)
}

/// Runs trial `seed` of a cell; `Err` means the cell cannot be planted.
pub fn run_trial<F: ExtField>(
    field: &F,
    algorithm: Algorithm,
    planting: Planting,
    cell: Cell,
    check_m: bool,
    seed: u64,
    kem: Option<&LrpcScheme<F>>,
) -> Result<TrialOutcome> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    if algorithm == Algorithm::KemLoop {
        let scheme = kem.ok_or_else(|| Error::Domain("kem-loop needs a scheme".into()))?;
        let kp = scheme.keygen(&mut rng);
        let t = scheme.encap_transcript(&kp.pk, &mut rng)?;
        let stage = match scheme.decap(&kp.sk, &t.ct)? {
            None => "decap-failure",
            Some(k) if k != t.key => "key-mismatch",
            Some(_) => "success",
        };
        return Ok(TrialOutcome { stage, codim: None, conditioned: None });
    }
    let inst = plant_instance(field, cell, planting, &mut rng)?;
    let codim = Some(inst.codim());
    let truth = &inst.truth;
    let f_basis = inst.code.f_basis();
    let outcome = match algorithm {
        Algorithm::Basic => {
            let dec = BasicDecoder::new(field, &inst.code, cell.r);
            let out = dec.decode(field, &inst.error)?;
            let stage = match (out.status, out.error.as_ref()) {
                (crate::lrpc::DecodeStatus::Success, Some(e)) if *e == inst.error => "success",
                (crate::lrpc::DecodeStatus::Success, _) => "wrong-error",
                (crate::lrpc::DecodeStatus::SyndromeDeficient, _) => "syndrome-deficient",
                (crate::lrpc::DecodeStatus::IntersectionTooBig, _) => "intersection-too-big",
                (crate::lrpc::DecodeStatus::SystemInconsistent, _) => "system-inconsistent",
            };
            let rd = cell.rd();
            let exact = truth.ef.dim() == rd
                && truth.syndrome_space.dim() == rd
                && recover_support(field, &truth.syndrome_space, f_basis)?.dim() == cell.r;
            TrialOutcome { stage, codim, conditioned: exact.then_some(stage == "success") }
        }
        Algorithm::Fdecode | Algorithm::Fprob => {
            let config = expansion_config(algorithm, check_m).expect("expansion algorithm");
            let x = expand(field, &truth.syndrome_space, f_basis, cell.r, config)?;
            let stage = if !x.reached() {
                "stalled"
            } else if x.space != truth.ef {
                "wrong-space"
            } else if recover_support(field, &x.space, f_basis)? != truth.e_space {
                "wrong-support"
            } else {
                "success"
            };
            TrialOutcome { stage, codim, conditioned: None }
        }
        Algorithm::Crypto => {
            let out = rsr(field, f_basis, &inst.syndrome, cell.r)?;
            let stage = match out.support {
                None => "rsr-failure",
                Some(e) if e != truth.e_space => "wrong-support",
                Some(_) => "success",
            };
            TrialOutcome { stage, codim, conditioned: None }
        }
        Algorithm::KemLoop => unreachable!("handled above"),
    };
    Ok(outcome)
}

/// Parameter set for a kem-loop cell: a shipped set with the same shape if
/// there is one, else the least irreducible modulus of degree k.
pub fn kem_params_for_cell(cell: &Cell) -> Result<ParamSet> {
    if cell.n != 2 * cell.k {
        return domain("kem-loop cells need n = 2k");
    }
    if let Some(p) =
        params::shipped().into_iter().find(|p| (p.q, p.n, p.m, p.d, p.r) == (cell.q, cell.k, cell.m, cell.d, cell.r))
    {
        return Ok(p);
    }
    let base = BaseField::new(cell.q)?;
    let coeffs = poly::least_irreducible(&base, cell.k);
    if coeffs.iter().any(|&c| c > 1) {
        return domain("no irreducible modulus with 0/1 coefficients found");
    }
    let modulus: Vec<usize> = (0..coeffs.len()).rev().filter(|&e| coeffs[e] != 0).collect();
    Ok(ParamSet {
        id: format!("sim-q{}-n{}-m{}-d{}-r{}", cell.q, cell.k, cell.m, cell.d, cell.r),
        scheme: Scheme::Kem,
        q: cell.q,
        n: cell.k,
        m: cell.m,
        d: cell.d,
        r: cell.r,
        modulus,
        target_security: 0,
        target_pf_log2: 0,
        table: None,
    })
}

struct CellTask<'a> {
    spec: &'a ExperimentSpec,
    cell: Cell,
}

impl FieldTask for CellTask<'_> {
    type Output = Result<Tally>;

    fn run<F: ExtField>(self, field: &F) -> Result<Tally> {
        let spec = self.spec;
        let cell = self.cell;
        if let Some(config) = expansion_config(spec.algorithm, spec.check_m) {
            config.validate(cell.m, cell.r, cell.d)?;
        }
        if spec.algorithm == Algorithm::Basic {
            CodeParams::new(cell.n, cell.k, cell.d).validate(cell.m)?;
        }
        let scheme = if spec.algorithm == Algorithm::KemLoop {
            if spec.planting != Planting::RandomError {
                return domain("kem-loop takes no planting condition");
            }
            Some(LrpcScheme::new(field.clone(), kem_params_for_cell(&cell)?)?)
        } else {
            None
        };
        // a first trial surfaces planting errors before the parallel run
        run_trial(field, spec.algorithm, spec.planting, cell, spec.check_m, spec.base_seed, scheme.as_ref())?;
        let tally = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let seed = spec.base_seed ^ t;
                let mut tally = Tally { trials: 1, ..Default::default() };
                match run_trial(field, spec.algorithm, spec.planting, cell, spec.check_m, seed, scheme.as_ref()) {
                    Ok(o) => {
                        if o.success() {
                            tally.successes = 1;
                        } else {
                            tally.failures.insert(o.stage, 1);
                            tally.failing_seeds.push(seed);
                        }
                        if let Some(c) = o.codim {
                            tally.codim_hist.insert(c, 1);
                        }
                        if let Some(ok) = o.conditioned {
                            tally.conditioned_trials = 1;
                            tally.conditioned_failures = u64::from(!ok);
                        }
                    }
                    Err(_) => {
                        tally.failures.insert("planting-error", 1);
                        tally.failing_seeds.push(seed);
                    }
                }
                tally
            })
            .reduce(Tally::default, Tally::merge);
        Ok(tally)
    }
}

pub fn run_cell(spec: &ExperimentSpec, cell: Cell) -> CellResult {
    let start = Instant::now();
    let tally = cell.validate().and_then(|()| with_field(cell.q, cell.m, CellTask { spec, cell })).and_then(|r| r);
    let tally = match tally {
        Ok(t) => t,
        Err(e) => return CellResult::skipped(spec, cell, e.to_string()),
    };
    let count = match &spec.metric {
        Metric::Failure => tally.trials - tally.successes,
        Metric::Success => tally.successes,
        Metric::Deficient => tally.codim_hist.range(1..).map(|(_, v)| v).sum(),
        Metric::Stage(s) => tally.failures.get(s.as_str()).copied().unwrap_or(0),
    };
    let observed = count as f64 / tally.trials as f64;
    let predicted = predicted_rate(spec.algorithm, spec.planting, &cell);
    let expected = spec.expected.or(predicted);
    let assertion = match (expected, spec.tolerance) {
        (Some(e), Some(t)) => Some(check_tolerance(observed, e, t)),
        _ => None,
    };
    CellResult {
        name: spec.name.clone(),
        cell,
        algorithm: spec.algorithm,
        planting: spec.planting,
        trials: tally.trials,
        successes: tally.successes,
        failures: tally.failures.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        metric: spec.metric.clone(),
        observed,
        wilson: wilson_interval(count, tally.trials),
        predicted,
        expected,
        assertion,
        codim_hist: tally.codim_hist,
        conditioned_trials: tally.conditioned_trials,
        conditioned_failures: tally.conditioned_failures,
        failing_seeds: tally.failing_seeds,
        skipped: None,
        wall_ms: start.elapsed().as_millis(),
    }
}

/// Runs every cell of the grid on a pool of `threads` workers (0: rayon's
/// default).
pub fn run_experiment(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentResult> {
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Domain(e.to_string()))?;
    let cells = pool.install(|| spec.grid.iter().map(|&cell| run_cell(spec, cell)).collect());
    Ok(ExperimentResult { name: spec.name.clone(), cells })
}

/// Writes `results.jsonl` (one row per cell) and `summary.csv` into `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Format(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut jsonl = fs::File::create(dir.join("results.jsonl")).map_err(io)?;
    for c in &result.cells {
        let line = serde_json::to_string(c).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(jsonl, "{line}").map_err(io)?;
    }
    let mut csv = fs::File::create(dir.join("summary.csv")).map_err(io)?;
    writeln!(
        csv,
        "name,algorithm,planting,q,m,n,k,d,r,trials,successes,failures,observed,wilson_lo,wilson_hi,predicted,expected,passed,skipped"
    )
    .map_err(io)?;
    for c in &result.cells {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.6e}"));
        let planting = match c.planting {
            Planting::RandomError => "random-error".to_string(),
            Planting::ForcedCodim(l) => format!("forced-codim({l})"),
        };
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.6e},{:.6e},{:.6e},{},{},{},{}",
            c.name,
            serde_json::to_value(c.algorithm).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
            planting,
            c.cell.q,
            c.cell.m,
            c.cell.n,
            c.cell.k,
            c.cell.d,
            c.cell.r,
            c.trials,
            c.successes,
            c.failures_total(),
            c.observed,
            c.wilson.0,
            c.wilson.1,
            opt(c.predicted),
            opt(c.expected),
            c.assertion.as_ref().map_or(String::new(), |a| a.passed.to_string()),
            c.skipped.as_deref().unwrap_or("").replace(',', ";"),
        )
        .map_err(io)?;
    }
    Ok(())
}
