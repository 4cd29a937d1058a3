//! Closed-form estimators: attack costs, decoding-failure probabilities,
//! support entropy and subspace-intersection probabilities. Everything that
//! can underflow is computed in log₂.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::params::ParamSet;
use crate::subspace::gaussian_binomial_log2;

/// Linear-algebra exponent used by the attack estimates.
pub fn default_omega() -> f64 {
    7f64.log2()
}

fn check_omega(omega: f64) -> Result<()> {
    if !(2.0..=3.0).contains(&omega) {
        return domain(format!("ω = {omega} outside [2, 3]"));
    }
    Ok(())
}

/// ω·log₂(nm) + d⌈m/2⌉ − m − n.
pub fn structural_attack_log2(n: usize, m: usize, d: usize, omega: f64) -> f64 {
    omega * ((n * m) as f64).log2() + (d * m.div_ceil(2)) as f64 - m as f64 - n as f64
}

/// ω·log₂(nm) + r⌈m(n+1)/(2n)⌉ − m, for the [2n, n] ideal code.
pub fn generic_attack_log2(n: usize, m: usize, r: usize, omega: f64) -> f64 {
    generic_attack_log2_code(2 * n, n, m, r, omega, 1.0)
}

/// Quantum variant: the combinatorial exponent uses r/2.
pub fn quantum_generic_attack_log2(n: usize, m: usize, r: usize, omega: f64) -> f64 {
    generic_attack_log2_code(2 * n, n, m, r, omega, 0.5)
}

/// ω·log₂((len/2)·m) + scale·r⌈(k+1)m/len⌉ − m for an [len, k] code.
pub fn generic_attack_log2_code(len: usize, k: usize, m: usize, r: usize, omega: f64, scale: f64) -> f64 {
    let half = len / 2;
    omega * ((half * m) as f64).log2() + scale * (r * ((k + 1) * m).div_ceil(len)) as f64 - m as f64
}

/// log₂ Prob(c = l) ≈ −l(n−k−rd+l)·log₂ q.
pub fn prob_c_equals_l_log2(q: u32, n_minus_k: usize, rd: usize, l: usize) -> f64 {
    let l_i = l as f64;
    -l_i * (n_minus_k as f64 - rd as f64 + l_i) * (q as f64).log2()
}

/// log₂ of the number of rows × cols matrices over 𝔽_q of rank t:
/// ∏_{j<t} (q^rows − q^j)(q^cols − q^j)/(q^t − q^j).
pub fn rank_count_log2(q: u32, rows: usize, cols: usize, t: usize) -> f64 {
    if t > rows.min(cols) {
        return f64::NEG_INFINITY;
    }
    let lq = (q as f64).log2();
    // log₂(q^a − q^j) = a·log₂q + log₂(1 − q^{j−a})
    let term =
        |a: usize, j: usize| a as f64 * lq + (-(q as f64).powi(j as i32 - a as i32)).ln_1p() / std::f64::consts::LN_2;
    (0..t).map(|j| term(rows, j) + term(cols, j) - term(t, j)).sum()
}

/// Exact probability that n−k uniform vectors of an rd-dimensional space
/// span a subspace of codimension l.
pub fn prob_codim_exact(q: u32, n_minus_k: usize, rd: usize, l: usize) -> f64 {
    if l > rd {
        return 0.0;
    }
    let total = (n_minus_k * rd) as f64 * (q as f64).log2();
    (rank_count_log2(q, n_minus_k, rd, rd - l) - total).exp2()
}

/// Terms of the decoding-failure bound for syndromes of length n−k.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureBound {
    /// Prob(c = 1) · q^{(2−r)(d−2)}.
    pub codim1_log2: f64,
    /// Prob(c ≥ 2) ≈ q^{−2(n−k−rd+2)}.
    pub codim2_log2: f64,
    pub total_log2: f64,
    /// Same with the 𝔽_2 codim-1 factor q^{(1−r)(d−2)}.
    pub total_q2_log2: f64,
}

fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

pub fn failure_bound_log2(q: u32, n_minus_k: usize, d: usize, r: usize) -> Result<FailureBound> {
    let rd = r * d;
    if rd > n_minus_k {
        return domain(format!("rd = {rd} exceeds the syndrome length {n_minus_k}"));
    }
    let lq = (q as f64).log2();
    let (nk, rd_f, r_f, d_f) = (n_minus_k as f64, rd as f64, r as f64, d as f64);
    let c1 = -(nk - rd_f + 1.0) * lq;
    let codim1_log2 = c1 + (2.0 - r_f) * (d_f - 2.0) * lq;
    let codim2_log2 = -2.0 * (nk - rd_f + 2.0) * lq;
    let q2 = c1 + (1.0 - r_f) * (d_f - 2.0) * lq;
    Ok(FailureBound {
        codim1_log2,
        codim2_log2,
        total_log2: log2_add(codim1_log2, codim2_log2),
        total_q2_log2: log2_add(q2, codim2_log2),
    })
}

/// Basic decoder without expansion: Prob(dim S < rd) ≈ q^{rd−(n−k)}.
pub fn basic_failure_log2(q: u32, n_minus_k: usize, d: usize, r: usize) -> f64 {
    (r as f64 * d as f64 - n_minus_k as f64) * (q as f64).log2()
}

/// f_decode with d = 2 and dim S = n−k: failure ≈ q^{3r−2(n−k)}/(q−1).
pub fn fdecode_d2_failure(q: u32, n_minus_k: usize, r: usize) -> f64 {
    let q_f = q as f64;
    q_f.powf(3.0 * r as f64 - 2.0 * n_minus_k as f64) / (q_f - 1.0)
}

/// f_prob at codimension 1: failure ≤ q^{(2−r)(d−2)}.
pub fn fprob_codim1_failure(q: u32, d: usize, r: usize) -> f64 {
    (q as f64).powf((2.0 - r as f64) * (d as f64 - 2.0))
}

/// The bound for q = 2: q^{(1−r)(d−2)}.
pub fn fprob_codim1_failure_q2(q: u32, d: usize, r: usize) -> f64 {
    (q as f64).powf((1.0 - r as f64) * (d as f64 - 2.0))
}

/// Probability that two random subspaces of 𝔽_q^n of dimensions a and b
/// intersect trivially: ∏_{i<a} (1 − q^{i+b−n}) / (1 − q^{i−n}).
pub fn p_ab_exact(a: usize, b: usize, n: usize, q: u32) -> Result<f64> {
    if a > n || b > n {
        return domain(format!("dimensions ({a}, {b}) exceed n = {n}"));
    }
    if a + b > n {
        return Ok(0.0);
    }
    let q = q as f64;
    let ln: f64 = (0..a)
        .map(|i| {
            let i = i as f64;
            (-q.powf(i + b as f64 - n as f64)).ln_1p() - (-q.powf(i - n as f64)).ln_1p()
        })
        .sum();
    Ok(ln.exp())
}

/// 1 − q^{−n}(q^a − 1)(q^b − 1)/(q − 1).
pub fn p_ab_approx(a: usize, b: usize, n: usize, q: u32) -> Result<f64> {
    if a > n || b > n {
        return domain(format!("dimensions ({a}, {b}) exceed n = {n}"));
    }
    let q = q as f64;
    Ok(1.0 - q.powf(-(n as f64)) * (q.powi(a as i32) - 1.0) * (q.powi(b as i32) - 1.0) / (q - 1.0))
}

/// Lower bound on Prob(F₁ ∩ F₂ ⊂ E) for dim E = r and subspaces F_t of
/// dimension d_t with dim(F_t ∩ E) = r − c_t: P_{a,b}(m − r) with
/// a = d₂ − r + c₂ and b = d₁ − r + c₁.
pub fn intersection_in_support_lower_bound(
    q: u32,
    m: usize,
    r: usize,
    (d1, c1): (usize, usize),
    (d2, c2): (usize, usize),
) -> Result<f64> {
    if r > m || d1 + c1 < r || d2 + c2 < r {
        return domain("inconsistent dimensions");
    }
    p_ab_exact(d2 + c2 - r, d1 + c1 - r, m - r, q)
}

/// Rate at which S_i ∩ S_j escapes E when dim S = rd: q^{−m+2rd−r}/(q−1).
pub fn contamination_rate(q: u32, m: usize, r: usize, d: usize) -> f64 {
    let q_f = q as f64;
    q_f.powf(-(m as f64) + 2.0 * (r * d) as f64 - r as f64) / (q_f - 1.0)
}

/// log₂ of the number of r-dimensional supports in 𝔽_q^m.
pub fn support_entropy(q: u32, m: usize, r: usize) -> f64 {
    gaussian_binomial_log2(m, r, q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub id: String,
    pub omega: f64,
    pub structural_log2: f64,
    pub generic_log2: f64,
    pub quantum_generic_log2: f64,
    pub failure: FailureBound,
    pub entropy_bits: f64,
    pub pk_bits: u64,
    pub ct_bits: u64,
    /// Properties the set must have and does not.
    pub violations: Vec<String>,
    /// Differences from the published table.
    pub warnings: Vec<String>,
}

impl CostReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest accepted gap between a computed cost and its table entry.
pub const TABLE_TOLERANCE_BITS: f64 = 2.0;

pub fn validate_paramset(ps: &ParamSet, omega: f64) -> Result<CostReport> {
    check_omega(omega)?;
    let (q, n, m, d, r) = (ps.q, ps.n, ps.m, ps.d, ps.r);
    let structural = structural_attack_log2(n, m, d, omega);
    let generic = generic_attack_log2(n, m, r, omega);
    let quantum = quantum_generic_attack_log2(n, m, r, omega);
    let entropy = support_entropy(q, m, r);
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let target = ps.target_security as f64;
    if 2 * r * d - r > m {
        violations.push(format!("m = {m} < 2rd − r = {}", 2 * r * d - r));
    }
    let failure = match failure_bound_log2(q, n, d, r) {
        Ok(f) => {
            if f.codim1_log2 > ps.target_pf_log2 as f64 {
                violations
                    .push(format!("codim-1 failure term 2^{:.2} above target 2^{}", f.codim1_log2, ps.target_pf_log2));
            }
            if f.total_log2 > ps.target_pf_log2 as f64 + 0.5 {
                warnings.push(format!(
                    "full failure bound 2^{:.2} (with the codim ≥ 2 term) above target 2^{}",
                    f.total_log2, ps.target_pf_log2
                ));
            }
            f
        }
        Err(e) => {
            violations.push(e.to_string());
            FailureBound { codim1_log2: 0.0, codim2_log2: 0.0, total_log2: 0.0, total_q2_log2: 0.0 }
        }
    };
    for (name, value) in [("structural attack", structural), ("generic attack", generic), ("entropy", entropy)] {
        if value < target {
            violations.push(format!("{name} {value:.2} below security target {target}"));
        }
    }
    if let Some(t) = &ps.table {
        for (name, computed, table) in [
            ("structural attack", structural, t.structural),
            ("generic attack", generic, t.generic),
            ("entropy", entropy, t.entropy),
        ] {
            if (computed - table).abs() > TABLE_TOLERANCE_BITS {
                warnings.push(format!("{name}: computed {computed:.2}, table {table}"));
            }
        }
        if (failure.codim1_log2 - t.pf_log2).abs() > TABLE_TOLERANCE_BITS {
            warnings.push(format!("failure: codim-1 term 2^{:.2}, table 2^{}", failure.codim1_log2, t.pf_log2));
        }
        if ps.pk_bits() != t.pk_bits {
            violations.push(format!("pk size {} bits, table {}", ps.pk_bits(), t.pk_bits));
        }
    }
    Ok(CostReport {
        id: ps.id.clone(),
        omega,
        structural_log2: structural,
        generic_log2: generic,
        quantum_generic_log2: quantum,
        failure,
        entropy_bits: entropy,
        pk_bits: ps.pk_bits(),
        ct_bits: ps.pk_bits(),
        violations,
        warnings,
    })
}
