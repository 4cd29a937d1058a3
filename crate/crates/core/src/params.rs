//! Shipped parameter sets for the KEM and the PKE, all over 𝔽_2.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::field::BaseField;
use crate::ring::IdealModulus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Kem,
    Pke,
}

/// Published reference values a set is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableValues {
    pub structural: f64,
    pub generic: f64,
    pub pf_log2: f64,
    pub entropy: f64,
    pub pk_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub id: String,
    pub scheme: Scheme,
    pub q: u32,
    /// Ring degree: the code is [2n, n] and a ring element has n coordinates.
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub r: usize,
    /// Exponents of the unit terms of P, highest first.
    pub modulus: Vec<usize>,
    pub target_security: u32,
    pub target_pf_log2: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableValues>,
}

impl ParamSet {
    pub fn ideal_modulus(&self) -> Result<IdealModulus> {
        let p = IdealModulus::from_exponents(&BaseField::new(self.q)?, &self.modulus)?;
        if p.degree() != self.n {
            return domain(format!("modulus degree {} differs from n = {}", p.degree(), self.n));
        }
        Ok(p)
    }

    /// Public key and ciphertext size: one ring element.
    pub fn pk_bits(&self) -> u64 {
        (self.n * self.m) as u64 * BaseField::new(self.q).map_or(1, |b| b.bits()) as u64
    }
}

#[allow(clippy::too_many_arguments)]
fn set(
    id: &str,
    scheme: Scheme,
    level: u32,
    pf: i32,
    (n, m, d, r): (usize, usize, usize, usize),
    modulus: &[usize],
    (structural, generic, entropy, pk_bits): (f64, f64, f64, u64),
) -> ParamSet {
    ParamSet {
        id: id.into(),
        scheme,
        q: 2,
        n,
        m,
        d,
        r,
        modulus: modulus.to_vec(),
        target_security: level,
        target_pf_log2: pf,
        table: Some(TableValues { structural, generic, pf_log2: pf as f64, entropy, pk_bits }),
    }
}

pub fn shipped() -> Vec<ParamSet> {
    use Scheme::{Kem, Pke};
    vec![
        set("kem-128", Kem, 128, -30, (47, 71, 6, 5), &[47, 5, 0], (130.0, 146.0, 311.0, 3337)),
        set("kem-192", Kem, 192, -32, (53, 89, 7, 6), &[53, 6, 2, 1, 0], (207.0, 221.0, 499.0, 4717)),
        set("kem-256", Kem, 256, -36, (67, 113, 8, 7), &[67, 5, 2, 1, 0], (312.0, 329.0, 743.0, 7571)),
        set("pke64-128", Pke, 128, -64, (83, 71, 7, 5), &[83, 7, 4, 2, 0], (133.0, 144.0, 331.0, 5893)),
        set("pke64-192", Pke, 192, -64, (83, 101, 7, 5), &[83, 7, 4, 2, 0], (209.0, 195.0, 481.0, 8383)),
        set("pke64-256", Pke, 256, -64, (89, 107, 8, 6), &[89, 38, 0], (273.0, 260.0, 607.0, 9523)),
        set("pke80-128", Pke, 128, -80, (101, 79, 7, 5), &[101, 7, 6, 1, 0], (136.0, 157.0, 371.0, 7979)),
        set("pke80-192", Pke, 192, -80, (103, 97, 8, 6), &[103, 9, 0], (229.0, 234.0, 547.0, 9991)),
        set("pke80-256", Pke, 256, -80, (103, 107, 8, 6), &[103, 9, 0], (259.0, 260.0, 607.0, 11021)),
    ]
}

pub fn by_id(id: &str) -> Result<ParamSet> {
    shipped().into_iter().find(|p| p.id == id).map_or_else(|| domain(format!("unknown parameter set {id:?}")), Ok)
}

/// Default set for a scheme and level; the PKE defaults to the 2⁻⁶⁴ family.
pub fn for_level(scheme: Scheme, level: u32) -> Result<ParamSet> {
    let id = match scheme {
        Scheme::Kem => format!("kem-{level}"),
        Scheme::Pke => format!("pke64-{level}"),
    };
    by_id(&id)
}
