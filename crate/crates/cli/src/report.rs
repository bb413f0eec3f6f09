//! JSON report types. Every integer is written as a decimal string.

use abelsurf::curves::EllipticCurve;
use abelsurf::ff::{FqElem, Poly};
use abelsurf::orders::OrderLattice;
use serde::{Deserialize, Serialize};

pub fn elem(e: &FqElem) -> String {
    let mut c: Vec<u64> = e.0.to_vec();
    while c.len() > 1 && c[c.len() - 1] == 0 {
        c.pop();
    }
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")
}

pub fn poly(p: &Poly) -> Vec<String> {
    p.c.iter().map(elem).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveJson {
    pub p: String,
    pub n: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<Vec<String>>,
    pub f: Vec<String>,
}

/// y² = x³ + a2·x² + a4·x + a6 over an extension of the given degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticJson {
    pub field_degree: String,
    pub a2: String,
    pub a4: String,
    pub a6: String,
    pub j: String,
}

impl EllipticJson {
    pub fn new(e: &EllipticCurve, base_degree: usize) -> Self {
        EllipticJson {
            field_degree: (e.k.degree() / base_degree).to_string(),
            a2: elem(&e.a2),
            a4: elem(&e.a4),
            a6: elem(&e.a6),
            j: elem(&e.j_invariant()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutJson {
    pub order: String,
    #[serde(rename = "type")]
    pub kind: String,
}

/// An HNF basis in the power basis of π, divided by `den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub den: String,
    pub rows: Vec<Vec<String>>,
    pub index_in_ok: String,
}

impl LatticeJson {
    pub fn new(o: &OrderLattice, index_in_ok: &num_bigint::BigInt) -> Self {
        LatticeJson {
            den: o.den.to_string(),
            rows: o.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            index_in_ok: index_in_ok.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderTestJson {
    pub ell: String,
    pub index_in_ok: String,
    /// "passed", "failed" or "undetermined".
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoJson {
    /// [O_K : Z[π, π̄]].
    pub nu: String,
    /// "exact" or "bounds".
    pub status: String,
    pub lower: LatticeJson,
    pub upper: LatticeJson,
    pub undetermined: Vec<String>,
    pub certificate: Vec<OrderTestJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    /// Index of the (2,2)-kernel among the 15 pairings of the branch points.
    pub kernel: String,
    pub e1: EllipticJson,
    pub e2: EllipticJson,
    /// "verified", "failed" or "capacity: …" for f_A^{(k)} = f_E1·f_E2.
    pub charpoly_check: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcoverJson {
    pub branch: String,
    pub degree: String,
    pub f1: Vec<String>,
    pub f2: Vec<String>,
    pub g1: Vec<String>,
    pub g2: Vec<String>,
    pub a: String,
    pub b: String,
    pub residuals_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IezziJson {
    pub ordering: Vec<String>,
    pub e_plus: EllipticJson,
    pub e_minus: EllipticJson,
    pub charpoly_check: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct V4Json {
    pub t: String,
    pub s: String,
    pub e_ts: EllipticJson,
    pub e_st: EllipticJson,
    pub kernel_annihilated: bool,
    pub charpoly_check: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitJson {
    pub factors: Vec<FactorJson>,
    /// "found", "not found up to d = …" or "capacity: …".
    pub subcover_status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subcover: Option<SubcoverJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iezzi_status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iezzi: Option<IezziJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v4: Option<V4Json>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub curve: CurveJson,
    pub seed: String,
    /// f_A coefficients from t⁰ to t⁴.
    pub charpoly: Vec<String>,
    pub a1: String,
    pub a2: String,
    pub q: String,
    pub big_delta: String,
    pub small_delta: String,
    pub p_rank: String,
    pub a_number: String,
    pub simple_over_base: bool,
    pub simple_over_closure: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub split_degree: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table1_row: Option<String>,
    pub manual_review: bool,
    pub automorphisms: AutJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub endomorphisms: Option<EndoJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub split: Option<SplitJson>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Capacity limits left part of the answer open.
    pub fn is_undetermined(&self) -> bool {
        !self.warnings.is_empty() || self.endomorphisms.as_ref().is_some_and(|e| !e.undetermined.is_empty())
    }
}
