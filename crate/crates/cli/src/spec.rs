use abelsurf::curves::Genus2Curve;
use abelsurf::ff::{FieldCtx, Fq, FqElem, Poly};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A curve y² = f(x) over F_{p^n}. Coefficients run from x⁰ upwards. An
/// extension-field coefficient is written c0:c1:… in the power basis of the
/// field generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub p: u64,
    pub n: usize,
    pub modulus: Option<Vec<u64>>,
    pub f: Vec<Vec<i64>>,
}

/// Splits a comma-separated list, reporting the position of the first bad
/// entry.
pub fn parse_list(s: &str, what: &str) -> Result<Vec<Vec<i64>>, CliError> {
    let mut out = Vec::new();
    let mut col = 1;
    for (i, tok) in s.split(',').enumerate() {
        let parts: Result<Vec<i64>, _> = tok.trim().split(':').map(|x| x.trim().parse::<i64>()).collect();
        match parts {
            Ok(v) if !tok.trim().is_empty() => out.push(v),
            _ => {
                return Err(CliError::Parse(format!(
                    "{what} entry {} ({tok:?}) at column {col} is not an integer",
                    i + 1
                )))
            }
        }
        col += tok.len() + 1;
    }
    Ok(out)
}

pub fn parse_ints(s: &str, what: &str) -> Result<Vec<u64>, CliError> {
    parse_list(s, what)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v.as_slice() {
            [x] if *x >= 0 => Ok(*x as u64),
            _ => Err(CliError::Parse(format!("{what} entry {} must be a non-negative integer", i + 1))),
        })
        .collect()
}

impl CurveSpec {
    pub fn parse(p: u64, n: usize, modulus: Option<&str>, f: &str) -> Result<Self, CliError> {
        let modulus = modulus.map(|m| parse_ints(m, "modulus")).transpose()?;
        Ok(CurveSpec { p, n, modulus, f: parse_list(f, "coefficient")? })
    }

    pub fn field(&self) -> Result<Fq, CliError> {
        let k = match &self.modulus {
            Some(m) => {
                if m.len() != self.n + 1 {
                    return Err(CliError::Parse(format!("modulus must have degree n = {}", self.n)));
                }
                FieldCtx::with_modulus(self.p, m)?
            }
            None => FieldCtx::new(self.p, self.n)?,
        };
        Ok(k)
    }

    fn element(k: &Fq, c: &[i64]) -> Result<FqElem, CliError> {
        if c.len() > k.degree() {
            return Err(CliError::Parse(format!("coefficient {c:?} has more than {} components", k.degree())));
        }
        let p = k.p() as i64;
        let mut v: Vec<u64> = c.iter().map(|x| x.rem_euclid(p) as u64).collect();
        v.resize(k.degree(), 0);
        Ok(k.from_coeffs(&v)?)
    }

    pub fn curve(&self) -> Result<Genus2Curve, CliError> {
        let k = self.field()?;
        let c: Result<Vec<FqElem>, CliError> = self.f.iter().map(|c| Self::element(&k, c)).collect();
        Ok(Genus2Curve::new(&k, Poly::from_coeffs(c?))?)
    }

    pub fn f_strings(&self) -> Vec<String> {
        self.f.iter().map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")).collect()
    }
}
