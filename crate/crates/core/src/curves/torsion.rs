//! Bases of J[ℓ^e] and the matrix of Frobenius on them.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::jacobian::{Genus2Curve, Jacobian, MumfordDivisor};
use crate::invariants::FrobPoly;
use crate::linalg::{self, Mat4};
use crate::{Error, Limits, Result};

/// Order of the companion matrix of f_A in GL₄(Z/ℓ^e).
pub fn companion_order(f: &FrobPoly, ell: u64, e: u32) -> BigUint {
    linalg::mult_order(&f.companion(ell.pow(e)), ell, e)
}

/// Smallest root degree of f, which every working field must contain.
fn root_degree(c: &Genus2Curve) -> Result<usize> {
    if c.f.deg() == 5 {
        return Ok(1);
    }
    Ok(c.f.factor(&c.k)?.1.iter().map(|(g, _)| g.deg()).min().unwrap_or(1))
}

/// Degree over F_q of the field carrying both J[ℓ^e] and a Weierstrass
/// point of C.
pub fn torsion_degree(c: &Genus2Curve, f: &FrobPoly, ell: u64, e: u32) -> Result<BigUint> {
    Ok(companion_order(f, ell, e).lcm(&BigUint::from(root_degree(c)?)))
}

#[derive(Clone, Debug)]
pub struct TorsionBasis {
    pub ell: u64,
    pub e: u32,
    /// ℓ^e.
    pub modulus: u64,
    pub jac: Jacobian,
    pub gens: [MumfordDivisor; 4],
    /// Column j holds the coordinates of π(g_j).
    pub frob: Mat4,
    table: HashMap<MumfordDivisor, [u64; 3]>,
}

impl TorsionBasis {
    pub fn new(c: &Genus2Curve, f: &FrobPoly, ell: u64, e: u32, seed: u64, limits: &Limits) -> Result<Self> {
        if ell == c.k.p() {
            return Err(Error::InvalidInput("ℓ must differ from the characteristic".into()));
        }
        if !crate::ff::is_prime(ell) || e == 0 {
            return Err(Error::InvalidInput("ℓ must be prime and e ≥ 1".into()));
        }
        let m = ell
            .checked_pow(e)
            .filter(|m| (*m as u128).pow(3) <= limits.max_enum as u128)
            .ok_or_else(|| Error::Capacity(format!("ℓ^e = {ell}^{e} is too large for exhaustive logarithms")))?;
        let deg = torsion_degree(c, f, ell, e)?;
        let k = deg.to_usize().filter(|&k| k * c.k.degree() <= limits.max_ext_degree).ok_or_else(|| {
            Error::Capacity(format!("{ell}^{e}-torsion is defined over an extension of degree {deg}"))
        })?;
        if c.k.bits() * k as u64 > limits.max_field_bits {
            return Err(Error::Capacity(format!("{ell}^{e}-torsion field has {} bits", c.k.bits() * k as u64)));
        }
        let jac = Jacobian::with_degree(c, k)?;
        let fk = f.base_change(k as u32);
        let nk = fk.group_order();
        // π^k − 1 = ℓ^e·h(π) with h integral, and h(π) maps J(F_{q^k}) onto J[ℓ^e].
        let h = cofactor_poly(f, k as u32, m, &nk)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lower = BigUint::from(m / ell);
        let mut gens: Vec<MumfordDivisor> = Vec::new();
        let mut span: HashSet<MumfordDivisor> = HashSet::from([jac.zero()]);
        let mut tries = 0;
        while gens.len() < 4 {
            tries += 1;
            if tries > 400 {
                return Err(Error::Invariant(format!("could not generate J[{ell}^{e}]")));
            }
            let x = jac.apply_poly(&h, &jac.random_divisor(&mut rng));
            let y = jac.mul(&x, &lower);
            if span.contains(&y) {
                continue;
            }
            if gens.len() == 3 {
                gens.push(x);
                break;
            }
            let mut grown = HashSet::new();
            for s in &span {
                let mut t = s.clone();
                for _ in 0..ell {
                    grown.insert(t.clone());
                    t = jac.add(&t, &y);
                }
            }
            span = grown;
            gens.push(x);
        }
        let gens: [MumfordDivisor; 4] = gens.try_into().unwrap();
        let table = log_table(&jac, &gens[..3], m);
        let mut tb = TorsionBasis { ell, e, modulus: m, jac, gens, frob: [[0; 4]; 4], table };
        for j in 0..4 {
            let img = tb.jac.frobenius(&tb.gens[j]);
            let co =
                tb.coords(&img).ok_or_else(|| Error::Invariant("Frobenius image outside the torsion span".into()))?;
            for i in 0..4 {
                tb.frob[i][j] = co[i];
            }
        }
        let cp = linalg::char_poly(&tb.frob, m);
        let want: Vec<u64> = f.coeffs().iter().map(|c| linalg::reduce_big(c, m)).collect();
        if cp.to_vec() != want {
            return Err(Error::Invariant("Frobenius matrix disagrees with f_A".into()));
        }
        Ok(tb)
    }

    /// Coordinates of x in the basis, if x ∈ J[ℓ^e].
    pub fn coords(&self, x: &MumfordDivisor) -> Option<[u64; 4]> {
        let mut cur = x.clone();
        let neg = self.jac.neg(&self.gens[3]);
        for c4 in 0..self.modulus {
            if let Some(c) = self.table.get(&cur) {
                return Some([c[0], c[1], c[2], c4]);
            }
            cur = self.jac.add(&cur, &neg);
        }
        None
    }

    pub fn combination(&self, c: &[u64; 4]) -> MumfordDivisor {
        let mut acc = self.jac.zero();
        for (g, &ci) in self.gens.iter().zip(c) {
            acc = self.jac.add(&acc, &self.jac.mul_u64(g, ci));
        }
        acc
    }

    /// Degree over F_q of the working field.
    pub fn degree(&self) -> usize {
        self.jac.emb.degree()
    }

    /// Smallest d with π^d trivial on J[ℓ^e], i.e. the degree of the field
    /// of definition of the torsion (a divisor of the working degree).
    pub fn rational_degree(&self) -> usize {
        let k = self.degree();
        let m = self.modulus;
        (1..=k)
            .filter(|d| k % d == 0)
            .find(|&d| linalg::mat_pow(&self.frob, &BigUint::from(d), m) == linalg::eye(m))
            .unwrap_or(k)
    }
}

/// h = ((t^k mod f_A) − 1)/ℓ^e with coefficients reduced mod N_k.
fn cofactor_poly(f: &FrobPoly, k: u32, m: u64, nk: &BigInt) -> Result<Vec<BigInt>> {
    let c = f.lower();
    let mut r = vec![BigInt::from(1), BigInt::zero(), BigInt::zero(), BigInt::zero()];
    let mod_n = |x: &BigInt| x.mod_floor(&(nk * BigInt::from(m)));
    for _ in 0..k {
        // r ← t·r mod f_A, coefficients kept mod ℓ^e·N_k
        let top = r[3].clone();
        let mut next = vec![BigInt::zero(); 4];
        next[0] = mod_n(&(-&top * &c[0]));
        for i in 1..4 {
            next[i] = mod_n(&(&r[i - 1] - &top * &c[i]));
        }
        r = next;
    }
    r[0] -= 1;
    let mb = BigInt::from(m);
    let mut h = Vec::with_capacity(4);
    for x in &r {
        let x = mod_n(x);
        if !(&x % &mb).is_zero() {
            return Err(Error::Invariant("π^k − 1 is not divisible by ℓ^e".into()));
        }
        h.push(x / &mb);
    }
    Ok(h)
}

fn log_table(jac: &Jacobian, g: &[MumfordDivisor], m: u64) -> HashMap<MumfordDivisor, [u64; 3]> {
    let mut table = HashMap::with_capacity((m * m * m) as usize);
    let mut a = jac.zero();
    for c0 in 0..m {
        let mut b = a.clone();
        for c1 in 0..m {
            let mut d = b.clone();
            for c2 in 0..m {
                table.insert(d.clone(), [c0, c1, c2]);
                d = jac.add(&d, &g[2]);
            }
            b = jac.add(&b, &g[1]);
        }
        a = jac.add(&a, &g[0]);
    }
    table
}
