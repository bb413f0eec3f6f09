//! Prime fields, extension fields over a fixed irreducible modulus, and
//! dense univariate polynomials over them.

use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Largest supported characteristic. Keeps products of two reduced
/// coefficients inside a `u64`.
pub const MAX_CHAR: u64 = 1 << 31;

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i64) as u64)
}

/// Legendre symbol for an odd prime `p`, via quadratic reciprocity.
pub fn legendre(a: u64, p: u64) -> i32 {
    let mut a = a % p;
    let mut n = p;
    let mut s = 1;
    if a == 0 {
        return 0;
    }
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                s = -s;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            s = -s;
        }
        a %= n;
    }
    if n == 1 {
        s
    } else {
        0
    }
}

pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

pub type Coeffs = SmallVec<[u64; 4]>;

/// An element of F_{p^n}: `n` coefficients over F_p in the power basis of
/// the context modulus. Ordering is lexicographic from the constant term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FqElem(pub Coeffs);

impl FqElem {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The F_p value, when the element lies in the prime field.
    pub fn as_prime(&self) -> Option<u64> {
        if self.0[1..].iter().all(|&c| c == 0) {
            Some(self.0[0])
        } else {
            None
        }
    }
}

pub struct FieldCtx {
    p: u64,
    n: usize,
    modulus: Vec<u64>,
    tail: Vec<(usize, u64)>,
    frob: Vec<Coeffs>,
    nonresidue: OnceLock<FqElem>,
}

pub type Fq = Arc<FieldCtx>;

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.n, self.modulus)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

fn check_char(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::InvalidInput("characteristic 2 is not supported".into()));
    }
    if p >= MAX_CHAR {
        return Err(Error::Capacity(format!("characteristic {p} too large")));
    }
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(())
}

impl FieldCtx {
    pub fn prime(p: u64) -> Result<Fq> {
        check_char(p)?;
        Ok(Arc::new(Self::build(p, vec![0, 1])))
    }

    /// F_{p^n} over the lexicographically smallest monic irreducible of
    /// degree `n`, comparing coefficient sequences from x^{n-1} down.
    pub fn new(p: u64, n: usize) -> Result<Fq> {
        check_char(p)?;
        if n == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        if n == 1 {
            return Self::prime(p);
        }
        let fp = Self::prime(p)?;
        let mut digits = vec![0u64; n];
        loop {
            let mut m: Vec<u64> = digits.clone();
            m.push(1);
            if m[0] != 0 && is_irreducible_fp(&fp, &m) {
                return Ok(Arc::new(Self::build(p, m)));
            }
            let mut i = 0;
            loop {
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
                if i == n {
                    return Err(Error::Invariant("no irreducible polynomial found".into()));
                }
            }
        }
    }

    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Fq> {
        check_char(p)?;
        let m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if m.len() < 2 || m[m.len() - 1] != 1 {
            return Err(Error::InvalidInput("modulus must be monic of positive degree".into()));
        }
        if m.len() == 2 {
            return Self::prime(p);
        }
        let fp = Self::prime(p)?;
        if !is_irreducible_fp(&fp, &m) {
            return Err(Error::InvalidInput("modulus is reducible".into()));
        }
        Ok(Arc::new(Self::build(p, m)))
    }

    fn build(p: u64, modulus: Vec<u64>) -> Self {
        let n = modulus.len() - 1;
        let tail = (0..n).filter(|&i| modulus[i] != 0).map(|i| (i, (p - modulus[i]) % p)).collect();
        let mut ctx = FieldCtx { p, n, modulus, tail, frob: Vec::new(), nonresidue: OnceLock::new() };
        if n > 1 {
            let xp = ctx.pow_u64(&ctx.gen(), p);
            let mut acc = ctx.one();
            let mut frob = Vec::with_capacity(n);
            for _ in 0..n {
                frob.push(acc.0.clone());
                acc = ctx.mul(&acc, &xp);
            }
            ctx.frob = frob;
        }
        ctx
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.n as u32)
    }

    /// Field size as a `u128` when it fits.
    pub fn order_u128(&self) -> Option<u128> {
        let mut q: u128 = 1;
        for _ in 0..self.n {
            q = q.checked_mul(self.p as u128)?;
        }
        Some(q)
    }

    pub fn bits(&self) -> u64 {
        self.order().bits()
    }

    pub fn zero(&self) -> FqElem {
        FqElem(smallvec![0; self.n])
    }

    pub fn one(&self) -> FqElem {
        self.from_u64(1)
    }

    pub fn gen(&self) -> FqElem {
        if self.n == 1 {
            return self.zero();
        }
        let mut c: Coeffs = smallvec![0; self.n];
        c[1] = 1;
        FqElem(c)
    }

    pub fn from_u64(&self, a: u64) -> FqElem {
        let mut c: Coeffs = smallvec![0; self.n];
        c[0] = a % self.p;
        FqElem(c)
    }

    pub fn from_i64(&self, a: i64) -> FqElem {
        self.from_u64(a.rem_euclid(self.p as i64) as u64)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FqElem> {
        if coeffs.len() > self.n {
            return Err(Error::InvalidInput("too many coefficients for field element".into()));
        }
        let mut c: Coeffs = smallvec![0; self.n];
        for (i, &x) in coeffs.iter().enumerate() {
            c[i] = x % self.p;
        }
        Ok(FqElem(c))
    }

    /// Element whose base-p digits (constant coefficient first) are `i`.
    pub fn from_index(&self, mut i: u128) -> FqElem {
        let mut c: Coeffs = smallvec![0; self.n];
        for x in c.iter_mut() {
            *x = (i % self.p as u128) as u64;
            i /= self.p as u128;
        }
        FqElem(c)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElem {
        FqElem((0..self.n).map(|_| rng.gen_range(0..self.p)).collect())
    }

    pub fn check(&self, a: &FqElem) -> Result<()> {
        if a.0.len() != self.n || a.0.iter().any(|&c| c >= self.p) {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p;
        FqElem(
            a.0.iter()
                .zip(b.0.iter())
                .map(|(&x, &y)| {
                    let s = x + y;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p;
        FqElem(a.0.iter().zip(b.0.iter()).map(|(&x, &y)| if x >= y { x - y } else { x + p - y }).collect())
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        let p = self.p;
        FqElem(a.0.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect())
    }

    pub fn scale(&self, a: &FqElem, s: u64) -> FqElem {
        let p = self.p;
        let s = s % p;
        FqElem(a.0.iter().map(|&x| x * s % p).collect())
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p;
        let n = self.n;
        if n == 1 {
            return FqElem(smallvec![a.0[0] * b.0[0] % p]);
        }
        let mut t: SmallVec<[u128; 8]> = smallvec![0; 2 * n - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                t[i + j] += (x * y) as u128;
            }
        }
        let mut r: SmallVec<[u64; 8]> = t.iter().map(|&v| (v % p as u128) as u64).collect();
        for k in (n..2 * n - 1).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            for &(i, m) in &self.tail {
                let idx = k - n + i;
                r[idx] = (r[idx] + c * m) % p;
            }
        }
        FqElem(r[..n].iter().copied().collect())
    }

    pub fn sqr(&self, a: &FqElem) -> FqElem {
        self.mul(a, a)
    }

    pub fn pow_u64(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.sqr(&b);
            }
        }
        r
    }

    pub fn pow(&self, a: &FqElem, e: &BigUint) -> FqElem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.sqr(&r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.n == 1 {
            return Ok(FqElem(smallvec![inv_mod(a.0[0], self.p).unwrap()]));
        }
        let p = self.p;
        // extended Euclid over F_p on (modulus, a)
        let trim = |v: &mut Vec<u64>| {
            while v.len() > 1 && *v.last().unwrap() == 0 {
                v.pop();
            }
        };
        let mut r0: Vec<u64> = self.modulus.clone();
        let mut r1: Vec<u64> = a.0.to_vec();
        trim(&mut r1);
        let mut s0: Vec<u64> = vec![0];
        let mut s1: Vec<u64> = vec![1];
        while !(r1.len() == 1 && r1[0] == 0) {
            let mut r = r0.clone();
            let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
            let li = inv_mod(*r1.last().unwrap(), p).unwrap();
            while r.len() >= r1.len() && !(r.len() == 1 && r[0] == 0) {
                let shift = r.len() - r1.len();
                let c = r.last().unwrap() * li % p;
                q[shift] = c;
                for (i, &y) in r1.iter().enumerate() {
                    r[i + shift] = (r[i + shift] + p - c * y % p) % p;
                }
                r.pop();
                if r.is_empty() {
                    r.push(0);
                }
                trim(&mut r);
                if r.len() < r1.len() {
                    break;
                }
            }
            let mut qs = vec![0u64; q.len() + s1.len()];
            for (i, &x) in q.iter().enumerate() {
                for (j, &y) in s1.iter().enumerate() {
                    qs[i + j] = (qs[i + j] + x * y) % p;
                }
            }
            let mut s = vec![0u64; qs.len().max(s0.len())];
            for (i, v) in s.iter_mut().enumerate() {
                let x = s0.get(i).copied().unwrap_or(0);
                let y = qs.get(i).copied().unwrap_or(0);
                *v = (x + p - y) % p;
            }
            trim(&mut s);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let c = inv_mod(r0[0], p).unwrap();
        let mut out: Coeffs = smallvec![0; self.n];
        for (i, &x) in s0.iter().enumerate().take(self.n) {
            out[i] = x * c % p;
        }
        Ok(FqElem(out))
    }

    pub fn div(&self, a: &FqElem, b: &FqElem) -> Result<FqElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// x ↦ x^p.
    pub fn frobenius_p(&self, a: &FqElem) -> FqElem {
        if self.n == 1 {
            return a.clone();
        }
        let p = self.p;
        let mut acc: SmallVec<[u64; 8]> = smallvec![0; self.n];
        for (i, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, &f) in self.frob[i].iter().enumerate() {
                acc[j] = (acc[j] + c * f) % p;
            }
        }
        FqElem(acc.into_iter().collect())
    }

    /// x ↦ x^{p^k}.
    pub fn frobenius(&self, a: &FqElem, k: usize) -> FqElem {
        let mut r = a.clone();
        for _ in 0..k % self.n {
            r = self.frobenius_p(&r);
        }
        r
    }

    /// Norm down to F_p.
    pub fn norm(&self, a: &FqElem) -> u64 {
        let mut acc = a.clone();
        let mut c = a.clone();
        for _ in 1..self.n {
            c = self.frobenius_p(&c);
            acc = self.mul(&acc, &c);
        }
        acc.0[0]
    }

    /// Quadratic character: 0, 1 or -1.
    pub fn chi(&self, a: &FqElem) -> i32 {
        if a.is_zero() {
            return 0;
        }
        legendre(self.norm(a), self.p)
    }

    pub fn is_square(&self, a: &FqElem) -> bool {
        self.chi(a) >= 0
    }

    fn nonresidue(&self) -> &FqElem {
        self.nonresidue.get_or_init(|| {
            let mut i = 2u128;
            loop {
                let z = self.from_index(i);
                if self.chi(&z) == -1 {
                    return z;
                }
                i += 1;
            }
        })
    }

    /// Tonelli–Shanks square root.
    pub fn sqrt(&self, a: &FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Ok(self.zero());
        }
        if self.chi(a) != 1 {
            return Err(Error::NotASquare);
        }
        let qm1 = self.order() - 1u32;
        let s = qm1.trailing_zeros().unwrap_or(0);
        let t = &qm1 >> s;
        if s == 1 {
            let e: BigUint = (&t + 1u32) >> 1;
            return Ok(self.pow(a, &e));
        }
        let z = self.nonresidue();
        let mut m = s;
        let mut c = self.pow(z, &t);
        let mut tt = self.pow(a, &t);
        let e: BigUint = (&t + 1u32) >> 1;
        let mut r = self.pow(a, &e);
        let one = self.one();
        while tt != one {
            let mut i = 0;
            let mut t2 = tt.clone();
            while t2 != one {
                t2 = self.sqr(&t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.sqr(&b);
            }
            m = i;
            c = self.sqr(&b);
            tt = self.mul(&tt, &c);
            r = self.mul(&r, &b);
        }
        Ok(r)
    }

    /// Every element, in index order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        let q = self.order_u128().unwrap_or(u128::MAX);
        (0..q).map(move |i| self.from_index(i))
    }
}

fn is_irreducible_fp(fp: &FieldCtx, m: &[u64]) -> bool {
    let f = Poly::from_coeffs(m.iter().map(|&c| fp.from_u64(c)).collect());
    let n = m.len() - 1;
    let x = Poly::x(fp);
    let mut h = x.clone();
    let p = BigUint::from(fp.p);
    for _ in 0..n / 2 {
        h = h.powmod(&p, &f, fp).unwrap();
        let g = h.sub(&x, fp).gcd(&f, fp);
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

/// Dense polynomial, constant term first, no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    pub c: Vec<FqElem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn from_coeffs(mut c: Vec<FqElem>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_i64s(k: &FieldCtx, c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&x| k.from_i64(x)).collect())
    }

    pub fn constant(a: FqElem) -> Self {
        Self::from_coeffs(vec![a])
    }

    pub fn one(k: &FieldCtx) -> Self {
        Self::constant(k.one())
    }

    pub fn x(k: &FieldCtx) -> Self {
        Poly { c: vec![k.zero(), k.one()] }
    }

    /// x - a
    pub fn linear(k: &FieldCtx, a: &FqElem) -> Self {
        Poly { c: vec![k.neg(a), k.one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].0[0] == 1 && self.c[0].0[1..].iter().all(|&v| v == 0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize, k: &FieldCtx) -> FqElem {
        self.c.get(i).cloned().unwrap_or_else(|| k.zero())
    }

    pub fn lc(&self) -> Option<&FqElem> {
        self.c.last()
    }

    pub fn add(&self, o: &Poly, k: &FieldCtx) -> Poly {
        let n = self.c.len().max(o.c.len());
        let z = k.zero();
        let c = (0..n).map(|i| k.add(self.c.get(i).unwrap_or(&z), o.c.get(i).unwrap_or(&z))).collect();
        Poly::from_coeffs(c)
    }

    pub fn sub(&self, o: &Poly, k: &FieldCtx) -> Poly {
        let n = self.c.len().max(o.c.len());
        let z = k.zero();
        let c = (0..n).map(|i| k.sub(self.c.get(i).unwrap_or(&z), o.c.get(i).unwrap_or(&z))).collect();
        Poly::from_coeffs(c)
    }

    pub fn neg(&self, k: &FieldCtx) -> Poly {
        Poly { c: self.c.iter().map(|x| k.neg(x)).collect() }
    }

    pub fn scale(&self, s: &FqElem, k: &FieldCtx) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|x| k.mul(x, s)).collect())
    }

    pub fn mul(&self, o: &Poly, k: &FieldCtx) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![k.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = k.add(&c[i + j], &k.mul(a, b));
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn sqr(&self, k: &FieldCtx) -> Poly {
        self.mul(self, k)
    }

    /// Multiply by x^s.
    pub fn shift(&self, s: usize, k: &FieldCtx) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![k.zero(); s];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn divrem(&self, d: &Poly, k: &FieldCtx) -> Result<(Poly, Poly)> {
        let dl = d.lc().ok_or(Error::DivisionByZero)?;
        if self.c.len() < d.c.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let li = k.inv(dl)?;
        let mut r = self.c.clone();
        let dn = d.c.len();
        let mut q = vec![k.zero(); r.len() - dn + 1];
        for i in (0..q.len()).rev() {
            let c = k.mul(&r[i + dn - 1], &li);
            if c.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[i + j] = k.sub(&r[i + j], &k.mul(&c, b));
            }
            q[i] = c;
        }
        r.truncate(dn - 1);
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, d: &Poly, k: &FieldCtx) -> Result<Poly> {
        Ok(self.divrem(d, k)?.1)
    }

    /// Quotient, failing unless the division is exact.
    pub fn div_exact(&self, d: &Poly, k: &FieldCtx) -> Result<Poly> {
        let (q, r) = self.divrem(d, k)?;
        if !r.is_zero() {
            return Err(Error::Invariant("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self, k: &FieldCtx) -> Poly {
        match self.lc() {
            None => Poly::zero(),
            Some(l) => self.scale(&k.inv(l).unwrap(), k),
        }
    }

    pub fn is_monic(&self, k: &FieldCtx) -> bool {
        self.lc().is_some_and(|l| *l == k.one())
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &Poly, k: &FieldCtx) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, k).unwrap();
            a = b;
            b = r;
        }
        a.monic(k)
    }

    /// (g, s, t) with g = s·self + t·o monic.
    pub fn xgcd(&self, o: &Poly, k: &FieldCtx) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(k), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one(k));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, k).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1, k), k);
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1, k), k);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lc() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = k.inv(l).unwrap();
                (r0.scale(&li, k), s0.scale(&li, k), t0.scale(&li, k))
            }
        }
    }

    pub fn derivative(&self, k: &FieldCtx) -> Poly {
        Poly::from_coeffs(self.c.iter().enumerate().skip(1).map(|(i, a)| k.scale(a, i as u64)).collect())
    }

    pub fn eval(&self, x: &FqElem, k: &FieldCtx) -> FqElem {
        let mut acc = k.zero();
        for a in self.c.iter().rev() {
            acc = k.add(&k.mul(&acc, x), a);
        }
        acc
    }

    /// self(g)
    pub fn compose(&self, g: &Poly, k: &FieldCtx) -> Poly {
        let mut acc = Poly::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(g, k).add(&Poly::constant(a.clone()), k);
        }
        acc
    }

    pub fn powmod(&self, e: &BigUint, m: &Poly, k: &FieldCtx) -> Result<Poly> {
        let base = self.rem(m, k)?;
        let mut r = Poly::one(k).rem(m, k)?;
        for i in (0..e.bits()).rev() {
            r = r.sqr(k).rem(m, k)?;
            if e.bit(i) {
                r = r.mul(&base, k).rem(m, k)?;
            }
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32, k: &FieldCtx) -> Poly {
        let mut r = Poly::one(k);
        for _ in 0..e {
            r = r.mul(self, k);
        }
        r
    }

    /// Apply x ↦ x^{p^j} to every coefficient.
    pub fn frobenius(&self, j: usize, k: &FieldCtx) -> Poly {
        Poly { c: self.c.iter().map(|a| k.frobenius(a, j)).collect() }
    }

    pub fn is_squarefree(&self, k: &FieldCtx) -> bool {
        if self.is_zero() {
            return false;
        }
        self.gcd(&self.derivative(k), k).degree() == Some(0)
    }

    /// Multiplicative squarefree decomposition of a monic polynomial.
    pub fn squarefree_decomposition(&self, k: &FieldCtx) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic(k);
        let mut c = f.gcd(&f.derivative(k), k);
        let mut w = f.div_exact(&c, k).unwrap();
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c, k);
            let fac = w.div_exact(&y, k).unwrap();
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            c = c.div_exact(&w, k).unwrap();
            i += 1;
        }
        if !c.is_one() {
            let p = k.p() as usize;
            let root = Poly::from_coeffs(c.c.iter().step_by(p).map(|a| k.frobenius(a, k.degree() - 1)).collect());
            for (g, m) in root.squarefree_decomposition(k) {
                out.push((g, m * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn distinct_degree(&self, k: &FieldCtx) -> Vec<(Poly, usize)> {
        let q = k.order();
        let x = Poly::x(k);
        let mut out = Vec::new();
        let mut g = self.clone();
        let mut h = x.clone();
        let mut d = 1;
        while g.deg() >= 2 * d {
            h = h.powmod(&q, &g, k).unwrap();
            let t = h.sub(&x, k).gcd(&g, k);
            if !t.is_one() {
                g = g.div_exact(&t, k).unwrap();
                h = h.rem(&g, k).unwrap();
                out.push((t, d));
            }
            d += 1;
        }
        if g.deg() > 0 {
            let dg = g.deg();
            out.push((g, dg));
        }
        out
    }

    /// Cantor–Zassenhaus splitting of a product of degree-`d` irreducibles.
    fn equal_degree(&self, d: usize, k: &FieldCtx, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        if self.deg() == d {
            return vec![self.clone()];
        }
        let e: BigUint = (k.order().pow(d as u32) - 1u32) >> 1;
        let one = Poly::one(k);
        loop {
            let a = Poly::from_coeffs((0..self.deg()).map(|_| k.random(rng)).collect());
            if a.deg() == 0 {
                continue;
            }
            let b = a.powmod(&e, self, k).unwrap().sub(&one, k);
            let g = b.gcd(self, k);
            if g.deg() > 0 && g.deg() < self.deg() {
                let h = self.div_exact(&g, k).unwrap();
                let mut out = g.equal_degree(d, k, rng);
                out.extend(h.equal_degree(d, k, rng));
                return out;
            }
        }
    }

    /// Leading coefficient and sorted monic irreducible factors with
    /// multiplicities.
    pub fn factor(&self, k: &FieldCtx) -> Result<(FqElem, Vec<(Poly, usize)>)> {
        let lc = self.lc().ok_or(Error::InvalidInput("factoring the zero polynomial".into()))?.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut out = Vec::new();
        for (g, m) in self.squarefree_decomposition(k) {
            for (t, d) in g.distinct_degree(k) {
                for h in t.equal_degree(d, k, &mut rng) {
                    out.push((h, m));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp_canonical(&b.0).then(a.1.cmp(&b.1)));
        Ok((lc, out))
    }

    /// Roots in the field with multiplicities, sorted.
    pub fn roots(&self, k: &FieldCtx) -> Vec<(FqElem, usize)> {
        if self.deg() == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let q = k.order();
        let x = Poly::x(k);
        let mut out = Vec::new();
        for (g, m) in self.squarefree_decomposition(k) {
            let h = x.powmod(&q, &g, k).unwrap().sub(&x, k);
            let lin = h.gcd(&g, k);
            if lin.deg() == 0 {
                continue;
            }
            for r in lin.equal_degree(1, k, &mut rng) {
                out.push((k.neg(&r.c[0]), m));
            }
        }
        out.sort();
        out
    }

    /// Distinct roots only.
    pub fn root_set(&self, k: &FieldCtx) -> Vec<FqElem> {
        self.roots(k).into_iter().map(|(r, _)| r).collect()
    }

    /// Degree first, then coefficients from the top.
    pub fn cmp_canonical(&self, o: &Poly) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| self.c.iter().rev().cmp(o.c.iter().rev()))
    }

    /// Plain coefficient listing for prime-field polynomials.
    pub fn to_u64s(&self) -> Vec<u64> {
        self.c.iter().map(|a| a.0[0]).collect()
    }
}

fn lcm_usize(a: usize, b: usize) -> usize {
    a / a.gcd(&b) * b
}

/// A field embedding src → dst, fixed by the image of the generator of src.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub src: Fq,
    pub dst: Fq,
    powers: Vec<FqElem>,
}

impl Embedding {
    pub fn identity(k: &Fq) -> Self {
        let powers = (0..k.degree())
            .map(|i| {
                let mut c: Coeffs = smallvec![0; k.degree()];
                c[i] = 1;
                FqElem(c)
            })
            .collect();
        Embedding { src: k.clone(), dst: k.clone(), powers }
    }

    /// The embedding sending the generator of `src` to the smallest root of
    /// its modulus in `dst`.
    pub fn new(src: &Fq, dst: &Fq) -> Result<Self> {
        if src.p() != dst.p() || dst.degree() % src.degree() != 0 {
            return Err(Error::ContextMismatch);
        }
        if Arc::ptr_eq(src, dst) || **src == **dst {
            return Ok(Self::identity(src));
        }
        let powers = if src.degree() == 1 {
            vec![dst.one()]
        } else {
            let m = Poly::from_coeffs(src.modulus().iter().map(|&c| dst.from_u64(c)).collect());
            let r = m.root_set(dst).into_iter().next().ok_or(Error::Invariant("modulus has no root".into()))?;
            let mut pw = Vec::with_capacity(src.degree());
            let mut acc = dst.one();
            for _ in 0..src.degree() {
                pw.push(acc.clone());
                acc = dst.mul(&acc, &r);
            }
            pw
        };
        Ok(Embedding { src: src.clone(), dst: dst.clone(), powers })
    }

    /// Relative degree [dst : src].
    pub fn degree(&self) -> usize {
        self.dst.degree() / self.src.degree()
    }

    pub fn is_identity(&self) -> bool {
        self.degree() == 1
    }

    pub fn map(&self, a: &FqElem) -> FqElem {
        let k = &self.dst;
        let p = k.p();
        let mut acc: Coeffs = smallvec![0; k.degree()];
        for (c, pw) in a.0.iter().zip(&self.powers) {
            if *c == 0 {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(pw.0.iter()) {
                *x = (*x + c * y) % p;
            }
        }
        FqElem(acc)
    }

    pub fn map_poly(&self, f: &Poly) -> Poly {
        Poly::from_coeffs(f.c.iter().map(|a| self.map(a)).collect())
    }

    /// Inverse image of an element lying in the image of src.
    pub fn preimage(&self, a: &FqElem) -> Option<FqElem> {
        let k = &self.src;
        let p = k.p();
        let n = k.degree();
        let m = self.dst.degree();
        if n == m {
            return Some(a.clone());
        }
        if n == 1 {
            return a.as_prime().map(|v| k.from_u64(v));
        }
        // Solve Σ x_i powers_i = a over F_p by elimination on the m×(n+1) system.
        let mut rows: Vec<Vec<u64>> = (0..m)
            .map(|j| {
                let mut r: Vec<u64> = self.powers.iter().map(|pw| pw.0[j]).collect();
                r.push(a.0[j]);
                r
            })
            .collect();
        let mut piv = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let Some(sel) = (row..m).find(|&r| rows[r][col] != 0) else { continue };
            rows.swap(row, sel);
            let inv = inv_mod(rows[row][col], p).unwrap();
            for v in rows[row].iter_mut() {
                *v = *v * inv % p;
            }
            for r in 0..m {
                if r != row && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for c in 0..=n {
                        rows[r][c] = (rows[r][c] + p - f * rows[row][c] % p) % p;
                    }
                }
            }
            piv.push(col);
            row += 1;
        }
        if rows[row..].iter().any(|r| r[n] != 0) {
            return None;
        }
        let mut x: Coeffs = smallvec![0; n];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = rows[i][n];
        }
        Some(FqElem(x))
    }

    pub fn preimage_poly(&self, f: &Poly) -> Option<Poly> {
        Some(Poly::from_coeffs(f.c.iter().map(|a| self.preimage(a)).collect::<Option<Vec<_>>>()?))
    }

    /// Compose with an embedding dst → further.
    pub fn then(&self, next: &Embedding) -> Embedding {
        Embedding {
            src: self.src.clone(),
            dst: next.dst.clone(),
            powers: self.powers.iter().map(|a| next.map(a)).collect(),
        }
    }
}

/// Degree-`d` extension of `k` with its embedding.
pub fn extension(k: &Fq, d: usize) -> Result<Embedding> {
    if d == 1 {
        return Ok(Embedding::identity(k));
    }
    let dst = FieldCtx::new(k.p(), k.degree() * d)?;
    Embedding::new(k, &dst)
}

/// Smallest extension over which `f` splits into linear factors.
pub fn splitting_ctx(f: &Poly, k: &Fq) -> Result<Embedding> {
    if f.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let (_, fac) = f.factor(k)?;
    let d = fac.iter().fold(1, |acc, (g, _)| lcm_usize(acc, g.deg()));
    extension(k, d)
}
