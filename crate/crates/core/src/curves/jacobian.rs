use num_bigint::{BigInt, BigUint, Sign};
use rand::Rng;

use super::count::char_sum;
use crate::ff::{extension, Embedding, Fq, FqElem, Poly};
use crate::{Error, Limits, Result};

/// y² = f(x) with f squarefree of degree 5 or 6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Genus2Curve {
    pub k: Fq,
    pub f: Poly,
}

impl Genus2Curve {
    pub fn new(k: &Fq, f: Poly) -> Result<Self> {
        match f.degree() {
            Some(5) | Some(6) => {}
            _ => return Err(Error::InvalidInput("f must have degree 5 or 6".into())),
        }
        for a in &f.c {
            k.check(a)?;
        }
        if !f.is_squarefree(k) {
            return Err(Error::InvalidInput("f is not squarefree".into()));
        }
        Ok(Genus2Curve { k: k.clone(), f })
    }

    pub fn from_i64s(k: &Fq, c: &[i64]) -> Result<Self> {
        Self::new(k, Poly::from_i64s(k, c))
    }

    pub fn q(&self) -> u128 {
        self.k.order_u128().unwrap()
    }

    pub fn base_change(&self, e: &Embedding) -> Genus2Curve {
        Genus2Curve { k: e.dst.clone(), f: e.map_poly(&self.f) }
    }

    /// #C(F_{q^d}), points at infinity included.
    pub fn count(&self, d: usize, limits: &Limits) -> Result<u128> {
        let e = extension(&self.k, d)?;
        let f = e.map_poly(&self.f);
        let s = char_sum(&f, &e.dst, limits)?;
        let q = e.dst.order_u128().unwrap() as i128;
        let inf = if self.f.deg() == 5 { 1 } else { 1 + e.dst.chi(f.lc().unwrap()) as i128 };
        Ok((q + s as i128 + inf) as u128)
    }
}

/// Reduced divisor class (u, v) on the imaginary model w² = F(z): u monic,
/// deg v < deg u ≤ 2, u | v² − F. The neutral element is (1, 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MumfordDivisor {
    pub u: Poly,
    pub v: Poly,
}

impl MumfordDivisor {
    pub fn is_zero(&self) -> bool {
        self.u.deg() == 0
    }
}

/// The Jacobian of a genus-2 curve over a working extension L ⊇ F_q,
/// realised on a quintic model. For a sextic f the Weierstrass point over a
/// root a ∈ L is sent to infinity by z = 1/(x − a), w = y·z³.
#[derive(Clone, Debug)]
pub struct Jacobian {
    pub curve: Genus2Curve,
    pub emb: Embedding,
    pub model: Poly,
    root: Option<FqElem>,
    shift: Option<(FqElem, MumfordDivisor)>,
}

impl Jacobian {
    pub fn new(curve: &Genus2Curve, emb: &Embedding) -> Result<Self> {
        if *emb.src != *curve.k {
            return Err(Error::ContextMismatch);
        }
        let l = &emb.dst;
        let f = emb.map_poly(&curve.f);
        if f.deg() == 5 {
            return Ok(Jacobian { curve: curve.clone(), emb: emb.clone(), model: f, root: None, shift: None });
        }
        let roots = f.root_set(l);
        if roots.is_empty() {
            return Err(Error::Unsupported("sextic has no root in the working field".into()));
        }
        let n = curve.k.degree();
        let a = roots.iter().find(|r| l.frobenius(r, n) == **r).unwrap_or(&roots[0]).clone();
        // F(z) = Σ f_i (a z + 1)^i z^{6−i}
        let az1 = Poly::from_coeffs(vec![l.one(), a.clone()]);
        let mut model = Poly::zero();
        let mut pw = Poly::one(l);
        for (i, fi) in f.c.iter().enumerate() {
            let term = pw.shift(6 - i, l).scale(fi, l);
            model = model.add(&term, l);
            pw = pw.mul(&az1, l);
        }
        if model.deg() != 5 {
            return Err(Error::Invariant("transformed model is not quintic".into()));
        }
        let sa = l.frobenius(&a, n);
        let shift = if sa == a {
            None
        } else {
            let c = l.sub(&sa, &a);
            let t = MumfordDivisor { u: Poly::linear(l, &l.inv(&c)?), v: Poly::zero() };
            Some((c, t))
        };
        Ok(Jacobian { curve: curve.clone(), emb: emb.clone(), model, root: Some(a), shift })
    }

    /// Working over F_q itself (requires a root of f in F_q for sextics).
    pub fn over_base(curve: &Genus2Curve) -> Result<Self> {
        Self::new(curve, &Embedding::identity(&curve.k))
    }

    /// The smallest extension of degree a multiple of `d` where f has a root.
    pub fn with_degree(curve: &Genus2Curve, d: usize) -> Result<Self> {
        let r = if curve.f.deg() == 5 {
            1
        } else {
            curve.f.factor(&curve.k)?.1.iter().map(|(g, _)| g.deg()).min().unwrap_or(1)
        };
        let e = extension(&curve.k, num_integer::lcm(d, r))?;
        Self::new(curve, &e)
    }

    pub fn field(&self) -> &Fq {
        &self.emb.dst
    }

    pub fn root(&self) -> Option<&FqElem> {
        self.root.as_ref()
    }

    pub fn zero(&self) -> MumfordDivisor {
        MumfordDivisor { u: Poly::one(self.field()), v: Poly::zero() }
    }

    pub fn is_valid(&self, d: &MumfordDivisor) -> bool {
        let l = self.field();
        if !d.u.is_monic(l) || d.u.deg() > 2 || (!d.v.is_zero() && d.v.deg() >= d.u.deg()) {
            return false;
        }
        self.model.sub(&d.v.sqr(l), l).rem(&d.u, l).unwrap().is_zero()
    }

    /// Model point (z, w) as the class of P − ∞.
    pub fn point(&self, z: &FqElem, w: &FqElem) -> Result<MumfordDivisor> {
        let l = self.field();
        if l.sqr(w) != self.model.eval(z, l) {
            return Err(Error::InvalidInput("point not on the model".into()));
        }
        Ok(MumfordDivisor { u: Poly::linear(l, z), v: Poly::constant(w.clone()) })
    }

    /// Affine point (x, y) of the original curve, as a model point.
    pub fn curve_point(&self, x: &FqElem, y: &FqElem) -> Result<MumfordDivisor> {
        let l = self.field();
        match &self.root {
            None => self.point(x, y),
            Some(a) => {
                let z = l.inv(&l.sub(x, a))?;
                let w = l.mul(y, &l.mul(&l.sqr(&z), &z));
                self.point(&z, &w)
            }
        }
    }

    /// Degree-2 Mumford divisor (u(x), v(x)) of the original sextic model,
    /// transported to the working model. Requires u(a) ≠ 0.
    pub fn from_curve_divisor(&self, u: &Poly, v: &Poly) -> Result<MumfordDivisor> {
        let l = self.field();
        let Some(a) = &self.root else {
            return Ok(self.reduce(u.monic(l), v.clone()));
        };
        if u.deg() != 2 {
            return Err(Error::InvalidInput("expected a degree-2 divisor".into()));
        }
        // u'(z) = z² u(a + 1/z), v'(z) = z³ v(a + 1/z)
        let mut un = Poly::zero();
        for (i, c) in u.c.iter().enumerate() {
            let t = homog(l, a, i, 2).scale(c, l);
            un = un.add(&t, l);
        }
        if un.deg() != 2 {
            return Err(Error::InvalidInput("divisor meets the distinguished Weierstrass point".into()));
        }
        let mut vn = Poly::zero();
        for (i, c) in v.c.iter().enumerate() {
            vn = vn.add(&homog(l, a, i, 3).scale(c, l), l);
        }
        let un = un.monic(l);
        let vn = vn.rem(&un, l)?;
        let d = MumfordDivisor { u: un, v: vn };
        if !self.is_valid(&d) {
            return Err(Error::InvalidInput("not a Mumford divisor of the curve".into()));
        }
        Ok(d)
    }

    pub fn neg(&self, d: &MumfordDivisor) -> MumfordDivisor {
        MumfordDivisor { u: d.u.clone(), v: d.v.neg(self.field()) }
    }

    fn reduce(&self, mut u: Poly, mut v: Poly) -> MumfordDivisor {
        let l = self.field();
        v = v.rem(&u, l).unwrap();
        while u.deg() > 2 {
            let un = self.model.sub(&v.sqr(l), l).div_exact(&u, l).unwrap();
            u = un.monic(l);
            v = v.neg(l).rem(&u, l).unwrap();
        }
        let u = u.monic(l);
        let v = v.rem(&u, l).unwrap();
        MumfordDivisor { u, v }
    }

    /// Cantor composition followed by reduction.
    pub fn add(&self, d1: &MumfordDivisor, d2: &MumfordDivisor) -> MumfordDivisor {
        let l = self.field();
        if d1.is_zero() {
            return d2.clone();
        }
        if d2.is_zero() {
            return d1.clone();
        }
        let (d0, e1, e2) = d1.u.xgcd(&d2.u, l);
        let vs = d1.v.add(&d2.v, l);
        let (d, c1, c2) = d0.xgcd(&vs, l);
        let s1 = c1.mul(&e1, l);
        let s2 = c1.mul(&e2, l);
        let s3 = c2;
        let dd = d.sqr(l);
        let u = d1.u.mul(&d2.u, l).div_exact(&dd, l).unwrap();
        let num = s1
            .mul(&d1.u, l)
            .mul(&d2.v, l)
            .add(&s2.mul(&d2.u, l).mul(&d1.v, l), l)
            .add(&s3.mul(&d1.v.mul(&d2.v, l).add(&self.model, l), l), l);
        let v = num.div_exact(&d, l).unwrap();
        self.reduce(u, v)
    }

    pub fn sub(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> MumfordDivisor {
        self.add(a, &self.neg(b))
    }

    pub fn double(&self, d: &MumfordDivisor) -> MumfordDivisor {
        self.add(d, d)
    }

    pub fn mul(&self, d: &MumfordDivisor, n: &BigUint) -> MumfordDivisor {
        let mut r = self.zero();
        for i in (0..n.bits()).rev() {
            r = self.double(&r);
            if n.bit(i) {
                r = self.add(&r, d);
            }
        }
        r
    }

    pub fn mul_u64(&self, d: &MumfordDivisor, n: u64) -> MumfordDivisor {
        self.mul(d, &BigUint::from(n))
    }

    pub fn mul_signed(&self, d: &MumfordDivisor, n: &BigInt) -> MumfordDivisor {
        let r = self.mul(d, n.magnitude());
        if n.sign() == Sign::Minus {
            self.neg(&r)
        } else {
            r
        }
    }

    /// The q-power Frobenius of the original curve acting on the class.
    pub fn frobenius(&self, d: &MumfordDivisor) -> MumfordDivisor {
        let l = self.field();
        let n = self.curve.k.degree();
        let u = d.u.frobenius(n, l);
        let v = d.v.frobenius(n, l);
        let Some((c, t)) = &self.shift else {
            return MumfordDivisor { u, v };
        };
        // Move from the model at σ(a) back to the model at a:
        // z ↦ z/(1 − c z), w ↦ w·(1 − c z)^3.
        let du = u.deg();
        let mut un = Poly::zero();
        for (i, ci) in u.c.iter().enumerate() {
            un = un.add(&moebius_term(l, c, i, du).scale(ci, l), l);
        }
        let mut vn = Poly::zero();
        for (i, ci) in v.c.iter().enumerate() {
            vn = vn.add(&moebius_term(l, c, i, 3).scale(ci, l), l);
        }
        let un = un.monic(l);
        let vn = vn.rem(&un, l).unwrap();
        let moved = MumfordDivisor { u: un, v: vn };
        if du % 2 == 1 {
            self.add(&moved, t)
        } else {
            moved
        }
    }

    pub fn frobenius_pow(&self, d: &MumfordDivisor, j: usize) -> MumfordDivisor {
        let mut r = d.clone();
        for _ in 0..j {
            r = self.frobenius(&r);
        }
        r
    }

    /// Evaluate Σ c_i π^i on a class.
    pub fn apply_poly(&self, coeffs: &[BigInt], d: &MumfordDivisor) -> MumfordDivisor {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.frobenius(&acc);
            acc = self.add(&acc, &self.mul_signed(d, c));
        }
        acc
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> MumfordDivisor {
        let l = self.field();
        loop {
            let z = l.random(rng);
            if let Ok(w) = l.sqrt(&self.model.eval(&z, l)) {
                let w = if rng.gen::<bool>() { l.neg(&w) } else { w };
                return MumfordDivisor { u: Poly::linear(l, &z), v: Poly::constant(w) };
            }
        }
    }

    pub fn random_divisor<R: Rng + ?Sized>(&self, rng: &mut R) -> MumfordDivisor {
        let a = self.random_point(rng);
        let b = self.random_point(rng);
        self.add(&a, &b)
    }

    /// Trace of a class down to F_q: Σ_{i < [L:F_q]} π^i(D).
    pub fn trace_to_base(&self, d: &MumfordDivisor) -> MumfordDivisor {
        let mut acc = self.zero();
        let mut cur = d.clone();
        for _ in 0..self.emb.degree() {
            acc = self.add(&acc, &cur);
            cur = self.frobenius(&cur);
        }
        acc
    }

    /// Every class of J(F_q) when L = F_q, by enumerating Mumford pairs.
    pub fn enumerate_base(&self) -> Result<Vec<MumfordDivisor>> {
        if !self.emb.is_identity() {
            return Err(Error::Unsupported("enumeration needs the base field as working field".into()));
        }
        let l = self.field();
        let mut out = vec![self.zero()];
        let elems: Vec<FqElem> = l.elements().collect();
        for a in &elems {
            for w in &elems {
                let d = MumfordDivisor { u: Poly::linear(l, a), v: Poly::constant(w.clone()) };
                if self.is_valid(&d) {
                    out.push(d);
                }
            }
        }
        for u0 in &elems {
            for u1 in &elems {
                let u = Poly::from_coeffs(vec![u0.clone(), u1.clone(), l.one()]);
                for v0 in &elems {
                    for v1 in &elems {
                        let d = MumfordDivisor { u: u.clone(), v: Poly::from_coeffs(vec![v0.clone(), v1.clone()]) };
                        if self.is_valid(&d) {
                            out.push(d);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// z^{deg−i}·(a z + 1)^i, the homogenised image of x^i under x = a + 1/z.
fn homog(l: &Fq, a: &FqElem, i: usize, deg: usize) -> Poly {
    let az1 = Poly::from_coeffs(vec![l.one(), a.clone()]);
    az1.pow(i as u32, l).shift(deg - i, l)
}

/// z^i·(1 − c z)^{deg−i}.
fn moebius_term(l: &Fq, c: &FqElem, i: usize, deg: usize) -> Poly {
    let t = Poly::from_coeffs(vec![l.one(), l.neg(c)]);
    t.pow((deg - i) as u32, l).shift(i, l)
}
