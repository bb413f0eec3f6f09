use num_bigint::BigUint;
use rand::Rng;

use super::count::char_sum;
use crate::ff::{extension, Embedding, Fq, FqElem, Poly};
use crate::{Error, Limits, Result};

/// y² = x³ + a2·x² + a4·x + a6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    pub k: Fq,
    pub a2: FqElem,
    pub a4: FqElem,
    pub a6: FqElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EcPoint {
    Infinity,
    Affine(FqElem, FqElem),
}

impl EllipticCurve {
    pub fn new(k: &Fq, a2: FqElem, a4: FqElem, a6: FqElem) -> Result<Self> {
        let e = EllipticCurve { k: k.clone(), a2, a4, a6 };
        if e.discriminant().is_zero() {
            return Err(Error::Degenerate("singular cubic".into()));
        }
        Ok(e)
    }

    /// y² = x³ + a·x + b.
    pub fn short(k: &Fq, a: FqElem, b: FqElem) -> Result<Self> {
        Self::new(k, k.zero(), a, b)
    }

    /// y² = h(x) for an arbitrary cubic h, rescaled to a monic model by
    /// (x, y) ↦ (l·x, l·y) with l the leading coefficient.
    pub fn from_cubic(k: &Fq, h: &Poly) -> Result<Self> {
        if h.degree() != Some(3) {
            return Err(Error::InvalidInput("expected a cubic".into()));
        }
        let l = h.c[3].clone();
        let c = |i: usize| h.c[i].clone();
        Self::new(k, c(2), k.mul(&l, &c(1)), k.mul(&k.sqr(&l), &c(0)))
    }

    pub fn cubic(&self) -> Poly {
        Poly::from_coeffs(vec![self.a6.clone(), self.a4.clone(), self.a2.clone(), self.k.one()])
    }

    fn b_invariants(&self) -> (FqElem, FqElem, FqElem, FqElem) {
        let k = &self.k;
        let b2 = k.scale(&self.a2, 4);
        let b4 = k.scale(&self.a4, 2);
        let b6 = k.scale(&self.a6, 4);
        let b8 = k.sub(&k.scale(&k.mul(&self.a2, &self.a6), 4), &k.sqr(&self.a4));
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> FqElem {
        let k = &self.k;
        let (b2, b4, b6, b8) = self.b_invariants();
        let t1 = k.neg(&k.mul(&k.sqr(&b2), &b8));
        let t2 = k.scale(&k.mul(&k.sqr(&b4), &b4), 8);
        let t3 = k.scale(&k.sqr(&b6), 27);
        let t4 = k.scale(&k.mul(&k.mul(&b2, &b4), &b6), 9);
        k.add(&k.sub(&k.sub(&t1, &t2), &t3), &t4)
    }

    pub fn j_invariant(&self) -> FqElem {
        let k = &self.k;
        let (b2, b4, _, _) = self.b_invariants();
        let c4 = k.sub(&k.sqr(&b2), &k.scale(&b4, 24));
        k.div(&k.mul(&k.sqr(&c4), &c4), &self.discriminant()).unwrap()
    }

    pub fn base_change(&self, e: &Embedding) -> EllipticCurve {
        EllipticCurve { k: e.dst.clone(), a2: e.map(&self.a2), a4: e.map(&self.a4), a6: e.map(&self.a6) }
    }

    pub fn contains(&self, pt: &EcPoint) -> bool {
        match pt {
            EcPoint::Infinity => true,
            EcPoint::Affine(x, y) => self.k.sqr(y) == self.cubic().eval(x, &self.k),
        }
    }

    pub fn neg(&self, pt: &EcPoint) -> EcPoint {
        match pt {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine(x, y) => EcPoint::Affine(x.clone(), self.k.neg(y)),
        }
    }

    pub fn add(&self, p1: &EcPoint, p2: &EcPoint) -> EcPoint {
        let k = &self.k;
        let (x1, y1, x2, y2) = match (p1, p2) {
            (EcPoint::Infinity, q) | (q, EcPoint::Infinity) => return q.clone(),
            (EcPoint::Affine(a, b), EcPoint::Affine(c, d)) => (a, b, c, d),
        };
        let lambda = if x1 == x2 {
            if k.add(y1, y2).is_zero() {
                return EcPoint::Infinity;
            }
            let num = k.add(&k.add(&k.scale(&k.sqr(x1), 3), &k.scale(&k.mul(&self.a2, x1), 2)), &self.a4);
            k.div(&num, &k.scale(y1, 2)).unwrap()
        } else {
            k.div(&k.sub(y2, y1), &k.sub(x2, x1)).unwrap()
        };
        let x3 = k.sub(&k.sub(&k.sub(&k.sqr(&lambda), &self.a2), x1), x2);
        let y3 = k.sub(&k.mul(&lambda, &k.sub(x1, &x3)), y1);
        EcPoint::Affine(x3, y3)
    }

    pub fn mul(&self, pt: &EcPoint, n: &BigUint) -> EcPoint {
        let mut r = EcPoint::Infinity;
        for i in (0..n.bits()).rev() {
            r = self.add(&r, &r);
            if n.bit(i) {
                r = self.add(&r, pt);
            }
        }
        r
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> EcPoint {
        let k = &self.k;
        let h = self.cubic();
        loop {
            let x = k.random(rng);
            if let Ok(y) = k.sqrt(&h.eval(&x, k)) {
                let y = if rng.gen::<bool>() { k.neg(&y) } else { y };
                return EcPoint::Affine(x, y);
            }
        }
    }

    /// #E(F_{q^d}) by exhaustive enumeration.
    pub fn count(&self, d: usize, limits: &Limits) -> Result<u128> {
        let e = extension(&self.k, d)?;
        let h = e.map_poly(&self.cubic());
        let s = char_sum(&h, &e.dst, limits)?;
        let q = e.dst.order_u128().unwrap();
        Ok((q as i128 + 1 + s as i128) as u128)
    }

    /// t = q + 1 − #E(F_q).
    pub fn trace(&self, limits: &Limits) -> Result<i64> {
        let n = self.count(1, limits)?;
        let q = self.k.order_u128().unwrap();
        Ok((q as i128 + 1 - n as i128) as i64)
    }

    pub fn is_supersingular(&self, limits: &Limits) -> Result<bool> {
        Ok(self.trace(limits)?.rem_euclid(self.k.p() as i64) == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_count(e: &EllipticCurve) -> u128 {
        let k = &e.k;
        let mut n = 1;
        for x in k.elements() {
            for y in k.elements() {
                if e.contains(&EcPoint::Affine(x.clone(), y)) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn counts_and_supersingularity() {
        let lim = Limits::default();
        let k3 = FieldCtx::prime(3).unwrap();
        let e = EllipticCurve::short(&k3, k3.one(), k3.zero()).unwrap();
        assert_eq!(e.count(1, &lim).unwrap(), 4);
        assert_eq!(brute_count(&e), 4);
        let k5 = FieldCtx::prime(5).unwrap();
        let e = EllipticCurve::short(&k5, k5.zero(), k5.one()).unwrap();
        assert_eq!(e.trace(&lim).unwrap(), 0);
        assert!(e.is_supersingular(&lim).unwrap());
        let k13 = FieldCtx::prime(13).unwrap();
        let e = EllipticCurve::short(&k13, k13.one(), k13.zero()).unwrap();
        assert_eq!(e.j_invariant(), k13.from_u64(1728));
    }

    #[test]
    fn hasse_bound_and_group_order() {
        let lim = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 50 {
            let p = [7u64, 11, 13, 17, 19][done % 5];
            let k = FieldCtx::prime(p).unwrap();
            let Ok(e) = EllipticCurve::new(&k, k.random(&mut rng), k.random(&mut rng), k.random(&mut rng)) else {
                continue;
            };
            let t = e.trace(&lim).unwrap();
            assert!((t * t) as u64 <= 4 * p);
            let n = e.count(1, &lim).unwrap();
            assert_eq!(n, brute_count(&e));
            let pt = e.random_point(&mut rng);
            assert_eq!(e.mul(&pt, &BigUint::from(n)), EcPoint::Infinity);
            done += 1;
        }
    }

    #[test]
    fn rescaled_cubic_is_isomorphic() {
        let lim = Limits::default();
        let k = FieldCtx::prime(11).unwrap();
        let h = Poly::from_i64s(&k, &[0, 3, -4, 3]);
        let e = EllipticCurve::from_cubic(&k, &h).unwrap();
        let s: i64 = k.elements().map(|x| k.chi(&h.eval(&x, &k)) as i64).sum();
        assert_eq!(e.count(1, &lim).unwrap() as i64, 12 + s);
    }
}
