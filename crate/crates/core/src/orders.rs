//! Orders in the quartic algebra K = Q[t]/(f_A), as integer lattices in the
//! power basis 1, π, π², π³ with a common denominator.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::invariants::FrobPoly;
use crate::{Error, Limits, Result};

pub type Rat = BigRational;
pub type QVec = [Rat; 4];

fn rat(x: impl Into<BigInt>) -> Rat {
    Rat::from_integer(x.into())
}

fn qzero() -> QVec {
    [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()]
}

fn basis_vec(i: usize) -> QVec {
    let mut v = qzero();
    v[i] = Rat::one();
    v
}

/// Multiplication and conjugation in K = Q(π).
#[derive(Debug)]
pub struct AlgebraCtx {
    pub frob: FrobPoly,
    /// f_A = t⁴ + c3 t³ + c2 t² + c1 t + c0.
    pub c: [BigInt; 4],
    /// Row i is π̄^i in the power basis.
    pub conj: [QVec; 4],
}

impl AlgebraCtx {
    pub fn new(f: &FrobPoly) -> Result<Arc<Self>> {
        if !f.is_irreducible() {
            return Err(Error::InvalidInput("f_A is reducible over Q".into()));
        }
        let c = f.lower();
        let mut ctx = AlgebraCtx { frob: f.clone(), c, conj: [qzero(), qzero(), qzero(), qzero()] };
        // π̄ = q/π = −(π³ + a1 π² + a2 π + q a1)/q
        let q = rat(f.q.clone());
        let pibar: QVec = [-rat(&f.q * &f.a1) / &q, -rat(f.a2.clone()) / &q, -rat(f.a1.clone()) / &q, -Rat::one() / &q];
        let mut pw = basis_vec(0);
        for i in 0..4 {
            ctx.conj[i] = pw.clone();
            pw = ctx.mul(&pw, &pibar);
        }
        Ok(Arc::new(ctx))
    }

    pub fn one(&self) -> QVec {
        basis_vec(0)
    }

    pub fn pi(&self) -> QVec {
        basis_vec(1)
    }

    pub fn pibar(&self) -> QVec {
        self.conj[1].clone()
    }

    pub fn from_ints(&self, g: &[BigInt]) -> QVec {
        self.from_rats(&g.iter().map(|x| rat(x.clone())).collect::<Vec<_>>())
    }

    /// Reduce a polynomial in π of any degree.
    pub fn from_rats(&self, g: &[Rat]) -> QVec {
        let mut v: Vec<Rat> = g.to_vec();
        while v.len() > 4 {
            let top = v.pop().unwrap();
            let d = v.len() - 4;
            for i in 0..4 {
                v[d + i] -= &top * rat(self.c[i].clone());
            }
        }
        let mut out = qzero();
        for (i, x) in v.into_iter().enumerate() {
            out[i] = x;
        }
        out
    }

    pub fn mul(&self, a: &QVec, b: &QVec) -> QVec {
        let mut prod = vec![Rat::zero(); 7];
        for i in 0..4 {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                prod[i + j] += &a[i] * &b[j];
            }
        }
        self.from_rats(&prod)
    }

    pub fn add(&self, a: &QVec, b: &QVec) -> QVec {
        std::array::from_fn(|i| &a[i] + &b[i])
    }

    pub fn sub(&self, a: &QVec, b: &QVec) -> QVec {
        std::array::from_fn(|i| &a[i] - &b[i])
    }

    pub fn scale(&self, a: &QVec, s: &Rat) -> QVec {
        std::array::from_fn(|i| &a[i] * s)
    }

    pub fn conjugate(&self, a: &QVec) -> QVec {
        let mut out = qzero();
        for (ai, row) in a.iter().zip(&self.conj) {
            for j in 0..4 {
                out[j] += ai * &row[j];
            }
        }
        out
    }

    pub fn pow(&self, a: &QVec, e: u32) -> QVec {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }

    /// Matrix of multiplication by a, row i = a·π^i.
    pub fn mul_matrix(&self, a: &QVec) -> [QVec; 4] {
        std::array::from_fn(|i| self.mul(a, &basis_vec(i)))
    }

    pub fn trace(&self, a: &QVec) -> Rat {
        let m = self.mul_matrix(a);
        (0..4).map(|i| m[i][i].clone()).sum()
    }

    /// Characteristic polynomial of multiplication by a, constant term first.
    pub fn char_poly(&self, a: &QVec) -> [Rat; 5] {
        let m = self.mul_matrix(a);
        rat_char_poly(&m)
    }

    pub fn is_integral(&self, a: &QVec) -> bool {
        self.char_poly(a).iter().all(|c| c.is_integer())
    }

    pub fn is_real(&self, a: &QVec) -> bool {
        self.conjugate(a) == *a
    }

    /// Express x in the power basis of θ, if θ generates K.
    pub fn in_basis_of(&self, theta: &QVec, x: &QVec) -> Option<QVec> {
        let rows: Vec<QVec> = (0..4).map(|i| self.pow(theta, i)).collect();
        solve_left(&rows, x)
    }
}

fn rat_char_poly(m: &[QVec; 4]) -> [Rat; 5] {
    // Faddeev–LeVerrier over Q
    let mut c: [Rat; 5] = std::array::from_fn(|_| Rat::zero());
    c[4] = Rat::one();
    let mut acc: [QVec; 4] = std::array::from_fn(|_| qzero());
    let mm = |a: &[QVec; 4], b: &[QVec; 4]| -> [QVec; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| &a[i][k] * &b[k][j]).sum()))
    };
    for k in 1..=4usize {
        let mut next = mm(m, &acc);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[5 - k];
        }
        acc = next;
        let am = mm(m, &acc);
        let tr: Rat = (0..4).map(|i| am[i][i].clone()).sum();
        c[4 - k] = -tr / rat(k as i64);
    }
    c
}

/// Solve c·rows = x for a square invertible system.
fn solve_left(rows: &[QVec], x: &QVec) -> Option<QVec> {
    let n = rows.len();
    // columns of the augmented system: unknown c_i multiplies rows[i]
    let mut a: Vec<Vec<Rat>> =
        (0..4).map(|j| (0..n).map(|i| rows[i][j].clone()).chain([x[j].clone()]).collect()).collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pr) = (r..4).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, pr);
        let inv = Rat::one() / &a[r][col];
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..4 {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..=n {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        piv_cols.push(col);
        r += 1;
    }
    if piv_cols.len() < n || a[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut out = qzero();
    for (i, &col) in piv_cols.iter().enumerate() {
        out[col] = a[i][n].clone();
    }
    Some(out)
}

/// Row Hermite normal form of an integer matrix; zero rows dropped.
pub fn hnf(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let width = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..width {
        if r >= a.len() {
            break;
        }
        for i in r + 1..a.len() {
            if a[i][col].is_zero() {
                continue;
            }
            if a[r][col].is_zero() {
                a.swap(r, i);
                continue;
            }
            let ext = a[r][col].extended_gcd(&a[i][col]);
            let (g, s, t) = (ext.gcd, ext.x, ext.y);
            let u = &a[r][col] / &g;
            let v = &a[i][col] / &g;
            let (ri, rr) = (a[i].clone(), a[r].clone());
            for j in 0..width {
                a[r][j] = &s * &rr[j] + &t * &ri[j];
                a[i][j] = &u * &ri[j] - &v * &rr[j];
            }
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        for k in 0..r {
            let f = a[k][col].div_floor(&a[r][col]);
            if !f.is_zero() {
                let rr = a[r].clone();
                for j in 0..width {
                    a[k][j] -= &f * &rr[j];
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|x| !x.is_zero()));
    a
}

/// Z-basis of {c : c·M = 0}.
pub fn int_left_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    let k = m.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<BigInt>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    hnf(&aug).into_iter().filter(|r| r[..k].iter().all(|x| x.is_zero())).map(|r| r[k..].to_vec()).collect()
}

/// A Z-lattice (1/den)·rowspace(basis) in K, rank 1 to 4.
#[derive(Clone, Debug)]
pub struct OrderLattice {
    pub ctx: Arc<AlgebraCtx>,
    /// Hermite normal form rows.
    pub basis: Vec<[BigInt; 4]>,
    pub den: BigInt,
}

impl PartialEq for OrderLattice {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.den == other.den
    }
}

impl Eq for OrderLattice {}

impl PartialOrd for OrderLattice {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderLattice {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.den, &self.basis).cmp(&(&other.den, &other.basis))
    }
}

impl OrderLattice {
    pub fn from_gens(ctx: &Arc<AlgebraCtx>, gens: &[QVec]) -> OrderLattice {
        let mut den = BigInt::one();
        for g in gens {
            for x in g {
                den = den.lcm(x.denom());
            }
        }
        let rows: Vec<Vec<BigInt>> =
            gens.iter().map(|g| g.iter().map(|x| (x * rat(den.clone())).to_integer()).collect()).collect();
        let h = hnf(&rows);
        let mut content = den.clone();
        for row in &h {
            for x in row {
                content = content.gcd(x);
            }
        }
        let basis = h.into_iter().map(|r| std::array::from_fn(|i| &r[i] / &content)).collect();
        OrderLattice { ctx: ctx.clone(), basis, den: den / content }
    }

    /// Z[π] itself.
    pub fn equation_order(ctx: &Arc<AlgebraCtx>) -> OrderLattice {
        Self::from_gens(ctx, &(0..4).map(basis_vec).collect::<Vec<_>>())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn elems(&self) -> Vec<QVec> {
        let d = rat(self.den.clone());
        self.basis.iter().map(|r| std::array::from_fn(|i| rat(r[i].clone()) / &d)).collect()
    }

    /// Integer coordinates of x in the basis, if x lies in the lattice.
    pub fn coords(&self, x: &QVec) -> Option<Vec<BigInt>> {
        let d = rat(self.den.clone());
        let mut v: Vec<BigInt> = Vec::with_capacity(4);
        for xi in x {
            let y = xi * &d;
            if !y.is_integer() {
                return None;
            }
            v.push(y.to_integer());
        }
        let mut out = Vec::with_capacity(self.rank());
        let mut col = 0;
        for row in &self.basis {
            while row[col].is_zero() {
                if !v[col].is_zero() {
                    return None;
                }
                col += 1;
            }
            let (c, r) = v[col].div_rem(&row[col]);
            if !r.is_zero() {
                return None;
            }
            for j in 0..4 {
                v[j] -= &c * &row[j];
            }
            out.push(c);
            col += 1;
        }
        if v.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(out)
    }

    pub fn contains(&self, x: &QVec) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, other: &OrderLattice) -> bool {
        other.elems().iter().all(|x| self.contains(x))
    }

    pub fn contains_one(&self) -> bool {
        self.contains(&self.ctx.one())
    }

    /// |det| of the basis divided by den⁴ (rank 4).
    pub fn volume(&self) -> Rat {
        assert_eq!(self.rank(), 4);
        let mut d = BigInt::one();
        for (i, row) in self.basis.iter().enumerate() {
            d *= &row[i];
        }
        Rat::new(d.abs(), self.den.pow(4))
    }

    /// [sup : self].
    pub fn index_in(&self, sup: &OrderLattice) -> Result<BigInt> {
        if self.rank() != 4 || sup.rank() != 4 || !sup.contains_lattice(self) {
            return Err(Error::InvalidInput("lattice is not a full-rank sublattice".into()));
        }
        let r = self.volume() / sup.volume();
        debug_assert!(r.is_integer());
        Ok(r.to_integer())
    }

    pub fn sum(&self, other: &OrderLattice) -> OrderLattice {
        let mut g = self.elems();
        g.extend(other.elems());
        Self::from_gens(&self.ctx, &g)
    }

    pub fn with(&self, extra: &[QVec]) -> OrderLattice {
        let mut g = self.elems();
        g.extend_from_slice(extra);
        Self::from_gens(&self.ctx, &g)
    }

    pub fn scale(&self, s: &Rat) -> OrderLattice {
        Self::from_gens(&self.ctx, &self.elems().iter().map(|x| self.ctx.scale(x, s)).collect::<Vec<_>>())
    }

    pub fn intersect(&self, other: &OrderLattice) -> OrderLattice {
        let den = self.den.lcm(&other.den);
        let up = |l: &OrderLattice| -> Vec<Vec<BigInt>> {
            let f = &den / &l.den;
            l.basis.iter().map(|r| r.iter().map(|x| x * &f).collect()).collect()
        };
        let a = up(self);
        let mut m = a.clone();
        m.extend(up(other));
        let ker = int_left_kernel(&m);
        let d = rat(den);
        let gens: Vec<QVec> = ker
            .iter()
            .map(|c| std::array::from_fn(|j| rat((0..a.len()).map(|i| &c[i] * &a[i][j]).sum::<BigInt>()) / &d))
            .collect();
        Self::from_gens(&self.ctx, &gens)
    }

    pub fn products(&self) -> Vec<QVec> {
        let e = self.elems();
        let mut out = Vec::new();
        for i in 0..e.len() {
            for j in i..e.len() {
                out.push(self.ctx.mul(&e[i], &e[j]));
            }
        }
        out
    }

    pub fn is_ring(&self) -> bool {
        self.rank() == 4 && self.contains_one() && self.products().iter().all(|x| self.contains(x))
    }

    pub fn conj_stable(&self) -> bool {
        self.elems().iter().all(|x| self.contains(&self.ctx.conjugate(x)))
    }

    /// Smallest conjugation-stable ring containing the lattice and 1.
    pub fn ring_closure(&self) -> OrderLattice {
        let mut cur = self.with(&[self.ctx.one()]);
        loop {
            let mut extra = cur.products();
            extra.extend(cur.elems().iter().map(|x| cur.ctx.conjugate(x)));
            let next = cur.with(&extra);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Discriminant det(tr(b_i b_j)).
    pub fn discriminant(&self) -> BigInt {
        let e = self.elems();
        let rows: Vec<QVec> =
            (0..4).map(|i| std::array::from_fn(|j| self.ctx.trace(&self.ctx.mul(&e[i], &e[j])))).collect();
        let d = rat_det(&rows);
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    /// Structure constants of a rank-4 ring: b_i b_j = Σ_k m[i][j][k] b_k.
    fn structure_constants(&self) -> Vec<Vec<Vec<BigInt>>> {
        let e = self.elems();
        (0..4).map(|i| (0..4).map(|j| self.coords(&self.ctx.mul(&e[i], &e[j])).expect("ring")).collect()).collect()
    }

    /// Lift of an F_ℓ (or integer) coordinate vector to K.
    pub fn combine(&self, c: &[BigInt]) -> QVec {
        let e = self.elems();
        let mut out = qzero();
        for (ci, x) in c.iter().zip(&e) {
            out = self.ctx.add(&out, &self.ctx.scale(x, &rat(ci.clone())));
        }
        out
    }

    /// Common denominator form: each basis element as g(π)/m with g integral.
    pub fn as_fractions(&self) -> Vec<([BigInt; 4], BigInt)> {
        self.elems()
            .iter()
            .map(|x| {
                let mut m = BigInt::one();
                for xi in x {
                    m = m.lcm(xi.denom());
                }
                (std::array::from_fn(|i| (&x[i] * rat(m.clone())).to_integer()), m)
            })
            .collect()
    }
}

fn rat_det(rows: &[QVec]) -> Rat {
    let mut a: Vec<Vec<Rat>> = rows.iter().map(|r| r.to_vec()).collect();
    let n = a.len();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else { return Rat::zero() };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        for i in col + 1..n {
            let f = &a[i][col] / &a[col][col];
            for j in col..n {
                let t = &f * &a[col][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Z[π, π̄].
pub fn zpi_order(ctx: &Arc<AlgebraCtx>) -> OrderLattice {
    let mut g: Vec<QVec> = (0..4).map(basis_vec).collect();
    g.extend((1..4).map(|i| ctx.conj[i].clone()));
    OrderLattice::from_gens(ctx, &g).ring_closure()
}

/// F_ℓ linear algebra on row vectors.
mod fl {
    pub fn inv(a: u64, l: u64) -> u64 {
        crate::ff::inv_mod(a, l).expect("unit")
    }

    /// Row echelon basis of the row space.
    pub fn row_basis(rows: &[Vec<u64>], l: u64) -> Vec<Vec<u64>> {
        let mut a: Vec<Vec<u64>> = rows.to_vec();
        let w = a.first().map_or(0, |r| r.len());
        let mut r = 0;
        for col in 0..w {
            let Some(p) = (r..a.len()).find(|&i| a[i][col] != 0) else { continue };
            a.swap(r, p);
            let iv = inv(a[r][col], l);
            for x in a[r].iter_mut() {
                *x = (*x as u128 * iv as u128 % l as u128) as u64;
            }
            for i in 0..a.len() {
                if i != r && a[i][col] != 0 {
                    let f = a[i][col];
                    for j in 0..w {
                        a[i][j] = (a[i][j] + l - (f as u128 * a[r][j] as u128 % l as u128) as u64) % l;
                    }
                }
            }
            r += 1;
        }
        a.truncate(r);
        a
    }

    /// Basis of {v : v·M = 0}.
    pub fn left_kernel(m: &[Vec<u64>], l: u64) -> Vec<Vec<u64>> {
        let n = m.len();
        let k = m.first().map_or(0, |r| r.len());
        let aug: Vec<Vec<u64>> = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| u64::from(i == j)));
                r
            })
            .collect();
        // eliminate on the first k columns only
        let mut a = aug;
        let mut r = 0;
        for col in 0..k {
            let Some(p) = (r..n).find(|&i| a[i][col] != 0) else { continue };
            a.swap(r, p);
            let iv = inv(a[r][col], l);
            for x in a[r].iter_mut() {
                *x = (*x as u128 * iv as u128 % l as u128) as u64;
            }
            for i in 0..n {
                if i != r && a[i][col] != 0 {
                    let f = a[i][col];
                    for j in 0..k + n {
                        a[i][j] = (a[i][j] + l - (f as u128 * a[r][j] as u128 % l as u128) as u64) % l;
                    }
                }
            }
            r += 1;
        }
        a[r..].iter().map(|row| row[k..].to_vec()).collect()
    }
}

/// Coordinates mod ℓ of the elements of `xs` in the basis of `l`.
fn coords_mod(l: &OrderLattice, xs: &[QVec], ell: u64) -> Vec<Vec<u64>> {
    let lb = BigInt::from(ell);
    xs.iter()
        .map(|x| {
            l.coords(x).expect("element of the lattice").iter().map(|c| c.mod_floor(&lb).to_u64().unwrap()).collect()
        })
        .collect()
}

fn lift(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// One round-2 enlargement at ℓ: the multiplier ring of the ℓ-radical.
fn round2_step(o: &OrderLattice, ell: u64) -> OrderLattice {
    let sc = o.structure_constants();
    let lb = BigInt::from(ell);
    let mulmod = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut out = vec![0u128; 4];
        for i in 0..4 {
            if a[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if b[j] == 0 {
                    continue;
                }
                let ab = a[i] as u128 * b[j] as u128 % ell as u128;
                for k in 0..4 {
                    let c = sc[i][j][k].mod_floor(&lb).to_u64().unwrap() as u128;
                    out[k] = (out[k] + ab * c) % ell as u128;
                }
            }
        }
        out.into_iter().map(|x| x as u64).collect()
    };
    // x ↦ x^{ℓ^j} with ℓ^j ≥ 4 is F_ℓ-linear on O/ℓO
    let mut j = 1u32;
    while ell.pow(j) < 4 {
        j += 1;
    }
    let one_coords = coords_mod(o, &[o.ctx.one()], ell).remove(0);
    let frob_power = |x: &[u64]| -> Vec<u64> {
        let mut r = x.to_vec();
        for _ in 0..j {
            // r ← r^ℓ by square-and-multiply
            let mut acc = one_coords.clone();
            let mut base = r.clone();
            let mut e = ell;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &base);
                }
                e >>= 1;
                if e > 0 {
                    base = mulmod(&base, &base);
                }
            }
            r = acc;
        }
        r
    };
    let m: Vec<Vec<u64>> = (0..4).map(|i| frob_power(&(0..4).map(|k| u64::from(i == k)).collect::<Vec<_>>())).collect();
    let ker = fl::left_kernel(&m, ell);
    let e = o.elems();
    let mut rad_gens: Vec<QVec> = e.iter().map(|x| o.ctx.scale(x, &rat(ell))).collect();
    rad_gens.extend(ker.iter().map(|v| o.combine(&lift(v))));
    let rad = OrderLattice::from_gens(&o.ctx, &rad_gens);
    // y ∈ O with y·I ⊆ ℓI  ⇔  y/ℓ in the multiplier ring
    let ri = rad.elems();
    let mut cols: Vec<Vec<u64>> = vec![Vec::new(); 4];
    for (i, b) in e.iter().enumerate() {
        for g in &ri {
            let prod = o.ctx.mul(b, g);
            let c = rad.coords(&prod).expect("radical is an ideal");
            for x in c {
                cols[i].push(x.mod_floor(&lb).to_u64().unwrap());
            }
        }
    }
    let ker = fl::left_kernel(&cols, ell);
    let extra: Vec<QVec> =
        ker.iter().map(|v| o.ctx.scale(&o.combine(&lift(v)), &Rat::new(BigInt::one(), lb.clone()))).collect();
    o.with(&extra)
}

/// Primes ℓ with ℓ² dividing n.
pub fn square_divisors(n: &BigInt) -> Vec<u64> {
    let n = n.abs().to_biguint().unwrap();
    if n.is_zero() {
        return Vec::new();
    }
    num_prime::nt_funcs::factorize(n)
        .into_iter()
        .filter(|(_, k)| *k >= 2)
        .map(|(p, _)| p.to_u64().expect("prime fits in 64 bits"))
        .collect()
}

pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    let n = n.abs().to_biguint().unwrap();
    if n <= BigUint::one() {
        return Vec::new();
    }
    num_prime::nt_funcs::factorize(n).into_keys().map(|p| p.to_u64().expect("prime fits in 64 bits")).collect()
}

/// The ring of integers, by round-2 enlargement of Z[π, π̄].
pub fn maximal_order(ctx: &Arc<AlgebraCtx>) -> OrderLattice {
    let mut o = zpi_order(ctx);
    for ell in square_divisors(&o.discriminant()) {
        o = maximize_at(&o, ell);
    }
    o
}

/// ℓ-maximal overorder of a ring.
pub fn maximize_at(o: &OrderLattice, ell: u64) -> OrderLattice {
    let mut o = o.clone();
    loop {
        let next = round2_step(&o, ell);
        if next == o {
            return o;
        }
        o = next;
    }
}

/// ((1/ℓ)O ∩ O_K)/O as lifts of an F_ℓ-basis.
fn quotient_basis(o: &OrderLattice, ok: &OrderLattice, ell: u64) -> Vec<QVec> {
    let w = o.scale(&Rat::new(BigInt::one(), BigInt::from(ell))).intersect(ok);
    let lw: Vec<QVec> = w.elems().iter().map(|x| o.ctx.scale(x, &rat(ell))).collect();
    let rows = coords_mod(o, &lw, ell);
    let inv_l = Rat::new(BigInt::one(), BigInt::from(ell));
    fl::row_basis(&rows, ell).iter().map(|v| o.ctx.scale(&o.combine(&lift(v)), &inv_l)).collect()
}

/// Nonzero vectors of F_ℓ^d up to scaling (first nonzero entry 1).
fn projective_points(d: usize, ell: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..d {
        let free = d - lead - 1;
        let count = ell.pow(free as u32);
        for mut idx in 0..count {
            let mut v = vec![0u64; d];
            v[lead] = 1;
            for x in v.iter_mut().skip(lead + 1) {
                *x = idx % ell;
                idx /= ell;
            }
            out.push(v);
        }
    }
    out
}

fn combine_q(xs: &[QVec], c: &[u64], ctx: &AlgebraCtx) -> QVec {
    let mut out = qzero();
    for (x, &ci) in xs.iter().zip(c) {
        if ci != 0 {
            out = ctx.add(&out, &ctx.scale(x, &rat(ci)));
        }
    }
    out
}

/// Conjugation-stable rings directly above O inside (1/ℓ)O ∩ O_K.
pub fn minimal_overorders(o: &OrderLattice, ok: &OrderLattice, ell: u64, limits: &Limits) -> Result<Vec<OrderLattice>> {
    let v = quotient_basis(o, ok, ell);
    if v.is_empty() {
        return Ok(Vec::new());
    }
    let npts = (ell as u128).pow(v.len() as u32);
    if npts > limits.max_enum as u128 {
        return Err(Error::Capacity(format!("{ell}^{} candidate overorders", v.len())));
    }
    let top = o.scale(&Rat::new(BigInt::one(), BigInt::from(ell)));
    let mut cands: BTreeSet<OrderLattice> = BTreeSet::new();
    for pt in projective_points(v.len(), ell) {
        let x = combine_q(&v, &pt, &o.ctx);
        let r = o.with(&[x]).ring_closure();
        if top.contains_lattice(&r) {
            cands.insert(r);
        }
    }
    let cands: Vec<OrderLattice> = cands.into_iter().collect();
    let minimal = cands.iter().filter(|r| !cands.iter().any(|s| s != *r && r.contains_lattice(s))).cloned().collect();
    Ok(minimal)
}

/// O ∩ K⁺, the σ-fixed sublattice (rank 2).
pub fn real_suborder(o: &OrderLattice) -> OrderLattice {
    let e = o.elems();
    let diffs: Vec<QVec> = e.iter().map(|x| o.ctx.sub(&o.ctx.conjugate(x), x)).collect();
    let mut den = BigInt::one();
    for d in &diffs {
        for x in d {
            den = den.lcm(x.denom());
        }
    }
    let m: Vec<Vec<BigInt>> =
        diffs.iter().map(|d| d.iter().map(|x| (x * rat(den.clone())).to_integer()).collect()).collect();
    let ker = int_left_kernel(&m);
    let gens: Vec<QVec> = ker.iter().map(|c| o.combine(c)).collect();
    OrderLattice::from_gens(&o.ctx, &gens)
}

#[derive(Clone, Debug)]
pub struct SharpOrder {
    pub order: OrderLattice,
    /// 2 divides [O_K : O^♯], where maximality is not guaranteed.
    pub unproven_at_2: bool,
}

/// The largest conjugation-stable order with real part O₊, by ascent
/// through minimal overorders that keep the real part.
pub fn sharp_order(real: &OrderLattice, ok: &OrderLattice, limits: &Limits) -> Result<SharpOrder> {
    let ctx = &real.ctx;
    let okp = real_suborder(ok);
    let c = real.scale(&Rat::one()).index_rank2(&okp)?;
    let eta = ctx.scale(&ctx.sub(&ctx.pi(), &ctx.pibar()), &rat(c));
    let mut gens = real.elems();
    gens.extend(real.elems().iter().map(|x| ctx.mul(x, &eta)));
    let mut cur = OrderLattice::from_gens(ctx, &gens);
    if !cur.is_ring() || real_suborder(&cur) != *real {
        return Err(Error::Invariant("seed order has the wrong real part".into()));
    }
    loop {
        let idx = cur.index_in(ok)?;
        let mut moved = false;
        for ell in prime_factors(&idx) {
            for r in minimal_overorders(&cur, ok, ell, limits)? {
                if real_suborder(&r) == *real {
                    cur = r;
                    moved = true;
                    break;
                }
            }
            if moved {
                break;
            }
        }
        if !moved {
            let unproven_at_2 = cur.index_in(ok)?.is_even();
            return Ok(SharpOrder { order: cur, unproven_at_2 });
        }
    }
}

impl OrderLattice {
    /// [sup : self] for rank-2 lattices in the same plane.
    pub fn index_rank2(&self, sup: &OrderLattice) -> Result<BigInt> {
        if self.rank() != 2 || sup.rank() != 2 || !sup.contains_lattice(self) {
            return Err(Error::InvalidInput("not a rank-2 sublattice".into()));
        }
        let rows: Vec<Vec<BigInt>> = self.elems().iter().map(|x| sup.coords(x).unwrap()).collect();
        Ok((&rows[0][0] * &rows[1][1] - &rows[0][1] * &rows[1][0]).abs())
    }
}

/// Subspaces of F_ℓ^d in reduced row echelon form.
fn subspaces(d: usize, ell: u64) -> Vec<Vec<Vec<u64>>> {
    let mut out = vec![Vec::new()];
    for k in 1..=d {
        for pivots in combinations(d, k) {
            // free entries: positions (row i, col j) with j > pivot_i, j not a pivot
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| ((pivots[i] + 1)..d).filter(|j| !pivots.contains(j)).map(move |j| (i, j)))
                .collect();
            let total = ell.pow(free.len() as u32);
            for mut idx in 0..total {
                let mut rows = vec![vec![0u64; d]; k];
                for (i, &pc) in pivots.iter().enumerate() {
                    rows[i][pc] = 1;
                }
                for &(i, j) in &free {
                    rows[i][j] = idx % ell;
                    idx /= ell;
                }
                out.push(rows);
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in combinations(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                let mut v = vec![first];
                v.extend(rest);
                out.push(v);
            }
        }
    }
    out
}

/// Lattices between O₊ + ℓ²O and O₊ + ℓO, with their quotient basis.
fn stable_window(o: &OrderLattice, ell: u64) -> (OrderLattice, Vec<QVec>) {
    let real = real_suborder(o);
    let l2 = rat(ell * ell);
    let lo = real.sum(&o.scale(&l2));
    let hi = real.sum(&o.scale(&rat(ell)));
    // F_ℓ-basis of hi/lo: reduce hi's basis against lo
    let hb = hi.elems();
    let mut basis: Vec<QVec> = Vec::new();
    let mut span = lo.clone();
    for x in hb {
        if !span.contains(&x) {
            span = span.with(&[x.clone()]);
            basis.push(x);
        }
    }
    (lo, basis)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableCount {
    /// dim_{F_ℓ} of (O₊ + ℓO)/(O₊ + ℓ²O).
    pub quotient_dim: usize,
    /// Conjugation-stable F_ℓ-submodules of the quotient.
    pub stable_submodules: u64,
    /// Those submodules whose lattice is a ring.
    pub orders: u64,
}

/// Conjugation-stable orders between O₊ + ℓ²O and O₊ + ℓO.
pub fn count_stable_orders(o: &OrderLattice, ell: u64) -> Result<StableCount> {
    if ell == 2 || !crate::ff::is_prime(ell) {
        return Err(Error::InvalidInput("ℓ must be an odd prime".into()));
    }
    let (lo, basis) = stable_window(o, ell);
    let d = basis.len();
    let mut count = StableCount { quotient_dim: d, stable_submodules: 0, orders: 0 };
    for sub in subspaces(d, ell) {
        let gens: Vec<QVec> = sub.iter().map(|v| combine_q(&basis, v, &o.ctx)).collect();
        let l = lo.with(&gens);
        if l.conj_stable() {
            count.stable_submodules += 1;
            if l.is_ring() {
                count.orders += 1;
            }
        }
    }
    Ok(count)
}

/// Rational quaternion algebra (a, b): i² = a, j² = b, ij = −ji = k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatCtx {
    pub a: Rat,
    pub b: Rat,
}

pub type QuatElem = [Rat; 4];

impl QuatCtx {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        QuatCtx { a: rat(a), b: rat(b) }
    }

    pub fn scalar(&self, s: &Rat) -> QuatElem {
        [s.clone(), Rat::zero(), Rat::zero(), Rat::zero()]
    }

    pub fn add(&self, x: &QuatElem, y: &QuatElem) -> QuatElem {
        std::array::from_fn(|i| &x[i] + &y[i])
    }

    pub fn sub(&self, x: &QuatElem, y: &QuatElem) -> QuatElem {
        std::array::from_fn(|i| &x[i] - &y[i])
    }

    pub fn mul(&self, x: &QuatElem, y: &QuatElem) -> QuatElem {
        let (a, b) = (&self.a, &self.b);
        let ab = a * b;
        [
            &x[0] * &y[0] + a * &x[1] * &y[1] + b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - b * &x[2] * &y[3] + b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + a * &x[1] * &y[3] - a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    /// The standard involution x ↦ x̂.
    pub fn dual(&self, x: &QuatElem) -> QuatElem {
        [x[0].clone(), -&x[1], -&x[2], -&x[3]]
    }

    /// |x| = x·x̂.
    pub fn norm(&self, x: &QuatElem) -> Rat {
        let n = self.mul(x, &self.dual(x));
        debug_assert!(n[1].is_zero() && n[2].is_zero() && n[3].is_zero());
        n[0].clone()
    }

    /// tr(x) = x + x̂.
    pub fn trace(&self, x: &QuatElem) -> Rat {
        &x[0] + &x[0]
    }
}

pub type QuatMat = [[QuatElem; 2]; 2];

/// Both sides of
/// (x y; z w)·(x̂|w| − ẑwŷ, ẑ|y| − x̂yŵ; ŷ|z| − ŵzx̂, ŵ|x| − ŷxẑ) = s·I
/// with s = |x||w| + |y||z| − tr(x ẑ w ŷ).
pub fn quat_adjugate_identity(h: &QuatCtx, x: &QuatElem, y: &QuatElem, z: &QuatElem, w: &QuatElem) -> (QuatMat, Rat) {
    let d = |u: &QuatElem| h.dual(u);
    let m3 = |a: &QuatElem, b: &QuatElem, c: &QuatElem| h.mul(&h.mul(a, b), c);
    let sc = |u: &QuatElem, s: Rat| -> QuatElem { std::array::from_fn(|i| &u[i] * &s) };
    let adj: QuatMat = [
        [h.sub(&sc(&d(x), h.norm(w)), &m3(&d(z), w, &d(y))), h.sub(&sc(&d(z), h.norm(y)), &m3(&d(x), y, &d(w)))],
        [h.sub(&sc(&d(y), h.norm(z)), &m3(&d(w), z, &d(x))), h.sub(&sc(&d(w), h.norm(x)), &m3(&d(y), x, &d(z)))],
    ];
    let m: QuatMat = [[x.clone(), y.clone()], [z.clone(), w.clone()]];
    let lhs: QuatMat = std::array::from_fn(|i| {
        std::array::from_fn(|j| h.add(&h.mul(&m[i][0], &adj[0][j]), &h.mul(&m[i][1], &adj[1][j])))
    });
    let s = h.norm(x) * h.norm(w) + h.norm(y) * h.norm(z) - h.trace(&h.mul(&h.mul(x, &d(z)), &h.mul(w, &d(y))));
    (lhs, s)
}

/// The identity holds exactly.
pub fn quat_identity_holds(h: &QuatCtx, x: &QuatElem, y: &QuatElem, z: &QuatElem, w: &QuatElem) -> bool {
    let (lhs, s) = quat_adjugate_identity(h, x, y, z, w);
    let zero = h.scalar(&Rat::zero());
    lhs[0][0] == h.scalar(&s) && lhs[1][1] == h.scalar(&s) && lhs[0][1] == zero && lhs[1][0] == zero
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn golden() -> Arc<AlgebraCtx> {
        AlgebraCtx::new(&FrobPoly::new(0, 10, 11, 1)).unwrap()
    }

    #[test]
    fn hnf_and_kernel() {
        let m: Vec<Vec<BigInt>> =
            [[2, 4, 6], [1, 1, 1], [3, 5, 7]].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let h = hnf(&m);
        assert_eq!(h.len(), 2);
        let k = int_left_kernel(&m);
        assert_eq!(k.len(), 1);
        for j in 0..3 {
            let s: BigInt = (0..3).map(|i| &k[0][i] * &m[i][j]).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn conjugation_is_an_involution_with_product_q() {
        let ctx = golden();
        let pi = ctx.pi();
        assert_eq!(ctx.mul(&pi, &ctx.pibar()), ctx.scale(&ctx.one(), &rat(11)));
        let x = ctx.from_ints(&[3, -1, 4, 1].map(BigInt::from));
        assert_eq!(ctx.conjugate(&ctx.conjugate(&x)), x);
        assert_eq!(ctx.conjugate(&ctx.mul(&x, &pi)), ctx.mul(&ctx.conjugate(&x), &ctx.pibar()));
    }

    #[test]
    fn golden_maximal_order_index() {
        let ctx = golden();
        let z = zpi_order(&ctx);
        let ok = maximal_order(&ctx);
        assert!(ok.is_ring() && ok.conj_stable());
        assert_eq!(z.index_in(&ok).unwrap(), BigInt::from(32));
        for x in ok.elems() {
            assert!(ctx.is_integral(&x));
        }
        assert!(square_divisors(&ok.discriminant()).iter().all(|&l| maximize_at(&ok, l) == ok));
    }

    #[test]
    fn prank1_maximal_order_index() {
        let ctx = AlgebraCtx::new(&FrobPoly::new(-429, 110631, 36877, 1)).unwrap();
        let z = zpi_order(&ctx);
        let ok = maximal_order(&ctx);
        assert_eq!(z.index_in(&ok).unwrap(), BigInt::from(431));
    }

    #[test]
    fn real_suborder_has_rank_two() {
        let ctx = golden();
        let ok = maximal_order(&ctx);
        let r = real_suborder(&ok);
        assert_eq!(r.rank(), 2);
        assert!(r.elems().iter().all(|x| ctx.is_real(x)));
        assert!(r.contains(&ctx.add(&ctx.pi(), &ctx.pibar())));
    }

    #[test]
    fn intersection_and_sum() {
        let ctx = golden();
        let z = zpi_order(&ctx);
        let ok = maximal_order(&ctx);
        assert_eq!(z.intersect(&ok), z);
        assert_eq!(z.sum(&ok), ok);
        let two = ok.scale(&rat(2));
        let i = z.intersect(&two);
        assert!(z.contains_lattice(&i) && two.contains_lattice(&i));
    }

    #[test]
    fn minimal_overorders_lie_one_step_up() {
        let ctx = golden();
        let z = zpi_order(&ctx);
        let ok = maximal_order(&ctx);
        let mins = minimal_overorders(&z, &ok, 2, &Limits::default()).unwrap();
        assert!(!mins.is_empty());
        for r in &mins {
            assert!(r.is_ring() && r.conj_stable() && r.contains_lattice(&z) && r != &z);
            assert!(ok.contains_lattice(r));
            let idx = z.index_in(r).unwrap();
            assert!(prime_factors(&idx) == vec![2]);
        }
    }

    #[test]
    fn sharp_order_keeps_real_part() {
        let ctx = golden();
        let ok = maximal_order(&ctx);
        let z = zpi_order(&ctx);
        let real = real_suborder(&z);
        let s = sharp_order(&real, &ok, &Limits::default()).unwrap();
        assert_eq!(real_suborder(&s.order), real);
        assert!(s.order.contains_lattice(&z) && s.order.is_ring() && s.order.conj_stable());
    }

    #[test]
    fn subspace_enumeration_counts() {
        // Gaussian binomials over F_3 in dimension 3: 1 + 13 + 13 + 1
        assert_eq!(subspaces(3, 3).len(), 28);
        assert_eq!(subspaces(2, 5).len(), 1 + 6 + 1);
        assert_eq!(projective_points(3, 2).len(), 7);
    }

    fn random_quat(rng: &mut ChaCha8Rng) -> QuatElem {
        std::array::from_fn(|_| Rat::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=6))))
    }

    #[test]
    fn quaternion_adjugate_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (a, b) in [(-1, -11), (-2, -5)] {
            let h = QuatCtx::new(a, b);
            for _ in 0..100 {
                let [x, y, z, w] = std::array::from_fn(|_| random_quat(&mut rng));
                assert!(quat_identity_holds(&h, &x, &y, &z, &w));
            }
        }
    }

    fn sqrt_minus_two(ctx: &AlgebraCtx) -> QVec {
        // (π − π̄)² = −32 on the golden field
        ctx.scale(&ctx.sub(&ctx.pi(), &ctx.pibar()), &Rat::new(BigInt::one(), BigInt::from(4)))
    }

    #[test]
    fn golden_overorders_of_sqrt_minus_two_order() {
        let ctx = golden();
        let r = sqrt_minus_two(&ctx);
        assert_eq!(ctx.mul(&r, &r), ctx.scale(&ctx.one(), &rat(-2)));
        let ok = maximal_order(&ctx);
        let o = zpi_order(&ctx).with(&[r]).ring_closure();
        assert_eq!(o.index_in(&ok).unwrap(), BigInt::from(2));
        let mins = minimal_overorders(&o, &ok, 2, &Limits::default()).unwrap();
        assert_eq!(mins, vec![ok.clone()]);
        assert!(minimal_overorders(&ok, &ok, 2, &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn nothing_lies_strictly_between_minimal_overorders() {
        let ctx = golden();
        let ok = maximal_order(&ctx);
        let z = zpi_order(&ctx);
        for r in minimal_overorders(&z, &ok, 2, &Limits::default()).unwrap() {
            // every lattice between Z[π,π̄] and r, via subspaces of r/Z[π,π̄] when it is elementary
            let two_r = r.scale(&rat(2));
            if !z.contains_lattice(&two_r) {
                continue;
            }
            let mut span = z.clone();
            let mut quot = Vec::new();
            for x in r.elems() {
                if !span.contains(&x) {
                    span = span.with(&[x.clone()]);
                    quot.push(x);
                }
            }
            for sub in subspaces(quot.len(), 2) {
                let gens: Vec<QVec> = sub.iter().map(|v| combine_q(&quot, v, &ctx)).collect();
                let l = z.with(&gens);
                if l.is_ring() && l.conj_stable() {
                    assert!(l == z || l == r);
                }
            }
        }
    }

    #[test]
    fn maximal_order_is_idempotent_and_discriminants_match() {
        for f in [FrobPoly::new(0, 10, 11, 1), FrobPoly::new(3, 7, 13, 1), FrobPoly::new(-2, 5, 7, 1)] {
            let ctx = AlgebraCtx::new(&f).unwrap();
            let ok = maximal_order(&ctx);
            let z = zpi_order(&ctx);
            for l in square_divisors(&ok.discriminant()) {
                assert_eq!(maximize_at(&ok, l), ok);
            }
            let idx = z.index_in(&ok).unwrap();
            assert_eq!(z.discriminant(), ok.discriminant() * &idx * &idx);
            assert!(ok.is_ring() && ok.conj_stable() && ok.contains_lattice(&z));
        }
    }

    #[test]
    fn perturbed_lattice_is_not_a_ring() {
        let ctx = golden();
        let z = zpi_order(&ctx);
        let mut e = z.elems();
        e[1] = ctx.scale(&e[1], &rat(3));
        e[1] = ctx.add(&e[1], &e[3]);
        assert!(!OrderLattice::from_gens(&ctx, &e).is_ring());
        assert!(z.is_ring() && z.conj_stable());
    }

    #[test]
    fn lattice_sum_of_coprime_sublattices() {
        let ctx = golden();
        let ok = maximal_order(&ctx);
        assert_eq!(ok.sum(&ok), ok);
        let e = ok.elems();
        let l1 = OrderLattice::from_gens(&ctx, &[ctx.scale(&e[0], &rat(3)), e[1].clone(), e[2].clone(), e[3].clone()]);
        let l2 = OrderLattice::from_gens(&ctx, &[e[0].clone(), ctx.scale(&e[1], &rat(4)), e[2].clone(), e[3].clone()]);
        assert_eq!(l1.sum(&l2), ok);
        let i = l1.intersect(&l2);
        assert_eq!(i.index_in(&l1.sum(&l2)).unwrap(), i.index_in(&l1).unwrap() * i.index_in(&l2).unwrap());
    }

    #[test]
    fn real_part_of_maximal_order_is_maximal() {
        // K⁺ = Q(√3), whose ring of integers has discriminant 12
        let ctx = golden();
        let okp = real_suborder(&maximal_order(&ctx));
        let e = okp.elems();
        let d = rat_det(&[
            [ctx.trace(&ctx.mul(&e[0], &e[0])), ctx.trace(&ctx.mul(&e[0], &e[1])), Rat::zero(), Rat::zero()],
            [ctx.trace(&ctx.mul(&e[1], &e[0])), ctx.trace(&ctx.mul(&e[1], &e[1])), Rat::zero(), Rat::zero()],
            [Rat::zero(), Rat::zero(), Rat::one(), Rat::zero()],
            [Rat::zero(), Rat::zero(), Rat::zero(), Rat::one()],
        ]);
        // traces over K are twice those over K⁺
        assert_eq!(d, rat(12 * 4));
    }

    #[test]
    fn sharp_order_of_maximal_real_part_is_maximal() {
        let ctx = golden();
        let ok = maximal_order(&ctx);
        let s = sharp_order(&real_suborder(&ok), &ok, &Limits::default()).unwrap();
        assert_eq!(s.order, ok);
        assert!(!s.unproven_at_2);
    }

    #[test]
    fn sum_of_orders_with_equal_real_part_keeps_it_at_three() {
        let ctx = golden();
        let ok = maximal_order(&ctx);
        let okp = real_suborder(&ok);
        // O₊ = Z + 3·O_{K⁺}
        let e = okp.elems();
        let real3 = OrderLattice::from_gens(&ctx, &[ctx.one(), ctx.scale(&e[1], &rat(3))]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = Vec::new();
        for _ in 0..60 {
            let c: Vec<BigInt> = (0..4).map(|_| BigInt::from(rng.gen_range(0..9))).collect();
            let o = real3.with(&[ctx.scale(&ok.combine(&c), &rat(3))]).ring_closure();
            if o.rank() == 4 && real_suborder(&o) == real3 {
                found.push(o);
            }
        }
        assert!(found.len() >= 2);
        for a in &found {
            for b in &found {
                let r = real_suborder(&a.sum(b).ring_closure());
                assert!(!(real3.index_rank2(&r).unwrap() % 3u32).is_zero() || real3 == r);
            }
        }
    }

    /// Number of ideals of O₊/ℓ: 4, 3 or 2 as ℓ splits, ramifies or is inert.
    fn ideal_count_oracle(real: &OrderLattice, ell: u64) -> u64 {
        let ctx = &real.ctx;
        let e = real.elems();
        let t = |a: &QVec, b: &QVec| ctx.trace(&ctx.mul(a, b)) / rat(2);
        let d = (t(&e[0], &e[0]) * t(&e[1], &e[1]) - t(&e[0], &e[1]) * t(&e[0], &e[1])).to_integer();
        let dm = d.mod_floor(&BigInt::from(ell)).to_u64().unwrap();
        match crate::ff::legendre(dm, ell) {
            0 => 3,
            1 => 4,
            _ => 2,
        }
    }

    /// Number of σ-stable subspaces of V₊^{n₊} ⊕ V₋^{n₋}.
    fn stable_subspace_oracle(o: &OrderLattice, ell: u64) -> u64 {
        let (lo, basis) = stable_window(o, ell);
        // ℓ odd, so (1 + σ) projects onto V₊
        let plus = lo.with(&basis.iter().map(|x| o.ctx.add(x, &o.ctx.conjugate(x))).collect::<Vec<_>>());
        let mut idx = lo.index_in(&plus).unwrap();
        let mut n_plus = 0;
        while idx > BigInt::one() {
            idx /= ell;
            n_plus += 1;
        }
        let count = |n: usize| subspaces(n, ell).len() as u64;
        count(n_plus) * count(basis.len() - n_plus)
    }

    #[test]
    fn stable_counts_match_oracles() {
        for f in [FrobPoly::new(0, 10, 11, 1), FrobPoly::new(3, 7, 13, 1), FrobPoly::new(-2, 5, 7, 1)] {
            let ctx = AlgebraCtx::new(&f).unwrap();
            let ok = maximal_order(&ctx);
            for ell in [3u64, 5, 7] {
                let c = count_stable_orders(&ok, ell).unwrap();
                assert_eq!(c.quotient_dim, 2);
                assert_eq!(c.stable_submodules, stable_subspace_oracle(&ok, ell), "{f:?} ell={ell}");
                assert_eq!(c.orders, ideal_count_oracle(&real_suborder(&ok), ell), "{f:?} ell={ell}");
            }
        }
        assert!(count_stable_orders(&maximal_order(&golden()), 2).is_err());
    }

    #[test]
    fn quaternion_unit_cases() {
        let h = QuatCtx::new(-1, -11);
        let one = h.scalar(&Rat::one());
        let zero = h.scalar(&Rat::zero());
        let (lhs, s) = quat_adjugate_identity(&h, &one, &zero, &zero, &one);
        assert_eq!(s, Rat::one());
        assert_eq!(lhs, [[one.clone(), zero.clone()], [zero.clone(), one.clone()]]);
        let (lhs, s) = quat_adjugate_identity(&h, &one, &one, &one, &one);
        assert!(s.is_zero());
        assert_eq!(lhs, [[zero.clone(), zero.clone()], [zero.clone(), zero]]);
    }

    proptest::proptest! {
        #[test]
        fn quaternion_identity_property(
            a in -7i64..-1, b in -13i64..-1,
            v in proptest::collection::vec(-30i64..30, 16),
            d in proptest::collection::vec(1i64..5, 16),
        ) {
            let h = QuatCtx::new(a, b);
            let q = |k: usize| -> QuatElem { std::array::from_fn(|i| Rat::new(BigInt::from(v[4 * k + i]), BigInt::from(d[4 * k + i]))) };
            proptest::prop_assert!(quat_identity_holds(&h, &q(0), &q(1), &q(2), &q(3)));
        }
    }
}
