//! Frobenius characteristic polynomials, p-rank, a-number and the
//! simple/ordinary classification of Jacobian surfaces.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curves::{Genus2Curve, Jacobian};
use crate::ff::{FieldCtx, FqElem, Poly};
use crate::{Error, Limits, Result};

/// f_A(t) = t⁴ + a1·t³ + a2·t² + q·a1·t + q², q = p^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrobPoly {
    pub a1: BigInt,
    pub a2: BigInt,
    pub q: BigInt,
    pub p: u64,
    pub n: u32,
}

pub fn is_square_int(x: &BigInt) -> bool {
    if x.is_negative() {
        return false;
    }
    let r = x.sqrt();
    &r * &r == *x
}

pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while (&y % &p).is_zero() {
        y /= &p;
        v += 1;
    }
    Some(v)
}

impl FrobPoly {
    pub fn new(a1: impl Into<BigInt>, a2: impl Into<BigInt>, p: u64, n: u32) -> Self {
        FrobPoly { a1: a1.into(), a2: a2.into(), q: BigInt::from(p).pow(n), p, n }
    }

    /// Coefficients, constant term first.
    pub fn coeffs(&self) -> [BigInt; 5] {
        [&self.q * &self.q, &self.q * &self.a1, self.a2.clone(), self.a1.clone(), BigInt::one()]
    }

    /// The four non-leading coefficients.
    pub fn lower(&self) -> [BigInt; 4] {
        let c = self.coeffs();
        [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs().iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    /// f_A(1) = #J(F_q).
    pub fn group_order(&self) -> BigInt {
        self.eval(&BigInt::one())
    }

    /// (Δ, δ) = (a1² − 4a2 + 8q, (a2 + 2q)² − 4q·a1²).
    pub fn delta_invariants(&self) -> (BigInt, BigInt) {
        let (a1, a2, q) = (&self.a1, &self.a2, &self.q);
        let big_delta = a1 * a1 - 4 * a2 + 8 * q;
        let s = a2 + 2 * q;
        let small_delta = &s * &s - 4 * q * a1 * a1;
        (big_delta, small_delta)
    }

    /// t⁴·f(q/t) = q²·f(t), checked coefficientwise.
    pub fn functional_equation_holds(&self) -> bool {
        let c = self.coeffs();
        let q2 = &self.q * &self.q;
        (0..5).all(|i| {
            // coefficient of t^i on the left is c_{4−i}·q^{4−i}
            let lhs = &c[4 - i] * self.q.pow((4 - i) as u32);
            lhs == &q2 * &c[i]
        })
    }

    /// All complex roots have absolute value √q. With s = t + q/t the
    /// quartic becomes s² + a1·s + a2 − 2q, whose roots must be real and
    /// lie in [−2√q, 2√q].
    pub fn is_weil(&self) -> bool {
        let (dd, d) = self.delta_invariants();
        let a1sq = &self.a1 * &self.a1;
        !dd.is_negative()
            && !d.is_negative()
            && !(&self.a2 + BigInt::from(2) * &self.q).is_negative()
            && a1sq <= BigInt::from(16) * &self.q
    }

    pub fn companion(&self, m: u64) -> crate::linalg::Mat4 {
        crate::linalg::companion(&self.lower(), m)
    }

    /// Characteristic polynomial of π^k, from the k-th power of the companion
    /// matrix over Z.
    pub fn base_change(&self, k: u32) -> FrobPoly {
        if k == 1 {
            return self.clone();
        }
        let c = self.lower();
        let mut comp = [
            [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            Default::default(),
            Default::default(),
            Default::default(),
        ];
        for (i, row) in comp.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = if j == 3 {
                    -c[i].clone()
                } else if i == j + 1 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                };
            }
        }
        let pw = int_mat_pow(&comp, k);
        let cp = int_char_poly(&pw);
        let out = FrobPoly { a1: cp[3].clone(), a2: cp[2].clone(), q: self.q.pow(k), p: self.p, n: self.n * k };
        debug_assert_eq!(cp[1], &out.q * &out.a1);
        debug_assert_eq!(cp[0], &out.q * &out.q);
        out
    }

    /// True iff f_A is irreducible over Q.
    pub fn is_irreducible(&self) -> bool {
        let (dd, _) = self.delta_invariants();
        !(is_square_int(&dd) || (self.a1.is_zero() && self.a2 == -BigInt::from(2) * &self.q))
    }

    /// Traces (β1, β2) with f_A = (t² − β1 t + q)(t² − β2 t + q), if any.
    pub fn quadratic_split(&self) -> Option<(BigInt, BigInt)> {
        let (dd, _) = self.delta_invariants();
        if !is_square_int(&dd) {
            return None;
        }
        let r: BigInt = dd.sqrt();
        let two = BigInt::from(2);
        // x, z roots of X² − a1 X + (a2 − 2q); β = −x
        let x: BigInt = (&self.a1 + &r) / &two;
        let z: BigInt = (&self.a1 - &r) / &two;
        Some((-x, -z))
    }

    /// Isogenous over F_q to a product of two elliptic curves.
    pub fn splits_into_elliptic(&self) -> bool {
        match self.quadratic_split() {
            Some((b1, b2)) => is_elliptic_trace(&b1, self.p, self.n) && is_elliptic_trace(&b2, self.p, self.n),
            None => false,
        }
    }

    pub fn charpoly_strings(&self) -> Vec<String> {
        self.coeffs().iter().map(|c| c.to_string()).collect()
    }
}

/// t² − β·t + p^n is the Frobenius polynomial of an elliptic curve.
pub fn is_elliptic_trace(beta: &BigInt, p: u64, n: u32) -> bool {
    let q = BigInt::from(p).pow(n);
    if beta * beta > BigInt::from(4) * &q {
        return false;
    }
    let pb = BigInt::from(p);
    if !(beta % &pb).is_zero() {
        return true;
    }
    let b2 = beta * beta;
    if n % 2 == 0 {
        if b2 == BigInt::from(4) * &q {
            return true;
        }
        if b2 == q && p % 3 != 1 {
            return true;
        }
        if beta.is_zero() && p % 4 != 1 {
            return true;
        }
    } else {
        if (p == 2 || p == 3) && b2 == &pb * &q {
            return true;
        }
        if beta.is_zero() {
            return true;
        }
    }
    false
}

type IntMat = [[BigInt; 4]; 4];

fn int_mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let mut r: IntMat = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = BigInt::zero();
            for k in 0..4 {
                s += &a[i][k] * &b[k][j];
            }
            r[i][j] = s;
        }
    }
    r
}

fn int_mat_pow(a: &IntMat, mut e: u32) -> IntMat {
    let mut r: IntMat = Default::default();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            r = int_mat_mul(&r, &b);
        }
        e >>= 1;
        if e > 0 {
            b = int_mat_mul(&b, &b);
        }
    }
    r
}

/// Faddeev–LeVerrier over Z; constant term first.
fn int_char_poly(a: &IntMat) -> [BigInt; 5] {
    let mut c: [BigInt; 5] = Default::default();
    c[4] = BigInt::one();
    let mut m: IntMat = Default::default();
    for k in 1..=4usize {
        // M_k = A·M_{k−1} + c_{5−k}·I, starting from M_0 = 0, c_4 = 1
        let mut next = int_mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate().take(4) {
            row[i] += &c[5 - k];
        }
        m = next;
        let am = int_mat_mul(a, &m);
        let tr: BigInt = (0..4).map(|i| am[i][i].clone()).sum();
        c[4 - k] = -tr / BigInt::from(k);
    }
    c
}

/// p-rank from (a1, a2, Δ, δ). When Δ is a square f_A is a product of two
/// quadratics and the slopes of the Newton polygon decide.
pub fn p_rank(f: &FrobPoly) -> u8 {
    let p = BigInt::from(f.p);
    let (dd, d) = f.delta_invariants();
    if is_square_int(&dd) {
        return newton_p_rank(f);
    }
    if !(&f.a2 % &p).is_zero() {
        return 2;
    }
    let v2_ok = match valuation(&f.a2, f.p) {
        None => true,
        Some(v) => 2 * v >= f.n,
    };
    if !(&f.a1 % &p).is_zero() && v2_ok && !is_padic_square(&d, f.p) {
        return 1;
    }
    0
}

/// Number of slope-0 segments of the p-adic Newton polygon of f_A.
pub fn newton_p_rank(f: &FrobPoly) -> u8 {
    let p = BigInt::from(f.p);
    if !(&f.a2 % &p).is_zero() {
        2
    } else if !(&f.a1 % &p).is_zero() {
        1
    } else {
        0
    }
}

/// Square in Z_p for odd p: even valuation and residue unit part.
pub fn is_padic_square(x: &BigInt, p: u64) -> bool {
    let Some(v) = valuation(x, p) else { return true };
    if v % 2 == 1 {
        return false;
    }
    let pb = BigInt::from(p);
    let u = x / pb.pow(v);
    let r = u.mod_floor(&pb).to_u64().unwrap();
    crate::ff::legendre(r, p) == 1
}

/// Hasse–Witt data of y² = f(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierManin {
    /// M[i][j] = c_{(i+1)p − (j+1)} for the coefficients c of f^{(p−1)/2}.
    pub matrix: [[FqElem; 2]; 2],
    pub rank: u8,
    pub a_number: u8,
    pub p_rank: u8,
}

/// Coefficients c_{p−1}, c_{p−2}, c_{2p−1}, c_{2p−2} of f^{(p−1)/2} over F_p,
/// from the recurrence f·g′ = m·f′·g run modulo p² up to index p − 1.
fn hasse_witt_coeffs_prime(f: &Poly, p: u64) -> [[u64; 2]; 2] {
    let m = (p - 1) / 2;
    let mut fc: Vec<u64> = f.to_u64s();
    let mut shift = 0usize;
    while fc[0] == 0 {
        fc.remove(0);
        shift += 1;
    }
    let p2 = (p as u128) * (p as u128);
    let d = fc.len() - 1;
    let top = 2 * p as usize;
    let total_shift = shift * m as usize;
    let mut g: Vec<u128> = vec![0; top + 1];
    if total_shift <= top {
        let need = top - total_shift;
        g[0] = crate::ff::pow_mod(fc[0], m, p) as u128;
        // g[0] must be known mod p²: lift via (f0)^m mod p²
        let mut acc: u128 = 1;
        for _ in 0..m {
            acc = acc * fc[0] as u128 % p2;
        }
        g[0] = acc;
        let f0inv_p2 = inv_mod_u128(fc[0] as u128, p2);
        for k in 0..need {
            // f0 (k+1) g_{k+1} = −Σ_{i≥1} f_i (k+1 − i − m i) g_{k+1−i}
            let kk = k + 1;
            let modulus = if kk <= p as usize { p2 } else { p as u128 };
            let mut s: u128 = 0;
            for i in 1..=d.min(kk) {
                let coef = (kk as i128 - i as i128 - (m as i128) * i as i128).rem_euclid(modulus as i128) as u128;
                s = (s + fc[i] as u128 % modulus * coef % modulus * (g[kk - i] % modulus)) % modulus;
            }
            let rhs = (modulus - s) % modulus;
            g[kk] = if kk < p as usize {
                rhs * inv_mod_u128(kk as u128, p2) % p2 * f0inv_p2 % p2
            } else if kk == p as usize {
                // p·f0·g_p ≡ rhs (mod p²)
                debug_assert_eq!(rhs % p as u128, 0);
                (rhs / p as u128) * inv_mod_u128(fc[0] as u128 % p as u128, p as u128) % p as u128
            } else {
                rhs * inv_mod_u128((kk as u128 * fc[0] as u128) % p as u128, p as u128) % p as u128
            };
        }
    }
    let coeff = |idx: usize| -> u64 {
        if idx < total_shift || idx - total_shift > top {
            0
        } else {
            (g[idx - total_shift] % p as u128) as u64
        }
    };
    let pu = p as usize;
    [[coeff(pu - 1), coeff(pu - 2)], [coeff(2 * pu - 1), coeff(2 * pu - 2)]]
}

fn inv_mod_u128(a: u128, m: u128) -> u128 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(m as i128) as u128
}

fn rank2(m: &[[FqElem; 2]; 2], k: &FieldCtx) -> u8 {
    let det = k.sub(&k.mul(&m[0][0], &m[1][1]), &k.mul(&m[0][1], &m[1][0]));
    if !det.is_zero() {
        2
    } else if m.iter().flatten().any(|x| !x.is_zero()) {
        1
    } else {
        0
    }
}

fn mat2_mul(a: &[[FqElem; 2]; 2], b: &[[FqElem; 2]; 2], k: &FieldCtx) -> [[FqElem; 2]; 2] {
    let e = |i: usize, j: usize| k.add(&k.mul(&a[i][0], &b[0][j]), &k.mul(&a[i][1], &b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn cartier_manin(c: &Genus2Curve) -> CartierManin {
    let k = &c.k;
    let p = k.p();
    let matrix = if k.degree() == 1 {
        let m = hasse_witt_coeffs_prime(&c.f, p);
        [[k.from_u64(m[0][0]), k.from_u64(m[0][1])], [k.from_u64(m[1][0]), k.from_u64(m[1][1])]]
    } else {
        let m = (p - 1) / 2;
        let top = 2 * p as usize;
        let mut g = Poly::one(k);
        let mut base = c.f.clone();
        let mut e = m;
        let trunc = |x: Poly| Poly::from_coeffs(x.c.into_iter().take(top).collect());
        while e > 0 {
            if e & 1 == 1 {
                g = trunc(g.mul(&base, k));
            }
            e >>= 1;
            if e > 0 {
                base = trunc(base.sqr(k));
            }
        }
        let pu = p as usize;
        let cf = |i: usize| g.coeff(i, k);
        [[cf(pu - 1), cf(pu - 2)], [cf(2 * pu - 1), cf(2 * pu - 2)]]
    };
    let rank = rank2(&matrix, k);
    // M·M^(p)·…·M^(p^{n−1}), then its stable rank
    let mut prod = matrix.clone();
    for j in 1..k.degree() {
        let tw = [
            [k.frobenius(&matrix[0][0], j), k.frobenius(&matrix[0][1], j)],
            [k.frobenius(&matrix[1][0], j), k.frobenius(&matrix[1][1], j)],
        ];
        prod = mat2_mul(&prod, &tw, k);
    }
    let p_rank = rank2(&mat2_mul(&prod, &prod, k), k);
    CartierManin { matrix, rank, a_number: 2 - rank, p_rank }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Exhaustive counts over F_q and F_{q²}.
    Naive,
    /// a1 by counting over F_q, a2 from the Hasse–Witt determinant and the
    /// Weil window, confirmed by annihilating random divisors.
    HasseWitt,
    /// Naive when F_{q²} is small, otherwise the Hasse–Witt route.
    Auto,
}

pub fn char_poly(c: &Genus2Curve, mode: CountMode, limits: &Limits) -> Result<FrobPoly> {
    let k = &c.k;
    let (p, n) = (k.p(), k.degree() as u32);
    let q = c.q();
    let use_naive = match mode {
        CountMode::Naive => true,
        CountMode::HasseWitt => false,
        CountMode::Auto => n > 1 || q * q <= 1 << 27,
    };
    let n1 = c.count(1, limits)? as i128;
    let a1 = BigInt::from(n1 - q as i128 - 1);
    let out = if use_naive {
        let n2 = c.count(2, limits)? as i128;
        let s1 = BigInt::from(q as i128 + 1 - n1);
        let s2 = BigInt::from((q * q) as i128 + 1 - n2);
        let a2 = (&s1 * &s1 - s2) / 2;
        FrobPoly::new(a1, a2, p, n)
    } else {
        char_poly_hasse_witt(c, a1)?
    };
    if !out.is_weil() || !out.functional_equation_holds() {
        return Err(Error::Invariant("point counts violate the Weil bounds".into()));
    }
    Ok(out)
}

fn char_poly_hasse_witt(c: &Genus2Curve, a1: BigInt) -> Result<FrobPoly> {
    let k = &c.k;
    if k.degree() != 1 {
        return Err(Error::Unsupported("the Hasse–Witt shortcut needs a prime field".into()));
    }
    let p = k.p();
    let cm = cartier_manin(c);
    let m = &cm.matrix;
    let det = k.sub(&k.mul(&m[0][0], &m[1][1]), &k.mul(&m[0][1], &m[1][0])).0[0];
    let q = BigInt::from(p);
    let pb = BigInt::from(p);
    // Weil window: 2|a1|√q − 2q ≤ a2 ≤ a1²/4 + 2q
    let root: BigInt = (&a1 * &a1 * &q).sqrt();
    let lo: BigInt = BigInt::from(2) * root - BigInt::from(2) * &q - 2;
    let hi: BigInt = (&a1 * &a1) / 4 + BigInt::from(2) * &q + 1;
    let mut cand = Vec::new();
    let mut a2: BigInt = &lo + (BigInt::from(det) - &lo).mod_floor(&pb);
    while a2 <= hi {
        let f = FrobPoly::new(a1.clone(), a2.clone(), p, 1);
        if f.is_weil() {
            cand.push(f);
        }
        a2 += &pb;
    }
    let deg = c.f.factor(k)?.1.iter().map(|(g, _)| g.deg()).min().unwrap_or(1);
    let deg = if c.f.deg() == 5 { 1 } else { deg };
    let jac = Jacobian::with_degree(c, deg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    for _ in 0..16 {
        if cand.len() <= 1 {
            break;
        }
        let d = jac.trace_to_base(&jac.random_divisor(&mut rng));
        cand.retain(|f| {
            let n = f.group_order().to_biguint().unwrap();
            jac.mul(&d, &n).is_zero()
        });
    }
    match cand.len() {
        1 => Ok(cand.pop().unwrap()),
        0 => Err(Error::Invariant("no Weil polynomial matches the Hasse–Witt data".into())),
        _ => Err(Error::Unsupported("random divisors did not isolate a2".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table1Row {
    #[serde(rename = "simple-ordinary")]
    SimpleOrdinary,
    #[serde(rename = "simple-prank1")]
    SimplePrank1,
    #[serde(rename = "nonsimple-prank2")]
    NonsimplePrank2,
    #[serde(rename = "nonsimple-prank1")]
    NonsimplePrank1,
    #[serde(rename = "nonsimple-prank0")]
    NonsimplePrank0,
}

impl Table1Row {
    pub fn label(&self) -> &'static str {
        match self {
            Table1Row::SimpleOrdinary => "simple-ordinary",
            Table1Row::SimplePrank1 => "simple-prank1",
            Table1Row::NonsimplePrank2 => "nonsimple-prank2",
            Table1Row::NonsimplePrank1 => "nonsimple-prank1",
            Table1Row::NonsimplePrank0 => "nonsimple-prank0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub frob: FrobPoly,
    pub p_rank: u8,
    pub p_rank_cartier_manin: u8,
    pub a_number: u8,
    pub simple_over_base: bool,
    pub absolutely_simple: bool,
    /// Smallest k ≤ K_max over which the surface becomes isogenous to a
    /// product of elliptic curves.
    pub split_degree: Option<u32>,
    pub table1_row: Option<Table1Row>,
    /// Simple yet p-rank 0: outside the rows of the table.
    pub manual_review: bool,
    pub big_delta: BigInt,
    pub small_delta: BigInt,
}

pub const K_MAX: u32 = 12;

/// Smallest k ≤ k_max with f_A^{(k)} a product of elliptic Weil quadratics.
pub fn split_degree(f: &FrobPoly, k_max: u32) -> Option<u32> {
    (1..=k_max).find(|&k| f.base_change(k).splits_into_elliptic())
}

/// Rows are keyed on simplicity over F_q, where End(A) is an order in Q(π).
pub fn classify_frob(f: &FrobPoly, cm: &CartierManin) -> ClassificationReport {
    let pr = p_rank(f);
    let split = split_degree(f, K_MAX);
    let simple_over_base = !f.splits_into_elliptic();
    let absolutely_simple = (1..=K_MAX).all(|k| f.base_change(k).is_irreducible());
    let (row, review) = match (simple_over_base, pr) {
        (true, 2) => (Some(Table1Row::SimpleOrdinary), false),
        (true, 1) => (Some(Table1Row::SimplePrank1), false),
        (true, _) => (None, true),
        (false, 2) => (Some(Table1Row::NonsimplePrank2), false),
        (false, 1) => (Some(Table1Row::NonsimplePrank1), false),
        (false, _) => (Some(Table1Row::NonsimplePrank0), false),
    };
    let (dd, d) = f.delta_invariants();
    ClassificationReport {
        frob: f.clone(),
        p_rank: pr,
        p_rank_cartier_manin: cm.p_rank,
        a_number: cm.a_number,
        simple_over_base,
        absolutely_simple,
        split_degree: split,
        table1_row: row,
        manual_review: review,
        big_delta: dd,
        small_delta: d,
    }
}

pub fn classify(c: &Genus2Curve, mode: CountMode, limits: &Limits) -> Result<ClassificationReport> {
    let f = char_poly(c, mode, limits)?;
    Ok(classify_frob(&f, &cartier_manin(c)))
}

fn rat_mod(x: &num_rational::BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb).to_u64()?;
    let d = x.denom().mod_floor(&pb).to_u64()?;
    Some(crate::ff::mul_mod(n, crate::ff::inv_mod(d, p)?, p))
}

/// Decide whether p factors in O_K as 𝔭₁𝔭̄₁𝔭₂^e with πO_K = 𝔭₁ⁿ𝔭₂^{en/2}.
///
/// p is factored through some θ ∈ O_K with p ∤ [O_K : Z[θ]]. Fails with
/// `Unsupported` when no small such θ exists.
pub fn prank1_splitting_check(f: &FrobPoly) -> Result<bool> {
    use crate::orders::{maximal_order, AlgebraCtx};
    let p = f.p;
    let ctx = AlgebraCtx::new(f)?;
    let ok = maximal_order(&ctx);
    let vp_ok = valuation(&ok.discriminant(), p);
    let k = FieldCtx::prime(p)?;
    for idx in 0..5u32.pow(4) {
        let c: Vec<BigInt> = (0..4).map(|i| BigInt::from((idx / 5u32.pow(i) % 5) as i64 - 2)).collect();
        let theta = ok.combine(&c);
        let powers: Vec<_> = (0..4).map(|i| ctx.pow(&theta, i)).collect();
        let z_theta = crate::orders::OrderLattice::from_gens(&ctx, &powers);
        if z_theta.rank() < 4 || valuation(&z_theta.discriminant(), p) != vp_ok {
            continue;
        }
        let cp = ctx.char_poly(&theta);
        let coeffs: Vec<FqElem> = cp.iter().map(|x| k.from_u64(rat_mod(x, p).unwrap())).collect();
        let g = Poly::from_coeffs(coeffs);
        let (_, factors) = g.factor(&k)?;
        let linear: Vec<u64> = factors
            .iter()
            .filter(|(h, e)| h.deg() == 1 && *e == 1)
            .map(|(h, _)| k.neg(&h.coeff(0, &k)).as_prime().unwrap())
            .collect();
        let rest: Vec<(usize, usize)> =
            factors.iter().filter(|(h, e)| !(h.deg() == 1 && *e == 1)).map(|(h, e)| (h.deg(), *e)).collect();
        if linear.len() != 2 || !(rest == [(2, 1)] || rest == [(1, 2)]) {
            return Ok(false);
        }
        let eval = |x: &crate::orders::QVec, r: u64| -> Option<u64> {
            let g = ctx.in_basis_of(&theta, x)?;
            let mut acc = 0u64;
            for gi in g.iter().rev() {
                acc = (crate::ff::mul_mod(acc, r, p) + rat_mod(gi, p)?) % p;
            }
            Some(acc)
        };
        let (r1, r2) = (linear[0], linear[1]);
        let sigma_theta = ctx.conjugate(&theta);
        if eval(&sigma_theta, r1) != Some(r2) || eval(&sigma_theta, r2) != Some(r1) {
            return Ok(false);
        }
        let in1 = eval(&ctx.pi(), r1) == Some(0);
        let in2 = eval(&ctx.pi(), r2) == Some(0);
        return Ok(in1 != in2);
    }
    Err(Error::Unsupported(format!("no θ ∈ O_K with p ∤ [O_K : Z[θ]] found for p = {p}")))
}

/// Exhaustive S_k = #C(F_{q^k}) sanity data used by tests and reports.
pub fn counts_from_frob(f: &FrobPoly, k: u32) -> BigInt {
    let g = f.base_change(k);
    &g.q + 1 + &g.a1
}

pub fn biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("non-negative")
}
