//! Endomorphism rings of simple Jacobians: traces on torsion, divisibility
//! tests, saturation of subrings and the ascent through overorders.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::curves::{torsion_degree, Genus2Curve, TorsionBasis};
use crate::invariants::FrobPoly;
use crate::linalg::{self, Mat4};
use crate::orders::{self, AlgebraCtx, OrderLattice, QVec};
use crate::{Error, Limits, Result};

type Rat = BigRational;

/// g(π)/m, an element of K = Q(π).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoElement {
    pub g: [BigInt; 4],
    pub m: BigInt,
}

impl EndoElement {
    pub fn new(g: [BigInt; 4], m: BigInt) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::InvalidInput("denominator must be positive".into()));
        }
        let mut c = m.clone();
        for x in &g {
            c = c.gcd(x);
        }
        Ok(EndoElement { g: g.map(|x| x / &c), m: m / c })
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        EndoElement { g: [n.into(), BigInt::zero(), BigInt::zero(), BigInt::zero()], m: BigInt::one() }
    }

    pub fn pi() -> Self {
        EndoElement { g: [BigInt::zero(), BigInt::one(), BigInt::zero(), BigInt::zero()], m: BigInt::one() }
    }

    pub fn from_qvec(x: &QVec) -> Self {
        let mut m = BigInt::one();
        for xi in x {
            m = m.lcm(xi.denom());
        }
        let g = std::array::from_fn(|i| (&x[i] * Rat::from_integer(m.clone())).to_integer());
        EndoElement { g, m }
    }

    pub fn to_qvec(&self) -> QVec {
        std::array::from_fn(|i| Rat::new(self.g[i].clone(), self.m.clone()))
    }

    /// The Rosati dual, complex conjugation on K.
    pub fn dagger(&self, ctx: &AlgebraCtx) -> Self {
        Self::from_qvec(&ctx.conjugate(&self.to_qvec()))
    }
}

/// An element with its dual and a bound on tr(φ∘φ†).
#[derive(Clone, Debug)]
pub struct GoodRep {
    pub elem: EndoElement,
    pub dagger: EndoElement,
    pub bound: BigInt,
}

impl GoodRep {
    /// Bound from |π| = √q at every complex embedding:
    /// tr(φφ†) ≤ 4 Σ |g_i g_j| q^{(i+j)/2} / m².
    pub fn new(elem: EndoElement, ctx: &AlgebraCtx) -> Self {
        let q = &ctx.frob.q;
        let half_power = |k: u32| -> BigInt {
            let qk = q.pow(k);
            let r = qk.sqrt();
            if &r * &r == qk {
                r
            } else {
                r + 1
            }
        };
        let mut sum = BigInt::zero();
        for i in 0..4 {
            for j in 0..4 {
                sum += (&elem.g[i] * &elem.g[j]).abs() * half_power((i + j) as u32);
            }
        }
        let bound = (BigInt::from(4) * sum).div_ceil(&(&elem.m * &elem.m));
        let dagger = elem.dagger(ctx);
        GoodRep { elem, dagger, bound }
    }
}

/// Symmetric integer matrix (⟨α_i, α_j⟩).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix(pub Vec<Vec<BigInt>>);

impl GramMatrix {
    pub fn det(&self) -> BigInt {
        let rows: Vec<Vec<Rat>> =
            self.0.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
        rat_det(rows).to_integer()
    }

    /// All leading principal minors are positive.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.0.len()).all(|k| {
            let sub = GramMatrix(self.0[..k].iter().map(|r| r[..k].to_vec()).collect());
            sub.det().is_positive()
        })
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.0.len();
        (0..n).all(|i| (0..n).all(|j| self.0[i][j] == self.0[j][i]))
    }
}

fn rat_det(mut a: Vec<Vec<Rat>>) -> Rat {
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

/// Matrix of g(π)/m on a torsion basis, for m prime to ℓ.
pub fn act_on_torsion(alpha: &EndoElement, b: &TorsionBasis) -> Result<Mat4> {
    let m = b.modulus;
    let inv = crate::ff::inv_mod(linalg::reduce_big(&alpha.m, m), m)
        .ok_or_else(|| Error::InvalidInput(format!("denominator {} is not prime to ℓ = {}", alpha.m, b.ell)))?;
    Ok(linalg::mat_scale(&linalg::eval_poly(&alpha.g, &b.frob, m), inv, m))
}

/// How ⟨α, β⟩ = tr(α∘β†) is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceSource {
    /// CRT over traces of matrices on J[ℓ^e].
    Torsion,
    /// The trace form of K, exact for elements of K.
    Field,
}

#[derive(Clone, Debug)]
pub struct AscendResult {
    /// Largest order shown to lie in End(A).
    pub order: OrderLattice,
    /// Smallest order shown to contain End(A).
    pub upper: OrderLattice,
    /// Primes at which the ascent could not decide.
    pub undetermined: Vec<u64>,
    /// Every candidate overorder tested, in order.
    pub tests: Vec<OrderTest>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderTest {
    pub ell: u64,
    /// Index of the candidate in O_K.
    pub index: BigInt,
    /// None when the test ran out of capacity.
    pub passed: Option<bool>,
}

impl AscendResult {
    pub fn is_exact(&self) -> bool {
        self.undetermined.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub basis: Vec<EndoElement>,
    pub lattice: OrderLattice,
    pub gram: GramMatrix,
    /// Primes with ℓ² | det G that could not be tested (ℓ = p).
    pub skipped: Vec<u64>,
}

/// Torsion data of one Jacobian with simple, commutative endomorphism algebra.
pub struct EndoContext {
    pub curve: Genus2Curve,
    pub frob: FrobPoly,
    pub alg: Arc<AlgebraCtx>,
    pub zpi: OrderLattice,
    pub ok: OrderLattice,
    pub limits: Limits,
    pub seed: u64,
    /// Basis of Z[π, π̄] as g_i(π)/m_i.
    zpi_fracs: Vec<EndoElement>,
    frobs: RefCell<BTreeMap<u64, (u32, Mat4)>>,
}

impl EndoContext {
    pub fn new(curve: &Genus2Curve, frob: &FrobPoly, limits: &Limits, seed: u64) -> Result<Self> {
        let alg = AlgebraCtx::new(frob)?;
        let zpi = orders::zpi_order(&alg);
        let ok = orders::maximal_order(&alg);
        let zpi_fracs = zpi.elems().iter().map(EndoElement::from_qvec).collect();
        Ok(EndoContext {
            curve: curve.clone(),
            frob: frob.clone(),
            alg,
            zpi,
            ok,
            limits: limits.clone(),
            seed,
            zpi_fracs,
            frobs: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn p(&self) -> u64 {
        self.frob.p
    }

    /// Frobenius on J[ℓ^e], reduced from a cached higher level when present.
    pub fn frob_matrix(&self, ell: u64, e: u32) -> Result<Mat4> {
        let m = ell.pow(e);
        if let Some((have, mat)) = self.frobs.borrow().get(&ell) {
            if *have >= e {
                return Ok(mat.map(|r| r.map(|x| x % m)));
            }
        }
        let tb = TorsionBasis::new(&self.curve, &self.frob, ell, e, self.seed, &self.limits)?;
        self.frobs.borrow_mut().insert(ell, (e, tb.frob));
        Ok(tb.frob)
    }

    /// Coordinates of x in the Z[π, π̄] basis.
    fn zpi_coords(&self, x: &QVec) -> Vec<Rat> {
        let rows: Vec<QVec> = self.zpi.elems();
        let mut out = Vec::with_capacity(4);
        let mut v: Vec<Rat> = x.to_vec();
        let mut col = 0;
        for (r, row) in rows.iter().enumerate() {
            while self.zpi.basis[r][col].is_zero() {
                col += 1;
            }
            let c = &v[col] / &row[col];
            for j in 0..4 {
                v[j] -= &c * &row[j];
            }
            out.push(c);
            col += 1;
        }
        out
    }

    /// Matrix of x on J[ℓ^e], when x is ℓ-integral over Z[π, π̄].
    pub fn act(&self, x: &EndoElement, ell: u64, e: u32) -> Result<Mat4> {
        let c = self.zpi_coords(&x.to_qvec());
        let m = ell.pow(e);
        let lb = BigInt::from(ell);
        if c.iter().any(|ci| ci.denom().is_multiple_of(&lb)) {
            return Err(Error::InvalidInput(format!("element is not integral at {ell} over Z[π, π̄]")));
        }
        let frob = self.frob_matrix(ell, e)?;
        let mut acc = [[0u64; 4]; 4];
        for (ci, z) in c.iter().zip(&self.zpi_fracs) {
            if ci.is_zero() {
                continue;
            }
            let zi = linalg::mat_scale(
                &linalg::eval_poly(&z.g, &frob, m),
                crate::ff::inv_mod(linalg::reduce_big(&z.m, m), m).expect("p is prime to ℓ"),
                m,
            );
            let num = linalg::reduce_big(ci.numer(), m);
            let den = crate::ff::inv_mod(linalg::reduce_big(ci.denom(), m), m).unwrap();
            acc = linalg::mat_add(&acc, &linalg::mat_scale(&zi, num * den % m, m), m);
        }
        Ok(acc)
    }

    /// x ∈ End(A) ⊗ Z_(ℓ): the numerator over Z[π, π̄] kills J[ℓ^v].
    pub fn integral_at(&self, x: &EndoElement, ell: u64) -> Result<bool> {
        let c = self.zpi_coords(&x.to_qvec());
        let mut den = BigInt::one();
        for ci in &c {
            den = den.lcm(ci.denom());
        }
        let v = crate::invariants::valuation(&den, ell).unwrap_or(0);
        if v == 0 {
            return Ok(true);
        }
        if ell == self.p() {
            return Err(Error::Unsupported("divisibility by the characteristic".into()));
        }
        let num = self.zpi_numerator(&c, &den);
        let frob = self.frob_matrix(ell, v)?;
        let m = ell.pow(v);
        let mut acc = [[0u64; 4]; 4];
        for (ni, z) in num.iter().zip(&self.zpi_fracs) {
            let zi = linalg::mat_scale(
                &linalg::eval_poly(&z.g, &frob, m),
                crate::ff::inv_mod(linalg::reduce_big(&z.m, m), m).expect("p is prime to ℓ"),
                m,
            );
            acc = linalg::mat_add(&acc, &linalg::mat_scale(&zi, linalg::reduce_big(ni, m), m), m);
        }
        Ok(linalg::is_zero(&acc))
    }

    fn zpi_numerator(&self, c: &[Rat], den: &BigInt) -> Vec<BigInt> {
        c.iter().map(|ci| (ci * Rat::from_integer(den.clone())).to_integer()).collect()
    }

    /// α ∈ End(A), tested one prime of the denominator at a time.
    pub fn el_divisibility_test(&self, x: &EndoElement) -> Result<bool> {
        if !self.alg.is_integral(&x.to_qvec()) {
            return Ok(false);
        }
        let c = self.zpi_coords(&x.to_qvec());
        let mut den = BigInt::one();
        for ci in &c {
            den = den.lcm(ci.denom());
        }
        for ell in orders::prime_factors(&den) {
            if !self.integral_at(x, ell)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn order_in_end(&self, o: &OrderLattice) -> Result<bool> {
        for x in o.elems() {
            if !self.el_divisibility_test(&EndoElement::from_qvec(&x))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Greedy ascent from Z[π, π̄] through minimal overorders inside End(A).
    pub fn ascend(&self) -> Result<AscendResult> {
        let mut cur = self.zpi.clone();
        let mut undetermined: Vec<u64> = Vec::new();
        let mut tests = Vec::new();
        'outer: loop {
            let idx = cur.index_in(&self.ok)?;
            for ell in orders::prime_factors(&idx) {
                if undetermined.contains(&ell) {
                    continue;
                }
                let mins = match orders::minimal_overorders(&cur, &self.ok, ell, &self.limits) {
                    Ok(m) => m,
                    Err(Error::Capacity(_)) => {
                        undetermined.push(ell);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                for r in mins {
                    let index = r.index_in(&self.ok)?;
                    match self.order_in_end(&r) {
                        Ok(true) => {
                            tests.push(OrderTest { ell, index, passed: Some(true) });
                            cur = r;
                            continue 'outer;
                        }
                        Ok(false) => tests.push(OrderTest { ell, index, passed: Some(false) }),
                        Err(Error::Capacity(_)) | Err(Error::Unsupported(_)) => {
                            tests.push(OrderTest { ell, index, passed: None });
                            undetermined.push(ell);
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            break;
        }
        undetermined.sort_unstable();
        undetermined.dedup();
        // End(A) agrees with cur away from the undetermined primes
        let idx = cur.index_in(&self.ok)?;
        let mut away = idx.clone();
        for &ell in &undetermined {
            let lb = BigInt::from(ell);
            while away.is_multiple_of(&lb) {
                away /= &lb;
            }
        }
        let upper = cur.sum(&self.ok.scale(&Rat::from_integer(away)));
        Ok(AscendResult { order: cur, upper, undetermined, tests })
    }

    /// Prime powers ℓ^e whose torsion is within capacity, cheapest first,
    /// until their product exceeds `need`. A level costs (field degree)²·ℓ^{3e}.
    fn crt_moduli(&self, need: &BigInt, exclude: &[u64]) -> Result<Vec<(u64, u32)>> {
        let mut cands: Vec<(BigUint, u64, u32)> = Vec::new();
        let n = self.curve.k.degree();
        for ell in 2..=self.limits.max_ell {
            if !crate::ff::is_prime(ell) || ell == self.p() || exclude.contains(&ell) {
                continue;
            }
            let mut e = 1u32;
            while ell.checked_pow(e).is_some_and(|m| (m as u128).pow(3) <= self.limits.max_enum as u128) {
                let d = torsion_degree(&self.curve, &self.frob, ell, e)?;
                match d.to_usize() {
                    Some(k)
                        if k * n <= self.limits.max_ext_degree
                            && self.curve.k.bits() * k as u64 <= self.limits.max_field_bits =>
                    {
                        cands.push((&d * &d * BigUint::from(ell.pow(e)).pow(3), ell, e))
                    }
                    _ => break,
                }
                e += 1;
            }
        }
        cands.sort();
        let mut chosen: BTreeMap<u64, u32> = BTreeMap::new();
        let product = |c: &BTreeMap<u64, u32>| c.iter().map(|(&l, &e)| BigInt::from(l).pow(e)).product::<BigInt>();
        for (_, ell, e) in cands {
            if product(&chosen) > *need {
                break;
            }
            let slot = chosen.entry(ell).or_insert(0);
            *slot = (*slot).max(e);
        }
        if product(&chosen) <= *need {
            return Err(Error::Capacity(format!("torsion moduli within capacity do not exceed {need}")));
        }
        Ok(chosen.into_iter().collect())
    }

    /// ⟨α, β⟩ = tr(α∘β†) from traces on torsion, by CRT.
    pub fn trace_pairing(&self, a: &GoodRep, b: &GoodRep) -> Result<BigInt> {
        let bound = (&a.bound * &b.bound).sqrt() + 1;
        let need = BigInt::from(2) * &bound;
        let dens: Vec<u64> = [&a.elem, &b.dagger]
            .iter()
            .flat_map(|x| {
                let c = self.zpi_coords(&x.to_qvec());
                c.iter().flat_map(|ci| orders::prime_factors(ci.denom())).collect::<Vec<_>>()
            })
            .collect();
        let moduli = self.crt_moduli(&need, &dens)?;
        let mut r = BigInt::zero();
        let mut modulus = BigInt::one();
        for (ell, e) in moduli {
            let m = ell.pow(e);
            let prod = linalg::mat_mul(&self.act(&a.elem, ell, e)?, &self.act(&b.dagger, ell, e)?, m);
            let t = BigInt::from(linalg::trace(&prod, m));
            let mb = BigInt::from(m);
            // r ≡ old mod modulus, r ≡ t mod m
            let ext = modulus.extended_gcd(&mb);
            let k = ((&t - &r) * ext.x).mod_floor(&mb);
            r += &modulus * k;
            modulus *= &mb;
            r = r.mod_floor(&modulus);
        }
        if &r * 2 > modulus {
            r -= &modulus;
        }
        Ok(r)
    }

    /// ⟨α, β⟩ from the trace form of K.
    pub fn field_pairing(&self, a: &EndoElement, b: &EndoElement) -> BigInt {
        let t = self.alg.trace(&self.alg.mul(&a.to_qvec(), &self.alg.conjugate(&b.to_qvec())));
        debug_assert!(t.is_integer());
        t.to_integer()
    }

    pub fn gram(&self, reps: &[GoodRep], source: TraceSource) -> Result<GramMatrix> {
        let n = reps.len();
        let mut g = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = match source {
                    TraceSource::Torsion => self.trace_pairing(&reps[i], &reps[j])?,
                    TraceSource::Field => self.field_pairing(&reps[i].elem, &reps[j].elem),
                };
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        Ok(GramMatrix(g))
    }

    /// A basis of span_Q(reps) ∩ End(A), by dividing elements that kill A[ℓ]
    /// for every ℓ with ℓ² | det G.
    pub fn augment_subring(&self, reps: &[GoodRep], source: TraceSource) -> Result<Saturation> {
        let mut lat = OrderLattice::from_gens(&self.alg, &reps.iter().map(|r| r.elem.to_qvec()).collect::<Vec<_>>());
        let mut skipped = Vec::new();
        'outer: loop {
            let basis: Vec<GoodRep> =
                lat.elems().iter().map(|x| GoodRep::new(EndoElement::from_qvec(x), &self.alg)).collect();
            let gram = self.gram(&basis, source)?;
            let det = gram.det();
            if det.is_zero() {
                return Err(Error::Degenerate("Gram matrix is singular".into()));
            }
            for ell in orders::square_divisors(&det) {
                if ell == self.p() {
                    if !skipped.contains(&ell) {
                        skipped.push(ell);
                    }
                    continue;
                }
                if lat.rank() == 4 && !lat.index_in(&self.ok)?.is_multiple_of(&BigInt::from(ell)) {
                    continue;
                }
                let n = lat.rank();
                if (ell as u128).pow(n as u32) > self.limits.max_enum as u128 {
                    return Err(Error::Capacity(format!("{ell}^{n} representatives of S/ℓS")));
                }
                let e = lat.elems();
                let inv_l = Rat::new(BigInt::one(), BigInt::from(ell));
                for v in projective_points(n, ell) {
                    let mut beta = self.alg.scale(&self.alg.one(), &Rat::zero());
                    for (x, &c) in e.iter().zip(&v) {
                        beta = self.alg.add(&beta, &self.alg.scale(x, &Rat::from_integer(c.into())));
                    }
                    let cand = self.alg.scale(&beta, &inv_l);
                    if self.alg.is_integral(&cand) && self.integral_at(&EndoElement::from_qvec(&cand), ell)? {
                        lat = lat.with(&[cand]);
                        continue 'outer;
                    }
                }
            }
            let basis_elems = lat.elems().iter().map(EndoElement::from_qvec).collect();
            return Ok(Saturation { basis: basis_elems, lattice: lat, gram, skipped });
        }
    }
}

fn projective_points(d: usize, ell: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..d {
        for mut idx in 0..ell.pow((d - lead - 1) as u32) {
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

/// Λ_B + Λ_C for pullback lattices along isogenies of coprime degree,
/// given as rational coordinate rows of one common ambient space.
pub fn combine_coprime(lb: &[Vec<Rat>], lc: &[Vec<Rat>], deg_phi: &BigInt, deg_psi: &BigInt) -> Result<Vec<Vec<Rat>>> {
    if !deg_phi.gcd(deg_psi).is_one() {
        return Err(Error::InvalidInput("isogeny degrees are not coprime".into()));
    }
    let rows: Vec<&Vec<Rat>> = lb.iter().chain(lc).collect();
    let Some(width) = rows.first().map(|r| r.len()) else { return Ok(Vec::new()) };
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::InvalidInput("mixed ambient dimensions".into()));
    }
    let mut den = BigInt::one();
    for r in &rows {
        for x in r.iter() {
            den = den.lcm(x.denom());
        }
    }
    let ints: Vec<Vec<BigInt>> =
        rows.iter().map(|r| r.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect()).collect();
    Ok(orders::hnf(&ints).into_iter().map(|r| r.into_iter().map(|x| Rat::new(x, den.clone())).collect()).collect())
}
