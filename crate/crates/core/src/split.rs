//! Elliptic factors of genus-2 Jacobians: Richelot (2,2)-isogenies, elliptic
//! subcovers, the Iezzi splitting, the V4 family and automorphism groups.

use num_bigint::BigInt;

use crate::curves::{EcPoint, EllipticCurve, Genus2Curve, Jacobian, MumfordDivisor};
use crate::ff::{extension, splitting_ctx, Embedding, FieldCtx, Fq, FqElem, Poly};
use crate::invariants::{cartier_manin, char_poly, p_rank, CountMode, FrobPoly};
use crate::{Error, Limits, Result};

/// A point (X : Z) of the projective line.
type Proj = (FqElem, FqElem);
type Mat2 = [[FqElem; 2]; 2];

/// Branch points of y² = f over l, with (1 : 0) added for a quintic.
fn branch_points(f: &Poly, l: &FieldCtx) -> Vec<Proj> {
    let mut pts: Vec<Proj> = f.root_set(l).into_iter().map(|r| (r, l.one())).collect();
    if f.deg() == 5 {
        pts.push((l.one(), l.zero()));
    }
    pts
}

fn proj_eq(l: &FieldCtx, a: &Proj, b: &Proj) -> bool {
    l.mul(&a.0, &b.1) == l.mul(&a.1, &b.0)
}

fn apply(l: &FieldCtx, m: &Mat2, p: &Proj) -> Proj {
    (l.add(&l.mul(&m[0][0], &p.0), &l.mul(&m[0][1], &p.1)), l.add(&l.mul(&m[1][0], &p.0), &l.mul(&m[1][1], &p.1)))
}

fn mat_mul(l: &FieldCtx, a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| l.add(&l.mul(&a[i][0], &b[0][j]), &l.mul(&a[i][1], &b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn adjugate(l: &FieldCtx, m: &Mat2) -> Mat2 {
    [[m[1][1].clone(), l.neg(&m[0][1])], [l.neg(&m[1][0]), m[0][0].clone()]]
}

/// The fractional-linear map sending p1, p2, p3 to 0, 1, ∞.
fn to_standard(l: &FieldCtx, p: [&Proj; 3]) -> Mat2 {
    // ℓ_i(X, Z) = Z_i·X − X_i·Z vanishes at p_i
    let form = |i: usize, x: &Proj| l.sub(&l.mul(&p[i].1, &x.0), &l.mul(&p[i].0, &x.1));
    let s = form(2, p[1]);
    let t = form(0, p[1]);
    [[l.mul(&s, &p[0].1), l.neg(&l.mul(&s, &p[0].0))], [l.mul(&t, &p[2].1), l.neg(&l.mul(&t, &p[2].0))]]
}

/// Fractional-linear maps sending `src` onto `dst` (as sets), one for each
/// ordered image of the first three points of `src`.
fn set_maps(l: &FieldCtx, src: &[Proj], dst: &[Proj]) -> Vec<Mat2> {
    let mut out = Vec::new();
    if src.len() != dst.len() || src.len() < 3 {
        return out;
    }
    let mz = to_standard(l, [&src[0], &src[1], &src[2]]);
    let n = dst.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let mw = to_standard(l, [&dst[i], &dst[j], &dst[k]]);
                let m = mat_mul(l, &adjugate(l, &mw), &mz);
                if src.iter().all(|x| {
                    let y = apply(l, &m, x);
                    dst.iter().any(|d| proj_eq(l, &y, d))
                }) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// C1 ≅ C2 over the algebraic closure: their branch points are related by a
/// fractional-linear map.
pub fn geometrically_isomorphic(c1: &Genus2Curve, c2: &Genus2Curve) -> Result<bool> {
    if c1.k != c2.k {
        return Err(Error::ContextMismatch);
    }
    let emb = splitting_ctx(&c1.f.mul(&c2.f, &c1.k), &c1.k)?;
    let l = &emb.dst;
    let s1 = branch_points(&emb.map_poly(&c1.f), l);
    let s2 = branch_points(&emb.map_poly(&c2.f), l);
    Ok(!set_maps(l, &s1, &s2).is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AutType {
    C2,
    V4,
    D8,
    D12,
    TwoD12,
    TildeS4,
    C2xC5,
    /// A group order outside the generic families (small characteristic).
    Other(u64),
}

impl AutType {
    pub fn label(&self) -> String {
        match self {
            AutType::C2 => "C2".into(),
            AutType::V4 => "V4".into(),
            AutType::D8 => "D8".into(),
            AutType::D12 => "D12".into(),
            AutType::TwoD12 => "2D12".into(),
            AutType::TildeS4 => "~S4".into(),
            AutType::C2xC5 => "C2xC5".into(),
            AutType::Other(n) => format!("order {n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AutGroup {
    /// #Aut(C) over the algebraic closure, hyperelliptic involution included.
    pub order: u64,
    pub kind: AutType,
}

/// Aut(C) as twice the stabiliser of the branch points in PGL₂.
pub fn aut_group(c: &Genus2Curve) -> Result<AutGroup> {
    let emb = splitting_ctx(&c.f, &c.k)?;
    let pts = branch_points(&emb.map_poly(&c.f), &emb.dst);
    let reduced = set_maps(&emb.dst, &pts, &pts).len() as u64;
    let kind = match reduced {
        1 => AutType::C2,
        2 => AutType::V4,
        4 => AutType::D8,
        5 => AutType::C2xC5,
        6 => AutType::D12,
        12 => AutType::TwoD12,
        24 => AutType::TildeS4,
        n => AutType::Other(2 * n),
    };
    Ok(AutGroup { order: 2 * reduced, kind })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldBound {
    pub n: u64,
    /// Number of maximal isotropic subgroups of A[n]; the codomain of an
    /// (n,n)-isogeny is defined over F_{q^r}.
    pub r: u64,
    pub w: u64,
    /// The isogeny itself is defined over F_{q^s}.
    pub s: u64,
}

/// r = n³ ∏_{ℓ | n} (ℓ+1)(ℓ²+1)/ℓ³ and s = w·r.
pub fn field_bound_with(n: u64, w: u64) -> Result<FieldBound> {
    if n < 2 {
        return Err(Error::InvalidInput("n must be at least 2".into()));
    }
    let overflow = || Error::Capacity(format!("field bound for n = {n} overflows"));
    let mut r: u64 = 1;
    let mut m = n;
    let mut ell = 2;
    while m > 1 {
        if m % ell == 0 {
            let mut e = 0u32;
            while m % ell == 0 {
                m /= ell;
                e += 1;
            }
            let f = ell
                .checked_pow(3 * (e - 1))
                .and_then(|x| x.checked_mul((ell + 1) * (ell * ell + 1)))
                .ok_or_else(overflow)?;
            r = r.checked_mul(f).ok_or_else(overflow)?;
        }
        ell += 1;
    }
    Ok(FieldBound { n, r, w, s: r.checked_mul(w).ok_or_else(overflow)? })
}

pub fn field_bound(n: u64, c: &Genus2Curve) -> Result<FieldBound> {
    field_bound_with(n, aut_group(c)?.order)
}

/// A factorisation f = c·G1·G2·G3 over `emb.dst` into factors of degree ≤ 2,
/// i.e. a maximal isotropic subgroup of J[2].
#[derive(Clone, Debug)]
pub struct QuadraticTriple {
    pub emb: Embedding,
    pub c: FqElem,
    pub g: [Poly; 3],
}

impl QuadraticTriple {
    pub fn field(&self) -> &Fq {
        &self.emb.dst
    }

    pub fn product(&self) -> Poly {
        let l = self.field();
        self.g.iter().fold(Poly::constant(self.c.clone()), |acc, g| acc.mul(g, l))
    }

    /// The triple with every G_i written over F_q, when each one is rational.
    pub fn descend(&self) -> Option<QuadraticTriple> {
        let g = [
            self.emb.preimage_poly(&self.g[0])?,
            self.emb.preimage_poly(&self.g[1])?,
            self.emb.preimage_poly(&self.g[2])?,
        ];
        let c = self.emb.preimage(&self.c)?;
        Some(QuadraticTriple { emb: Embedding::identity(&self.emb.src), c, g })
    }
}

/// The 15 ways of splitting six points into three pairs.
fn pairings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for j in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().copied().filter(|&x| x != items[j]).collect();
        for mut p in pairings(&rest) {
            p.insert(0, (items[0], items[j]));
            out.push(p);
        }
    }
    out
}

/// Z·x − X up to scaling: x − a for a finite point, 1 for ∞.
fn linear_form(p: &Proj, l: &FieldCtx) -> Poly {
    if p.1.is_zero() {
        Poly::one(l)
    } else {
        Poly::linear(l, &l.div(&p.0, &p.1).unwrap())
    }
}

/// All pairings of the branch points; the point at infinity of a quintic
/// pairs into a linear factor.
pub fn isotropic_kernels_2(c: &Genus2Curve) -> Result<Vec<QuadraticTriple>> {
    let emb = splitting_ctx(&c.f, &c.k)?;
    let l = emb.dst.clone();
    let f = emb.map_poly(&c.f);
    let pts = branch_points(&f, &l);
    let lc = f.lc().unwrap().clone();
    let idx: Vec<usize> = (0..pts.len()).collect();
    Ok(pairings(&idx)
        .into_iter()
        .map(|pairs| {
            let g = pairs.iter().map(|&(i, j)| linear_form(&pts[i], &l).mul(&linear_form(&pts[j], &l), &l));
            let g: [Poly; 3] = g.collect::<Vec<_>>().try_into().unwrap();
            QuadraticTriple { emb: emb.clone(), c: lc.clone(), g }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub enum SplitResult {
    /// y² = H1·H2·H3/δ over the kernel field. `dual` is the kernel of the
    /// dual isogeny.
    Codomain { curve: Genus2Curve, dual: QuadraticTriple },
    /// J(C) ~ E1 × E2 over `emb.dst`, through u = (L1/L2)², v = y/L2³ onto E1
    /// and u = (L2/L1)², v = y/L1³ onto E2.
    Split { emb: Embedding, e1: EllipticCurve, e2: EllipticCurve, l1: Poly, l2: Poly },
}

fn quad_coeffs(g: &Poly, l: &FieldCtx) -> [FqElem; 3] {
    [g.coeff(0, l), g.coeff(1, l), g.coeff(2, l)]
}

fn det3(l: &FieldCtx, m: &[[FqElem; 3]; 3]) -> FqElem {
    let minor = |a: usize, b: usize| l.sub(&l.mul(&m[1][a], &m[2][b]), &l.mul(&m[1][b], &m[2][a]));
    let t0 = l.mul(&m[0][0], &minor(1, 2));
    let t1 = l.mul(&m[0][1], &minor(0, 2));
    let t2 = l.mul(&m[0][2], &minor(0, 1));
    l.add(&l.sub(&t0, &t1), &t2)
}

/// The Richelot isogeny with kernel `kernel`.
pub fn richelot_step(c: &Genus2Curve, kernel: &QuadraticTriple) -> Result<SplitResult> {
    let l = kernel.field().clone();
    if kernel.product() != kernel.emb.map_poly(&c.f) {
        return Err(Error::InvalidInput("kernel does not factor the curve".into()));
    }
    let g = [kernel.g[0].scale(&kernel.c, &l), kernel.g[1].clone(), kernel.g[2].clone()];
    let m = [quad_coeffs(&g[0], &l), quad_coeffs(&g[1], &l), quad_coeffs(&g[2], &l)];
    let delta = det3(&l, &m);
    if delta.is_zero() {
        return degenerate_split(kernel, &g);
    }
    let bracket = |a: &Poly, b: &Poly| a.derivative(&l).mul(b, &l).sub(&a.mul(&b.derivative(&l), &l), &l);
    let h = [bracket(&g[1], &g[2]), bracket(&g[2], &g[0]), bracket(&g[0], &g[1])];
    let dual = QuadraticTriple { emb: kernel.emb.clone(), c: l.inv(&delta)?, g: h };
    let curve = Genus2Curve::new(&l, dual.product())?;
    Ok(SplitResult::Codomain { curve, dual })
}

fn disc(l: &FieldCtx, a: &[FqElem; 3]) -> FqElem {
    l.sub(&l.sqr(&a[1]), &l.scale(&l.mul(&a[2], &a[0]), 4))
}

/// S = κ·L² with L = x − r or L = 1.
fn square_form(l: &FieldCtx, s: &[FqElem; 3]) -> Result<(Poly, FqElem)> {
    if !s[2].is_zero() {
        let r = l.neg(&l.div(&s[1], &l.scale(&s[2], 2))?);
        if s[0] != l.mul(&s[2], &l.sqr(&r)) {
            return Err(Error::Invariant("pencil member is not a square".into()));
        }
        Ok((Poly::linear(l, &r), s[2].clone()))
    } else if s[1].is_zero() && !s[0].is_zero() {
        Ok((Poly::one(l), s[0].clone()))
    } else {
        Err(Error::Invariant("pencil member is not a square".into()))
    }
}

/// δ = 0: the G_i lie in a pencil spanned by two squares κ1·L1², κ2·L2², and
/// the quotients by the involution swapping L1/L2 ↦ −L1/L2 give E1 and E2.
fn degenerate_split(kernel: &QuadraticTriple, g: &[Poly; 3]) -> Result<SplitResult> {
    let l0 = kernel.field();
    let a = quad_coeffs(&g[0], l0);
    let b = quad_coeffs(&g[1], l0);
    let c2 = disc(l0, &a);
    let c1 = l0
        .sub(&l0.scale(&l0.mul(&a[1], &b[1]), 2), &l0.scale(&l0.add(&l0.mul(&a[2], &b[0]), &l0.mul(&a[0], &b[2])), 4));
    let c0 = disc(l0, &b);
    let dd = l0.sub(&l0.sqr(&c1), &l0.scale(&l0.mul(&c2, &c0), 4));
    if c2.is_zero() || dd.is_zero() {
        return Err(Error::Degenerate("the kernel pencil has a repeated square".into()));
    }
    let ext = if l0.is_square(&dd) { Embedding::identity(l0) } else { extension(l0, 2)? };
    let l = ext.dst.clone();
    let lift = |x: &[FqElem; 3]| [ext.map(&x[0]), ext.map(&x[1]), ext.map(&x[2])];
    let (a, b) = (lift(&a), lift(&b));
    let root = l.sqrt(&ext.map(&dd))?;
    let den = l.scale(&ext.map(&c2), 2);
    let c1 = ext.map(&c1);
    let lam = [l.div(&l.sub(&root, &c1), &den)?, l.div(&l.neg(&l.add(&root, &c1)), &den)?];
    let pencil = |t: &FqElem| -> [FqElem; 3] { std::array::from_fn(|i| l.add(&l.mul(t, &a[i]), &b[i])) };
    let s = [pencil(&lam[0]), pencil(&lam[1])];
    let (l1, k1) = square_form(&l, &s[0])?;
    let (l2, k2) = square_form(&l, &s[1])?;
    // G_i = x_i·S1 + y_i·S2 = a_i·L1² + b_i·L2²
    let (i, j) = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .find(|&(i, j)| !l.sub(&l.mul(&s[0][i], &s[1][j]), &l.mul(&s[0][j], &s[1][i])).is_zero())
        .ok_or_else(|| Error::Invariant("pencil squares are dependent".into()))?;
    let det = l.sub(&l.mul(&s[0][i], &s[1][j]), &l.mul(&s[0][j], &s[1][i]));
    let mut ab = Vec::new();
    for gi in g {
        let v = lift(&quad_coeffs(gi, l0));
        let x = l.div(&l.sub(&l.mul(&v[i], &s[1][j]), &l.mul(&v[j], &s[1][i])), &det)?;
        let y = l.div(&l.sub(&l.mul(&s[0][i], &v[j]), &l.mul(&s[0][j], &v[i])), &det)?;
        if (0..3).any(|m| v[m] != l.add(&l.mul(&x, &s[0][m]), &l.mul(&y, &s[1][m]))) {
            return Err(Error::Invariant("kernel factor outside the pencil".into()));
        }
        ab.push((l.mul(&x, &k1), l.mul(&y, &k2)));
    }
    let mut h1 = Poly::one(&l);
    let mut h2 = Poly::one(&l);
    for (ai, bi) in &ab {
        h1 = h1.mul(&Poly::from_coeffs(vec![bi.clone(), ai.clone()]), &l);
        h2 = h2.mul(&Poly::from_coeffs(vec![ai.clone(), bi.clone()]), &l);
    }
    let e1 = EllipticCurve::from_cubic(&l, &h1)?;
    let e2 = EllipticCurve::from_cubic(&l, &h2)?;
    Ok(SplitResult::Split { emb: kernel.emb.then(&ext), e1, e2, l1, l2 })
}

/// Tries every (2,2)-kernel and returns the first whose Richelot
/// determinant vanishes.
pub fn find_split_22(c: &Genus2Curve) -> Result<SplitResult> {
    for k in isotropic_kernels_2(c)? {
        let r = richelot_step(c, &k)?;
        if matches!(r, SplitResult::Split { .. }) {
            return Ok(r);
        }
    }
    Err(Error::NotFound)
}

/// Frobenius polynomial of E1 × E2 over their common field.
pub fn product_frob(e1: &EllipticCurve, e2: &EllipticCurve, limits: &Limits) -> Result<FrobPoly> {
    if e1.k != e2.k {
        return Err(Error::ContextMismatch);
    }
    let k = &e1.k;
    let t1 = BigInt::from(e1.trace(limits)?);
    let t2 = BigInt::from(e2.trace(limits)?);
    let q = BigInt::from(k.p()).pow(k.degree() as u32);
    Ok(FrobPoly::new(-(&t1 + &t2), 2 * q + t1 * t2, k.p(), k.degree() as u32))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IezziParams {
    pub lambda: FqElem,
    pub mu: FqElem,
    pub theta: FqElem,
    /// A square root of λ(λ − μ).
    pub root: FqElem,
}

/// λ, μ, θ for f = c·∏(x − a_i) with the roots in the given order.
pub fn iezzi_params(k: &Fq, a: &[FqElem; 6], c: &FqElem) -> Result<IezziParams> {
    for i in 0..6 {
        for j in 0..i {
            if a[i] == a[j] {
                return Err(Error::InvalidInput("roots must be distinct".into()));
            }
        }
    }
    if c.is_zero() {
        return Err(Error::InvalidInput("leading coefficient is zero".into()));
    }
    let d = |i: usize, j: usize| k.sub(&a[i - 1], &a[j - 1]);
    let m3 = |x: FqElem, y: FqElem, z: FqElem| k.mul(&k.mul(&x, &y), &z);
    if m3(d(2, 4), d(1, 6), d(3, 5)) != m3(d(2, 6), d(1, 5), d(3, 4)) {
        return Err(Error::ConditionFailed("(a2−a4)(a1−a6)(a3−a5) ≠ (a2−a6)(a1−a5)(a3−a4)".into()));
    }
    let lambda = k.div(&k.mul(&d(1, 3), &d(2, 4)), &k.mul(&d(2, 3), &d(1, 4)))?;
    let mu = k.div(&k.mul(&d(1, 3), &d(2, 5)), &k.mul(&d(2, 3), &d(1, 5)))?;
    if lambda == k.one() || mu == k.one() {
        return Err(Error::Degenerate("λ = 1 or μ = 1".into()));
    }
    let theta = k.mul(&m3(c.clone(), d(2, 3), d(1, 4)), &k.mul(&d(1, 5), &d(1, 6)));
    let root = k.sqrt(&k.mul(&lambda, &k.sub(&lambda, &mu)))?;
    Ok(IezziParams { lambda, mu, theta, root })
}

/// y² = (θ(1−μ)/(1−λ))·x(x−1)(x − ρ) with ρ = (1−λ)(μ − 2λ + 2r)/(μ − 1).
pub fn iezzi_curve(k: &Fq, p: &IezziParams, r: &FqElem) -> Result<EllipticCurve> {
    let one = k.one();
    let om = k.sub(&one, &p.mu);
    let ol = k.sub(&one, &p.lambda);
    let scale = k.div(&k.mul(&p.theta, &om), &ol)?;
    let num = k.mul(&ol, &k.add(&k.sub(&p.mu, &k.scale(&p.lambda, 2)), &k.scale(r, 2)));
    let rho = k.div(&num, &k.neg(&om))?;
    let x = Poly::x(k);
    let h = x.mul(&Poly::linear(k, &one), k).mul(&Poly::linear(k, &rho), k).scale(&scale, k);
    EllipticCurve::from_cubic(k, &h)
}

/// (E+, E−) for the roots in the given order.
pub fn iezzi_split(k: &Fq, a: &[FqElem; 6], c: &FqElem) -> Result<(EllipticCurve, EllipticCurve)> {
    let p = iezzi_params(k, a, c)?;
    Ok((iezzi_curve(k, &p, &p.root)?, iezzi_curve(k, &p, &k.neg(&p.root))?))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Orderings of the roots for which the split applies over F_q.
pub fn iezzi_orderings(k: &Fq, a: &[FqElem; 6]) -> Vec<[usize; 6]> {
    let mut out: Vec<[usize; 6]> = permutations(6)
        .into_iter()
        .map(|p| <[usize; 6]>::try_from(p).unwrap())
        .filter(|p| iezzi_params(k, &p.map(|i| a[i].clone()), &k.one()).is_ok())
        .collect();
    out.sort();
    out
}

/// y² = x⁶ + t·x⁴ + s·x² + 1 with its two degree-2 elliptic quotients.
#[derive(Clone, Debug)]
pub struct V4Covers {
    pub curve: Genus2Curve,
    /// v² = u³ + t·u² + s·u + 1, reached by (u, v) = (x², y).
    pub e_ts: EllipticCurve,
    /// v² = u³ + s·u² + t·u + 1, reached by (u, v) = (1/x², y/x³).
    pub e_st: EllipticCurve,
    /// F_q → L, the splitting field of the sextic.
    pub emb: Embedding,
    /// Roots of u³ + t·u² + s·u + 1 in L.
    pub alphas: Vec<FqElem>,
    /// ∞×∞ and (α_i, 0)×(1/α_i, 0), over L.
    pub kernel: Vec<(EcPoint, EcPoint)>,
}

pub fn v4_covers(k: &Fq, t: &FqElem, s: &FqElem) -> Result<V4Covers> {
    let z = k.zero();
    let one = k.one();
    let f = Poly::from_coeffs(vec![one.clone(), z.clone(), s.clone(), z.clone(), t.clone(), z, one.clone()]);
    let curve = Genus2Curve::new(k, f).map_err(|_| Error::Degenerate("x⁶ + t·x⁴ + s·x² + 1 is singular".into()))?;
    let e_ts = EllipticCurve::new(k, t.clone(), s.clone(), one.clone())?;
    let e_st = EllipticCurve::new(k, s.clone(), t.clone(), one)?;
    let emb = splitting_ctx(&curve.f, k)?;
    let l = emb.dst.clone();
    let alphas = emb.map_poly(&e_ts.cubic()).root_set(&l);
    let mut kernel = vec![(EcPoint::Infinity, EcPoint::Infinity)];
    for a in &alphas {
        kernel.push((EcPoint::Affine(a.clone(), l.zero()), EcPoint::Affine(l.inv(a)?, l.zero())));
    }
    Ok(V4Covers { curve, e_ts, e_st, emb, alphas, kernel })
}

impl V4Covers {
    pub fn field(&self) -> &Fq {
        &self.emb.dst
    }

    pub fn phi(&self, x: &FqElem, y: &FqElem) -> EcPoint {
        EcPoint::Affine(self.field().sqr(x), y.clone())
    }

    pub fn phi_prime(&self, x: &FqElem, y: &FqElem) -> Result<EcPoint> {
        let l = self.field();
        let xi = l.inv(x)?;
        Ok(EcPoint::Affine(l.sqr(&xi), l.mul(y, &l.mul(&l.sqr(&xi), &xi))))
    }

    pub fn jacobian(&self) -> Result<Jacobian> {
        Jacobian::new(&self.curve, &self.emb)
    }

    /// Class of the fibre x² = u0 with y = v(x), minus the two points at
    /// infinity.
    fn fibre(&self, jac: &Jacobian, u0: &FqElem, v: Poly) -> Result<MumfordDivisor> {
        let l = self.field();
        let u = Poly::from_coeffs(vec![l.neg(u0), l.zero(), l.one()]);
        let a = jac.root().ok_or_else(|| Error::Invariant("expected a sextic model".into()))?;
        if !u.eval(a, l).is_zero() {
            return jac.from_curve_divisor(&u, &v);
        }
        // one fibre point is the distinguished Weierstrass point; the class is
        // that of the other point
        let b = l.neg(a);
        jac.curve_point(&b, &v.eval(&b, l))
    }

    /// Φ(P − ∞, Q − ∞) = φ*(P − ∞) + φ′*(Q − ∞) in J(C) over L.
    pub fn pullback_sum(&self, jac: &Jacobian, p: &EcPoint, q: &EcPoint) -> Result<MumfordDivisor> {
        let l = self.field();
        let mut acc = jac.zero();
        if let EcPoint::Affine(u0, v0) = p {
            acc = jac.add(&acc, &self.fibre(jac, u0, Poly::constant(v0.clone()))?);
        }
        if let EcPoint::Affine(u0, v0) = q {
            // x² = 1/u0 and y = v0·x³ = (v0/u0)·x on the fibre; the fibre over
            // ∞ is (0, ±1), whose class is div(x) = 0
            let ui = l.inv(u0).map_err(|_| Error::InvalidInput("fibre over u = 0 meets infinity".into()))?;
            let v = Poly::from_coeffs(vec![l.zero(), l.mul(v0, &ui)]);
            acc = jac.add(&acc, &self.fibre(jac, &ui, v)?);
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubcoverBranch {
    /// deg f1 = deg f2 + 3 with t a linear factor of f1′.
    Generic,
    /// f2 = 0 and deg f1 = 2, with t a linear factor of f1′ or a constant.
    Quadratic,
}

/// (x, y) ↦ (u, v) = (f1 + y·f2, g1 + y·g2) onto v² = u³ + a·u + b.
#[derive(Clone, Debug)]
pub struct Subcover {
    pub f1: Poly,
    pub f2: Poly,
    pub g1: Poly,
    pub g2: Poly,
    pub a: FqElem,
    pub b: FqElem,
    /// The pulled-back differential is proportional to t(x)·dx/y.
    pub t: Poly,
    pub codomain: EllipticCurve,
    pub degree: usize,
    pub branch: SubcoverBranch,
}

impl Subcover {
    /// g1² + F·g2² − (b + a·f1 + f1³ + 3·f1·f2²·F) and
    /// 2·g1·g2 − (a·f2 + 3·f1²·f2 + f2³·F).
    pub fn residuals(&self, f: &Poly, k: &FieldCtx) -> (Poly, Poly) {
        cover_residuals(f, &self.f1, &self.f2, &self.g1, &self.g2, &self.a, &self.b, k)
    }
}

#[allow(clippy::too_many_arguments)]
fn cover_residuals(
    f: &Poly,
    f1: &Poly,
    f2: &Poly,
    g1: &Poly,
    g2: &Poly,
    a: &FqElem,
    b: &FqElem,
    k: &FieldCtx,
) -> (Poly, Poly) {
    let f1sq = f1.sqr(k);
    let f2sq_f = f2.sqr(k).mul(f, k);
    let lhs1 = g1.sqr(k).add(&f.mul(&g2.sqr(k), k), k);
    let rhs1 = Poly::constant(b.clone())
        .add(&f1.scale(a, k), k)
        .add(&f1sq.mul(f1, k), k)
        .add(&f1.mul(&f2sq_f, k).scale(&k.from_u64(3), k), k);
    let lhs2 = g1.mul(g2, k).scale(&k.from_u64(2), k);
    let rhs2 = f2.scale(a, k).add(&f1sq.mul(f2, k).scale(&k.from_u64(3), k), k).add(&f2sq_f.mul(f2, k), k);
    (lhs1.sub(&rhs1, k), lhs2.sub(&rhs2, k))
}

/// Solves Σ_j m[i][j]·x_j = rhs[i] for three unknowns; None unless the
/// system is consistent with a unique solution.
fn solve3(k: &FieldCtx, mut rows: Vec<[FqElem; 4]>) -> Option<[FqElem; 3]> {
    let mut r = 0;
    for col in 0..3 {
        let piv = (r..rows.len()).find(|&i| !rows[i][col].is_zero())?;
        rows.swap(r, piv);
        let inv = k.inv(&rows[r][col]).ok()?;
        for c in 0..4 {
            rows[r][c] = k.mul(&rows[r][c], &inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let m = rows[i][col].clone();
                for c in 0..4 {
                    let t = k.mul(&m, &rows[r][c]);
                    rows[i][c] = k.sub(&rows[i][c], &t);
                }
            }
        }
        r += 1;
    }
    if rows[3..].iter().any(|row| !row[3].is_zero()) {
        return None;
    }
    Some([rows[0][3].clone(), rows[1][3].clone(), rows[2][3].clone()])
}

struct CoverSearch<'a> {
    k: &'a Fq,
    f: Poly,
    fp: Poly,
}

impl CoverSearch<'_> {
    /// With g2⁰ = f1′/t and g1⁰ = (2F·f2′ + F′·f2)/(2t) the cover equations
    /// are linear in (ν, a, b) for g = ν^{1/2}·g⁰.
    fn attempt(&self, f1: &Poly, f2: &Poly, t: &Poly, branch: SubcoverBranch) -> Option<Subcover> {
        let k = self.k;
        let f = &self.f;
        let (g2o, r) = f1.derivative(k).divrem(t, k).ok()?;
        if !r.is_zero() {
            return None;
        }
        let num = f.mul(&f2.derivative(k), k).scale(&k.from_u64(2), k).add(&self.fp.mul(f2, k), k);
        let (g1o, r) = num.divrem(&t.scale(&k.from_u64(2), k), k).ok()?;
        if !r.is_zero() {
            return None;
        }
        let zero = k.zero();
        let one = k.one();
        let (q1, q2) = cover_residuals(f, f1, f2, &Poly::zero(), &Poly::zero(), &zero, &zero, k);
        // q1 = −(f1³ + 3f1f2²F), q2 = −(3f1²f2 + f2³F)
        let p1 = g1o.sqr(k).add(&f.mul(&g2o.sqr(k), k), k);
        let p2 = g1o.mul(&g2o, k).scale(&k.from_u64(2), k);
        let n1 = [p1.c.len(), f1.c.len(), q1.c.len(), 1].into_iter().max().unwrap();
        let n2 = [p2.c.len(), f2.c.len(), q2.c.len()].into_iter().max().unwrap();
        let mut rows = Vec::with_capacity(n1 + n2);
        for i in 0..n1 {
            let c0 = if i == 0 { k.neg(&one) } else { zero.clone() };
            rows.push([p1.coeff(i, k), k.neg(&f1.coeff(i, k)), c0, k.neg(&q1.coeff(i, k))]);
        }
        for i in 0..n2 {
            rows.push([p2.coeff(i, k), k.neg(&f2.coeff(i, k)), zero.clone(), k.neg(&q2.coeff(i, k))]);
        }
        if rows.len() < 3 {
            return None;
        }
        let [nu, a, b] = solve3(k, rows)?;
        if nu.is_zero() {
            return None;
        }
        let (f1, f2, g1, g2, a, b) = if k.is_square(&nu) {
            let s = k.sqrt(&nu).ok()?;
            (f1.clone(), f2.clone(), g1o.scale(&s, k), g2o.scale(&s, k), a, b)
        } else {
            // (f, g, a, b) ↦ (ν·f, ν²·g⁰, ν²·a, ν³·b)
            let nu2 = k.sqr(&nu);
            (
                f1.scale(&nu, k),
                f2.scale(&nu, k),
                g1o.scale(&nu2, k),
                g2o.scale(&nu2, k),
                k.mul(&a, &nu2),
                k.mul(&b, &k.mul(&nu2, &nu)),
            )
        };
        let codomain = EllipticCurve::short(k, a.clone(), b.clone()).ok()?;
        let (r1, r2) = cover_residuals(f, &f1, &f2, &g1, &g2, &a, &b, k);
        if !r1.is_zero() || !r2.is_zero() {
            return None;
        }
        let norm = f1.sqr(k).sub(&f.mul(&f2.sqr(k), k), k);
        let degree = norm.degree().unwrap_or(0) / 2;
        if degree == 0 {
            return None;
        }
        Some(Subcover { f1, f2, g1, g2, a, b, t: t.clone(), codomain, degree, branch })
    }
}

/// Polynomials of exact degree d over k with leading coefficient `lead`.
fn polys_with_lead<'a>(k: &'a Fq, d: usize, lead: &'a FqElem) -> impl Iterator<Item = Poly> + 'a {
    let q = k.order_u128().unwrap();
    let total = q.pow(d as u32);
    (0..total).map(move |mut i| {
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push(k.from_index(i % q));
            i /= q;
        }
        c.push(lead.clone());
        Poly::from_coeffs(c)
    })
}

/// Elliptic subcovers (x, y) ↦ (f1 + y·f2, g1 + y·g2) defined over F_q.
/// Covers with f2 = 0 and deg f1 = 2 are tried first, then
/// deg f2 = d, deg f1 = d + 3 for d = 1..=d_max. Leading coefficients of f1
/// run over the two square classes, since (f, g) ↦ (c²f, c³g) preserves the
/// form of the codomain.
pub fn subcover_search(c: &Genus2Curve, d_max: usize, limits: &Limits) -> Result<Subcover> {
    let k = &c.k;
    if k.p() == 3 {
        return Err(Error::Unsupported("short Weierstrass codomains need p > 3".into()));
    }
    let q = k.order_u128().unwrap();
    let mut budget: u128 = 2 * q * q;
    for d in 1..=d_max {
        budget = q
            .checked_pow(2 * d as u32 + 3)
            .and_then(|x| x.checked_mul(2 * (q - 1)))
            .and_then(|x| x.checked_add(budget))
            .ok_or_else(|| Error::Capacity("subcover search space overflows".into()))?;
    }
    if budget > limits.max_enum as u128 {
        return Err(Error::Capacity(format!("subcover search needs {budget} candidates")));
    }
    let s = CoverSearch { k, f: c.f.clone(), fp: c.f.derivative(k) };
    let nonsquare = k.elements().find(|x| !x.is_zero() && !k.is_square(x)).unwrap();
    let leads = [k.one(), nonsquare];
    for lead in &leads {
        for f1 in polys_with_lead(k, 2, lead) {
            let mut ts: Vec<Poly> = f1.derivative(k).root_set(k).iter().map(|r| Poly::linear(k, r)).collect();
            ts.push(Poly::one(k));
            for t in &ts {
                if let Some(sc) = s.attempt(&f1, &Poly::zero(), t, SubcoverBranch::Quadratic) {
                    return Ok(sc);
                }
            }
        }
    }
    for d in 1..=d_max {
        for lead in &leads {
            for f1 in polys_with_lead(k, d + 3, lead) {
                for r in f1.derivative(k).root_set(k) {
                    let t = Poly::linear(k, &r);
                    // t | 2F·f2′ + F′·f2 is one linear condition on f2
                    let fr = s.f.eval(&r, k);
                    let fpr = s.fp.eval(&r, k);
                    let w: Vec<FqElem> = (0..=d)
                        .map(|j| {
                            let rj = k.pow_u64(&r, j as u64);
                            let dj = if j == 0 {
                                k.zero()
                            } else {
                                k.mul(&k.scale(&fr, 2 * j as u64), &k.pow_u64(&r, j as u64 - 1))
                            };
                            k.add(&dj, &k.mul(&fpr, &rj))
                        })
                        .collect();
                    for top in k.elements().filter(|x| !x.is_zero()) {
                        for f2 in polys_with_lead(k, d, &top) {
                            let val = f2.c.iter().zip(&w).fold(k.zero(), |acc, (ci, wi)| k.add(&acc, &k.mul(ci, wi)));
                            if !val.is_zero() {
                                continue;
                            }
                            if let Some(sc) = s.attempt(&f1, &f2, &t, SubcoverBranch::Generic) {
                                return Ok(sc);
                            }
                        }
                    }
                }
            }
        }
    }
    Err(Error::NotFound)
}

#[derive(Clone, Debug)]
pub struct X5Report {
    pub p: u64,
    /// p ≡ 1 mod 5, so p splits completely in Z[ζ5].
    pub totally_split: bool,
    /// End(J) = Z[ζ5], which holds exactly in the totally split case.
    pub end_is_z_zeta5: bool,
    pub frob: FrobPoly,
    pub p_rank: u8,
    pub a_number: u8,
    pub simple_over_base: bool,
}

/// y² = x⁵ − 1 over F_p.
pub fn x5_classify(p: u64, limits: &Limits) -> Result<X5Report> {
    if p == 2 || p == 5 {
        return Err(Error::InvalidInput("p must differ from 2 and 5".into()));
    }
    let k = FieldCtx::prime(p)?;
    let c = Genus2Curve::from_i64s(&k, &[-1, 0, 0, 0, 0, 1])?;
    let frob = char_poly(&c, CountMode::Auto, limits)?;
    let cm = cartier_manin(&c);
    if cm.p_rank != p_rank(&frob) {
        return Err(Error::Invariant("Cartier–Manin and Frobenius p-ranks disagree".into()));
    }
    let totally_split = p % 5 == 1;
    Ok(X5Report {
        p,
        totally_split,
        end_is_z_zeta5: totally_split,
        simple_over_base: !frob.splits_into_elliptic(),
        frob,
        p_rank: cm.p_rank,
        a_number: cm.a_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64) -> Fq {
        FieldCtx::prime(p).unwrap()
    }

    fn curve(p: u64, f: &[i64]) -> Genus2Curve {
        Genus2Curve::from_i64s(&fp(p), f).unwrap()
    }

    fn golden() -> Genus2Curve {
        curve(11, &[2, 7, 5, 2, 4, 6, 1])
    }

    fn frob(c: &Genus2Curve) -> FrobPoly {
        char_poly(c, CountMode::Naive, &Limits::default()).unwrap()
    }

    fn random_v4(k: &Fq, rng: &mut ChaCha8Rng) -> (FqElem, FqElem, V4Covers) {
        loop {
            let t = k.random(rng);
            let s = k.random(rng);
            if let Ok(v) = v4_covers(k, &t, &s) {
                return (t, s, v);
            }
        }
    }

    #[test]
    fn field_bound_values() {
        let r: Vec<u64> = [2, 3, 6].iter().map(|&n| field_bound_with(n, 2).unwrap().r).collect();
        assert_eq!(r, vec![15, 40, 600]);
        for n in [5u64, 7, 11, 13] {
            assert_eq!(field_bound_with(n, 2).unwrap().r, (n + 1) * (n * n + 1));
        }
        // prime powers: r(4) counts maximal isotropic subgroups of (Z/4)^4
        assert_eq!(field_bound_with(4, 1).unwrap().r, 8 * 15);
        let b = field_bound(2, &curve(11, &[-1, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!((b.w, b.s), (10, 150));
        assert!(field_bound_with(1, 2).is_err());
    }

    #[test]
    fn fifteen_pairings_partition_six_points() {
        let p = pairings(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(p.len(), 15);
        let mut seen = std::collections::HashSet::new();
        for pairs in &p {
            let mut all: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            all.sort();
            assert_eq!(all, vec![0, 1, 2, 3, 4, 5]);
            let mut key: Vec<(usize, usize)> = pairs.clone();
            key.sort();
            assert!(seen.insert(key));
        }
    }

    #[test]
    fn kernels_factor_the_sextic() {
        let c = golden();
        let ks = isotropic_kernels_2(&c).unwrap();
        assert_eq!(ks.len(), 15);
        for k in &ks {
            assert_eq!(k.product(), k.emb.map_poly(&c.f));
            let l = k.field();
            for i in 0..3 {
                assert_eq!(k.g[i].deg(), 2);
                for j in 0..i {
                    assert_eq!(k.g[i].gcd(&k.g[j], l).deg(), 0);
                }
            }
        }
    }

    #[test]
    fn quintic_kernels_pair_infinity_with_a_root() {
        let c = curve(13, &[3, 1, 0, 5, 0, 1]);
        let ks = isotropic_kernels_2(&c).unwrap();
        assert_eq!(ks.len(), 15);
        let with_linear = ks.iter().filter(|k| k.g.iter().any(|g| g.deg() == 1)).count();
        assert_eq!(with_linear, 15);
        for k in &ks {
            assert_eq!(k.g.iter().filter(|g| g.deg() == 1).count(), 1);
            assert_eq!(k.product(), k.emb.map_poly(&c.f));
        }
    }

    #[test]
    fn table_families_have_their_groups() {
        let cases: [(u64, &[i64], AutType, u64); 5] = [
            (11, &[-1, 0, 0, 0, 0, 1], AutType::C2xC5, 10),
            (7, &[-1, 0, 0, 0, 0, 0, 1], AutType::TwoD12, 24),
            (13, &[0, -1, 0, 0, 0, 1], AutType::TildeS4, 48),
            (13, &[1, 0, 0, 3, 0, 0, 1], AutType::D12, 12),
            (13, &[0, 1, 0, 3, 0, 1], AutType::D8, 8),
        ];
        for (p, f, kind, w) in cases {
            let g = aut_group(&curve(p, f)).unwrap();
            assert_eq!((g.kind, g.order), (kind, w), "p={p} f={f:?}");
        }
    }

    #[test]
    fn v4_family_contains_v4() {
        let k = fp(13);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut exact = 0;
        for _ in 0..10 {
            let (_, _, v) = random_v4(&k, &mut rng);
            let g = aut_group(&v.curve).unwrap();
            assert_eq!(g.order % 4, 0);
            exact += (g.kind == AutType::V4) as usize;
        }
        assert!(exact > 0);
    }

    #[test]
    fn generic_sextics_have_only_the_involution() {
        let k = fp(13);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut n = 0;
        while n < 5 {
            let f: Vec<i64> = (0..7).map(|i| if i == 6 { 1 } else { rng.gen_range(0..13) }).collect();
            let Ok(c) = Genus2Curve::from_i64s(&k, &f) else { continue };
            let g = aut_group(&c).unwrap();
            assert!(g.order >= 2);
            if g.order == 2 {
                assert_eq!(g.kind, AutType::C2);
                n += 1;
            }
        }
    }

    /// f(M·x)·(cx + d)⁶ is proportional to f(x) for every map found.
    #[test]
    fn stabiliser_maps_transform_the_sextic() {
        for c in [golden(), curve(7, &[-1, 0, 0, 0, 0, 0, 1]), curve(13, &[1, 0, 0, 3, 0, 0, 1])] {
            let emb = splitting_ctx(&c.f, &c.k).unwrap();
            let l = &emb.dst;
            let f = emb.map_poly(&c.f);
            let pts = branch_points(&f, l);
            let maps = set_maps(l, &pts, &pts);
            assert_eq!(maps.len() as u64 * 2, aut_group(&c).unwrap().order);
            for m in &maps {
                let num = Poly::from_coeffs(vec![m[0][1].clone(), m[0][0].clone()]);
                let den = Poly::from_coeffs(vec![m[1][1].clone(), m[1][0].clone()]);
                let mut g = Poly::zero();
                for (i, ci) in f.c.iter().enumerate() {
                    let t = num.pow(i as u32, l).mul(&den.pow(6 - i as u32, l), l).scale(ci, l);
                    g = g.add(&t, l);
                }
                let lam = l.div(g.lc().unwrap(), f.lc().unwrap()).unwrap();
                assert_eq!(g, f.scale(&lam, l));
            }
        }
    }

    #[test]
    fn golden_curve_has_extra_involutions() {
        // J(C) ~ E² over F_121, matching a D12 automorphism group
        assert_eq!(aut_group(&golden()).unwrap().kind, AutType::D12);
    }

    #[test]
    fn x6_minus_1_splits_with_cm_factors() {
        let c = curve(7, &[-1, 0, 0, 0, 0, 0, 1]);
        let limits = Limits::default();
        let splits: Vec<SplitResult> = isotropic_kernels_2(&c)
            .unwrap()
            .iter()
            .map(|k| richelot_step(&c, k).unwrap())
            .filter(|r| matches!(r, SplitResult::Split { .. }))
            .collect();
        assert!(!splits.is_empty());
        let fa = frob(&c);
        for r in &splits {
            let SplitResult::Split { emb, e1, e2, .. } = r else { unreachable!() };
            let d = emb.dst.degree() as u32;
            assert_eq!(product_frob(e1, e2, &limits).unwrap(), fa.base_change(d));
        }
        assert!(matches!(find_split_22(&c).unwrap(), SplitResult::Split { .. }));
        let js: Vec<u64> = splits
            .iter()
            .flat_map(|r| {
                let SplitResult::Split { e1, e2, emb, .. } = r else { unreachable!() };
                [e1.j_invariant(), e2.j_invariant()].into_iter().filter_map(move |j| emb.preimage(&j)?.as_prime())
            })
            .collect();
        assert!(js.iter().any(|j| *j == 0 || *j == 1728 % 7), "{js:?}");
    }

    #[test]
    fn golden_curve_splits_over_the_quadratic_extension() {
        let c = golden();
        let SplitResult::Split { emb, e1, e2, .. } = find_split_22(&c).unwrap() else { panic!() };
        assert_eq!(emb.dst.degree(), 2);
        assert_eq!(product_frob(&e1, &e2, &Limits::default()).unwrap(), frob(&c).base_change(2));
    }

    #[test]
    fn simple_curve_has_no_22_split() {
        let k = fp(7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut done = 0;
        while done < 2 {
            let f: Vec<i64> = (0..7).map(|i| if i == 6 { 1 } else { rng.gen_range(0..7) }).collect();
            let Ok(c) = Genus2Curve::from_i64s(&k, &f) else { continue };
            let fa = frob(&c);
            if (1..=12).all(|d| fa.base_change(d).is_irreducible()) {
                assert_eq!(find_split_22(&c).unwrap_err(), Error::NotFound);
                done += 1;
            }
        }
    }

    #[test]
    fn v4_member_splits_onto_its_quotients() {
        let k = fp(13);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let limits = Limits::default();
        for _ in 0..3 {
            let (_, _, v) = random_v4(&k, &mut rng);
            let SplitResult::Split { emb, e1, e2, .. } = find_split_22(&v.curve).unwrap() else { panic!() };
            let d = emb.dst.degree();
            let ext = extension(&k, d).unwrap();
            let t_ts = v.e_ts.base_change(&ext).trace(&limits).unwrap();
            let t_st = v.e_st.base_change(&ext).trace(&limits).unwrap();
            let mut got = [e1.trace(&limits).unwrap(), e2.trace(&limits).unwrap()];
            let mut want = [t_ts, t_st];
            got.sort();
            want.sort();
            assert_eq!(got, want);
        }
    }

    /// f = G1·G2·G3 with each G_i a random monic quadratic over F_q.
    fn rational_kernel_curve(k: &Fq, rng: &mut ChaCha8Rng) -> (Genus2Curve, QuadraticTriple) {
        loop {
            let g: [Poly; 3] = std::array::from_fn(|_| Poly::from_coeffs(vec![k.random(rng), k.random(rng), k.one()]));
            let f = g[0].mul(&g[1], k).mul(&g[2], k);
            if let Ok(c) = Genus2Curve::new(k, f) {
                let t = QuadraticTriple { emb: Embedding::identity(k), c: k.one(), g };
                return (c, t);
            }
        }
    }

    #[test]
    fn richelot_preserves_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [11u64, 13] {
            let k = fp(p);
            let mut done = 0;
            while done < 3 {
                let (c, t) = rational_kernel_curve(&k, &mut rng);
                let SplitResult::Codomain { curve, dual } = richelot_step(&c, &t).unwrap() else { continue };
                assert_eq!(frob(&curve), frob(&c));
                // the dual step comes back to C up to isomorphism
                let SplitResult::Codomain { curve: back, .. } = richelot_step(&curve, &dual).unwrap() else {
                    panic!("dual step split")
                };
                assert!(geometrically_isomorphic(&back, &c).unwrap());
                assert_eq!(frob(&back), frob(&c));
                done += 1;
            }
        }
    }

    #[test]
    fn isomorphism_test_separates_curves() {
        let a = golden();
        let b = curve(11, &[1, 0, 0, 0, 0, 0, 1]);
        assert!(!geometrically_isomorphic(&a, &b).unwrap());
        // x ↦ x + 1 and scaling y give isomorphic models
        let k = fp(11);
        let shifted = a.f.compose(&Poly::from_i64s(&k, &[1, 1]), &k).scale(&k.from_u64(3), &k);
        assert!(geometrically_isomorphic(&a, &Genus2Curve::new(&k, shifted).unwrap()).unwrap());
    }

    #[test]
    fn kernel_must_factor_the_curve() {
        let c = golden();
        let mut k = isotropic_kernels_2(&c).unwrap().remove(0);
        k.c = k.field().from_u64(2);
        assert!(matches!(richelot_step(&c, &k), Err(Error::InvalidInput(_))));
    }

    fn symmetric_roots(k: &Fq, squares: [u64; 3]) -> [FqElem; 6] {
        let mut r = Vec::new();
        for s in squares {
            let x = k.sqrt(&k.from_u64(s)).unwrap();
            r.push(x.clone());
            r.push(k.neg(&x));
        }
        r.try_into().unwrap()
    }

    fn product_from_roots(k: &Fq, a: &[FqElem; 6], c: &FqElem) -> Poly {
        a.iter().fold(Poly::constant(c.clone()), |acc, r| acc.mul(&Poly::linear(k, r), k))
    }

    #[test]
    fn iezzi_signs_swap_factors() {
        let k = fp(11);
        let a = symmetric_roots(&k, [1, 3, 4]);
        let ord = iezzi_orderings(&k, &a);
        assert!(!ord.is_empty());
        let roots = ord[0].map(|i| a[i].clone());
        let p = iezzi_params(&k, &roots, &k.one()).unwrap();
        let (ep, em) = iezzi_split(&k, &roots, &k.one()).unwrap();
        let swapped = IezziParams { root: k.neg(&p.root), ..p.clone() };
        assert_eq!(iezzi_curve(&k, &swapped, &swapped.root).unwrap(), em);
        assert_eq!(iezzi_curve(&k, &swapped, &k.neg(&swapped.root)).unwrap(), ep);
    }

    #[test]
    fn iezzi_rejects_bad_orderings() {
        let k = fp(13);
        let a: [FqElem; 6] = std::array::from_fn(|i| k.from_u64(i as u64 + 1));
        assert!(matches!(iezzi_params(&k, &a, &k.one()), Err(Error::ConditionFailed(_))));
        let mut dup = a.clone();
        dup[1] = dup[0].clone();
        assert!(matches!(iezzi_params(&k, &dup, &k.one()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn iezzi_split_matches_frobenius() {
        let limits = Limits::default();
        let mut sextics = 0;
        for (p, sq) in [(11u64, vec![1u64, 3, 4, 5, 9]), (13, vec![1, 3, 4, 9, 10, 12])] {
            let k = fp(p);
            for i in 0..sq.len() {
                for j in i + 1..sq.len() {
                    for l in j + 1..sq.len() {
                        let a = symmetric_roots(&k, [sq[i], sq[j], sq[l]]);
                        let ord = iezzi_orderings(&k, &a);
                        if ord.is_empty() {
                            continue;
                        }
                        let c = k.from_u64(2);
                        let curve = Genus2Curve::new(&k, product_from_roots(&k, &a, &c)).unwrap();
                        let fa = frob(&curve);
                        let roots = ord[0].map(|m| a[m].clone());
                        let (ep, em) = iezzi_split(&k, &roots, &c).unwrap();
                        assert_eq!(product_frob(&ep, &em, &limits).unwrap(), fa, "p={p} squares {:?}", (i, j, l));
                        sextics += 1;
                    }
                }
            }
        }
        assert!(sextics >= 5);
    }

    #[test]
    fn v4_kernel_is_annihilated() {
        let k = fp(13);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (_, _, v) = random_v4(&k, &mut rng);
            let jac = v.jacobian().unwrap();
            assert_eq!(v.kernel.len(), 4);
            for (p, q) in &v.kernel {
                assert!(v.pullback_sum(&jac, p, q).unwrap().is_zero());
            }
            // mismatched 2-torsion pairs are not in the kernel
            let l = v.field();
            let (a0, a1) = (&v.alphas[0], &v.alphas[1]);
            let p = EcPoint::Affine(a0.clone(), l.zero());
            let q = EcPoint::Affine(l.inv(a1).unwrap(), l.zero());
            assert!(!v.pullback_sum(&jac, &p, &q).unwrap().is_zero());
            assert!(!v.pullback_sum(&jac, &p, &EcPoint::Infinity).unwrap().is_zero());
        }
    }

    #[test]
    fn v4_covers_are_quotient_maps() {
        let k = fp(13);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let (_, _, v) = random_v4(&k, &mut rng);
            let l = v.field();
            let ft = v.curve.base_change(&v.emb).f;
            let ets = v.e_ts.base_change(&v.emb);
            let est = v.e_st.base_change(&v.emb);
            let mut checked = 0;
            for x in l.elements().filter(|x| !x.is_zero()).take(40) {
                let y2 = ft.eval(&x, l);
                let Ok(y) = l.sqrt(&y2) else { continue };
                let p = v.phi(&x, &y);
                assert_eq!(p, v.phi(&l.neg(&x), &y));
                assert!(ets.contains(&p));
                let q = v.phi_prime(&x, &y).unwrap();
                assert_eq!(q, v.phi_prime(&l.neg(&x), &l.neg(&y)).unwrap());
                assert!(est.contains(&q));
                checked += 1;
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn v4_frobenius_is_the_product() {
        let k = fp(13);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let (_, _, v) = random_v4(&k, &mut rng);
            assert_eq!(product_frob(&v.e_ts, &v.e_st, &Limits::default()).unwrap(), frob(&v.curve));
        }
    }

    #[test]
    fn v4_rejects_singular_parameters() {
        let k = fp(13);
        // x⁶ + 3x⁴ + 3x² + 1 = (x² + 1)³
        assert!(matches!(v4_covers(&k, &k.from_u64(3), &k.from_u64(3)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn subcover_of_v4_member_is_x_squared() {
        let k = fp(13);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let limits = Limits::default();
        for _ in 0..3 {
            let (t, _, v) = random_v4(&k, &mut rng);
            let sc = subcover_search(&v.curve, 1, &limits).unwrap();
            assert_eq!(sc.branch, SubcoverBranch::Quadratic);
            assert_eq!(sc.degree, 2);
            let (r1, r2) = sc.residuals(&v.curve.f, &k);
            assert!(r1.is_zero() && r2.is_zero());
            let c0 = k.div(&t, &k.from_u64(3)).unwrap();
            assert_eq!(sc.f1, Poly::from_coeffs(vec![c0, k.zero(), k.one()]));
            assert_eq!(sc.codomain.trace(&limits).unwrap(), v.e_ts.trace(&limits).unwrap());
        }
    }

    #[test]
    fn subcover_search_respects_capacity() {
        let tight = Limits { max_enum: 100, ..Limits::default() };
        assert!(matches!(subcover_search(&golden(), 1, &tight), Err(Error::Capacity(_))));
        let c = curve(3, &[1, 2, 0, 0, 0, 1]);
        assert!(matches!(subcover_search(&c, 1, &Limits::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn x5_classification_by_residue() {
        let limits = Limits::default();
        let r11 = x5_classify(11, &limits).unwrap();
        assert!(r11.totally_split && r11.end_is_z_zeta5 && r11.simple_over_base);
        assert_eq!(r11.p_rank, 2);
        let r7 = x5_classify(7, &limits).unwrap();
        assert!(!r7.totally_split && !r7.end_is_z_zeta5);
        assert_eq!(r7.p_rank, p_rank(&r7.frob));
        let r19 = x5_classify(19, &limits).unwrap();
        assert!(!r19.totally_split);
        assert_eq!(r19.p_rank, 0);
        assert_eq!(r19.frob, frob(&curve(19, &[-1, 0, 0, 0, 0, 1])));
        assert!(x5_classify(5, &limits).is_err());
        assert!(x5_classify(2, &limits).is_err());
    }
}
