//! Exhaustive character sums Σ_x χ(f(x)) over a finite field.

use crate::ff::{legendre, FieldCtx, FqElem, Poly};
use crate::{Error, Limits, Result};

pub fn check_size(k: &FieldCtx, limits: &Limits) -> Result<u128> {
    match k.order_u128() {
        Some(q) if q <= limits.max_count => Ok(q),
        _ => Err(Error::Capacity(format!(
            "exhaustive count over a field of {} bits exceeds the configured cap",
            k.bits()
        ))),
    }
}

fn legendre_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..p {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// Σ_{x ∈ k} χ(f(x)).
pub fn char_sum(f: &Poly, k: &FieldCtx, limits: &Limits) -> Result<i64> {
    check_size(k, limits)?;
    let p = k.p();
    match k.degree() {
        1 => Ok(char_sum_prime(f, k)),
        2 => Ok(char_sum_quadratic(f, k, &legendre_table(p))),
        _ => Ok(char_sum_generic(f, k)),
    }
}

fn char_sum_prime(f: &Poly, k: &FieldCtx) -> i64 {
    let p = k.p();
    let table = legendre_table(p);
    let c: Vec<u64> = f.c.iter().map(|a| a.0[0]).collect();
    let mut s = 0i64;
    for x in 0..p {
        let mut acc = 0u64;
        for &a in c.iter().rev() {
            acc = (acc * x + a) % p;
        }
        s += table[acc as usize] as i64;
    }
    s
}

/// Values f(r), Δf(r), …, Δ^d f(r) for the forward difference Δg(x) = g(x+1) − g(x).
fn difference_table(f: &Poly, r: &FqElem, k: &FieldCtx) -> Vec<FqElem> {
    let d = f.deg();
    let one = k.one();
    let mut vals = Vec::with_capacity(d + 1);
    let mut x = r.clone();
    for _ in 0..=d {
        vals.push(f.eval(&x, k));
        x = k.add(&x, &one);
    }
    let mut out = Vec::with_capacity(d + 1);
    for _ in 0..=d {
        out.push(vals[0].clone());
        vals = vals.windows(2).map(|w| k.sub(&w[1], &w[0])).collect();
    }
    out
}

fn char_sum_quadratic(f: &Poly, k: &FieldCtx, table: &[i8]) -> i64 {
    let p = k.p();
    let m = k.modulus();
    let (m0, m1) = (m[0], m[1]);
    let mut s = 0i64;
    let add = |a: u64, b: u64| {
        let t = a + b;
        if t >= p {
            t - p
        } else {
            t
        }
    };
    for hi in 0..p {
        let r = FqElem(smallvec::smallvec![0, hi]);
        let diffs = difference_table(f, &r, k);
        let d = diffs.len();
        let mut v0: Vec<u64> = diffs.iter().map(|a| a.0[0]).collect();
        let mut v1: Vec<u64> = diffs.iter().map(|a| a.0[1]).collect();
        for _ in 0..p {
            let (z0, z1) = (v0[0], v1[0]);
            // N(z0 + z1 X) = z0² − m1 z0 z1 + m0 z1²
            let n = (z0 * z0 % p + (p - m1) * (z0 * z1 % p) % p + m0 * (z1 * z1 % p)) % p;
            s += table[n as usize] as i64;
            for i in 0..d - 1 {
                v0[i] = add(v0[i], v0[i + 1]);
                v1[i] = add(v1[i], v1[i + 1]);
            }
        }
    }
    s
}

fn char_sum_generic(f: &Poly, k: &FieldCtx) -> i64 {
    let p = k.p() as u128;
    let q = k.order_u128().unwrap();
    let mut s = 0i64;
    let mut base = 0u128;
    while base < q {
        let r = k.from_index(base);
        let mut diffs = difference_table(f, &r, k);
        let d = diffs.len();
        for _ in 0..p {
            s += legendre(k.norm(&diffs[0]), k.p()) as i64;
            for i in 0..d - 1 {
                diffs[i] = k.add(&diffs[i], &diffs[i + 1]);
            }
        }
        base += p;
    }
    s
}
