//! 4×4 matrices over Z/m.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub type Mat4 = [[u64; 4]; 4];

pub fn eye(m: u64) -> Mat4 {
    let mut r = [[0; 4]; 4];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = 1 % m;
    }
    r
}

pub fn mat_mul(a: &Mat4, b: &Mat4, m: u64) -> Mat4 {
    let mut r = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s: u128 = 0;
            for k in 0..4 {
                s += a[i][k] as u128 * b[k][j] as u128;
            }
            r[i][j] = (s % m as u128) as u64;
        }
    }
    r
}

pub fn mat_add(a: &Mat4, b: &Mat4, m: u64) -> Mat4 {
    let mut r = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = ((a[i][j] as u128 + b[i][j] as u128) % m as u128) as u64;
        }
    }
    r
}

pub fn mat_scale(a: &Mat4, s: u64, m: u64) -> Mat4 {
    let mut r = *a;
    for row in r.iter_mut() {
        for x in row.iter_mut() {
            *x = (*x as u128 * s as u128 % m as u128) as u64;
        }
    }
    r
}

pub fn mat_pow(a: &Mat4, e: &BigUint, m: u64) -> Mat4 {
    let mut r = eye(m);
    for i in (0..e.bits()).rev() {
        r = mat_mul(&r, &r, m);
        if e.bit(i) {
            r = mat_mul(&r, a, m);
        }
    }
    r
}

pub fn trace(a: &Mat4, m: u64) -> u64 {
    ((0..4).map(|i| a[i][i] as u128).sum::<u128>() % m as u128) as u64
}

pub fn is_zero(a: &Mat4) -> bool {
    a.iter().all(|r| r.iter().all(|&x| x == 0))
}

pub fn reduce_big(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// g(A) for an integer polynomial g (constant term first).
pub fn eval_poly(g: &[BigInt], a: &Mat4, m: u64) -> Mat4 {
    let mut acc = [[0u64; 4]; 4];
    for c in g.iter().rev() {
        acc = mat_mul(&acc, a, m);
        let c = reduce_big(c, m);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = ((row[i] as u128 + c as u128) % m as u128) as u64;
        }
    }
    acc
}

/// Companion matrix of a monic quartic with integer coefficients c0..c3.
pub fn companion(c: &[BigInt; 4], m: u64) -> Mat4 {
    let mut r = [[0u64; 4]; 4];
    for i in 1..4 {
        r[i][i - 1] = 1 % m;
    }
    for (i, ci) in c.iter().enumerate() {
        r[i][3] = reduce_big(&-ci, m);
    }
    r
}

/// det(t·I − A) mod m, constant term first, by expansion over permutations.
pub fn char_poly(a: &Mat4, m: u64) -> [u64; 5] {
    let mm = m as u128;
    let entry = |i: usize, j: usize| -> [u128; 2] {
        // constant, linear coefficient of (tδ_ij − a_ij)
        let c = (mm - a[i][j] as u128 % mm) % mm;
        [c, if i == j { 1 } else { 0 }]
    };
    let mut out = [0u128; 5];
    let perms = permutations4();
    for (perm, sign) in perms {
        let mut poly = [0u128; 5];
        poly[0] = 1;
        for (i, &j) in perm.iter().enumerate() {
            let e = entry(i, j);
            let mut next = [0u128; 5];
            for d in 0..5 {
                if poly[d] == 0 {
                    continue;
                }
                next[d] = (next[d] + poly[d] * e[0]) % mm;
                if d + 1 < 5 {
                    next[d + 1] = (next[d + 1] + poly[d] * e[1]) % mm;
                }
            }
            poly = next;
        }
        for d in 0..5 {
            out[d] = if sign > 0 { (out[d] + poly[d]) % mm } else { (out[d] + mm - poly[d]) % mm };
        }
    }
    out.map(|x| x as u64)
}

fn permutations4() -> Vec<([usize; 4], i32)> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().any(|&x| std::mem::replace(&mut seen[x], true)) {
                        continue;
                    }
                    let mut inv = 0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if p[i] > p[j] {
                                inv += 1;
                            }
                        }
                    }
                    out.push((p, if inv % 2 == 0 { 1 } else { -1 }));
                }
            }
        }
    }
    out
}

/// Multiplicative order of A in GL4(Z/ℓ^e).
pub fn mult_order(a: &Mat4, ell: u64, e: u32) -> BigUint {
    let m = ell.pow(e);
    let one = eye(m);
    let l = ell as u128;
    // |GL4(F_ℓ)| = ℓ^6 ∏_{i=1..4} (ℓ^i − 1)
    let mut fac = std::collections::BTreeMap::<u128, usize>::new();
    *fac.entry(l).or_default() += 6;
    for i in 1..=4u32 {
        for (r, k) in num_prime::nt_funcs::factorize128(l.pow(i) - 1) {
            *fac.entry(r).or_default() += k;
        }
    }
    let reduced = |x: &Mat4| {
        let mut r = *x;
        for row in r.iter_mut() {
            for v in row.iter_mut() {
                *v %= ell;
            }
        }
        r
    };
    let a1 = reduced(a);
    let id1 = eye(ell);
    let mut ord = BigUint::from(1u32);
    for (r, k) in &fac {
        ord *= BigUint::from(*r).pow(*k as u32);
    }
    for (r, k) in &fac {
        let r = BigUint::from(*r);
        for _ in 0..*k {
            let cand = &ord / &r;
            if (&cand * &r) == ord && mat_pow(&a1, &cand, ell) == id1 {
                ord = cand;
            } else {
                break;
            }
        }
    }
    while mat_pow(a, &ord, m) != one {
        ord *= ell;
    }
    debug_assert!(!ord.is_zero());
    ord
}
