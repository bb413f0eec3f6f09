#![allow(dead_code)]

use std::path::PathBuf;

use abelsurf::curves::Genus2Curve;
use abelsurf::endoring::{EndoContext, EndoElement};
use abelsurf::ff::FieldCtx;
use abelsurf::orders::OrderLattice;
use abelsurf::Error;
use num_bigint::BigInt;
use num_rational::BigRational;

/// {γ ∈ span_Q(L) : γ ∈ End(A)} by iterated search over denominators ≤ 6.
pub fn brute_force_saturation(ctx: &EndoContext, start: &OrderLattice) -> Result<OrderLattice, Error> {
    let mut lat = start.clone();
    'outer: loop {
        let e = lat.elems();
        for d in 2..=6i64 {
            for idx in 1..d.pow(4) {
                let c: Vec<i64> = (0..4).map(|i| idx / d.pow(i) % d).collect();
                let mut x = ctx.alg.scale(&ctx.alg.one(), &BigRational::from_integer(0.into()));
                for (ci, b) in c.iter().zip(&e) {
                    x = ctx.alg.add(&x, &ctx.alg.scale(b, &BigRational::new(BigInt::from(*ci), BigInt::from(d))));
                }
                if lat.contains(&x) {
                    continue;
                }
                if ctx.el_divisibility_test(&EndoElement::from_qvec(&x))? {
                    lat = lat.with(&[x]);
                    continue 'outer;
                }
            }
        }
        return Ok(lat);
    }
}

/// Prime-field curves of the shared regression corpus.
pub fn corpus() -> Vec<Genus2Curve> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/curves.txt");
    let text = std::fs::read_to_string(&path).unwrap();
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let t: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(t[1], "1", "corpus curves are over prime fields");
            let f: Vec<i64> = t[2].split(',').map(|c| c.parse().unwrap()).collect();
            Genus2Curve::from_i64s(&FieldCtx::prime(t[0].parse().unwrap()).unwrap(), &f).unwrap()
        })
        .collect()
}
