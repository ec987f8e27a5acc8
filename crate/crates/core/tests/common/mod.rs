//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vak::maps::PolyMap;
use vak::sets::FiniteUnionSet;
use vak::{ConvexPolyhedron, Rational, Scalar};

pub fn q(v: i64) -> Rational {
    Rational::from_i64(v)
}

pub fn zeros(k: usize) -> Vec<Rational> {
    vec![q(0); k]
}

pub fn row(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| q(rng.gen_range(-2..=2))).collect()
}

/// Conic polyhedral map with a linear-subspace restriction, both through
/// the origin, `n, m ≤ 2`.
pub fn battery_instance(seed: u64) -> (PolyMap<Rational>, ConvexPolyhedron<Rational>, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let pieces = (0..rng.gen_range(1..=2))
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let a: Vec<_> = (0..k).map(|_| row(&mut rng, n + m)).collect();
            let e = rng.gen_range(0..=1);
            let c: Vec<_> = (0..e).map(|_| row(&mut rng, n + m)).collect();
            ConvexPolyhedron::from_hrep(n + m, a, vec![q(0); k], c, vec![q(0); e]).unwrap()
        })
        .collect();
    let x = random_affine_set(&mut rng, n).pieces()[0].clone();
    (PolyMap::from_pieces(n, m, pieces).unwrap(), x, n, m)
}

/// Random map `R^n ⇉ R^k` whose graph pieces are cones cut by a box.
pub fn random_map(rng: &mut ChaCha8Rng, n: usize, k: usize, convex: bool) -> PolyMap<Rational> {
    let d = n + k;
    let count = if convex { 1 } else { rng.gen_range(1..=2) };
    let pieces = (0..count)
        .map(|_| {
            let rows = rng.gen_range(1..=2);
            let mut a: Vec<Vec<Rational>> = (0..rows).map(|_| row(rng, d)).collect();
            let mut b = vec![q(0); rows];
            for i in 0..d {
                let mut e = vec![q(0); d];
                e[i] = q(1);
                a.push(e.clone());
                b.push(q(1));
                e[i] = q(-1);
                a.push(e);
                b.push(q(1));
            }
            ConvexPolyhedron::from_hrep(d, a, b, vec![], vec![]).unwrap()
        })
        .collect();
    PolyMap::from_pieces(n, k, pieces).unwrap()
}

/// A linear subspace of `R^n` of codimension below `n`.
pub fn random_affine_set(rng: &mut ChaCha8Rng, n: usize) -> FiniteUnionSet<Rational> {
    let e = rng.gen_range(0..n);
    let c: Vec<_> = (0..e).map(|_| row(rng, n)).collect();
    FiniteUnionSet::from_polyhedron(ConvexPolyhedron::from_hrep(n, vec![], vec![], c, vec![q(0); e]).unwrap())
}
