#![allow(dead_code)]

use rand::Rng;

use algmod::algebra::{make_bullet, make_monogenic, product};
use algmod::symmetry::{act, normalize, InvertibleMatrix};
use algmod::{BasedAlgebra, Matrix, Zn};

pub fn field(p: u64) -> Zn {
    Zn::prime_field(p).unwrap()
}

pub fn random_vec<R: Rng>(rng: &mut R, ring: Zn, n: usize) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(0..ring.modulus())).collect()
}

pub fn random_invertible<R: Rng>(rng: &mut R, ring: Zn, n: usize) -> InvertibleMatrix {
    loop {
        let m = Matrix::from_fn(ring, n, n, |_, _| rng.gen_range(0..ring.modulus()));
        if let Ok(m) = InvertibleMatrix::new(m) {
            return m;
        }
    }
}

/// A random element of H: first column `e_1`.
pub fn random_h<R: Rng>(rng: &mut R, ring: Zn, n: usize) -> InvertibleMatrix {
    loop {
        let m = Matrix::from_fn(ring, n, n, |r, c| match (r, c) {
            (0, 0) => 1,
            (_, 0) => 0,
            _ => rng.gen_range(0..ring.modulus()),
        });
        if let Ok(m) = InvertibleMatrix::new(m) {
            return m;
        }
    }
}

/// A random composition of `n` into positive parts.
fn random_composition<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = rng.gen_range(1..=left);
        parts.push(k);
        left -= k;
    }
    parts
}

/// A random normalized algebra of rank `n`: a product of monogenic factors
/// `k[x]/f` with random `f`, or the bullet algebra, put in normalized form
/// and moved by a random element of H.
pub fn random_normalized<R: Rng>(rng: &mut R, ring: Zn, n: usize) -> BasedAlgebra {
    let base = if n >= 3 && rng.gen_bool(0.15) {
        make_bullet(ring, n).unwrap()
    } else {
        let mut factors = random_composition(rng, n)
            .into_iter()
            .map(|k| make_monogenic(ring, &random_vec(rng, ring, k)).unwrap());
        let first = factors.next().unwrap();
        factors.fold(first, |acc, f| product(&acc, &f).unwrap())
    };
    let (base, _) = normalize(&base).unwrap();
    act(&random_h(rng, ring, n), &base).unwrap()
}

/// A random based algebra: a random normalized one moved by a random element
/// of GL.
pub fn random_based<R: Rng>(rng: &mut R, ring: Zn, n: usize) -> BasedAlgebra {
    let a = random_normalized(rng, ring, n);
    act(&random_invertible(rng, ring, n), &a).unwrap()
}
