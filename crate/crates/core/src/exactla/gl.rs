//! Exhaustive iteration over GL_n(F_q) and over the subgroup H of matrices
//! whose first column is `(1, 0, ..., 0)`.
//!
//! Both iterators walk candidate matrices in lexicographic order of their
//! row-major entry vectors and yield the invertible ones.

use super::matrix::Matrix;
use super::zn::Zn;
use crate::budget::Budget;
use crate::error::Result;

/// `|GL_n(F_q)| = prod_{i<n} (q^n - q^i)`; 1 for `n = 0`.
pub fn gl_order(n: usize, q: u64) -> u128 {
    let q = q as u128;
    let qn = q.pow(n as u32);
    (0..n as u32).map(|i| qn - q.pow(i)).product()
}

/// `|H| = q^(n-1) |GL_{n-1}(F_q)|`; 1 for `n = 0`.
pub fn h_order(n: usize, q: u64) -> u128 {
    if n == 0 {
        return 1;
    }
    (q as u128).pow(n as u32 - 1) * gl_order(n - 1, q)
}

pub struct GlIter {
    ring: Zn,
    n: usize,
    next: u128,
    end: u128,
    free: Vec<usize>,
    fixed: Vec<(usize, u64)>,
}

impl Iterator for GlIter {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        while self.next < self.end {
            let values = self.ring.decode_vec(self.next, self.free.len());
            self.next += 1;
            let mut data = vec![0u64; self.n * self.n];
            for &(pos, v) in &self.fixed {
                data[pos] = v;
            }
            for (&pos, v) in self.free.iter().zip(values) {
                data[pos] = v;
            }
            let m = Matrix::from_flat(self.ring, self.n, self.n, data).expect("reduced entries");
            if m.is_invertible() {
                return Some(m);
            }
        }
        None
    }
}

/// Every element of GL_n(F_q), each exactly once.
pub fn iterate_gl(n: usize, ring: Zn, budget: Budget) -> Result<GlIter> {
    ring.require_field()?;
    let free: Vec<usize> = (0..n * n).collect();
    let end = ring.count_vectors(free.len());
    budget.check(end)?;
    Ok(GlIter {
        ring,
        n,
        next: 0,
        end,
        free,
        fixed: Vec::new(),
    })
}

/// Every element of H (first column `e_1`), each exactly once.
pub fn iterate_h(n: usize, ring: Zn, budget: Budget) -> Result<GlIter> {
    ring.require_field()?;
    let mut free = Vec::new();
    let mut fixed = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c == 0 {
                fixed.push((r * n, u64::from(r == 0)));
            } else {
                free.push(r * n + c);
            }
        }
    }
    let end = ring.count_vectors(free.len());
    budget.check(end)?;
    Ok(GlIter {
        ring,
        n,
        next: 0,
        end,
        free,
        fixed,
    })
}

/// A generating set for H: transvections and one diagonal generator per
/// coordinate, enough to reach every element by products.
pub fn h_generators(n: usize, ring: Zn) -> Vec<Matrix> {
    let mut gens = Vec::new();
    let p = ring.modulus();
    let primitive = (2..p).find(|&g| (1..p - 1).all(|e| ring.pow(g, e) != 1));
    for r in 0..n {
        for c in 1..n {
            if r != c {
                let mut m = Matrix::identity(ring, n);
                m.set(r, c, 1);
                gens.push(m);
            }
        }
    }
    if let Some(g) = primitive {
        for i in 1..n {
            let mut m = Matrix::identity(ring, n);
            m.set(i, i, g);
            gens.push(m);
        }
    }
    gens
}
