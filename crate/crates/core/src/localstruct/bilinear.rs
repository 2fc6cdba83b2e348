use rayon::prelude::*;

use crate::budget::{Budget, NodeCounter};
use crate::error::{Error, Result};
use crate::exactla::{Subspace, Zn};

/// A symmetric bilinear map `V x V -> W` on coordinate spaces, stored by its
/// values on pairs of basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymBilinearMap {
    ring: Zn,
    dim_v: usize,
    dim_w: usize,
    values: Vec<Vec<u64>>,
}

impl SymBilinearMap {
    /// `values[i * dim_v + j]` is the image of `(e_i, e_j)`.
    pub fn new(ring: Zn, dim_v: usize, dim_w: usize, values: Vec<Vec<u64>>) -> Result<Self> {
        if values.len() != dim_v * dim_v || values.iter().any(|v| v.len() != dim_w) {
            return Err(Error::Dimension(format!(
                "expected {dim_v}x{dim_v} values of length {dim_w}"
            )));
        }
        for v in &values {
            ring.check_reduced(v)?;
        }
        for i in 0..dim_v {
            for j in 0..i {
                if values[i * dim_v + j] != values[j * dim_v + i] {
                    return Err(Error::Precondition(format!(
                        "map is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(SymBilinearMap {
            ring,
            dim_v,
            dim_w,
            values,
        })
    }

    /// Builds the map from a function on basis pairs `i <= j`.
    pub fn from_fn(
        ring: Zn,
        dim_v: usize,
        dim_w: usize,
        mut f: impl FnMut(usize, usize) -> Vec<u64>,
    ) -> Result<Self> {
        let mut values = vec![Vec::new(); dim_v * dim_v];
        for i in 0..dim_v {
            for j in i..dim_v {
                let v = f(i, j);
                values[i * dim_v + j] = v.clone();
                values[j * dim_v + i] = v;
            }
        }
        SymBilinearMap::new(ring, dim_v, dim_w, values)
    }

    pub fn ring(&self) -> Zn {
        self.ring
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_w(&self) -> usize {
        self.dim_w
    }

    pub fn value(&self, i: usize, j: usize) -> &[u64] {
        &self.values[i * self.dim_v + j]
    }

    pub fn eval(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.dim_w];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj != 0 {
                    self.ring
                        .axpy(&mut out, self.ring.mul(ui, vj), self.value(i, j));
                }
            }
        }
        out
    }

    /// `(U, U)` for the span `U` of `vectors`.
    pub fn image_of(&self, vectors: &[Vec<u64>]) -> Result<Subspace> {
        let mut out = Subspace::zero(self.ring, self.dim_w);
        for (a, u) in vectors.iter().enumerate() {
            for v in &vectors[a..] {
                out.insert(&self.eval(u, v))?;
            }
        }
        Ok(out)
    }

    pub fn image(&self, u: &Subspace) -> Result<Subspace> {
        self.image_of(u.basis())
    }

    pub fn full_image(&self) -> Result<Subspace> {
        self.image(&Subspace::full(self.ring, self.dim_v))
    }

    /// The map on `U` (coordinates along `U`'s echelon basis) with values in
    /// `W`.
    pub fn restrict(&self, u: &Subspace) -> Result<SymBilinearMap> {
        let b = u.basis();
        SymBilinearMap::from_fn(self.ring, b.len(), self.dim_w, |i, j| {
            self.eval(&b[i], &b[j])
        })
    }

    /// The map on `U` with values in `(U, U)`, each coordinatized by its
    /// echelon basis.
    pub fn restrict_onto_image(&self, u: &Subspace) -> Result<SymBilinearMap> {
        let img = self.image(u)?;
        let b = u.basis();
        let vals: Vec<Vec<u64>> = (0..b.len() * b.len())
            .map(|k| {
                img.coords(&self.eval(&b[k / b.len()], &b[k % b.len()]))
                    .expect("inside the image")
            })
            .collect();
        SymBilinearMap::new(self.ring, b.len(), img.dim(), vals)
    }
}

/// A subspace `U` of least dimension with `(U, U) = (V, V)`; among those of
/// that dimension, the first in echelon order.
pub fn min_generating_subspace(f: &SymBilinearMap, budget: Budget) -> Result<Subspace> {
    let ring = f.ring();
    let target = f.full_image()?;
    for k in 0..=f.dim_v() {
        if k * (k + 1) / 2 < target.dim() {
            continue;
        }
        let all = Subspace::all_of_dim(ring, f.dim_v(), k, budget)?;
        let hit = all
            .par_iter()
            .map(|u| f.image(u).map(|img| img == target))
            .collect::<Result<Vec<bool>>>()?
            .iter()
            .position(|&ok| ok);
        if let Some(i) = hit {
            return Ok(all[i].clone());
        }
    }
    unreachable!("V itself generates (V, V)")
}

/// Whether `x_1..x_m` satisfies `(x_i, x_{i+1}) ∉ (V_i, V_i)` for all `i < m`.
pub fn is_good_chain(f: &SymBilinearMap, basis: &[Vec<u64>]) -> Result<bool> {
    for i in 1..basis.len() {
        let vi = f.image_of(&basis[..i])?;
        if vi.contains(&f.eval(&basis[i - 1], &basis[i])) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Vectors whose first nonzero entry is 1, in lexicographic order.
fn projective_points(ring: Zn, dim: usize) -> Vec<Vec<u64>> {
    (0..ring.count_vectors(dim))
        .map(|i| ring.decode_vec(i, dim))
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

/// A basis `x_1..x_m` of `V` with `(x_i, x_{i+1}) ∉ (V_i, V_i)`, found by
/// backtracking over projective points and re-checked before returning.
///
/// Requires `(V, V) = W` and no proper subspace `U` with `(U, U) = W`.
pub fn good_basis(f: &SymBilinearMap, budget: Budget) -> Result<Vec<Vec<u64>>> {
    let ring = f.ring();
    let m = f.dim_v();
    if !f.full_image()?.is_full() {
        return Err(Error::Precondition("(V, V) is not all of W".into()));
    }
    if m > 0 {
        for h in Subspace::all_of_dim(ring, m, m - 1, budget)? {
            if f.image(&h)?.is_full() {
                return Err(Error::Precondition(
                    "a proper subspace of V already generates W".into(),
                ));
            }
        }
    }
    let points = projective_points(ring, m);
    let counter = NodeCounter::new(budget);
    let mut chain: Vec<Vec<u64>> = Vec::new();
    if !extend_chain(f, &points, &mut chain, &Subspace::zero(ring, m), &counter)? {
        return Err(Error::Precondition(
            "no good basis exists for this map".into(),
        ));
    }
    if !is_good_chain(f, &chain)? {
        return Err(Error::Inconsistent(
            "good basis failed re-verification".into(),
        ));
    }
    Ok(chain)
}

fn extend_chain(
    f: &SymBilinearMap,
    points: &[Vec<u64>],
    chain: &mut Vec<Vec<u64>>,
    span: &Subspace,
    counter: &NodeCounter,
) -> Result<bool> {
    if chain.len() == f.dim_v() {
        return Ok(true);
    }
    let wi = f.image_of(chain)?;
    for x in points {
        counter.tick()?;
        if span.contains(x) {
            continue;
        }
        if let Some(prev) = chain.last() {
            if wi.contains(&f.eval(prev, x)) {
                continue;
            }
        }
        let mut next = span.clone();
        next.insert(x)?;
        chain.push(x.clone());
        if extend_chain(f, points, chain, &next, counter)? {
            return Ok(true);
        }
        chain.pop();
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Zn {
        Zn::prime_field(p).unwrap()
    }

    /// Multiplication `m/m^2 x m/m^2 -> m^2/m^3` of `k[x, y]/m^3`: monomials
    /// `x^2, xy, y^2`.
    fn plane(ring: Zn) -> SymBilinearMap {
        SymBilinearMap::from_fn(ring, 2, 3, |i, j| {
            let mut v = vec![0; 3];
            v[i + j] = 1;
            v
        })
        .unwrap()
    }

    #[test]
    fn zero_map_needs_nothing() {
        let z = SymBilinearMap::from_fn(f(2), 3, 2, |_, _| vec![0, 0]).unwrap();
        assert!(min_generating_subspace(&z, Budget::default())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn diagonal_map_needs_everything() {
        let d = SymBilinearMap::from_fn(f(2), 2, 2, |i, j| {
            let mut v = vec![0, 0];
            if i == j {
                v[i] = 1;
            }
            v
        })
        .unwrap();
        assert_eq!(
            min_generating_subspace(&d, Budget::default())
                .unwrap()
                .dim(),
            2
        );
    }

    #[test]
    fn plane_has_a_good_basis() {
        for q in [2, 3, 5] {
            let m = plane(f(q));
            let b = good_basis(&m, Budget::default()).unwrap();
            assert_eq!(b.len(), 2);
            assert!(is_good_chain(&m, &b).unwrap());
        }
    }

    #[test]
    fn single_vector_basis() {
        let m = SymBilinearMap::from_fn(f(3), 1, 1, |_, _| vec![1]).unwrap();
        assert_eq!(good_basis(&m, Budget::default()).unwrap(), vec![vec![1]]);
    }

    #[test]
    fn redundant_generators_are_rejected() {
        let m =
            SymBilinearMap::from_fn(f(2), 2, 1, |i, j| vec![u64::from(i == 0 && j == 0)]).unwrap();
        assert!(matches!(
            good_basis(&m, Budget::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn asymmetric_values_are_rejected() {
        let vals = vec![vec![0], vec![1], vec![0], vec![0]];
        assert!(SymBilinearMap::new(f(2), 2, 1, vals).is_err());
    }
}
