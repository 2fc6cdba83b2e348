//! Nilradical, idempotents and local factors, the m-adic filtration,
//! symmetric bilinear maps, and canonical data for local algebras.

mod bilinear;
mod canonical;

pub use bilinear::{good_basis, is_good_chain, min_generating_subspace, SymBilinearMap};
pub use canonical::{extract_canonical, reconstruct, CanonicalData, CanonicalJson};

use crate::algebra::{BasedAlgebra, StructureTable};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactla::{rre_form, solve_affine, Matrix, Subspace};

/// Nilpotent elements, as the kernel of `x -> x^(p^k)` for the least
/// `p^k >= n`. That map is additive and F_p-linear in characteristic `p`.
pub fn nilradical(a: &BasedAlgebra) -> Result<Subspace> {
    let ring = a.ring();
    ring.require_field()?;
    let n = a.n();
    let p = ring.modulus();
    let mut e = 1u64;
    while (e as usize) < n {
        e *= p;
    }
    let cols: Vec<Vec<u64>> = (0..n).map(|i| a.power(&a.basis_vector(i), e)).collect();
    let frob = Matrix::from_columns(ring, n, &cols);
    Ok(rre_form(&frob)?.kernel)
}

/// Span of all products `x y` with `x` in `s` and `y` in `t`.
pub fn product_space(a: &BasedAlgebra, s: &Subspace, t: &Subspace) -> Result<Subspace> {
    let mut out = Subspace::zero(a.ring(), a.n());
    for x in s.basis() {
        for y in t.basis() {
            out.insert(&a.mul(x, y))?;
        }
    }
    Ok(out)
}

/// `dim A/N, dim N/N^2, dim N^2/N^3, ...` for the nilradical `N`, ending at the
/// last nonzero power.
pub fn radical_filtration(a: &BasedAlgebra) -> Result<Vec<usize>> {
    let nil = nilradical(a)?;
    let mut dims = vec![a.n() - nil.dim()];
    let mut cur = nil.clone();
    while !cur.is_zero() {
        let next = product_space(a, &cur, &nil)?;
        dims.push(cur.dim() - next.dim());
        cur = next;
    }
    Ok(dims)
}

/// The m-adic filtration of a local algebra with residue field F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    /// `m_i = dim m^i / m^(i+1)`, with `m_0 = 1`.
    pub dims: Vec<usize>,
    /// `m^0 = A, m^1, ..., m^t`, all nonzero.
    pub powers: Vec<Subspace>,
}

pub fn filtration(a: &BasedAlgebra) -> Result<Filtration> {
    let nil = nilradical(a)?;
    if a.n() == 0 || nil.dim() + 1 != a.n() {
        return Err(Error::NotLocal);
    }
    let mut powers = vec![Subspace::full(a.ring(), a.n())];
    let mut cur = nil.clone();
    while !cur.is_zero() {
        let next = product_space(a, &cur, &nil)?;
        powers.push(cur);
        cur = next;
    }
    let dims = (0..powers.len())
        .map(|i| powers[i].dim() - powers.get(i + 1).map_or(0, |s| s.dim()))
        .collect();
    Ok(Filtration { dims, powers })
}

/// All idempotents, in lexicographic order, by exhaustive scan.
pub fn idempotents(a: &BasedAlgebra, budget: Budget) -> Result<Vec<Vec<u64>>> {
    let ring = a.ring();
    let size = ring.count_vectors(a.n());
    budget.check(size)?;
    Ok((0..size)
        .map(|i| ring.decode_vec(i, a.n()))
        .filter(|x| a.mul(x, x) == *x)
        .collect())
}

/// Nonzero idempotents that are not a sum of two nonzero orthogonal ones.
pub fn primitive_idempotents(a: &BasedAlgebra, budget: Budget) -> Result<Vec<Vec<u64>>> {
    let all = idempotents(a, budget)?;
    let zero = vec![0u64; a.n()];
    Ok(all
        .iter()
        .filter(|e| **e != zero)
        .filter(|e| {
            !all.iter()
                .any(|f| *f != zero && f != *e && a.mul(f, e) == *f)
        })
        .cloned()
        .collect())
}

/// The algebra `eA` for an idempotent `e`, on the echelon basis of `eA`.
pub fn corner(a: &BasedAlgebra, e: &[u64]) -> Result<BasedAlgebra> {
    let ring = a.ring();
    let n = a.n();
    let vecs: Vec<Vec<u64>> = (0..n).map(|i| a.mul(e, &a.basis_vector(i))).collect();
    let space = Subspace::span(ring, n, &vecs)?;
    let k = space.dim();
    let basis = space.basis().to_vec();
    let mut t = StructureTable::new(
        ring,
        k,
        vec![0; k * k * k],
        space.coords(e).expect("e lies in eA"),
    )?;
    for i in 0..k {
        for j in 0..k {
            let prod = a.mul(&basis[i], &basis[j]);
            t.set_product(i, j, &space.coords(&prod).expect("eA is closed"));
        }
    }
    BasedAlgebra::new(t)
}

/// Local factors `eA` for the primitive idempotents `e`, in lexicographic
/// order of `e`.
pub fn decompose_local(a: &BasedAlgebra, budget: Budget) -> Result<Vec<BasedAlgebra>> {
    primitive_idempotents(a, budget)?
        .iter()
        .map(|e| corner(a, e))
        .collect()
}

pub fn is_local(a: &BasedAlgebra, budget: Budget) -> Result<bool> {
    Ok(a.n() > 0 && idempotents(a, budget)?.len() == 2)
}

/// Coordinates of `x` modulo `sub` against `reps`, or `None` if `x` is not
/// in `span(reps) + sub`.
pub(crate) fn quotient_coords(
    x: &[u64],
    reps: &[Vec<u64>],
    sub: &Subspace,
) -> Result<Option<Vec<u64>>> {
    let ring = sub.ring();
    let mut cols = reps.to_vec();
    cols.extend(sub.basis().iter().cloned());
    if cols.is_empty() {
        return Ok(x.iter().all(|&v| v == 0).then(Vec::new));
    }
    let m = Matrix::from_columns(ring, x.len(), &cols);
    Ok(solve_affine(&m, x)?
        .solution()
        .map(|s| s[..reps.len()].to_vec()))
}
