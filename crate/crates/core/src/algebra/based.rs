use super::table::{StructureTable, Violation};
use crate::error::{Error, Result};
use crate::exactla::{Coeff, Matrix, Subspace, Zn};

/// A structure table known to satisfy commutativity, associativity and the
/// unit law, with cached left-multiplication operators and traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedAlgebra {
    table: StructureTable,
    mult_ops: Vec<Matrix>,
    trace_vec: Vec<u64>,
    normalized: bool,
}

/// Checks every defining identity. On failure the full violation list is
/// returned.
pub fn validate(table: StructureTable) -> std::result::Result<BasedAlgebra, Vec<Violation>> {
    let v = table.violations();
    if v.is_empty() {
        Ok(BasedAlgebra::assume_valid(table))
    } else {
        Err(v)
    }
}

impl BasedAlgebra {
    pub fn new(table: StructureTable) -> Result<Self> {
        validate(table).map_err(Error::Invalid)
    }

    /// Wraps a table whose validity is already established by construction.
    pub(crate) fn assume_valid(table: StructureTable) -> Self {
        debug_assert!(table.is_valid(), "{table:?}");
        let n = table.n();
        let ring = table.ring();
        let mult_ops = (0..n)
            .map(|i| Matrix::from_fn(ring, n, n, |l, j| table.get(i, j, l)))
            .collect();
        let trace_vec = (0..n)
            .map(|m| (0..n).fold(0, |acc, l| ring.add(acc, table.get(m, l, l))))
            .collect();
        let normalized = table.is_normalized();
        BasedAlgebra {
            table,
            mult_ops,
            trace_vec,
            normalized,
        }
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn into_table(self) -> StructureTable {
        self.table
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn ring(&self) -> Zn {
        self.table.ring()
    }

    pub fn one(&self) -> &[u64] {
        self.table.identity()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn mult_op(&self, i: usize) -> &Matrix {
        &self.mult_ops[i]
    }

    pub fn trace_vec(&self) -> &[u64] {
        &self.trace_vec
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.n()];
        v[i] = 1;
        v
    }

    fn check_vec(&self, v: &[u64]) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::Dimension(format!(
                "vector of length {} in a rank-{} algebra",
                v.len(),
                self.n()
            )));
        }
        self.ring().check_reduced(v)
    }

    pub fn multiply(&self, u: &[u64], v: &[u64]) -> Result<Vec<u64>> {
        self.check_vec(u)?;
        self.check_vec(v)?;
        Ok(self.table.multiply(u, v))
    }

    /// Product of vectors already known to be well-formed.
    pub(crate) fn mul(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        self.table.multiply(u, v)
    }

    pub fn power(&self, v: &[u64], k: u64) -> Vec<u64> {
        let mut acc = self.one().to_vec();
        let mut base = v.to_vec();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Matrix of `x -> v x` in the basis.
    pub fn left_mult_matrix(&self, v: &[u64]) -> Matrix {
        let n = self.n();
        let ring = self.ring();
        let mut data = vec![0u64; n * n];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0 {
                ring.axpy(&mut data, vi, self.mult_ops[i].as_flat());
            }
        }
        Matrix::from_flat(ring, n, n, data).expect("shape")
    }

    /// Trace of multiplication by `v`.
    pub fn trace(&self, v: &[u64]) -> u64 {
        self.ring().dot(&self.trace_vec, v)
    }

    /// Gram matrix `Tr(e_i e_j)`.
    pub fn trace_form(&self) -> Matrix {
        let n = self.n();
        Matrix::from_fn(self.ring(), n, n, |i, j| {
            self.trace(self.table.product(i, j))
        })
    }

    pub fn discriminant(&self) -> Coeff {
        let det = self.trace_form().det().expect("square");
        Coeff::new(det, self.ring())
    }

    /// Δ is a unit of the coefficient ring.
    pub fn is_etale(&self) -> bool {
        self.ring().is_unit(self.discriminant().value())
    }

    /// Whether the monomials of degree at most `n - 1` in `gens` span the algebra.
    pub fn generates(&self, gens: &[Vec<u64>]) -> Result<bool> {
        for g in gens {
            self.check_vec(g)?;
        }
        let n = self.n();
        let ring = self.ring();
        let mut span = Subspace::span(ring, n, &[self.one().to_vec()])?;
        for _ in 1..n {
            let mut next = span.clone();
            for b in span.basis() {
                for g in gens {
                    next.insert(&self.mul(b, g))?;
                }
            }
            if next == span {
                break;
            }
            span = next;
        }
        Ok(span.is_full())
    }

    /// Weighted scaling: `t^2` on cells `c_ij^1`, `t` on the other cells with
    /// `i, j >= 2` (1-based); the identity row and column are untouched.
    pub fn scale_weighted(&self, t: u64) -> Result<StructureTable> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        let ring = self.ring();
        let t = ring.reduce(t);
        let t2 = ring.mul(t, t);
        let mut out = self.table.clone();
        let n = self.n();
        for i in 1..n {
            for j in 1..n {
                for l in 0..n {
                    let w = if l == 0 { t2 } else { t };
                    out.set(i, j, l, ring.mul(w, self.table.get(i, j, l)));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_bullet, make_monogenic, make_split};

    fn f(p: u64) -> Zn {
        Zn::prime_field(p).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let a = make_monogenic(f(5), &[2, 0, 1]).unwrap();
        let v = vec![3, 1, 4];
        assert_eq!(a.multiply(a.one(), &v).unwrap(), v);
    }

    #[test]
    fn bullet_products_vanish() {
        let a = make_bullet(f(2), 3).unwrap();
        assert_eq!(a.multiply(&[0, 1, 0], &[0, 0, 1]).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn f4_squaring_and_discriminant() {
        let a = make_monogenic(f(2), &[1, 1]).unwrap();
        assert_eq!(a.multiply(&[0, 1], &[0, 1]).unwrap(), vec![1, 1]);
        // trace of multiplication by each basis vector, read off the operator matrices
        let tr: Vec<u64> = (0..2)
            .map(|i| (0..2).map(|k| a.mult_op(i).get(k, k)).sum::<u64>() % 2)
            .collect();
        assert_eq!(tr, vec![0, 1]);
        assert_eq!(a.trace_form().row_vecs(), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(a.discriminant().value(), 1);
        assert!(a.is_etale());
    }

    #[test]
    fn split_and_bullet_discriminants() {
        for q in [2, 3, 5] {
            for n in 2..=6 {
                assert_eq!(make_split(f(q), n).unwrap().discriminant().value(), 1);
                assert!(make_bullet(f(q), n).unwrap().discriminant().is_zero());
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let a = make_split(f(3), 2).unwrap();
        assert!(matches!(
            a.multiply(&[1], &[1, 0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn scaling_by_one_and_zero() {
        let a = make_monogenic(f(5), &[1, 2, 3]).unwrap();
        assert_eq!(&a.scale_weighted(1).unwrap(), a.table());
        assert_eq!(
            a.scale_weighted(0).unwrap(),
            *make_bullet(f(5), 3).unwrap().table()
        );
        let s = make_split(f(5), 3).unwrap();
        assert!(matches!(s.scale_weighted(2), Err(Error::NotNormalized)));
    }

    #[test]
    fn generation_in_small_cases() {
        let b = make_bullet(f(2), 4).unwrap();
        let e = |i| b.basis_vector(i);
        assert!(b.generates(&[e(1), e(2), e(3)]).unwrap());
        assert!(!b.generates(&[e(1), e(2)]).unwrap());
        let c = make_monogenic(f(2), &[0, 0, 0]).unwrap();
        assert!(c.generates(&[c.basis_vector(1)]).unwrap());
    }
}
