//! The GL_n action on based algebras, isomorphism search, automorphism groups.
//!
//! A matrix `M` acts by `μ'(x, y) = M μ(M⁻¹x, M⁻¹y)` and `d' = M d`, so a
//! witness `M` with `act(M, A) = B` is the coordinate matrix of an algebra
//! isomorphism `A -> B`.
//!
//! Isomorphism search normalizes both sides (first basis vector = 1) and then
//! looks for an element of H, the matrices with first column `e_1`, column by
//! column. Candidate images of each basis vector are restricted to elements
//! with the same rank profile, a column is computed directly whenever a product
//! of earlier basis vectors determines it, and every product whose factors and
//! expansion are already placed is checked immediately. Candidates are tried in
//! lexicographic order, so the H-part of the reported witness is the least
//! valid one in column-major lexicographic order.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{BasedAlgebra, StructureTable};
use crate::budget::{Budget, NodeCounter};
use crate::error::{Error, Result};
use crate::exactla::{iterate_gl, Matrix, Subspace, Zn};
use crate::localstruct::radical_filtration;

/// A matrix together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvertibleMatrix {
    mat: Matrix,
    inv: Matrix,
}

impl InvertibleMatrix {
    pub fn new(mat: Matrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix is not square",
                mat.rows(),
                mat.cols()
            )));
        }
        let inv = mat.inverse().ok_or(Error::Singular)?;
        Ok(InvertibleMatrix { mat, inv })
    }

    pub fn identity(ring: Zn, n: usize) -> Self {
        let id = Matrix::identity(ring, n);
        InvertibleMatrix {
            mat: id.clone(),
            inv: id,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn inverse_matrix(&self) -> &Matrix {
        &self.inv
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn ring(&self) -> Zn {
        self.mat.ring()
    }

    pub fn inverse(&self) -> InvertibleMatrix {
        InvertibleMatrix {
            mat: self.inv.clone(),
            inv: self.mat.clone(),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &InvertibleMatrix) -> Result<InvertibleMatrix> {
        Ok(InvertibleMatrix {
            mat: self.mat.mul(&other.mat)?,
            inv: other.inv.mul(&self.inv)?,
        })
    }

    pub fn det(&self) -> u64 {
        self.mat.det().expect("square")
    }
}

fn check_compatible(m: &InvertibleMatrix, t: &StructureTable) -> Result<()> {
    if m.ring() != t.ring() {
        return Err(Error::RingMismatch(m.ring().modulus(), t.ring().modulus()));
    }
    if m.n() != t.n() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix acting on rank {}",
            m.n(),
            m.n(),
            t.n()
        )));
    }
    Ok(())
}

/// Transformed table, without revalidation.
pub fn act_table(m: &InvertibleMatrix, t: &StructureTable) -> Result<StructureTable> {
    check_compatible(m, t)?;
    let n = t.n();
    let ring = t.ring();
    let q = ring.modulus();
    let p = &m.inv;
    let mm = &m.mat;
    // t1[a][j][l] = sum_b P[b][j] c[a][b][l]
    let mut t1 = vec![0u64; n * n * n];
    for a in 0..n {
        for b in 0..n {
            let row = t.product(a, b);
            for j in 0..n {
                let s = p.get(b, j);
                if s == 0 {
                    continue;
                }
                let dst = &mut t1[(a * n + j) * n..(a * n + j + 1) * n];
                for l in 0..n {
                    dst[l] = (dst[l] + s * row[l]) % q;
                }
            }
        }
    }
    // t2[i][j][k] = sum_a P[a][i] t1[a][j][k]
    let mut t2 = vec![0u64; n * n * n];
    for a in 0..n {
        for i in 0..n {
            let s = p.get(a, i);
            if s == 0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    let idx = (i * n + j) * n + k;
                    t2[idx] = (t2[idx] + s * t1[(a * n + j) * n + k]) % q;
                }
            }
        }
    }
    let mut c = vec![0u64; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let src = &t2[(i * n + j) * n..(i * n + j + 1) * n];
            for l in 0..n {
                let mut s = 0u64;
                for k in 0..n {
                    s = (s + mm.get(l, k) * src[k]) % q;
                }
                c[(i * n + j) * n + l] = s;
            }
        }
    }
    let d = mm.mul_vec(t.identity())?;
    StructureTable::new(ring, n, c, d)
}

/// `M · A`.
pub fn act(m: &InvertibleMatrix, a: &BasedAlgebra) -> Result<BasedAlgebra> {
    Ok(BasedAlgebra::assume_valid(act_table(m, a.table())?))
}

/// Basis change to normal form over a field: the new basis is `d` followed by
/// the old basis vectors, with `e_1` taking the slot of the first index where
/// `d` is nonzero. Returns the normalized algebra and the matrix `M` with
/// `act(M, A)` equal to it.
pub fn normalize(a: &BasedAlgebra) -> Result<(BasedAlgebra, InvertibleMatrix)> {
    let ring = a.ring();
    ring.require_field()?;
    let n = a.n();
    if n == 0 || a.is_normalized() {
        return Ok((a.clone(), InvertibleMatrix::identity(ring, n)));
    }
    let d = a.one();
    let pivot = d
        .iter()
        .position(|&x| x != 0)
        .expect("identity is nonzero in a nonzero algebra");
    let mut cols: Vec<Vec<u64>> = (0..n).map(|i| a.basis_vector(i)).collect();
    cols[pivot] = a.basis_vector(0);
    cols[0] = d.to_vec();
    let p = InvertibleMatrix::new(Matrix::from_columns(ring, n, &cols))?;
    let m = p.inverse();
    let out = act(&m, a)?;
    debug_assert!(out.is_normalized());
    Ok((out, m))
}

/// Rank profile of an element: ranks of multiplication by `x - λ` and by
/// `(x - λ)^2` for every `λ` in the prime field. Preserved by isomorphisms.
pub fn element_signature(a: &BasedAlgebra, x: &[u64]) -> Vec<u16> {
    let ring = a.ring();
    let mut sig = Vec::with_capacity(2 * ring.modulus() as usize);
    for lambda in ring.elements() {
        let shifted = ring.sub_vec(x, &ring.scale_vec(lambda, a.one()));
        let sq = a.mul(&shifted, &shifted);
        sig.push(a.left_mult_matrix(&shifted).rank().expect("field") as u16);
        sig.push(a.left_mult_matrix(&sq).rank().expect("field") as u16);
    }
    sig
}

/// Isomorphism invariants compared before any search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSignature {
    pub etale: bool,
    /// `dim N^i / N^(i+1)` for the nilradical `N`, starting at `i = 0`.
    pub radical_dims: Vec<usize>,
    /// Number of idempotents, when the algebra is small enough to scan.
    pub idempotents: Option<usize>,
    /// Multiset of element rank profiles, when small enough to scan.
    pub profile: Option<BTreeMap<Vec<u16>, usize>>,
}

/// Largest `q^n` for which element-level invariants are computed.
pub const ELEMENT_SCAN_LIMIT: u128 = 1 << 16;

pub fn signature(a: &BasedAlgebra) -> Result<AlgebraSignature> {
    let ring = a.ring();
    ring.require_field()?;
    let size = ring.count_vectors(a.n());
    let (idempotents, profile) = if size <= ELEMENT_SCAN_LIMIT {
        let mut idem = 0;
        let mut prof = BTreeMap::new();
        for idx in 0..size {
            let x = ring.decode_vec(idx, a.n());
            if a.mul(&x, &x) == x {
                idem += 1;
            }
            *prof.entry(element_signature(a, &x)).or_insert(0) += 1;
        }
        (Some(idem), Some(prof))
    } else {
        (None, None)
    };
    Ok(AlgebraSignature {
        etale: a.is_etale(),
        radical_dims: radical_filtration(a)?,
        idempotents,
        profile,
    })
}

fn check_pair(a: &BasedAlgebra, b: &BasedAlgebra) -> Result<()> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch(a.ring().modulus(), b.ring().modulus()));
    }
    if a.n() != b.n() {
        return Err(Error::Dimension(format!(
            "ranks {} and {} differ",
            a.n(),
            b.n()
        )));
    }
    a.ring().require_field()
}

/// Column-by-column search for algebra maps from a normalized `src` onto a
/// normalized `dst` fixing the identity.
struct HSearch<'a> {
    src: &'a BasedAlgebra,
    dst: &'a BasedAlgebra,
    /// Candidate images of `e_k`, in lexicographic order.
    cands: Vec<Vec<Vec<u64>>>,
    /// A pair `(i, j)` with `i, j < k` whose product determines column `k`.
    forced: Vec<Option<(usize, usize)>>,
    /// Products checkable once column `k` is placed.
    checks: Vec<Vec<(usize, usize)>>,
    counter: NodeCounter,
}

impl<'a> HSearch<'a> {
    fn new(src: &'a BasedAlgebra, dst: &'a BasedAlgebra, budget: Budget) -> Result<Option<Self>> {
        let n = src.n();
        let ring = src.ring();
        let t = src.table();
        let top = |i: usize, j: usize| t.product(i, j).iter().rposition(|&x| x != 0);
        let mut forced = vec![None; n];
        let mut checks = vec![Vec::new(); n];
        for i in 1..n {
            for j in i..n {
                let level = top(i, j).map_or(j, |s| s.max(j));
                checks[level].push((i, j));
                if let Some(s) = top(i, j) {
                    if s > j && forced[s].is_none() {
                        forced[s] = Some((i, j));
                    }
                }
            }
        }
        let size = ring.count_vectors(n);
        budget.check(size)?;
        let src_sigs: Vec<Vec<u16>> = (0..n)
            .map(|k| element_signature(src, &src.basis_vector(k)))
            .collect();
        let mut cands = vec![Vec::new(); n];
        let needed: Vec<usize> = (1..n).filter(|&k| forced[k].is_none()).collect();
        if !needed.is_empty() {
            let elements: Vec<(Vec<u64>, Vec<u16>)> = (0..size)
                .into_par_iter()
                .map(|idx| {
                    let y = ring.decode_vec(idx, n);
                    let s = element_signature(dst, &y);
                    (y, s)
                })
                .collect();
            for &k in &needed {
                cands[k] = elements
                    .iter()
                    .filter(|(_, s)| *s == src_sigs[k])
                    .map(|(y, _)| y.clone())
                    .collect();
                if cands[k].is_empty() {
                    return Ok(None);
                }
            }
        }
        Ok(Some(HSearch {
            src,
            dst,
            cands,
            forced,
            checks,
            counter: NodeCounter::new(budget),
        }))
    }

    fn n(&self) -> usize {
        self.src.n()
    }

    fn forced_column(&self, k: usize, cols: &[Vec<u64>]) -> Vec<u64> {
        let ring = self.src.ring();
        let (i, j) = self.forced[k].expect("forced column");
        let c = self.src.table().product(i, j);
        let mut y = self.dst.mul(&cols[i], &cols[j]);
        for (l, col) in cols.iter().enumerate().take(k) {
            if c[l] != 0 {
                ring.axpy(&mut y, ring.neg(c[l]), col);
            }
        }
        let inv = ring.inv(c[k]).expect("field");
        ring.scale_vec(inv, &y)
    }

    fn products_hold(&self, k: usize, cols: &[Vec<u64>]) -> bool {
        let ring = self.src.ring();
        self.checks[k].iter().all(|&(i, j)| {
            let c = self.src.table().product(i, j);
            let mut lhs = vec![0u64; self.n()];
            for (l, &cl) in c.iter().enumerate() {
                if cl != 0 {
                    ring.axpy(&mut lhs, cl, &cols[l]);
                }
            }
            lhs == self.dst.mul(&cols[i], &cols[j])
        })
    }

    /// Tries `y` as column `k`; on success returns the extended state.
    fn place(
        &self,
        k: usize,
        y: Vec<u64>,
        cols: &[Vec<u64>],
        span: &Subspace,
    ) -> Result<Option<(Vec<Vec<u64>>, Subspace)>> {
        self.counter.tick()?;
        if span.contains(&y) {
            return Ok(None);
        }
        let mut cols = cols.to_vec();
        cols.push(y);
        if !self.products_hold(k, &cols) {
            return Ok(None);
        }
        let mut span = span.clone();
        span.insert(&cols[k])?;
        Ok(Some((cols, span)))
    }

    fn options(&self, k: usize, cols: &[Vec<u64>]) -> Vec<Vec<u64>> {
        if self.forced[k].is_some() {
            vec![self.forced_column(k, cols)]
        } else {
            self.cands[k].clone()
        }
    }

    fn root(&self) -> Result<(Vec<Vec<u64>>, Subspace)> {
        let e0 = self.src.basis_vector(0);
        let span = Subspace::span(self.src.ring(), self.n(), std::slice::from_ref(&e0))?;
        Ok((vec![e0], span))
    }

    /// Visits complete column lists in order; `visit` returns `false` to stop.
    fn dfs(
        &self,
        k: usize,
        cols: &[Vec<u64>],
        span: &Subspace,
        visit: &mut dyn FnMut(&[Vec<u64>]) -> bool,
    ) -> Result<bool> {
        if k == self.n() {
            return Ok(visit(cols));
        }
        for y in self.options(k, cols) {
            if let Some((next, nspan)) = self.place(k, y, cols, span)? {
                if !self.dfs(k + 1, &next, &nspan, visit)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Top-level branches: states after placing column 1.
    fn branches(&self) -> Result<Vec<(Vec<Vec<u64>>, Subspace)>> {
        let (cols, span) = self.root()?;
        let mut out = Vec::new();
        for y in self.options(1, &cols) {
            if let Some(s) = self.place(1, y, &cols, &span)? {
                out.push(s);
            }
        }
        Ok(out)
    }

    fn first(&self) -> Result<Option<Vec<Vec<u64>>>> {
        if self.n() <= 1 {
            let (cols, _) = self.root()?;
            return Ok((self.src.table() == self.dst.table()).then_some(cols));
        }
        let branches = self.branches()?;
        let found = branches.par_iter().map(|(cols, span)| {
            let mut hit = None;
            self.dfs(2, cols, span, &mut |c| {
                hit = Some(c.to_vec());
                false
            })
            .map(|_| hit)
        });
        let results: Vec<Result<Option<Vec<Vec<u64>>>>> = found.collect();
        for r in results {
            if let Some(cols) = r? {
                return Ok(Some(cols));
            }
        }
        Ok(None)
    }

    fn all(&self) -> Result<Vec<Vec<Vec<u64>>>> {
        if self.n() <= 1 {
            return Ok(self.first()?.into_iter().collect());
        }
        let branches = self.branches()?;
        let per: Vec<Result<Vec<Vec<Vec<u64>>>>> = branches
            .par_iter()
            .map(|(cols, span)| {
                let mut hits = Vec::new();
                self.dfs(2, cols, span, &mut |c| {
                    hits.push(c.to_vec());
                    true
                })
                .map(|_| hits)
            })
            .collect();
        let mut out = Vec::new();
        for r in per {
            out.extend(r?);
        }
        Ok(out)
    }
}

fn columns_to_matrix(ring: Zn, cols: &[Vec<u64>]) -> Result<InvertibleMatrix> {
    InvertibleMatrix::new(Matrix::from_columns(ring, cols.len(), cols))
}

/// A matrix `M` with `act(M, a) = b`, or `None` when the algebras are not
/// isomorphic. The witness is re-verified before it is returned.
pub fn isomorphic(
    a: &BasedAlgebra,
    b: &BasedAlgebra,
    budget: Budget,
) -> Result<Option<InvertibleMatrix>> {
    check_pair(a, b)?;
    let ring = a.ring();
    if a.table() == b.table() {
        return Ok(Some(InvertibleMatrix::identity(ring, a.n())));
    }
    if signature(a)? != signature(b)? {
        return Ok(None);
    }
    let (a1, ma) = normalize(a)?;
    let (b1, mb) = normalize(b)?;
    let Some(search) = HSearch::new(&a1, &b1, budget)? else {
        return Ok(None);
    };
    let Some(cols) = search.first()? else {
        return Ok(None);
    };
    let h = columns_to_matrix(ring, &cols)?;
    let w = mb.inverse().compose(&h)?.compose(&ma)?;
    if act_table(&w, a.table())? != *b.table() {
        return Err(Error::Inconsistent(
            "isomorphism witness failed re-verification".into(),
        ));
    }
    Ok(Some(w))
}

/// The stabilizer of `a` in GL_n, sorted by row-major entries.
pub fn automorphisms(a: &BasedAlgebra, budget: Budget) -> Result<Vec<InvertibleMatrix>> {
    let ring = a.ring();
    ring.require_field()?;
    let (a1, ma) = normalize(a)?;
    let Some(search) = HSearch::new(&a1, &a1, budget)? else {
        return Err(Error::Inconsistent(
            "identity is not an automorphism".into(),
        ));
    };
    let mut out = Vec::new();
    for cols in search.all()? {
        let h = columns_to_matrix(ring, &cols)?;
        let g = ma.inverse().compose(&h)?.compose(&ma)?;
        debug_assert_eq!(act_table(&g, a.table())?, *a.table());
        out.push(g);
    }
    out.sort_by(|x, y| x.mat.as_flat().cmp(y.mat.as_flat()));
    Ok(out)
}

pub fn automorphism_count(a: &BasedAlgebra, budget: Budget) -> Result<usize> {
    Ok(automorphisms(a, budget)?.len())
}

fn is_permutation(m: &Matrix) -> bool {
    let n = m.rows();
    (0..n).all(|r| {
        m.row(r).iter().filter(|&&x| x == 1).count() == 1 && m.row(r).iter().all(|&x| x <= 1)
    }) && (0..n).all(|c| m.column(c).iter().filter(|&&x| x == 1).count() == 1)
}

/// Stabilizer of the split algebra, found by running through all of GL_n.
pub fn split_stabilizer(n: usize, q: u64, budget: Budget) -> Result<Vec<Matrix>> {
    let ring = Zn::prime_field(q)?;
    let split = crate::algebra::make_split(ring, n)?;
    let all: Vec<Matrix> = iterate_gl(n, ring, budget)?.collect();
    let stab: Result<Vec<Option<Matrix>>> = all
        .into_par_iter()
        .map(|m| {
            let g = InvertibleMatrix::new(m)?;
            Ok((act_table(&g, split.table())? == *split.table()).then_some(g.mat))
        })
        .collect();
    Ok(stab?.into_iter().flatten().collect())
}

/// Whether the stabilizer of the split algebra is exactly the `n!`
/// permutation matrices.
pub fn check_split_stabilizer(n: usize, q: u64, budget: Budget) -> Result<bool> {
    let stab = split_stabilizer(n, q, budget)?;
    let factorial: usize = (1..=n).product();
    Ok(stab.len() == factorial && stab.iter().all(is_permutation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_bullet, make_monogenic, make_split, product};

    fn f(p: u64) -> Zn {
        Zn::prime_field(p).unwrap()
    }

    fn inv(ring: Zn, rows: &[Vec<u64>]) -> InvertibleMatrix {
        InvertibleMatrix::new(Matrix::from_rows(ring, rows).unwrap()).unwrap()
    }

    #[test]
    fn identity_action_is_trivial() {
        let a = make_monogenic(f(5), &[1, 0, 3]).unwrap();
        assert_eq!(act(&InvertibleMatrix::identity(f(5), 3), &a).unwrap(), a);
    }

    #[test]
    fn permutations_fix_split() {
        let s = make_split(f(3), 3).unwrap();
        let m = inv(f(3), &[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(act(&m, &s).unwrap().table(), s.table());
    }

    #[test]
    fn discriminant_scales_by_inverse_square_determinant() {
        let s = make_split(f(5), 2).unwrap();
        let m = inv(f(5), &[vec![2, 0], vec![0, 1]]);
        let t = act(&m, &s).unwrap();
        assert!(t.table().is_valid());
        assert_eq!(t.discriminant().value(), 4);
    }

    #[test]
    fn char_two_square_classes_merge() {
        let r = f(2);
        let one = make_monogenic(r, &[1, 0]).unwrap(); // x^2 = 1
        let zero = make_monogenic(r, &[0, 0]).unwrap(); // x^2 = 0
        let w = isomorphic(&one, &zero, Budget::default()).unwrap().unwrap();
        assert_eq!(w.matrix().row_vecs(), vec![vec![1, 1], vec![0, 1]]);
        let f4 = make_monogenic(r, &[1, 1]).unwrap();
        let split = make_split(r, 2).unwrap();
        assert!(isomorphic(&f4, &split, Budget::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn products_of_splits_are_split() {
        let r = f(2);
        let p = product(&make_split(r, 2).unwrap(), &make_split(r, 3).unwrap()).unwrap();
        let mut shuffled = p.clone();
        let perm = inv(
            r,
            &[
                vec![0, 0, 0, 0, 1],
                vec![1, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 0],
                vec![0, 0, 0, 1, 0],
            ],
        );
        shuffled = act(&perm, &shuffled).unwrap();
        assert!(
            isomorphic(&shuffled, &make_split(r, 5).unwrap(), Budget::default())
                .unwrap()
                .is_some()
        );
    }

    #[test]
    fn small_automorphism_groups() {
        assert_eq!(
            automorphism_count(&make_split(f(2), 3).unwrap(), Budget::default()).unwrap(),
            6
        );
        assert_eq!(
            automorphism_count(&make_monogenic(f(2), &[1, 1]).unwrap(), Budget::default()).unwrap(),
            2
        );
        assert_eq!(
            automorphism_count(&make_bullet(f(3), 2).unwrap(), Budget::default()).unwrap(),
            2
        );
    }

    #[test]
    fn split_stabilizers_are_permutations() {
        assert!(check_split_stabilizer(3, 2, Budget::default()).unwrap());
        assert!(check_split_stabilizer(1, 5, Budget::default()).unwrap());
    }

    #[test]
    fn normalization_moves_identity_first() {
        let s = make_split(f(3), 3).unwrap();
        let (n1, m) = normalize(&s).unwrap();
        assert!(n1.is_normalized());
        assert_eq!(act(&m, &s).unwrap(), n1);
    }
}
