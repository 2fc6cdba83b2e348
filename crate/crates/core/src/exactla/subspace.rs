use super::zn::Zn;
use crate::budget::Budget;
use crate::error::{Error, Result};

/// A subspace of `F_p^ambient`, stored as its reduced row-echelon basis.
///
/// The representation is unique, so derived equality is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ring: Zn,
    ambient: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ring: Zn, ambient: usize) -> Self {
        Subspace {
            ring,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ring: Zn, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace {
            ring,
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(ring: Zn, ambient: usize, vectors: &[Vec<u64>]) -> Result<Self> {
        ring.require_field()?;
        let mut s = Subspace::zero(ring, ambient);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn ring(&self) -> Zn {
        self.ring
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_len(&self, v: &[u64]) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::Dimension(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                self.ambient
            )));
        }
        Ok(())
    }

    /// Remainder of `v` after clearing every pivot coordinate.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if r[p] != 0 {
                let f = self.ring.neg(r[p]);
                self.ring.axpy(&mut r, f, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in the echelon basis, or `None` when `v` is outside.
    pub fn coords(&self, v: &[u64]) -> Option<Vec<u64>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p]).collect())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u64]) -> Result<bool> {
        self.check_len(v)?;
        self.ring.check_reduced(v)?;
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        let s = self.ring.inv(r[p]).expect("prime field");
        r = self.ring.scale_vec(s, &r);
        for row in &mut self.basis {
            if row[p] != 0 {
                let f = self.ring.neg(row[p]);
                self.ring.axpy(row, f, &r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension(format!(
                "ambient {} vs {}",
                self.ambient, other.ambient
            )));
        }
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    /// All vectors of the subspace, in lexicographic order of coordinates.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let q = self.ring.modulus();
        let total = q.pow(self.dim() as u32);
        let mut out: Vec<Vec<u64>> = (0..total as u128)
            .map(|i| {
                let coeffs = self.ring.decode_vec(i, self.dim());
                let mut v = vec![0; self.ambient];
                for (c, row) in coeffs.iter().zip(&self.basis) {
                    self.ring.axpy(&mut v, *c, row);
                }
                v
            })
            .collect();
        out.sort();
        out
    }

    /// Number of `k`-dimensional subspaces of `F_q^n` (Gaussian binomial).
    pub fn count_of_dim(q: u64, n: usize, k: usize) -> u128 {
        if k > n {
            return 0;
        }
        let q = q as u128;
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..k {
            num = num.saturating_mul(q.pow((n - i) as u32) - 1);
            den = den.saturating_mul(q.pow((i + 1) as u32) - 1);
        }
        num / den
    }

    /// Every `k`-dimensional subspace of `F_p^ambient`, ordered lexicographically
    /// by the flattened echelon basis.
    pub fn all_of_dim(ring: Zn, ambient: usize, k: usize, budget: Budget) -> Result<Vec<Subspace>> {
        ring.require_field()?;
        budget.check(Subspace::count_of_dim(ring.modulus(), ambient, k))?;
        let mut out = Vec::new();
        for pivots in combinations(ambient, k) {
            // free slots: (row, column) right of the row's pivot at non-pivot columns
            let mut slots = Vec::new();
            for (row, &p) in pivots.iter().enumerate() {
                for c in p + 1..ambient {
                    if !pivots.contains(&c) {
                        slots.push((row, c));
                    }
                }
            }
            let fillings = ring.count_vectors(slots.len());
            for idx in 0..fillings {
                let values = ring.decode_vec(idx, slots.len());
                let mut basis = vec![vec![0u64; ambient]; k];
                for (row, &p) in pivots.iter().enumerate() {
                    basis[row][p] = 1;
                }
                for (&(row, c), &v) in slots.iter().zip(&values) {
                    basis[row][c] = v;
                }
                out.push(Subspace {
                    ring,
                    ambient,
                    basis,
                    pivots: pivots.clone(),
                });
            }
        }
        out.sort_by(|a, b| a.basis.cmp(&b.basis));
        Ok(out)
    }
}

/// k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Zn {
        Zn::prime_field(p).unwrap()
    }

    #[test]
    fn spanning_sets_of_the_same_space_agree() {
        let r = f(3);
        let a = Subspace::span(r, 3, &[vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let b = Subspace::span(r, 3, &[vec![1, 0, 1], vec![2, 2, 1], vec![1, 2, 0]]).unwrap();
        // (1,0,1) = (1,2,0) + (0,1,1)·(-2)... check membership before comparing
        assert!(a.contains(&[1, 0, 1]));
        assert_eq!(a, b);
    }

    #[test]
    fn coords_follow_the_echelon_basis() {
        let r = f(5);
        let s = Subspace::span(r, 4, &[vec![0, 1, 2, 3], vec![1, 0, 0, 4]]).unwrap();
        let v = r.add_vec(
            &r.scale_vec(3, &[0, 1, 2, 3]),
            &r.scale_vec(2, &[1, 0, 0, 4]),
        );
        let c = s.coords(&v).unwrap();
        let mut back = vec![0; 4];
        for (x, row) in c.iter().zip(s.basis()) {
            r.axpy(&mut back, *x, row);
        }
        assert_eq!(back, v);
        assert!(s.coords(&[0, 0, 1, 0]).is_none());
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for (q, n) in [(2u64, 4usize), (3, 3), (2, 5)] {
            for k in 0..=n {
                let all = Subspace::all_of_dim(f(q), n, k, Budget::default()).unwrap();
                assert_eq!(all.len() as u128, Subspace::count_of_dim(q, n, k));
                for w in all.windows(2) {
                    assert!(w[0].basis < w[1].basis);
                }
            }
        }
    }

    #[test]
    fn elements_of_a_line_over_f3() {
        let s = Subspace::span(f(3), 2, &[vec![1, 2]]).unwrap();
        assert_eq!(s.elements(), vec![vec![0, 0], vec![1, 2], vec![2, 1]]);
    }
}
