//! Finite commutative rings of order `p^n` given by generators of the additive
//! group, and their reduction to based `F_p`-algebras.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{validate, BasedAlgebra, StructureTable};
use crate::budget::Budget;
use crate::enumerate::{classify, ClassifyOptions};
use crate::error::{Error, Result};
use crate::exactla::Zn;
use crate::symmetry::isomorphic;

/// Additive group `Z/p^{a_1} x ... x Z/p^{a_m}` with generators `x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdditiveGroup {
    p: u64,
    a: Vec<u32>,
    orders: Vec<u64>,
}

impl AdditiveGroup {
    pub fn new(p: u64, a: Vec<u32>) -> Result<Self> {
        Zn::prime_field(p)?;
        if a.contains(&0) {
            return Err(Error::InvalidRing(
                "additive invariants must be positive".into(),
            ));
        }
        let orders = a
            .iter()
            .map(|&x| p.checked_pow(x))
            .collect::<Option<Vec<u64>>>();
        match orders {
            Some(orders) if orders.iter().all(|&o| o < 1 << 32) => {
                Ok(AdditiveGroup { p, a, orders })
            }
            _ => Err(Error::InvalidRing("cyclic factor too large".into())),
        }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// `log_p` of the group order.
    pub fn exponent_sum(&self) -> u32 {
        self.a.iter().sum()
    }

    pub fn size(&self) -> u128 {
        self.orders.iter().map(|&o| o as u128).product()
    }

    pub fn contains(&self, g: &[u64]) -> bool {
        g.len() == self.rank() && g.iter().zip(&self.orders).all(|(&x, &o)| x < o)
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn generator(&self, i: usize) -> Vec<u64> {
        let mut g = self.zero();
        g[i] = 1 % self.orders[i];
        g
    }

    pub fn add(&self, g: &[u64], h: &[u64]) -> Vec<u64> {
        g.iter()
            .zip(h)
            .zip(&self.orders)
            .map(|((&x, &y), &o)| (x + y) % o)
            .collect()
    }

    pub fn scale(&self, k: u64, g: &[u64]) -> Vec<u64> {
        g.iter()
            .zip(&self.orders)
            .map(|(&x, &o)| ((k as u128 * x as u128) % o as u128) as u64)
            .collect()
    }

    pub fn is_zero(&self, g: &[u64]) -> bool {
        g.iter().all(|&x| x == 0)
    }

    /// Additive order of `g`.
    pub fn order(&self, g: &[u64]) -> u64 {
        let mut k = 1;
        while !self.is_zero(&self.scale(k, g)) {
            k *= self.p;
        }
        k
    }

    /// All elements, in mixed-radix order with the first coordinate slowest.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &o in &self.orders {
            out = out
                .into_iter()
                .flat_map(|g| (0..o).map(move |x| [g.clone(), vec![x]].concat()))
                .collect();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingViolation {
    /// `p^{a_i} (x_i x_j) != 0`.
    IllDefined(usize, usize),
    Commutativity(usize, usize),
    Associativity(usize, usize, usize),
    /// `one * x_j != x_j`.
    Unit(usize),
}

impl fmt::Display for RingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RingViolation::IllDefined(i, j) => {
                write!(f, "ill-defined product x{} x{}", i + 1, j + 1)
            }
            RingViolation::Commutativity(i, j) => {
                write!(f, "commutativity at ({},{})", i + 1, j + 1)
            }
            RingViolation::Associativity(i, j, k) => {
                write!(f, "associativity at ({},{},{})", i + 1, j + 1, k + 1)
            }
            RingViolation::Unit(j) => write!(f, "unit law at x{}", j + 1),
        }
    }
}

/// A ring structure on an additive group: products of generators and the
/// identity element, all as coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteRing {
    group: AdditiveGroup,
    mult: Vec<Vec<Vec<u64>>>,
    one: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingJson {
    pub p: u64,
    pub a: Vec<u32>,
    pub mult: Vec<Vec<Vec<u64>>>,
    pub one: Vec<u64>,
}

impl FiniteRing {
    /// Checks shapes and coordinate ranges only; see [`validate_ring`].
    pub fn new(p: u64, a: Vec<u32>, mult: Vec<Vec<Vec<u64>>>, one: Vec<u64>) -> Result<Self> {
        let group = AdditiveGroup::new(p, a)?;
        let m = group.rank();
        if mult.len() != m
            || mult
                .iter()
                .any(|row| row.len() != m || row.iter().any(|g| !group.contains(g)))
        {
            return Err(Error::InvalidRing(format!(
                "mult must be a {m}x{m} table of group elements"
            )));
        }
        if !group.contains(&one) {
            return Err(Error::InvalidRing("one is not a group element".into()));
        }
        Ok(FiniteRing { group, mult, one })
    }

    pub fn group(&self) -> &AdditiveGroup {
        &self.group
    }

    pub fn p(&self) -> u64 {
        self.group.p
    }

    pub fn invariants(&self) -> &[u32] {
        &self.group.a
    }

    pub fn one(&self) -> &[u64] {
        &self.one
    }

    pub fn generator_product(&self, i: usize, j: usize) -> &[u64] {
        &self.mult[i][j]
    }

    /// The bilinear extension of the generator products.
    pub fn multiply(&self, g: &[u64], h: &[u64]) -> Vec<u64> {
        let mut out = self.group.zero();
        for (i, &x) in g.iter().enumerate() {
            for (j, &y) in h.iter().enumerate() {
                if x != 0 && y != 0 {
                    out = self
                        .group
                        .add(&out, &self.group.scale(x * y, &self.mult[i][j]));
                }
            }
        }
        out
    }

    /// Additive order of the identity.
    pub fn characteristic(&self) -> u64 {
        self.group.order(&self.one)
    }

    /// Relabels generators: the new `x_k` is the old `x_{perm[k]}`.
    pub fn permute_generators(&self, perm: &[usize]) -> Result<FiniteRing> {
        let m = self.group.rank();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..m).collect::<Vec<_>>() {
            return Err(Error::Precondition(
                "not a permutation of the generators".into(),
            ));
        }
        let re = |g: &[u64]| perm.iter().map(|&k| g[k]).collect::<Vec<u64>>();
        let a = perm.iter().map(|&k| self.group.a[k]).collect();
        let mult = (0..m)
            .map(|i| (0..m).map(|j| re(&self.mult[perm[i]][perm[j]])).collect())
            .collect();
        FiniteRing::new(self.p(), a, mult, re(&self.one))
    }

    pub fn to_json_value(&self) -> RingJson {
        RingJson {
            p: self.p(),
            a: self.group.a.clone(),
            mult: self.mult.clone(),
            one: self.one.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: RingJson = serde_json::from_str(text)?;
        FiniteRing::new(j.p, j.a, j.mult, j.one)
    }
}

/// Checks well-definedness of the bilinear extension, commutativity and
/// associativity on generators, and the unit law.
pub fn validate_ring(r: &FiniteRing) -> std::result::Result<(), Vec<RingViolation>> {
    let g = &r.group;
    let m = g.rank();
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if !g.is_zero(&g.scale(g.orders[i], &r.mult[i][j])) {
                out.push(RingViolation::IllDefined(i, j));
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            if r.mult[i][j] != r.mult[j][i] {
                out.push(RingViolation::Commutativity(i, j));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let left = r.multiply(&r.mult[i][j], &g.generator(k));
                let right = r.multiply(&g.generator(i), &r.mult[j][k]);
                if left != right {
                    out.push(RingViolation::Associativity(i, j, k));
                }
            }
        }
    }
    for j in 0..m {
        let x = g.generator(j);
        if r.multiply(&r.one, &x) != x || r.multiply(&x, &r.one) != x {
            out.push(RingViolation::Unit(j));
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Basis `z` of `y_{ij} = p^j x_i`, ordered by `(i, j)`.
fn z_basis(g: &AdditiveGroup) -> Vec<(usize, u32)> {
    g.a.iter()
        .enumerate()
        .flat_map(|(i, &ai)| (0..ai).map(move |j| (i, j)))
        .collect()
}

/// Coordinates of `g` on the `z` basis: base-`p` digits of each coordinate.
fn digits(g: &AdditiveGroup, x: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(g.exponent_sum() as usize);
    for (i, &ai) in g.a.iter().enumerate() {
        let mut v = x[i];
        for _ in 0..ai {
            out.push(v % g.p);
            v /= g.p;
        }
    }
    out
}

/// The rank-`n` `F_p`-algebra whose structure constants are the base-`p`
/// digits of the products `z_a z_b` in `R`.
pub fn to_fp_algebra(r: &FiniteRing) -> Result<(Vec<u32>, BasedAlgebra)> {
    if let Err(v) = validate_ring(r) {
        return Err(Error::InvalidRing(v[0].to_string()));
    }
    let g = &r.group;
    let fp = Zn::prime_field(g.p)?;
    let z = z_basis(g);
    let n = z.len();
    let element = |(i, j): (usize, u32)| g.scale(g.p.pow(j), &g.generator(i));
    let mut c = Vec::with_capacity(n * n * n);
    for &za in &z {
        for &zb in &z {
            c.extend(digits(g, &r.multiply(&element(za), &element(zb))));
        }
    }
    let table = StructureTable::new(fp, n, c, digits(g, &r.one))?;
    let a = validate(table).map_err(Error::Invalid)?;
    Ok((g.a.clone(), a))
}

/// Partitions of `n` in descending order, listed in reverse lexicographic order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Automorphisms of `g` as images of the generators.
fn automorphisms(g: &AdditiveGroup) -> Vec<Vec<Vec<u64>>> {
    let elems = g.elements();
    let m = g.rank();
    let choices: Vec<Vec<&Vec<u64>>> = (0..m)
        .map(|i| {
            elems
                .iter()
                .filter(|e| g.is_zero(&g.scale(g.orders[i], e)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    'outer: loop {
        let images: Vec<Vec<u64>> = (0..m).map(|i| choices[i][idx[i]].clone()).collect();
        let image_of = |x: &[u64]| {
            x.iter()
                .zip(&images)
                .fold(g.zero(), |acc, (&k, im)| g.add(&acc, &g.scale(k, im)))
        };
        let hit: BTreeSet<Vec<u64>> = elems.iter().map(|e| image_of(e)).collect();
        if hit.len() == elems.len() {
            out.push(images);
        }
        for i in (0..m).rev() {
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    out
}

fn apply_hom(g: &AdditiveGroup, images: &[Vec<u64>], x: &[u64]) -> Vec<u64> {
    x.iter()
        .zip(images)
        .fold(g.zero(), |acc, (&k, im)| g.add(&acc, &g.scale(k, im)))
}

/// Least transport `phi(phi^{-1}(x_i) phi^{-1}(x_j))` of the generator
/// products over all additive automorphisms `phi`.
fn canonical_key(r: &FiniteRing, autos: &[Vec<Vec<u64>>]) -> Vec<u64> {
    let g = &r.group;
    let m = g.rank();
    autos
        .iter()
        .map(|phi| {
            let inv = invert_hom(g, phi);
            let mut key = Vec::with_capacity(m * m * m);
            for i in 0..m {
                for j in 0..m {
                    key.extend(apply_hom(g, phi, &r.multiply(&inv[i], &inv[j])));
                }
            }
            key
        })
        .min()
        .expect("identity is an automorphism")
}

fn invert_hom(g: &AdditiveGroup, phi: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let elems = g.elements();
    (0..g.rank())
        .map(|i| {
            let target = g.generator(i);
            elems
                .iter()
                .find(|e| apply_hom(g, phi, e) == target)
                .expect("bijective")
                .clone()
        })
        .collect()
}

/// The unique two-sided identity of the bilinear product, if any.
fn find_one(g: &AdditiveGroup, mult: &[Vec<Vec<u64>>], elems: &[Vec<u64>]) -> Option<Vec<u64>> {
    let probe = FiniteRing {
        group: g.clone(),
        mult: mult.to_vec(),
        one: g.zero(),
    };
    elems
        .iter()
        .find(|u| (0..g.rank()).all(|j| probe.multiply(u, &g.generator(j)) == g.generator(j)))
        .cloned()
}

fn rings_of_type(p: u64, a: Vec<u32>, budget: Budget) -> Result<Vec<FiniteRing>> {
    let g = AdditiveGroup::new(p, a)?;
    let m = g.rank();
    let elems = g.elements();
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let options: Vec<Vec<Vec<u64>>> = cells
        .iter()
        .map(|&(i, j)| {
            let o = g.orders[i].min(g.orders[j]);
            elems
                .iter()
                .filter(|e| g.is_zero(&g.scale(o, e)))
                .cloned()
                .collect()
        })
        .collect();
    let total: u128 = options.iter().map(|o| o.len() as u128).product();
    budget.check(total)?;
    let autos = automorphisms(&g);
    let found: Vec<(Vec<u64>, FiniteRing)> = (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut mult = vec![vec![g.zero(); m]; m];
            for (c, &(i, j)) in cells.iter().enumerate() {
                let k = options[c].len() as u128;
                let v = options[c][(code % k) as usize].clone();
                code /= k;
                mult[i][j] = v.clone();
                mult[j][i] = v;
            }
            let one = find_one(&g, &mult, &elems)?;
            let r = FiniteRing {
                group: g.clone(),
                mult,
                one,
            };
            validate_ring(&r).ok()?;
            Some((canonical_key(&r, &autos), r))
        })
        .collect();
    let mut classes: BTreeMap<Vec<u64>, FiniteRing> = BTreeMap::new();
    for (k, r) in found {
        classes.entry(k).or_insert(r);
    }
    Ok(classes.into_values().collect())
}

/// Commutative rings of order `p^n` up to isomorphism, one representative
/// per class. Additive types are descending partitions of `n`; within a type,
/// classes are the orbits of additive automorphisms on the multiplication.
pub fn enumerate_rings(p: u64, n: u32, budget: Budget) -> Result<Vec<FiniteRing>> {
    Zn::prime_field(p)?;
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    budget.check((p as u128).checked_pow(n).unwrap_or(u128::MAX))?;
    let per_type: Vec<Result<Vec<FiniteRing>>> = partitions(n)
        .into_par_iter()
        .map(|a| rings_of_type(p, a, budget))
        .collect();
    let mut out = Vec::new();
    for r in per_type {
        out.extend(r?);
    }
    Ok(out)
}

/// Whether distinct rings give distinct pairs `(a, isomorphism class of A)`.
pub fn check_injectivity(rings: &[FiniteRing], budget: Budget) -> Result<bool> {
    let images = rings
        .iter()
        .map(to_fp_algebra)
        .collect::<Result<Vec<_>>>()?;
    for (x, (ax, alg_x)) in images.iter().enumerate() {
        for (ay, alg_y) in &images[x + 1..] {
            if ax == ay && isomorphic(alg_x, alg_y, budget)?.is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub rings: u128,
    pub algebra_classes: u128,
    /// `p^{n^2 + n}`.
    pub factor: u128,
    pub holds: bool,
}

/// `#rings(p^n) <= p^{n^2+n} * #(rank-n F_p-algebra classes)`, both counts
/// computed here.
pub fn bound_check(p: u64, n: u32, budget: Budget) -> Result<BoundCheck> {
    let rings = enumerate_rings(p, n, budget)?.len() as u128;
    let classes = classify(n as usize, p, &ClassifyOptions::default(), budget)?.len() as u128;
    let factor = (p as u128).pow(n * n + n);
    Ok(BoundCheck {
        rings,
        algebra_classes: classes,
        factor,
        holds: rings <= factor * classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_monogenic;

    fn z4() -> FiniteRing {
        FiniteRing::new(2, vec![2], vec![vec![vec![1]]], vec![1]).unwrap()
    }

    #[test]
    fn z4_is_valid() {
        assert!(validate_ring(&z4()).is_ok());
        assert_eq!(z4().characteristic(), 4);
    }

    #[test]
    fn pointwise_product_is_valid() {
        let r = FiniteRing::new(
            2,
            vec![1, 1],
            vec![vec![vec![1, 0], vec![0, 0]], vec![vec![0, 0], vec![0, 1]]],
            vec![1, 1],
        )
        .unwrap();
        assert!(validate_ring(&r).is_ok());
        assert_eq!(r.characteristic(), 2);
    }

    #[test]
    fn missing_unit_is_reported() {
        for one in 0..4 {
            let r = FiniteRing::new(2, vec![2], vec![vec![vec![2]]], vec![one]).unwrap();
            let v = validate_ring(&r).unwrap_err();
            assert!(v.contains(&RingViolation::Unit(0)));
        }
    }

    #[test]
    fn ill_defined_products_are_reported() {
        let r = FiniteRing::new(
            2,
            vec![1, 2],
            vec![vec![vec![0, 1], vec![0, 0]], vec![vec![0, 0], vec![0, 1]]],
            vec![0, 1],
        )
        .unwrap();
        assert!(validate_ring(&r)
            .unwrap_err()
            .contains(&RingViolation::IllDefined(0, 0)));
    }

    #[test]
    fn z4_reduces_to_dual_numbers() {
        let (a, alg) = to_fp_algebra(&z4()).unwrap();
        assert_eq!(a, vec![2]);
        let dual = make_monogenic(Zn::prime_field(2).unwrap(), &[0, 0]).unwrap();
        assert_eq!(alg.table(), dual.table());
    }

    #[test]
    fn partition_lists() {
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions(4).len(), 5);
    }

    #[test]
    fn automorphism_counts() {
        let g = AdditiveGroup::new(2, vec![1, 1]).unwrap();
        assert_eq!(automorphisms(&g).len(), 6);
        let g = AdditiveGroup::new(3, vec![2]).unwrap();
        assert_eq!(automorphisms(&g).len(), 6);
        let g = AdditiveGroup::new(2, vec![2, 1]).unwrap();
        assert_eq!(automorphisms(&g).len(), 8);
    }

    #[test]
    fn small_ring_counts() {
        let b = Budget::default();
        assert_eq!(enumerate_rings(2, 1, b).unwrap().len(), 1);
        assert_eq!(enumerate_rings(2, 2, b).unwrap().len(), 4);
        assert_eq!(enumerate_rings(3, 2, b).unwrap().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let r = z4();
        assert_eq!(FiniteRing::from_json(&r.to_json()).unwrap(), r);
    }
}
