//! Canonical data of a local algebra with residue field F_p.
//!
//! The basis is `g_{ij}` (layer `i >= 0`, position `j >= 1`), with `g_{01} = 1`,
//! `g_{1j}` lifting a basis of `m/m^2`, and each `g_{ij}` for `i >= 2` an exact
//! product of a layer-`(i-1)` element and some `g_{1l}`. The stored constants
//! are `c_{ijluv}` in `g_{ij} g_{1l} = sum c_{ijluv} g_{uv}`, restricted to the
//! index set that determines the algebra. Layers `i`, `u` count from 0;
//! positions `j`, `l`, `v` count from 1.
//!
//! Every choice in the extraction takes the first option in a fixed order:
//! the generating subspace and good basis come from echelon and lexicographic
//! orders, `y_j = (x_b, x_i)` uses the least admissible `b`, the basis of
//! `m/m^2` is completed by standard vectors, and for layers `i >= 3` the
//! products `g_{i-1,r} g_{1l}` are scanned with `l` in the outer loop.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bilinear::{good_basis, min_generating_subspace, SymBilinearMap};
use super::{filtration, quotient_coords};
use crate::algebra::{BasedAlgebra, StructureTable};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Subspace, Zn};

pub type ConstKey = (usize, usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalData {
    pub q: u64,
    /// `m_i = dim m^i / m^(i+1)`.
    pub m_seq: Vec<usize>,
    pub s: usize,
    /// `w_0 .. w_s`, the dimensions of `(V_i, V_i)`.
    pub w_dims: Vec<usize>,
    pub constants: BTreeMap<ConstKey, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalJson {
    pub m_seq: Vec<usize>,
    pub s: usize,
    pub w_dims: Vec<usize>,
    /// Rows `[i, j, l, u, v, value]`, sorted.
    pub constants: Vec<[u64; 6]>,
    pub q: u64,
}

impl CanonicalData {
    pub fn n(&self) -> usize {
        self.m_seq.iter().sum()
    }

    fn m(&self, i: usize) -> usize {
        self.m_seq.get(i).copied().unwrap_or(0)
    }

    /// The index set for the stored constants, in lexicographic order.
    pub fn index_set(&self) -> Vec<ConstKey> {
        let t = self.m_seq.len().saturating_sub(1);
        let mut out = Vec::new();
        let tail = |i: usize, j: usize, l: usize, lo_u: usize, out: &mut Vec<ConstKey>| {
            for u in lo_u..=t {
                for v in 1..=self.m(u) {
                    out.push((i, j, l, u, v));
                }
            }
        };
        for j in 1..=self.m(1) {
            for l in j..=self.m(1) {
                tail(1, j, l, 2, &mut out);
            }
        }
        for j in 1..=self.m(2) {
            for l in 1..=self.s {
                if j > self.w_dims[l - 1] {
                    tail(2, j, l, 3, &mut out);
                }
            }
        }
        for i in 3..=t {
            for j in 1..=self.m(i) {
                for l in 1..=self.s {
                    tail(i, j, l, i + 1, &mut out);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn to_json_value(&self) -> CanonicalJson {
        CanonicalJson {
            m_seq: self.m_seq.clone(),
            s: self.s,
            w_dims: self.w_dims.clone(),
            constants: self
                .constants
                .iter()
                .map(|(&(i, j, l, u, v), &c)| [i as u64, j as u64, l as u64, u as u64, v as u64, c])
                .collect(),
            q: self.q,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CanonicalJson = serde_json::from_str(text)?;
        let mut constants = BTreeMap::new();
        for row in raw.constants {
            let key = (
                row[0] as usize,
                row[1] as usize,
                row[2] as usize,
                row[3] as usize,
                row[4] as usize,
            );
            if constants.insert(key, row[5]).is_some() {
                return Err(Error::Inconsistent(format!("constant {key:?} given twice")));
            }
        }
        Ok(CanonicalData {
            q: raw.q,
            m_seq: raw.m_seq,
            s: raw.s,
            w_dims: raw.w_dims,
            constants,
        })
    }

    /// Shape invariants: `m_0 = 1`, positive `m_i`, `0 = w_0 <= w_1 < .. < w_s = m_2`,
    /// `s <= m_1` and `s <= m_2 + 1`.
    pub fn check_shape(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Inconsistent(msg.to_string()));
        if self.m_seq.first() != Some(&1) {
            return bad("m_0 must be 1");
        }
        if self.m_seq[1..].contains(&0) {
            return bad("every listed m_i must be positive");
        }
        if self.w_dims.len() != self.s + 1
            || self.w_dims[0] != 0
            || self.w_dims[self.s] != self.m(2)
        {
            return bad("w dimensions must run from 0 to m_2 with s + 1 entries");
        }
        if self
            .w_dims
            .windows(2)
            .enumerate()
            .any(|(k, w)| if k == 0 { w[1] < w[0] } else { w[1] <= w[0] })
        {
            return bad("w dimensions must be increasing");
        }
        if self.s > self.m(1) || self.s > self.m(2) + 1 {
            return bad("s exceeds m_1 or m_2 + 1");
        }
        Ok(())
    }
}

fn combine(ring: Zn, coeffs: &[u64], vectors: &[Vec<u64>], len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for (c, v) in coeffs.iter().zip(vectors) {
        ring.axpy(&mut out, *c, v);
    }
    out
}

fn fail(msg: String) -> Error {
    Error::Inconsistent(msg)
}

/// Canonical data of a local algebra with residue field F_p.
pub fn extract_canonical(a: &BasedAlgebra, budget: Budget) -> Result<CanonicalData> {
    let ring = a.ring();
    let n = a.n();
    let filt = filtration(a)?;
    let m_seq = filt.dims.clone();
    let t = m_seq.len() - 1;
    let m = |i: usize| m_seq.get(i).copied().unwrap_or(0);
    let power = |i: usize| {
        filt.powers
            .get(i)
            .cloned()
            .unwrap_or_else(|| Subspace::zero(ring, n))
    };
    let layer_reps = |i: usize| -> Result<Vec<Vec<u64>>> {
        let mut covered = power(i + 1);
        let mut reps = Vec::new();
        for b in power(i).basis() {
            if covered.insert(b)? {
                reps.push(b.clone());
            }
        }
        Ok(reps)
    };
    let v_reps = layer_reps(1)?;
    let w_reps = layer_reps(2)?;
    let (m1, m2) = (m(1), m(2));
    let m3 = power(3);
    let mut vals = vec![Vec::new(); m1 * m1];
    for i in 0..m1 {
        for j in 0..m1 {
            let prod = a.mul(&v_reps[i], &v_reps[j]);
            vals[i * m1 + j] = quotient_coords(&prod, &w_reps, &m3)?
                .ok_or_else(|| fail("m·m leaves m^2".into()))?;
        }
    }
    let form = SymBilinearMap::new(ring, m1, m2, vals)?;

    let vbar = min_generating_subspace(&form, budget)?;
    let s = vbar.dim();
    if s > m2 + 1 {
        return Err(fail(format!(
            "generating subspace of dimension {s} exceeds m_2 + 1 = {}",
            m2 + 1
        )));
    }
    let chain = good_basis(&form.restrict(&vbar)?, budget)?;
    let xs: Vec<Vec<u64>> = chain
        .iter()
        .map(|c| combine(ring, c, vbar.basis(), m1))
        .collect();

    let mut w_span = Subspace::zero(ring, m2);
    let mut factors = Vec::new();
    let mut w_dims = vec![0];
    for i in 0..s {
        for b in 0..=i {
            if w_span.insert(&form.eval(&xs[b], &xs[i]))? {
                factors.push((b, i));
            }
        }
        w_dims.push(w_span.dim());
    }
    if w_span.dim() != m2 {
        return Err(fail("the good basis does not generate m^2/m^3".into()));
    }

    let mut x_span = Subspace::span(ring, m1, &xs)?;
    let mut x_full = xs.clone();
    for k in 0..m1 {
        let mut e = vec![0u64; m1];
        e[k] = 1;
        if x_span.insert(&e)? {
            x_full.push(e);
        }
    }
    let g1: Vec<Vec<u64>> = x_full
        .iter()
        .map(|x| combine(ring, x, &v_reps, n))
        .collect();
    let mut layers: Vec<Vec<Vec<u64>>> = vec![vec![a.one().to_vec()]];
    if t >= 1 {
        layers.push(g1.clone());
    }
    if t >= 2 {
        layers.push(
            factors
                .iter()
                .map(|&(b, i)| a.mul(&g1[b], &g1[i]))
                .collect(),
        );
    }
    for i in 3..=t {
        let mut covered = power(i + 1);
        let mut chosen = Vec::new();
        for l in 0..s {
            for r in 0..m(i - 1) {
                let g = a.mul(&layers[i - 1][r], &g1[l]);
                if covered.insert(&g)? {
                    if i == 3 && r < w_dims[l] {
                        return Err(fail(format!(
                            "layer 3 picked g_2{} g_1{} inside the previous stage",
                            r + 1,
                            l + 1
                        )));
                    }
                    chosen.push(g);
                }
            }
        }
        if chosen.len() != m(i) {
            return Err(fail(format!(
                "products with the generating subspace miss part of layer {i}"
            )));
        }
        layers.push(chosen);
    }

    let basis: Vec<Vec<u64>> = layers.iter().flatten().cloned().collect();
    let to_g = Matrix::from_columns(ring, n, &basis)
        .inverse()
        .ok_or(Error::Singular)?;
    let mut offset = vec![0usize; t + 2];
    for u in 0..=t {
        offset[u + 1] = offset[u] + m(u);
    }
    let mut data = CanonicalData {
        q: ring.modulus(),
        m_seq: m_seq.clone(),
        s,
        w_dims,
        constants: BTreeMap::new(),
    };
    let mut cache: BTreeMap<(usize, usize, usize), Vec<u64>> = BTreeMap::new();
    for key in data.index_set() {
        let (i, j, l, u, v) = key;
        let prod = cache.entry((i, j, l)).or_insert_with(|| {
            let p = to_g
                .mul_vec(&a.mul(&layers[i][j - 1], &g1[l - 1]))
                .expect("shape");
            debug_assert!(p[..offset[i + 1]].iter().all(|&x| x == 0));
            p
        });
        data.constants.insert(key, prod[offset[u] + v - 1]);
    }
    Ok(data)
}

/// Rebuilds a local algebra on the basis `g_{ij}` (graded order) from its
/// canonical data.
pub fn reconstruct(data: &CanonicalData) -> Result<BasedAlgebra> {
    let ring = Zn::prime_field(data.q)?;
    data.check_shape()?;
    let expected = data.index_set();
    for key in &expected {
        if !data.constants.contains_key(key) {
            return Err(fail(format!("missing constant {key:?}")));
        }
    }
    if data.constants.len() != expected.len() {
        let extra = data
            .constants
            .keys()
            .find(|k| expected.binary_search(k).is_err())
            .expect("extra key");
        return Err(fail(format!("unexpected constant {extra:?}")));
    }
    for (key, &value) in &data.constants {
        if value >= data.q {
            return Err(fail(format!(
                "constant {key:?} = {value} is not reduced mod {}",
                data.q
            )));
        }
    }

    let m_seq = &data.m_seq;
    let t = m_seq.len() - 1;
    let m = |i: usize| m_seq.get(i).copied().unwrap_or(0);
    let (m1, s) = (m(1), data.s);
    let n = data.n();
    let mut offset = vec![0usize; t + 2];
    for u in 0..=t {
        offset[u + 1] = offset[u] + m(u);
    }
    let idx = |u: usize, v: usize| offset[u] + v;
    let unit = |u: usize, v: usize| {
        let mut e = vec![0u64; n];
        e[idx(u, v)] = 1;
        e
    };
    let given = |i: usize, j: usize, l: usize| {
        let mut e = vec![0u64; n];
        for u in i + 1..=t {
            for v in 0..m(u) {
                e[idx(u, v)] = data.constants[&(i, j + 1, l + 1, u, v + 1)];
            }
        }
        e
    };

    // prod[i][j][l] = g_{ij} g_{1l}, 0-based j and l
    let mut prod: Vec<Vec<Vec<Option<Vec<u64>>>>> =
        (0..=t).map(|i| vec![vec![None; m1]; m(i)]).collect();
    let times = |w: &[u64], c: usize, prod: &Vec<Vec<Vec<Option<Vec<u64>>>>>| -> Result<Vec<u64>> {
        let mut out = vec![0u64; n];
        for u in 0..=t {
            for v in 0..m(u) {
                let coef = w[idx(u, v)];
                if coef != 0 {
                    let p = prod[u][v][c].as_ref().ok_or_else(|| {
                        fail(format!(
                            "product g_{}{} g_1{} is not yet determined",
                            u,
                            v + 1,
                            c + 1
                        ))
                    })?;
                    ring.axpy(&mut out, coef, p);
                }
            }
        }
        Ok(out)
    };

    for l in 0..m1 {
        prod[0][0][l] = Some(unit(1, l));
        for j in 0..m1 {
            prod[1][j][l] = Some(if j <= l {
                given(1, j, l)
            } else {
                given(1, l, j)
            });
        }
    }
    for i in 3..=t {
        for j in 0..m(i) {
            for l in 0..s {
                prod[i][j][l] = Some(given(i, j, l));
            }
        }
    }
    if t >= 2 {
        for l in 0..s {
            for j in 0..m(2) {
                let value = if j >= data.w_dims[l] {
                    given(2, j, l)
                } else {
                    let target = unit(2, j);
                    let (b, c) = (0..l)
                        .flat_map(|c| (0..=c).map(move |b| (b, c)))
                        .find(|&(b, c)| prod[1][b][c].as_ref() == Some(&target))
                        .ok_or_else(|| {
                            fail(format!(
                                "g_2{} is not a product g_1b g_1c with c < {}",
                                j + 1,
                                l + 1
                            ))
                        })?;
                    let w = prod[1][b][l].clone().expect("layer 1 known");
                    times(&w, c, &prod)?
                };
                prod[2][j][l] = Some(value);
            }
        }
    }

    // g_{ij} = g_{i-1,r} g_{1b} with b < s, for i >= 2
    let mut factor = vec![Vec::new(); t + 1];
    for i in 2..=t {
        for j in 0..m(i) {
            let target = unit(i, j);
            let hit = (0..m(i - 1))
                .flat_map(|r| (0..s).map(move |b| (r, b)))
                .find(|&(r, b)| prod[i - 1][r][b].as_ref() == Some(&target))
                .ok_or_else(|| {
                    fail(format!(
                        "g_{}{} is not a product of layer {} with the generators",
                        i,
                        j + 1,
                        i - 1
                    ))
                })?;
            factor[i].push(hit);
        }
    }
    for l in s..m1 {
        for i in 2..=t {
            for j in 0..m(i) {
                let (r, b) = factor[i][j];
                let w = prod[i - 1][r][l].clone().expect("lower layer known");
                prod[i][j][l] = Some(times(&w, b, &prod)?);
            }
        }
    }

    let ops: Vec<Matrix> = (0..m1)
        .map(|l| {
            let cols: Vec<Vec<u64>> = (0..=t)
                .flat_map(|i| (0..m(i)).map(move |j| (i, j)))
                .map(|(i, j)| prod[i][j][l].clone().expect("all products known"))
                .collect();
            Matrix::from_columns(ring, n, &cols)
        })
        .collect();
    let mut mult: Vec<Vec<Matrix>> = vec![vec![Matrix::identity(ring, n)]];
    if t >= 1 {
        mult.push(ops.clone());
    }
    for i in 2..=t {
        let row: Vec<Matrix> = factor[i]
            .iter()
            .map(|&(r, b)| ops[b].mul(&mult[i - 1][r]))
            .collect::<Result<_>>()?;
        mult.push(row);
    }
    let flat: Vec<&Matrix> = mult.iter().flatten().collect();
    let mut table = StructureTable::zero_normalized(ring, n);
    for (x, mx) in flat.iter().enumerate() {
        for y in 0..n {
            table.set_product(x, y, &mx.column(y));
        }
    }
    for (&(i, j, l, u, v), &value) in &data.constants {
        let got = table.get(idx(i, j - 1), idx(1, l - 1), idx(u, v - 1));
        if got != value {
            return Err(fail(format!(
                "constant {:?} = {value} conflicts with the derived value {got}",
                (i, j, l, u, v)
            )));
        }
    }
    BasedAlgebra::new(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_bullet, make_monogenic};
    use crate::symmetry::isomorphic;

    fn f(p: u64) -> Zn {
        Zn::prime_field(p).unwrap()
    }

    #[test]
    fn bullet_data() {
        let b = make_bullet(f(2), 4).unwrap();
        let d = extract_canonical(&b, Budget::default()).unwrap();
        assert_eq!(d.m_seq, vec![1, 3]);
        assert_eq!(d.s, 0);
        assert!(d.constants.is_empty());
        assert_eq!(reconstruct(&d).unwrap().table(), b.table());
    }

    #[test]
    fn truncated_polynomial_data() {
        let a = make_monogenic(f(3), &[0; 4]).unwrap();
        let d = extract_canonical(&a, Budget::default()).unwrap();
        assert_eq!(d.m_seq, vec![1, 1, 1, 1]);
        assert_eq!(d.s, 1);
        assert_eq!(d.w_dims, vec![0, 1]);
        assert_eq!(d.constants.get(&(1, 1, 1, 2, 1)), Some(&1));
        assert_eq!(d.constants.get(&(2, 1, 1, 3, 1)), Some(&1));
        let back = reconstruct(&d).unwrap();
        assert!(isomorphic(&back, &a, Budget::default()).unwrap().is_some());
    }

    #[test]
    fn json_round_trip() {
        let a = make_monogenic(f(2), &[0, 0, 0]).unwrap();
        let d = extract_canonical(&a, Budget::default()).unwrap();
        assert_eq!(CanonicalData::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn missing_constants_are_reported() {
        let a = make_monogenic(f(2), &[0, 0, 0]).unwrap();
        let mut d = extract_canonical(&a, Budget::default()).unwrap();
        d.constants.remove(&(1, 1, 1, 2, 1));
        let err = reconstruct(&d).unwrap_err();
        assert!(err.to_string().contains("missing constant (1, 1, 1, 2, 1)"));
    }

    #[test]
    fn non_local_input_is_rejected() {
        let s = crate::algebra::make_split(f(2), 2).unwrap();
        assert!(matches!(
            extract_canonical(&s, Budget::default()),
            Err(Error::NotLocal)
        ));
    }
}
