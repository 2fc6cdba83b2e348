use super::based::BasedAlgebra;
use super::table::StructureTable;
use crate::error::{Error, Result};
use crate::exactla::{solve_affine, Matrix, Subspace, Zn};

/// `k^n` with coordinatewise multiplication.
pub fn make_split(ring: Zn, n: usize) -> Result<BasedAlgebra> {
    let mut t = StructureTable::new(ring, n, vec![0; n * n * n], vec![1; n])?;
    for i in 0..n {
        t.set(i, i, i, 1);
    }
    Ok(BasedAlgebra::assume_valid(t))
}

/// `k[x_1..x_{n-1}] / (x_1..x_{n-1})^2`, basis `1, x_1, .., x_{n-1}`.
pub fn make_bullet(ring: Zn, n: usize) -> Result<BasedAlgebra> {
    if n == 0 {
        return Err(Error::Precondition(
            "bullet algebra needs rank at least 1".into(),
        ));
    }
    Ok(BasedAlgebra::assume_valid(StructureTable::zero_normalized(
        ring, n,
    )))
}

/// Direct product; the basis of `a` comes first.
pub fn product(a: &BasedAlgebra, b: &BasedAlgebra) -> Result<BasedAlgebra> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch(a.ring().modulus(), b.ring().modulus()));
    }
    let (na, nb) = (a.n(), b.n());
    let n = na + nb;
    let mut d = a.one().to_vec();
    d.extend_from_slice(b.one());
    let mut t = StructureTable::new(a.ring(), n, vec![0; n * n * n], d)?;
    for i in 0..na {
        for j in 0..na {
            for l in 0..na {
                t.set(i, j, l, a.table().get(i, j, l));
            }
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            for l in 0..nb {
                t.set(na + i, na + j, na + l, b.table().get(i, j, l));
            }
        }
    }
    Ok(BasedAlgebra::assume_valid(t))
}

/// `k[x]/(f)` for monic `f = x^k + f[k-1] x^(k-1) + .. + f[0]`, basis `1, x, .., x^(k-1)`.
pub fn make_monogenic(ring: Zn, f: &[u64]) -> Result<BasedAlgebra> {
    let k = f.len();
    if k == 0 {
        return Err(Error::Precondition(
            "monic polynomial of degree at least 1 required".into(),
        ));
    }
    ring.check_reduced(f)?;
    // powers[e] = coordinates of x^e for e < 2k-1
    let mut powers: Vec<Vec<u64>> = Vec::with_capacity(2 * k - 1);
    for e in 0..2 * k - 1 {
        if e < k {
            let mut v = vec![0; k];
            v[e] = 1;
            powers.push(v);
        } else {
            // x^e = x * x^(e-1), reducing x^k by f
            let prev = &powers[e - 1];
            let top = prev[k - 1];
            let mut v = vec![0; k];
            v[1..k].copy_from_slice(&prev[..k - 1]);
            ring.axpy(&mut v, ring.neg(top), f);
            powers.push(v);
        }
    }
    let mut d = vec![0; k];
    d[0] = 1;
    let mut t = StructureTable::new(ring, k, vec![0; k * k * k], d)?;
    for i in 0..k {
        for j in 0..k {
            t.set_product(i, j, &powers[i + j]);
        }
    }
    Ok(BasedAlgebra::assume_valid(t))
}

/// The rank-3 table on `1, α, β` with `α² = -ac + bα - aβ`,
/// `β² = -bd + dα - cβ`, `αβ = -ad`.
pub fn make_cubic(ring: Zn, a: u64, b: u64, c: u64, d: u64) -> Result<BasedAlgebra> {
    ring.check_reduced(&[a, b, c, d])?;
    let r = ring;
    let mut t = StructureTable::zero_normalized(ring, 3);
    t.set_product(1, 1, &[r.neg(r.mul(a, c)), b, r.neg(a)]);
    t.set_product(2, 2, &[r.neg(r.mul(b, d)), d, r.neg(c)]);
    let ab = [r.neg(r.mul(a, d)), 0, 0];
    t.set_product(1, 2, &ab);
    t.set_product(2, 1, &ab);
    BasedAlgebra::new(t)
}

/// Degree-2 monomials `x_i x_j` (`i <= j`) in lexicographic order.
pub fn quadratic_monomials(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect()
}

/// `k[x_1..x_d] / (m^3 + V)` for `V` a subspace of the degree-2 monomial
/// space. Basis: `1`, the `x_i`, then the lexicographically earliest
/// monomials whose classes complete a basis of the quotient.
pub fn make_truncated_local(ring: Zn, d: usize, relation_span: &Subspace) -> Result<BasedAlgebra> {
    ring.require_field()?;
    let monos = quadratic_monomials(d);
    let big_d = monos.len();
    if relation_span.ambient_dim() != big_d || relation_span.ring() != ring {
        return Err(Error::Dimension(format!(
            "relation span must live in the {big_d}-dimensional space of quadratic monomials"
        )));
    }
    let unit = |k: usize| {
        let mut v = vec![0u64; big_d];
        v[k] = 1;
        v
    };
    let mut covered = relation_span.clone();
    let mut reps = Vec::new();
    for k in 0..big_d {
        if covered.insert(&unit(k))? {
            reps.push(k);
        }
    }
    let r = reps.len();
    // columns: chosen representatives, then a basis of V
    let mut cols: Vec<Vec<u64>> = reps.iter().map(|&k| unit(k)).collect();
    cols.extend(relation_span.basis().iter().cloned());
    let sys = Matrix::from_columns(ring, big_d, &cols);
    let n = 1 + d + r;
    let mut t = StructureTable::zero_normalized(ring, n);
    for (k, &(i, j)) in monos.iter().enumerate() {
        let sol = solve_affine(&sys, &unit(k))?;
        let coords = sol
            .solution()
            .expect("representatives and V span the monomials");
        let mut v = vec![0u64; n];
        v[1 + d..].copy_from_slice(&coords[..r]);
        t.set_product(1 + i, 1 + j, &v);
        t.set_product(1 + j, 1 + i, &v);
    }
    Ok(BasedAlgebra::assume_valid(t))
}

/// `k[a, b, c, d] / (a^2, ab, b^2, c^2, cd, d^2, ad - bc)`, of rank 8 with
/// Hilbert function `(1, 4, 3)`.
pub fn make_rank8_local(ring: Zn) -> Result<BasedAlgebra> {
    let monos = quadratic_monomials(4);
    let unit = |i: usize, j: usize| {
        let mut v = vec![0u64; monos.len()];
        v[monos
            .iter()
            .position(|&m| m == (i, j))
            .expect("quadratic monomial")] = 1;
        v
    };
    let mut gens: Vec<Vec<u64>> = [(0, 0), (0, 1), (1, 1), (2, 2), (2, 3), (3, 3)]
        .iter()
        .map(|&(i, j)| unit(i, j))
        .collect();
    gens.push(ring.sub_vec(&unit(0, 3), &unit(1, 2)));
    make_truncated_local(ring, 4, &Subspace::span(ring, monos.len(), &gens)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ViolationKind;

    fn f(p: u64) -> Zn {
        Zn::prime_field(p).unwrap()
    }

    #[test]
    fn split_validates() {
        assert!(make_split(f(2), 3).unwrap().table().is_valid());
    }

    #[test]
    fn bullet_is_normalized_and_valid() {
        let b = make_bullet(f(2), 4).unwrap();
        assert!(b.is_normalized() && b.table().is_valid());
        assert!(make_bullet(f(2), 0).is_err());
    }

    #[test]
    fn flipped_split_cell_reports_commutativity() {
        let mut t = make_split(f(2), 3).unwrap().into_table();
        t.set(1, 2, 1, 1);
        let v = t.violations();
        assert_eq!(v[0].kind, ViolationKind::Commutativity);
        assert_eq!(v[0].index, vec![2, 1, 1]);
        assert_eq!(
            v.iter()
                .filter(|x| x.kind == ViolationKind::Commutativity)
                .count(),
            1
        );
    }

    #[test]
    fn cubic_tables_are_valid() {
        let z = make_cubic(f(2), 0, 0, 0, 0).unwrap();
        assert_eq!(z.table(), make_bullet(f(2), 3).unwrap().table());
        let a = make_cubic(f(2), 1, 0, 0, 1).unwrap();
        assert_eq!(a.table().product(1, 2), &[1, 0, 0]);
    }

    #[test]
    fn monogenic_truncations() {
        let a = make_monogenic(f(3), &[0, 0, 0]).unwrap();
        assert_eq!(a.table().product(1, 2), &[0, 0, 0]);
        assert_eq!(a.table().product(1, 1), &[0, 0, 1]);
        let b = make_monogenic(f(2), &[0, 1]).unwrap();
        assert_eq!(b.table().product(1, 1), &[0, 1]);
    }

    #[test]
    fn truncated_local_ranks() {
        let r = f(2);
        let a = make_truncated_local(r, 1, &Subspace::zero(r, 1)).unwrap();
        assert_eq!(a.n(), 3);
        assert_eq!(a.table().product(1, 1), &[0, 0, 1]);

        let v = Subspace::span(r, 3, &[vec![1, 0, 0]]).unwrap();
        let b = make_truncated_local(r, 2, &v).unwrap();
        assert_eq!(b.n(), 5);
        assert_eq!(b.table().product(1, 1), &[0; 5]);
        assert_eq!(b.table().product(1, 2), &[0, 0, 0, 1, 0]);
        assert_eq!(b.table().product(2, 2), &[0, 0, 0, 0, 1]);
    }

    #[test]
    fn product_of_splits() {
        let p = product(&make_split(f(3), 2).unwrap(), &make_split(f(3), 3).unwrap()).unwrap();
        assert_eq!(p.table(), make_split(f(3), 5).unwrap().table());
    }
}
