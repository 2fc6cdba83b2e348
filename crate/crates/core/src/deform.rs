//! First-order deformations: tangent spaces from the Jacobian of the defining
//! identities, and the linear obstruction to lifting a table from `Z/p^2` to
//! `Z/p^3`.

use std::fmt;

use rayon::prelude::*;

use crate::algebra::{make_bullet, BasedAlgebra, StructureTable};
use crate::error::{Error, Result};
use crate::exactla::{solve_affine, AffineSolution, Matrix, Subspace, Zn};

/// Which moduli space the tangent space is taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// All structure constants and identity coordinates vary.
    B,
    /// Normalized tables: only `c_ij^l` with `i, j >= 2` (1-based) vary.
    B1,
}

/// A coordinate of the table: `c_ij^l` or `d_i` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    C(usize, usize, usize),
    D(usize),
}

/// One defining identity (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Equation {
    /// `c_ij^l - c_ji^l`, `i != j`.
    Comm(usize, usize, usize),
    /// `sum_m c_ij^m c_mk^l - c_jk^m c_im^l`.
    Assoc(usize, usize, usize, usize),
    /// `sum_i d_i c_ij^l - δ_jl`.
    Unit(usize, usize),
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Equation::Comm(i, j, l) => write!(f, "comm({},{},{})", i + 1, j + 1, l + 1),
            Equation::Assoc(i, j, k, l) => {
                write!(f, "assoc({},{},{},{})", i + 1, j + 1, k + 1, l + 1)
            }
            Equation::Unit(j, l) => write!(f, "unit({},{})", j + 1, l + 1),
        }
    }
}

/// The linearized defining identities at a point.
#[derive(Clone, Debug)]
pub struct DeformationSystem {
    pub unknowns: Vec<Var>,
    pub equations: Vec<Equation>,
    /// One Jacobian row per equation, over the point's coefficient ring.
    pub rows: Vec<Vec<u64>>,
}

fn unknowns(n: usize, space: Space) -> Vec<Var> {
    let lo = if space == Space::B1 { 1 } else { 0 };
    let mut v: Vec<Var> = (lo..n)
        .flat_map(|i| (lo..n).flat_map(move |j| (0..n).map(move |l| Var::C(i, j, l))))
        .collect();
    if space == Space::B {
        v.extend((0..n).map(Var::D));
    }
    v
}

fn equations(n: usize) -> Vec<Equation> {
    let mut eqs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                eqs.extend((0..n).map(|l| Equation::Comm(i, j, l)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                eqs.extend((0..n).map(|l| Equation::Assoc(i, j, k, l)));
            }
        }
    }
    for j in 0..n {
        eqs.extend((0..n).map(|l| Equation::Unit(j, l)));
    }
    eqs
}

/// Jacobian of the defining identities at `t`, restricted to `space`.
pub fn deformation_system(t: &StructureTable, space: Space) -> DeformationSystem {
    let n = t.n();
    let ring = t.ring();
    let unknowns = unknowns(n, space);
    let col = |v: Var| -> Option<usize> {
        match (space, v) {
            (Space::B, Var::C(i, j, l)) => Some((i * n + j) * n + l),
            (Space::B, Var::D(i)) => Some(n * n * n + i),
            (Space::B1, Var::C(i, j, l)) if i >= 1 && j >= 1 => {
                Some(((i - 1) * (n - 1) + (j - 1)) * n + l)
            }
            _ => None,
        }
    };
    let equations = equations(n);
    let rows = equations
        .par_iter()
        .map(|eq| {
            let mut row = vec![0u64; unknowns.len()];
            let mut add = |v: Var, x: u64| {
                if let Some(c) = col(v) {
                    row[c] = ring.add(row[c], x);
                }
            };
            match *eq {
                Equation::Comm(i, j, l) => {
                    add(Var::C(i, j, l), 1);
                    add(Var::C(j, i, l), ring.neg(1));
                }
                Equation::Assoc(i, j, k, l) => {
                    for m in 0..n {
                        add(Var::C(i, j, m), t.get(m, k, l));
                        add(Var::C(m, k, l), t.get(i, j, m));
                        add(Var::C(j, k, m), ring.neg(t.get(i, m, l)));
                        add(Var::C(i, m, l), ring.neg(t.get(j, k, m)));
                    }
                }
                Equation::Unit(j, l) => {
                    for i in 0..n {
                        add(Var::D(i), t.get(i, j, l));
                        add(Var::C(i, j, l), t.identity()[i]);
                    }
                }
            }
            row
        })
        .collect();
    DeformationSystem {
        unknowns,
        equations,
        rows,
    }
}

const RANK_BLOCK: usize = 256;

/// Rank of a row set, reducing blocks in parallel and merging in order.
fn rank_of_rows(ring: Zn, cols: usize, rows: &[Vec<u64>]) -> Result<usize> {
    let blocks: Vec<Result<Subspace>> = rows
        .par_chunks(RANK_BLOCK)
        .map(|chunk| Subspace::span(ring, cols, chunk))
        .collect();
    let mut acc = Subspace::zero(ring, cols);
    for b in blocks {
        acc = acc.sum(&b?)?;
    }
    Ok(acc.dim())
}

/// Dimension of the Zariski tangent space at `a`.
pub fn tangent_dim(a: &BasedAlgebra, space: Space) -> Result<usize> {
    a.ring().require_field()?;
    if space == Space::B1 && !a.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let sys = deformation_system(a.table(), space);
    Ok(sys.unknowns.len() - rank_of_rows(a.ring(), sys.unknowns.len(), &sys.rows)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Tangent dimension exceeds the dimension of a component through the point.
    CertifiedSingular,
    /// Tangent dimension equals the known dimension of a smooth space.
    SmoothConsistent,
    /// No conclusion is available from the known dimensions.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityReport {
    pub n: usize,
    pub space: Space,
    pub tangent_dim: usize,
    /// Dimension of the étale component: `n(n-1)` in B1, `n^2` in B.
    pub component_floor: usize,
    /// Dimension of the whole space where it is known to be smooth (`n <= 3`).
    pub known_dimension: Option<usize>,
    pub verdict: Verdict,
}

/// `dim B_n^1` for `n <= 3`.
fn b1_dimension(n: usize) -> Option<usize> {
    [0, 0, 2, 6].get(n).copied()
}

pub fn singularity_report(a: &BasedAlgebra, space: Space) -> Result<SingularityReport> {
    let n = a.n();
    let tangent = tangent_dim(a, space)?;
    let floor = match space {
        Space::B1 => n * n.saturating_sub(1),
        Space::B => n * n,
    };
    let known = b1_dimension(n).map(|d| if space == Space::B { d + n } else { d });
    let is_bullet = n >= 1 && a.table() == make_bullet(a.ring(), n)?.table();
    let verdict = match known {
        Some(k) if k == tangent => Verdict::SmoothConsistent,
        Some(_) => Verdict::Undetermined,
        None if is_bullet && tangent > floor => Verdict::CertifiedSingular,
        None => Verdict::Undetermined,
    };
    Ok(SingularityReport {
        n,
        space,
        tangent_dim: tangent,
        component_floor: floor,
        known_dimension: known,
        verdict,
    })
}

/// Rank-4 table over `Z/p^2` on `1, x, y, z` with
/// `x² = px, y² = py, z² = pz, xy = pz, yz = px, zx = py`.
pub fn make_pi_example(p: u64) -> Result<StructureTable> {
    let ring = Zn::new(p * p)?;
    if ring.exponent() != 2 {
        return Err(Error::NotPrime(p));
    }
    let mut t = StructureTable::zero_normalized(ring, 4);
    let (x, y, z) = (1, 2, 3);
    for (a, b, c) in [
        (x, x, x),
        (y, y, y),
        (z, z, z),
        (x, y, z),
        (y, z, x),
        (z, x, y),
    ] {
        t.set(a, b, c, p);
        t.set(b, a, c, p);
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    /// A table over `Z/p^3` reducing to the input and passing validation.
    Feasible(StructureTable),
    /// The linear system for the lift digits has no solution; the certificate
    /// is a combination of the listed equations that cancels every unknown
    /// but not the constant term.
    Infeasible { certificate: Vec<(Equation, u64)> },
}

impl LiftOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LiftOutcome::Feasible(_))
    }
}

fn evaluate(t: &StructureTable, eq: Equation) -> i128 {
    let n = t.n();
    let c = |i: usize, j: usize, l: usize| t.get(i, j, l) as i128;
    match eq {
        Equation::Comm(i, j, l) => c(i, j, l) - c(j, i, l),
        Equation::Assoc(i, j, k, l) => (0..n)
            .map(|m| c(i, j, m) * c(m, k, l) - c(j, k, m) * c(i, m, l))
            .sum(),
        Equation::Unit(j, l) => {
            (0..n)
                .map(|i| t.identity()[i] as i128 * c(i, j, l))
                .sum::<i128>()
                - i128::from(j == l)
        }
    }
}

/// The linear system `J t = rhs` over `F_p` for the lift digits `t` of a
/// table valid over `Z/p^2`: lifts are `c + p^2 t`, and each identity becomes
/// linear in `t` because `p^4 = 0` mod `p^3`. Unknowns are all `c` then all `d`
/// cells, as in [`Space::B`].
pub fn lift_system(t: &StructureTable) -> Result<(DeformationSystem, Vec<u64>)> {
    let ring = t.ring();
    if ring.exponent() != 2 {
        return Err(Error::Precondition(format!(
            "expected a table over Z/p^2, got modulus {}",
            ring.modulus()
        )));
    }
    if !t.is_valid() {
        return Err(Error::Invalid(t.violations()));
    }
    let p = ring.prime();
    let fp = Zn::prime_field(p)?;
    let p2 = (p * p) as i128;
    let reduced = StructureTable::new(
        fp,
        t.n(),
        t.constants().iter().map(|&x| x % p).collect(),
        t.identity().iter().map(|&x| x % p).collect(),
    )?;
    let sys = deformation_system(&reduced, Space::B);
    let rhs = sys
        .equations
        .iter()
        .map(|&eq| {
            let v = evaluate(t, eq);
            debug_assert_eq!(v.rem_euclid(p2), 0);
            fp.neg(((v / p2).rem_euclid(p as i128)) as u64)
        })
        .collect();
    Ok((sys, rhs))
}

/// Decides whether a table valid over `Z/p^2` lifts to one valid over
/// `Z/p^3`.
pub fn lift_obstruction(t: &StructureTable) -> Result<LiftOutcome> {
    let (sys, rhs) = lift_system(t)?;
    let p = t.ring().prime();
    let fp = Zn::prime_field(p)?;
    let n = t.n();
    let rows = sys.rows.len();
    let jac = Matrix::from_flat(fp, rows, sys.unknowns.len(), sys.rows.concat())?;
    match solve_affine(&jac, &rhs)? {
        AffineSolution::Solution(digits) => {
            let big = Zn::new(p * p * p)?;
            let lift = |x: u64, digit: u64| x + p * p * digit;
            let c: Vec<u64> = t
                .constants()
                .iter()
                .zip(&digits)
                .map(|(&x, &d)| lift(x, d))
                .collect();
            let d: Vec<u64> = t
                .identity()
                .iter()
                .zip(&digits[n * n * n..])
                .map(|(&x, &d)| lift(x, d))
                .collect();
            let out = StructureTable::new(big, n, c, d)?;
            if !out.is_valid() {
                return Err(Error::Inconsistent("lift failed validation".into()));
            }
            Ok(LiftOutcome::Feasible(out))
        }
        AffineSolution::Infeasible { certificate } => Ok(LiftOutcome::Infeasible {
            certificate: sys
                .equations
                .iter()
                .copied()
                .zip(certificate)
                .filter(|&(_, y)| y != 0)
                .collect(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_split;

    fn f(p: u64) -> Zn {
        Zn::prime_field(p).unwrap()
    }

    #[test]
    fn bullet_tangent_dimensions() {
        for q in [2, 3, 5] {
            let b = make_bullet(f(q), 4).unwrap();
            assert_eq!(tangent_dim(&b, Space::B1).unwrap(), 18);
            assert_eq!(tangent_dim(&b, Space::B).unwrap(), 22);
        }
        assert_eq!(
            tangent_dim(&make_bullet(f(3), 2).unwrap(), Space::B1).unwrap(),
            2
        );
    }

    #[test]
    fn reports() {
        let r = singularity_report(&make_bullet(f(2), 4).unwrap(), Space::B1).unwrap();
        assert_eq!(
            (r.tangent_dim, r.component_floor, r.verdict),
            (18, 12, Verdict::CertifiedSingular)
        );
        let r = singularity_report(&make_bullet(f(2), 3).unwrap(), Space::B1).unwrap();
        assert_eq!((r.tangent_dim, r.verdict), (6, Verdict::SmoothConsistent));
        let r = singularity_report(&make_split(f(2), 3).unwrap(), Space::B).unwrap();
        assert_eq!((r.tangent_dim, r.verdict), (9, Verdict::SmoothConsistent));
    }

    #[test]
    fn pi_example_is_valid_mod_p_squared() {
        for p in [2, 3, 5] {
            assert!(make_pi_example(p).unwrap().is_valid());
        }
    }

    #[test]
    fn pi_example_does_not_lift() {
        for p in [2, 3, 5] {
            let t = make_pi_example(p).unwrap();
            let LiftOutcome::Infeasible { certificate } = lift_obstruction(&t).unwrap() else {
                panic!("p = {p} lifted");
            };
            let (sys, rhs) = lift_system(&t).unwrap();
            let fp = Zn::prime_field(p).unwrap();
            let weight = |eq: &Equation| {
                certificate
                    .iter()
                    .find(|(e, _)| e == eq)
                    .map_or(0, |&(_, y)| y)
            };
            let mut combo = vec![0u64; sys.unknowns.len()];
            let mut constant = 0;
            for (k, eq) in sys.equations.iter().enumerate() {
                fp.axpy(&mut combo, weight(eq), &sys.rows[k]);
                constant = fp.add(constant, fp.mul(weight(eq), rhs[k]));
            }
            assert!(combo.iter().all(|&x| x == 0));
            assert_ne!(constant, 0);
        }
    }

    #[test]
    fn split_lifts() {
        let r = Zn::new(9).unwrap();
        let s = make_split(r, 3).unwrap();
        match lift_obstruction(s.table()).unwrap() {
            LiftOutcome::Feasible(t) => assert!(t.is_valid() && t.ring().modulus() == 27),
            other => panic!("{other:?}"),
        }
    }
}
