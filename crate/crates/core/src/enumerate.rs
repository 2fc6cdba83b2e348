//! Exhaustive enumeration and classification of normalized tables.
//!
//! Normalized tables (`d = e_1`, first row and column forced) are enumerated
//! by a depth-first search over the cells `c_ij^l` with `2 <= i <= j`
//! (1-based), filling `c_ji^l` alongside. Each associativity identity is
//! checked as soon as the last cell it reads has been assigned. Isomorphism
//! classes are the orbits of H, the matrices with first column `e_1`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::algebra::{BasedAlgebra, StructureTable};
use crate::budget::{Budget, NodeCounter};
use crate::error::{Error, Result};
use crate::exactla::{h_generators, h_order, iterate_h, Zn};
use crate::localstruct::{idempotents, radical_filtration};
use crate::symmetry::{act_table, InvertibleMatrix};

/// Order in which the search assigns free cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CellOrder {
    /// `(i, j, l)` lexicographic.
    #[default]
    Lexicographic,
    /// The reverse of the lexicographic order.
    Reversed,
}

type Identity = (usize, usize, usize, usize);

struct Plan {
    ring: Zn,
    n: usize,
    cells: Vec<(usize, usize, usize)>,
    /// Identities whose last free cell is at each position.
    checks: Vec<Vec<Identity>>,
}

impl Plan {
    fn new(n: usize, ring: Zn, order: CellOrder) -> Plan {
        let mut cells: Vec<(usize, usize, usize)> = (1..n)
            .flat_map(|i| (i..n).flat_map(move |j| (0..n).map(move |l| (i, j, l))))
            .collect();
        if order == CellOrder::Reversed {
            cells.reverse();
        }
        let pos: HashMap<(usize, usize, usize), usize> =
            cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let cell_pos = |a: usize, b: usize, c: usize| -> Option<usize> {
            (a >= 1 && b >= 1).then(|| pos[&(a.min(b), a.max(b), c)])
        };
        let mut checks = vec![Vec::new(); cells.len()];
        for i in 1..n {
            for j in 1..n {
                for k in 1..n {
                    for l in 0..n {
                        let last = (0..n)
                            .flat_map(|m| {
                                [
                                    cell_pos(i, j, m),
                                    cell_pos(m, k, l),
                                    cell_pos(j, k, m),
                                    cell_pos(i, m, l),
                                ]
                            })
                            .flatten()
                            .max()
                            .expect("i, j, k >= 1 always read a free cell");
                        checks[last].push((i, j, k, l));
                    }
                }
            }
        }
        Plan {
            ring,
            n,
            cells,
            checks,
        }
    }

    fn holds(&self, t: &StructureTable, (i, j, k, l): Identity) -> bool {
        let q = self.ring.modulus();
        let (mut lhs, mut rhs) = (0u64, 0u64);
        for m in 0..self.n {
            lhs = (lhs + t.get(i, j, m) * t.get(m, k, l)) % q;
            rhs = (rhs + t.get(j, k, m) * t.get(i, m, l)) % q;
        }
        lhs == rhs
    }

    fn assign(&self, t: &mut StructureTable, pos: usize, v: u64) {
        let (i, j, l) = self.cells[pos];
        t.set(i, j, l, v);
        t.set(j, i, l, v);
    }

    fn dfs(
        &self,
        pos: usize,
        t: &mut StructureTable,
        out: &mut Vec<StructureTable>,
        counter: &NodeCounter,
    ) -> Result<()> {
        if pos == self.cells.len() {
            if !t.is_valid() {
                return Err(Error::Inconsistent(
                    "search produced a table failing validation".into(),
                ));
            }
            out.push(t.clone());
            return Ok(());
        }
        for v in self.ring.elements() {
            counter.tick()?;
            self.assign(t, pos, v);
            if self.checks[pos].iter().all(|&id| self.holds(t, id)) {
                self.dfs(pos + 1, t, out, counter)?;
            }
        }
        self.assign(t, pos, 0);
        Ok(())
    }
}

/// Number of leading cells fixed per parallel shard.
const SHARD_CELLS: usize = 4;

/// All valid normalized tables of rank `n` over F_q, sorted.
pub fn enumerate_valid(
    n: usize,
    q: u64,
    order: CellOrder,
    budget: Budget,
) -> Result<Vec<BasedAlgebra>> {
    let ring = Zn::prime_field(q)?;
    if n == 0 {
        return Err(Error::Precondition("rank must be at least 1".into()));
    }
    let plan = Plan::new(n, ring, order);
    let counter = NodeCounter::new(budget);
    let depth = SHARD_CELLS.min(plan.cells.len());
    // shallow prefixes, each satisfying the identities decided within it
    let mut prefixes = vec![StructureTable::zero_normalized(ring, n)];
    for pos in 0..depth {
        let mut next = Vec::new();
        for t in &prefixes {
            for v in ring.elements() {
                counter.tick()?;
                let mut u = t.clone();
                plan.assign(&mut u, pos, v);
                if plan.checks[pos].iter().all(|&id| plan.holds(&u, id)) {
                    next.push(u);
                }
            }
        }
        prefixes = next;
    }
    let shards: Vec<Result<Vec<StructureTable>>> = prefixes
        .into_par_iter()
        .map(|mut t| {
            let mut out = Vec::new();
            plan.dfs(depth, &mut t, &mut out, &counter).map(|_| out)
        })
        .collect();
    let mut all = Vec::new();
    for s in shards {
        all.extend(s?);
    }
    all.sort();
    Ok(all.into_iter().map(BasedAlgebra::assume_valid).collect())
}

/// Brute force over every normalized candidate table, including asymmetric
/// ones, keeping those that validate. Sorted.
pub fn sweep_valid(n: usize, q: u64, budget: Budget) -> Result<Vec<StructureTable>> {
    let ring = Zn::prime_field(q)?;
    if n == 0 {
        return Err(Error::Precondition("rank must be at least 1".into()));
    }
    let free: Vec<(usize, usize, usize)> = (1..n)
        .flat_map(|i| (1..n).flat_map(move |j| (0..n).map(move |l| (i, j, l))))
        .collect();
    let total = ring.count_vectors(free.len());
    budget.check(total)?;
    let base = StructureTable::zero_normalized(ring, n);
    let mut out: Vec<StructureTable> = (0..total as u64)
        .into_par_iter()
        .filter_map(|idx| {
            let vals = ring.decode_vec(idx as u128, free.len());
            let mut t = base.clone();
            for (&(i, j, l), v) in free.iter().zip(vals) {
                t.set(i, j, l, v);
            }
            t.is_valid().then_some(t)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Invariants recorded for each class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSignature {
    pub delta_nonzero: bool,
    pub is_local: bool,
    /// `dim A/N, dim N/N^2, ...` for the nilradical `N`.
    pub filtration: Vec<usize>,
    pub idempotents: usize,
}

impl ClassSignature {
    pub fn of(a: &BasedAlgebra, budget: Budget) -> Result<Self> {
        let idem = idempotents(a, budget)?.len();
        Ok(ClassSignature {
            delta_nonzero: a.is_etale(),
            is_local: idem == 2,
            filtration: radical_filtration(a)?,
            idempotents: idem,
        })
    }

    pub fn filtration_string(&self) -> String {
        self.filtration
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    pub class_id: usize,
    /// Least table of the orbit.
    pub representative: BasedAlgebra,
    pub aut_order: u128,
    pub orbit_size: u128,
    pub signature: ClassSignature,
}

#[derive(Clone, Debug, Default)]
pub struct ClassifyOptions {
    pub order: CellOrder,
    /// Enumerate by brute force instead of the pruned search.
    pub full_sweep: bool,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// H-orbits on the valid normalized tables, as lists of indices into `tables`.
pub fn orbits(tables: &[StructureTable], ring: Zn, n: usize) -> Result<Vec<Vec<usize>>> {
    let index: HashMap<&[u64], usize> = tables
        .iter()
        .enumerate()
        .map(|(k, t)| (t.constants(), k))
        .collect();
    let gens: Vec<InvertibleMatrix> = h_generators(n, ring)
        .into_iter()
        .map(InvertibleMatrix::new)
        .collect::<Result<_>>()?;
    let images: Vec<Result<Vec<usize>>> = tables
        .par_iter()
        .map(|t| {
            gens.iter()
                .map(|g| {
                    let u = act_table(g, t)?;
                    index.get(u.constants()).copied().ok_or_else(|| {
                        Error::Inconsistent("table set is not closed under H".into())
                    })
                })
                .collect()
        })
        .collect();
    let mut parent: Vec<usize> = (0..tables.len()).collect();
    for (k, img) in images.into_iter().enumerate() {
        for other in img? {
            let (a, b) = (find(&mut parent, k), find(&mut parent, other));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for k in 0..tables.len() {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(k);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    Ok(out)
}

/// Number of `h` in H fixing the normalized table `t`.
pub fn stabilizer_order(t: &StructureTable, budget: Budget) -> Result<u128> {
    let mut count = 0u128;
    for m in iterate_h(t.n(), t.ring(), budget)? {
        if act_table(&InvertibleMatrix::new(m)?, t)? == *t {
            count += 1;
        }
    }
    Ok(count)
}

/// Isomorphism classes of rank-`n` algebras over F_q, in order of their
/// representatives.
pub fn classify(
    n: usize,
    q: u64,
    opts: &ClassifyOptions,
    budget: Budget,
) -> Result<Vec<ClassRecord>> {
    let ring = Zn::prime_field(q)?;
    let tables: Vec<StructureTable> = if opts.full_sweep {
        sweep_valid(n, q, budget)?
    } else {
        enumerate_valid(n, q, opts.order, budget)?
            .into_iter()
            .map(BasedAlgebra::into_table)
            .collect()
    };
    let groups = orbits(&tables, ring, n)?;
    let records: Vec<Result<ClassRecord>> = groups
        .par_iter()
        .map(|g| {
            let rep = tables[g[0]].clone();
            let aut_order = stabilizer_order(&rep, budget)?;
            let representative = BasedAlgebra::assume_valid(rep);
            let signature = ClassSignature::of(&representative, budget)?;
            Ok(ClassRecord {
                class_id: 0,
                representative,
                aut_order,
                orbit_size: g.len() as u128,
                signature,
            })
        })
        .collect();
    let mut out = Vec::with_capacity(records.len());
    for (k, r) in records.into_iter().enumerate() {
        let mut r = r?;
        r.class_id = k + 1;
        out.push(r);
    }
    Ok(out)
}

pub const CSV_HEADER: &str =
    "n,q,class_id,aut_order,orbit_size,delta_nonzero,is_local,filtration,idempotents";

pub fn csv_row(n: usize, q: u64, r: &ClassRecord) -> String {
    format!(
        "{n},{q},{},{},{},{},{},{},{}",
        r.class_id,
        r.aut_order,
        r.orbit_size,
        r.signature.delta_nonzero,
        r.signature.is_local,
        r.signature.filtration_string(),
        r.signature.idempotents
    )
}

pub fn classes_to_csv(n: usize, q: u64, classes: &[ClassRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in classes {
        s.push_str(&csv_row(n, q, r));
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub n: usize,
    pub q: u64,
    pub valid_tables: u128,
    pub h_order: u128,
    pub classes: usize,
    pub etale_classes: usize,
    pub local_classes: usize,
}

pub fn census(n: usize, q: u64, classes: &[ClassRecord]) -> Census {
    Census {
        n,
        q,
        valid_tables: classes.iter().map(|c| c.orbit_size).sum(),
        h_order: h_order(n, q),
        classes: classes.len(),
        etale_classes: classes.iter().filter(|c| c.signature.delta_nonzero).count(),
        local_classes: classes.iter().filter(|c| c.signature.is_local).count(),
    }
}

/// Number of partitions of `n`: the number of étale algebras of rank `n`
/// over a finite field up to isomorphism.
pub fn etale_class_count(n: usize) -> u128 {
    let mut p = vec![0u128; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            p[total] += p[total - part];
        }
    }
    p[n]
}
