use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::Zn;

/// Raw structure constants `c[i][j][l]` (with `e_i e_j = sum_l c[i][j][l] e_l`)
/// and identity coordinates `d`. No algebraic law is assumed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StructureTable {
    ring: Zn,
    n: usize,
    c: Vec<u64>,
    d: Vec<u64>,
}

impl StructureTable {
    pub fn new(ring: Zn, n: usize, c: Vec<u64>, d: Vec<u64>) -> Result<Self> {
        if c.len() != n * n * n || d.len() != n {
            return Err(Error::Dimension(format!(
                "rank {n} needs {} structure constants and {n} identity coordinates, got {} and {}",
                n * n * n,
                c.len(),
                d.len()
            )));
        }
        ring.check_reduced(&c)?;
        ring.check_reduced(&d)?;
        Ok(StructureTable { ring, n, c, d })
    }

    /// All-zero constants with identity `e_1` (or the empty table for `n = 0`).
    pub fn zero_normalized(ring: Zn, n: usize) -> Self {
        let mut t = StructureTable {
            ring,
            n,
            c: vec![0; n * n * n],
            d: vec![0; n],
        };
        if n > 0 {
            t.d[0] = 1;
            for j in 0..n {
                t.set(0, j, j, 1);
                t.set(j, 0, j, 1);
            }
        }
        t
    }

    pub fn ring(&self) -> Zn {
        self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize) -> u64 {
        self.c[(i * self.n + j) * self.n + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, l: usize, v: u64) {
        let n = self.n;
        self.c[(i * n + j) * n + l] = self.ring.reduce(v);
    }

    /// Coordinates of `e_i e_j`.
    #[inline]
    pub fn product(&self, i: usize, j: usize) -> &[u64] {
        let start = (i * self.n + j) * self.n;
        &self.c[start..start + self.n]
    }

    pub fn set_product(&mut self, i: usize, j: usize, v: &[u64]) {
        let n = self.n;
        let start = (i * n + j) * n;
        self.c[start..start + n].copy_from_slice(v);
    }

    pub fn constants(&self) -> &[u64] {
        &self.c
    }

    pub fn identity(&self) -> &[u64] {
        &self.d
    }

    pub fn set_identity(&mut self, d: Vec<u64>) {
        assert_eq!(d.len(), self.n);
        self.d = d;
    }

    /// `d = e_1` and `e_1 e_j = e_j e_1 = e_j` for every `j`.
    pub fn is_normalized(&self) -> bool {
        let n = self.n;
        if n == 0 {
            return true;
        }
        if self.d[0] != 1 || self.d[1..].iter().any(|&x| x != 0) {
            return false;
        }
        (0..n).all(|j| {
            (0..n).all(|l| {
                let want = u64::from(j == l);
                self.get(0, j, l) == want && self.get(j, 0, l) == want
            })
        })
    }

    /// Bilinear product of coordinate vectors.
    pub fn multiply(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj == 0 {
                    continue;
                }
                let s = self.ring.mul(ui, vj);
                self.ring.axpy(&mut out, s, self.product(i, j));
            }
        }
        out
    }

    /// Every violated defining identity, in the order commutativity,
    /// associativity, unit. Indices are 0-based.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.scan(&mut |v| {
            out.push(v);
            true
        });
        out
    }

    pub fn is_valid(&self) -> bool {
        let mut ok = true;
        self.scan(&mut |_| {
            ok = false;
            false
        });
        ok
    }

    /// Calls `report` on each violation until it returns `false`.
    fn scan(&self, report: &mut dyn FnMut(Violation) -> bool) {
        let n = self.n;
        let ring = self.ring;
        for i in 0..n {
            for j in 0..i {
                for l in 0..n {
                    if self.get(i, j, l) != self.get(j, i, l)
                        && !report(Violation {
                            kind: ViolationKind::Commutativity,
                            index: vec![i, j, l],
                        })
                    {
                        return;
                    }
                }
            }
        }
        let m = ring.modulus();
        for i in 0..n {
            for j in 0..n {
                let ij = self.product(i, j);
                for k in 0..n {
                    let jk = self.product(j, k);
                    for l in 0..n {
                        // (e_i e_j) e_k - e_i (e_j e_k), coefficient of e_l
                        let mut lhs = 0u64;
                        let mut rhs = 0u64;
                        for mm in 0..n {
                            lhs = (lhs + ij[mm] * self.get(mm, k, l)) % m;
                            rhs = (rhs + jk[mm] * self.get(i, mm, l)) % m;
                        }
                        if lhs != rhs
                            && !report(Violation {
                                kind: ViolationKind::Associativity,
                                index: vec![i, j, k, l],
                            })
                        {
                            return;
                        }
                    }
                }
            }
        }
        for j in 0..n {
            for l in 0..n {
                let mut s = 0u64;
                for i in 0..n {
                    s = (s + self.d[i] * self.get(i, j, l)) % m;
                }
                if s != u64::from(j == l)
                    && !report(Violation {
                        kind: ViolationKind::Unit,
                        index: vec![j, l],
                    })
                {
                    return;
                }
            }
        }
    }

    pub fn to_json_value(&self) -> TableJson {
        let n = self.n;
        TableJson {
            n,
            modulus: self.ring.modulus(),
            c: (0..n)
                .map(|i| (0..n).map(|j| self.product(i, j).to_vec()).collect())
                .collect(),
            d: self.d.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TableJson = serde_json::from_str(text)?;
        raw.into_table()
    }
}

impl fmt::Debug for StructureTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StructureTable(n={}, mod {}) c={:?} d={:?}",
            self.n,
            self.ring.modulus(),
            self.c,
            self.d
        )
    }
}

impl PartialOrd for StructureTable {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Tables compare by rank, then lexicographically on the flattened constants,
/// then on the identity coordinates.
impl Ord for StructureTable {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.ring.modulus(), &self.c, &self.d).cmp(&(
            other.n,
            other.ring.modulus(),
            &other.c,
            &other.d,
        ))
    }
}

/// On-disk algebra format: `c[i][j][l]`, 0-based, row-major nesting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub n: usize,
    pub modulus: u64,
    pub c: Vec<Vec<Vec<u64>>>,
    pub d: Vec<u64>,
}

impl TableJson {
    pub fn into_table(self) -> Result<StructureTable> {
        let ring = Zn::new(self.modulus)?;
        let n = self.n;
        if self.c.len() != n
            || self
                .c
                .iter()
                .any(|row| row.len() != n || row.iter().any(|v| v.len() != n))
        {
            return Err(Error::Dimension(format!("c must be a {n}x{n}x{n} array")));
        }
        let flat: Vec<u64> = self.c.into_iter().flatten().flatten().collect();
        StructureTable::new(ring, n, flat, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Commutativity,
    Associativity,
    Unit,
}

/// One failed identity. Index tuples are 0-based:
/// commutativity `(i, j, l)` with `i > j`; associativity `(i, j, k, l)`;
/// unit `(j, l)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Violation {
    pub kind: ViolationKind,
    pub index: Vec<usize>,
}

impl fmt::Display for Violation {
    /// Human-readable form uses 1-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Commutativity => "commutativity",
            ViolationKind::Associativity => "associativity",
            ViolationKind::Unit => "unit",
        };
        let idx: Vec<String> = self.index.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{kind} at ({})", idx.join(","))
    }
}
