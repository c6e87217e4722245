//! Small dense linear algebra over prime fields Z_p.
//!
//! Used for subspace bookkeeping: reduced row echelon bases, kernels,
//! canonical coset representatives, and deterministic enumeration of
//! subspace vectors. Entries are `u8` residues mod p.

/// Row-reduces `rows` in place over Z_p; returns the pivot columns.
/// Zero rows are removed.
pub fn rref(rows: &mut Vec<Vec<u8>>, p: u64) -> Vec<usize> {
    let p8 = p as u16;
    let ncols = rows.first().map_or(0, |r| r.len());
    let inv = |a: u8| -> u8 {
        (1..p8).find(|&b| (a as u16 * b) % p8 == 1).unwrap() as u8
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let s = inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = ((*x as u16 * s as u16) % p8) as u8;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c] as u16;
                for j in 0..ncols {
                    let v = rows[i][j] as u16 + (p8 - (f * rows[r][j] as u16) % p8) % p8 * 1;
                    rows[i][j] = (v % p8) as u8;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.retain(|row| row.iter().any(|&x| x != 0));
    pivots
}

/// Kernel basis of the matrix with the given rows (as row vectors acting
/// on column vectors of length `ncols`).
pub fn kernel(rows: &[Vec<u8>], ncols: usize, p: u64) -> Vec<Vec<u8>> {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let pivots = rref(&mut m, p);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let p8 = p as u16;
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![0u8; ncols];
        v[free] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            // row: x_pc + sum coeff * x_free = 0
            let coeff = m[ri][free] as u16;
            v[pc] = ((p8 - coeff % p8) % p8) as u8;
        }
        basis.push(v);
    }
    basis
}

/// An F_p-subspace of (Z_p)^dim kept in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub p: u64,
    pub ambient_dim: usize,
    pub rows: Vec<Vec<u8>>,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(p: u64, ambient_dim: usize, gens: Vec<Vec<u8>>) -> Subspace {
        let mut rows = gens;
        for r in &rows {
            assert_eq!(r.len(), ambient_dim);
        }
        let pivots = rref(&mut rows, p);
        Subspace {
            p,
            ambient_dim,
            rows,
            pivots,
        }
    }

    pub fn zero(p: u64, ambient_dim: usize) -> Subspace {
        Subspace::new(p, ambient_dim, vec![])
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Canonical coset representative: eliminates every pivot coordinate.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let p = self.p as u16;
        let mut out = v.to_vec();
        for (ri, &pc) in self.pivots.iter().enumerate() {
            let f = out[pc] as u16;
            if f != 0 {
                for j in 0..self.ambient_dim {
                    let sub = (f * self.rows[ri][j] as u16) % p;
                    out[j] = ((out[j] as u16 + p - sub) % p) as u8;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// All vectors of the subspace in deterministic order (coefficient
    /// vectors over the RREF basis, counted lexicographically).
    pub fn vectors(&self) -> Vec<Vec<u8>> {
        let p = self.p as u16;
        let d = self.dim();
        let total = (self.p as u128).pow(d as u32) as usize;
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut v = vec![0u8; self.ambient_dim];
            let mut e = idx;
            for b in 0..d {
                let c = (e % self.p as usize) as u16;
                e /= self.p as usize;
                if c != 0 {
                    for j in 0..self.ambient_dim {
                        v[j] = ((v[j] as u16 + c * self.rows[b][j] as u16) % p) as u8;
                    }
                }
            }
            out.push(v);
        }
        out
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut gens = self.rows.clone();
        gens.extend(other.rows.clone());
        Subspace::new(self.p, self.ambient_dim, gens)
    }

    /// Intersection via the kernel of the stacked coefficient system.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // Solve a*B1 - b*B2 = 0 over coefficients (a, b).
        let d1 = self.dim();
        let d2 = other.dim();
        if d1 == 0 || d2 == 0 {
            return Subspace::zero(self.p, self.ambient_dim);
        }
        let p = self.p as u16;
        // Columns: d1 + d2 unknowns; rows: ambient_dim equations.
        let mut rows = Vec::with_capacity(self.ambient_dim);
        for j in 0..self.ambient_dim {
            let mut row = vec![0u8; d1 + d2];
            for (i, b) in self.rows.iter().enumerate() {
                row[i] = b[j];
            }
            for (i, b) in other.rows.iter().enumerate() {
                row[d1 + i] = ((p - b[j] as u16) % p) as u8;
            }
            rows.push(row);
        }
        let ker = kernel(&rows, d1 + d2, self.p);
        let gens: Vec<Vec<u8>> = ker
            .iter()
            .map(|coef| {
                let mut v = vec![0u8; self.ambient_dim];
                for (i, b) in self.rows.iter().enumerate() {
                    let c = coef[i] as u16;
                    for j in 0..self.ambient_dim {
                        v[j] = ((v[j] as u16 + c * b[j] as u16) % p) as u8;
                    }
                }
                v
            })
            .collect();
        Subspace::new(self.p, self.ambient_dim, gens)
    }
}
