//! Pattern groups, algebra groups, and enumerated matrix groups.
//!
//! Elements are unitriangular n-by-n matrices over F_q. The canonical
//! encoding of an element g is the vector of strictly-upper entries of
//! g - 1 in row-major arc order; the same encoding doubles as the
//! encoding of Lie-algebra elements and of dual functionals.

use std::collections::HashMap;
use std::sync::Arc;

use once_cell::sync::OnceCell;

use crate::cap;
use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::linalg::Subspace;

/// Canonical arc-vector encoding (length = number of ambient arcs).
pub type Code = Vec<Fq>;
/// Dense n*n row-major matrix over F_q.
pub type Mat = Vec<Fq>;

/// The ambient space: full strictly-upper-triangular arcs of size n
/// over a fixed field. All groups and functionals in one computation
/// share an ambient.
#[derive(Debug)]
pub struct Ambient {
    pub n: usize,
    pub field: Arc<Field>,
    /// All pairs (i, j) with 1 <= i < j <= n, row-major.
    pub arcs: Vec<(usize, usize)>,
    arc_idx: HashMap<(usize, usize), usize>,
}

impl Ambient {
    pub fn new(n: usize, field: Arc<Field>) -> Arc<Ambient> {
        let mut arcs = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                arcs.push((i, j));
            }
        }
        let arc_idx = arcs.iter().enumerate().map(|(k, &a)| (a, k)).collect();
        Arc::new(Ambient {
            n,
            field,
            arcs,
            arc_idx,
        })
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc_index(&self, i: usize, j: usize) -> usize {
        self.arc_idx[&(i, j)]
    }

    pub fn mat_id(&self) -> Mat {
        let n = self.n;
        let mut m = vec![0 as Fq; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        m
    }

    pub fn mat_mul(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.n;
        let f = &self.field;
        let mut out = vec![0 as Fq; n * n];
        for i in 0..n {
            for l in 0..n {
                let x = a[i * n + l];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let y = b[l * n + j];
                    if y != 0 {
                        out[i * n + j] = f.add(out[i * n + j], f.mul(x, y));
                    }
                }
            }
        }
        out
    }

    /// Inverse by Gaussian elimination; panics if singular.
    pub fn mat_inv(&self, a: &Mat) -> Mat {
        let n = self.n;
        let f = &self.field;
        let mut m = a.clone();
        let mut inv = self.mat_id();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| m[r * n + col] != 0)
                .expect("singular matrix");
            if piv != col {
                for j in 0..n {
                    m.swap(col * n + j, piv * n + j);
                    inv.swap(col * n + j, piv * n + j);
                }
            }
            let s = f.inv(m[col * n + col]);
            for j in 0..n {
                m[col * n + j] = f.mul(m[col * n + j], s);
                inv[col * n + j] = f.mul(inv[col * n + j], s);
            }
            for r in 0..n {
                if r != col && m[r * n + col] != 0 {
                    let c = m[r * n + col];
                    for j in 0..n {
                        let t = f.mul(c, m[col * n + j]);
                        m[r * n + j] = f.sub(m[r * n + j], t);
                        let t = f.mul(c, inv[col * n + j]);
                        inv[r * n + j] = f.sub(inv[r * n + j], t);
                    }
                }
            }
        }
        inv
    }

    pub fn transpose(&self, a: &Mat) -> Mat {
        let n = self.n;
        let mut out = vec![0 as Fq; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = a[i * n + j];
            }
        }
        out
    }

    /// Arc code of a group element: strictly-upper entries of g - 1.
    pub fn code_of(&self, g: &Mat) -> Code {
        self.arcs.iter().map(|&(i, j)| g[(i - 1) * self.n + (j - 1)]).collect()
    }

    /// Group element 1 + x from its arc code.
    pub fn mat_of_code(&self, code: &Code) -> Mat {
        let mut m = self.mat_id();
        for (k, &(i, j)) in self.arcs.iter().enumerate() {
            m[(i - 1) * self.n + (j - 1)] = code[k];
        }
        m
    }

    /// Strictly-upper Lie element x from its arc code (zero diagonal).
    pub fn lie_of_code(&self, code: &Code) -> Mat {
        let mut m = vec![0 as Fq; self.n * self.n];
        for (k, &(i, j)) in self.arcs.iter().enumerate() {
            m[(i - 1) * self.n + (j - 1)] = code[k];
        }
        m
    }

    /// F_p coordinate vector of an arc code (k coordinates per arc).
    pub fn code_to_fp(&self, code: &Code) -> Vec<u8> {
        let k = self.field.k;
        let mut out = Vec::with_capacity(code.len() * k);
        for &c in code {
            for coef in self.field.coeffs(c) {
                out.push(coef as u8);
            }
        }
        out
    }

    pub fn fp_to_code(&self, fp: &[u8]) -> Code {
        let k = self.field.k;
        fp.chunks(k)
            .map(|ch| {
                let c: Vec<u64> = ch.iter().map(|&x| x as u64).collect();
                self.field.from_coeffs(&c)
            })
            .collect()
    }

    pub fn fp_dim(&self) -> usize {
        self.arc_count() * self.field.k
    }

    /// The pairing sum_{arcs} c_a * x_a in F_q (apply the field trace
    /// to land in the prime field).
    pub fn pair(&self, c: &Code, x: &Code) -> Fq {
        let f = &self.field;
        let mut acc: Fq = 0;
        for (a, b) in c.iter().zip(x.iter()) {
            acc = f.add(acc, f.mul(*a, *b));
        }
        acc
    }
}

/// A fully enumerated group. Usually a matrix group over an ambient;
/// direct products of groups over unrelated fields are table-driven and
/// carry no ambient.
#[derive(Debug)]
pub struct Group {
    amb: Option<Arc<Ambient>>,
    /// Element codes, sorted; index 0 is the identity.
    pub elems: Vec<Code>,
    index: HashMap<Code, usize>,
    mats: Vec<Mat>,
    mul_table: OnceCell<Vec<u32>>,
    inv_table: OnceCell<Vec<u32>>,
    gens: OnceCell<Vec<usize>>,
}

const MUL_TABLE_LIMIT: usize = 1 << 22;

impl Group {
    pub fn from_codes(ambient: Arc<Ambient>, mut codes: Vec<Code>) -> Arc<Group> {
        codes.sort_unstable();
        codes.dedup();
        assert!(
            codes.first().map_or(false, |c| c.iter().all(|&x| x == 0)),
            "group must contain the identity"
        );
        let index = codes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let mats = codes.iter().map(|c| ambient.mat_of_code(c)).collect();
        Arc::new(Group {
            amb: Some(ambient),
            elems: codes,
            index,
            mats,
            mul_table: OnceCell::new(),
            inv_table: OnceCell::new(),
            gens: OnceCell::new(),
        })
    }

    /// External direct product. Element codes are concatenations of
    /// factor codes, so the sorted order is the pair order and index
    /// arithmetic is i = i_a * |B| + i_b. Multiplication is
    /// table-driven; the factors may live over unrelated fields.
    pub fn direct_product(a: &Arc<Group>, b: &Arc<Group>) -> Arc<Group> {
        let na = a.order();
        let nb = b.order();
        let n = na * nb;
        assert!(n * n <= MUL_TABLE_LIMIT, "direct product too large");
        let mut codes = Vec::with_capacity(n);
        for ca in &a.elems {
            for cb in &b.elems {
                let mut c = ca.clone();
                c.extend_from_slice(cb);
                codes.push(c);
            }
        }
        let index: HashMap<Code, usize> = codes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let mut mul = vec![0u32; n * n];
        let mut inv = vec![0u32; n];
        for ia in 0..na {
            for ib in 0..nb {
                let i = ia * nb + ib;
                inv[i] = (a.inv_idx(ia) * nb + b.inv_idx(ib)) as u32;
                for ja in 0..na {
                    let ma = a.mul_idx(ia, ja) * nb;
                    for jb in 0..nb {
                        mul[i * n + ja * nb + jb] = (ma + b.mul_idx(ib, jb)) as u32;
                    }
                }
            }
        }
        let mul_table = OnceCell::new();
        mul_table.set(mul).unwrap();
        let inv_table = OnceCell::new();
        inv_table.set(inv).unwrap();
        Arc::new(Group {
            amb: None,
            elems: codes,
            index,
            mats: Vec::new(),
            mul_table,
            inv_table,
            gens: OnceCell::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn one(&self) -> usize {
        0
    }

    /// The ambient; panics for table-driven product groups.
    pub fn ambient(&self) -> &Arc<Ambient> {
        self.amb.as_ref().expect("operation requires a matrix group")
    }

    pub fn has_ambient(&self) -> bool {
        self.amb.is_some()
    }

    pub fn idx(&self, code: &Code) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn code(&self, i: usize) -> &Code {
        &self.elems[i]
    }

    pub fn mat(&self, i: usize) -> &Mat {
        &self.mats[i]
    }

    pub fn contains_code(&self, code: &Code) -> bool {
        self.index.contains_key(code)
    }

    fn ensure_tables(&self) -> Option<&Vec<u32>> {
        let n = self.order();
        if let Some(t) = self.mul_table.get() {
            return Some(t);
        }
        if n * n > MUL_TABLE_LIMIT {
            return None;
        }
        let amb = self.ambient();
        Some(self.mul_table.get_or_init(|| {
            let mut t = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    let prod = amb.mat_mul(&self.mats[i], &self.mats[j]);
                    let code = amb.code_of(&prod);
                    t[i * n + j] = self.index[&code] as u32;
                }
            }
            t
        }))
    }

    pub fn mul_idx(&self, i: usize, j: usize) -> usize {
        if let Some(t) = self.ensure_tables() {
            return t[i * self.order() + j] as usize;
        }
        let amb = self.ambient();
        let prod = amb.mat_mul(&self.mats[i], &self.mats[j]);
        self.index[&amb.code_of(&prod)]
    }

    pub fn inv_idx(&self, i: usize) -> usize {
        let n = self.order();
        let t = self.inv_table.get_or_init(|| {
            let amb = self.ambient();
            let mut t = vec![0u32; n];
            for i in 0..n {
                let inv = amb.mat_inv(&self.mats[i]);
                t[i] = self.index[&amb.code_of(&inv)] as u32;
            }
            t
        });
        t[i] as usize
    }

    /// x^g = g^{-1} x g, by element index.
    pub fn conj_idx(&self, x: usize, g: usize) -> usize {
        self.mul_idx(self.mul_idx(self.inv_idx(g), x), g)
    }

    /// Greedy generating set (deterministic: first element outside the
    /// running closure is adjoined).
    pub fn generators(&self) -> &[usize] {
        self.gens.get_or_init(|| {
            let mut gens: Vec<usize> = Vec::new();
            let mut closure = vec![false; self.order()];
            closure[0] = true;
            let mut closed: Vec<usize> = vec![0];
            for cand in 1..self.order() {
                if closure[cand] {
                    continue;
                }
                gens.push(cand);
                // BFS closure with the new generator set.
                let mut frontier = vec![cand];
                closure[cand] = true;
                closed.push(cand);
                while let Some(x) = frontier.pop() {
                    for &g in gens.iter().chain(std::iter::once(&x)) {
                        for y in [self.mul_idx(x, g), self.mul_idx(g, x)] {
                            if !closure[y] {
                                closure[y] = true;
                                closed.push(y);
                                frontier.push(y);
                            }
                        }
                    }
                    // Also close existing elements against the new generator.
                }
                // Re-close everything against the enlarged generator set.
                let mut i = 0;
                while i < closed.len() {
                    let x = closed[i];
                    for &g in &gens {
                        for y in [self.mul_idx(x, g), self.mul_idx(g, x), self.inv_idx(x)] {
                            if !closure[y] {
                                closure[y] = true;
                                closed.push(y);
                            }
                        }
                    }
                    i += 1;
                }
                if closed.len() == self.order() {
                    break;
                }
            }
            gens
        })
    }

    /// True when every element of `self` lies in `other` (same ambient).
    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.elems.iter().all(|c| other.contains_code(c))
    }

    /// The F_p span of f(self) when self = 1 + space is an algebra
    /// group; None when the element set is not of that form.
    pub fn lie_subspace(&self) -> Option<Subspace> {
        let amb = self.ambient();
        let gens: Vec<Vec<u8>> = self.elems.iter().map(|c| amb.code_to_fp(c)).collect();
        let space = Subspace::new(amb.field.p, amb.fp_dim(), gens);
        let expected = (amb.field.p as u128).pow(space.dim() as u32);
        if expected == self.order() as u128 {
            Some(space)
        } else {
            None
        }
    }
}

/// A sub-order of the linear order on [n]: the arc set of a pattern
/// group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternPoset {
    pub n: usize,
    /// Sorted pairs (i, j), 1-based, i < j, transitively closed.
    pub relation: Vec<(usize, usize)>,
}

impl PatternPoset {
    pub fn new(n: usize, mut relation: Vec<(usize, usize)>) -> PatternPoset {
        relation.sort_unstable();
        relation.dedup();
        for &(i, j) in &relation {
            assert!(1 <= i && i < j && j <= n, "arc ({i},{j}) out of range");
        }
        let set: std::collections::HashSet<_> = relation.iter().copied().collect();
        for &(i, j) in &relation {
            for &(a, b) in &relation {
                if a == j {
                    assert!(
                        set.contains(&(i, b)),
                        "relation not transitively closed: ({i},{j}),({a},{b})"
                    );
                }
            }
        }
        PatternPoset { n, relation }
    }

    /// The full linear order: arcs of UT_n.
    pub fn full(n: usize) -> PatternPoset {
        let mut rel = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                rel.push((i, j));
            }
        }
        PatternPoset { n, relation: rel }
    }

    /// Cover arcs: (i, j) with no l strictly between with (i,l),(l,j).
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let set: std::collections::HashSet<_> = self.relation.iter().copied().collect();
        self.relation
            .iter()
            .copied()
            .filter(|&(i, j)| {
                !(i + 1..j).any(|l| set.contains(&(i, l)) && set.contains(&(l, j)))
            })
            .collect()
    }
}

/// The pattern group U_P: unitriangular matrices supported on the arcs
/// of a poset. Kept intensionally; enumeration is explicit and capped.
#[derive(Debug, Clone)]
pub struct PatternGroup {
    pub ambient: Arc<Ambient>,
    pub poset: PatternPoset,
}

impl PatternGroup {
    pub fn new(poset: PatternPoset, field: Arc<Field>) -> PatternGroup {
        let ambient = Ambient::new(poset.n, field);
        PatternGroup { ambient, poset }
    }

    pub fn ut(n: usize, field: Arc<Field>) -> PatternGroup {
        PatternGroup::new(PatternPoset::full(n), field)
    }

    pub fn order(&self) -> u128 {
        (self.ambient.field.q as u128).pow(self.poset.relation.len() as u32)
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.poset.relation
    }

    /// Lie algebra of the group as an F_p subspace of the ambient arcs.
    pub fn lie_space(&self) -> Subspace {
        let amb = &self.ambient;
        let k = amb.field.k;
        let mut gens = Vec::new();
        for &(i, j) in self.arcs() {
            let a = amb.arc_index(i, j);
            for t in 0..k {
                let mut v = vec![0u8; amb.fp_dim()];
                v[a * k + t] = 1;
                gens.push(v);
            }
        }
        Subspace::new(amb.field.p, amb.fp_dim(), gens)
    }

    /// Full enumeration in lexicographic arc-code order.
    pub fn enumerate_with_cap(&self, cap: u128) -> Result<Arc<Group>> {
        cap::check(self.order(), cap)?;
        let amb = &self.ambient;
        let q = amb.field.q;
        let arcs: Vec<usize> = self
            .arcs()
            .iter()
            .map(|&(i, j)| amb.arc_index(i, j))
            .collect();
        let total = self.order() as usize;
        let mut codes = Vec::with_capacity(total);
        for idx in 0..total {
            let mut code = vec![0 as Fq; amb.arc_count()];
            let mut e = idx;
            // Last arc varies fastest so codes come out lex-sorted.
            for &a in arcs.iter().rev() {
                code[a] = (e % q) as Fq;
                e /= q;
            }
            codes.push(code);
        }
        Ok(Group::from_codes(amb.clone(), codes))
    }

    pub fn enumerate(&self) -> Result<Arc<Group>> {
        self.enumerate_with_cap(cap::DEFAULT_CAP)
    }

    /// Generator codes: cover arcs with coefficients running over a
    /// field basis.
    pub fn generator_codes(&self) -> Vec<Code> {
        let amb = &self.ambient;
        let mut out = Vec::new();
        for (i, j) in self.poset.covers() {
            for t in 0..amb.field.k {
                let mut c = vec![0u64; amb.field.k];
                c[t] = 1;
                let alpha = amb.field.from_coeffs(&c);
                let mut code = vec![0 as Fq; amb.arc_count()];
                code[amb.arc_index(i, j)] = alpha;
                out.push(code);
            }
        }
        out
    }
}

/// Side of an ideal condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

/// An ideal subgroup 1 + h of a pattern group, with h spanned by a
/// subset of the parent's arcs.
#[derive(Debug, Clone)]
pub struct IdealSubgroup {
    pub parent: PatternGroup,
    pub side: Side,
    /// Sorted arc subset.
    pub arcs: Vec<(usize, usize)>,
}

impl IdealSubgroup {
    pub fn new(parent: &PatternGroup, side: Side, mut arcs: Vec<(usize, usize)>) -> Result<IdealSubgroup> {
        arcs.sort_unstable();
        arcs.dedup();
        let parent_set: std::collections::HashSet<_> = parent.arcs().iter().copied().collect();
        for &a in &arcs {
            assert!(parent_set.contains(&a), "arc not in parent");
        }
        let h_set: std::collections::HashSet<_> = arcs.iter().copied().collect();
        // e_{ab} e_{cd} = e_{ad} when b = c.
        let check_left = || -> Result<()> {
            for &(a, b) in parent.arcs() {
                for &(c, d) in &arcs {
                    if b == c && !h_set.contains(&(a, d)) {
                        return Err(Error::NotAnIdeal {
                            side: "left",
                            witness: (a, b, c, d),
                        });
                    }
                }
            }
            Ok(())
        };
        let check_right = || -> Result<()> {
            for &(a, b) in &arcs {
                for &(c, d) in parent.arcs() {
                    if b == c && !h_set.contains(&(a, d)) {
                        return Err(Error::NotAnIdeal {
                            side: "right",
                            witness: (a, b, c, d),
                        });
                    }
                }
            }
            Ok(())
        };
        match side {
            Side::Left => check_left()?,
            Side::Right => check_right()?,
            Side::TwoSided => {
                check_left()?;
                check_right()?;
            }
        }
        Ok(IdealSubgroup {
            parent: parent.clone(),
            side,
            arcs,
        })
    }

    pub fn order(&self) -> u128 {
        (self.parent.ambient.field.q as u128).pow(self.arcs.len() as u32)
    }

    /// The ideal subgroup as a pattern group in its own right (its arc
    /// set is transitively closed because it is an ideal).
    pub fn as_pattern_group(&self) -> PatternGroup {
        PatternGroup {
            ambient: self.parent.ambient.clone(),
            poset: PatternPoset::new(self.parent.poset.n, self.arcs.clone()),
        }
    }

    pub fn enumerate(&self) -> Result<Arc<Group>> {
        self.as_pattern_group().enumerate()
    }

    pub fn meet(&self, other: &IdealSubgroup) -> Result<IdealSubgroup> {
        self.lattice_op(other, true)
    }

    pub fn join(&self, other: &IdealSubgroup) -> Result<IdealSubgroup> {
        self.lattice_op(other, false)
    }

    fn lattice_op(&self, other: &IdealSubgroup, meet: bool) -> Result<IdealSubgroup> {
        if self.side != other.side || self.parent.poset != other.parent.poset {
            return Err(Error::SideMismatch);
        }
        let other_set: std::collections::HashSet<_> = other.arcs.iter().copied().collect();
        let arcs: Vec<(usize, usize)> = if meet {
            self.arcs.iter().copied().filter(|a| other_set.contains(a)).collect()
        } else {
            let mut v = self.arcs.clone();
            v.extend(other.arcs.iter().copied());
            v
        };
        IdealSubgroup::new(&self.parent, self.side, arcs)
    }
}

/// The semidirect decomposition of a pattern group at a split index k:
/// N (upper-right block) is abelian normal, H = H_k x H_m is the
/// block-diagonal complement.
#[derive(Debug, Clone)]
pub struct SemidirectSplit {
    pub group: PatternGroup,
    pub k: usize,
    pub n_arcs: Vec<(usize, usize)>,
    pub hk_arcs: Vec<(usize, usize)>,
    pub hm_arcs: Vec<(usize, usize)>,
}

impl SemidirectSplit {
    pub fn new(group: &PatternGroup, k: usize) -> Result<SemidirectSplit> {
        let n = group.poset.n;
        if k > n {
            return Err(Error::BadIndex(k));
        }
        let mut n_arcs = Vec::new();
        let mut hk_arcs = Vec::new();
        let mut hm_arcs = Vec::new();
        for &(i, j) in group.arcs() {
            if i <= k && j > k {
                n_arcs.push((i, j));
            } else if j <= k {
                hk_arcs.push((i, j));
            } else {
                hm_arcs.push((i, j));
            }
        }
        Ok(SemidirectSplit {
            group: group.clone(),
            k,
            n_arcs,
            hk_arcs,
            hm_arcs,
        })
    }

    fn sub(&self, arcs: &[(usize, usize)]) -> PatternGroup {
        PatternGroup {
            ambient: self.group.ambient.clone(),
            poset: PatternPoset::new(self.group.poset.n, arcs.to_vec()),
        }
    }

    pub fn n_group(&self) -> PatternGroup {
        self.sub(&self.n_arcs)
    }

    pub fn hk_group(&self) -> PatternGroup {
        self.sub(&self.hk_arcs)
    }

    pub fn hm_group(&self) -> PatternGroup {
        self.sub(&self.hm_arcs)
    }

    /// H = H_k x H_m as a pattern subgroup.
    pub fn h_group(&self) -> PatternGroup {
        let mut arcs = self.hk_arcs.clone();
        arcs.extend(self.hm_arcs.iter().copied());
        self.sub(&arcs)
    }

    /// Unique factorization g = n * h: h keeps the block-diagonal arcs,
    /// n = g * h^{-1}.
    pub fn factor(&self, g_code: &Code) -> (Code, Code) {
        let amb = &self.group.ambient;
        let mut h_code = vec![0 as Fq; amb.arc_count()];
        for &(i, j) in self.hk_arcs.iter().chain(self.hm_arcs.iter()) {
            let a = amb.arc_index(i, j);
            h_code[a] = g_code[a];
        }
        let g = amb.mat_of_code(g_code);
        let h = amb.mat_of_code(&h_code);
        let n_mat = amb.mat_mul(&g, &amb.mat_inv(&h));
        (amb.code_of(&n_mat), h_code)
    }
}
