//! Group actions on Lie algebras and their duals; two-sided orbits,
//! stabilizers, and invariant subspaces.
//!
//! A functional on an F_p-subspace V of the ambient arcs is stored as
//! an ambient arc code c, meaning x |-> Tr_{F_q/F_p}(sum_a c_a x_a),
//! canonicalized modulo the annihilator of V under the trace pairing.
//! For F_q-arc-spanned spaces this is equivariantly the same data as an
//! F_q-linear functional, and it extends uniformly to the twisted
//! subspaces used by the classical-type constructions.

use std::collections::HashSet;
use std::sync::Arc;

use crate::cap;
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::groups::{Ambient, Code, Group, Mat, PatternGroup};
use crate::linalg::{kernel, Subspace};

/// Which side a one-sided action multiplies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSide {
    Left,
    Right,
}

/// Tr_{F_q/F_p}(sum_a c_a x_a) as an element of Z_p.
pub fn pair_fp(amb: &Ambient, c: &Code, x: &Code) -> u8 {
    let f = &amb.field;
    let mut acc = 0u64;
    for (&a, &b) in c.iter().zip(x.iter()) {
        acc += f.trace(f.mul(a, b));
    }
    (acc % f.p) as u8
}

/// The dual of an F_p-subspace of the ambient arc coordinates.
#[derive(Debug, Clone)]
pub struct DualSpace {
    pub ambient: Arc<Ambient>,
    /// Domain of the functionals.
    pub space: Subspace,
    /// Annihilator of the domain under the trace pairing; functionals
    /// are canonical modulo this.
    pub perp: Subspace,
}

impl DualSpace {
    pub fn from_space(ambient: Arc<Ambient>, space: Subspace) -> DualSpace {
        let dim = ambient.fp_dim();
        let p = ambient.field.p;
        // perp = kernel of w |-> (pair(w, v))_{v in basis of space}.
        let rows: Vec<Vec<u8>> = space
            .rows
            .iter()
            .map(|v| {
                let vc = ambient.fp_to_code(v);
                (0..dim)
                    .map(|j| {
                        let mut unit = vec![0u8; dim];
                        unit[j] = 1;
                        pair_fp(&ambient, &ambient.fp_to_code(&unit), &vc)
                    })
                    .collect()
            })
            .collect();
        let perp = Subspace::new(p, dim, kernel(&rows, dim, p));
        DualSpace {
            ambient,
            space,
            perp,
        }
    }

    /// Dual of the F_q-span of a set of arcs.
    pub fn from_arcs(ambient: Arc<Ambient>, arcs: &[(usize, usize)]) -> DualSpace {
        let k = ambient.field.k;
        let mut gens = Vec::new();
        for &(i, j) in arcs {
            let a = ambient.arc_index(i, j);
            for t in 0..k {
                let mut v = vec![0u8; ambient.fp_dim()];
                v[a * k + t] = 1;
                gens.push(v);
            }
        }
        let space = Subspace::new(ambient.field.p, ambient.fp_dim(), gens);
        DualSpace::from_space(ambient, space)
    }

    pub fn full(ambient: Arc<Ambient>) -> DualSpace {
        let arcs: Vec<_> = ambient.arcs.clone();
        DualSpace::from_arcs(ambient, &arcs)
    }

    /// Canonical representative of a functional modulo the annihilator.
    pub fn canon(&self, code: &Code) -> Code {
        let fp = self.ambient.code_to_fp(code);
        self.ambient.fp_to_code(&self.perp.reduce(&fp))
    }

    /// (g lambda h)(x) = lambda(g^{-1} x h^{-1}); coefficient matrix
    /// transforms as C' = g^{-T} C h^{-T}.
    pub fn act(&self, g: &Mat, lam: &Code, h: &Mat) -> Code {
        let amb = &self.ambient;
        let c = amb.lie_of_code(lam);
        let gt = amb.transpose(&amb.mat_inv(g));
        let ht = amb.transpose(&amb.mat_inv(h));
        let out = amb.mat_mul(&amb.mat_mul(&gt, &c), &ht);
        self.canon(&amb.code_of(&out))
    }

    /// Number of distinct functionals on the domain.
    pub fn size(&self) -> u128 {
        (self.ambient.field.p as u128).pow(self.space.dim() as u32)
    }

    /// All canonical functionals in deterministic (lexicographic on the
    /// free F_p coordinates) order.
    pub fn functionals(&self, cap: u128) -> Result<Vec<Code>> {
        cap::check(self.size(), cap)?;
        let dim = self.ambient.fp_dim();
        let pivot_set: HashSet<usize> = self.perp.pivots.iter().copied().collect();
        let free: Vec<usize> = (0..dim).filter(|c| !pivot_set.contains(c)).collect();
        let p = self.ambient.field.p as usize;
        let total = self.size() as usize;
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut v = vec![0u8; dim];
            let mut e = idx;
            for &c in free.iter().rev() {
                v[c] = (e % p) as u8;
                e /= p;
            }
            out.push(self.ambient.fp_to_code(&v));
        }
        Ok(out)
    }

    /// Verifies the domain is closed under x |-> m x (Left) or
    /// x |-> x m (Right) for every mover.
    pub fn check_closed(&self, movers: &[Mat], side: ActionSide) -> Result<()> {
        let amb = &self.ambient;
        for m in movers {
            for row in &self.space.rows {
                let x = amb.lie_of_code(&amb.fp_to_code(row));
                let prod = match side {
                    ActionSide::Left => amb.mat_mul(m, &x),
                    ActionSide::Right => amb.mat_mul(&x, m),
                };
                let fp = amb.code_to_fp(&amb.code_of(&prod));
                if !self.space.contains(&fp) {
                    return Err(Error::SpaceNotClosed);
                }
            }
        }
        Ok(())
    }
}

/// A finite orbit; points sorted, representative = first point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub points: Vec<Code>,
}

impl Orbit {
    pub fn rep(&self) -> &Code {
        &self.points[0]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, code: &Code) -> bool {
        self.points.binary_search(code).is_ok()
    }
}

/// Mover matrices together with their inverses.
fn with_inverses(amb: &Ambient, movers: &[Mat]) -> Vec<Mat> {
    let mut out = Vec::with_capacity(movers.len() * 2);
    for m in movers {
        out.push(m.clone());
        out.push(amb.mat_inv(m));
    }
    out
}

/// Generator matrices of a pattern group.
pub fn pattern_movers(pg: &PatternGroup) -> Vec<Mat> {
    pg.generator_codes()
        .iter()
        .map(|c| pg.ambient.mat_of_code(c))
        .collect()
}

/// Generator matrices of an enumerated group.
pub fn group_movers(g: &Group) -> Vec<Mat> {
    g.generators().iter().map(|&i| g.mat(i).clone()).collect()
}

fn orbit_bfs<F>(start: Code, moves: F, cap: u128) -> Result<Orbit>
where
    F: Fn(&Code, &mut Vec<Code>),
{
    let mut seen: HashSet<Code> = HashSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    let mut out = Vec::new();
    while let Some(x) = frontier.pop() {
        let mut next = Vec::new();
        moves(&x, &mut next);
        out.push(x);
        for y in next {
            if !seen.contains(&y) {
                if seen.len() as u128 >= cap {
                    return Err(Error::CapExceeded {
                        requested: cap + 1,
                        cap,
                    });
                }
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    out.sort_unstable();
    Ok(Orbit { points: out })
}

/// Two-sided orbit (G_left) lambda (G_right) on a dual space, by BFS
/// over generator moves from both sides.
pub fn orbit_two_sided(
    ds: &DualSpace,
    left: &[Mat],
    lam: &Code,
    right: &[Mat],
    cap: u128,
) -> Result<Orbit> {
    let amb = &ds.ambient;
    // Left move by g: C' = g^{-T} C; right move by h: C' = C h^{-T}.
    let lmats: Vec<Mat> = with_inverses(amb, left)
        .iter()
        .map(|m| amb.transpose(&amb.mat_inv(m)))
        .collect();
    let rmats: Vec<Mat> = with_inverses(amb, right)
        .iter()
        .map(|m| amb.transpose(&amb.mat_inv(m)))
        .collect();
    orbit_bfs(ds.canon(lam), |x, next| {
        let c = amb.lie_of_code(x);
        for m in &lmats {
            next.push(ds.canon(&amb.code_of(&amb.mat_mul(m, &c))));
        }
        for m in &rmats {
            next.push(ds.canon(&amb.code_of(&amb.mat_mul(&c, m))));
        }
    }, cap)
}

/// One-sided orbit of a functional.
pub fn orbit_one_sided(
    ds: &DualSpace,
    movers: &[Mat],
    lam: &Code,
    side: ActionSide,
    cap: u128,
) -> Result<Orbit> {
    match side {
        ActionSide::Left => orbit_two_sided(ds, movers, lam, &[], cap),
        ActionSide::Right => orbit_two_sided(ds, &[], lam, movers, cap),
    }
}

/// Decomposes the whole dual space into two-sided orbits, in order of
/// least unvisited functional.
pub fn decompose_dual(
    ds: &DualSpace,
    left: &[Mat],
    right: &[Mat],
    cap: u128,
) -> Result<Vec<Orbit>> {
    let all = ds.functionals(cap)?;
    let mut visited: HashSet<Code> = HashSet::new();
    let mut orbits = Vec::new();
    let mut sorted = all;
    sorted.sort_unstable();
    for lam in &sorted {
        if visited.contains(lam) {
            continue;
        }
        let orb = orbit_two_sided(ds, left, lam, right, cap)?;
        for pt in &orb.points {
            visited.insert(pt.clone());
        }
        orbits.push(orb);
    }
    Ok(orbits)
}

/// Two-sided orbit of f(g) in the Lie algebra, returned as group
/// element codes (f is the identity on arc codes). This is the
/// superclass K_g = {h : f(h) in G f(g) G}.
pub fn orbit_element(
    amb: &Arc<Ambient>,
    left: &[Mat],
    g_code: &Code,
    right: &[Mat],
    cap: u128,
) -> Result<Orbit> {
    let lmats = with_inverses(amb, left);
    let rmats = with_inverses(amb, right);
    orbit_bfs(g_code.clone(), |x, next| {
        let c = amb.lie_of_code(x);
        for m in &lmats {
            next.push(amb.code_of(&amb.mat_mul(m, &c)));
        }
        for m in &rmats {
            next.push(amb.code_of(&amb.mat_mul(&c, m)));
        }
    }, cap)
}

/// Full superclass decomposition of an enumerated group.
pub fn superclasses(g: &Group, left: &[Mat], right: &[Mat]) -> Result<Vec<Orbit>> {
    let mut visited: HashSet<Code> = HashSet::new();
    let mut orbits = Vec::new();
    for code in &g.elems {
        if visited.contains(code) {
            continue;
        }
        let orb = orbit_element(g.ambient(), left, code, right, g.order() as u128)?;
        for pt in &orb.points {
            visited.insert(pt.clone());
        }
        orbits.push(orb);
    }
    Ok(orbits)
}

/// The subgroup 1 + V for an F_p subspace V of the ambient arcs.
#[derive(Debug, Clone)]
pub struct LinearSubgroup {
    pub ambient: Arc<Ambient>,
    pub space: Subspace,
}

impl LinearSubgroup {
    pub fn new(ambient: Arc<Ambient>, space: Subspace) -> LinearSubgroup {
        LinearSubgroup { ambient, space }
    }

    pub fn order(&self) -> u128 {
        (self.ambient.field.p as u128).pow(self.space.dim() as u32)
    }

    pub fn contains_code(&self, code: &Code) -> bool {
        self.space.contains(&self.ambient.code_to_fp(code))
    }

    /// True when 1 + V is closed under multiplication.
    pub fn is_group(&self) -> bool {
        let vecs = self.space.vectors();
        for a in &vecs {
            for b in &vecs {
                let ma = self.ambient.mat_of_code(&self.ambient.fp_to_code(a));
                let mb = self.ambient.mat_of_code(&self.ambient.fp_to_code(b));
                let prod = self.ambient.mat_mul(&ma, &mb);
                if !self.contains_code(&self.ambient.code_of(&prod)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn enumerate(&self, cap: u128) -> Result<Arc<Group>> {
        cap::check(self.order(), cap)?;
        let codes = self
            .space
            .vectors()
            .iter()
            .map(|v| self.ambient.fp_to_code(v))
            .collect();
        Ok(Group::from_codes(self.ambient.clone(), codes))
    }

    /// h^{-1} (1 + V) h as a linear subgroup.
    pub fn conjugated(&self, h: &Mat) -> LinearSubgroup {
        let amb = &self.ambient;
        let hi = amb.mat_inv(h);
        let gens = self
            .space
            .rows
            .iter()
            .map(|v| {
                let x = amb.lie_of_code(&amb.fp_to_code(v));
                let y = amb.mat_mul(&amb.mat_mul(&hi, &x), h);
                amb.code_to_fp(&amb.code_of(&y))
            })
            .collect();
        LinearSubgroup::new(amb.clone(), Subspace::new(amb.field.p, amb.fp_dim(), gens))
    }
}

/// Stabilizer {h in 1 + h_space : h lambda = lambda} of a functional
/// under the one-sided action, as a linear subgroup. The condition
/// linearizes: h lambda = lambda iff lambda(y x) = 0 for all x in the
/// domain, where h^{-1} = 1 + y (Left side; mirrored for Right).
pub fn stabilizer_space(
    ds: &DualSpace,
    h_space: &Subspace,
    lam: &Code,
    side: ActionSide,
) -> LinearSubgroup {
    let amb = &ds.ambient;
    let p = amb.field.p;
    let ybasis: Vec<Mat> = h_space
        .rows
        .iter()
        .map(|v| amb.lie_of_code(&amb.fp_to_code(v)))
        .collect();
    let xbasis: Vec<Mat> = ds
        .space
        .rows
        .iter()
        .map(|v| amb.lie_of_code(&amb.fp_to_code(v)))
        .collect();
    let mut rows = Vec::with_capacity(xbasis.len());
    for x in &xbasis {
        let mut row = Vec::with_capacity(ybasis.len());
        for y in &ybasis {
            let prod = match side {
                ActionSide::Left => amb.mat_mul(y, x),
                ActionSide::Right => amb.mat_mul(x, y),
            };
            row.push(pair_fp(amb, lam, &amb.code_of(&prod)));
        }
        rows.push(row);
    }
    let ker = kernel(&rows, ybasis.len(), p);
    let gens: Vec<Vec<u8>> = ker
        .iter()
        .map(|coef| {
            let mut v = vec![0u8; amb.fp_dim()];
            for (i, b) in h_space.rows.iter().enumerate() {
                let c = coef[i] as u16;
                for j in 0..amb.fp_dim() {
                    v[j] = ((v[j] as u16 + c * b[j] as u16) % p as u16) as u8;
                }
            }
            v
        })
        .collect();
    LinearSubgroup::new(amb.clone(), Subspace::new(p, amb.fp_dim(), gens))
}

/// Stabilizer by direct enumeration over a concrete group; used as a
/// fallback and as an oracle for the linear solver.
pub fn stabilizer_enumerated(
    ds: &DualSpace,
    h: &Group,
    lam: &Code,
    side: ActionSide,
) -> Vec<usize> {
    let id = h.ambient().mat_id();
    let lam = ds.canon(lam);
    (0..h.order())
        .filter(|&i| {
            let m = h.mat(i);
            let moved = match side {
                ActionSide::Left => ds.act(m, &lam, &id),
                ActionSide::Right => ds.act(&id, &lam, m),
            };
            moved == lam
        })
        .collect()
}

/// True when V * parent (Right) or parent * V (Left) lies back in V,
/// for V and the parent Lie algebra given by F_p bases.
pub fn mult_invariant(
    amb: &Ambient,
    v: &Subspace,
    parent: &Subspace,
    side: ActionSide,
) -> bool {
    for pv in &parent.rows {
        let pm = amb.lie_of_code(&amb.fp_to_code(pv));
        for row in &v.rows {
            let x = amb.lie_of_code(&amb.fp_to_code(row));
            let prod = match side {
                ActionSide::Left => amb.mat_mul(&pm, &x),
                ActionSide::Right => amb.mat_mul(&x, &pm),
            };
            if !v.contains(&amb.code_to_fp(&amb.code_of(&prod))) {
                return false;
            }
        }
    }
    true
}

/// Largest subspace of `start` invariant under every map in `maps`
/// (each must be F_p-linear on ambient coordinate vectors). Computed by
/// fixed-point iteration: T <- {t in T : f(t) in T for all f}.
pub fn largest_invariant<F>(start: &Subspace, maps: &[F]) -> Subspace
where
    F: Fn(&[u8]) -> Vec<u8>,
{
    let p = start.p;
    let dim = start.ambient_dim;
    let mut t = start.clone();
    loop {
        let d = t.dim();
        if d == 0 {
            return t;
        }
        // Unknowns: coefficients over the basis of T. Conditions: every
        // coordinate of reduce_T(f(basis vector)) vanishes.
        let mut cond_cols: Vec<Vec<u8>> = Vec::with_capacity(d);
        for b in &t.rows {
            let mut col = Vec::new();
            for f in maps {
                col.extend(t.reduce(&f(b)));
            }
            cond_cols.push(col);
        }
        let nrows = cond_cols[0].len();
        let rows: Vec<Vec<u8>> = (0..nrows)
            .map(|r| (0..d).map(|c| cond_cols[c][r]).collect())
            .collect();
        let ker = kernel(&rows, d, p);
        if ker.len() == d {
            return t;
        }
        let gens: Vec<Vec<u8>> = ker
            .iter()
            .map(|coef| {
                let mut v = vec![0u8; dim];
                for (i, b) in t.rows.iter().enumerate() {
                    let c = coef[i] as u16;
                    for j in 0..dim {
                        v[j] = ((v[j] as u16 + c * b[j] as u16) % p as u16) as u8;
                    }
                }
                v
            })
            .collect();
        t = Subspace::new(p, dim, gens);
    }
}

/// The linear map y |-> m y (Left) or y |-> y m (Right) on ambient
/// coordinate vectors, for a fixed matrix m.
pub fn mult_map(amb: Arc<Ambient>, m: Mat, side: ActionSide) -> impl Fn(&[u8]) -> Vec<u8> {
    move |v: &[u8]| {
        let x = amb.lie_of_code(&amb.fp_to_code(v));
        let prod = match side {
            ActionSide::Left => amb.mat_mul(&m, &x),
            ActionSide::Right => amb.mat_mul(&x, &m),
        };
        amb.code_to_fp(&amb.code_of(&prod))
    }
}

/// Arcs on which a subspace has support, for reporting free
/// coordinates of stabilizers.
pub fn support_arcs(amb: &Ambient, v: &Subspace) -> Vec<(usize, usize)> {
    let k = amb.field.k;
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for row in &v.rows {
        for (ci, &c) in row.iter().enumerate() {
            if c != 0 {
                let arc = amb.arcs[ci / k];
                if !arcs.contains(&arc) {
                    arcs.push(arc);
                }
            }
        }
    }
    arcs.sort_unstable();
    arcs
}

/// A single-arc functional c * e_{ij}^*.
pub fn arc_functional(amb: &Ambient, i: usize, j: usize, c: Fq) -> Code {
    let mut code = vec![0 as Fq; amb.arc_count()];
    code[amb.arc_index(i, j)] = c;
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::DEFAULT_CAP;
    use crate::field::Field;
    use crate::groups::SemidirectSplit;
    use rand::{Rng, SeedableRng};

    fn ut(n: usize, p: u64) -> PatternGroup {
        PatternGroup::ut(n, Field::new(p, 1, None).unwrap())
    }

    #[test]
    fn act_identity() {
        let g = ut(3, 2);
        let ds = DualSpace::full(g.ambient.clone());
        let lam = arc_functional(&g.ambient, 1, 3, 1);
        let id = g.ambient.mat_id();
        assert_eq!(ds.act(&id, &lam, &id), lam);
    }

    #[test]
    fn act_right_by_transvection() {
        // lambda = e13*, h = 1 + e23: lambda h = e13* + e12*.
        let g = ut(3, 2);
        let amb = &g.ambient;
        let ds = DualSpace::full(amb.clone());
        let lam = arc_functional(amb, 1, 3, 1);
        let h = amb.mat_of_code(&arc_functional(amb, 2, 3, 1));
        let moved = ds.act(&amb.mat_id(), &lam, &h);
        let mut expect = arc_functional(amb, 1, 3, 1);
        expect[amb.arc_index(1, 2)] = 1;
        assert_eq!(moved, expect);
    }

    #[test]
    fn act_associative_random() {
        let g = ut(4, 3);
        let amb = g.ambient.clone();
        let ds = DualSpace::full(amb.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rand_code = |rng: &mut rand_chacha::ChaCha8Rng| -> Code {
            (0..amb.arc_count()).map(|_| rng.gen_range(0..3) as Fq).collect()
        };
        for _ in 0..20 {
            let g1 = amb.mat_of_code(&rand_code(&mut rng));
            let g2 = amb.mat_of_code(&rand_code(&mut rng));
            let h1 = amb.mat_of_code(&rand_code(&mut rng));
            let h2 = amb.mat_of_code(&rand_code(&mut rng));
            let lam = rand_code(&mut rng);
            let lhs = ds.act(&amb.mat_mul(&g1, &g2), &lam, &amb.mat_mul(&h1, &h2));
            let rhs = ds.act(&g1, &ds.act(&g2, &lam, &h1), &h2);
            assert_eq!(lhs, rhs);
        }
    }

    /// Brute-force two-sided orbit by applying every (g, h) pair.
    fn orbit_brute(ds: &DualSpace, grp: &Group, lam: &Code) -> Vec<Code> {
        let mut pts: Vec<Code> = Vec::new();
        for i in 0..grp.order() {
            for j in 0..grp.order() {
                let moved = ds.act(grp.mat(i), lam, grp.mat(j));
                if !pts.contains(&moved) {
                    pts.push(moved);
                }
            }
        }
        pts.sort_unstable();
        pts
    }

    #[test]
    fn orbit_two_sided_ut3_f2() {
        let g = ut(3, 2);
        let amb = g.ambient.clone();
        let ds = DualSpace::full(amb.clone());
        let movers = pattern_movers(&g);
        let grp = g.enumerate().unwrap();

        let zero = vec![0 as Fq; amb.arc_count()];
        let orb0 = orbit_two_sided(&ds, &movers, &zero, &movers, DEFAULT_CAP).unwrap();
        assert_eq!(orb0.points, vec![zero]);

        let lam13 = arc_functional(&amb, 1, 3, 1);
        let orb = orbit_two_sided(&ds, &movers, &lam13, &movers, DEFAULT_CAP).unwrap();
        assert_eq!(orb.len(), 4);
        assert_eq!(orb.points, orbit_brute(&ds, &grp, &lam13));
        // Points are e13* + a e23* + c e12*.
        for pt in &orb.points {
            assert_eq!(pt[amb.arc_index(1, 3)], 1);
        }

        let lam12 = arc_functional(&amb, 1, 2, 1);
        let orb = orbit_two_sided(&ds, &movers, &lam12, &movers, DEFAULT_CAP).unwrap();
        assert_eq!(orb.len(), 1);
        assert_eq!(orb.points, orbit_brute(&ds, &grp, &lam12));
    }

    #[test]
    fn orbit_rep_independent_of_start() {
        let g = ut(3, 2);
        let ds = DualSpace::full(g.ambient.clone());
        let movers = pattern_movers(&g);
        let lam = arc_functional(&g.ambient, 1, 3, 1);
        let orb = orbit_two_sided(&ds, &movers, &lam, &movers, DEFAULT_CAP).unwrap();
        for pt in &orb.points {
            let again = orbit_two_sided(&ds, &movers, pt, &movers, DEFAULT_CAP).unwrap();
            assert_eq!(again, orb);
        }
    }

    #[test]
    fn superclasses_ut3_f2() {
        let g = ut(3, 2);
        let amb = g.ambient.clone();
        let movers = pattern_movers(&g);
        let grp = g.enumerate().unwrap();

        let one = vec![0 as Fq; amb.arc_count()];
        let orb = orbit_element(&amb, &movers, &one, &movers, DEFAULT_CAP).unwrap();
        assert_eq!(orb.points, vec![one]);

        let g12 = arc_functional(&amb, 1, 2, 1);
        let orb = orbit_element(&amb, &movers, &g12, &movers, DEFAULT_CAP).unwrap();
        assert_eq!(orb.len(), 2);
        let mut g12_13 = g12.clone();
        g12_13[amb.arc_index(1, 3)] = 1;
        assert!(orb.contains(&g12));
        assert!(orb.contains(&g12_13));

        let all = superclasses(&grp, &movers, &movers).unwrap();
        let mut sizes: Vec<usize> = all.iter().map(|o| o.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
        assert_eq!(sizes.iter().sum::<usize>(), 8);
    }

    #[test]
    fn dual_decomposition_partitions() {
        let g = ut(3, 3);
        let ds = DualSpace::full(g.ambient.clone());
        let movers = pattern_movers(&g);
        let orbits = decompose_dual(&ds, &movers, &movers, DEFAULT_CAP).unwrap();
        let total: usize = orbits.iter().map(|o| o.len()).sum();
        assert_eq!(total as u128, ds.size());
        let mut seen = HashSet::new();
        for o in &orbits {
            for pt in &o.points {
                assert!(seen.insert(pt.clone()), "orbits overlap");
            }
        }
    }

    #[test]
    fn stabilizer_trivial_functional() {
        let g = ut(3, 2);
        let ds = DualSpace::full(g.ambient.clone());
        let zero = vec![0 as Fq; g.ambient.arc_count()];
        let stab = stabilizer_space(&ds, &g.lie_space(), &zero, ActionSide::Left);
        assert_eq!(stab.order(), g.order());
    }

    #[test]
    fn stabilizer_matches_enumeration() {
        let split_p = [(4usize, 2u64), (3, 3)];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &(n, p) in &split_p {
            let g = ut(n, p);
            let amb = g.ambient.clone();
            let ds = DualSpace::full(amb.clone());
            let grp = g.enumerate().unwrap();
            for _ in 0..8 {
                let lam: Code = (0..amb.arc_count())
                    .map(|_| rng.gen_range(0..p) as Fq)
                    .collect();
                for side in [ActionSide::Left, ActionSide::Right] {
                    let stab = stabilizer_space(&ds, &g.lie_space(), &lam, side);
                    let brute = stabilizer_enumerated(&ds, &grp, &lam, side);
                    assert_eq!(stab.order() as usize, brute.len());
                    for &i in &brute {
                        assert!(stab.contains_code(grp.code(i)));
                    }
                    // Stabilizer-orbit counting.
                    let movers = pattern_movers(&g);
                    let orb = orbit_one_sided(&ds, &movers, &lam, side, DEFAULT_CAP).unwrap();
                    assert_eq!(orb.len() as u128 * stab.order(), g.order());
                }
            }
        }
    }

    #[test]
    fn ut7_paper_stabilizer_example() {
        // lambda(x) = x_{15} + x_{37} in UT_7, split at k = 3. The
        // lattice-restricted stabilizers have free coordinates exactly
        // {(2,3)} on the H_k side and {(4,6),(5,6)} on the H_m side.
        let g = ut(7, 2);
        let amb = g.ambient.clone();
        let split = SemidirectSplit::new(&g, 3).unwrap();
        let ds_n = DualSpace::from_arcs(amb.clone(), &split.n_arcs);
        let mut lam = arc_functional(&amb, 1, 5, 1);
        lam[amb.arc_index(3, 7)] = 1;

        let kk = stabilizer_space(&ds_n, &split.hk_group().lie_space(), &lam, ActionSide::Left);
        assert_eq!(support_arcs(&amb, &kk.space), vec![(2, 3)]);
        assert_eq!(kk.order(), 2);

        let km = stabilizer_space(&ds_n, &split.hm_group().lie_space(), &lam, ActionSide::Right);
        assert_eq!(support_arcs(&amb, &km.space), vec![(4, 6), (5, 6)]);
        assert_eq!(km.order(), 4);

        // Certification: K_k is a right ideal subgroup of H_k, K_m a
        // left ideal subgroup of H_m.
        assert!(mult_invariant(&amb, &kk.space, &split.hk_group().lie_space(), ActionSide::Right));
        assert!(mult_invariant(&amb, &km.space, &split.hm_group().lie_space(), ActionSide::Left));
        assert!(kk.is_group());
        assert!(km.is_group());
    }

    #[test]
    fn largest_invariant_shrinks() {
        // span{e12} in ut_3 is not a right ideal: e12 e23 = e13 escapes,
        // so the largest two-sided invariant subspace inside it is 0.
        let g = ut(3, 2);
        let amb = g.ambient.clone();
        let mut v = vec![0u8; amb.fp_dim()];
        v[amb.arc_index(1, 2)] = 1;
        let start = Subspace::new(2, amb.fp_dim(), vec![v]);
        let mut maps = Vec::new();
        for code in g.generator_codes() {
            let m = amb.lie_of_code(&code);
            maps.push(mult_map(amb.clone(), m.clone(), ActionSide::Left));
            maps.push(mult_map(amb.clone(), m, ActionSide::Right));
        }
        let t = largest_invariant(&start, &maps);
        assert_eq!(t.dim(), 0);

        // span{e13} is a two-sided ideal: it survives unchanged.
        let mut v = vec![0u8; amb.fp_dim()];
        v[amb.arc_index(1, 3)] = 1;
        let start = Subspace::new(2, amb.fp_dim(), vec![v]);
        let t = largest_invariant(&start, &maps);
        assert_eq!(t.dim(), 1);
    }

    #[test]
    fn conjugated_stabilizer_transforms() {
        // Stab(lambda^h) = Stab(lambda)^h for the conjugation action.
        let g = ut(4, 2);
        let amb = g.ambient.clone();
        let ds = DualSpace::full(amb.clone());
        let grp = g.enumerate().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let lam: Code = (0..amb.arc_count()).map(|_| rng.gen_range(0..2) as Fq).collect();
            let h = grp.mat(rng.gen_range(0..grp.order())).clone();
            let hi = amb.mat_inv(&h);
            // lambda' = act(h^{-1}, lam, h) so that psi_{lam'} = psi_lam^h.
            let lam2 = ds.act(&hi, &lam, &h);
            let s1 = stabilizer_space(&ds, &g.lie_space(), &lam, ActionSide::Left);
            let s2 = stabilizer_space(&ds, &g.lie_space(), &lam2, ActionSide::Left);
            let s1c = s1.conjugated(&h);
            assert_eq!(s2.space.rows, s1c.space.rows);
        }
    }

    #[test]
    fn functional_enumeration_canonical() {
        let g = ut(3, 2);
        let split = SemidirectSplit::new(&g, 1).unwrap();
        let ds = DualSpace::from_arcs(g.ambient.clone(), &split.n_arcs);
        let all = ds.functionals(DEFAULT_CAP).unwrap();
        assert_eq!(all.len(), 4);
        for lam in &all {
            assert_eq!(&ds.canon(lam), lam);
        }
    }
}
