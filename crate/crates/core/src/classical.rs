//! Unipotent groups fixed by anti-involutions: the even-dimensional
//! unipotent orthogonal, symplectic, and unitary groups.
//!
//! For an algebra anti-involution x -> x^dagger of ut_{2n} with
//! (a e_ij)^dagger proportional to e_{(2n+1-j)(2n+1-i)}, the group
//! U = {u : u^dagger = u^{-1}} carries a supercharacter theory with
//! superclasses K_u = {v : f(v) in G . f(u)} and supercharacters
//! chi_lam = (|H.lam| / |G.lam|) sum_{mu in G.lam} theta(mu(f(.))),
//! where f is a Springer morphism (here the Cayley map), G . x =
//! g x g^dagger, and (g . lam)(x) = lam(g^{-1} x g^{-dagger}). The
//! same theory arises from the method of little groups applied to the
//! split U = N x| H with N the crossing block of the fixed Lie algebra
//! u and H the block-diagonal complement, over the lattice of
//! subgroups mapping to right ideal subgroups of UT_n under the
//! projection phi onto the upper-left block.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::charfun::{ClassFunction, ConjClasses};
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::groups::{Ambient, Code, Group, Mat, PatternGroup, PatternPoset, SemidirectSplit, Side};
use crate::linalg::{kernel, Subspace};
use crate::littlegroups::{chars_to_theory, conj_functional, semidirect_char_general};
use crate::orbits::pair_fp;
use crate::orbits::{pattern_movers, DualSpace};
use crate::sct::{sct_ideal_space, SCTheory};

/// The three families of defining anti-involutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Kind {
    Orthogonal,
    Symplectic,
    Unitary,
}

/// The two readings of the column condition cutting out the auxiliary
/// subalgebra h whose orbits provide the character scalar |H.lam|:
/// entries vanish on columns j <= n (the upper-right block) or on
/// columns j <= n/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HReading {
    HalfBlock,
    Literal,
}

fn mat_sub(f: &Field, a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b.iter()).map(|(&x, &y)| f.sub(x, y)).collect()
}

fn mat_scale(f: &Field, a: &Mat, c: Fq) -> Mat {
    a.iter().map(|&x| f.mul(x, c)).collect()
}

fn mat_add(f: &Field, a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b.iter()).map(|(&x, &y)| f.add(x, y)).collect()
}

/// The Cayley map f(g) = 2(g-1)(g+1)^{-1} = (g-1)(1+(g-1)/2)^{-1},
/// a Springer morphism in odd characteristic.
pub fn cayley(amb: &Ambient, g: &Mat) -> Mat {
    let f = &amb.field;
    let inv2 = f.inv(f.from_int(2));
    let d = mat_sub(f, g, &amb.mat_id());
    let half = mat_add(f, &amb.mat_id(), &mat_scale(f, &d, inv2));
    amb.mat_mul(&d, &amb.mat_inv(&half))
}

/// The inverse Cayley map g = (1 - x/2)^{-1}(1 + x/2).
pub fn cayley_inv(amb: &Ambient, x: &Mat) -> Mat {
    let f = &amb.field;
    let inv2 = f.inv(f.from_int(2));
    let a = mat_scale(f, x, inv2);
    let plus = mat_add(f, &amb.mat_id(), &a);
    let minus = mat_sub(f, &amb.mat_id(), &a);
    amb.mat_mul(&amb.mat_inv(&minus), &plus)
}

/// A unipotent group U = {u : u^dagger = u^{-1}} inside UT_{2n},
/// enumerated together with its split U = N x| H.
pub struct UGroup {
    pub kind: Kind,
    /// Half the ambient size.
    pub n: usize,
    pub g_pattern: PatternGroup,
    /// The fixed Lie algebra u = {x : x^dagger = -x}.
    pub u_space: Subspace,
    pub u: Arc<Group>,
    pub u_classes: Arc<ConjClasses>,
    /// The crossing part n = u /\ (upper-right block); N = 1 + n.
    pub n_space: Subspace,
    pub n_grp: Arc<Group>,
    /// The block-diagonal complement {diag(h, h~^{-1})}.
    pub h_grp: Arc<Group>,
    /// UT_n over the same field; phi maps H isomorphically into it.
    pub hn: PatternGroup,
    /// The ambient split at column n, used only for factorization.
    pub split: SemidirectSplit,
    pub ds_n: DualSpace,
    pub ds_u: DualSpace,
    pub cap: u128,
}

impl UGroup {
    fn amb(&self) -> &Arc<Ambient> {
        &self.g_pattern.ambient
    }

    fn bar(&self, a: Fq) -> Fq {
        match self.kind {
            Kind::Unitary => self.amb().field.frob(a),
            _ => a,
        }
    }

    /// Sign epsilon_i of the one nonzero entry in row i of Omega
    /// (symplectic only): +1 on the top half, -1 on the bottom half.
    fn eps(&self, i: usize) -> Fq {
        let f = &self.amb().field;
        if i < self.n {
            f.from_int(1)
        } else {
            f.neg(f.from_int(1))
        }
    }

    /// The anti-involution on full 2n x 2n matrices:
    /// (m^dagger)_{ij} = c_{ij} bar(m_{(2n-1-j)(2n-1-i)}) with c = 1
    /// for the orthogonal and unitary kinds and c = eps_i eps_j for
    /// the symplectic kind.
    pub fn dagger_mat(&self, m: &Mat) -> Mat {
        let amb = self.amb();
        let f = &amb.field;
        let sz = 2 * self.n;
        let mut out = vec![0 as Fq; sz * sz];
        for i in 0..sz {
            for j in 0..sz {
                let v = self.bar(m[(sz - 1 - j) * sz + (sz - 1 - i)]);
                out[i * sz + j] = match self.kind {
                    Kind::Symplectic => f.mul(f.mul(self.eps(i), self.eps(j)), v),
                    _ => v,
                };
            }
        }
        out
    }

    /// g . x = g x g^dagger on the Lie algebra u.
    pub fn act_elem(&self, g: &Mat, x: &Mat) -> Mat {
        let amb = self.amb();
        amb.mat_mul(&amb.mat_mul(g, x), &self.dagger_mat(g))
    }

    /// (g . lam)(x) = lam(g^{-1} x g^{-dagger}); coefficient codes
    /// transform as C' = (g^{-1})^t C (g^{-dagger})^t.
    pub fn act_dual(&self, ds: &DualSpace, g: &Mat, lam: &Code) -> Code {
        let amb = self.amb();
        let gi = amb.mat_inv(g);
        let a = amb.transpose(&gi);
        let b = amb.transpose(&amb.mat_inv(&self.dagger_mat(g)));
        let c = amb.lie_of_code(lam);
        ds.canon(&amb.code_of(&amb.mat_mul(&amb.mat_mul(&a, &c), &b)))
    }

    /// phi: extracts the upper-left block of a block-diagonal element
    /// as a code in the UT_n ambient.
    pub fn phi_code(&self, u_code: &Code) -> Code {
        let amb = self.amb();
        let hamb = &self.hn.ambient;
        let m = amb.mat_of_code(u_code);
        let sz = 2 * self.n;
        let mut top = hamb.mat_id();
        for i in 0..self.n {
            for j in 0..self.n {
                top[i * self.n + j] = m[i * sz + j];
            }
        }
        hamb.code_of(&top)
    }

    /// Embeds h in UT_n as diag(h, h~^{-1}) in U.
    pub fn embed_h(&self, hn_code: &Code) -> Code {
        let amb = self.amb();
        let hamb = &self.hn.ambient;
        let hm = hamb.mat_of_code(hn_code);
        let sz = 2 * self.n;
        let mut m = amb.mat_id();
        for i in 0..self.n {
            for j in 0..self.n {
                m[i * sz + j] = hm[i * self.n + j];
            }
        }
        let u = amb.mat_mul(&m, &amb.mat_inv(&self.dagger_mat(&m)));
        amb.code_of(&u)
    }

    /// psi_lam(1 + x) as a root of unity (f is the identity on N since
    /// the crossing block squares to zero).
    pub fn psi_value(&self, lam: &Code, n_code: &Code) -> Cyclotomic {
        let amb = self.amb();
        Cyclotomic::root_of_unity(amb.field.p, pair_fp(amb, lam, n_code) as u64)
    }

    /// lam_bar(y) = (1/2) lam(y - y^dagger) for y in the full
    /// upper-right block, as an element of Z_p.
    fn lam_bar_val(&self, lam: &Code, y: &Mat) -> u64 {
        let amb = self.amb();
        let f = &amb.field;
        let d = mat_sub(f, y, &self.dagger_mat(y));
        let v = pair_fp(amb, lam, &amb.code_of(&d)) as u64;
        let p = f.p;
        let inv2 = (p + 1) / 2;
        (v * inv2) % p
    }

    /// H_{psi_lam} = {h in H : h lam_bar = lam_bar}, where lam_bar is
    /// the half-difference extension of lam to the full upper-right
    /// block; maps to a right ideal subgroup of UT_n under phi.
    pub fn h_psi_group(&self, lam: &Code) -> Arc<Group> {
        let amb = self.amb();
        let lam_c = self.ds_n.canon(lam);
        let nbar: Vec<Mat> = crossing_basis(amb, self.n)
            .iter()
            .map(|v| amb.lie_of_code(&amb.fp_to_code(v)))
            .collect();
        let codes: Vec<Code> = (0..self.h_grp.order())
            .filter(|&i| {
                let hi = self.h_grp.mat(self.h_grp.inv_idx(i));
                nbar.iter().all(|x| {
                    self.lam_bar_val(&lam_c, &self.amb().mat_mul(hi, x))
                        == self.lam_bar_val(&lam_c, x)
                })
            })
            .map(|i| self.h_grp.code(i).clone())
            .collect();
        Group::from_codes(amb.clone(), codes)
    }

    /// The inertia group I_H(psi_lam) under conjugation.
    pub fn inertia_group(&self, lam: &Code) -> Arc<Group> {
        let lam_c = self.ds_n.canon(lam);
        let codes: Vec<Code> = (0..self.h_grp.order())
            .filter(|&i| conj_functional(&self.ds_n, &lam_c, self.h_grp.mat(i)) == lam_c)
            .map(|i| self.h_grp.code(i).clone())
            .collect();
        Group::from_codes(self.amb().clone(), codes)
    }

    /// The supercharacters H_psi carries as a lattice member: the
    /// right-ideal supercharacters of phi(H_psi) pulled back along phi.
    pub fn h_psi_chars(&self, h_psi: &Arc<Group>) -> Result<(Arc<ConjClasses>, Vec<ClassFunction>)> {
        let phi_codes: Vec<Code> = h_psi.elems.iter().map(|c| self.phi_code(c)).collect();
        let phi_grp = Group::from_codes(self.hn.ambient.clone(), phi_codes);
        let space = phi_grp.lie_subspace().ok_or(Error::ValidationFailed {
            condition: "L3",
            detail: "phi image is not an algebra group".to_string(),
        })?;
        let s_phi = sct_ideal_space(&self.hn, &space, Side::Right, self.cap)?;
        let classes = ConjClasses::new(h_psi.clone());
        let chars = s_phi
            .chars
            .iter()
            .map(|c| {
                ClassFunction::from_elem_fn(classes.clone(), |i| {
                    c.value_at_code(&self.phi_code(h_psi.code(i)))
                        .expect("phi image element")
                        .clone()
                })
            })
            .collect();
        Ok((classes, chars))
    }

    /// H-orbit representatives on the dual of n, least first.
    pub fn orbit_reps(&self) -> Result<Vec<Code>> {
        let mut all = self.ds_n.functionals(self.cap)?;
        all.sort_unstable();
        let gens: Vec<Mat> = self
            .h_grp
            .generators()
            .iter()
            .flat_map(|&i| {
                [
                    self.h_grp.mat(i).clone(),
                    self.h_grp.mat(self.h_grp.inv_idx(i)).clone(),
                ]
            })
            .collect();
        let mut visited: HashSet<Code> = HashSet::new();
        let mut reps = Vec::new();
        for lam in &all {
            if visited.contains(lam) {
                continue;
            }
            reps.push(lam.clone());
            let mut frontier = vec![lam.clone()];
            visited.insert(lam.clone());
            while let Some(x) = frontier.pop() {
                for m in &gens {
                    let y = conj_functional(&self.ds_n, &x, m);
                    if visited.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
        }
        Ok(reps)
    }
}

/// F_p basis of the full upper-right block (the crossing arcs).
fn crossing_basis(amb: &Ambient, n: usize) -> Vec<Vec<u8>> {
    let k = amb.field.k;
    let mut out = Vec::new();
    for (a, &(i, j)) in amb.arcs.iter().enumerate() {
        if i <= n && j > n {
            for t in 0..k {
                let mut v = vec![0u8; amb.fp_dim()];
                v[a * k + t] = 1;
                out.push(v);
            }
        }
    }
    out
}

/// Builds the unipotent group of the given kind inside UT_{2n},
/// enumerating U through the Cayley bijection with its Lie algebra and
/// splitting it as N x| H.
pub fn build_classical(kind: Kind, n: usize, field: Arc<Field>, cap: u128) -> Result<UGroup> {
    if field.p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    match kind {
        Kind::Unitary if field.k != 2 => {
            return Err(Error::ValidationFailed {
                condition: "unitary field",
                detail: "the unitary kind needs a degree-2 extension".to_string(),
            })
        }
        Kind::Orthogonal | Kind::Symplectic if field.k != 1 => {
            return Err(Error::ValidationFailed {
                condition: "field degree",
                detail: "orthogonal and symplectic kinds use a prime field".to_string(),
            })
        }
        _ => {}
    }
    let g_pattern = PatternGroup::ut(2 * n, field.clone());
    let amb = g_pattern.ambient.clone();
    let hn = PatternGroup::ut(n, field.clone());
    let hn_elems = hn.enumerate_with_cap(cap)?;
    let mut ug = UGroup {
        kind,
        n,
        g_pattern: g_pattern.clone(),
        u_space: Subspace::zero(field.p, amb.fp_dim()),
        u: Group::from_codes(amb.clone(), vec![vec![0; amb.arc_count()]]),
        u_classes: ConjClasses::new(Group::from_codes(
            amb.clone(),
            vec![vec![0; amb.arc_count()]],
        )),
        n_space: Subspace::zero(field.p, amb.fp_dim()),
        n_grp: Group::from_codes(amb.clone(), vec![vec![0; amb.arc_count()]]),
        h_grp: Group::from_codes(amb.clone(), vec![vec![0; amb.arc_count()]]),
        hn,
        split: SemidirectSplit::new(&g_pattern, n)?,
        ds_n: DualSpace::from_arcs(amb.clone(), &[]),
        ds_u: DualSpace::from_arcs(amb.clone(), &[]),
        cap,
    };
    // u = kernel of v -> dagger(v) + v on the strictly upper arcs.
    let dim = amb.fp_dim();
    let p = field.p;
    let cols: Vec<Vec<u8>> = (0..dim)
        .map(|t| {
            let mut e = vec![0u8; dim];
            e[t] = 1;
            let x = amb.lie_of_code(&amb.fp_to_code(&e));
            let img = amb.code_to_fp(&amb.code_of(&ug.dagger_mat(&x)));
            (0..dim)
                .map(|r| ((img[r] as u64 + e[r] as u64) % p) as u8)
                .collect()
        })
        .collect();
    let rows: Vec<Vec<u8>> = (0..dim).map(|r| (0..dim).map(|c| cols[c][r]).collect()).collect();
    ug.u_space = Subspace::new(p, dim, kernel(&rows, dim, p));
    crate::cap::check((p as u128).pow(ug.u_space.dim() as u32), cap)?;
    // Enumerate U through the inverse Cayley map.
    let u_codes: Vec<Code> = ug
        .u_space
        .vectors()
        .iter()
        .map(|v| {
            let x = amb.lie_of_code(&amb.fp_to_code(v));
            amb.code_of(&cayley_inv(&amb, &x))
        })
        .collect();
    let expect = u_codes.len();
    ug.u = Group::from_codes(amb.clone(), u_codes);
    assert_eq!(ug.u.order(), expect, "Cayley map must be injective on u");
    ug.u_classes = ConjClasses::new(ug.u.clone());
    // N = 1 + (u /\ crossing block).
    let crossing = Subspace::new(p, dim, crossing_basis(&amb, n));
    ug.n_space = ug.u_space.intersect(&crossing);
    let n_codes: Vec<Code> = ug
        .n_space
        .vectors()
        .iter()
        .map(|v| amb.fp_to_code(v))
        .collect();
    ug.n_grp = Group::from_codes(amb.clone(), n_codes);
    // H = {diag(h, h~^{-1})}.
    let h_codes: Vec<Code> = hn_elems.elems.iter().map(|c| ug.embed_h(c)).collect();
    ug.h_grp = Group::from_codes(amb.clone(), h_codes);
    for grp in [&ug.n_grp, &ug.h_grp] {
        assert!(grp.is_subgroup_of(&ug.u), "split factors must lie in U");
    }
    assert_eq!(
        ug.n_grp.order() * ug.h_grp.order(),
        ug.u.order(),
        "U must factor as N x| H"
    );
    ug.ds_n = DualSpace::from_space(amb.clone(), ug.n_space.clone());
    ug.ds_u = DualSpace::from_space(amb, ug.u_space.clone());
    Ok(ug)
}

fn dual_orbit(
    ug: &UGroup,
    ds: &DualSpace,
    movers: &[Mat],
    start: &Code,
) -> Result<Vec<Code>> {
    let amb = ug.amb();
    let mats: Vec<Mat> = movers
        .iter()
        .flat_map(|m| [m.clone(), amb.mat_inv(m)])
        .collect();
    let mut seen: HashSet<Code> = HashSet::new();
    let start = ds.canon(start);
    seen.insert(start.clone());
    let mut frontier = vec![start];
    let mut out = Vec::new();
    while let Some(x) = frontier.pop() {
        for m in &mats {
            let y = ug.act_dual(ds, m, &x);
            if seen.insert(y.clone()) {
                crate::cap::check(seen.len() as u128, ug.cap)?;
                frontier.push(y);
            }
        }
        out.push(x);
    }
    out.sort_unstable();
    Ok(out)
}

fn elem_orbit(ug: &UGroup, movers: &[Mat], start: &Code) -> Result<Vec<Code>> {
    let amb = ug.amb();
    let mats: Vec<Mat> = movers
        .iter()
        .flat_map(|m| [m.clone(), amb.mat_inv(m)])
        .collect();
    let mut seen: HashSet<Code> = HashSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start.clone()];
    let mut out = Vec::new();
    while let Some(x) = frontier.pop() {
        let xm = amb.lie_of_code(&x);
        for m in &mats {
            let y = amb.code_of(&ug.act_elem(m, &xm));
            if seen.insert(y.clone()) {
                crate::cap::check(seen.len() as u128, ug.cap)?;
                frontier.push(y);
            }
        }
        out.push(x);
    }
    out.sort_unstable();
    Ok(out)
}

/// The auxiliary subgroup 1 + h whose dual orbits provide the scalar
/// in front of chi_lam.
fn h_upper_movers(ug: &UGroup, reading: HReading) -> Vec<Mat> {
    let thresh = match reading {
        HReading::HalfBlock => ug.n,
        HReading::Literal => ug.n / 2,
    };
    let arcs: Vec<(usize, usize)> = ug
        .g_pattern
        .arcs()
        .iter()
        .copied()
        .filter(|&(_, j)| j > thresh)
        .collect();
    let pg = PatternGroup {
        ambient: ug.g_pattern.ambient.clone(),
        poset: PatternPoset::new(2 * ug.n, arcs),
    };
    pattern_movers(&pg)
}

/// The supercharacter theory of U from the two-sided data directly,
/// with a chosen reading of the auxiliary subgroup and a twist
/// theta(a) -> theta(t a) of the additive character.
pub fn sct_classical_theta(ug: &UGroup, reading: HReading, t: u64) -> Result<SCTheory> {
    let amb = ug.amb().clone();
    let p = amb.field.p;
    let g_movers = pattern_movers(&ug.g_pattern);
    let h_movers = h_upper_movers(ug, reading);
    // f(class representative) for every conjugacy class of U.
    let f_codes: Vec<Code> = (0..ug.u_classes.num())
        .map(|c| amb.code_of(&cayley(&amb, ug.u.mat(ug.u_classes.rep(c)))))
        .collect();
    let mut all = ug.ds_u.functionals(ug.cap)?;
    all.sort_unstable();
    let mut visited: HashSet<Code> = HashSet::new();
    let mut chars = Vec::new();
    for lam in &all {
        if visited.contains(lam) {
            continue;
        }
        let orbit = dual_orbit(ug, &ug.ds_u, &g_movers, lam)?;
        for pt in &orbit {
            visited.insert(pt.clone());
        }
        let h_orbit = dual_orbit(ug, &ug.ds_u, &h_movers, lam)?;
        let scalar = Cyclotomic::from_rational(BigRational::new(
            BigInt::from(h_orbit.len()),
            BigInt::from(orbit.len()),
        ));
        let values: Vec<Cyclotomic> = f_codes
            .iter()
            .map(|fc| {
                let mut acc = Cyclotomic::zero();
                for mu in &orbit {
                    let e = (pair_fp(&amb, mu, fc) as u64 * t) % p;
                    acc = acc.add(&Cyclotomic::root_of_unity(p, e));
                }
                acc.mul(&scalar)
            })
            .collect();
        chars.push(ClassFunction::from_class_values(ug.u_classes.clone(), values));
    }
    // Superclasses: Cayley preimages of the G-orbits on u.
    let mut blocks = Vec::new();
    let mut seen_elem = vec![false; ug.u.order()];
    for i in 0..ug.u.order() {
        if seen_elem[i] {
            continue;
        }
        let start = amb.code_of(&cayley(&amb, ug.u.mat(i)));
        let orbit = elem_orbit(ug, &g_movers, &start)?;
        let blk: Vec<usize> = orbit
            .iter()
            .map(|x| {
                let u_code = amb.code_of(&cayley_inv(&amb, &amb.lie_of_code(x)));
                ug.u.idx(&u_code).expect("orbit stays in U")
            })
            .collect();
        for &e in &blk {
            seen_elem[e] = true;
        }
        blocks.push(blk);
    }
    let tag = format!("classical ({:?})", ug.kind);
    let notes = vec!["raw".to_string(); chars.len()];
    Ok(SCTheory::assemble(ug.u_classes.clone(), blocks, chars, &tag, notes))
}

pub fn sct_classical(ug: &UGroup) -> Result<SCTheory> {
    sct_classical_theta(ug, HReading::HalfBlock, 1)
}

/// Per dual orbit: (|G.lam|, |H.lam| half-block reading, |H.lam|
/// literal reading); the boolean reports whether the character scalar
/// |H.lam|/|G.lam| ever differs between the two readings.
pub fn reading_scalar_report(ug: &UGroup) -> Result<(Vec<(usize, usize, usize)>, bool)> {
    let g_movers = pattern_movers(&ug.g_pattern);
    let half = h_upper_movers(ug, HReading::HalfBlock);
    let lit = h_upper_movers(ug, HReading::Literal);
    let mut all = ug.ds_u.functionals(ug.cap)?;
    all.sort_unstable();
    let mut visited: HashSet<Code> = HashSet::new();
    let mut rows = Vec::new();
    for lam in &all {
        if visited.contains(lam) {
            continue;
        }
        let orbit = dual_orbit(ug, &ug.ds_u, &g_movers, lam)?;
        for pt in &orbit {
            visited.insert(pt.clone());
        }
        let a = dual_orbit(ug, &ug.ds_u, &half, lam)?.len();
        let b = dual_orbit(ug, &ug.ds_u, &lit, lam)?.len();
        rows.push((orbit.len(), a, b));
    }
    let differs = rows.iter().any(|&(_, a, b)| a != b);
    Ok((rows, differs))
}

/// Executed (H1)-(H4) checks for the classical H-map over all of
/// Irr(N).
pub fn validate_classical_hmap(ug: &UGroup) -> Result<()> {
    let amb = ug.amb().clone();
    let mut all = ug.ds_n.functionals(ug.cap)?;
    all.sort_unstable();
    let sets: Vec<HashSet<Code>> = all
        .iter()
        .map(|lam| ug.h_psi_group(lam).elems.iter().cloned().collect())
        .collect();
    let lookup = |lam: &Code| -> usize {
        all.binary_search(&ug.ds_n.canon(lam)).expect("functional")
    };
    for (li, lam) in all.iter().enumerate() {
        if lam.iter().all(|&x| x == 0) && sets[li].len() != ug.h_grp.order() {
            return Err(Error::ValidationFailed {
                condition: "H3",
                detail: "H_{1_N} differs from H".to_string(),
            });
        }
        let inertia = ug.inertia_group(lam);
        for hi in 0..inertia.order() {
            let hm = inertia.mat(hi);
            let him = amb.mat_inv(hm);
            for c in &sets[li] {
                let moved = amb.code_of(&amb.mat_mul(&amb.mat_mul(&him, &amb.mat_of_code(c)), hm));
                if !sets[li].contains(&moved) {
                    return Err(Error::ValidationFailed {
                        condition: "H1",
                        detail: format!("H_psi not normal in the inertia group (lam {:?})", lam),
                    });
                }
            }
        }
        for hi in 0..ug.h_grp.order() {
            let hm = ug.h_grp.mat(hi);
            let him = amb.mat_inv(hm);
            let li2 = lookup(&conj_functional(&ug.ds_n, lam, hm));
            let conj: HashSet<Code> = sets[li]
                .iter()
                .map(|c| amb.code_of(&amb.mat_mul(&amb.mat_mul(&him, &amb.mat_of_code(c)), hm)))
                .collect();
            if conj != sets[li2] {
                return Err(Error::ValidationFailed {
                    condition: "H2",
                    detail: format!("H_{{psi^h}} != (H_psi)^h (lam {:?}, h {})", lam, hi),
                });
            }
        }
    }
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate() {
            let sum: Code = a
                .iter()
                .zip(b.iter())
                .map(|(&x, &y)| amb.field.add(x, y))
                .collect();
            let ls = lookup(&sum);
            if !sets[i].intersection(&sets[j]).all(|c| sets[ls].contains(c)) {
                return Err(Error::ValidationFailed {
                    condition: "H4",
                    detail: format!("intersection escapes H_{{psi phi}} ({}, {})", i, j),
                });
            }
        }
    }
    Ok(())
}

/// The little-groups reconstruction: psi_lam |x chi over H-orbit
/// representatives lam and the inductions chi of the pulled-back
/// right-ideal supercharacters of H_{psi_lam} to the inertia group.
pub fn sct_classical_littlegroups(ug: &UGroup) -> Result<SCTheory> {
    validate_classical_hmap(ug)?;
    let factor = |c: &Code| ug.split.factor(c);
    let mut chars = Vec::new();
    let mut notes = Vec::new();
    for lam in &ug.orbit_reps()? {
        let h_psi = ug.h_psi_group(lam);
        let (_, h_chars) = ug.h_psi_chars(&h_psi)?;
        let i_classes = ConjClasses::new(ug.inertia_group(lam));
        let mut s_psi: Vec<(ClassFunction, usize)> = Vec::new();
        for c in &h_chars {
            let ind = c.induce(&i_classes)?;
            match s_psi.iter_mut().find(|(e, _)| e.values == ind.values) {
                Some((_, m)) => *m += 1,
                None => s_psi.push((ind, 1)),
            }
        }
        for (chi, mult) in s_psi {
            chars.push(semidirect_char_general(
                &ug.u_classes,
                &ug.h_grp,
                &ug.ds_n,
                &factor,
                lam,
                &chi,
            )?);
            notes.push(if mult > 1 {
                format!("raw (merged {} equal inductions)", mult)
            } else {
                "raw".to_string()
            });
        }
    }
    chars_to_theory(&ug.u_classes, chars, notes, "classical little-groups")
}
