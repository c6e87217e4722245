//! The method of little groups for supercharacter theories.
//!
//! For a split G = N x| H with N abelian normal, every linear character
//! psi of N and class function chi of a subgroup K of the inertia group
//! I_H(psi) combine into a class function psi |x chi of G, defined as
//! Ind_{NK}^G(psi~ . Inf_K^{NK}(chi)) where psi~(nh) = psi(n). Choosing
//! a lattice L of subgroups of H (each carrying its own supercharacter
//! theory) and a compatible map psi -> H_psi into L produces a
//! supercharacter theory SCh(L) of G whose supercharacters are
//! psi |x chi with chi induced from the supercharacters of H_psi.
//!
//! Pattern groups split at any column index k: N has the arcs crossing
//! k, and H = H_k x H_m is block diagonal. The lattice of products
//! K_k x K_m, with K_k a right ideal subgroup of H_k and K_m a left
//! ideal subgroup of H_m, together with the maximal choice of H_psi,
//! reproduces the two-sided orbit supercharacter theory of the algebra
//! group itself.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::charfun::{ClassFunction, ConjClasses};
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::groups::{Code, Group, Mat, PatternGroup, PatternPoset, SemidirectSplit, Side};
use crate::linalg::Subspace;
use crate::orbits::{
    decompose_dual, mult_invariant, mult_map, orbit_one_sided, orbit_two_sided, pair_fp,
    pattern_movers, stabilizer_space, ActionSide, DualSpace,
};
use crate::sct::{sct_algebra_group, sct_compare, sct_ideal_space, Comparison, SCTheory};

/// How H_psi is chosen inside the inertia group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Strategy {
    /// H for the trivial character of N, the trivial subgroup
    /// otherwise. Produces the star product of the conjugation theory
    /// of N with the theory of H.
    Minimal,
    /// The largest lattice member inside I_H(psi).
    Maximal,
}

/// The family of subgroup lattices of H the construction draws from.
#[derive(Debug, Clone)]
pub enum LatticeDescriptor {
    /// Products K_k x K_m with K_k a right ideal subgroup of H_k and
    /// K_m a left ideal subgroup of H_m, each carrying its one-sided
    /// ideal supercharacter theory.
    IdealProduct,
    /// Same shape but with two-sided ideals on both factors.
    TwoSidedIdealProduct,
    /// An explicit list of members, given as (k-side, m-side) subspace
    /// pairs; each must still be an ideal pair so it carries the
    /// product ideal theory.
    Explicit(Vec<(Subspace, Subspace)>),
}

/// A lattice member H_psi, as a pair of Lie algebra subspaces of the
/// two diagonal blocks.
#[derive(Debug, Clone)]
pub struct HPsi {
    pub kk: Subspace,
    pub km: Subspace,
}

/// The two sides and the pointwise product of a Mackey decomposition,
/// plus the double coset count behind the expansion.
#[derive(Debug, Clone)]
pub struct MackeyExpansion {
    pub product: ClassFunction,
    pub expansion: ClassFunction,
    pub num_cosets: usize,
    pub agrees: bool,
}

/// Per-orbit scalar data and the comparison outcome for the
/// equivalence of the little-groups theory with the algebra-group
/// theory.
#[derive(Debug, Clone)]
pub struct ThmReport {
    pub comparison: Comparison,
    /// For each two-sided dual orbit G eta G (in least-representative
    /// order): (|N H_m eta N H_k|, |G eta|).
    pub orbit_sizes: Vec<(usize, usize)>,
    pub all_sizes_equal: bool,
}

/// The conjugated functional lam^x(y) = lam(x y x^{-1}).
pub fn conj_functional(ds: &DualSpace, lam: &Code, x: &Mat) -> Code {
    let amb = &ds.ambient;
    ds.act(&amb.mat_inv(x), lam, x)
}

/// The closed-form psi_lam |x chi over an arbitrary internal split
/// G = N x| H with N abelian: `factor` must produce the unique
/// factorization g = n h, and psi_lam(1 + x) pairs lam against the arc
/// code of x. Works for any group H normalizing N, not just pattern
/// splits. The carrier K of chi must lie inside H and the inertia
/// group of psi_lam.
pub fn semidirect_char_general(
    g_classes: &Arc<ConjClasses>,
    h: &Group,
    ds_n: &DualSpace,
    factor: &dyn Fn(&Code) -> (Code, Code),
    lam: &Code,
    chi: &ClassFunction,
) -> Result<ClassFunction> {
    let k_grp = chi.classes.group.clone();
    let amb = g_classes.group.ambient().clone();
    let p = amb.field.p;
    let lam_c = ds_n.canon(lam);
    for i in 0..k_grp.order() {
        if !h.contains_code(k_grp.code(i)) {
            return Err(Error::NotSubgroup("inertia domain"));
        }
        if conj_functional(ds_n, &lam_c, k_grp.mat(i)) != lam_c {
            return Err(Error::NotInInertia);
        }
    }
    let hmats: Vec<(&Mat, Mat)> = (0..h.order())
        .map(|i| (h.mat(i), h.mat(h.inv_idx(i)).clone()))
        .collect();
    let scale = Cyclotomic::from_rational(BigRational::new(
        BigInt::from(1),
        BigInt::from(k_grp.order()),
    ));
    let g = &g_classes.group;
    let values: Vec<Cyclotomic> = (0..g_classes.num())
        .map(|c| {
            let (nc, hc) = factor(g.code(g_classes.rep(c)));
            let nm = amb.mat_of_code(&nc);
            let hm = amb.mat_of_code(&hc);
            let mut acc = Cyclotomic::zero();
            for (km, kim) in &hmats {
                let kh = amb.mat_mul(&amb.mat_mul(km, &hm), kim);
                if let Some(v) = chi.value_at_code(&amb.code_of(&kh)) {
                    let kn = amb.mat_mul(&amb.mat_mul(km, &nm), kim);
                    let e = pair_fp(&amb, &lam_c, &amb.code_of(&kn)) as u64;
                    acc = acc.add(&Cyclotomic::root_of_unity(p, e).mul(v));
                }
            }
            acc.mul(&scale)
        })
        .collect();
    Ok(ClassFunction::from_class_values(g_classes.clone(), values))
}

/// Recovers the superclass partition from a full set of supercharacters
/// as the joint level sets over conjugacy classes, and assembles the
/// theory; fails with an SCT1 violation if the level-set count differs
/// from the character count.
pub fn chars_to_theory(
    g_classes: &Arc<ConjClasses>,
    chars: Vec<ClassFunction>,
    notes: Vec<String>,
    tag: &str,
) -> Result<SCTheory> {
    let nc = g_classes.num();
    let mut block_reps: Vec<usize> = Vec::new();
    let mut class_block = vec![usize::MAX; nc];
    for c in 0..nc {
        let hit = block_reps
            .iter()
            .position(|&r| chars.iter().all(|ch| ch.values[c] == ch.values[r]));
        class_block[c] = match hit {
            Some(b) => b,
            None => {
                block_reps.push(c);
                block_reps.len() - 1
            }
        };
    }
    if block_reps.len() != chars.len() {
        return Err(Error::ValidationFailed {
            condition: "SCT1",
            detail: format!(
                "{} characters but {} joint level sets",
                chars.len(),
                block_reps.len()
            ),
        });
    }
    let mut blocks = vec![Vec::new(); block_reps.len()];
    for (c, cl) in g_classes.classes.iter().enumerate() {
        blocks[class_block[c]].extend(cl.iter().copied());
    }
    Ok(SCTheory::assemble(g_classes.clone(), blocks, chars, tag, notes))
}

/// The maximal choice H_psi = I_L(psi) on the ideal-product lattice:
/// the stabilizer {h in H_k : h lam = lam} times {h in H_m : lam h =
/// lam}, which are a right and a left ideal subgroup respectively.
pub fn maximal_h_psi(split: &SemidirectSplit, ds_n: &DualSpace, lam: &Code) -> HPsi {
    let kk = stabilizer_space(ds_n, &split.hk_group().lie_space(), lam, ActionSide::Left);
    let km = stabilizer_space(ds_n, &split.hm_group().lie_space(), lam, ActionSide::Right);
    HPsi {
        kk: kk.space,
        km: km.space,
    }
}

fn merge_codes(a: &Code, b: &Code) -> Code {
    a.iter().zip(b.iter()).map(|(&x, &y)| if x != 0 { x } else { y }).collect()
}

/// An enumerated split N x| H of a pattern group, with the dual space
/// of the abelian normal factor.
pub struct SplitData {
    pub split: SemidirectSplit,
    pub g: Arc<Group>,
    pub g_classes: Arc<ConjClasses>,
    pub n: Arc<Group>,
    pub h: Arc<Group>,
    pub ds_n: DualSpace,
    pub cap: u128,
}

impl SplitData {
    pub fn new(pg: &PatternGroup, k: usize, cap: u128) -> Result<SplitData> {
        let split = SemidirectSplit::new(pg, k)?;
        let g = pg.enumerate_with_cap(cap)?;
        let g_classes = ConjClasses::new(g.clone());
        let n = split.n_group().enumerate_with_cap(cap)?;
        let h = split.h_group().enumerate_with_cap(cap)?;
        let amb = pg.ambient.clone();
        let ds_n = DualSpace::from_arcs(amb, &split.n_arcs);
        Ok(SplitData {
            split,
            g,
            g_classes,
            n,
            h,
            ds_n,
            cap,
        })
    }

    fn amb(&self) -> &Arc<crate::groups::Ambient> {
        self.g.ambient()
    }

    /// psi_lam(1 + x) as a root of unity.
    pub fn psi_value(&self, lam: &Code, n_code: &Code) -> Cyclotomic {
        let amb = self.amb();
        let p = amb.field.p;
        Cyclotomic::root_of_unity(p, pair_fp(amb, lam, n_code) as u64)
    }

    /// The inertia group I_H(psi_lam) = {h in H : psi_lam conjugated by
    /// h equals psi_lam}, as an enumerated subgroup of H.
    pub fn inertia_group(&self, lam: &Code) -> Arc<Group> {
        let amb = self.amb();
        let lam_c = self.ds_n.canon(lam);
        let codes: Vec<Code> = (0..self.h.order())
            .filter(|&i| conj_functional(&self.ds_n, &lam_c, self.h.mat(i)) == lam_c)
            .map(|i| self.h.code(i).clone())
            .collect();
        Group::from_codes(amb.clone(), codes)
    }

    /// Least functional of each H-orbit on the dual of the Lie algebra
    /// of N, in ascending order of representative.
    pub fn orbit_reps(&self) -> Result<Vec<Code>> {
        let mut all = self.ds_n.functionals(self.cap)?;
        all.sort_unstable();
        let gens: Vec<Mat> = self
            .h
            .generators()
            .iter()
            .flat_map(|&i| [self.h.mat(i).clone(), self.h.mat(self.h.inv_idx(i)).clone()])
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

    fn check_in_inertia(&self, lam: &Code, k_grp: &Group) -> Result<()> {
        let lam_c = self.ds_n.canon(lam);
        for i in 0..k_grp.order() {
            if !self.h.contains_code(k_grp.code(i)) {
                return Err(Error::NotSubgroup("inertia domain"));
            }
            if conj_functional(&self.ds_n, &lam_c, k_grp.mat(i)) != lam_c {
                return Err(Error::NotInInertia);
            }
        }
        Ok(())
    }

    /// The subgroup NK for K a subgroup of H.
    pub fn nk_group(&self, k_grp: &Group) -> Arc<Group> {
        let amb = self.amb();
        let mut codes = Vec::with_capacity(self.n.order() * k_grp.order());
        for ni in 0..self.n.order() {
            let nm = self.n.mat(ni);
            for ki in 0..k_grp.order() {
                codes.push(amb.code_of(&amb.mat_mul(nm, k_grp.mat(ki))));
            }
        }
        Group::from_codes(amb.clone(), codes)
    }

    /// The extension psi~ of psi_lam to NK, psi~(nh) = psi(n). Requires
    /// K inside the inertia group (otherwise psi~ is not a character).
    pub fn extend_character(&self, lam: &Code, k_grp: &Group) -> Result<ClassFunction> {
        self.check_in_inertia(lam, k_grp)?;
        let nk = self.nk_group(k_grp);
        let nk_classes = ConjClasses::new(nk.clone());
        let lam_c = self.ds_n.canon(lam);
        Ok(ClassFunction::from_elem_fn(nk_classes, |i| {
            let (nc, _) = self.split.factor(nk.code(i));
            self.psi_value(&lam_c, &nc)
        }))
    }

    /// psi_lam |x chi, evaluated by the closed form
    /// (psi |x chi)(nh) = (1/|K|) sum_{k in H, k h k^{-1} in K}
    /// psi(k n k^{-1}) chi(k h k^{-1}), where K is the carrier of chi.
    pub fn semidirect_char(&self, lam: &Code, chi: &ClassFunction) -> Result<ClassFunction> {
        let factor = |c: &Code| self.split.factor(c);
        semidirect_char_general(&self.g_classes, &self.h, &self.ds_n, &factor, lam, chi)
    }

    /// psi_lam |x chi by the literal composition Ind_{NK}^G of
    /// psi~ . Inf_K^{NK}(chi); used to cross-check the closed form.
    pub fn semidirect_char_literal(&self, lam: &Code, chi: &ClassFunction) -> Result<ClassFunction> {
        let k_grp = chi.classes.group.clone();
        let ext = self.extend_character(lam, &k_grp)?;
        let nk_classes = ext.classes.clone();
        let nk = nk_classes.group.clone();
        let inf = ClassFunction::from_elem_fn(nk_classes.clone(), |i| {
            let (_, hc) = self.split.factor(nk.code(i));
            chi.value_at_code(&hc)
                .expect("H-part of an NK element lies in K")
                .clone()
        });
        ext.pointwise(&inf)?.induce(&self.g_classes)
    }

    /// Checks psi |x Ind_{K1}^{K2}(chi) = psi |x chi for nested
    /// subgroups of the inertia group.
    pub fn induction_compat_check(
        &self,
        lam: &Code,
        chi: &ClassFunction,
        k2_classes: &Arc<ConjClasses>,
    ) -> Result<bool> {
        let a = self.semidirect_char(lam, chi)?;
        let b = self.semidirect_char(lam, &chi.induce(k2_classes)?)?;
        Ok(a.values == b.values)
    }

    /// Mackey decomposition of a product of two semidirect characters:
    /// (psi1 |x chi1)(psi2 |x chi2) =
    /// sum_x (psi1^x psi2) |x (Res(chi1^x) . Res(chi2)), the sum over
    /// (K1, K2) double coset representatives x of H, with chi1^x living
    /// on K1^x = x^{-1} K1 x and the restrictions taken to K1^x /\ K2.
    pub fn mackey_product(
        &self,
        lam1: &Code,
        chi1: &ClassFunction,
        lam2: &Code,
        chi2: &ClassFunction,
    ) -> Result<MackeyExpansion> {
        let amb = self.amb().clone();
        let k1 = chi1.classes.group.clone();
        let k2 = chi2.classes.group.clone();
        let product = self
            .semidirect_char(lam1, chi1)?
            .pointwise(&self.semidirect_char(lam2, chi2)?)?;
        // Double coset reps K1 x K2 in H, least unvisited first.
        let mut visited = vec![false; self.h.order()];
        let mut reps = Vec::new();
        for xi in 0..self.h.order() {
            if visited[xi] {
                continue;
            }
            reps.push(xi);
            let xm = self.h.mat(xi);
            for ai in 0..k1.order() {
                let left = amb.mat_mul(k1.mat(ai), xm);
                for bi in 0..k2.order() {
                    let c = amb.code_of(&amb.mat_mul(&left, k2.mat(bi)));
                    visited[self.h.idx(&c).expect("double coset stays in H")] = true;
                }
            }
        }
        let lam2_c = self.ds_n.canon(lam2);
        let mut expansion = ClassFunction::zero(self.g_classes.clone());
        for &xi in &reps {
            let xm = self.h.mat(xi).clone();
            let xim = amb.mat_inv(&xm);
            // K1^x = x^{-1} K1 x and the conjugated character on it.
            let k1x_codes: Vec<Code> = (0..k1.order())
                .map(|i| amb.code_of(&amb.mat_mul(&amb.mat_mul(&xim, k1.mat(i)), &xm)))
                .collect();
            let k1x = Group::from_codes(amb.clone(), k1x_codes);
            let k1x_classes = ConjClasses::new(k1x.clone());
            let chi1x = chi1.conjugate(&xim, &k1x_classes)?;
            // Intersection K1^x /\ K2.
            let inter_codes: Vec<Code> = k1x
                .elems
                .iter()
                .filter(|c| k2.contains_code(c))
                .cloned()
                .collect();
            let inter = Group::from_codes(amb.clone(), inter_codes);
            let inter_classes = ConjClasses::new(inter);
            let res = chi1x
                .restrict(&inter_classes)?
                .pointwise(&chi2.restrict(&inter_classes)?)?;
            // psi1^x psi2 corresponds to lam1^x + lam2.
            let lam1x = conj_functional(&self.ds_n, lam1, &xm);
            let lam12: Code = lam1x
                .iter()
                .zip(lam2_c.iter())
                .map(|(&a, &b)| amb.field.add(a, b))
                .collect();
            expansion = expansion.add(&self.semidirect_char(&lam12, &res)?)?;
        }
        let agrees = product.values == expansion.values;
        Ok(MackeyExpansion {
            product,
            expansion,
            num_cosets: reps.len(),
            agrees,
        })
    }

    /// H_psi for the given lattice and strategy.
    pub fn h_psi(&self, lat: &LatticeDescriptor, strategy: Strategy, lam: &Code) -> Result<HPsi> {
        let hk_space = self.split.hk_group().lie_space();
        let hm_space = self.split.hm_group().lie_space();
        let zero = |s: &Subspace| Subspace::zero(s.p, s.ambient_dim);
        match strategy {
            Strategy::Minimal => {
                let lam_c = self.ds_n.canon(lam);
                if lam_c.iter().all(|&x| x == 0) {
                    Ok(HPsi {
                        kk: hk_space,
                        km: hm_space,
                    })
                } else {
                    Ok(HPsi {
                        kk: zero(&hk_space),
                        km: zero(&hm_space),
                    })
                }
            }
            Strategy::Maximal => match lat {
                LatticeDescriptor::IdealProduct => Ok(maximal_h_psi(&self.split, &self.ds_n, lam)),
                LatticeDescriptor::TwoSidedIdealProduct => {
                    let hp = maximal_h_psi(&self.split, &self.ds_n, lam);
                    Ok(HPsi {
                        kk: self.largest_two_sided(&hp.kk, &hk_space),
                        km: self.largest_two_sided(&hp.km, &hm_space),
                    })
                }
                LatticeDescriptor::Explicit(members) => self.explicit_maximal(members, lam),
            },
        }
    }

    /// Largest subspace of `start` closed under multiplication by the
    /// parent Lie algebra on both sides.
    fn largest_two_sided(&self, start: &Subspace, parent: &Subspace) -> Subspace {
        let amb = self.amb().clone();
        let mut maps: Vec<Box<dyn Fn(&[u8]) -> Vec<u8>>> = Vec::new();
        for row in &parent.rows {
            let m = amb.lie_of_code(&amb.fp_to_code(row));
            maps.push(Box::new(mult_map(amb.clone(), m.clone(), ActionSide::Left)));
            maps.push(Box::new(mult_map(amb.clone(), m, ActionSide::Right)));
        }
        crate::orbits::largest_invariant(start, &maps)
    }

    fn explicit_maximal(&self, members: &[(Subspace, Subspace)], lam: &Code) -> Result<HPsi> {
        let lam_c = self.ds_n.canon(lam);
        let inside: Vec<&(Subspace, Subspace)> = members
            .iter()
            .filter(|(kk, km)| {
                self.hpsi_elem_codes(&HPsi {
                    kk: kk.clone(),
                    km: km.clone(),
                })
                .iter()
                .all(|c| {
                    conj_functional(&self.ds_n, &lam_c, &self.amb().mat_of_code(c)) == lam_c
                })
            })
            .collect();
        let best = inside
            .iter()
            .max_by_key(|(kk, km)| kk.dim() + km.dim())
            .ok_or(Error::UnsupportedLattice)?;
        for (kk, km) in &inside {
            if !kk.is_subspace_of(&best.0) || !km.is_subspace_of(&best.1) {
                return Err(Error::UnsupportedLattice);
            }
        }
        Ok(HPsi {
            kk: best.0.clone(),
            km: best.1.clone(),
        })
    }

    /// Element codes of H_psi = K_k K_m (the factors commute, so codes
    /// add coordinatewise on disjoint supports).
    pub fn hpsi_elem_codes(&self, hp: &HPsi) -> Vec<Code> {
        let amb = self.amb();
        let ka: Vec<Code> = hp.kk.vectors().iter().map(|v| amb.fp_to_code(v)).collect();
        let kb: Vec<Code> = hp.km.vectors().iter().map(|v| amb.fp_to_code(v)).collect();
        let mut out = Vec::with_capacity(ka.len() * kb.len());
        for a in &ka {
            for b in &kb {
                out.push(merge_codes(a, b));
            }
        }
        out
    }

    pub fn hpsi_group(&self, hp: &HPsi) -> Arc<Group> {
        Group::from_codes(self.amb().clone(), self.hpsi_elem_codes(hp))
    }

    /// Certifies that a member is an ideal pair for the lattice family.
    fn lattice_member_check(&self, lat: &LatticeDescriptor, hp: &HPsi) -> Result<()> {
        let amb = self.amb();
        let hk_space = self.split.hk_group().lie_space();
        let hm_space = self.split.hm_group().lie_space();
        let two_sided = matches!(lat, LatticeDescriptor::TwoSidedIdealProduct);
        let ok_k = hp.kk.is_subspace_of(&hk_space)
            && mult_invariant(amb, &hp.kk, &hk_space, ActionSide::Right)
            && (!two_sided || mult_invariant(amb, &hp.kk, &hk_space, ActionSide::Left));
        let ok_m = hp.km.is_subspace_of(&hm_space)
            && mult_invariant(amb, &hp.km, &hm_space, ActionSide::Left)
            && (!two_sided || mult_invariant(amb, &hp.km, &hm_space, ActionSide::Right));
        if ok_k && ok_m {
            Ok(())
        } else {
            Err(Error::ValidationFailed {
                condition: "L3",
                detail: "lattice member is not an ideal pair".to_string(),
            })
        }
    }

    /// The supercharacter theory H_psi carries as a lattice member:
    /// the product of the one-sided ideal theories of its two factors.
    pub fn h_psi_sct(&self, hp: &HPsi) -> Result<SCTheory> {
        let sk = sct_ideal_space(&self.split.hk_group(), &hp.kk, Side::Right, self.cap)?;
        let sm = sct_ideal_space(&self.split.hm_group(), &hp.km, Side::Left, self.cap)?;
        Ok(product_sct_in_ambient(&self.split, &sk, &sm))
    }

    /// Executes the (H1)-(H4) checks for the H-map and the lattice
    /// membership checks for every H_psi it produces, over all of
    /// Irr(N) (not just orbit representatives).
    pub fn validate_hmap(&self, lat: &LatticeDescriptor, strategy: Strategy) -> Result<()> {
        if let LatticeDescriptor::Explicit(members) = lat {
            // (L1): top and bottom present.
            let hk_space = self.split.hk_group().lie_space();
            let hm_space = self.split.hm_group().lie_space();
            let has_top = members
                .iter()
                .any(|(a, b)| hk_space.is_subspace_of(a) && hm_space.is_subspace_of(b));
            let has_bottom = members.iter().any(|(a, b)| a.dim() == 0 && b.dim() == 0);
            if !has_top || !has_bottom {
                return Err(Error::ValidationFailed {
                    condition: "L1",
                    detail: "explicit lattice must contain H and the trivial subgroup"
                        .to_string(),
                });
            }
        }
        let amb = self.amb().clone();
        let mut all = self.ds_n.functionals(self.cap)?;
        all.sort_unstable();
        let mut codes_of: Vec<HashSet<Code>> = Vec::with_capacity(all.len());
        for lam in &all {
            let hp = self.h_psi(lat, strategy, lam)?;
            self.lattice_member_check(lat, &hp)?;
            codes_of.push(self.hpsi_elem_codes(&hp).into_iter().collect());
        }
        let lookup = |lam: &Code| -> usize {
            all.binary_search(&self.ds_n.canon(lam)).expect("functional")
        };
        for (li, lam) in all.iter().enumerate() {
            // (H3): the trivial character maps to H itself.
            if lam.iter().all(|&x| x == 0) && codes_of[li].len() != self.h.order() {
                return Err(Error::ValidationFailed {
                    condition: "H3",
                    detail: "H_{1_N} differs from H".to_string(),
                });
            }
            // (H1): H_psi normal in I_H(psi).
            let inertia = self.inertia_group(lam);
            for hi in 0..inertia.order() {
                let hm = inertia.mat(hi);
                let him = amb.mat_inv(hm);
                for c in &codes_of[li] {
                    let moved =
                        amb.code_of(&amb.mat_mul(&amb.mat_mul(&him, &amb.mat_of_code(c)), hm));
                    if !codes_of[li].contains(&moved) {
                        return Err(Error::ValidationFailed {
                            condition: "H1",
                            detail: format!("H_psi not normal in the inertia group (lam {:?})", lam),
                        });
                    }
                }
            }
            // (H2): H_{psi^h} = (H_psi)^h over all h in H.
            for hi in 0..self.h.order() {
                let hm = self.h.mat(hi);
                let him = amb.mat_inv(hm);
                let li2 = lookup(&conj_functional(&self.ds_n, lam, hm));
                let conj: HashSet<Code> = codes_of[li]
                    .iter()
                    .map(|c| amb.code_of(&amb.mat_mul(&amb.mat_mul(&him, &amb.mat_of_code(c)), hm)))
                    .collect();
                if conj != codes_of[li2] {
                    return Err(Error::ValidationFailed {
                        condition: "H2",
                        detail: format!("H_{{psi^h}} != (H_psi)^h (lam {:?}, h index {})", lam, hi),
                    });
                }
            }
        }
        // (H4): H_psi /\ H_phi contained in H_{psi phi}.
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let sum: Code = a
                    .iter()
                    .zip(b.iter())
                    .map(|(&x, &y)| amb.field.add(x, y))
                    .collect();
                let ls = lookup(&sum);
                if !codes_of[i]
                    .intersection(&codes_of[j])
                    .all(|c| codes_of[ls].contains(c))
                {
                    return Err(Error::ValidationFailed {
                        condition: "H4",
                        detail: format!("intersection escapes H_{{psi phi}} ({} , {})", i, j),
                    });
                }
            }
        }
        Ok(())
    }

    /// Builds the supercharacter theory SCh(L): supercharacters are
    /// psi |x chi over orbit representatives psi and the distinct
    /// inductions chi of the supercharacters of H_psi to I_H(psi);
    /// superclasses are the joint level sets of all supercharacters,
    /// refined against conjugacy classes.
    pub fn sch_build(&self, lat: &LatticeDescriptor, strategy: Strategy) -> Result<SCTheory> {
        self.validate_hmap(lat, strategy)?;
        let mut chars: Vec<ClassFunction> = Vec::new();
        let mut notes: Vec<String> = Vec::new();
        for lam in &self.orbit_reps()? {
            let hp = self.h_psi(lat, strategy, lam)?;
            let hsct = self.h_psi_sct(&hp)?;
            let i_classes = ConjClasses::new(self.inertia_group(lam));
            // S_psi with duplicate inductions merged.
            let mut s_psi: Vec<(ClassFunction, usize)> = Vec::new();
            for c in &hsct.chars {
                let ind = c.induce(&i_classes)?;
                match s_psi.iter_mut().find(|(e, _)| e.values == ind.values) {
                    Some((_, m)) => *m += 1,
                    None => s_psi.push((ind, 1)),
                }
            }
            for (chi, mult) in s_psi {
                chars.push(self.semidirect_char(lam, &chi)?);
                notes.push(if mult > 1 {
                    format!("raw (merged {} equal inductions)", mult)
                } else {
                    "raw".to_string()
                });
            }
        }
        let tag = match strategy {
            Strategy::Minimal => "little-groups (minimal)",
            Strategy::Maximal => "little-groups (maximal)",
        };
        chars_to_theory(&self.g_classes, chars, notes, tag)
    }

    /// Builds the little-groups theory with the maximal strategy on the
    /// ideal-product lattice and the two-sided orbit theory of the
    /// algebra group, compares them, and measures for every dual orbit
    /// the pair (|N H_m eta N H_k|, |G eta|): the two scalars in front
    /// of the respective supercharacters agree exactly when these
    /// sizes do.
    pub fn thm_equivalence(&self) -> Result<ThmReport> {
        let sch = self.sch_build(&LatticeDescriptor::IdealProduct, Strategy::Maximal)?;
        let alg = sct_algebra_group(&self.split.group, self.cap)?;
        let comparison = sct_compare(&sch, &alg)?;
        let pg = &self.split.group;
        let amb = pg.ambient.clone();
        let ds_g = DualSpace::from_arcs(amb, pg.arcs());
        let g_movers = pattern_movers(pg);
        let sub = |arcs: &[Vec<(usize, usize)>]| -> PatternGroup {
            let all: Vec<(usize, usize)> = arcs.iter().flatten().copied().collect();
            PatternGroup {
                ambient: pg.ambient.clone(),
                poset: PatternPoset::new(pg.poset.n, all),
            }
        };
        let nhm = pattern_movers(&sub(&[self.split.n_arcs.clone(), self.split.hm_arcs.clone()]));
        let nhk = pattern_movers(&sub(&[self.split.n_arcs.clone(), self.split.hk_arcs.clone()]));
        let mut orbit_sizes = Vec::new();
        for o in decompose_dual(&ds_g, &g_movers, &g_movers, self.cap)? {
            let two = orbit_two_sided(&ds_g, &nhm, o.rep(), &nhk, self.cap)?.len();
            let one = orbit_one_sided(&ds_g, &g_movers, o.rep(), ActionSide::Left, self.cap)?.len();
            orbit_sizes.push((two, one));
        }
        let all_sizes_equal = orbit_sizes.iter().all(|&(a, b)| a == b);
        Ok(ThmReport {
            comparison,
            orbit_sizes,
            all_sizes_equal,
        })
    }
}

/// Internal direct product of two supercharacter theories whose
/// carriers commute elementwise and have disjoint arc supports (the
/// two diagonal blocks of a split). Blocks multiply setwise and
/// characters multiply pointwise.
pub fn product_sct_in_ambient(
    split: &SemidirectSplit,
    sk: &SCTheory,
    sm: &SCTheory,
) -> SCTheory {
    let amb = split.group.ambient.clone();
    let gk = sk.group();
    let gm = sm.group();
    let mut codes = Vec::with_capacity(gk.order() * gm.order());
    for a in &gk.elems {
        for b in &gm.elems {
            codes.push(merge_codes(a, b));
        }
    }
    let grp = Group::from_codes(amb.clone(), codes);
    let classes = ConjClasses::new(grp.clone());
    let mut blocks = Vec::with_capacity(sk.blocks.len() * sm.blocks.len());
    for bk in &sk.blocks {
        for bm in &sm.blocks {
            let mut blk = Vec::with_capacity(bk.len() * bm.len());
            for &a in bk {
                for &b in bm {
                    let code = merge_codes(gk.code(a), gm.code(b));
                    blk.push(grp.idx(&code).expect("product element"));
                }
            }
            blocks.push(blk);
        }
    }
    // Split an element code into its two diagonal block parts.
    let k = split.k;
    let part = |code: &Code, lower: bool| -> Code {
        let mut out = vec![0; code.len()];
        for (a, &(i, j)) in amb.arcs.iter().enumerate() {
            let in_lower = i > k;
            let in_upper = j <= k;
            if (lower && in_lower) || (!lower && in_upper) {
                out[a] = code[a];
            } else {
                debug_assert!(in_lower || in_upper || code[a] == 0);
            }
        }
        out
    };
    let mut chars = Vec::with_capacity(sk.chars.len() * sm.chars.len());
    let mut notes = Vec::new();
    for ck in &sk.chars {
        for cm in &sm.chars {
            chars.push(ClassFunction::from_elem_fn(classes.clone(), |i| {
                let code = grp.code(i);
                let va = ck.value_at_code(&part(code, false)).expect("k-part");
                let vb = cm.value_at_code(&part(code, true)).expect("m-part");
                va.mul(vb)
            }));
            notes.push("raw".to_string());
        }
    }
    SCTheory::assemble(classes, blocks, chars, "ideal-product", notes)
}
