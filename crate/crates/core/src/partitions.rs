//! F_q-labelled set partitions and the coarsened supercharacter
//! theories SCT(n, k) of the unitriangular groups.
//!
//! An F_q set partition of [n] is a collection of labelled arcs
//! i -a- j (1 <= i < j <= n, a nonzero) with pairwise distinct left
//! endpoints and pairwise distinct right endpoints. These index both
//! the two-sided dual orbits and the superclasses of the algebra-group
//! theory of UT_n(F_q). Splitting the index range at a column k and
//! merging orbits that agree after two arc surgeries (one removing
//! crossing arcs that cover a nested arc, one removing nested arcs
//! covered by a crossing arc) produces a coarser supercharacter theory
//! SCT(n, k). The same theory arises from a little-groups construction
//! over the lattice of two-sided ideal pairs, with each member carrying
//! the product of the supernormal theories of its factors; both builds
//! are implemented and cross-asserted against each other.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::charfun::{ClassFunction, ConjClasses};
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::groups::{Code, Mat, PatternGroup, SemidirectSplit};
use crate::linalg::Subspace;
use crate::littlegroups::{
    chars_to_theory, product_sct_in_ambient, HPsi, LatticeDescriptor, SplitData, Strategy,
};
use crate::oracle::irr_table;
use crate::orbits::{orbit_element, orbit_two_sided, pattern_movers, DualSpace};
use crate::sct::{
    blocks_from_orbits, orbit_character, sct_algebra_group, sct_compare, sct_join,
    sct_supernormal_space, Comparison, SCTheory,
};

/// An F_q set partition of [n]: labelled arcs with distinct left
/// endpoints and distinct right endpoints, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqSetPartition {
    pub n: usize,
    /// Arcs (i, j, a) with 1 <= i < j <= n and a a nonzero field
    /// element, sorted lexicographically.
    pub arcs: Vec<(usize, usize, Fq)>,
}

impl FqSetPartition {
    pub fn new(n: usize, mut arcs: Vec<(usize, usize, Fq)>) -> Result<FqSetPartition> {
        arcs.sort_unstable();
        let bad = |d: String| Error::ValidationFailed {
            condition: "set partition",
            detail: d,
        };
        let mut lefts = vec![false; n + 1];
        let mut rights = vec![false; n + 1];
        for &(i, j, a) in &arcs {
            if i == 0 || j > n || i >= j {
                return Err(bad(format!("arc ({}, {}) out of range for n = {}", i, j, n)));
            }
            if a == 0 {
                return Err(bad(format!("arc ({}, {}) has label zero", i, j)));
            }
            if lefts[i] {
                return Err(bad(format!("repeated left endpoint {}", i)));
            }
            if rights[j] {
                return Err(bad(format!("repeated right endpoint {}", j)));
            }
            lefts[i] = true;
            rights[j] = true;
        }
        Ok(FqSetPartition { n, arcs })
    }

    pub fn empty(n: usize) -> FqSetPartition {
        FqSetPartition { n, arcs: Vec::new() }
    }

    /// The arc code of lambda = sum_a a e_{ij}^*, equally the arc code
    /// of the element g = 1 + sum_a a e_{ij} (both live on the same
    /// coordinates).
    fn code(&self, pg: &PatternGroup) -> Code {
        let amb = &pg.ambient;
        let mut c = vec![0 as Fq; amb.arc_count()];
        for &(i, j, a) in &self.arcs {
            c[amb.arc_index(i, j)] = a;
        }
        c
    }

    pub fn to_wire(&self, field: &Field) -> FqSetPartitionWire {
        FqSetPartitionWire {
            n: self.n,
            arcs: self
                .arcs
                .iter()
                .map(|&(i, j, a)| (i, j, field.coeffs(a)))
                .collect(),
        }
    }

    pub fn from_wire(wire: &FqSetPartitionWire, field: &Field) -> Result<FqSetPartition> {
        let arcs = wire
            .arcs
            .iter()
            .map(|(i, j, c)| (*i, *j, field.from_coeffs(c)))
            .collect();
        FqSetPartition::new(wire.n, arcs)
    }
}

/// Serialization form of an F_q set partition: labels are written as
/// coefficient vectors over the prime subfield (low degree first) so
/// the encoding does not depend on the field's internal element order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FqSetPartitionWire {
    pub n: usize,
    pub arcs: Vec<(usize, usize, Vec<u64>)>,
}

/// All F_q set partitions of [n] in lexicographic order of their
/// sorted arc lists. For n = 3, q = 2 there are 5 (the Bell number);
/// in general the count is sum over arc diagrams of (q-1)^{#arcs}.
pub fn enumerate_fq_set_partitions(
    n: usize,
    field: &Field,
    cap: u128,
) -> Result<Vec<FqSetPartition>> {
    // Candidate arc positions in lexicographic order.
    let mut positions = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            positions.push((i, j));
        }
    }
    let labels: Vec<Fq> = field.elements().filter(|&a| a != 0).collect();
    let mut out: Vec<FqSetPartition> = Vec::new();
    let mut current: Vec<(usize, usize, Fq)> = Vec::new();
    let mut used_l = vec![false; n + 1];
    let mut used_r = vec![false; n + 1];
    // Depth-first: emit the current partition, then extend it with any
    // admissible arc at a later position. Emitting a prefix before its
    // extensions keeps the stream lexicographic.
    struct Dfs<'a> {
        positions: &'a [(usize, usize)],
        labels: &'a [Fq],
        cap: u128,
        n: usize,
    }
    impl<'a> Dfs<'a> {
        fn run(
            &self,
            from: usize,
            current: &mut Vec<(usize, usize, Fq)>,
            used_l: &mut [bool],
            used_r: &mut [bool],
            out: &mut Vec<FqSetPartition>,
        ) -> Result<()> {
            if out.len() as u128 >= self.cap {
                return Err(Error::CapExceeded {
                    requested: out.len() as u128 + 1,
                    cap: self.cap,
                });
            }
            out.push(FqSetPartition {
                n: self.n,
                arcs: current.clone(),
            });
            for pi in from..self.positions.len() {
                let (i, j) = self.positions[pi];
                if used_l[i] || used_r[j] {
                    continue;
                }
                used_l[i] = true;
                used_r[j] = true;
                for &a in self.labels {
                    current.push((i, j, a));
                    self.run(pi + 1, current, used_l, used_r, out)?;
                    current.pop();
                }
                used_l[i] = false;
                used_r[j] = false;
            }
            Ok(())
        }
    }
    Dfs {
        positions: &positions,
        labels: &labels,
        cap,
        n,
    }
    .run(0, &mut current, &mut used_l, &mut used_r, &mut out)?;
    Ok(out)
}

/// Whether every crossing arc i-j (i <= k < j) avoids both kinds of
/// nested company: no arc i' -j' with i < i' < j' <= k and none with
/// k < i' < j' < j.
pub fn is_k_nonnesting(eta: &FqSetPartition, k: usize) -> bool {
    eta.arcs.iter().all(|&(i, j, _)| {
        if !(i <= k && k < j) {
            return true;
        }
        eta.arcs
            .iter()
            .all(|&(i2, j2, _)| !(i < i2 && j2 <= k && j2 > i2) && !(k < i2 && i2 < j2 && j2 < j))
    })
}

/// Removes every crossing arc that covers a nested arc: i-j is dropped
/// when some other arc i'-j' satisfies i < i' < j' <= k < j or
/// i <= k < i' < j' < j. Labels on the surviving arcs are kept.
pub fn eta_bar(eta: &FqSetPartition, k: usize) -> FqSetPartition {
    let arcs = eta
        .arcs
        .iter()
        .filter(|&&(i, j, _)| {
            !eta.arcs.iter().any(|&(i2, j2, _)| {
                (i < i2 && i2 < j2 && j2 <= k && k < j) || (i <= k && k < i2 && i2 < j2 && j2 < j)
            })
        })
        .copied()
        .collect();
    FqSetPartition { n: eta.n, arcs }
}

/// Removes every nested arc covered by a crossing arc: i-j is dropped
/// when some other arc i'-j' satisfies i' < i < j <= k < j' or
/// i' <= k < i < j < j'. Labels on the surviving arcs are kept.
pub fn eta_tilde(eta: &FqSetPartition, k: usize) -> FqSetPartition {
    let arcs = eta
        .arcs
        .iter()
        .filter(|&&(i, j, _)| {
            !eta.arcs.iter().any(|&(i2, j2, _)| {
                (i2 < i && i < j && j <= k && k < j2) || (i2 <= k && k < i && i < j && j < j2)
            })
        })
        .copied()
        .collect();
    FqSetPartition { n: eta.n, arcs }
}

/// The functional lambda_eta = sum_{i -a- j} a e_{ij}^* as an arc code
/// on the dual of ut_n.
pub fn eta_to_functional(pg: &PatternGroup, eta: &FqSetPartition) -> Code {
    eta.code(pg)
}

/// The group element g_eta = 1 + sum_{i -a- j} a e_{ij} as an arc code.
pub fn eta_to_element(pg: &PatternGroup, eta: &FqSetPartition) -> Code {
    eta.code(pg)
}

/// Which surgery merges the characters and which merges the classes
/// when coarsening the algebra-group theory to SCT(n, k). The two
/// surgeries are eta_bar (removes crossing arcs that cover a nested
/// arc) and eta_tilde (removes nested arcs covered by a crossing arc).
/// The little-groups cross-build and the closed value formula both
/// single out the tilde-to-characters, bar-to-classes coupling; the
/// other pairing fails the cross-assertion, so building with it only
/// makes sense for demonstrating that failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    CharsBarClassesTilde,
    CharsTildeClassesBar,
}

impl Coupling {
    pub fn tag(self) -> &'static str {
        match self {
            Coupling::CharsBarClassesTilde => "sct-nk (chars by bar, classes by tilde)",
            Coupling::CharsTildeClassesBar => "sct-nk (chars by tilde, classes by bar)",
        }
    }
}

/// Precomputed data for UT_n(F_q): the enumerated group, its conjugacy
/// classes, the dual of its Lie algebra, and the F_q set partitions
/// indexing its two-sided orbits.
pub struct NkContext {
    pub pg: PatternGroup,
    pub classes: Arc<ConjClasses>,
    pub ds: DualSpace,
    pub etas: Vec<FqSetPartition>,
    movers: Vec<Mat>,
    pub cap: u128,
}

impl NkContext {
    pub fn new(n: usize, field: Arc<Field>, cap: u128) -> Result<NkContext> {
        let pg = PatternGroup::ut(n, field.clone());
        let grp = pg.enumerate_with_cap(cap)?;
        let classes = ConjClasses::new(grp);
        let ds = DualSpace::from_arcs(pg.ambient.clone(), pg.arcs());
        let etas = enumerate_fq_set_partitions(n, &field, cap)?;
        let movers = pattern_movers(&pg);
        Ok(NkContext {
            pg,
            classes,
            ds,
            etas,
            movers,
            cap,
        })
    }

    pub fn n(&self) -> usize {
        self.pg.poset.n
    }

    /// The normalized supercharacter chi_eta: the plain orbit sum
    /// sum_{mu in G lambda_eta G} theta(mu(f(.))) without the usual
    /// one-sided scalar, so degrees add under orbit merging.
    pub fn chi_eta(&self, eta: &FqSetPartition) -> Result<ClassFunction> {
        let lam = eta_to_functional(&self.pg, eta);
        let orbit = orbit_two_sided(&self.ds, &self.movers, &lam, &self.movers, self.cap)?;
        Ok(orbit_character(
            &self.classes,
            &self.ds,
            &orbit,
            &BigRational::one(),
        ))
    }

    /// |G lambda_eta G|, which is also chi_eta(1).
    pub fn orbit_size(&self, eta: &FqSetPartition) -> Result<usize> {
        let lam = eta_to_functional(&self.pg, eta);
        Ok(orbit_two_sided(&self.ds, &self.movers, &lam, &self.movers, self.cap)?.len())
    }

    /// The superclass K_eta = {h : f(h) in G f(g_eta) G} as element
    /// indices into the enumerated group.
    pub fn class_block(&self, eta: &FqSetPartition) -> Result<Vec<usize>> {
        let code = eta_to_element(&self.pg, eta);
        let orbit = orbit_element(&self.pg.ambient, &self.movers, &code, &self.movers, self.cap)?;
        let blocks = blocks_from_orbits(&self.classes.group, std::slice::from_ref(&orbit));
        Ok(blocks.into_iter().next().unwrap())
    }

    /// SCT(n, k) built directly by merging the algebra-group theory
    /// along the two arc surgeries, with the stated coupling of
    /// surgeries to sides. For k = 0 or k = n no merging happens and
    /// either coupling gives the algebra-group theory.
    pub fn sct_nk_with(&self, k: usize, coupling: Coupling) -> Result<SCTheory> {
        if k > self.n() {
            return Err(Error::ValidationFailed {
                condition: "sct-nk split index",
                detail: format!("k = {} exceeds n = {}", k, self.n()),
            });
        }
        let mut char_groups: BTreeMap<FqSetPartition, Vec<usize>> = BTreeMap::new();
        let mut class_groups: BTreeMap<FqSetPartition, Vec<usize>> = BTreeMap::new();
        for (ei, eta) in self.etas.iter().enumerate() {
            let (ck, kk) = match coupling {
                Coupling::CharsBarClassesTilde => (eta_bar(eta, k), eta_tilde(eta, k)),
                Coupling::CharsTildeClassesBar => (eta_tilde(eta, k), eta_bar(eta, k)),
            };
            char_groups.entry(ck).or_default().push(ei);
            class_groups.entry(kk).or_default().push(ei);
        }
        let mut chars = Vec::with_capacity(char_groups.len());
        let mut notes = Vec::with_capacity(char_groups.len());
        for members in char_groups.values() {
            let mut acc = self.chi_eta(&self.etas[members[0]])?;
            for &ei in &members[1..] {
                acc = acc.add(&self.chi_eta(&self.etas[ei])?)?;
            }
            chars.push(acc);
            notes.push(if members.len() > 1 {
                format!("raw (sum of {} orbit characters)", members.len())
            } else {
                "raw".to_string()
            });
        }
        let mut blocks = Vec::with_capacity(class_groups.len());
        for members in class_groups.values() {
            let mut blk = Vec::new();
            for &ei in members {
                blk.extend(self.class_block(&self.etas[ei])?);
            }
            blocks.push(blk);
        }
        Ok(SCTheory::assemble(
            self.classes.clone(),
            blocks,
            chars,
            coupling.tag(),
            notes,
        ))
    }

    /// SCT(n, k) with the coupling that the little-groups cross-build
    /// validates (characters merged along the nested-arc-removing
    /// surgery, superclasses along the crossing-arc-removing one).
    pub fn sct_nk(&self, k: usize) -> Result<SCTheory> {
        self.sct_nk_with(k, Coupling::CharsTildeClassesBar)
    }

    /// The closed-form value of the merged supercharacter chi_{[eta]_k}
    /// on the superclass K_{[nu]_k}: zero when some arc i-j of eta and
    /// some arc i'-j' of nu sit in the nesting configuration
    /// i < i' < j' <= k < j or i <= k < i' < j' < j, and otherwise
    /// (chi_{[eta]_k}(1) / chi_eta(1)) chi_eta(g_nu).
    pub fn chi_nk_value(
        &self,
        eta: &FqSetPartition,
        nu: &FqSetPartition,
        k: usize,
    ) -> Result<Cyclotomic> {
        let conflict = eta.arcs.iter().any(|&(i, j, _)| {
            nu.arcs.iter().any(|&(i2, j2, _)| {
                (i < i2 && i2 < j2 && j2 <= k && k < j) || (i <= k && k < i2 && i2 < j2 && j2 < j)
            })
        });
        if conflict {
            return Ok(Cyclotomic::zero());
        }
        let chi = self.chi_eta(eta)?;
        let own = self.orbit_size(eta)?;
        let tilde = eta_tilde(eta, k);
        let mut merged = 0usize;
        for nu2 in &self.etas {
            if eta_tilde(nu2, k) == tilde {
                merged += self.orbit_size(nu2)?;
            }
        }
        let ratio = BigRational::new(merged.into(), own.into());
        let g_nu = eta_to_element(&self.pg, nu);
        let value = chi
            .value_at_code(&g_nu)
            .expect("g_nu lies in the enumerated group")
            .clone();
        Ok(value.scale(&ratio))
    }
}

/// H_psi for SCT(n, k) read off the support of the functional: with
/// rmin the least row and cmax the greatest column carrying a nonzero
/// coefficient of lambda, the k-side ideal is spanned by the arcs
/// (i, j) with j <= k and i < rmin and the m-side ideal by the arcs
/// with i > k and j > cmax. For lambda = 0 both sides are full.
pub fn nk_h_psi_display(split: &SemidirectSplit, ds_n: &DualSpace, lam: &Code) -> HPsi {
    let amb = &ds_n.ambient;
    let lam_c = ds_n.canon(lam);
    let mut rmin = usize::MAX;
    let mut cmax = 0usize;
    for (a, &(i, j)) in amb.arcs.iter().enumerate() {
        if lam_c[a] != 0 {
            rmin = rmin.min(i);
            cmax = cmax.max(j);
        }
    }
    let fp_rows = |chosen: Vec<(usize, usize)>| -> Vec<Vec<u8>> {
        let k = amb.field.k;
        let mut rows = Vec::new();
        for (i, j) in chosen {
            let a = amb.arc_index(i, j);
            for t in 0..k {
                let mut v = vec![0u8; amb.fp_dim()];
                v[a * k + t] = 1;
                rows.push(v);
            }
        }
        rows
    };
    let kk_arcs: Vec<(usize, usize)> = split
        .hk_arcs
        .iter()
        .copied()
        .filter(|&(i, _)| i < rmin)
        .collect();
    let km_arcs: Vec<(usize, usize)> = split
        .hm_arcs
        .iter()
        .copied()
        .filter(|&(_, j)| j > cmax)
        .collect();
    let p = amb.field.p;
    let d = amb.fp_dim();
    HPsi {
        kk: Subspace::new(p, d, fp_rows(kk_arcs)),
        km: Subspace::new(p, d, fp_rows(km_arcs)),
    }
}

/// The maximal two-sided-ideal-pair H_psi, computed from the
/// stabilizer subspaces by shrinking each factor to its largest
/// two-sided ideal.
pub fn nk_h_psi(sd: &SplitData, lam: &Code) -> Result<HPsi> {
    sd.h_psi(&LatticeDescriptor::TwoSidedIdealProduct, Strategy::Maximal, lam)
}

/// SCT(n, k) built by little groups over the two-sided ideal-pair
/// lattice: each H_psi carries the product of the supernormal theories
/// of its factors; the supercharacters are psi |x chi over the distinct
/// inductions chi of those theories' supercharacters to the inertia
/// group, and the superclasses are their joint level sets.
pub fn sct_nk_littlegroups(
    n: usize,
    k: usize,
    field: Arc<Field>,
    cap: u128,
) -> Result<SCTheory> {
    let pg = PatternGroup::ut(n, field);
    let sd = SplitData::new(&pg, k, cap)?;
    let lat = LatticeDescriptor::TwoSidedIdealProduct;
    sd.validate_hmap(&lat, Strategy::Maximal)?;
    let mut chars: Vec<ClassFunction> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    for lam in &sd.orbit_reps()? {
        let hp = sd.h_psi(&lat, Strategy::Maximal, lam)?;
        let sk = sct_supernormal_space(&sd.split.hk_group(), &hp.kk, cap)?;
        let sm = sct_supernormal_space(&sd.split.hm_group(), &hp.km, cap)?;
        let hsct = product_sct_in_ambient(&sd.split, &sk, &sm);
        let i_classes = ConjClasses::new(sd.inertia_group(lam));
        let mut s_psi: Vec<(ClassFunction, usize)> = Vec::new();
        for c in &hsct.chars {
            let ind = c.induce(&i_classes)?;
            match s_psi.iter_mut().find(|(e, _)| e.values == ind.values) {
                Some((_, m)) => *m += 1,
                None => s_psi.push((ind, 1)),
            }
        }
        for (chi, mult) in s_psi {
            chars.push(sd.semidirect_char(lam, &chi)?);
            notes.push(if mult > 1 {
                format!("raw (merged {} equal inductions)", mult)
            } else {
                "raw".to_string()
            });
        }
    }
    chars_to_theory(&sd.g_classes, chars, notes, "sct-nk (little groups)")
}

/// SCT(n, k), built two independent ways and cross-asserted: the
/// direct orbit-merging build is compared against the little-groups
/// build (against the plain algebra-group theory when k = 0 or k = n,
/// where no split exists) and returned only if the two agree.
pub fn sct_nk(n: usize, k: usize, field: Arc<Field>, cap: u128) -> Result<SCTheory> {
    let ctx = NkContext::new(n, field.clone(), cap)?;
    let s = ctx.sct_nk(k)?;
    let other = if k == 0 || k == n {
        sct_algebra_group(&ctx.pg, cap)?
    } else {
        sct_nk_littlegroups(n, k, field, cap)?
    };
    match sct_compare(&s, &other)? {
        Comparison::Equal => Ok(s),
        c => Err(Error::ValidationFailed {
            condition: "sct-nk cross-build",
            detail: format!("direct and little-groups builds disagree: {:?}", c),
        }),
    }
}

/// SCT(n, S) for a nonempty set S of split indices: the join of the
/// theories SCT(n, k) over k in S. A singleton needs no join; larger
/// sets use the character-table oracle to merge constituent sets.
pub fn sct_ns(n: usize, s: &[usize], field: Arc<Field>, cap: u128) -> Result<SCTheory> {
    let mut ks: Vec<usize> = s.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return Err(Error::ValidationFailed {
            condition: "sct-nS split set",
            detail: "S must be nonempty".to_string(),
        });
    }
    let ctx = NkContext::new(n, field, cap)?;
    let mut acc = ctx.sct_nk(ks[0])?;
    if ks.len() > 1 {
        let table = irr_table(&ctx.classes)?;
        for &k in &ks[1..] {
            acc = sct_join(&acc, &ctx.sct_nk(k)?, &table)?;
        }
    }
    Ok(acc)
}
