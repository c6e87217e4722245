//! Supercharacter theories: construction, verification, comparison.
//!
//! A supercharacter theory of a finite group G is a pair (X, K) where
//! K is a partition of G, X is a set of characters with |X| = |K|,
//! every character in X is constant on every block of K, and every
//! irreducible character of G is a constituent of exactly one member
//! of X. Constructors here cover algebra groups (two-sided orbit
//! theory), one-sided ideal subgroups, supernormal two-sided ideals,
//! conjugation actions on normal subgroups, direct products, star
//! products along a quotient, and joins.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::charfun::{ClassFunction, ConjClasses, QuotientMap};
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::groups::{Code, Group, IdealSubgroup, PatternGroup, Side};
use crate::linalg::Subspace;
use crate::oracle::{constituent_partition, irr_table, IrrTable};
use crate::orbits::{
    decompose_dual, group_movers, mult_invariant, orbit_one_sided, orbit_two_sided,
    pair_fp, pattern_movers, superclasses, ActionSide, DualSpace, LinearSubgroup, Orbit,
};

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A supercharacter theory of an enumerated group.
#[derive(Debug, Clone)]
pub struct SCTheory {
    pub classes: Arc<ConjClasses>,
    /// Partition of the element indices; blocks sorted by least
    /// element, members sorted.
    pub blocks: Vec<Vec<usize>>,
    /// One supercharacter per block count, sorted by (degree, values).
    pub chars: Vec<ClassFunction>,
    /// Construction tag and parameters, for reporting.
    pub provenance: String,
    /// Per-character normalization note (same order as `chars`).
    pub norm_notes: Vec<String>,
}

/// Result of comparing two supercharacter theories of the same group
/// in the refinement order on superclass partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Comparison {
    Equal,
    /// The first theory's partition strictly refines the second's.
    StrictlyFiner,
    /// The second theory's partition strictly refines the first's.
    StrictlyCoarser,
    Incomparable,
}

fn char_sort_key(c: &ClassFunction) -> (BigRational, Vec<String>) {
    let deg = c
        .degree()
        .as_rational()
        .unwrap_or_else(BigRational::zero);
    (deg, c.values.iter().map(|v| v.render()).collect())
}

impl SCTheory {
    /// Assembles a theory in canonical order: blocks sorted by least
    /// element, characters by (degree, rendered values) with their
    /// normalization notes kept aligned.
    pub fn assemble(
        classes: Arc<ConjClasses>,
        mut blocks: Vec<Vec<usize>>,
        chars: Vec<ClassFunction>,
        provenance: &str,
        norm_notes: Vec<String>,
    ) -> SCTheory {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let mut paired: Vec<(ClassFunction, String)> =
            chars.into_iter().zip(norm_notes.into_iter()).collect();
        paired.sort_by_key(|(c, _)| char_sort_key(c));
        let (chars, norm_notes): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
        SCTheory {
            classes,
            blocks,
            chars,
            provenance: provenance.to_string(),
            norm_notes,
        }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.classes.group
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Element index -> block index.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.group().order()];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x] = bi;
            }
        }
        out
    }
}

fn carrier_eq(a: &ConjClasses, b: &ConjClasses) -> bool {
    Arc::ptr_eq(&a.group, &b.group) || a.group.elems == b.group.elems
}

fn raw_notes(n: usize) -> Vec<String> {
    vec!["raw".to_string(); n]
}

/// Element-code orbits -> index blocks over an enumerated group.
pub(crate) fn blocks_from_orbits(group: &Group, orbits: &[Orbit]) -> Vec<Vec<usize>> {
    orbits
        .iter()
        .map(|o| {
            o.points
                .iter()
                .map(|c| group.idx(c).expect("orbit point outside group"))
                .collect()
        })
        .collect()
}

/// The supercharacter attached to a dual orbit O with a rational
/// scalar s: value at g is s * sum_{mu in O} zeta_p^{mu(f(g))}, where
/// mu(x) = Tr(sum_a mu_a x_a) in Z_p. The sum is collected as residue
/// counts so only p cyclotomic additions happen per class.
pub(crate) fn orbit_character(
    classes: &Arc<ConjClasses>,
    ds: &DualSpace,
    orbit: &Orbit,
    scalar: &BigRational,
) -> ClassFunction {
    let amb = &ds.ambient;
    let p = amb.field.p;
    let roots: Vec<Cyclotomic> = (0..p).map(|t| Cyclotomic::root_of_unity(p, t)).collect();
    let group = &classes.group;
    let values = classes
        .classes
        .iter()
        .map(|cl| {
            let code = group.code(cl[0]);
            let mut counts = vec![0u64; p as usize];
            for mu in &orbit.points {
                counts[pair_fp(amb, mu, code) as usize] += 1;
            }
            let mut acc = Cyclotomic::zero();
            for (t, &c) in counts.iter().enumerate() {
                if c > 0 {
                    acc = acc.add(&roots[t].scale(&BigRational::from_integer(BigInt::from(c))));
                }
            }
            acc.scale(scalar)
        })
        .collect();
    ClassFunction::from_class_values(classes.clone(), values)
}

/// The algebra-group supercharacter theory of a pattern group
/// G = 1 + g: superclasses K_x = {y : f(y) in G f(x) G} and
/// supercharacters chi_lambda = (|G lambda| / |G lambda G|)
/// sum_{mu in G lambda G} theta(mu(f(.))) as lambda runs over orbit
/// representatives of the dual.
pub fn sct_algebra_group(pg: &PatternGroup, cap: u128) -> Result<SCTheory> {
    let grp = pg.enumerate_with_cap(cap)?;
    let classes = ConjClasses::new(grp.clone());
    let movers = pattern_movers(pg);
    let scls = superclasses(&grp, &movers, &movers)?;
    let blocks = blocks_from_orbits(&grp, &scls);
    let ds = DualSpace::from_arcs(pg.ambient.clone(), pg.arcs());
    let orbits = decompose_dual(&ds, &movers, &movers, cap)?;
    let mut chars = Vec::with_capacity(orbits.len());
    for o in &orbits {
        let left = orbit_one_sided(&ds, &movers, o.rep(), ActionSide::Left, cap)?;
        let scalar = ratio(left.len(), o.len());
        chars.push(orbit_character(&classes, &ds, o, &scalar));
    }
    let n = chars.len();
    Ok(SCTheory::assemble(
        classes,
        blocks,
        chars,
        "algebra-group",
        raw_notes(n),
    ))
}

/// The supercharacter theory of a one-sided ideal subgroup H of G.
/// For a left ideal (gh contained in h): K_x = {y in H : f(y) in
/// G f(x) H} and chi_lambda = (|G lambda| / |G lambda H|)
/// sum_{mu in G lambda H} theta(mu(f(.))); mirrored for right ideals.
/// A two-sided ideal uses the left-ideal form.
pub fn sct_ideal(ideal: &IdealSubgroup, cap: u128) -> Result<SCTheory> {
    sct_ideal_space(
        &ideal.parent,
        &ideal.as_pattern_group().lie_space(),
        ideal.side,
        cap,
    )
}

/// The ideal-subgroup supercharacter theory for an ideal given as an
/// arbitrary F_p subspace of the parent's Lie algebra (ideal subgroups
/// need not be spanned by arcs).
pub fn sct_ideal_space(
    parent: &PatternGroup,
    space: &Subspace,
    side: Side,
    cap: u128,
) -> Result<SCTheory> {
    let amb = parent.ambient.clone();
    let parent_lie = parent.lie_space();
    let check = |act: ActionSide, name: &'static str| -> Result<()> {
        if mult_invariant(&amb, space, &parent_lie, act) {
            Ok(())
        } else {
            Err(Error::NotAnIdeal {
                side: name,
                witness: (0, 0, 0, 0),
            })
        }
    };
    match side {
        Side::Left => check(ActionSide::Left, "left")?,
        Side::Right => check(ActionSide::Right, "right")?,
        Side::TwoSided => {
            check(ActionSide::Left, "left")?;
            check(ActionSide::Right, "right")?;
        }
    }
    let grp = LinearSubgroup::new(amb.clone(), space.clone()).enumerate(cap)?;
    let classes = ConjClasses::new(grp.clone());
    let g_movers = pattern_movers(parent);
    let h_movers = group_movers(&grp);
    // Mover sides and the one-sided scalar numerator follow the ideal
    // side; two-sided ideals use the left-ideal convention.
    let (left, right, numer_side) = match side {
        Side::Right => (&h_movers, &g_movers, ActionSide::Right),
        Side::Left | Side::TwoSided => (&g_movers, &h_movers, ActionSide::Left),
    };
    let scls = superclasses(&grp, left, right)?;
    let blocks = blocks_from_orbits(&grp, &scls);
    let ds = DualSpace::from_space(amb, space.clone());
    let orbits = decompose_dual(&ds, left, right, cap)?;
    let mut chars = Vec::with_capacity(orbits.len());
    for o in &orbits {
        let one_sided = orbit_one_sided(&ds, &g_movers, o.rep(), numer_side, cap)?;
        let scalar = ratio(one_sided.len(), o.len());
        chars.push(orbit_character(&classes, &ds, o, &scalar));
    }
    let n = chars.len();
    Ok(SCTheory::assemble(
        classes,
        blocks,
        chars,
        "ideal-subgroup",
        raw_notes(n),
    ))
}

/// A single ideal-theory supercharacter for a chosen functional, used
/// for conjugation-covariance checks: (chi_lambda)^g = chi_{lambda^g}.
pub fn ideal_supercharacter(
    ideal: &IdealSubgroup,
    classes: &Arc<ConjClasses>,
    lam: &Code,
    cap: u128,
) -> Result<ClassFunction> {
    let parent = &ideal.parent;
    let hpg = ideal.as_pattern_group();
    let g_movers = pattern_movers(parent);
    let h_movers = pattern_movers(&hpg);
    let ds = DualSpace::from_arcs(parent.ambient.clone(), &ideal.arcs);
    let (orbit, one_sided) = match ideal.side {
        Side::Right => (
            orbit_two_sided(&ds, &h_movers, lam, &g_movers, cap)?,
            orbit_one_sided(&ds, &g_movers, lam, ActionSide::Right, cap)?,
        ),
        Side::Left | Side::TwoSided => (
            orbit_two_sided(&ds, &g_movers, lam, &h_movers, cap)?,
            orbit_one_sided(&ds, &g_movers, lam, ActionSide::Left, cap)?,
        ),
    };
    let scalar = ratio(one_sided.len(), orbit.len());
    Ok(orbit_character(classes, &ds, &orbit, &scalar))
}

/// The supernormal supercharacter theory of a two-sided ideal
/// subgroup K of G: superclasses K_x = {y in K : f(y) in G f(x) G}
/// and unscaled supercharacters chi_lambda =
/// sum_{mu in G lambda G} theta(mu(f(.))).
pub fn sct_supernormal(ideal: &IdealSubgroup, cap: u128) -> Result<SCTheory> {
    // Revalidate as two-sided regardless of the tag the ideal carries.
    let ideal = IdealSubgroup::new(&ideal.parent, Side::TwoSided, ideal.arcs.clone())?;
    let parent = &ideal.parent;
    let hpg = ideal.as_pattern_group();
    let grp = hpg.enumerate_with_cap(cap)?;
    let classes = ConjClasses::new(grp.clone());
    let g_movers = pattern_movers(parent);
    let scls = superclasses(&grp, &g_movers, &g_movers)?;
    let blocks = blocks_from_orbits(&grp, &scls);
    let ds = DualSpace::from_arcs(parent.ambient.clone(), &ideal.arcs);
    let orbits = decompose_dual(&ds, &g_movers, &g_movers, cap)?;
    let one = BigRational::one();
    let chars: Vec<ClassFunction> = orbits
        .iter()
        .map(|o| orbit_character(&classes, &ds, o, &one))
        .collect();
    let n = chars.len();
    Ok(SCTheory::assemble(
        classes,
        blocks,
        chars,
        "supernormal",
        raw_notes(n),
    ))
}

/// The supernormal theory for a two-sided ideal given as an arbitrary
/// F_p subspace of the parent's Lie algebra (the stabilizer subspaces
/// arising in little-groups constructions need not be arc-spanned).
pub fn sct_supernormal_space(
    parent: &PatternGroup,
    space: &Subspace,
    cap: u128,
) -> Result<SCTheory> {
    let amb = parent.ambient.clone();
    let parent_lie = parent.lie_space();
    for (act, name) in [(ActionSide::Left, "left"), (ActionSide::Right, "right")] {
        if !mult_invariant(&amb, space, &parent_lie, act) {
            return Err(Error::NotAnIdeal {
                side: name,
                witness: (0, 0, 0, 0),
            });
        }
    }
    let grp = LinearSubgroup::new(amb.clone(), space.clone()).enumerate(cap)?;
    let classes = ConjClasses::new(grp.clone());
    let g_movers = pattern_movers(parent);
    let scls = superclasses(&grp, &g_movers, &g_movers)?;
    let blocks = blocks_from_orbits(&grp, &scls);
    let ds = DualSpace::from_space(amb, space.clone());
    let orbits = decompose_dual(&ds, &g_movers, &g_movers, cap)?;
    let one = BigRational::one();
    let chars: Vec<ClassFunction> = orbits
        .iter()
        .map(|o| orbit_character(&classes, &ds, o, &one))
        .collect();
    let n = chars.len();
    Ok(SCTheory::assemble(
        classes,
        blocks,
        chars,
        "supernormal",
        raw_notes(n),
    ))
}

fn cf_values_equal(a: &ClassFunction, b: &ClassFunction) -> bool {
    a.values.len() == b.values.len()
        && a.values.iter().zip(b.values.iter()).all(|(x, y)| x == y)
}

/// The supercharacter theory of a normal subgroup N of G induced by
/// conjugation: superclasses are the G-conjugation orbits on N and
/// supercharacters are the orbit sums of Irr(N) under the conjugation
/// action of G on characters.
pub fn sct_conjugation(g_classes: &Arc<ConjClasses>, n: &Arc<Group>) -> Result<SCTheory> {
    let g = &g_classes.group;
    if !n.is_subgroup_of(g) {
        return Err(Error::NotSubgroup("conjugation target"));
    }
    let gens: Vec<usize> = g.generators().to_vec();
    // Normality check and element orbits in one sweep.
    let n_idx_in_g: Vec<usize> = n
        .elems
        .iter()
        .map(|c| g.idx(c).expect("subgroup element"))
        .collect();
    let g_to_n: std::collections::HashMap<usize, usize> = n_idx_in_g
        .iter()
        .enumerate()
        .map(|(ni, &gi)| (gi, ni))
        .collect();
    let mut block_of = vec![usize::MAX; n.order()];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for start in 0..n.order() {
        if block_of[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        block_of[start] = id;
        let mut frontier = vec![start];
        while let Some(x) = frontier.pop() {
            for &gen in &gens {
                let y_g = g.conj_idx(n_idx_in_g[x], gen);
                let y = *g_to_n.get(&y_g).ok_or(Error::NotNormal)?;
                if block_of[y] == usize::MAX {
                    block_of[y] = id;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        blocks.push(members);
    }
    // Character orbits under the same action.
    let n_classes = ConjClasses::new(n.clone());
    let table = irr_table(&n_classes)?;
    let gen_mats = group_movers(g);
    let find = |cf: &ClassFunction| -> usize {
        table
            .chars
            .iter()
            .position(|c| cf_values_equal(c, cf))
            .expect("conjugate of an irreducible is irreducible")
    };
    let mut char_block = vec![usize::MAX; table.chars.len()];
    let mut chars = Vec::new();
    for start in 0..table.chars.len() {
        if char_block[start] != usize::MAX {
            continue;
        }
        let id = chars.len();
        char_block[start] = id;
        let mut members = vec![start];
        let mut frontier = vec![start];
        while let Some(x) = frontier.pop() {
            for m in &gen_mats {
                let moved = table.chars[x].conjugate(m, &n_classes)?;
                let y = find(&moved);
                if char_block[y] == usize::MAX {
                    char_block[y] = id;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        let mut sum = ClassFunction::zero(n_classes.clone());
        for &i in &members {
            sum = sum.add(&table.chars[i])?;
        }
        chars.push(sum);
    }
    let n_chars = chars.len();
    Ok(SCTheory::assemble(
        n_classes,
        blocks,
        chars,
        "conjugation",
        raw_notes(n_chars),
    ))
}

/// The finest supercharacter theory: conjugacy classes and the
/// irreducible characters themselves.
pub fn sct_finest(table: &IrrTable) -> SCTheory {
    let classes = table.classes.clone();
    let blocks: Vec<Vec<usize>> = classes.classes.clone();
    let chars = table.chars.clone();
    let n = chars.len();
    SCTheory::assemble(classes, blocks, chars, "finest", raw_notes(n))
}

/// The coarsest supercharacter theory: blocks {1} and G - {1},
/// characters 1 and (regular - 1).
pub fn sct_coarsest(classes: &Arc<ConjClasses>) -> SCTheory {
    let order = classes.group.order();
    let one = ClassFunction::one(classes.clone());
    if order == 1 {
        return SCTheory::assemble(
            classes.clone(),
            vec![vec![0]],
            vec![one],
            "coarsest",
            raw_notes(1),
        );
    }
    let rho = ClassFunction::regular(classes.clone());
    let rest = rho.sub(&one).expect("same group");
    let blocks = vec![vec![0], (1..order).collect()];
    SCTheory::assemble(
        classes.clone(),
        blocks,
        vec![one, rest],
        "coarsest",
        raw_notes(2),
    )
}

/// The direct-product supercharacter theory on M x N: blocks A x B
/// and characters chi x psi.
pub fn sct_direct_product(s1: &SCTheory, s2: &SCTheory) -> SCTheory {
    let a = s1.group();
    let b = s2.group();
    let nb = b.order();
    let prod = Group::direct_product(a, b);
    let classes = ConjClasses::new(prod);
    let mut blocks = Vec::with_capacity(s1.blocks.len() * s2.blocks.len());
    for ba in &s1.blocks {
        for bb in &s2.blocks {
            let mut blk = Vec::with_capacity(ba.len() * bb.len());
            for &ia in ba {
                for &ib in bb {
                    blk.push(ia * nb + ib);
                }
            }
            blocks.push(blk);
        }
    }
    let mut chars = Vec::with_capacity(s1.chars.len() * s2.chars.len());
    for ca in &s1.chars {
        for cb in &s2.chars {
            let cf = ClassFunction::from_elem_fn(classes.clone(), |i| {
                ca.value_at_elem(i / nb).mul(cb.value_at_elem(i % nb))
            });
            chars.push(cf);
        }
    }
    let n = chars.len();
    SCTheory::assemble(classes, blocks, chars, "direct-product", raw_notes(n))
}

/// The star product along 1 -> N -> G -> Q -> 1 of a G-invariant
/// theory of N and any theory of Q: blocks are the N-theory blocks
/// together with the preimages of the non-identity Q-blocks;
/// characters are the inflations of the Q-theory characters together
/// with the inductions of the nontrivial N-theory characters.
pub fn sct_star_product(
    qm: &QuotientMap,
    s_n: &SCTheory,
    s_q: &SCTheory,
) -> Result<SCTheory> {
    let big = &qm.big;
    let g = &big.group;
    if !carrier_eq(&s_q.classes, &qm.small) {
        return Err(Error::GroupMismatch);
    }
    let n_grp = s_n.group();
    if !n_grp.is_subgroup_of(g) {
        return Err(Error::NotSubgroup("star-product normal factor"));
    }
    // The kernel of the projection must be exactly N.
    let kernel: HashSet<&Code> = (0..g.order())
        .filter(|&i| qm.elem_map[i] == 0)
        .map(|i| g.code(i))
        .collect();
    if kernel.len() != n_grp.order() || !n_grp.elems.iter().all(|c| kernel.contains(c)) {
        return Err(Error::GroupMismatch);
    }
    // G-invariance: every N-block is closed under conjugation by G.
    let n_blocks_in_g: Vec<Vec<usize>> = s_n
        .blocks
        .iter()
        .map(|b| {
            b.iter()
                .map(|&i| g.idx(n_grp.code(i)).expect("subgroup element"))
                .collect()
        })
        .collect();
    let mut block_id = vec![usize::MAX; g.order()];
    for (bi, b) in n_blocks_in_g.iter().enumerate() {
        for &x in b {
            block_id[x] = bi;
        }
    }
    for b in &n_blocks_in_g {
        for &x in b {
            for &gen in g.generators() {
                let y = g.conj_idx(x, gen);
                if block_id[y] == usize::MAX || block_id[y] != block_id[x] {
                    return Err(Error::NotInvariant);
                }
            }
        }
    }
    // The identity must be a singleton block of the quotient theory.
    let q_id_block = s_q
        .blocks
        .iter()
        .position(|b| b.contains(&0))
        .expect("partition covers the identity");
    if s_q.blocks[q_id_block] != vec![0] {
        return Err(Error::ValidationFailed {
            condition: "star-product quotient theory",
            detail: "identity block of the quotient theory is not a singleton".to_string(),
        });
    }
    let mut blocks = n_blocks_in_g;
    for (bi, b) in s_q.blocks.iter().enumerate() {
        if bi == q_id_block {
            continue;
        }
        let members: HashSet<usize> = b.iter().copied().collect();
        blocks.push(
            (0..g.order())
                .filter(|&i| members.contains(&qm.elem_map[i]))
                .collect(),
        );
    }
    // The unique N-theory character containing the trivial character.
    let one_n = ClassFunction::one(s_n.classes.clone());
    let mut trivial_idx = None;
    for (i, c) in s_n.chars.iter().enumerate() {
        if !c.inner(&one_n)?.is_zero() {
            if trivial_idx.is_some() {
                return Err(Error::ValidationFailed {
                    condition: "star-product normal theory",
                    detail: "trivial character appears in more than one supercharacter"
                        .to_string(),
                });
            }
            trivial_idx = Some(i);
        }
    }
    let trivial_idx = trivial_idx.ok_or(Error::ValidationFailed {
        condition: "star-product normal theory",
        detail: "no supercharacter contains the trivial character".to_string(),
    })?;
    let mut chars = Vec::new();
    let mut notes = Vec::new();
    for c in &s_q.chars {
        chars.push(qm.inflate(c)?);
        notes.push("inflated".to_string());
    }
    // Induction needs the N characters re-based on classes of N as a
    // subgroup sharing G's carrier; s_n already is such.
    for (i, c) in s_n.chars.iter().enumerate() {
        if i == trivial_idx {
            continue;
        }
        chars.push(c.induce(big)?);
        notes.push("induced".to_string());
    }
    Ok(SCTheory::assemble(
        big.clone(),
        blocks,
        chars,
        "star-product",
        notes,
    ))
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[rb] = ra;
        }
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut map = std::collections::HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            let id = *map.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[id].push(x);
        }
        out
    }
}

fn merge_partition(dsu: &mut Dsu, blocks: &[Vec<usize>]) {
    for b in blocks {
        for &x in &b[1..] {
            dsu.union(b[0], x);
        }
    }
}

/// The join: the finest supercharacter theory coarser than both
/// inputs. Superclasses come from transitive merging of the two block
/// partitions; supercharacters are rebuilt from the irreducible
/// character table by the same merging on constituent sets, each
/// block Z contributing sigma_Z = sum_{psi in Z} psi(1) psi.
pub fn sct_join(s1: &SCTheory, s2: &SCTheory, table: &IrrTable) -> Result<SCTheory> {
    if !carrier_eq(&s1.classes, &s2.classes) || !carrier_eq(&s1.classes, &table.classes) {
        return Err(Error::GroupMismatch);
    }
    let mut dsu = Dsu::new(s1.group().order());
    merge_partition(&mut dsu, &s1.blocks);
    merge_partition(&mut dsu, &s2.blocks);
    let blocks = dsu.groups();

    let (sets1, _) = constituent_partition(&s1.chars, table)?;
    let (sets2, _) = constituent_partition(&s2.chars, table)?;
    let mut cdsu = Dsu::new(table.chars.len());
    merge_partition(&mut cdsu, &sets1);
    merge_partition(&mut cdsu, &sets2);
    let char_blocks = cdsu.groups();
    let mut chars = Vec::with_capacity(char_blocks.len());
    for z in &char_blocks {
        let mut sum = ClassFunction::zero(s1.classes.clone());
        for &i in z {
            let psi = &table.chars[i];
            let d = psi
                .degree()
                .as_rational()
                .expect("irreducible degree is rational");
            sum = sum.add(&psi.scale(&d))?;
        }
        chars.push(sum);
    }
    let notes = vec!["sigma-normalized".to_string(); chars.len()];
    Ok(SCTheory::assemble(
        s1.classes.clone(),
        blocks,
        chars,
        "join",
        notes,
    ))
}

/// Row-reduces a matrix over the cyclotomics in place; returns the
/// pivot columns (one per nonzero row, rows reordered to echelon).
fn rref_cyc(rows: &mut Vec<Vec<Cyclotomic>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].inv();
        for v in rows[rank].iter_mut() {
            if !v.is_zero() {
                *v = v.mul(&inv);
            }
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let c = rows[r][col].clone();
                for j in 0..ncols {
                    if !rows[rank][j].is_zero() {
                        let t = rows[rank][j].mul(&c);
                        rows[r][j] = rows[r][j].sub(&t);
                    }
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    pivots
}

fn in_span(rows: &[Vec<Cyclotomic>], pivots: &[usize], v: &[Cyclotomic]) -> bool {
    let mut v = v.to_vec();
    for (r, &pc) in pivots.iter().enumerate() {
        if !v[pc].is_zero() {
            let c = v[pc].clone();
            for j in 0..v.len() {
                if !rows[r][j].is_zero() {
                    let t = rows[r][j].mul(&c);
                    v[j] = v[j].sub(&t);
                }
            }
        }
    }
    v.iter().all(|x| x.is_zero())
}

/// Verification report; each check is independent.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    /// |X| = |K|.
    pub counts_equal: bool,
    /// The blocks partition the group.
    pub blocks_partition: bool,
    /// Every character is constant on every block.
    pub constant_on_blocks: bool,
    /// Every block is a union of conjugacy classes.
    pub blocks_class_closed: bool,
    /// {1} is a block by itself (a consequence for true theories;
    /// reported, not required).
    pub identity_singleton: bool,
    /// The trivial character lies in the span of X.
    pub trivial_in_span: bool,
    /// The span of X is closed under pointwise products.
    pub span_closed: bool,
    /// The constituent sets of X partition Irr(G); None when no
    /// oracle table was supplied.
    pub constituents_partition: Option<bool>,
}

impl VerifyReport {
    /// The required checks (identity_singleton is informational).
    pub fn pass(&self) -> bool {
        self.counts_equal
            && self.blocks_partition
            && self.constant_on_blocks
            && self.blocks_class_closed
            && self.trivial_in_span
            && self.span_closed
            && self.constituents_partition.unwrap_or(true)
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("counts_equal: {}", self.counts_equal),
            format!("blocks_partition: {}", self.blocks_partition),
            format!("constant_on_blocks: {}", self.constant_on_blocks),
            format!("blocks_class_closed: {}", self.blocks_class_closed),
            format!("identity_singleton: {}", self.identity_singleton),
            format!("trivial_in_span: {}", self.trivial_in_span),
            format!("span_closed: {}", self.span_closed),
        ];
        if let Some(c) = self.constituents_partition {
            out.push(format!("constituents_partition: {}", c));
        }
        out
    }
}

/// Checks the supercharacter-theory axioms plus the pointwise-closure
/// characterization of the character span. Failures are reported, not
/// raised.
pub fn sct_verify(s: &SCTheory, table: Option<&IrrTable>) -> VerifyReport {
    let order = s.group().order();
    let counts_equal = s.blocks.len() == s.chars.len();

    let mut seen = vec![0usize; order];
    for b in &s.blocks {
        for &x in b {
            if x < order {
                seen[x] += 1;
            }
        }
    }
    let blocks_partition = seen.iter().all(|&c| c == 1)
        && s.blocks.iter().map(|b| b.len()).sum::<usize>() == order;

    let constant_on_blocks = s
        .chars
        .iter()
        .all(|c| c.is_superclass_function(&s.blocks));

    let class_of = &s.classes.class_of;
    let blocks_class_closed = blocks_partition && {
        let bof = s.block_of();
        s.classes
            .classes
            .iter()
            .all(|cl| cl.iter().all(|&x| bof[x] == bof[cl[0]]))
            && class_of.len() == order
    };

    let identity_singleton = s
        .blocks
        .iter()
        .any(|b| b.len() == 1 && b[0] == 0);

    // Span checks over block-representative values.
    let nb = s.blocks.len();
    let (trivial_in_span, span_closed) = if nb == 0 || !counts_equal {
        (false, false)
    } else {
        let value_row = |c: &ClassFunction| -> Vec<Cyclotomic> {
            s.blocks
                .iter()
                .map(|b| c.value_at_elem(b[0]).clone())
                .collect()
        };
        let raw: Vec<Vec<Cyclotomic>> = s.chars.iter().map(|c| value_row(c)).collect();
        let mut rows = raw.clone();
        let pivots = rref_cyc(&mut rows);
        let ones = vec![Cyclotomic::one(); nb];
        let trivial = in_span(&rows, &pivots, &ones);
        let mut closed = true;
        'outer: for i in 0..raw.len() {
            for j in i..raw.len() {
                let prod: Vec<Cyclotomic> = raw[i]
                    .iter()
                    .zip(raw[j].iter())
                    .map(|(a, b)| a.mul(b))
                    .collect();
                if !in_span(&rows, &pivots, &prod) {
                    closed = false;
                    break 'outer;
                }
            }
        }
        (trivial, closed)
    };

    let constituents_partition = table.map(|t| {
        if !carrier_eq(&s.classes, &t.classes) {
            return false;
        }
        constituent_partition(&s.chars, t)
            .map(|(_, ok)| ok)
            .unwrap_or(false)
    });

    VerifyReport {
        counts_equal,
        blocks_partition,
        constant_on_blocks,
        blocks_class_closed,
        identity_singleton,
        trivial_in_span,
        span_closed,
        constituents_partition,
    }
}

/// True when a refines b as partitions (every block of a lies inside
/// a block of b).
fn refines(a: &SCTheory, b: &SCTheory) -> bool {
    let bof = b.block_of();
    a.blocks
        .iter()
        .all(|blk| blk.iter().all(|&x| bof[x] == bof[blk[0]]))
}

/// True when chi equals r * psi for a positive rational r.
fn positive_scalar_match(chi: &ClassFunction, psi: &ClassFunction) -> bool {
    let Some(idx) = chi.values.iter().position(|v| !v.is_zero()) else {
        return psi.values.iter().all(|v| v.is_zero());
    };
    if psi.values[idx].is_zero() {
        return false;
    }
    let Some(r) = chi.values[idx].mul(&psi.values[idx].inv()).as_rational() else {
        return false;
    };
    if r <= BigRational::zero() {
        return false;
    }
    chi.values
        .iter()
        .zip(psi.values.iter())
        .all(|(a, b)| a == &b.scale(&r))
}

/// Compares two theories of the same group in the refinement order;
/// equality also requires the supercharacter sets to agree up to a
/// positive scalar per character.
pub fn sct_compare(s1: &SCTheory, s2: &SCTheory) -> Result<Comparison> {
    if !carrier_eq(&s1.classes, &s2.classes) {
        return Err(Error::GroupMismatch);
    }
    let f12 = refines(s1, s2);
    let f21 = refines(s2, s1);
    Ok(match (f12, f21) {
        (true, true) => {
            let mut used = vec![false; s2.chars.len()];
            let all_match = s1.chars.iter().all(|chi| {
                s2.chars.iter().enumerate().any(|(j, psi)| {
                    if !used[j] && positive_scalar_match(chi, psi) {
                        used[j] = true;
                        true
                    } else {
                        false
                    }
                })
            });
            if all_match && s1.chars.len() == s2.chars.len() {
                Comparison::Equal
            } else {
                Comparison::Incomparable
            }
        }
        (true, false) => Comparison::StrictlyFiner,
        (false, true) => Comparison::StrictlyCoarser,
        (false, false) => Comparison::Incomparable,
    })
}

/// Rescales every supercharacter to the normal form sigma_Z =
/// sum_{psi in Z} psi(1) psi over its constituent set Z, recording
/// the scalar that related the raw character to the normal form.
pub fn normalize(s: &SCTheory, table: &IrrTable) -> Result<SCTheory> {
    if !carrier_eq(&s.classes, &table.classes) {
        return Err(Error::GroupMismatch);
    }
    let mut chars = Vec::with_capacity(s.chars.len());
    let mut notes = Vec::with_capacity(s.chars.len());
    for chi in &s.chars {
        let mut sigma = ClassFunction::zero(s.classes.clone());
        for psi in &table.chars {
            if !chi.inner(psi)?.is_zero() {
                let d = psi
                    .degree()
                    .as_rational()
                    .expect("irreducible degree is rational");
                sigma = sigma.add(&psi.scale(&d))?;
            }
        }
        let d_chi = chi.degree().as_rational();
        let d_sigma = sigma.degree().as_rational();
        let r = match (d_chi, d_sigma) {
            (Some(a), Some(b)) if !b.is_zero() => a / b,
            _ => {
                return Err(Error::ValidationFailed {
                    condition: "normalization",
                    detail: "degrees are not positive rationals".to_string(),
                })
            }
        };
        if !cf_values_equal(chi, &sigma.scale(&r)) {
            return Err(Error::ValidationFailed {
                condition: "normalization",
                detail: "character is not a rational multiple of its sigma form".to_string(),
            });
        }
        chars.push(sigma);
        notes.push(format!("sigma-normalized (raw = {} * sigma)", r));
    }
    Ok(SCTheory::assemble(
        s.classes.clone(),
        s.blocks.clone(),
        chars,
        &format!("{} (normalized)", s.provenance),
        notes,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::DEFAULT_CAP;
    use crate::field::Field;
    use crate::groups::{PatternPoset, SemidirectSplit};

    fn fld(p: u64) -> Arc<Field> {
        Field::new(p, 1, None).unwrap()
    }

    fn ut(n: usize, p: u64) -> PatternGroup {
        PatternGroup::ut(n, fld(p))
    }

    fn oracle_of(s: &SCTheory) -> IrrTable {
        irr_table(&s.classes).unwrap()
    }

    #[test]
    fn ut2_abelian_full_theory() {
        // UT_2(F_5) is cyclic of order 5: all orbits are singletons,
        // so the theory is the full character theory.
        let s = sct_algebra_group(&ut(2, 5), DEFAULT_CAP).unwrap();
        assert_eq!(s.blocks.len(), 5);
        assert_eq!(s.chars.len(), 5);
        let table = oracle_of(&s);
        assert_eq!(
            sct_compare(&s, &sct_finest(&table)).unwrap(),
            Comparison::Equal
        );
        assert!(sct_verify(&s, Some(&table)).pass());
    }

    #[test]
    fn ut3_f2_matches_oracle() {
        let s = sct_algebra_group(&ut(3, 2), DEFAULT_CAP).unwrap();
        let mut sizes: Vec<usize> = s.blocks.iter().map(|b| b.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
        let mut degs: Vec<String> = s.chars.iter().map(|c| c.degree().render()).collect();
        degs.sort();
        assert_eq!(degs, vec!["1", "1", "1", "1", "2"]);
        let table = oracle_of(&s);
        let report = sct_verify(&s, Some(&table));
        assert!(report.pass(), "{:?}", report);
        assert!(report.identity_singleton);
        // Coincides with the ordinary character theory.
        assert_eq!(
            sct_compare(&s, &sct_finest(&table)).unwrap(),
            Comparison::Equal
        );
    }

    #[test]
    fn ut4_f2_block_count_is_bell4() {
        let s = sct_algebra_group(&ut(4, 2), DEFAULT_CAP).unwrap();
        assert_eq!(s.blocks.len(), 15);
        assert_eq!(s.chars.len(), 15);
        let table = oracle_of(&s);
        assert!(sct_verify(&s, Some(&table)).pass());
    }

    #[test]
    fn ideal_improper_reduces_to_algebra_group() {
        let g = ut(3, 2);
        let ideal = IdealSubgroup::new(&g, Side::TwoSided, g.arcs().to_vec()).unwrap();
        let s_ideal = sct_ideal(&ideal, DEFAULT_CAP).unwrap();
        let s_alg = sct_algebra_group(&g, DEFAULT_CAP).unwrap();
        assert_eq!(sct_compare(&s_ideal, &s_alg).unwrap(), Comparison::Equal);
    }

    #[test]
    fn ideal_center_of_ut3_f2() {
        // H = {1 + a e13} is a two-sided ideal; g e13 = e13 g = 0, so
        // both orbits are singletons: 2 classes, 2 characters.
        let g = ut(3, 2);
        let ideal = IdealSubgroup::new(&g, Side::Left, vec![(1, 3)]).unwrap();
        let s = sct_ideal(&ideal, DEFAULT_CAP).unwrap();
        assert_eq!(s.blocks, vec![vec![0], vec![1]]);
        assert_eq!(s.chars.len(), 2);
        let table = oracle_of(&s);
        assert!(sct_verify(&s, Some(&table)).pass());
    }

    /// All arc subsets of UT_4(F_2) that form an ideal of the given
    /// side.
    fn all_ideals(g: &PatternGroup, side: Side) -> Vec<IdealSubgroup> {
        let arcs = g.arcs().to_vec();
        let mut out = Vec::new();
        for mask in 0u32..(1 << arcs.len()) {
            let subset: Vec<_> = arcs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &a)| a)
                .collect();
            if let Ok(ideal) = IdealSubgroup::new(g, side, subset) {
                out.push(ideal);
            }
        }
        out
    }

    #[test]
    fn ideal_sweep_ut4_f2() {
        let g = ut(4, 2);
        for side in [Side::Left, Side::Right] {
            let ideals = all_ideals(&g, side);
            assert!(ideals.len() > 4);
            for ideal in &ideals {
                let s = sct_ideal(ideal, DEFAULT_CAP).unwrap();
                assert_eq!(s.blocks.len(), s.chars.len(), "arcs {:?}", ideal.arcs);
                let report = sct_verify(&s, None);
                assert!(report.pass(), "arcs {:?}: {:?}", ideal.arcs, report);
            }
        }
    }

    #[test]
    fn supernormal_improper_matches_algebra_partition() {
        let g = ut(3, 2);
        let ideal = IdealSubgroup::new(&g, Side::TwoSided, g.arcs().to_vec()).unwrap();
        let s_sn = sct_supernormal(&ideal, DEFAULT_CAP).unwrap();
        let s_alg = sct_algebra_group(&g, DEFAULT_CAP).unwrap();
        // Same partition; characters agree up to the per-character
        // scalar, so compare reports equality.
        assert_eq!(s_sn.blocks, s_alg.blocks);
        assert_eq!(sct_compare(&s_sn, &s_alg).unwrap(), Comparison::Equal);
    }

    #[test]
    fn supernormal_center_of_ut3_f2() {
        let g = ut(3, 2);
        let ideal = IdealSubgroup::new(&g, Side::TwoSided, vec![(1, 3)]).unwrap();
        let s = sct_supernormal(&ideal, DEFAULT_CAP).unwrap();
        assert_eq!(s.blocks.len(), 2);
        assert_eq!(s.chars.len(), 2);
        for c in &s.chars {
            assert!(c.is_superclass_function(&s.blocks));
        }
        // A one-sided-only ideal is rejected.
        let left_only = IdealSubgroup::new(&g, Side::Left, vec![(1, 2)]).unwrap();
        assert!(matches!(
            sct_supernormal(&left_only, DEFAULT_CAP),
            Err(Error::NotAnIdeal { .. })
        ));
    }

    #[test]
    fn supernormal_sweep_ut4_f3_center() {
        // Two-sided ideals of UT_4(F_3): characters constant on
        // classes throughout.
        let g = ut(4, 3);
        for ideal in all_ideals(&g, Side::TwoSided) {
            let s = sct_supernormal(&ideal, DEFAULT_CAP).unwrap();
            assert_eq!(s.blocks.len(), s.chars.len());
            for c in &s.chars {
                assert!(c.is_superclass_function(&s.blocks));
            }
        }
    }

    #[test]
    fn conjugation_on_split_factor() {
        // G = UT_3(F_2), N the k = 1 split factor {1, 1+e12, 1+e13,
        // 1+e12+e13}: conjugation orbits {1}, {1+e13},
        // {1+e12, 1+e12+e13}.
        let g = ut(3, 2);
        let split = SemidirectSplit::new(&g, 1).unwrap();
        let big = ConjClasses::new(g.enumerate().unwrap());
        let n = split.n_group().enumerate().unwrap();
        let s = sct_conjugation(&big, &n).unwrap();
        assert_eq!(s.blocks.len(), 3);
        assert_eq!(s.chars.len(), 3);
        let amb = &g.ambient;
        let mut sizes: Vec<usize> = s.blocks.iter().map(|b| b.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2]);
        // {1 + e13} is a fixed point.
        let mut e13 = vec![0; amb.arc_count()];
        e13[amb.arc_index(1, 3)] = 1;
        let i13 = n.idx(&e13).unwrap();
        assert!(s.blocks.iter().any(|b| b == &vec![i13]));
    }

    #[test]
    fn conjugation_under_abelian_group_is_full_theory() {
        // An abelian G conjugates trivially: the theory of N = G is
        // its full character theory.
        let poset = PatternPoset::new(3, vec![(1, 3), (2, 3)]);
        let g = PatternGroup::new(poset, fld(2));
        let big = ConjClasses::new(g.enumerate().unwrap());
        let n = g.enumerate().unwrap();
        let s = sct_conjugation(&big, &n).unwrap();
        assert_eq!(s.blocks.len(), n.order());
        let table = oracle_of(&s);
        assert_eq!(
            sct_compare(&s, &sct_finest(&table)).unwrap(),
            Comparison::Equal
        );
    }

    #[test]
    fn conjugation_rejects_non_normal() {
        // {1, 1+e12} is not normal in UT_3(F_2).
        let g = ut(3, 2);
        let big = ConjClasses::new(g.enumerate().unwrap());
        let sub = PatternGroup {
            ambient: g.ambient.clone(),
            poset: PatternPoset::new(3, vec![(1, 2)]),
        };
        let n = sub.enumerate().unwrap();
        assert!(matches!(
            sct_conjugation(&big, &n),
            Err(Error::NotNormal)
        ));
    }

    #[test]
    fn direct_product_of_trivial_groups() {
        let t = PatternGroup::new(PatternPoset::new(1, vec![]), fld(2));
        let s = sct_algebra_group(&t, DEFAULT_CAP).unwrap();
        assert_eq!(s.blocks.len(), 1);
        let prod = sct_direct_product(&s, &s);
        assert_eq!(prod.blocks.len(), 1);
        assert_eq!(prod.chars.len(), 1);
        assert!(sct_verify(&prod, None).pass());
    }

    #[test]
    fn direct_product_counts_multiply() {
        let s1 = sct_algebra_group(&ut(3, 2), DEFAULT_CAP).unwrap();
        let s2 = sct_algebra_group(&ut(2, 3), DEFAULT_CAP).unwrap();
        let prod = sct_direct_product(&s1, &s2);
        assert_eq!(prod.blocks.len(), s1.blocks.len() * s2.blocks.len());
        assert_eq!(prod.chars.len(), prod.blocks.len());
    }

    #[test]
    fn direct_product_cross_characteristic_verified() {
        // (UT_3(F_2) algebra theory) x (UT_2(F_3) theory): a group of
        // order 24 mixing characteristics; full oracle verification.
        let s1 = sct_algebra_group(&ut(3, 2), DEFAULT_CAP).unwrap();
        let s2 = sct_algebra_group(&ut(2, 3), DEFAULT_CAP).unwrap();
        let prod = sct_direct_product(&s1, &s2);
        assert_eq!(prod.group().order(), 24);
        let table = oracle_of(&prod);
        let report = sct_verify(&prod, Some(&table));
        assert!(report.pass(), "{:?}", report);
    }

    /// The k = 1 star-product setup on UT_3(F_2): quotient map onto
    /// H = {1, 1+e23}, conjugation theory on N, finest theory on H.
    fn star_setup() -> (QuotientMap, SCTheory, SCTheory, SCTheory) {
        let g = ut(3, 2);
        let split = SemidirectSplit::new(&g, 1).unwrap();
        let big = ConjClasses::new(g.enumerate().unwrap());
        let small = ConjClasses::new(split.h_group().enumerate().unwrap());
        let qm = QuotientMap::new(big.clone(), small.clone(), |c| split.factor(c).1).unwrap();
        let n = split.n_group().enumerate().unwrap();
        let s_n = sct_conjugation(&big, &n).unwrap();
        let s_q = sct_finest(&irr_table(&small).unwrap());
        let s_alg = sct_algebra_group(&g, DEFAULT_CAP).unwrap();
        (qm, s_n, s_q, s_alg)
    }

    #[test]
    fn star_product_ut3_f2() {
        let (qm, s_n, s_q, s_alg) = star_setup();
        let star = sct_star_product(&qm, &s_n, &s_q).unwrap();
        assert_eq!(star.blocks.len(), 4);
        assert_eq!(star.chars.len(), 4);
        let table = irr_table(&star.classes).unwrap();
        let report = sct_verify(&star, Some(&table));
        assert!(report.pass(), "{:?}", report);
        // Strictly coarser than the algebra-group theory.
        assert_eq!(
            sct_compare(&star, &s_alg).unwrap(),
            Comparison::StrictlyCoarser
        );
    }

    #[test]
    fn star_product_rejects_non_invariant_theory() {
        let (qm, s_n, s_q, _) = star_setup();
        // Split the size-2 conjugation orbit of N: no longer
        // G-invariant.
        let mut bad_blocks: Vec<Vec<usize>> = Vec::new();
        for b in &s_n.blocks {
            if b.len() == 1 {
                bad_blocks.push(b.clone());
            } else {
                for &x in b {
                    bad_blocks.push(vec![x]);
                }
            }
        }
        let chars = vec![ClassFunction::one(s_n.classes.clone()); bad_blocks.len()];
        let notes = raw_notes(chars.len());
        let bad = SCTheory::assemble(s_n.classes.clone(), bad_blocks, chars, "test", notes);
        assert!(matches!(
            sct_star_product(&qm, &bad, &s_q),
            Err(Error::NotInvariant)
        ));
    }

    #[test]
    fn star_product_with_trivial_normal_factor() {
        // N = {1}: the quotient theory pulls back unchanged.
        let g = ut(3, 2);
        let big = ConjClasses::new(g.enumerate().unwrap());
        let qm = QuotientMap::new(big.clone(), big.clone(), |c| c.clone()).unwrap();
        let t = PatternGroup {
            ambient: g.ambient.clone(),
            poset: PatternPoset::new(3, vec![]),
        };
        let n = t.enumerate().unwrap();
        let n_classes = ConjClasses::new(n);
        let s_n = SCTheory::assemble(
            n_classes.clone(),
            vec![vec![0]],
            vec![ClassFunction::one(n_classes)],
            "conjugation",
            raw_notes(1),
        );
        let s_alg = sct_algebra_group(&g, DEFAULT_CAP).unwrap();
        let star = sct_star_product(&qm, &s_n, &s_alg).unwrap();
        assert_eq!(sct_compare(&star, &s_alg).unwrap(), Comparison::Equal);
    }

    #[test]
    fn join_idempotent_and_lattice_identity() {
        let s = sct_algebra_group(&ut(3, 2), DEFAULT_CAP).unwrap();
        let table = oracle_of(&s);
        let jj = sct_join(&s, &s, &table).unwrap();
        assert_eq!(sct_compare(&jj, &s).unwrap(), Comparison::Equal);
        // Joining with the finest theory changes nothing.
        let fine = sct_finest(&table);
        let jf = sct_join(&fine, &s, &table).unwrap();
        assert_eq!(sct_compare(&jf, &s).unwrap(), Comparison::Equal);
    }

    #[test]
    fn join_of_coarser_and_finer_is_coarser() {
        let (qm, s_n, s_q, s_alg) = star_setup();
        let star = sct_star_product(&qm, &s_n, &s_q).unwrap();
        let table = irr_table(&star.classes).unwrap();
        let j = sct_join(&star, &s_alg, &table).unwrap();
        assert_eq!(sct_compare(&j, &star).unwrap(), Comparison::Equal);
        assert!(sct_verify(&j, Some(&table)).pass());
    }

    #[test]
    fn verify_coarsest_passes() {
        let g = ut(3, 2);
        let classes = ConjClasses::new(g.enumerate().unwrap());
        let s = sct_coarsest(&classes);
        let table = irr_table(&classes).unwrap();
        let report = sct_verify(&s, Some(&table));
        assert!(report.pass(), "{:?}", report);
    }

    #[test]
    fn verify_ut4_f3_algebra_theory() {
        let s = sct_algebra_group(&ut(4, 3), DEFAULT_CAP).unwrap();
        let table = oracle_of(&s);
        let report = sct_verify(&s, Some(&table));
        assert!(report.pass(), "{:?}", report);
    }

    #[test]
    fn verify_detects_split_class() {
        // Splitting a conjugacy class across blocks fails the
        // class-closure check.
        let s = sct_algebra_group(&ut(3, 2), DEFAULT_CAP).unwrap();
        let split_idx = s.blocks.iter().position(|b| b.len() == 2).unwrap();
        let mut blocks = Vec::new();
        for (i, b) in s.blocks.iter().enumerate() {
            if i == split_idx {
                blocks.push(vec![b[0]]);
                blocks.push(vec![b[1]]);
            } else {
                blocks.push(b.clone());
            }
        }
        let mut chars = s.chars.clone();
        chars.push(ClassFunction::one(s.classes.clone()));
        let notes = raw_notes(chars.len());
        let bad = SCTheory::assemble(s.classes.clone(), blocks, chars, "test", notes);
        let report = sct_verify(&bad, None);
        assert!(!report.blocks_class_closed);
        assert!(!report.pass());
    }

    #[test]
    fn compare_self_and_cross_group() {
        let s = sct_algebra_group(&ut(3, 2), DEFAULT_CAP).unwrap();
        assert_eq!(sct_compare(&s, &s).unwrap(), Comparison::Equal);
        let other = sct_algebra_group(&ut(4, 2), DEFAULT_CAP).unwrap();
        assert!(matches!(
            sct_compare(&s, &other),
            Err(Error::GroupMismatch)
        ));
    }

    #[test]
    fn compare_coarsest_vs_algebra() {
        let s = sct_algebra_group(&ut(3, 2), DEFAULT_CAP).unwrap();
        let coarse = sct_coarsest(&s.classes);
        assert_eq!(
            sct_compare(&coarse, &s).unwrap(),
            Comparison::StrictlyCoarser
        );
        assert_eq!(
            sct_compare(&s, &coarse).unwrap(),
            Comparison::StrictlyFiner
        );
    }

    #[test]
    fn normalized_sum_is_regular_character() {
        for (n, p) in [(3usize, 2u64), (4, 2)] {
            let s = sct_algebra_group(&ut(n, p), DEFAULT_CAP).unwrap();
            let table = oracle_of(&s);
            let norm = normalize(&s, &table).unwrap();
            let mut sum = ClassFunction::zero(s.classes.clone());
            for c in &norm.chars {
                sum = sum.add(c).unwrap();
            }
            let reg = ClassFunction::regular(s.classes.clone());
            assert!(cf_values_equal(&sum, &reg));
        }
    }

    #[test]
    fn distinct_supercharacters_orthogonal() {
        let s = sct_algebra_group(&ut(4, 2), DEFAULT_CAP).unwrap();
        for i in 0..s.chars.len() {
            for j in 0..s.chars.len() {
                let ip = s.chars[i].inner(&s.chars[j]).unwrap();
                if i == j {
                    assert!(!ip.is_zero());
                } else {
                    assert!(ip.is_zero(), "chars {i} and {j} not orthogonal");
                }
            }
        }
    }

    #[test]
    fn conjugation_covariance_for_ideal_characters() {
        // H = last-column ideal of UT_4(F_2); for every functional
        // lambda on h and every g in G, conjugating chi_lambda gives
        // chi of the transported functional.
        let g = ut(4, 2);
        let amb = g.ambient.clone();
        let ideal = IdealSubgroup::new(&g, Side::Left, vec![(1, 4), (2, 4), (3, 4)]).unwrap();
        let classes = ConjClasses::new(ideal.enumerate().unwrap());
        let ds = DualSpace::from_arcs(amb.clone(), &ideal.arcs);
        let grp = g.enumerate().unwrap();
        let all = ds.functionals(DEFAULT_CAP).unwrap();
        for lam in &all {
            let chi = ideal_supercharacter(&ideal, &classes, lam, DEFAULT_CAP).unwrap();
            for gi in [1usize, 5, 17, 33] {
                let gm = grp.mat(gi).clone();
                let gi_mat = amb.mat_inv(&gm);
                // (chi^g)(x) = chi(g^-1 x g) should be chi_{lambda'}
                // with lambda'(y) = lambda(g^-1 y g).
                let conj = chi.conjugate(&gm, &classes).unwrap();
                let lam2 = ds.act(&gm, lam, &gi_mat);
                let chi2 = ideal_supercharacter(&ideal, &classes, &lam2, DEFAULT_CAP).unwrap();
                assert!(cf_values_equal(&conj, &chi2));
            }
        }
    }

    #[test]
    fn induce_restrict_preserve_superclass_functions() {
        // Nested left ideals A = {(1,4)} inside B = {(1,3),(1,4),(2,4)}
        // of UT_4(F_2): induction and restriction carry supercharacters
        // to superclass functions.
        let g = ut(4, 2);
        let a = IdealSubgroup::new(&g, Side::Left, vec![(1, 4)]).unwrap();
        let b = IdealSubgroup::new(&g, Side::Left, vec![(1, 3), (1, 4), (2, 4)]).unwrap();
        let sa = sct_ideal(&a, DEFAULT_CAP).unwrap();
        let sb = sct_ideal(&b, DEFAULT_CAP).unwrap();
        for chi in &sa.chars {
            let ind = chi.induce(&sb.classes).unwrap();
            assert!(ind.is_superclass_function(&sb.blocks));
        }
        for chi in &sb.chars {
            let res = chi.restrict(&sa.classes).unwrap();
            assert!(res.is_superclass_function(&sa.blocks));
        }
    }
}
