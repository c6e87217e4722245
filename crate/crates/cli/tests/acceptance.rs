//! Acceptance suite. Each test covers one numbered criterion and
//! prints a single "criterion N: PASS/FAIL" line; failures list every
//! violated sub-assertion before panicking.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;

use scharc_core::charfun::{ClassFunction, ConjClasses, QuotientMap};
use scharc_core::classical::{
    build_classical, cayley, sct_classical, sct_classical_littlegroups, sct_classical_theta,
    HReading, Kind,
};
use scharc_core::cyclo::Cyclotomic;
use scharc_core::field::Field;
use scharc_core::groups::{Code, PatternGroup};
use scharc_core::littlegroups::{HPsi, LatticeDescriptor, SplitData, Strategy};
use scharc_core::oracle::{constituent_partition, irr_table, IrrTable};
use scharc_core::partitions::{
    enumerate_fq_set_partitions, eta_tilde, eta_to_element, is_k_nonnesting, sct_ns,
    FqSetPartition, NkContext,
};
use scharc_core::sct::{
    sct_algebra_group, sct_compare, sct_conjugation, sct_star_product, sct_verify, Comparison,
    SCTheory,
};

const CAP: u128 = 1 << 21;

fn field(q: u64) -> Arc<Field> {
    let (p, k) = match q {
        2 => (2, 1),
        3 => (3, 1),
        4 => (2, 2),
        9 => (3, 2),
        other => (other, 1),
    };
    Field::new(p, k, None).unwrap()
}

fn criterion(n: usize, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {n}: PASS");
    } else {
        println!("criterion {n}: FAIL");
        for f in &failures {
            println!("  - {f}");
        }
        panic!("criterion {n} failed:\n{}", failures.join("\n"));
    }
}

/// Deterministic xorshift64 stream for the randomized instances.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn pick(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

#[test]
fn criterion_1_sct_axioms_against_oracle() {
    let mut failures = Vec::new();
    for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2)] {
        let pg = PatternGroup::ut(n, field(q));
        let s = sct_algebra_group(&pg, CAP).unwrap();
        let table = irr_table(&s.classes).unwrap();
        let rep = sct_verify(&s, Some(&table));
        if !rep.pass() {
            failures.push(format!("UT_{n}(F_{q}): {}", rep.lines().join(", ")));
        }
    }
    criterion(1, failures);
}

#[test]
fn criterion_2_superclass_counts() {
    let mut failures = Vec::new();
    // Bell numbers for q = 2 and the q-analogue count for (3, 3); the
    // two sides are computed independently (two-sided orbit
    // decomposition of the group vs arc-diagram enumeration).
    for (n, q, expect) in [(2, 2, 2), (3, 2, 5), (4, 2, 15), (5, 2, 52), (3, 3, 11)] {
        let pg = PatternGroup::ut(n, field(q));
        let s = sct_algebra_group(&pg, CAP).unwrap();
        if s.blocks.len() != expect {
            failures.push(format!(
                "UT_{n}(F_{q}) has {} superclasses, expected {expect}",
                s.blocks.len()
            ));
        }
        let parts = enumerate_fq_set_partitions(n, &field(q), CAP).unwrap();
        if parts.len() != expect {
            failures.push(format!(
                "{} labelled set partitions on [{n}] over F_{q}, expected {expect}",
                parts.len()
            ));
        }
    }
    criterion(2, failures);
}

const SPLIT_SET: [(usize, usize, u64); 6] = [
    (3, 1, 2),
    (3, 2, 2),
    (4, 1, 2),
    (4, 2, 2),
    (4, 3, 2),
    (4, 2, 3),
];

#[test]
fn criterion_3_littlegroups_maximal_equals_algebra() {
    let mut failures = Vec::new();
    for (n, k, q) in SPLIT_SET {
        let sd = SplitData::new(&PatternGroup::ut(n, field(q)), k, CAP).unwrap();
        let rep = sd.thm_equivalence().unwrap();
        if rep.comparison != Comparison::Equal {
            failures.push(format!(
                "UT_{n}(F_{q}) split {k}: maximal build compares {:?}",
                rep.comparison
            ));
        }
        if !rep.all_sizes_equal {
            failures.push(format!(
                "UT_{n}(F_{q}) split {k}: some |N H_m eta N H_k| != |G eta|: {:?}",
                rep.orbit_sizes
            ));
        }
    }
    criterion(3, failures);
}

#[test]
fn criterion_4_minimal_strategy_is_the_star_product() {
    let mut failures = Vec::new();
    for (n, k, q) in SPLIT_SET {
        let sd = SplitData::new(&PatternGroup::ut(n, field(q)), k, CAP).unwrap();
        let sch = sd
            .sch_build(&LatticeDescriptor::IdealProduct, Strategy::Minimal)
            .unwrap();
        let s_n = sct_conjugation(&sd.g_classes, &sd.n).unwrap();
        let s_h = sd
            .h_psi_sct(&HPsi {
                kk: sd.split.hk_group().lie_space(),
                km: sd.split.hm_group().lie_space(),
            })
            .unwrap();
        let qm = QuotientMap::new(sd.g_classes.clone(), s_h.classes.clone(), |c| {
            sd.split.factor(c).1
        })
        .unwrap();
        let star = sct_star_product(&qm, &s_n, &s_h).unwrap();
        match sct_compare(&sch, &star).unwrap() {
            Comparison::Equal => {}
            other => failures.push(format!(
                "UT_{n}(F_{q}) split {k}: minimal build vs star product: {other:?}"
            )),
        }
    }
    criterion(4, failures);
}


fn inflate_to_nk(
    sd: &SplitData,
    nk_classes: &Arc<ConjClasses>,
    chi: &ClassFunction,
) -> ClassFunction {
    let nk = nk_classes.group.clone();
    ClassFunction::from_elem_fn(nk_classes.clone(), |i| {
        let (_, hc) = sd.split.factor(nk.code(i));
        chi.value_at_code(&hc)
            .expect("H-part of an NK element lies in K")
            .clone()
    })
}

fn rendered(values: &[Cyclotomic]) -> Vec<String> {
    values.iter().map(|v| v.render()).collect()
}

#[test]
fn criterion_5_semidirect_calculus_randomized() {
    let mut failures = Vec::new();
    let mut rng = Rng(0x5eed_cafe_f00d_1234);
    let splits: Vec<SplitData> = [(3usize, 1usize), (3, 2), (4, 1), (4, 2), (4, 3)]
        .iter()
        .map(|&(n, k)| SplitData::new(&PatternGroup::ut(n, field(2)), k, CAP).unwrap())
        .collect();
    let functionals: Vec<Vec<Code>> = splits
        .iter()
        .map(|sd| sd.ds_n.functionals(CAP).unwrap())
        .collect();
    let mut instances = 0usize;
    for round in 0..40 {
        let si = rng.pick(splits.len());
        let sd = &splits[si];
        let funcs = &functionals[si];
        let lam = funcs[rng.pick(funcs.len())].clone();

        // Induction compatibility: psi |x Ind_{K1}^{K2}(chi) agrees
        // with psi |x chi for K1 = H_psi inside K2 = I_H(psi).
        let hp = sd
            .h_psi(&LatticeDescriptor::IdealProduct, Strategy::Maximal, &lam)
            .unwrap();
        let k1 = sd.hpsi_group(&hp);
        let k1_classes = ConjClasses::new(k1);
        let k1_table = irr_table(&k1_classes).unwrap();
        let chi = &k1_table.chars[rng.pick(k1_table.chars.len())];
        let i_grp = sd.inertia_group(&lam);
        let i_classes = ConjClasses::new(i_grp.clone());
        match sd.induction_compat_check(&lam, chi, &i_classes) {
            Ok(true) => {}
            outcome => failures.push(format!(
                "round {round}: induction compatibility failed ({outcome:?})"
            )),
        }
        instances += 1;

        // Extension independence: the set of products ext . Inf(chi)
        // over Irr(K) does not change when the extension is replaced
        // by ext . Inf(mu) for a linear mu of K, and stays a set of
        // distinct characters.
        let ext = sd.extend_character(&lam, &i_grp).unwrap();
        let nk_classes = ext.classes.clone();
        let i_table = irr_table(&i_classes).unwrap();
        let linear: Vec<&ClassFunction> = i_table
            .chars
            .iter()
            .filter(|c| *c.degree() == Cyclotomic::one())
            .collect();
        let mu = linear[rng.pick(linear.len())];
        let ext2 = ext.pointwise(&inflate_to_nk(sd, &nk_classes, mu)).unwrap();
        let mut set1: Vec<Vec<String>> = Vec::new();
        let mut set2: Vec<Vec<String>> = Vec::new();
        for chi in &i_table.chars {
            let inf = inflate_to_nk(sd, &nk_classes, chi);
            set1.push(rendered(&ext.pointwise(&inf).unwrap().values));
            set2.push(rendered(&ext2.pointwise(&inf).unwrap().values));
        }
        set1.sort();
        set2.sort();
        if set1 != set2 {
            failures.push(format!("round {round}: extension dependence detected"));
        }
        if set1.windows(2).any(|w| w[0] == w[1]) {
            failures.push(format!("round {round}: extension products not distinct"));
        }
        instances += 1;

        // Mackey expansion: the product of two semidirect characters
        // expands exactly over double cosets.
        let lam2 = funcs[rng.pick(funcs.len())].clone();
        let i2_classes = ConjClasses::new(sd.inertia_group(&lam2));
        let t1 = irr_table(&i_classes).unwrap();
        let t2 = irr_table(&i2_classes).unwrap();
        let chi1 = &t1.chars[rng.pick(t1.chars.len())];
        let chi2 = &t2.chars[rng.pick(t2.chars.len())];
        match sd.mackey_product(&lam, chi1, &lam2, chi2) {
            Ok(me) if me.agrees => {}
            Ok(_) => failures.push(format!("round {round}: Mackey expansion disagrees")),
            Err(e) => failures.push(format!("round {round}: Mackey expansion errored: {e}")),
        }
        instances += 1;
    }
    assert!(instances >= 100, "only {instances} randomized instances");
    criterion(5, failures);
}

#[test]
fn criterion_6_classical_equivalence() {
    let mut failures = Vec::new();
    let specs = [
        ("UO_4(F_3)", Kind::Orthogonal, 2usize, 3u64),
        ("UO_6(F_3)", Kind::Orthogonal, 3, 3),
        ("USp_4(F_3)", Kind::Symplectic, 2, 3),
        ("UU_4(F_9)", Kind::Unitary, 2, 9),
    ];
    for (name, kind, half, q) in specs {
        let ug = build_classical(kind, half, field(q), CAP).unwrap();
        let direct = sct_classical(&ug).unwrap();
        let lg = sct_classical_littlegroups(&ug).unwrap();
        match sct_compare(&direct, &lg).unwrap() {
            Comparison::Equal => {}
            other => failures.push(format!("{name}: direct vs little-groups: {other:?}")),
        }
        // Cayley image anti-symmetry f(u)^dagger = -f(u), full sweep.
        let amb = ug.g_pattern.ambient.clone();
        let f = &amb.field;
        for i in 0..ug.u.order() {
            let x = cayley(&amb, ug.u.mat(i));
            let neg: Vec<_> = x.iter().map(|&e| f.neg(e)).collect();
            if ug.dagger_mat(&x) != neg {
                failures.push(format!("{name}: f(u)^dagger != -f(u) at element {i}"));
                break;
            }
        }
        // A second nontrivial additive character gives the same
        // partition.
        let twisted = sct_classical_theta(&ug, HReading::HalfBlock, 2).unwrap();
        if twisted.blocks != direct.blocks {
            failures.push(format!("{name}: partition depends on the choice of theta"));
        }
    }
    criterion(6, failures);
}

/// Number of arc diagrams with no nesting pair at all.
fn count_nonnesting(parts: &[FqSetPartition]) -> usize {
    parts
        .iter()
        .filter(|p| {
            !p.arcs.iter().any(|&(i, j, _)| {
                p.arcs
                    .iter()
                    .any(|&(i2, j2, _)| i < i2 && i2 < j2 && j2 < j)
            })
        })
        .count()
}

#[test]
fn criterion_7_coarser_family() {
    let mut failures = Vec::new();
    for (n, q) in [(4usize, 2u64), (5, 2), (4, 3)] {
        let label = format!("UT_{n}(F_{q})");
        let fld = field(q);
        let ctx = NkContext::new(n, fld.clone(), CAP).unwrap();
        let alg = sct_algebra_group(&ctx.pg, CAP).unwrap();
        let sk: Vec<SCTheory> = (0..=n).map(|k| ctx.sct_nk(k).unwrap()).collect();

        // Boundary splits reproduce the algebra-group theory.
        for k in [0, n] {
            if sct_compare(&sk[k], &alg).unwrap() != Comparison::Equal {
                failures.push(format!("{label}: SCT({n},{k}) != algebra theory"));
            }
        }
        // Interior splits are strictly coarser.
        for k in 1..n {
            match sct_compare(&sk[k], &alg).unwrap() {
                Comparison::StrictlyCoarser => {}
                other => failures.push(format!(
                    "{label}: SCT({n},{k}) vs algebra theory is {other:?}, not strictly coarser"
                )),
            }
        }
        // The first two interior splits are incomparable.
        match sct_compare(&sk[1], &sk[2]).unwrap() {
            Comparison::Incomparable => {}
            other => failures.push(format!(
                "{label}: SCT({n},1) vs SCT({n},2) is {other:?}, not incomparable"
            )),
        }
        // Character and class counts match the k-nonnesting count.
        for k in 0..=n {
            let nn = ctx.etas.iter().filter(|e| is_k_nonnesting(e, k)).count();
            if sk[k].chars.len() != nn || sk[k].blocks.len() != nn {
                failures.push(format!(
                    "{label}: SCT({n},{k}) has {} characters / {} classes, expected {nn}",
                    sk[k].chars.len(),
                    sk[k].blocks.len()
                ));
            }
        }
        // The closed-form value formula against the merged characters,
        // every (eta, nu) pair and every interior split. Orbit
        // characters and sizes are cached per eta so the sweep stays
        // within budget.
        let chis: Vec<ClassFunction> = ctx.etas.iter().map(|e| ctx.chi_eta(e).unwrap()).collect();
        let sizes: Vec<usize> = ctx
            .etas
            .iter()
            .map(|e| ctx.orbit_size(e).unwrap())
            .collect();
        let g_nus: Vec<Code> = ctx
            .etas
            .iter()
            .map(|e| eta_to_element(&ctx.pg, e))
            .collect();
        for k in 1..n {
            let tildes: Vec<FqSetPartition> = ctx.etas.iter().map(|e| eta_tilde(e, k)).collect();
            let mut class_members: BTreeMap<&FqSetPartition, Vec<usize>> = BTreeMap::new();
            for (ei, t) in tildes.iter().enumerate() {
                class_members.entry(t).or_default().push(ei);
            }
            let mut bad = 0usize;
            for (ei, eta) in ctx.etas.iter().enumerate() {
                let members = &class_members[&tildes[ei]];
                let merged_deg: usize = members.iter().map(|&m| sizes[m]).sum();
                let ratio = BigRational::new(merged_deg.into(), sizes[ei].into());
                for (nj, nu) in ctx.etas.iter().enumerate() {
                    let conflict = eta.arcs.iter().any(|&(i, j, _)| {
                        nu.arcs.iter().any(|&(i2, j2, _)| {
                            (i < i2 && i2 < j2 && j2 <= k && k < j)
                                || (i <= k && k < i2 && i2 < j2 && j2 < j)
                        })
                    });
                    let closed = if conflict {
                        Cyclotomic::zero()
                    } else {
                        chis[ei]
                            .value_at_code(&g_nus[nj])
                            .unwrap()
                            .clone()
                            .scale(&ratio)
                    };
                    let mut merged = Cyclotomic::zero();
                    for &m in members {
                        merged = merged.add(chis[m].value_at_code(&g_nus[nj]).unwrap());
                    }
                    if closed != merged {
                        bad += 1;
                    }
                    // Exercise the public closed-form entry point on a
                    // deterministic subsample.
                    if n == 4 && q == 2 && (ei * ctx.etas.len() + nj) % 17 == 0 {
                        let api = ctx.chi_nk_value(eta, nu, k).unwrap();
                        if api != merged {
                            failures.push(format!(
                                "{label}: chi_nk_value disagrees at k={k}, pair ({ei},{nj})"
                            ));
                        }
                    }
                }
            }
            if bad > 0 {
                failures.push(format!(
                    "{label}: closed form disagrees with merged characters at k={k} on {bad} pairs"
                ));
            }
        }
        // Chains S in {1} < {1,2} < {1,2,3} are strictly increasing in
        // coarseness, and SCT(n,[n]) is counted by the nonnesting
        // diagrams.
        let chain: [&[usize]; 3] = [&[1], &[1, 2], &[1, 2, 3]];
        let built: Vec<SCTheory> = chain
            .iter()
            .map(|s| sct_ns(n, s, fld.clone(), CAP).unwrap())
            .collect();
        for w in 0..2 {
            match sct_compare(&built[w], &built[w + 1]).unwrap() {
                Comparison::StrictlyFiner => {}
                other => failures.push(format!(
                    "{label}: SCT({n},{:?}) vs SCT({n},{:?}) is {other:?}, not strictly finer",
                    chain[w],
                    chain[w + 1]
                )),
            }
        }
        let full: Vec<usize> = (1..=n).collect();
        let s_full = sct_ns(n, &full, fld.clone(), CAP).unwrap();
        let nn = count_nonnesting(&ctx.etas);
        if s_full.chars.len() != nn || s_full.blocks.len() != nn {
            failures.push(format!(
                "{label}: SCT({n},[{n}]) has {} characters / {} classes, expected {nn}",
                s_full.chars.len(),
                s_full.blocks.len()
            ));
        }
    }
    criterion(7, failures);
}

fn regular_from_constituents(s: &SCTheory, table: &IrrTable) -> Option<Vec<String>> {
    let (sets, is_partition) = constituent_partition(&s.chars, table).unwrap();
    if !is_partition {
        return None;
    }
    let mut total = ClassFunction::zero(s.classes.clone());
    for set in sets {
        for i in set {
            let psi = &table.chars[i];
            total = total.add(&psi.scale_cyc(psi.degree())).unwrap();
        }
    }
    Some(rendered(&total.values))
}

#[test]
fn criterion_8_global_identities() {
    let mut failures = Vec::new();
    // Theories paired with the oracle table of their group.
    let mut items: Vec<(String, SCTheory)> = Vec::new();
    for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2)] {
        let pg = PatternGroup::ut(n, field(q));
        items.push((
            format!("algebra UT_{n}(F_{q})"),
            sct_algebra_group(&pg, CAP).unwrap(),
        ));
    }
    let ctx = NkContext::new(4, field(2), CAP).unwrap();
    for k in 0..=4 {
        items.push((format!("SCT(4,{k})"), ctx.sct_nk(k).unwrap()));
    }
    items.push((
        "SCT(4,{1,2})".to_string(),
        sct_ns(4, &[1, 2], field(2), CAP).unwrap(),
    ));
    let ug = build_classical(Kind::Orthogonal, 2, field(3), CAP).unwrap();
    items.push((
        "classical UO_4(F_3)".to_string(),
        sct_classical(&ug).unwrap(),
    ));

    for (name, s) in items.iter() {
        // Distinct supercharacters are orthogonal.
        for a in 0..s.chars.len() {
            for b in (a + 1)..s.chars.len() {
                if !s.chars[a].inner(&s.chars[b]).unwrap().is_zero() {
                    failures.push(format!("{name}: characters {a} and {b} not orthogonal"));
                }
            }
        }
        // Summing psi(1) psi over the constituents of every
        // supercharacter reproduces the regular character exactly.
        let table = irr_table(&s.classes).unwrap();
        match regular_from_constituents(s, &table) {
            Some(total) => {
                let regular = rendered(&ClassFunction::regular(s.classes.clone()).values);
                if total != regular {
                    failures.push(format!(
                        "{name}: constituent sum is not the regular character"
                    ));
                }
            }
            None => failures.push(format!("{name}: constituent sets do not partition Irr(G)")),
        }
    }

    // Determinism: every checked-in JobSpec produces byte-identical
    // artifacts across two independent runs.
    let jobs_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../jobs");
    let mut job_files: Vec<_> = std::fs::read_dir(&jobs_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    job_files.sort();
    assert!(!job_files.is_empty(), "no checked-in job specs found");
    for path in job_files {
        let doc = std::fs::read_to_string(&path).unwrap();
        let job = scharc_cli::job::JobSpec::from_json(&doc).unwrap();
        let first = scharc_cli::job::run(&job, None).unwrap();
        let second = scharc_cli::job::run(&job, None).unwrap();
        if first.artifact != second.artifact {
            failures.push(format!("{}: artifacts differ between runs", path.display()));
        }
        if first.report.verify_pass == Some(false) {
            failures.push(format!("{}: verification failed", path.display()));
        }
    }
    criterion(8, failures);
}
