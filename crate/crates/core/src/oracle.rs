//! Brute-force ground truth: exact irreducible character tables via the
//! Dixon-Schneider method, and constituent analysis against them.
//!
//! Class-sum structure constants are computed over Z, common
//! eigenvectors of the class matrices are found modulo a prime
//! l = 1 (mod exponent) with a comfortable safety margin, and the
//! modular character values are lifted to exact cyclotomics through the
//! discrete-log correspondence between zeta_m and a chosen element of
//! order m in F_l.

use std::sync::Arc;

use num_traits::Signed;

use crate::charfun::{ClassFunction, ConjClasses};
use crate::cyclo::Cyclotomic;
use crate::error::Result;
use crate::groups::Group;

/// Conjugacy classes (thin wrapper so callers can stay in this module).
pub fn conjugacy_classes(group: Arc<Group>) -> Arc<ConjClasses> {
    ConjClasses::new(group)
}

/// Multiplicative order of an element.
pub fn element_order(g: &Group, i: usize) -> u64 {
    let mut x = i;
    let mut ord = 1u64;
    while x != g.one() {
        x = g.mul_idx(x, i);
        ord += 1;
    }
    ord
}

/// Exponent of the group: lcm of element orders over class reps.
pub fn exponent(classes: &ConjClasses) -> u64 {
    let mut m = 1u64;
    for cl in &classes.classes {
        let o = element_order(&classes.group, cl[0]);
        m = num_integer::lcm(m, o);
    }
    m
}

// Arithmetic mod l (l < 2^31, so products fit in u64).

fn mul_m(a: u64, b: u64, l: u64) -> u64 {
    a * b % l
}

fn pow_m(mut a: u64, mut e: u64, l: u64) -> u64 {
    let mut r = 1u64;
    a %= l;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_m(r, a, l);
        }
        a = mul_m(a, a, l);
        e >>= 1;
    }
    r
}

fn inv_m(a: u64, l: u64) -> u64 {
    pow_m(a, l - 2, l)
}

fn sub_m(a: u64, b: u64, l: u64) -> u64 {
    (a + l - b % l) % l
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime l = 1 (mod m) exceeding the bound.
fn pick_modulus(m: u64, bound: u64) -> u64 {
    let mut l = (bound / m + 1) * m + 1;
    while !is_prime(l) {
        l += m;
    }
    l
}

/// An element of exact multiplicative order m in F_l.
fn order_m_element(m: u64, l: u64) -> u64 {
    // Find a generator of F_l^* then power up.
    let mut factors = Vec::new();
    let mut n = l - 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    let mut w = 2;
    loop {
        if factors.iter().all(|&f| pow_m(w, (l - 1) / f, l) != 1) {
            break;
        }
        w += 1;
    }
    pow_m(w, (l - 1) / m, l)
}

type MMat = Vec<Vec<u64>>;

fn mat_mul_m(a: &MMat, b: &MMat, l: u64) -> MMat {
    let n = a.len();
    let mut out = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i][k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = (out[i][j] + x * b[k][j]) % l;
            }
        }
    }
    out
}

/// Row reduction mod l; returns pivot columns.
fn rref_m(rows: &mut Vec<Vec<u64>>, l: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let s = inv_m(rows[r][c], l);
        for x in rows[r].iter_mut() {
            *x = mul_m(*x, s, l);
        }
        let base = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for j in 0..ncols {
                    row[j] = sub_m(row[j], mul_m(f, base[j], l), l);
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

fn kernel_m(rows: &[Vec<u64>], ncols: usize, l: u64) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = rref_m(&mut m, l);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = sub_m(0, m[ri][free], l);
        }
        basis.push(v);
    }
    basis
}

/// Characteristic polynomial by Faddeev-LeVerrier; returns monic
/// coefficients c so that p(x) = sum_i c[i] x^i.
fn charpoly_m(m: &MMat, l: u64) -> Vec<u64> {
    let n = m.len();
    let trace = |a: &MMat| -> u64 {
        let mut t = 0u64;
        for i in 0..n {
            t = (t + a[i][i]) % l;
        }
        t
    };
    let mut coeffs = vec![0u64; n + 1];
    coeffs[n] = 1;
    let mut mk = m.clone();
    for k in 1..=n {
        let ck = sub_m(0, mul_m(trace(&mk), inv_m(k as u64, l), l), l);
        coeffs[n - k] = ck;
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                shifted[i][i] = (shifted[i][i] + ck) % l;
            }
            mk = mat_mul_m(m, &shifted, l);
        }
    }
    coeffs
}

/// All roots in F_l by direct scan (with multiplicity ignored).
fn roots_m(poly: &[u64], l: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for x in 0..l {
        let mut acc = 0u64;
        for &c in poly.iter().rev() {
            acc = (mul_m(acc, x, l) + c) % l;
        }
        if acc == 0 {
            out.push(x);
        }
    }
    out
}

/// Splits a subspace (rows = basis over F_l, assumed invariant) into
/// eigenspaces of `m`.
fn split_under(basis: Vec<Vec<u64>>, m: &MMat, l: u64) -> Vec<Vec<Vec<u64>>> {
    let d = basis.len();
    if d <= 1 {
        return vec![basis];
    }
    let r = basis[0].len();
    let mut b = basis;
    let pivots = rref_m(&mut b, l);
    assert_eq!(b.len(), d, "basis not independent");
    // Restricted action: column i = coordinates of M b_i.
    let apply = |v: &[u64]| -> Vec<u64> {
        (0..r)
            .map(|j| {
                let mut acc = 0u64;
                for k in 0..r {
                    acc = (acc + mul_m(m[j][k], v[k], l)) % l;
                }
                acc
            })
            .collect()
    };
    let mut a = vec![vec![0u64; d]; d];
    for (i, bi) in b.iter().enumerate() {
        let w = apply(bi);
        for (t, &pc) in pivots.iter().enumerate() {
            a[t][i] = w[pc];
        }
    }
    let poly = charpoly_m(&a, l);
    let mut out = Vec::new();
    for lam in roots_m(&poly, l) {
        let mut shifted = a.clone();
        for i in 0..d {
            shifted[i][i] = sub_m(shifted[i][i], lam, l);
        }
        // One block per eigenvalue; later matrices refine further.
        let block: Vec<Vec<u64>> = kernel_m(&shifted, d, l)
            .into_iter()
            .map(|coef| {
                let mut v = vec![0u64; r];
                for (i, bi) in b.iter().enumerate() {
                    for j in 0..r {
                        v[j] = (v[j] + mul_m(coef[i], bi[j], l)) % l;
                    }
                }
                v
            })
            .collect();
        if !block.is_empty() {
            out.push(block);
        }
    }
    out
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
}

/// The exact irreducible character table of a group.
#[derive(Debug)]
pub struct IrrTable {
    pub classes: Arc<ConjClasses>,
    pub chars: Vec<ClassFunction>,
    pub exponent: u64,
}

/// Computes the full irreducible character table.
pub fn irr_table(classes: &Arc<ConjClasses>) -> Result<IrrTable> {
    let g = &classes.group;
    let r = classes.num();
    let order = g.order() as u64;
    let m = exponent(classes);
    // Safety margin from the class equation lift: l = 1 (mod m) and
    // l > 2 sqrt(|G|) |G|.
    let bound = 2 * order * (order as f64).sqrt().ceil() as u64;
    let l = pick_modulus(m, bound);
    let z = order_m_element(m, l);

    // Class matrices: M_i[j][k] = #{(x, y) in C_i x C_j : x y = g_k}.
    let reps: Vec<usize> = (0..r).map(|c| classes.rep(c)).collect();
    let mut mats: Vec<MMat> = vec![vec![vec![0u64; r]; r]; r];
    for (k, &gk) in reps.iter().enumerate() {
        for x in 0..g.order() {
            let y = g.mul_idx(g.inv_idx(x), gk);
            let i = classes.class_of[x];
            let j = classes.class_of[y];
            mats[i][j][k] += 1;
        }
    }
    for mat in &mut mats {
        for row in mat.iter_mut() {
            for v in row.iter_mut() {
                *v %= l;
            }
        }
    }

    // Common eigenvectors: first split along a pseudorandom combination
    // (usually complete), then refine against individual class matrices.
    let mut rng = XorShift(0x9e3779b97f4a7c15);
    let mut subspaces: Vec<Vec<Vec<u64>>> = Vec::new();
    for attempt in 0..4 {
        let mut combo = vec![vec![0u64; r]; r];
        for mat in &mats {
            let c = rng.next() % l;
            for i in 0..r {
                for j in 0..r {
                    combo[i][j] = (combo[i][j] + mul_m(c, mat[i][j], l)) % l;
                }
            }
        }
        let whole: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut v = vec![0u64; r];
                v[i] = 1;
                v
            })
            .collect();
        subspaces = split_under(whole, &combo, l);
        if subspaces.iter().all(|s| s.len() == 1) || attempt == 3 {
            break;
        }
    }
    for mat in &mats {
        if subspaces.iter().all(|s| s.len() == 1) {
            break;
        }
        subspaces = subspaces
            .into_iter()
            .flat_map(|s| split_under(s, mat, l))
            .collect();
    }
    assert!(
        subspaces.iter().all(|s| s.len() == 1) && subspaces.len() == r,
        "class matrices failed to split into one-dimensional common eigenspaces"
    );

    // Normalize: v[identity class] = 1; then v[i] = omega_i.
    let mut omegas: Vec<Vec<u64>> = Vec::new();
    for s in subspaces {
        let v = &s[0];
        assert!(v[0] != 0, "eigenvector vanishes at the identity class");
        let s0 = inv_m(v[0], l);
        omegas.push(v.iter().map(|&x| mul_m(x, s0, l)).collect());
    }

    let inv_class: Vec<usize> = reps
        .iter()
        .map(|&x| classes.class_of[g.inv_idx(x)])
        .collect();
    let sizes: Vec<u64> = classes.classes.iter().map(|c| c.len() as u64).collect();
    let sqrt_g = (order as f64).sqrt() as u64 + 1;

    // Precompute the class of each power of each rep.
    let orders: Vec<u64> = reps.iter().map(|&x| element_order(g, x)).collect();
    let power_class: Vec<Vec<usize>> = reps
        .iter()
        .zip(orders.iter())
        .map(|(&x, &mi)| {
            let mut out = Vec::with_capacity(mi as usize);
            let mut cur = g.one();
            for _ in 0..mi {
                out.push(classes.class_of[cur]);
                cur = g.mul_idx(cur, x);
            }
            out
        })
        .collect();

    let mut chars = Vec::with_capacity(r);
    for omega in &omegas {
        // chi(1)^2 = |G| / sum_i omega_i omega_{i*} / h_i.
        let mut s = 0u64;
        for i in 0..r {
            s = (s + mul_m(mul_m(omega[i], omega[inv_class[i]], l), inv_m(sizes[i], l), l)) % l;
        }
        let d2 = mul_m(order % l, inv_m(s, l), l);
        let d = (1..=sqrt_g)
            .find(|&d| mul_m(d, d, l) == d2)
            .expect("no degree matching the modular square");
        // Modular values u_i = omega_i d / h_i.
        let u: Vec<u64> = (0..r)
            .map(|i| mul_m(mul_m(omega[i], d, l), inv_m(sizes[i], l), l))
            .collect();
        // Lift each value through eigenvalue multiplicities.
        let mut values = Vec::with_capacity(r);
        for i in 0..r {
            let mi = orders[i];
            if mi == 1 {
                values.push(Cyclotomic::from_int(d as i64));
                continue;
            }
            let zi = pow_m(z, m / mi, l);
            let zi_inv = inv_m(zi, l);
            let mut val = Cyclotomic::zero();
            for j in 0..mi {
                let mut cj = 0u64;
                for t in 0..mi {
                    let w = pow_m(zi_inv, j * t % mi, l);
                    cj = (cj + mul_m(u[power_class[i][t as usize]], w, l)) % l;
                }
                cj = mul_m(cj, inv_m(mi, l), l);
                assert!(cj <= d, "eigenvalue multiplicity out of range");
                if cj != 0 {
                    let term = Cyclotomic::root_of_unity(mi, j)
                        .scale(&num_rational::BigRational::from_integer(cj.into()));
                    val = val.add(&term);
                }
            }
            values.push(val);
        }
        chars.push(ClassFunction::from_class_values(classes.clone(), values));
    }

    // Deterministic row order: by degree, then lexicographic rendered
    // values.
    chars.sort_by_key(|c| {
        let deg = c
            .degree()
            .as_rational()
            .expect("integral degree")
            .to_integer();
        let key: Vec<String> = c.values.iter().map(|v| v.render()).collect();
        (deg, key)
    });
    Ok(IrrTable {
        classes: classes.clone(),
        chars,
        exponent: m,
    })
}

/// For each character in X, the set of irreducible constituents; also
/// reports whether those sets partition Irr(G).
pub fn constituent_partition(
    x: &[ClassFunction],
    table: &IrrTable,
) -> Result<(Vec<Vec<usize>>, bool)> {
    let mut sets = Vec::with_capacity(x.len());
    for chi in x {
        let mut s = Vec::new();
        for (i, irr) in table.chars.iter().enumerate() {
            if !chi.inner(irr)?.is_zero() {
                s.push(i);
            }
        }
        sets.push(s);
    }
    let mut seen = vec![false; table.chars.len()];
    let mut ok = true;
    for s in &sets {
        for &i in s {
            if seen[i] {
                ok = false;
            }
            seen[i] = true;
        }
    }
    ok = ok && seen.iter().all(|&b| b);
    Ok((sets, ok))
}

/// Checks a value is a denominator-one (algebraic integer in the basis)
/// cyclotomic; used by table validation tests.
pub fn has_integer_coeffs(v: &Cyclotomic) -> bool {
    v.coeffs
        .iter()
        .all(|c| c.denom().abs() == num_bigint::BigInt::from(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::theta;
    use crate::field::Field;
    use crate::groups::{PatternGroup, PatternPoset};

    fn table_of(n: usize, p: u64) -> IrrTable {
        let g = PatternGroup::ut(n, Field::new(p, 1, None).unwrap());
        irr_table(&ConjClasses::new(g.enumerate().unwrap())).unwrap()
    }

    fn check_orthogonality(t: &IrrTable) {
        for (i, a) in t.chars.iter().enumerate() {
            for (j, b) in t.chars.iter().enumerate() {
                let ip = a.inner(b).unwrap();
                if i == j {
                    assert_eq!(ip, Cyclotomic::one());
                } else {
                    assert!(ip.is_zero(), "rows {i},{j} not orthogonal");
                }
            }
        }
    }

    #[test]
    fn abelian_groups() {
        // UT_2(F_5) is cyclic of order 5.
        let t = table_of(2, 5);
        assert_eq!(t.classes.num(), 5);
        assert_eq!(t.chars.len(), 5);
        for c in &t.chars {
            assert_eq!(c.degree(), &Cyclotomic::one());
        }
        check_orthogonality(&t);

        // The poset {(1,3),(2,3)} group is elementary abelian of order 9.
        let g = PatternGroup::new(
            PatternPoset::new(3, vec![(1, 3), (2, 3)]),
            Field::new(3, 1, None).unwrap(),
        );
        let t = irr_table(&ConjClasses::new(g.enumerate().unwrap())).unwrap();
        assert_eq!(t.classes.num(), 9);
        check_orthogonality(&t);
    }

    #[test]
    fn ut2_linear_characters_match_theta() {
        for (p, k) in [(3u64, 1usize), (2, 2)] {
            let field = Field::new(p, k, None).unwrap();
            let g = PatternGroup::ut(2, field.clone());
            let grp = g.enumerate().unwrap();
            let cc = ConjClasses::new(grp.clone());
            let t = irr_table(&cc).unwrap();
            assert_eq!(t.chars.len(), field.q);
            // Every theta(c * a) is a row of the table.
            for c in 0..field.q as u8 {
                let chi = ClassFunction::from_elem_fn(cc.clone(), |i| {
                    let a = grp.code(i)[0];
                    theta(&field, field.mul(c, a))
                });
                let found = t
                    .chars
                    .iter()
                    .any(|row| row.values.iter().zip(chi.values.iter()).all(|(x, y)| x == y));
                assert!(found, "theta character c={c} missing for q={}", field.q);
            }
        }
    }

    #[test]
    fn ut3_f2_table() {
        let t = table_of(3, 2);
        assert_eq!(t.chars.len(), 5);
        let degrees: Vec<i64> = t
            .chars
            .iter()
            .map(|c| {
                let r = c.degree().as_rational().unwrap();
                assert!(r.is_integer());
                i64::try_from(r.to_integer()).unwrap()
            })
            .collect();
        assert_eq!(degrees, vec![1, 1, 1, 1, 2]);
        assert_eq!(degrees.iter().map(|d| d * d).sum::<i64>(), 8);
        check_orthogonality(&t);
    }

    #[test]
    fn ut4_f2_table() {
        let t = table_of(4, 2);
        let mut sum = 0i64;
        for c in &t.chars {
            let d = i64::try_from(c.degree().as_rational().unwrap().to_integer()).unwrap();
            sum += d * d;
            for v in &c.values {
                assert!(has_integer_coeffs(v), "non-integral character value");
            }
        }
        assert_eq!(sum, 64);
        check_orthogonality(&t);
        // Column orthogonality at the identity column: sum chi(g)
        // conj(chi(g)) over rows = |C_G(g)|.
        let g = &t.classes.group;
        for (ci, cl) in t.classes.classes.iter().enumerate() {
            let centralizer = g.order() / cl.len();
            let mut acc = Cyclotomic::zero();
            for c in &t.chars {
                acc = acc.add(&c.values[ci].mul(&c.values[ci].conj()));
            }
            assert_eq!(acc, Cyclotomic::from_int(centralizer as i64));
        }
    }

    #[test]
    fn ut3_f3_table_conductor_nine() {
        // Elements of order 9 exist in UT_3(F_3)? No: (1+x)^3 = 1+x^3 = 1
        // in 3x3. Use n = 4 to exercise conductor 9.
        let t = table_of(3, 3);
        assert_eq!(t.exponent, 3);
        check_orthogonality(&t);
        let t4 = table_of(4, 3);
        assert_eq!(t4.exponent, 9);
        let mut sum = 0i64;
        for c in &t4.chars {
            let d = i64::try_from(c.degree().as_rational().unwrap().to_integer()).unwrap();
            sum += d * d;
        }
        assert_eq!(sum, 729);
        check_orthogonality(&t4);
    }

    #[test]
    fn table_deterministic() {
        let a = table_of(3, 2);
        let b = table_of(3, 2);
        for (x, y) in a.chars.iter().zip(b.chars.iter()) {
            for (u, v) in x.values.iter().zip(y.values.iter()) {
                assert_eq!(u, v);
            }
        }
    }

    #[test]
    fn constituents_coarsest_theory() {
        let t = table_of(3, 2);
        let cc = &t.classes;
        let one = ClassFunction::one(cc.clone());
        let rho = ClassFunction::regular(cc.clone());
        let rest = rho.sub(&one).unwrap();
        let (sets, ok) = constituent_partition(&[one.clone(), rest], &t).unwrap();
        assert!(ok);
        assert_eq!(sets[0].len(), 1);
        assert_eq!(sets[1].len(), 4);
        // Repeated character: overlap detected.
        let (_, ok) = constituent_partition(&[one.clone(), one], &t).unwrap();
        assert!(!ok);
        // Permutation invariance.
        let rho2 = ClassFunction::regular(cc.clone());
        let rest2 = rho2.sub(&ClassFunction::one(cc.clone())).unwrap();
        let (sets2, ok2) =
            constituent_partition(&[rest2, ClassFunction::one(cc.clone())], &t).unwrap();
        assert!(ok2);
        assert_eq!(sets2[0], sets[1]);
        assert_eq!(sets2[1], sets[0]);
    }
}
