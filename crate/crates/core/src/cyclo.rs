//! Exact cyclotomic numbers: elements of Q(zeta_m) as rational
//! coefficient vectors in the power basis, reduced modulo the m-th
//! cyclotomic polynomial.
//!
//! Binary operations between different conductors embed both operands
//! into Q(zeta_lcm) first. No floating point anywhere.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::field::{Field, Fq};

type Rat = BigRational;

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Polynomial product, low-to-high coefficients.
fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Division with remainder by a monic polynomial: returns (quot, rem).
fn poly_divrem(a: &[Rat], m: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dm = m.len() - 1;
    let mut r: Vec<Rat> = a.to_vec();
    if r.len() <= dm {
        return (vec![], r);
    }
    let mut q = vec![Rat::zero(); r.len() - dm];
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        if !lead.is_zero() {
            q[shift] = lead.clone();
            for i in 0..=dm {
                let t = &lead * &m[i];
                r[shift + i] -= t;
            }
        }
        r.pop();
    }
    (q, r)
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn divisors(n: u64) -> Vec<u64> {
    let mut d: Vec<u64> = (1..=n).filter(|i| n % i == 0).collect();
    d.sort_unstable();
    d
}

/// Euler phi.
pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|i| i.gcd(&n) == 1).count() as u64
}

static PHI_CACHE: Lazy<Mutex<HashMap<u64, Vec<Rat>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// The m-th cyclotomic polynomial, low-to-high, monic.
pub fn cyclotomic_poly(m: u64) -> Vec<Rat> {
    if let Some(p) = PHI_CACHE.lock().unwrap().get(&m) {
        return p.clone();
    }
    let result = if m == 1 {
        vec![rat(-1), rat(1)]
    } else {
        let mut num = vec![Rat::zero(); m as usize + 1];
        num[0] = rat(-1);
        num[m as usize] = rat(1);
        let mut r = num;
        for d in divisors(m) {
            if d == m {
                continue;
            }
            let phi_d = cyclotomic_poly(d);
            let (q, rem) = poly_divrem(&r, &phi_d);
            debug_assert!(trim(rem).is_empty());
            r = q;
        }
        r
    };
    PHI_CACHE
        .lock()
        .unwrap()
        .insert(m, result.clone());
    result
}

/// An exact element of Q(zeta_m).
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    /// Conductor (the order of the root of unity generating the field).
    pub m: u64,
    /// Coefficients on the basis 1, zeta, ..., zeta^{phi(m)-1}.
    pub coeffs: Vec<Rat>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic { m: 1, coeffs: vec![] }
    }

    pub fn one() -> Self {
        Cyclotomic {
            m: 1,
            coeffs: vec![Rat::one()],
        }
    }

    pub fn from_rational(r: Rat) -> Self {
        if r.is_zero() {
            Self::zero()
        } else {
            Cyclotomic { m: 1, coeffs: vec![r] }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    /// zeta_m^e, reduced.
    pub fn root_of_unity(m: u64, e: u64) -> Self {
        let e = (e % m) as usize;
        let mut raw = vec![Rat::zero(); e + 1];
        raw[e] = Rat::one();
        Self::from_raw(m, raw)
    }

    /// Builds from an arbitrary-degree coefficient vector in zeta_m,
    /// reducing modulo the cyclotomic polynomial.
    fn from_raw(m: u64, raw: Vec<Rat>) -> Self {
        let phi = cyclotomic_poly(m);
        let (_, r) = poly_divrem(&raw, &phi);
        Cyclotomic {
            m,
            coeffs: trim(r),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Embeds into Q(zeta_M); requires m | M.
    pub fn embed(&self, big_m: u64) -> Cyclotomic {
        assert!(big_m % self.m == 0);
        if big_m == self.m {
            return self.clone();
        }
        let step = (big_m / self.m) as usize;
        let mut raw = vec![Rat::zero(); self.coeffs.len() * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        Self::from_raw(big_m, raw)
    }

    fn unify(&self, other: &Cyclotomic) -> (Cyclotomic, Cyclotomic, u64) {
        let m = self.m.lcm(&other.m);
        (self.embed(m), other.embed(m), m)
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        let (a, b, m) = self.unify(other);
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in a.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Cyclotomic { m, coeffs: trim(out) }
    }

    pub fn sub(&self, other: &Cyclotomic) -> Cyclotomic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cyclotomic {
        Cyclotomic {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        let (a, b, m) = self.unify(other);
        Cyclotomic::from_raw(m, poly_mul(&a.coeffs, &b.coeffs))
    }

    pub fn scale(&self, r: &Rat) -> Cyclotomic {
        Cyclotomic {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Applies the Galois substitution zeta_m -> zeta_m^t; requires
    /// gcd(t, m) = 1 for a field automorphism.
    pub fn galois(&self, t: u64) -> Cyclotomic {
        let t = t % self.m;
        let mut raw = vec![Rat::zero(); self.m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = (i as u64 * t % self.m) as usize;
                raw[e] += c;
            }
        }
        Cyclotomic::from_raw(self.m, raw)
    }

    /// Complex conjugation: zeta_m -> zeta_m^{-1}.
    pub fn conj(&self) -> Cyclotomic {
        if self.m == 1 {
            return self.clone();
        }
        self.galois(self.m - 1)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in
    /// Q[x] modulo the cyclotomic polynomial. Panics on zero.
    pub fn inv(&self) -> Cyclotomic {
        assert!(!self.is_zero(), "division by zero");
        if self.m == 1 {
            return Cyclotomic {
                m: 1,
                coeffs: vec![self.coeffs[0].recip()],
            };
        }
        let phi = cyclotomic_poly(self.m);
        // Extended gcd of (f, phi): maintain r = u * f (mod phi).
        let mut r0 = phi.clone();
        let mut r1 = trim(self.coeffs.clone());
        let mut u0: Vec<Rat> = vec![];
        let mut u1: Vec<Rat> = vec![Rat::one()];
        while !r1.is_empty() {
            // Make r1 monic to keep poly_divrem applicable.
            let lead = r1.last().unwrap().clone();
            let monic: Vec<Rat> = r1.iter().map(|c| c / &lead).collect();
            let (q, rem) = poly_divrem(&r0, &monic);
            let q: Vec<Rat> = q.iter().map(|c| c / &lead).collect();
            let qu1 = poly_mul(&q, &u1);
            let mut new_u = u0.clone();
            new_u.resize(new_u.len().max(qu1.len()), Rat::zero());
            for (i, c) in qu1.iter().enumerate() {
                new_u[i] -= c;
            }
            r0 = r1;
            r1 = trim(rem);
            u0 = u1;
            u1 = trim(new_u);
        }
        // r0 = gcd (a nonzero constant times a unit); u0 * f = r0 mod phi.
        assert_eq!(r0.len(), 1, "input not invertible mod cyclotomic polynomial");
        let c = r0[0].recip();
        let inv_raw: Vec<Rat> = u0.iter().map(|x| x * &c).collect();
        Cyclotomic::from_raw(self.m, inv_raw)
    }

    pub fn eq(&self, other: &Cyclotomic) -> bool {
        let (a, b, _) = self.unify(other);
        let n = a.coeffs.len().max(b.coeffs.len());
        for i in 0..n {
            let x = a.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
            let y = b.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
            if x != y {
                return false;
            }
        }
        true
    }

    /// Returns the rational value if this element lies in Q.
    pub fn as_rational(&self) -> Option<Rat> {
        // Descend by checking invariance under all Galois automorphisms;
        // for our use a direct basis check after reduction suffices for
        // conductors where Q-multiples of 1 stay in coordinate 0, which
        // holds in the power basis of any cyclotomic polynomial.
        if self.coeffs.len() <= 1 {
            return Some(self.coeffs.first().cloned().unwrap_or_else(Rat::zero));
        }
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            return Some(self.coeffs[0].clone());
        }
        None
    }

    /// True when the value is a rational integer.
    pub fn is_integer(&self) -> bool {
        match self.as_rational() {
            Some(r) => r.denom().is_one(),
            None => false,
        }
    }

    /// Renders canonically as a polynomial in `z` (a primitive m-th root).
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let coeff_str = if mag.is_one() && i > 0 {
                String::new()
            } else {
                format!("{}", mag)
            };
            let var = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{}", i),
            };
            let body = match (coeff_str.is_empty(), var.is_empty()) {
                (true, _) => var.clone(),
                (_, true) => coeff_str.clone(),
                _ => format!("{}*{}", coeff_str, var),
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() {
                    format!("-{}", body)
                } else {
                    body
                });
            } else {
                parts.push(format!("{}{}", if c.is_negative() { " - " } else { " + " }, body));
            }
        }
        parts.concat()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        Cyclotomic::eq(self, other)
    }
}
impl Eq for Cyclotomic {}

/// The fixed additive character: theta(a) = zeta_p^{Tr(a)}.
pub fn theta(field: &Field, a: Fq) -> Cyclotomic {
    Cyclotomic::root_of_unity(field.p, field.trace(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(m: u64, e: u64) -> Cyclotomic {
        Cyclotomic::root_of_unity(m, e)
    }

    #[test]
    fn basic_identities() {
        // 1 + zeta_3 + zeta_3^2 = 0
        assert!(Cyclotomic::one().add(&z(3, 1)).add(&z(3, 2)).is_zero());
        // i^2 = -1
        assert!(z(4, 1).mul(&z(4, 1)).eq(&Cyclotomic::from_int(-1)));
        // conj(zeta_5) = zeta_5^4
        assert!(z(5, 1).conj().eq(&z(5, 4)));
    }

    #[test]
    fn mixed_conductors() {
        // zeta_2 * zeta_3 = zeta_6^5 (primitive 6th root: -zeta_3^2... check via order)
        let w = z(2, 1).mul(&z(3, 1));
        let mut acc = Cyclotomic::one();
        for _ in 0..6 {
            acc = acc.mul(&w);
        }
        assert!(acc.eq(&Cyclotomic::one()));
        assert!(!w.eq(&Cyclotomic::one()));
    }

    #[test]
    fn inverse() {
        for (m, e) in [(3u64, 1u64), (4, 1), (5, 2), (8, 3), (9, 4), (12, 5)] {
            let x = z(m, e).add(&Cyclotomic::from_int(2));
            let y = x.inv();
            assert!(x.mul(&y).eq(&Cyclotomic::one()), "inv failed for m={m} e={e}");
        }
    }

    #[test]
    fn theta_is_a_homomorphism() {
        for (p, k) in [(2u64, 1usize), (3, 1), (3, 2), (5, 1)] {
            let f = Field::new(p, k, None).unwrap();
            assert!(theta(&f, 0).eq(&Cyclotomic::one()));
            let mut nontrivial = false;
            for a in f.elements() {
                if !theta(&f, a).eq(&Cyclotomic::one()) {
                    nontrivial = true;
                }
                for b in f.elements() {
                    assert!(theta(&f, f.add(a, b)).eq(&theta(&f, a).mul(&theta(&f, b))));
                }
            }
            assert!(nontrivial);
        }
    }

    #[test]
    fn theta_on_f3() {
        let f = Field::new(3, 1, None).unwrap();
        assert!(theta(&f, 1).eq(&z(3, 1)));
        assert!(theta(&f, 1).mul(&theta(&f, 2)).eq(&Cyclotomic::one()));
    }

    proptest! {
        #[test]
        fn ring_axioms(ea in 0u64..12, eb in 0u64..12, ec in 0u64..12,
                       ma in prop::sample::select(vec![1u64,2,3,4,5,8,9]),
                       mb in prop::sample::select(vec![1u64,2,3,4,5,8,9]),
                       mc in prop::sample::select(vec![1u64,2,3,4,5,8,9]),
                       sa in -3i64..4, sb in -3i64..4) {
            let a = z(ma, ea % ma).scale(&rat(sa));
            let b = z(mb, eb % mb).scale(&rat(sb));
            let c = z(mc, ec % mc);
            prop_assert!(a.mul(&b).eq(&b.mul(&a)));
            prop_assert!(a.mul(&b.mul(&c)).eq(&a.mul(&b).mul(&c)));
            prop_assert!(a.mul(&b.add(&c)).eq(&a.mul(&b).add(&a.mul(&c))));
            prop_assert!(a.conj().conj().eq(&a));
            prop_assert!(a.mul(&b).conj().eq(&a.conj().mul(&b.conj())));
        }
    }
}
