//! Finite fields F_{p^k} with an explicit modulus polynomial.
//!
//! Elements are stored as indices `0..q` encoding their coefficient
//! vector in the power basis of the modulus, base `p` (so `0` is zero
//! and `1` is one). All arithmetic is table-driven; tables are built
//! once at construction.

use std::sync::Arc;

use crate::error::{Error, Result};

/// An element of a finite field, as an index into the field's tables.
///
/// The index encodes the coefficient vector `(a_0, ..., a_{k-1})` in
/// the power basis as `a_0 + a_1 p + ... + a_{k-1} p^{k-1}`.
pub type Fq = u8;

/// A finite field F_{p^k}, with full arithmetic tables.
#[derive(Debug)]
pub struct Field {
    pub p: u64,
    pub k: usize,
    /// Monic modulus polynomial, low-to-high, length `k + 1`.
    pub modulus: Vec<u64>,
    pub q: usize,
    add: Vec<Fq>,
    mul: Vec<Fq>,
    neg: Vec<Fq>,
    inv: Vec<Fq>,
    frob: Vec<Fq>,
    trace: Vec<u64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for Field {}

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

/// Multiply two polynomials over Z_p (low-to-high coefficients).
fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// Remainder of `a` modulo monic `m` over Z_p.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for i in 0..=dm {
                let idx = shift + i;
                r[idx] = (r[idx] + p * p - lead * m[i] % p) % p;
            }
        }
        r.pop();
    }
    while r.len() > 1 && *r.last().unwrap() == 0 {
        r.pop();
    }
    r
}

/// Trial-factorization irreducibility test for a monic polynomial over Z_p.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    // Try all monic divisors of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for enc in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut e = enc;
            for _ in 0..d {
                div.push(e % p);
                e /= p;
            }
            div.push(1); // monic
            let r = poly_rem(m, &div, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Least non-square modulo an odd prime p.
fn least_nonsquare(p: u64) -> u64 {
    let squares: std::collections::HashSet<u64> = (1..p).map(|a| a * a % p).collect();
    (2..p).find(|a| !squares.contains(a)).expect("p > 2")
}

impl Field {
    /// Builds F_{p^k}. When `modulus` is omitted, a built-in default is
    /// used for `k <= 2` (degree 1: `x`; degree 2: `x^2 - s` with `s`
    /// the least non-square mod p, or `x^2 + x + 1` when p = 2).
    pub fn new(p: u64, k: usize, modulus: Option<Vec<u64>>) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        assert!(k >= 1, "extension degree must be >= 1");
        let modulus = match modulus {
            Some(m) => {
                let mut m: Vec<u64> = m.iter().map(|&c| c % p).collect();
                assert_eq!(m.len(), k + 1, "modulus must have degree k");
                assert_eq!(m[k], 1, "modulus must be monic");
                if !is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                m.truncate(k + 1);
                m
            }
            None => match k {
                1 => vec![0, 1],
                2 if p == 2 => vec![1, 1, 1],
                2 => {
                    let s = least_nonsquare(p);
                    vec![(p - s) % p, 0, 1]
                }
                _ => return Err(Error::NoDefaultModulus(k)),
            },
        };
        let q = (p as usize).checked_pow(k as u32).expect("q overflow");
        assert!(q <= 256, "field too large for table-driven arithmetic");

        let decode = |idx: usize| -> Vec<u64> {
            let mut c = Vec::with_capacity(k);
            let mut e = idx as u64;
            for _ in 0..k {
                c.push(e % p);
                e /= p;
            }
            c
        };
        let encode = |c: &[u64]| -> Fq {
            let mut v = 0u64;
            for i in (0..k).rev() {
                v = v * p + if i < c.len() { c[i] % p } else { 0 };
            }
            v as Fq
        };

        let mut add = vec![0 as Fq; q * q];
        let mut mul = vec![0 as Fq; q * q];
        let mut neg = vec![0 as Fq; q];
        for a in 0..q {
            let ca = decode(a);
            let nc: Vec<u64> = ca.iter().map(|&x| (p - x) % p).collect();
            neg[a] = encode(&nc);
            for b in 0..q {
                let cb = decode(b);
                let sum: Vec<u64> = (0..k).map(|i| (ca[i] + cb[i]) % p).collect();
                add[a * q + b] = encode(&sum);
                let prod = poly_rem(&poly_mul(&ca, &cb, p), &modulus, p);
                mul[a * q + b] = encode(&prod);
            }
        }
        let mut inv = vec![0 as Fq; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as Fq;
                    break;
                }
            }
            assert!(inv[a] != 0, "no inverse found; modulus not irreducible?");
        }
        // Frobenius x -> x^p and absolute trace sum_{i<k} x^{p^i}.
        let mut frob = vec![0 as Fq; q];
        for a in 0..q {
            let mut acc: Fq = 1;
            for _ in 0..p {
                acc = mul[acc as usize * q + a];
            }
            frob[a] = acc;
        }
        let mut trace = vec![0u64; q];
        for a in 0..q {
            let mut t: Fq = 0;
            let mut x = a as Fq;
            for _ in 0..k {
                t = add[t as usize * q + x as usize];
                x = frob[x as usize];
            }
            let ct = decode(t as usize);
            assert!(ct[1..].iter().all(|&c| c == 0), "trace not in prime field");
            trace[a] = ct[0];
        }

        Ok(Arc::new(Field {
            p,
            k,
            modulus,
            q,
            add,
            mul,
            neg,
            inv,
            frob,
            trace,
        }))
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        self.add[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg[b as usize])
    }
    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        self.mul[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        self.neg[a as usize]
    }
    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Fq) -> Fq {
        assert!(a != 0, "division by zero");
        self.inv[a as usize]
    }
    /// Frobenius endomorphism x -> x^p.
    #[inline]
    pub fn frob(&self, a: Fq) -> Fq {
        self.frob[a as usize]
    }
    /// Absolute trace to the prime field, as an integer in `0..p`.
    #[inline]
    pub fn trace(&self, a: Fq) -> u64 {
        self.trace[a as usize]
    }
    /// Coefficient vector of `a` in the power basis.
    pub fn coeffs(&self, a: Fq) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.k);
        let mut e = a as u64;
        for _ in 0..self.k {
            c.push(e % self.p);
            e /= self.p;
        }
        c
    }
    /// Element with the given power-basis coefficients.
    pub fn from_coeffs(&self, c: &[u64]) -> Fq {
        let mut v = 0u64;
        for i in (0..self.k).rev() {
            v = v * self.p + if i < c.len() { c[i] % self.p } else { 0 };
        }
        v as Fq
    }
    /// Embeds an integer via the prime subfield.
    pub fn from_int(&self, n: u64) -> Fq {
        (n % self.p) as Fq
    }
    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        let mut acc: Fq = 1;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }
    /// All elements, in index order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q as u16).map(|i| i as Fq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field() {
        let f = Field::new(2, 1, None).unwrap();
        assert_eq!(f.q, 2);
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
    }

    #[test]
    fn four_is_not_prime() {
        assert!(matches!(Field::new(4, 1, None), Err(Error::NonPrime(4))));
    }

    #[test]
    fn f9_default_modulus() {
        // x^2 + 1 is irreducible mod 3 (-1 is a non-square).
        let f = Field::new(3, 2, None).unwrap();
        assert_eq!(f.q, 9);
        assert_eq!(f.modulus, vec![1, 0, 1]);
        // t^2 = -1 where t is the power-basis generator (index 3).
        let t = f.from_coeffs(&[0, 1]);
        assert_eq!(f.mul(t, t), f.neg(1));
    }

    #[test]
    fn no_default_for_cubic() {
        assert!(matches!(
            Field::new(2, 3, None),
            Err(Error::NoDefaultModulus(3))
        ));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 - 1 = (x-1)(x+1) mod 5
        assert!(matches!(
            Field::new(5, 2, Some(vec![4, 0, 1])),
            Err(Error::ReducibleModulus(5))
        ));
    }

    #[test]
    fn trace_values() {
        let f3 = Field::new(3, 1, None).unwrap();
        assert_eq!(f3.trace(2), 2);
        let f9 = Field::new(3, 2, None).unwrap();
        // Tr(t) = t + t^3 = t - t = 0 when t^2 = -1.
        let t = f9.from_coeffs(&[0, 1]);
        assert_eq!(f9.trace(t), 0);
        // Tr(1) = 1 + 1 = 2.
        assert_eq!(f9.trace(1), 2);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, k) in [(2u64, 1usize), (3, 1), (2, 2), (3, 2), (5, 1)] {
            let f = Field::new(p, k, None).unwrap();
            let q = f.q as u64;
            for a in f.elements() {
                // Frobenius fixed point: a^q = a.
                assert_eq!(f.pow(a, q), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_additive_and_surjective() {
        let f = Field::new(3, 2, None).unwrap();
        let mut seen = std::collections::HashSet::new();
        for a in f.elements() {
            seen.insert(f.trace(a));
            for b in f.elements() {
                assert_eq!(
                    (f.trace(a) + f.trace(b)) % 3,
                    f.trace(f.add(a, b))
                );
            }
        }
        assert_eq!(seen.len(), 3);
    }
}
