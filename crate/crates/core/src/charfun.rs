//! Exact class functions on enumerated groups: pointwise and
//! convolution products, inner products, induction, restriction,
//! inflation, and conjugation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::groups::{Code, Group, Mat};

fn ratio(num: i64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Conjugacy classes of an enumerated group, ordered by least element
/// index (so the class of the identity comes first).
#[derive(Debug)]
pub struct ConjClasses {
    pub group: Arc<Group>,
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl ConjClasses {
    pub fn new(group: Arc<Group>) -> Arc<ConjClasses> {
        let n = group.order();
        let gens: Vec<usize> = group.generators().to_vec();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = vec![start];
            class_of[start] = id;
            let mut frontier = vec![start];
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = group.conj_idx(x, g);
                    if class_of[y] == usize::MAX {
                        class_of[y] = id;
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        Arc::new(ConjClasses {
            group,
            classes,
            class_of,
        })
    }

    pub fn num(&self) -> usize {
        self.classes.len()
    }

    pub fn rep(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    /// Class index of the identity (always 0 by the ordering).
    pub fn identity_class(&self) -> usize {
        0
    }
}

fn same_group(a: &ConjClasses, b: &ConjClasses) -> bool {
    Arc::ptr_eq(&a.group, &b.group) || a.group.elems == b.group.elems
}

/// An exact class function, stored by conjugacy-class values.
#[derive(Debug, Clone)]
pub struct ClassFunction {
    pub classes: Arc<ConjClasses>,
    pub values: Vec<Cyclotomic>,
}

impl ClassFunction {
    pub fn from_class_values(classes: Arc<ConjClasses>, values: Vec<Cyclotomic>) -> ClassFunction {
        assert_eq!(values.len(), classes.num());
        ClassFunction { classes, values }
    }

    /// Builds from an element-level function, checking constancy on
    /// classes.
    pub fn from_elem_fn<F: Fn(usize) -> Cyclotomic>(
        classes: Arc<ConjClasses>,
        f: F,
    ) -> ClassFunction {
        let values: Vec<Cyclotomic> = classes
            .classes
            .iter()
            .map(|cl| {
                let v = f(cl[0]);
                for &x in &cl[1..] {
                    assert!(f(x) == v, "function not constant on a conjugacy class");
                }
                v
            })
            .collect();
        ClassFunction { classes, values }
    }

    pub fn one(classes: Arc<ConjClasses>) -> ClassFunction {
        let n = classes.num();
        ClassFunction::from_class_values(classes, vec![Cyclotomic::one(); n])
    }

    pub fn zero(classes: Arc<ConjClasses>) -> ClassFunction {
        let n = classes.num();
        ClassFunction::from_class_values(classes, vec![Cyclotomic::zero(); n])
    }

    /// The regular character: |G| at 1, zero elsewhere.
    pub fn regular(classes: Arc<ConjClasses>) -> ClassFunction {
        let mut values = vec![Cyclotomic::zero(); classes.num()];
        values[0] = Cyclotomic::from_int(classes.group.order() as i64);
        ClassFunction::from_class_values(classes, values)
    }

    pub fn value_at_elem(&self, i: usize) -> &Cyclotomic {
        &self.values[self.classes.class_of[i]]
    }

    pub fn value_at_code(&self, code: &Code) -> Option<&Cyclotomic> {
        self.classes.group.idx(code).map(|i| self.value_at_elem(i))
    }

    pub fn degree(&self) -> &Cyclotomic {
        &self.values[0]
    }

    pub fn add(&self, other: &ClassFunction) -> Result<ClassFunction> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &ClassFunction) -> Result<ClassFunction> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn pointwise(&self, other: &ClassFunction) -> Result<ClassFunction> {
        self.zip(other, |a, b| a.mul(b))
    }

    fn zip<F: Fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic>(
        &self,
        other: &ClassFunction,
        f: F,
    ) -> Result<ClassFunction> {
        if !same_group(&self.classes, &other.classes) {
            return Err(Error::GroupMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(ClassFunction::from_class_values(self.classes.clone(), values))
    }

    pub fn scale(&self, r: &BigRational) -> ClassFunction {
        let values = self.values.iter().map(|v| v.scale(r)).collect();
        ClassFunction::from_class_values(self.classes.clone(), values)
    }

    pub fn scale_cyc(&self, c: &Cyclotomic) -> ClassFunction {
        let values = self.values.iter().map(|v| v.mul(c)).collect();
        ClassFunction::from_class_values(self.classes.clone(), values)
    }

    pub fn conj_values(&self) -> ClassFunction {
        let values = self.values.iter().map(|v| v.conj()).collect();
        ClassFunction::from_class_values(self.classes.clone(), values)
    }

    /// Convolution (f * g)(x) = (1/|G|) sum_y f(y) g(y^{-1} x).
    pub fn convolve(&self, other: &ClassFunction) -> Result<ClassFunction> {
        if !same_group(&self.classes, &other.classes) {
            return Err(Error::GroupMismatch);
        }
        let grp = &self.classes.group;
        let n = grp.order();
        let values = self
            .classes
            .classes
            .iter()
            .map(|cl| {
                let x = cl[0];
                let mut acc = Cyclotomic::zero();
                for y in 0..n {
                    let fy = self.value_at_elem(y);
                    if fy.is_zero() {
                        continue;
                    }
                    let z = grp.mul_idx(grp.inv_idx(y), x);
                    let gz = other.value_at_elem(z);
                    if !gz.is_zero() {
                        acc = acc.add(&fy.mul(gz));
                    }
                }
                acc.scale(&ratio(1, n as u64))
            })
            .collect();
        Ok(ClassFunction::from_class_values(self.classes.clone(), values))
    }

    /// Hermitian inner product (1/|G|) sum_x f(x) conj(g(x)).
    pub fn inner(&self, other: &ClassFunction) -> Result<Cyclotomic> {
        if !same_group(&self.classes, &other.classes) {
            return Err(Error::GroupMismatch);
        }
        let mut acc = Cyclotomic::zero();
        for (c, cl) in self.classes.classes.iter().enumerate() {
            let term = self.values[c].mul(&other.values[c].conj());
            if !term.is_zero() {
                acc = acc.add(&term.scale(&BigRational::from_integer(BigInt::from(cl.len()))));
            }
        }
        Ok(acc.scale(&ratio(1, self.classes.group.order() as u64)))
    }

    /// Induction to a supergroup sharing the ambient:
    /// Ind(b) = (1/|A|) sum over x in B with x b x^{-1} in A of
    /// f(x b x^{-1}).
    pub fn induce(&self, big: &Arc<ConjClasses>) -> Result<ClassFunction> {
        let a = &self.classes.group;
        let b = &big.group;
        if !a.is_subgroup_of(b) {
            return Err(Error::NotSubgroup("induction source"));
        }
        // B index -> A index where defined.
        let into_a: Vec<Option<usize>> = (0..b.order()).map(|i| a.idx(b.code(i))).collect();
        let values = big
            .classes
            .iter()
            .map(|cl| {
                let bi = cl[0];
                let mut acc = Cyclotomic::zero();
                for x in 0..b.order() {
                    let y = b.conj_idx(bi, b.inv_idx(x));
                    if let Some(ai) = into_a[y] {
                        let v = self.value_at_elem(ai);
                        if !v.is_zero() {
                            acc = acc.add(v);
                        }
                    }
                }
                acc.scale(&ratio(1, a.order() as u64))
            })
            .collect();
        Ok(ClassFunction::from_class_values(big.clone(), values))
    }

    /// Restriction to a subgroup sharing the ambient.
    pub fn restrict(&self, small: &Arc<ConjClasses>) -> Result<ClassFunction> {
        let a = &small.group;
        let b = &self.classes.group;
        if !a.is_subgroup_of(b) {
            return Err(Error::NotSubgroup("restriction target"));
        }
        let values = small
            .classes
            .iter()
            .map(|cl| {
                let code = a.code(cl[0]);
                self.value_at_code(code).expect("subgroup element").clone()
            })
            .collect();
        Ok(ClassFunction::from_class_values(small.clone(), values))
    }

    /// Conjugate class function (^g f)(x) = f(x^g) = f(g^{-1} x g),
    /// defined on `target` = g A g^{-1}.
    pub fn conjugate(&self, g: &Mat, target: &Arc<ConjClasses>) -> Result<ClassFunction> {
        let amb = self.classes.group.ambient();
        let gi = amb.mat_inv(g);
        let values: Result<Vec<Cyclotomic>> = target
            .classes
            .iter()
            .map(|cl| {
                let x = target.group.mat(cl[0]);
                let moved = amb.mat_mul(&amb.mat_mul(&gi, x), g);
                self.value_at_code(&amb.code_of(&moved))
                    .cloned()
                    .ok_or(Error::NotSubgroup("conjugated domain"))
            })
            .collect();
        Ok(ClassFunction::from_class_values(target.clone(), values?))
    }

    /// True iff constant on every block of the given element-index
    /// partition.
    pub fn is_superclass_function(&self, blocks: &[Vec<usize>]) -> bool {
        blocks.iter().all(|blk| {
            let v = self.value_at_elem(blk[0]);
            blk[1..].iter().all(|&x| self.value_at_elem(x) == v)
        })
    }
}

/// A validated surjective homomorphism G -> H with H a quotient model
/// of G; supports inflation of class functions on H to G.
#[derive(Debug)]
pub struct QuotientMap {
    pub big: Arc<ConjClasses>,
    pub small: Arc<ConjClasses>,
    /// G element index -> H element index.
    pub elem_map: Vec<usize>,
}

impl QuotientMap {
    pub fn new<F: Fn(&Code) -> Code>(
        big: Arc<ConjClasses>,
        small: Arc<ConjClasses>,
        proj: F,
    ) -> Result<QuotientMap> {
        let g = &big.group;
        let h = &small.group;
        let elem_map: Vec<usize> = g
            .elems
            .iter()
            .map(|c| h.idx(&proj(c)).ok_or(Error::NotQuotient))
            .collect::<Result<_>>()?;
        // Homomorphism and surjectivity checks.
        let mut hit = vec![false; h.order()];
        for (i, &m) in elem_map.iter().enumerate() {
            hit[m] = true;
            for j in 0..g.order() {
                if h.mul_idx(m, elem_map[j]) != elem_map[g.mul_idx(i, j)] {
                    return Err(Error::NotQuotient);
                }
            }
        }
        if !hit.iter().all(|&b| b) || g.order() % h.order() != 0 {
            return Err(Error::NotQuotient);
        }
        Ok(QuotientMap {
            big,
            small,
            elem_map,
        })
    }

    /// Inflation: Inf(f)(g) = f(proj(g)).
    pub fn inflate(&self, f: &ClassFunction) -> Result<ClassFunction> {
        if !same_group(&f.classes, &self.small) {
            return Err(Error::GroupMismatch);
        }
        let values = self
            .big
            .classes
            .iter()
            .map(|cl| f.value_at_elem(self.elem_map[cl[0]]).clone())
            .collect();
        Ok(ClassFunction::from_class_values(self.big.clone(), values))
    }
}
