//! Fields used throughout: `Q`, `F_p`, and simple extensions `K[x]/(m)`
//! covering `F_{p^d}` and `Q(sqrt 2)`.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::poly;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldDescriptor {
    Rationals,
    PrimeField { p: u64 },
    SimpleExtension { base: Box<FieldDescriptor>, modulus: Vec<String> },
}

impl FieldDescriptor {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Rationals => 0,
            FieldDescriptor::PrimeField { p } => *p,
            FieldDescriptor::SimpleExtension { base, .. } => base.characteristic(),
        }
    }
}

pub trait Field: Clone + Send + Sync + Debug {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn characteristic(&self) -> u64;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn descriptor(&self) -> FieldDescriptor;
    fn format(&self, a: &Self::Elem) -> String;

    /// Number of elements, for finite fields.
    fn size(&self) -> Option<u64> {
        None
    }
    /// The element with the given enumeration index (finite fields only).
    fn element(&self, _idx: u64) -> Self::Elem {
        panic!("element enumeration on an infinite field")
    }

    fn elements(&self) -> Vec<Self::Elem> {
        let n = self.size().expect("finite field");
        (0..n).map(|i| self.element(i)).collect()
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }
    /// Image of a rational, or `None` when the denominator vanishes.
    fn from_rational(&self, q: &BigRational) -> Option<Self::Elem> {
        let d = self.from_bigint(q.denom());
        let n = self.from_bigint(q.numer());
        Some(self.mul(&n, &self.inv(&d)?))
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        Some(self.mul(a, &self.inv(b)?))
    }
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        r
    }
    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn from_rational(&self, q: &BigRational) -> Option<BigRational> {
        Some(q.clone())
    }
    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Rationals
    }
    fn format(&self, a: &BigRational) -> String {
        a.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }
    pub fn p(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.p < (1 << 32) {
            a * b % self.p
        } else {
            mul_mod(*a, *b, self.p)
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| pow_mod(*a, self.p - 2, self.p))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }
    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::PrimeField { p: self.p }
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn size(&self) -> Option<u64> {
        Some(self.p)
    }
    fn element(&self, idx: u64) -> u64 {
        idx % self.p
    }
}

/// `K[x]/(m)` for a monic irreducible `m`; elements are coefficient
/// vectors of length `deg m`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField<F: Field> {
    base: F,
    modulus: Vec<F::Elem>,
}

pub type Gf = ExtField<PrimeField>;

impl<F: Field> ExtField<F> {
    /// The caller is responsible for irreducibility.
    pub fn new(base: F, modulus: Vec<F::Elem>) -> Result<Self> {
        let m = poly::trim(&base, modulus);
        if m.len() < 2 || !base.is_one(m.last().unwrap()) {
            return Err(Error::Invalid("modulus must be monic of degree >= 1".into()));
        }
        Ok(ExtField { base, modulus: m })
    }
    pub fn base(&self) -> &F {
        &self.base
    }
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
    pub fn modulus(&self) -> &[F::Elem] {
        &self.modulus
    }
    /// The class of `x`.
    pub fn generator(&self) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.degree()];
        if self.degree() == 1 {
            v[0] = self.base.neg(&self.modulus[0]);
        } else {
            v[1] = self.base.one();
        }
        v
    }
    pub fn embed(&self, a: &F::Elem) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.degree()];
        v[0] = a.clone();
        v
    }
    /// `Some(c)` when `a` lies in the base field.
    pub fn in_base(&self, a: &[F::Elem]) -> Option<F::Elem> {
        a[1..].iter().all(|c| self.base.is_zero(c)).then(|| a[0].clone())
    }
    fn pad(&self, mut v: Vec<F::Elem>) -> Vec<F::Elem> {
        v.resize(self.degree(), self.base.zero());
        v
    }
}

impl<F: Field> Field for ExtField<F> {
    type Elem = Vec<F::Elem>;
    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.degree()]
    }
    fn one(&self) -> Self::Elem {
        self.embed(&self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let d = self.degree();
        let mut prod = vec![self.base.zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = self.base.add(&prod[i + j], &self.base.mul(x, y));
            }
        }
        // reduce using x^d = -(m_0 + ... + m_{d-1} x^{d-1})
        for k in (d..prod.len()).rev() {
            let c = std::mem::replace(&mut prod[k], self.base.zero());
            if self.base.is_zero(&c) {
                continue;
            }
            for i in 0..d {
                let t = self.base.mul(&c, &self.modulus[i]);
                prod[k - d + i] = self.base.sub(&prod[k - d + i], &t);
            }
        }
        prod.truncate(d);
        prod
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let a_poly = poly::trim(&self.base, a.clone());
        if a_poly.is_empty() {
            return None;
        }
        let (g, s, _) = poly::ext_gcd(&self.base, &a_poly, &self.modulus);
        if g.len() != 1 {
            return None;
        }
        let c = self.base.inv(&g[0])?;
        Some(self.pad(poly::scale(&self.base, &s, &c)))
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn from_bigint(&self, n: &BigInt) -> Self::Elem {
        self.embed(&self.base.from_bigint(n))
    }
    fn from_rational(&self, q: &BigRational) -> Option<Self::Elem> {
        Some(self.embed(&self.base.from_rational(q)?))
    }
    fn descriptor(&self) -> FieldDescriptor {
        if self.degree() == 1 {
            return self.base.descriptor();
        }
        FieldDescriptor::SimpleExtension {
            base: Box::new(self.base.descriptor()),
            modulus: self.modulus.iter().map(|c| self.base.format(c)).collect(),
        }
    }
    fn format(&self, a: &Self::Elem) -> String {
        if self.degree() == 1 {
            return self.base.format(&a[0]);
        }
        let terms: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.base.is_zero(c))
            .map(|(i, c)| match i {
                0 => self.base.format(c),
                1 => format!("{}*x", self.base.format(c)),
                _ => format!("{}*x^{}", self.base.format(c), i),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
    fn size(&self) -> Option<u64> {
        let b = self.base.size()?;
        b.checked_pow(self.degree() as u32)
    }
    fn element(&self, mut idx: u64) -> Self::Elem {
        let b = self.base.size().expect("finite base");
        let mut v = Vec::with_capacity(self.degree());
        for _ in 0..self.degree() {
            v.push(self.base.element(idx % b));
            idx /= b;
        }
        v
    }
}

/// `F_{p^d}` as `F_p[x]/(x^d - c_{d-1} x^{d-1} - ... - c_0)` with the
/// tuple `(c_{d-1}, ..., c_0)` lexicographically first among irreducibles.
pub fn construct_extension(p: u64, d: usize) -> Result<Gf> {
    let base = PrimeField::new(p)?;
    if d == 0 {
        return Err(Error::Invalid("extension degree must be positive".into()));
    }
    if d == 1 {
        return ExtField::new(base, vec![0, 1]);
    }
    let total = p.checked_pow(d as u32).ok_or_else(|| Error::BoundExceeded("p^d overflows".into()))?;
    for idx in 0..total {
        let mut m = vec![0u64; d + 1];
        let mut r = idx;
        for k in 0..d {
            m[k] = (p - r % p) % p;
            r /= p;
        }
        m[d] = 1;
        if poly::is_irreducible_fp(&base, &m) {
            return ExtField::new(base, m);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

/// Short label such as `Q`, `F7`, `F49` or `Q[x]/(x^2-2)`.
pub fn field_label<F: Field>(f: &F) -> String {
    if let Some(q) = f.size() {
        return format!("F{q}");
    }
    match f.descriptor() {
        FieldDescriptor::SimpleExtension { modulus, .. } => {
            let terms: Vec<String> = modulus
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| c.as_str() != "0")
                .map(|(i, c)| match i {
                    0 => c.clone(),
                    1 => format!("{c}*x"),
                    _ => format!("{c}*x^{i}"),
                })
                .collect();
            format!("Q[x]/({})", terms.join("+"))
        }
        _ => "Q".into(),
    }
}

/// `Q(sqrt 2)` as `Q[x]/(x^2 - 2)`.
pub fn q_sqrt2() -> ExtField<Rationals> {
    let m = vec![BigRational::from_integer((-2).into()), BigRational::zero(), BigRational::one()];
    ExtField::new(Rationals, m).unwrap()
}

/// Smallest `e` with `a` in `F_{p^e}`, inside a finite field of characteristic `p`.
pub fn field_of_definition<F: Field>(f: &F, a: &F::Elem, max_degree: usize) -> usize {
    let p = f.characteristic();
    let mut x = a.clone();
    for e in 1..=max_degree {
        x = f.pow(&x, p);
        if x == *a {
            return e;
        }
    }
    max_degree
}

/// A generator of the multiplicative group of a finite field.
pub fn primitive_element<F: Field>(f: &F) -> F::Elem {
    let q = f.size().expect("finite field");
    let n = q - 1;
    let mut primes = Vec::new();
    let mut m = n;
    let mut k = 2;
    while k * k <= m {
        if m % k == 0 {
            primes.push(k);
            while m % k == 0 {
                m /= k;
            }
        }
        k += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for idx in 1..q {
        let g = f.element(idx);
        if f.is_zero(&g) {
            continue;
        }
        if primes.iter().all(|r| !f.is_one(&f.pow(&g, n / r))) {
            return g;
        }
    }
    unreachable!("finite fields have cyclic unit groups")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_moduli() {
        assert_eq!(construct_extension(5, 1).unwrap().descriptor(), FieldDescriptor::PrimeField { p: 5 });
        assert_eq!(construct_extension(7, 2).unwrap().modulus(), &[4, 0, 1]);
        assert_eq!(construct_extension(2, 2).unwrap().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn inverses_in_f49() {
        let f = construct_extension(7, 2).unwrap();
        for a in f.elements().into_iter().skip(1) {
            let b = f.inv(&a).unwrap();
            assert!(f.is_one(&f.mul(&a, &b)));
        }
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let k = q_sqrt2();
        let r = k.generator();
        assert_eq!(k.mul(&r, &r), k.from_i64(2));
    }

    #[test]
    fn primitive_in_f16() {
        let f = construct_extension(2, 4).unwrap();
        let g = primitive_element(&f);
        let mut seen = std::collections::HashSet::new();
        let mut x = f.one();
        for _ in 0..15 {
            seen.insert(x.clone());
            x = f.mul(&x, &g);
        }
        assert_eq!(seen.len(), 15);
    }
}
