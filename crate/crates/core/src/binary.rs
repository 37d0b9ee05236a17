//! Binary forms in `(s, t)`. Index `i` holds the coefficient of `s^(d-i) t^i`,
//! so the coefficient vector is also the dehomogenization at `s = 1`,
//! read as a polynomial in `t` with the lowest degree first.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm<E> {
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> BinaryForm<E> {
    pub fn new(coeffs: Vec<E>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form has degree >= 0");
        BinaryForm { coeffs }
    }
    pub fn zero<F: Field<Elem = E>>(f: &F, degree: usize) -> Self {
        BinaryForm { coeffs: vec![f.zero(); degree + 1] }
    }
    pub fn constant<F: Field<Elem = E>>(_f: &F, c: E) -> Self {
        BinaryForm { coeffs: vec![c] }
    }
    /// `c s^(d-i) t^i`.
    pub fn monomial<F: Field<Elem = E>>(f: &F, degree: usize, i: usize, c: E) -> Self {
        let mut m = Self::zero(f, degree);
        m.coeffs[i] = c;
        m
    }
    /// The linear form `b s - a t`, vanishing at `(a:b)`.
    pub fn vanishing_at<F: Field<Elem = E>>(f: &F, a: &E, b: &E) -> Self {
        BinaryForm { coeffs: vec![b.clone(), f.neg(a)] }
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> &E {
        &self.coeffs[i]
    }
    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.coeffs.iter().all(|c| f.is_zero(c))
    }

    pub fn map<F: Field<Elem = E>, G: Field>(&self, _f: &F, phi: impl Fn(&E) -> G::Elem) -> BinaryForm<G::Elem> {
        BinaryForm { coeffs: self.coeffs.iter().map(phi).collect() }
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree(), "adding forms of different degree");
        BinaryForm { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f.add(a, b)).collect() }
    }
    pub fn sub<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree(), "subtracting forms of different degree");
        BinaryForm { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f.sub(a, b)).collect() }
    }
    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        BinaryForm { coeffs: self.coeffs.iter().map(|a| f.mul(a, c)).collect() }
    }
    pub fn mul<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        let mut out = vec![f.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        BinaryForm { coeffs: out }
    }
    pub fn pow<F: Field<Elem = E>>(&self, f: &F, e: usize) -> Self {
        let mut r = Self::constant(f, f.one());
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, s: &E, t: &E) -> E {
        let d = self.degree();
        let spow = powers(f, s, d);
        let tpow = powers(f, t, d);
        self.coeffs.iter().enumerate().fold(f.zero(), |acc, (i, c)| f.add(&acc, &f.mul(c, &f.mul(&spow[d - i], &tpow[i]))))
    }

    /// `f(a s + b t, c s + d t)` for `m = [[a, b], [c, d]]`.
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, m: &[[E; 2]; 2]) -> Self {
        let d = self.degree();
        let ls = BinaryForm { coeffs: vec![m[0][0].clone(), m[0][1].clone()] };
        let lt = BinaryForm { coeffs: vec![m[1][0].clone(), m[1][1].clone()] };
        let sp: Vec<Self> = (0..=d).map(|k| ls.pow(f, k)).collect();
        let tp: Vec<Self> = (0..=d).map(|k| lt.pow(f, k)).collect();
        let mut out = Self::zero(f, d);
        for (i, c) in self.coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            out = out.add(f, &sp[d - i].mul(f, &tp[i]).scale(f, c));
        }
        out
    }

    /// Partial derivatives `(df/ds, df/dt)`, each of degree `d - 1`.
    pub fn partials<F: Field<Elem = E>>(&self, f: &F) -> (Self, Self) {
        let d = self.degree();
        if d == 0 {
            return (Self::zero(f, 0), Self::zero(f, 0));
        }
        let ds = (0..d).map(|i| f.mul(&self.coeffs[i], &f.from_i64((d - i) as i64))).collect();
        let dt = (0..d).map(|i| f.mul(&self.coeffs[i + 1], &f.from_i64((i + 1) as i64))).collect();
        (BinaryForm { coeffs: ds }, BinaryForm { coeffs: dt })
    }

    /// Multiplicity of the factor `s`, i.e. of the root `(0:1)`; `None` for zero.
    fn s_order<F: Field<Elem = E>>(&self, f: &F) -> Option<usize> {
        let dt = poly::degree(f, &self.coeffs)?;
        Some(self.degree() - dt)
    }

    fn dehomogenized<F: Field<Elem = E>>(&self, f: &F) -> Vec<E> {
        poly::trim(f, self.coeffs.clone())
    }

    fn homogenize<F: Field<Elem = E>>(f: &F, p: Vec<E>, degree: usize) -> Self {
        let mut c = poly::trim(f, p);
        assert!(c.len() <= degree + 1);
        c.resize(degree + 1, f.zero());
        BinaryForm { coeffs: c }
    }

    /// Exact quotient, or `None` if `o` does not divide `self`.
    pub fn div_exact<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Option<Self> {
        if o.is_zero(f) || o.degree() > self.degree() {
            return None;
        }
        if self.is_zero(f) {
            return Some(Self::zero(f, self.degree() - o.degree()));
        }
        let (q, r) = poly::divrem(f, &self.dehomogenized(f), &o.dehomogenized(f));
        let dq = self.degree() - o.degree();
        if !r.is_empty() || poly::degree(f, &q).map_or(false, |k| k > dq) {
            return None;
        }
        Some(Self::homogenize(f, q, dq))
    }

    /// Order of vanishing at `(a:b)`; `None` for the zero form.
    pub fn root_multiplicity<F: Field<Elem = E>>(&self, f: &F, a: &E, b: &E) -> Option<usize> {
        if self.is_zero(f) {
            return None;
        }
        let l = Self::vanishing_at(f, a, b);
        let mut g = self.clone();
        let mut m = 0;
        while g.degree() > 0 {
            match g.div_exact(f, &l) {
                Some(q) => {
                    g = q;
                    m += 1;
                }
                None => break,
            }
        }
        Some(m)
    }

    /// Scales so that the last nonzero coefficient is one.
    pub fn normalized<F: Field<Elem = E>>(&self, f: &F) -> Self {
        match self.coeffs.iter().rposition(|c| !f.is_zero(c)) {
            None => self.clone(),
            Some(k) => self.scale(f, &f.inv(&self.coeffs[k]).unwrap()),
        }
    }

    /// Roots in `P^1(F)` as `(s, t)` pairs, normalized to `(0:1)` or `(1:t)`.
    pub fn projective_roots<F: Field<Elem = E>>(&self, f: &F, seed: u64) -> Vec<(E, E)> {
        let mut out = Vec::new();
        if self.s_order(f).map_or(false, |k| k > 0) {
            out.push((f.zero(), f.one()));
        }
        for r in poly::roots_finite(f, &self.dehomogenized(f), seed) {
            out.push((f.one(), r));
        }
        out
    }

    pub fn format<F: Field<Elem = E>>(&self, f: &F) -> String {
        let d = self.degree();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| {
                let mono = match (d - i, i) {
                    (0, 0) => String::new(),
                    (a, b) => {
                        let part = |v: &str, e: usize| match e {
                            0 => String::new(),
                            1 => v.to_string(),
                            e => format!("{v}^{e}"),
                        };
                        [part("s", a), part("t", b)].into_iter().filter(|x| !x.is_empty()).collect::<Vec<_>>().join("*")
                    }
                };
                let cs = f.format(c);
                if mono.is_empty() {
                    cs
                } else if f.is_one(c) {
                    mono
                } else {
                    format!("({cs})*{mono}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

fn powers<F: Field>(f: &F, x: &F::Elem, n: usize) -> Vec<F::Elem> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(f.one());
    for k in 0..n {
        let next = f.mul(&v[k], x);
        v.push(next);
    }
    v
}

/// Monic gcd of two binary forms; the factor `s` is tracked separately so
/// roots at `(0:1)` are not lost by dehomogenizing.
pub fn binary_gcd<F: Field>(f: &F, a: &BinaryForm<F::Elem>, b: &BinaryForm<F::Elem>) -> Result<BinaryForm<F::Elem>> {
    match (a.s_order(f), b.s_order(f)) {
        (None, None) => Err(Error::ZeroInput("gcd of two zero forms")),
        (None, Some(_)) => Ok(b.normalized(f)),
        (Some(_), None) => Ok(a.normalized(f)),
        (Some(ka), Some(kb)) => {
            let m = ka.min(kb);
            let g = poly::gcd(f, &a.dehomogenized(f), &b.dehomogenized(f));
            let e = g.len() - 1;
            Ok(BinaryForm::homogenize(f, g, e + m))
        }
    }
}

/// Gcd of a list, skipping zero forms; errors if all are zero.
pub fn binary_gcd_all<F: Field>(f: &F, forms: &[BinaryForm<F::Elem>]) -> Result<BinaryForm<F::Elem>> {
    let mut acc: Option<BinaryForm<F::Elem>> = None;
    for g in forms {
        if g.is_zero(f) {
            continue;
        }
        acc = Some(match acc {
            None => g.normalized(f),
            Some(h) => binary_gcd(f, &h, g)?,
        });
        if acc.as_ref().unwrap().degree() == 0 {
            break;
        }
    }
    acc.ok_or(Error::ZeroInput("gcd of zero forms"))
}

/// Resultant of two binary forms with their formal degrees (Sylvester matrix
/// built from the full coefficient vectors, so vanishing leading terms count).
pub fn binary_resultant<F: Field>(f: &F, a: &BinaryForm<F::Elem>, b: &BinaryForm<F::Elem>) -> F::Elem {
    let (m, n) = (a.degree(), b.degree());
    if m + n == 0 {
        return f.one();
    }
    let size = m + n;
    let mut rows = vec![vec![f.zero(); size]; size];
    for i in 0..n {
        for (k, c) in a.coeffs().iter().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in b.coeffs().iter().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    crate::matrix::Matrix::from_rows(f, rows).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use num_rational::BigRational;

    fn q(v: &[i64]) -> BinaryForm<BigRational> {
        BinaryForm::new(v.iter().map(|&x| crate::arith::int(x)).collect())
    }

    #[test]
    fn gcd_examples() {
        let f = Rationals;
        assert_eq!(binary_gcd(&f, &q(&[0, 1, 0, 0]), &q(&[0, 0, 1, 0])).unwrap(), q(&[0, 1, 0]));
        assert_eq!(binary_gcd(&f, &q(&[1, 0, -1]), &q(&[1, -1])).unwrap(), q(&[-1, 1]));
        assert!(binary_gcd(&f, &q(&[0, 0]), &q(&[0])).is_err());
    }

    #[test]
    fn compose_and_eval() {
        let f = PrimeField::new(11).unwrap();
        let g = BinaryForm::new(vec![1, 2, 3, 4]);
        let m = [[2, 3], [5, 7]];
        let h = g.compose(&f, &m);
        for (s, t) in [(1, 0), (0, 1), (3, 4)] {
            let ss = f.add(&f.mul(&2, &s), &f.mul(&3, &t));
            let tt = f.add(&f.mul(&5, &s), &f.mul(&7, &t));
            assert_eq!(h.eval(&f, &s, &t), g.eval(&f, &ss, &tt));
        }
    }

    #[test]
    fn multiplicities() {
        let f = Rationals;
        // s^2 t (s - t)
        let g = q(&[0, 1, 0, 0]).mul(&f, &q(&[1, -1]));
        assert_eq!(g.root_multiplicity(&f, &crate::arith::int(0), &crate::arith::int(1)), Some(2));
        assert_eq!(g.root_multiplicity(&f, &crate::arith::int(1), &crate::arith::int(0)), Some(1));
        assert_eq!(g.root_multiplicity(&f, &crate::arith::int(1), &crate::arith::int(1)), Some(1));
        assert_eq!(g.root_multiplicity(&f, &crate::arith::int(2), &crate::arith::int(1)), Some(0));
    }

    #[test]
    fn resultant_detects_common_root() {
        let f = Rationals;
        assert!(f.is_zero(&binary_resultant(&f, &q(&[0, 1, 0]), &q(&[0, 1]))));
        assert!(!f.is_zero(&binary_resultant(&f, &q(&[1, 0, 1]), &q(&[1, -1]))));
    }
}
