//! Sparse multivariate polynomials keyed by exponent vectors.

use std::collections::BTreeMap;

use crate::binary::BinaryForm;
use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly<E> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, E>,
}

impl<E: Clone + PartialEq> MultiPoly<E> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }
    pub fn constant<F: Field<Elem = E>>(f: &F, nvars: usize, c: E) -> Self {
        Self::from_terms(f, nvars, vec![(vec![0; nvars], c)])
    }
    pub fn var<F: Field<Elem = E>>(f: &F, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(f, nvars, vec![(e, f.one())])
    }
    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms<F: Field<Elem = E>>(f: &F, nvars: usize, terms: Vec<(Vec<u32>, E)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(f, e, c);
        }
        p
    }
    fn add_term<F: Field<Elem = E>>(&mut self, f: &F, e: Vec<u32>, c: E) {
        if f.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = f.add(old, &c);
                if f.is_zero(&s) {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &E)> {
        self.terms.iter()
    }
    pub fn coeff(&self, e: &[u32]) -> Option<&E> {
        self.terms.get(e)
    }
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }
    /// The common degree if homogeneous; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(f, e.clone(), c.clone());
        }
        p
    }
    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), f.neg(c))).collect() }
    }
    pub fn sub<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        self.add(f, &o.neg(f))
    }
    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        Self::from_terms(f, self.nvars, self.terms.iter().map(|(e, x)| (e.clone(), f.mul(x, c))).collect())
    }
    pub fn mul<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(f, e, f.mul(c1, c2));
            }
        }
        p
    }
    pub fn pow<F: Field<Elem = E>>(&self, f: &F, k: u32) -> Self {
        let mut r = Self::constant(f, self.nvars, f.one());
        for _ in 0..k {
            r = r.mul(f, self);
        }
        r
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, x: &[E]) -> E {
        assert_eq!(x.len(), self.nvars);
        self.terms.iter().fold(f.zero(), |acc, (e, c)| {
            let m = e.iter().zip(x).fold(c.clone(), |m, (&k, xi)| f.mul(&m, &f.pow(xi, k as u64)));
            f.add(&acc, &m)
        })
    }

    pub fn partial<F: Field<Elem = E>>(&self, f: &F, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            p.add_term(f, e2, f.mul(c, &f.from_i64(e[i] as i64)));
        }
        p
    }

    /// Substitutes a binary form of common degree `d` for each variable.
    pub fn substitute_forms<F: Field<Elem = E>>(&self, f: &F, forms: &[BinaryForm<E>]) -> Result<BinaryForm<E>> {
        if forms.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: forms.len() });
        }
        let deg = self.homogeneous_degree().unwrap_or(0) as usize;
        let d = forms.first().map_or(0, |g| g.degree());
        let mut cache: Vec<Vec<BinaryForm<E>>> = forms.iter().map(|g| vec![BinaryForm::constant(f, f.one()), g.clone()]).collect();
        let mut out = BinaryForm::zero(f, deg * d);
        for (e, c) in &self.terms {
            let mut m = BinaryForm::constant(f, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(f, &forms[i]);
                    cache[i].push(next);
                }
                m = m.mul(f, &cache[i][k as usize]);
            }
            if m.degree() != out.degree() {
                return Err(Error::Invalid("substitution into a non-homogeneous polynomial".into()));
            }
            out = out.add(f, &m);
        }
        Ok(out)
    }

    /// Substitutes polynomials (in a common ring) for the variables.
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, subs: &[MultiPoly<E>]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let n = subs.first().map_or(0, |s| s.nvars);
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut m = Self::constant(f, n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m = m.mul(f, &subs[i].pow(f, k));
                }
            }
            out = out.add(f, &m);
        }
        out
    }

    /// `p(A x)` for a square matrix `A` given by rows.
    pub fn pullback<F: Field<Elem = E>>(&self, f: &F, a: &[Vec<E>]) -> Self {
        let n = self.nvars;
        let lin: Vec<Self> = a
            .iter()
            .map(|row| Self::from_terms(f, n, row.iter().enumerate().map(|(j, c)| (unit(n, j), c.clone())).collect()))
            .collect();
        self.compose(f, &lin)
    }

    pub fn map<F: Field<Elem = E>, G: Field>(&self, g: &G, phi: impl Fn(&E) -> G::Elem) -> MultiPoly<G::Elem> {
        MultiPoly::from_terms(g, self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), phi(c))).collect())
    }

    pub fn try_map<G: Field>(&self, g: &G, phi: impl Fn(&E) -> Option<G::Elem>) -> Option<MultiPoly<G::Elem>> {
        let terms = self.terms.iter().map(|(e, c)| phi(c).map(|x| (e.clone(), x))).collect::<Option<Vec<_>>>()?;
        Some(MultiPoly::from_terms(g, self.nvars, terms))
    }

    pub fn format<F: Field<Elem = E>>(&self, f: &F, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { names[i].to_string() } else { format!("{}^{}", names[i], k) })
                    .collect();
                match (mono.is_empty(), f.is_one(c)) {
                    (true, _) => f.format(c),
                    (false, true) => mono.join("*"),
                    (false, false) => format!("({})*{}", f.format(c), mono.join("*")),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

/// All exponent vectors of total degree `d` in `n` variables, in lexicographic order.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n - 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Parses a polynomial written as a sum of monomials with integer or
/// rational coefficients, e.g. `a0*a4 - a1*a3 + a2^2`.
pub fn parse_poly<F: Field>(f: &F, names: &[&str], src: &str) -> Result<MultiPoly<F::Elem>> {
    let n = names.len();
    let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = MultiPoly::zero(n);
    let mut chunks = Vec::new();
    let mut cur = String::new();
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
            chunks.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        chunks.push(cur);
    }
    for chunk in chunks {
        let (sign, body) = match chunk.strip_prefix('-') {
            Some(b) => (-1, b.to_string()),
            None => (1, chunk.trim_start_matches('+').to_string()),
        };
        let mut coeff = crate::arith::int(sign);
        let mut e = vec![0u32; n];
        for factor in body.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, x)) => (b, x.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {factor}")))?),
                None => (factor, 1),
            };
            if let Some(i) = names.iter().position(|nm| *nm == base) {
                e[i] += exp;
            } else {
                let v = crate::arith::parse_rational(base)?;
                coeff *= crate::arith::pow_rational(&v, exp as i64);
            }
        }
        let c = f.from_rational(&coeff).ok_or_else(|| Error::Characteristic(format!("coefficient {coeff} not defined")))?;
        out.add_term(f, e, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn parse_and_eval() {
        let f = Rationals;
        let p = parse_poly(&f, &["x", "y"], "x^2 - 3*x*y + 1/2*y^2").unwrap();
        assert_eq!(p.eval(&f, &[int(2), int(1)]), crate::arith::rat(-3, 2));
        assert_eq!(p.homogeneous_degree(), Some(2));
    }

    #[test]
    fn partials_and_pullback() {
        let f = PrimeField::new(7).unwrap();
        let p = parse_poly(&f, &["x", "y"], "x*y").unwrap();
        assert_eq!(p.partial(&f, 0), MultiPoly::var(&f, 2, 1));
        let swapped = p.pullback(&f, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(swapped, p);
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(5, 2).len(), 15);
        assert_eq!(monomials(7, 2).len(), 28);
    }

    #[test]
    fn substitution_of_forms() {
        let f = Rationals;
        let p = parse_poly(&f, &["x", "y", "z"], "x*z - y^2").unwrap();
        // the conic (s^2 : st : t^2)
        let forms = vec![
            BinaryForm::new(vec![int(1), int(0), int(0)]),
            BinaryForm::new(vec![int(0), int(1), int(0)]),
            BinaryForm::new(vec![int(0), int(0), int(1)]),
        ];
        assert!(p.substitute_forms(&f, &forms).unwrap().is_zero(&f));
    }
}
