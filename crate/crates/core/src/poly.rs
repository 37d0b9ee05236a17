//! Dense univariate polynomials as coefficient vectors, lowest degree first.
//! The empty vector is the zero polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Field, Rationals};
use crate::matrix;

pub fn trim<F: Field>(f: &F, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
    while a.last().map_or(false, |c| f.is_zero(c)) {
        a.pop();
    }
    a
}

/// Degree, with `None` for zero.
pub fn degree<F: Field>(f: &F, a: &[F::Elem]) -> Option<usize> {
    a.iter().rposition(|c| !f.is_zero(c))
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n).map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, out)
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n).map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, out)
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    trim(f, a.iter().enumerate().skip(1).map(|(i, c)| f.mul(&f.from_i64(i as i64), c)).collect())
}

/// Quotient and remainder; panics on a zero divisor.
pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let b = trim(f, b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(f, a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(b.last().unwrap()).unwrap();
    let mut q = vec![f.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = f.mul(r.last().unwrap(), &lead_inv);
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bc));
        }
        q[shift] = c;
        r.pop();
        r = trim(f, r);
    }
    (trim(f, q), r)
}

pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(l) => scale(f, a, &f.inv(l).unwrap()),
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut x = trim(f, a.to_vec());
    let mut y = trim(f, b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

/// `(g, s, t)` with `s a + t b = g`, `g` not normalized.
pub fn ext_gcd<F: Field>(
    f: &F,
    a: &[F::Elem],
    b: &[F::Elem],
) -> (Vec<F::Elem>, Vec<F::Elem>, Vec<F::Elem>) {
    let (mut r0, mut r1) = (trim(f, a.to_vec()), trim(f, b.to_vec()));
    let (mut s0, mut s1) = (vec![f.one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![f.one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &q, &s1));
        let t2 = sub(f, &t0, &mul(f, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

pub fn mul_mod<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Vec<F::Elem> {
    divrem(f, &mul(f, a, b), m).1
}

pub fn pow_mod<F: Field>(f: &F, a: &[F::Elem], mut e: u128, m: &[F::Elem]) -> Vec<F::Elem> {
    let mut base = divrem(f, a, m).1;
    let mut r = divrem(f, &[f.one()], m).1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(f, &r, &base, m);
        }
        base = mul_mod(f, &base, &base, m);
        e >>= 1;
    }
    r
}

/// `x^(q^k) mod m` by repeated `q`-th powering.
pub fn frobenius_power<F: Field>(f: &F, k: usize, m: &[F::Elem]) -> Vec<F::Elem> {
    let q = f.size().expect("finite field") as u128;
    let mut x = divrem(f, &[f.zero(), f.one()], m).1;
    for _ in 0..k {
        x = pow_mod(f, &x, q, m);
    }
    x
}

/// Irreducibility over a finite field via `gcd(m, x^(q^i) - x) = 1`.
pub fn is_irreducible_fp<F: Field>(f: &F, m: &[F::Elem]) -> bool {
    let m = trim(f, m.to_vec());
    let d = match degree(f, &m) {
        None | Some(0) => return false,
        Some(d) => d,
    };
    let x = vec![f.zero(), f.one()];
    let q = f.size().expect("finite field") as u128;
    let mut xp = divrem(f, &x, &m).1;
    for _ in 1..=d / 2 {
        xp = pow_mod(f, &xp, q, &m);
        let g = gcd(f, &m, &sub(f, &xp, &x));
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Resultant as the Sylvester determinant of the formal degrees `len - 1`.
pub fn resultant<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Result<F::Elem> {
    let a = trim(f, a.to_vec());
    let b = trim(f, b.to_vec());
    if a.is_empty() || b.is_empty() {
        return Err(Error::ZeroInput("resultant of a zero polynomial"));
    }
    let m = sylvester(f, &a, &b);
    Ok(matrix::Matrix::from_rows(f, m).determinant())
}

/// Sylvester matrix of two coefficient vectors (lowest first), using their lengths as formal degrees.
pub fn sylvester<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    let mut rows = Vec::with_capacity(n);
    for i in 0..db {
        let mut row = vec![f.zero(); n];
        for (k, c) in a.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..da {
        let mut row = vec![f.zero(); n];
        for (k, c) in b.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Integer resultant with formal degrees `len - 1`, by fraction-free elimination.
pub fn resultant_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    if n == 0 {
        return BigInt::from(1);
    }
    let mut rows = vec![vec![BigInt::zero(); n]; n];
    for i in 0..db {
        for (k, c) in a.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..da {
        for (k, c) in b.iter().rev().enumerate() {
            rows[db + i][i + k] = c.clone();
        }
    }
    matrix::bareiss_det(rows)
}

/// All roots of `a` in a finite field, without multiplicity.
pub fn roots_finite<F: Field>(f: &F, a: &[F::Elem], seed: u64) -> Vec<F::Elem> {
    let a = trim(f, a.to_vec());
    let d = match degree(f, &a) {
        None => return f.elements(),
        Some(0) => return Vec::new(),
        Some(d) => d,
    };
    let q = f.size().expect("finite field");
    if q <= 4096 || q <= 64 * d as u64 {
        return f.elements().into_iter().filter(|x| f.is_zero(&eval(f, &a, x))).collect();
    }
    // product of the distinct linear factors
    let m = monic(f, &a);
    let xq = frobenius_power(f, 1, &m);
    let g = gcd(f, &m, &sub(f, &xq, &[f.zero(), f.one()]));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    split_linear(f, &g, &mut rng, &mut out);
    out
}

fn split_linear<F: Field>(f: &F, g: &[F::Elem], rng: &mut ChaCha8Rng, out: &mut Vec<F::Elem>) {
    let d = degree(f, g).unwrap_or(0);
    if d == 0 {
        return;
    }
    if d == 1 {
        out.push(f.neg(&f.div(&g[0], &g[1]).unwrap()));
        return;
    }
    let q = f.size().unwrap();
    loop {
        let shift = f.element(rng.gen_range(0..q));
        let lin = vec![shift, f.one()];
        let h = if q % 2 == 1 {
            let pw = pow_mod(f, &lin, ((q - 1) / 2) as u128, g);
            sub(f, &pw, &[f.one()])
        } else {
            // absolute trace map: sum of lin^(2^i)
            let mut acc = Vec::new();
            let mut term = divrem(f, &lin, g).1;
            let mut k = q;
            while k > 1 {
                acc = add(f, &acc, &term);
                term = mul_mod(f, &term, &term, g);
                k /= 2;
            }
            acc
        };
        let c = gcd(f, g, &h);
        let dc = degree(f, &c).unwrap_or(0);
        if dc > 0 && dc < d {
            let (rest, _) = divrem(f, g, &c);
            split_linear(f, &c, rng, out);
            split_linear(f, &rest, rng, out);
            return;
        }
    }
}

/// Rational roots of a polynomial with rational coefficients.
pub fn rational_roots(a: &[BigRational]) -> Vec<BigRational> {
    let q = Rationals;
    let a = trim(&q, a.to_vec());
    if a.len() < 2 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    let mut rest = a.clone();
    if rest[0].is_zero() {
        roots.push(BigRational::zero());
        while rest[0].is_zero() {
            rest.remove(0);
        }
    }
    if rest.len() < 2 {
        return roots;
    }
    let lcm = rest.iter().fold(BigInt::from(1), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let ints: Vec<BigInt> = rest.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let lead = ints.last().unwrap().abs();
    let cons = ints[0].abs();
    let nums = small_divisors(&cons);
    let dens = small_divisors(&lead);
    for n in &nums {
        for d in &dens {
            for sign in [1, -1] {
                let r = BigRational::new(BigInt::from(sign) * n, d.clone());
                if !roots.contains(&r) && eval(&q, &rest, &r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    use num_traits::ToPrimitive;
    let n = n.to_u64().expect("coefficient too large for the rational root search");
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(BigInt::from(k));
            if k * k != n {
                out.push(BigInt::from(n / k));
            }
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn division_identity() {
        let f = PrimeField::new(7).unwrap();
        let a = vec![3, 0, 5, 1, 2];
        let b = vec![1, 4, 1];
        let (q, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
    }

    #[test]
    fn resultant_small() {
        let q = Rationals;
        let one = BigRational::from_integer(1.into());
        let a = vec![one.clone(), BigRational::zero(), one.clone()];
        let b = vec![-one.clone(), one.clone()];
        assert_eq!(resultant(&q, &a, &b).unwrap(), BigRational::from_integer(2.into()));
        let ai: Vec<BigInt> = vec![1.into(), 0.into(), 1.into()];
        let bi: Vec<BigInt> = vec![(-1).into(), 1.into()];
        assert_eq!(resultant_int(&ai, &bi), BigInt::from(2));
    }

    #[test]
    fn irreducibility() {
        let f = PrimeField::new(2).unwrap();
        assert!(is_irreducible_fp(&f, &[1, 1, 1]));
        assert!(!is_irreducible_fp(&f, &[1, 0, 1]));
        assert!(is_irreducible_fp(&f, &[1, 1, 0, 1]));
    }

    #[test]
    fn large_field_roots_split() {
        let f = PrimeField::new(1_000_003).unwrap();
        // (x - 5)(x - 17)(x^2 + 1) has exactly two roots when -1 is a non-residue
        let a = mul(&f, &mul(&f, &[f.neg(&5), 1], &[f.neg(&17), 1]), &[1, 0, 1]);
        let mut r = roots_finite(&f, &a, 1);
        r.sort();
        assert_eq!(r, vec![5, 17]);
    }

    #[test]
    fn rational_root_search() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        // (2x - 1)(x + 3) = 2x^2 + 5x - 3
        let mut roots = rational_roots(&[r(-3, 1), r(5, 1), r(2, 1)]);
        roots.sort();
        assert_eq!(roots, vec![r(-3, 1), r(1, 2)]);
    }
}
