//! Integer and rational helpers: primality, valuations, trial factoring,
//! and a small parser for rational expressions such as `5/4+3^4`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Prime powers `q <= n` as `(q, p, d)`.
pub fn prime_powers_up_to(n: u64) -> Vec<(u64, u64, u32)> {
    let mut out = Vec::new();
    for p in primes_up_to(n) {
        let mut q = p;
        let mut d = 1;
        while q <= n {
            out.push((q, p, d));
            q *= p;
            d += 1;
        }
    }
    out.sort();
    out
}

/// Splits `q = p^d`, or `None` if `q` is not a prime power.
pub fn prime_power_split(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|k| q % k == 0)?;
    let mut r = q;
    let mut d = 0;
    while r % p == 0 {
        r /= p;
        d += 1;
    }
    (r == 1).then_some((p, d))
}

pub fn int_valuation(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// `x = p^v * unit` with the unit prime to `p`.
pub fn valuation(x: &BigRational, p: u64) -> Result<(i64, BigRational)> {
    if x.is_zero() {
        return Err(Error::ZeroInput("valuation of zero"));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let vn = int_valuation(x.numer(), p).unwrap();
    let vd = int_valuation(x.denom(), p).unwrap();
    let v = vn - vd;
    let unit = x / pow_rational(&BigRational::from_integer(BigInt::from(p)), v);
    Ok((v, unit))
}

pub fn vp(x: &BigRational, p: u64) -> i64 {
    valuation(x, p).map(|(v, _)| v).unwrap_or(i64::MAX)
}

pub fn pow_rational(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    let mut r = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        r *= &base;
    }
    r
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Residue of a `p`-integral rational modulo `p`.
pub fn reduce_mod(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = x.denom().mod_floor(&pb);
    if d.is_zero() {
        return None;
    }
    let n = x.numer().mod_floor(&pb).to_u64().unwrap();
    let d = d.to_u64().unwrap();
    Some(mul_mod(n, pow_mod(d, p - 2, p), p))
}

/// Trial division up to `bound`; returns prime factors and the unfactored cofactor.
pub fn trial_factor(n: &BigInt, bound: u64) -> (Vec<(u64, u32)>, BigInt) {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return (out, m);
    }
    let mut p = 2u64;
    let mut complete = false;
    while p <= bound {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            complete = true;
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        let prime_cofactor = complete || m.to_u64().map(is_prime).unwrap_or(false);
        if prime_cofactor {
            if let Some(small) = m.to_u64() {
                out.push((small, 1));
                out.sort();
                m = BigInt::one();
            }
        }
    }
    (out, m)
}

/// Parses `+ - * / ^` expressions over rational literals.
pub fn parse_rational(src: &str) -> Result<BigRational> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let v = parse_expr(&chars, &mut pos)?;
    if pos != chars.len() {
        return Err(Error::Parse(format!("trailing input in {src:?}")));
    }
    Ok(v)
}

fn parse_expr(c: &[char], pos: &mut usize) -> Result<BigRational> {
    let mut acc = parse_term(c, pos)?;
    while *pos < c.len() && (c[*pos] == '+' || c[*pos] == '-') {
        let op = c[*pos];
        *pos += 1;
        let rhs = parse_term(c, pos)?;
        if op == '+' {
            acc += rhs;
        } else {
            acc -= rhs;
        }
    }
    Ok(acc)
}

fn parse_term(c: &[char], pos: &mut usize) -> Result<BigRational> {
    let mut acc = parse_factor(c, pos)?;
    while *pos < c.len() && (c[*pos] == '*' || c[*pos] == '/') {
        let op = c[*pos];
        *pos += 1;
        let rhs = parse_factor(c, pos)?;
        if op == '*' {
            acc *= rhs;
        } else {
            if rhs.is_zero() {
                return Err(Error::Parse("division by zero".into()));
            }
            acc /= rhs;
        }
    }
    Ok(acc)
}

fn parse_factor(c: &[char], pos: &mut usize) -> Result<BigRational> {
    if *pos < c.len() && c[*pos] == '-' {
        *pos += 1;
        return Ok(-parse_factor(c, pos)?);
    }
    let base = if *pos < c.len() && c[*pos] == '(' {
        *pos += 1;
        let v = parse_expr(c, pos)?;
        if *pos >= c.len() || c[*pos] != ')' {
            return Err(Error::Parse("missing ')'".into()));
        }
        *pos += 1;
        v
    } else {
        let start = *pos;
        while *pos < c.len() && c[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::Parse(format!("expected number at offset {start}")));
        }
        let s: String = c[start..*pos].iter().collect();
        BigRational::from_integer(s.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))?)
    };
    if *pos < c.len() && c[*pos] == '^' {
        *pos += 1;
        let neg = *pos < c.len() && c[*pos] == '-';
        if neg {
            *pos += 1;
        }
        let start = *pos;
        while *pos < c.len() && c[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let s: String = c[start..*pos].iter().collect();
        let e: i64 = s.parse().map_err(|_| Error::Parse("bad exponent".into()))?;
        if base.is_zero() && neg {
            return Err(Error::Parse("division by zero".into()));
        }
        return Ok(pow_rational(&base, if neg { -e } else { e }));
    }
    Ok(base)
}

pub fn legendre(a: i64, p: u64) -> i64 {
    let r = (a as i128).rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_valuations() {
        assert_eq!(valuation(&rat(5, 4), 2).unwrap().0, -2);
        assert_eq!(valuation(&int(81), 3).unwrap().0, 4);
        assert_eq!(valuation(&int(22), 7).unwrap().0, 0);
        assert!(valuation(&int(0), 3).is_err());
    }

    #[test]
    fn parser() {
        assert_eq!(parse_rational("5/4+81").unwrap(), rat(329, 4));
        assert_eq!(parse_rational("5/4 + 3^4").unwrap(), rat(329, 4));
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("(1+1)^-2").unwrap(), rat(1, 4));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn prime_powers() {
        let qs: Vec<u64> = prime_powers_up_to(16).iter().map(|x| x.0).collect();
        assert_eq!(qs, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16]);
        assert_eq!(prime_power_split(49), Some((7, 2)));
        assert_eq!(prime_power_split(12), None);
    }

    #[test]
    fn factoring() {
        let (f, c) = trial_factor(&BigInt::from(2 * 2 * 3 * 101), 1000);
        assert_eq!(f, vec![(2, 2), (3, 1), (101, 1)]);
        assert_eq!(c, BigInt::one());
    }
}
