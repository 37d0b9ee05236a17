//! Oracles shared by the integration tests. Nothing here calls the library's
//! own valuation or Hilbert symbol code.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int_val(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// `v_p(x)` by repeated division; `i64::MAX` for zero.
pub fn val(x: &BigRational, p: u64) -> i64 {
    if x.is_zero() {
        return i64::MAX;
    }
    int_val(x.numer(), p) - int_val(x.denom(), p)
}

/// Residue of a `p`-integral rational.
pub fn residue(x: &BigRational, p: u64) -> u64 {
    let m = BigInt::from(p);
    let n = x.numer().mod_floor(&m).to_u64().unwrap();
    let d = x.denom().mod_floor(&m).to_u64().unwrap();
    let inv = (1..p).find(|&i| d * i % p == 1).unwrap();
    n * inv % p
}

/// `(v mod 2, unit class)` describing `x` in `Q_p^x / Q_p^x2`.
fn square_class(x: &BigRational, p: u64) -> (u64, u64) {
    let v = val(x, p);
    let unit = x / BigRational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32)).pow(v.signum() as i32);
    let unit_class = if p == 2 {
        let m = BigInt::from(8);
        let n = unit.numer().mod_floor(&m).to_u64().unwrap();
        let d = unit.denom().mod_floor(&m).to_u64().unwrap();
        n * d % 8
    } else {
        let r = residue(&unit, p);
        // Euler's criterion
        let mut acc = 1u64;
        for _ in 0..(p - 1) / 2 {
            acc = acc * r % p;
        }
        u64::from(acc != 1)
    };
    (v.rem_euclid(2) as u64, unit_class)
}

fn class_representative(c: (u64, u64), p: u64) -> i64 {
    let unit = if p == 2 {
        c.1 as i64
    } else if c.1 == 0 {
        1
    } else {
        (2..p as i64).find(|&n| (1..p as i64).all(|x| x * x % p as i64 != n)).unwrap()
    };
    unit * if c.0 == 1 { p as i64 } else { 1 }
}

fn vp_i64(mut n: i64, p: i64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Whether `a x^2 + b y^2 = z^2` has a nonzero solution in `Q_p`, for `a, b`
/// with valuation 0 or 1. Searches primitive vectors modulo `p^N` that
/// Hensel's lemma lifts: `f(v) = 0 mod p^N` and some partial has valuation
/// `m` with `2m + 1 <= N`.
fn isotropic(a: i64, b: i64, p: i64) -> bool {
    let n = if p == 2 { 5 } else { 3 };
    let m = p.pow(n);
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if x % p == 0 && y % p == 0 && z % p == 0 {
                    continue;
                }
                if (a * x * x + b * y * y - z * z).rem_euclid(m) != 0 {
                    continue;
                }
                let partial_ok = [2 * a * x, 2 * b * y, 2 * z].iter().any(|&d| d != 0 && 2 * vp_i64(d, p) < n);
                if partial_ok {
                    return true;
                }
            }
        }
    }
    false
}

/// Hilbert symbols at a small prime from a brute-force table over square classes.
pub struct HilbertOracle {
    p: u64,
    table: HashMap<((u64, u64), (u64, u64)), i8>,
}

impl HilbertOracle {
    pub fn new(p: u64) -> Self {
        let units: Vec<u64> = if p == 2 { vec![1, 3, 5, 7] } else { vec![0, 1] };
        let classes: Vec<(u64, u64)> = [0u64, 1].iter().flat_map(|&e| units.iter().map(move |&u| (e, u))).collect();
        let mut table = HashMap::new();
        for &ca in &classes {
            for &cb in &classes {
                let (a, b) = (class_representative(ca, p), class_representative(cb, p));
                table.insert((ca, cb), if isotropic(a, b, p as i64) { 1 } else { -1 });
            }
        }
        HilbertOracle { p, table }
    }

    pub fn symbol(&self, a: &BigRational, b: &BigRational) -> i8 {
        self.table[&(square_class(a, self.p), square_class(b, self.p))]
    }
}

pub fn hilbert_infinity(a: &BigRational, b: &BigRational) -> i8 {
    if a.is_negative() && b.is_negative() {
        -1
    } else {
        1
    }
}

/// The reduction type predicted for `Z_u` at `p`, written out from the
/// published criteria. `None` means no good model of that kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedReduction {
    pub standard: Option<String>,
    pub twisted: Option<(i64, String)>,
}

pub fn predict_split_gm(u: &BigRational, p: u64) -> PredictedReduction {
    let five_quarters = q(5, 4);
    let d = u - &five_quarters;
    let c = val(&d, p);
    let tame = p != 2 && p != 5;
    let standard = (val(u, p) == 0 && val(&(u - BigRational::one()), p) == 0).then(|| {
        if tame && c > 0 {
            "MU".to_string()
        } else {
            format!("Gm({})", residue(u, p))
        }
    });
    let twisted = (tame && c >= 4).then(|| {
        let k = c / 4;
        let b4 = BigRational::from_integer(BigInt::from(p).pow(4 * k as u32)).recip();
        let fibre = if c == 4 * k { format!("Ga({})", residue(&(BigRational::from_integer(16.into()) * b4 * &d), p)) } else { "MU".to_string() };
        (c, fibre)
    });
    PredictedReduction { standard, twisted }
}
