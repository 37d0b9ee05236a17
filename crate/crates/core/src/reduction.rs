//! Reduction of multiplicative and additive type curves modulo primes, flat
//! limits of translated families, and the arithmetic behind the finiteness
//! counts over `Q`: S-unit equations, Hilbert symbols and quaternion classes.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{int, is_prime, legendre, pow_rational, primes_up_to, rat, reduce_mod, valuation, vp};
use crate::binary::BinaryForm;
use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals};
use crate::group::{self, Mat2};
use crate::matrix::smith_invariants;
use crate::projective::{curve_on_variety, is_smooth_rnc, CurveMap};
use crate::quintic::{build_quintic, check_quintic_smooth, QuinticSpec};
use crate::v5::variety;

/// The special fibre of a good model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Fiber {
    #[serde(rename = "MU")]
    MU,
    Ga { xi: u64 },
    Gm { u: u64 },
}

impl Fiber {
    pub fn spec(self, f: &PrimeField) -> QuinticSpec<u64> {
        match self {
            Fiber::MU => QuinticSpec::MU,
            Fiber::Ga { xi } => QuinticSpec::Ga(f.element(xi)),
            Fiber::Gm { u } => QuinticSpec::Gm(f.element(u)),
        }
    }
}

impl fmt::Display for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fiber::MU => write!(f, "MU"),
            Fiber::Ga { xi } => write!(f, "Ga({xi})"),
            Fiber::Gm { u } => write!(f, "Gm({u})"),
        }
    }
}

/// A prime together with the parameters used and their valuations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalContext {
    pub prime: u64,
    /// `(name, value, valuation)`; a zero value has no valuation.
    pub parameters: Vec<(String, String, Option<i64>)>,
}

impl LocalContext {
    fn new(p: u64, params: &[(&str, &BigRational)]) -> Self {
        LocalContext {
            prime: p,
            parameters: params.iter().map(|(n, x)| (n.to_string(), x.to_string(), valuation(x, p).ok().map(|v| v.0))).collect(),
        }
    }
}

/// A translation `(1 b; 0 1)` achieving twisted reduction, recorded by `v_p(b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistWitness {
    pub b_valuation: i64,
    pub b: String,
    pub fiber: Fiber,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistedReduction {
    /// `v_p(u - 5/4)`.
    pub c: i64,
    pub fiber: Fiber,
    pub witness: TwistWitness,
    pub menu: Vec<TwistWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionOutcome {
    pub context: LocalContext,
    pub standard: Option<Fiber>,
    pub twisted: Option<TwistedReduction>,
    pub bad: bool,
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn residue(x: &BigRational, p: u64) -> u64 {
    reduce_mod(x, p).expect("p-integral")
}

/// Reduction of the additive type curve `Z_xi` at `p`.
pub fn classify_ga_reduction(xi: &BigRational, p: u64) -> Result<ReductionOutcome> {
    check_prime(p)?;
    if xi.is_zero() {
        return Err(Error::Invalid("xi = 0 is the Mukai-Umemura curve, which reduces to itself away from 2 and 5".into()));
    }
    let v = vp(xi, p);
    let standard = if p == 2 || p == 5 || v < 0 {
        None
    } else if v == 0 {
        Some(Fiber::Ga { xi: residue(xi, p) })
    } else {
        Some(Fiber::MU)
    };
    Ok(ReductionOutcome { context: LocalContext::new(p, &[("xi", xi)]), bad: standard.is_none(), standard, twisted: None })
}

pub fn five_quarters() -> BigRational {
    rat(5, 4)
}

/// The fibre of the translate of `Z_u` by `(1 b; 0 1)`, `c = v_p(u - 5/4) >= -4 v_p(b) >= 4`.
pub fn twisted_fiber(u: &BigRational, b: &BigRational, p: u64) -> Fiber {
    let d = u - five_quarters();
    if vp(&d, p) == -4 * vp(b, p) {
        Fiber::Ga { xi: residue(&(int(16) * pow_rational(b, 4) * d), p) }
    } else {
        Fiber::MU
    }
}

/// Reduction of the split multiplicative type curve `Z_u` at `p`, both as
/// given (standard) and after a translation by `(1 b; 0 1)` with `b` not
/// integral (twisted).
pub fn classify_split_gm_reduction(u: &BigRational, p: u64) -> Result<ReductionOutcome> {
    check_prime(p)?;
    if u.is_zero() || u.is_one() || *u == five_quarters() {
        return Err(Error::Invalid(format!("u = {u} is excluded")));
    }
    let um1 = u - BigRational::one();
    let d = u - five_quarters();
    let standard = (vp(u, p) == 0 && vp(&um1, p) == 0).then(|| {
        let ub = residue(u, p);
        if p != 2 && p != 5 && vp(&d, p) > 0 {
            Fiber::MU
        } else {
            Fiber::Gm { u: ub }
        }
    });
    let c = vp(&d, p);
    let twisted = (p != 2 && p != 5 && c >= 4).then(|| {
        let menu: Vec<TwistWitness> = (1..=c / 4)
            .map(|k| {
                let b = pow_rational(&int(p as i64), -k);
                TwistWitness { b_valuation: -k, b: b.to_string(), fiber: twisted_fiber(u, &b, p) }
            })
            .collect();
        let witness = menu.last().cloned().unwrap();
        TwistedReduction { c, fiber: witness.fiber, witness, menu }
    });
    Ok(ReductionOutcome {
        context: LocalContext::new(p, &[("u", u), ("u-1", &um1), ("u-5/4", &d)]),
        bad: standard.is_none() && twisted.is_none(),
        standard,
        twisted,
    })
}

/// Reduction of a curve over `Q` after clearing the common power of `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatLimit {
    pub curve: CurveMap<u64>,
    /// The minimal valuation divided out.
    pub shift: i64,
    pub degenerate: bool,
    pub reasons: Vec<String>,
}

/// `sigma(g) Z_spec` over `Q`, optionally reparametrized by `reparam`, with
/// the whole tuple divided by `p^m` (`m` the least valuation) and reduced.
pub fn flat_limit(spec: &QuinticSpec<BigRational>, g: &Mat2<BigRational>, reparam: Option<&Mat2<BigRational>>, p: u64) -> Result<FlatLimit> {
    check_prime(p)?;
    let q = Rationals;
    let mut c = build_quintic(&q, &QuinticSpec::Translated(Box::new(spec.clone()), g.clone()))?;
    if let Some(m) = reparam {
        c = c.reparametrize(&q, m);
    }
    let shift = c.forms().iter().flat_map(|f| f.coeffs().iter()).filter(|x| !x.is_zero()).map(|x| vp(x, p)).min().ok_or(Error::ZeroInput("curve tuple"))?;
    let scale = pow_rational(&int(p as i64), -shift);
    let fp = PrimeField::new(p)?;
    let forms: Vec<BinaryForm<u64>> = c.forms().iter().map(|f| BinaryForm::new(f.coeffs().iter().map(|x| residue(&(x * &scale), p)).collect())).collect();
    if forms.iter().all(|f| f.is_zero(&fp)) {
        return Err(Error::Invalid("tuple vanishes after reduction".into()));
    }
    let (curve, content) = CurveMap::with_content(&fp, forms)?;
    let mut reasons = Vec::new();
    if content.degree() > 0 {
        reasons.push(format!("common factor of degree {}", content.degree()));
    }
    if !is_smooth_rnc(&fp, &curve) {
        reasons.push("coefficient rank below 6".into());
    }
    if !curve_on_variety(&fp, &curve, &variety(&fp))? {
        reasons.push("reduction leaves Y".into());
    }
    Ok(FlatLimit { curve, shift, degenerate: !reasons.is_empty(), reasons })
}

/// Flat limit of the translate of `Z_u` by `(1 b; 0 1)`, following the
/// orbit parameter `s -> s - 2 b t` that stays bounded.
pub fn twisted_flat_limit(u: &BigRational, b: &BigRational, p: u64) -> Result<FlatLimit> {
    let q = Rationals;
    let g = group::unipotent(&q, b);
    let re = group::unipotent(&q, &(-(int(2) * b)));
    flat_limit(&QuinticSpec::Gm(u.clone()), &g, Some(&re), p)
}

/// One twisted case compared against the predicted fibre.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatLimitCheck {
    pub u: String,
    pub b: String,
    pub p: u64,
    pub c: i64,
    pub expected: Fiber,
    pub degenerate: bool,
    pub matches: bool,
}

pub fn check_twisted_flat_limit(u: &BigRational, b: &BigRational, p: u64) -> Result<FlatLimitCheck> {
    let fp = PrimeField::new(p)?;
    let expected = twisted_fiber(u, b, p);
    let lim = twisted_flat_limit(u, b, p)?;
    let target = build_quintic(&fp, &expected.spec(&fp))?;
    let matches = !lim.degenerate && crate::projective::curves_same_image(&fp, &lim.curve, &target)? && check_quintic_smooth(&fp, &expected.spec(&fp))?;
    Ok(FlatLimitCheck { u: u.to_string(), b: b.to_string(), p, c: vp(&(u - five_quarters()), p), expected, degenerate: lim.degenerate, matches })
}

/// Twisted cases `u = 5/4 + p^c w`, `b = p^-k beta` with `4 <= 4k <= c`,
/// covering both the additive (`c = 4k`) and Mukai-Umemura (`c > 4k`) fibres.
pub fn twisted_cases() -> Vec<(BigRational, BigRational, u64)> {
    let mut out = Vec::new();
    for (i, &p) in [3u64, 7, 11, 13, 3, 7, 3, 11, 13, 7].iter().enumerate() {
        let pi = p as i64;
        let w = rat(1 + i as i64, if (2 + i as i64) % pi == 0 { 1 } else { 2 + i as i64 });
        let beta = int(1 + (i as i64 % 2));
        for (c, k) in [(4 + 4 * (i as i64 % 2), 1 + i as i64 % 2), (5 + (i as i64 % 3), 1)] {
            let u = five_quarters() + pow_rational(&int(pi), c) * &w;
            let b = pow_rational(&int(pi), -k) * &beta;
            out.push((u, b, p));
        }
    }
    out
}

/// Signed exponent vectors `+-prod p^e` with `|e| <= bound`.
fn s_units(s: &[u64], bound: i64) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for &p in s {
        let mut next = Vec::new();
        for x in &out {
            for e in -bound..=bound {
                next.push(x * pow_rational(&int(p as i64), e));
            }
        }
        out = next;
    }
    let neg: Vec<BigRational> = out.iter().map(|x| -x).collect();
    out.extend(neg);
    out
}

/// `x = +-prod_{p in S} p^e` with `|e| <= bound`.
pub fn is_bounded_s_unit(x: &BigRational, s: &[u64], bound: i64) -> bool {
    if x.is_zero() {
        return false;
    }
    let mut rest = x.abs();
    for &p in s {
        let v = vp(&rest, p);
        if v.abs() > bound {
            return false;
        }
        rest /= pow_rational(&int(p as i64), v);
    }
    rest.is_one()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SUnitSolutionSet {
    pub primes: Vec<u64>,
    pub bound: i64,
    pub candidates: usize,
    pub solutions: Vec<String>,
    #[serde(skip)]
    pub values: Vec<BigRational>,
}

/// Solutions of `u + (1 - u) = 1` with both terms S-units of exponent at most `bound`.
pub fn s_unit_equation(s: &[u64], bound: i64) -> Result<SUnitSolutionSet> {
    if bound < 1 {
        return Err(Error::Invalid("exponent bound must be positive".into()));
    }
    for &p in s {
        check_prime(p)?;
    }
    let cands = s_units(s, bound);
    let mut values: Vec<BigRational> = cands.iter().filter(|u| is_bounded_s_unit(&(BigRational::one() - *u), s, bound)).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    values.sort();
    assert!(values.iter().all(|u| is_bounded_s_unit(u, s, bound) && is_bounded_s_unit(&(BigRational::one() - u), s, bound)));
    Ok(SUnitSolutionSet { primes: s.to_vec(), bound, candidates: cands.len(), solutions: values.iter().map(|x| x.to_string()).collect(), values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// Integer in the square class of a nonzero rational.
fn integral_class(x: &BigRational) -> BigInt {
    x.numer() * x.denom()
}

fn split_p(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    while m.is_multiple_of(&pb) {
        m /= &pb;
        v += 1;
    }
    (v, m)
}

fn mod_small(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// The local Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput("Hilbert symbol argument"));
    }
    let (a, b) = (integral_class(a), integral_class(b));
    Ok(match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            check_prime(p)?;
            let (al, u) = split_p(&a, p);
            let (be, v) = split_p(&b, p);
            if p == 2 {
                let eps = |x: &BigInt| ((mod_small(x, 4) - 1) / 2) as i64;
                let omega = |x: &BigInt| {
                    let r = mod_small(x, 8);
                    ((r * r - 1) / 8 % 2) as i64
                };
                let e = eps(&u) * eps(&v) + al * omega(&v) + be * omega(&u);
                if e % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let l = |x: &BigInt| legendre(mod_small(x, p) as i64, p);
                let sign = if (al * be) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
                let lu = if be % 2 == 1 { l(&u) } else { 1 };
                let lv = if al % 2 == 1 { l(&v) } else { 1 };
                (sign * lu * lv) as i8
            }
        }
    })
}

/// Primes at which `(a, b)` can ramify: 2 and the primes dividing `a b`.
pub fn candidate_places(a: &BigRational, b: &BigRational) -> Vec<Place> {
    let mut ps: BTreeSet<u64> = BTreeSet::from([2]);
    for x in [a.numer(), a.denom(), b.numer(), b.denom()] {
        let (f, rest) = crate::arith::trial_factor(x, 1 << 20);
        assert!(rest.is_one(), "argument too large to factor");
        ps.extend(f.iter().map(|t| t.0));
    }
    let mut out: Vec<Place> = ps.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinity);
    out
}

/// Places where the quaternion algebra `(a, b)` ramifies.
pub fn ramification(a: &BigRational, b: &BigRational) -> Result<BTreeSet<Place>> {
    candidate_places(a, b).into_iter().filter_map(|v| hilbert_symbol(a, b, v).map(|h| (h == -1).then_some(v)).transpose()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuaternionClass {
    pub a: String,
    pub b: String,
    pub ramified: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrauerCount {
    pub primes: Vec<u64>,
    pub count: usize,
    pub classes: Vec<QuaternionClass>,
    pub pairs_examined: usize,
    /// The distinct ramification sets are exactly the even subsets of `S + {inf}`.
    pub matches_even_subsets: bool,
}

/// Primes adjoined to `S` when drawing witnesses, so that every class
/// unramified outside `S` has a witness of the form `(a, b)`.
pub const AUXILIARY_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Quaternion classes over `Q` unramified outside `S` and the real place,
/// found by enumerating square classes `a, b` and deduplicating by
/// ramification set.
pub fn brauer_two_torsion_count(s: &[u64]) -> Result<BrauerCount> {
    for &p in s {
        check_prime(p)?;
    }
    let gens: BTreeSet<u64> = s.iter().chain(AUXILIARY_PRIMES.iter()).copied().collect();
    let mut classes: Vec<BigRational> = vec![BigRational::one()];
    for g in std::iter::once(-1i64).chain(gens.iter().map(|&p| p as i64)) {
        let more: Vec<BigRational> = classes.iter().map(|c| c * int(g)).collect();
        classes.extend(more);
    }
    let allowed: BTreeSet<Place> = s.iter().map(|&p| Place::Prime(p)).chain([Place::Infinity]).collect();
    let mut found: Vec<(BTreeSet<Place>, QuaternionClass)> = Vec::new();
    let mut pairs = 0;
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i..] {
            pairs += 1;
            let r = ramification(a, b)?;
            if r.is_subset(&allowed) && !found.iter().any(|(x, _)| *x == r) {
                let ramified = r.iter().map(|v| v.to_string()).collect();
                found.push((r, QuaternionClass { a: a.to_string(), b: b.to_string(), ramified }));
            }
        }
    }
    let sets: HashSet<BTreeSet<Place>> = found.iter().map(|x| x.0.clone()).collect();
    let places: Vec<Place> = allowed.iter().copied().collect();
    let even: HashSet<BTreeSet<Place>> = (0u64..1 << places.len())
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| places.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, v)| *v).collect())
        .collect();
    found.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(BrauerCount { primes: s.to_vec(), count: sets.len(), matches_even_subsets: sets == even, classes: found.into_iter().map(|x| x.1).collect(), pairs_examined: pairs })
}

/// Order of `Z^k / (rows of rel + n Z^k)`, `None` if infinite.
pub fn smith_quotient(rel: &[Vec<BigInt>], k: usize, n: i64) -> Option<BigInt> {
    let mut m: Vec<Vec<BigInt>> = rel.to_vec();
    for i in 0..k {
        let mut r = vec![BigInt::zero(); k];
        r[i] = BigInt::from(n);
        m.push(r);
    }
    let inv = smith_invariants(&m);
    (inv.len() == k).then(|| inv.iter().fold(BigInt::one(), |acc, d| acc * d.abs()))
}

/// `#O_S^x / O_S^x^4` for `O_S^x = Z/2 x Z^#S`.
pub fn s_units_mod_fourth_powers(s: &[u64]) -> BigInt {
    let k = 1 + s.len();
    let mut rel = vec![BigInt::zero(); k];
    rel[0] = BigInt::from(2);
    smith_quotient(&[rel], k, 4).expect("finite quotient")
}

fn contains_2_and_5(s: &[u64]) -> bool {
    s.contains(&2) && s.contains(&5)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShafarevichCount {
    pub primes: Vec<u64>,
    pub formula: u64,
    pub cross_check: u64,
    pub agree: bool,
}

/// Forms of the Mukai-Umemura type over `Q` with good reduction outside `S`.
pub fn shaf_pgl2_count(s: &[u64]) -> Result<ShafarevichCount> {
    let formula = if contains_2_and_5(s) { 1u64 << s.len() } else { 0 };
    let cross = if contains_2_and_5(s) { brauer_two_torsion_count(s)?.count as u64 } else { 0 };
    Ok(ShafarevichCount { primes: s.to_vec(), formula, cross_check: cross, agree: formula == cross })
}

/// Forms of the additive type over `Q` with good reduction outside `S`.
pub fn shaf_ga_prime_count(s: &[u64]) -> Result<ShafarevichCount> {
    for &p in s {
        check_prime(p)?;
    }
    let formula = if contains_2_and_5(s) { 2 * 4u64.pow(s.len() as u32) } else { 0 };
    let cross = if contains_2_and_5(s) { s_units_mod_fourth_powers(s).to_u64().unwrap() } else { 0 };
    Ok(ShafarevichCount { primes: s.to_vec(), formula, cross_check: cross, agree: formula == cross })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GmCandidate {
    pub u: String,
    pub reductions: Vec<ReductionOutcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GmCandidates {
    pub primes: Vec<u64>,
    pub bound: i64,
    pub s_unit_candidates: usize,
    pub excluded: Vec<String>,
    pub candidates: Vec<GmCandidate>,
}

/// S-unit solutions usable as split multiplicative parameters, with their
/// reduction at every prime outside `S` up to `report_bound`.
pub fn shaf_gm_candidates(s: &[u64], bound: i64, report_bound: u64) -> Result<GmCandidates> {
    let sol = s_unit_equation(s, bound)?;
    let (keep, excluded): (Vec<BigRational>, Vec<BigRational>) = sol.values.iter().cloned().partition(|u| !u.is_zero() && !u.is_one() && *u != five_quarters());
    let primes: Vec<u64> = primes_up_to(report_bound).into_iter().filter(|p| !s.contains(p)).collect();
    let candidates = keep
        .iter()
        .map(|u| Ok(GmCandidate { u: u.to_string(), reductions: primes.iter().map(|&p| classify_split_gm_reduction(u, p)).collect::<Result<_>>()? }))
        .collect::<Result<_>>()?;
    Ok(GmCandidates { primes: s.to_vec(), bound, s_unit_candidates: sol.candidates, excluded: excluded.iter().map(|x| x.to_string()).collect(), candidates })
}

/// The sample points behind the collision of the two bisecant limits in
/// twisted reduction: `sigma(1 b; 0 1)(0:0:0:0:0:1:-1/b) = (0:4b^5:4b^4:4b^3:4b^2:5b:1)`, its
/// reduction to `(0:1:0:0:0:0:0)`, and `sigma(1 -a; 0 1)(0:1:0:0:0:0:0) = (-2a:1:0:0:0:0:0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BisecantLimitSample {
    pub b: String,
    pub p: u64,
    pub moved_point: String,
    pub matches_printed: bool,
    pub reduces_to_e1: bool,
    pub translate_matches: bool,
}

pub fn bisecant_limit_sample(b: &BigRational, a0: &BigRational, p: u64) -> Result<BisecantLimitSample> {
    check_prime(p)?;
    let q = Rationals;
    let fam = crate::v5::ActionFamily::sigma(&q)?;
    let x: Vec<BigRational> = vec![int(0), int(0), int(0), int(0), int(0), int(1), -b.recip()];
    let moved = fam.matrix(&group::unipotent(&q, b)).mul_vec(&x);
    let b2 = b * b;
    let b4 = &b2 * &b2;
    let printed = vec![int(0), int(4) * &b4 * b, int(4) * &b4, int(4) * &b2 * b, int(4) * &b2, int(5) * b, int(1)];
    let matches_printed = crate::matrix::proportional_vecs(&q, &moved, &printed);
    let shift = moved.iter().filter(|c| !c.is_zero()).map(|c| vp(c, p)).min().unwrap_or(0);
    let scale = pow_rational(&int(p as i64), -shift);
    let reduced: Vec<u64> = moved.iter().map(|c| residue(&(c * &scale), p)).collect();
    let fp = PrimeField::new(p)?;
    let reduces_to_e1 = crate::matrix::proportional_vecs(&fp, &reduced, &[0, 1, 0, 0, 0, 0, 0]);
    let e1: Vec<BigRational> = (0..7).map(|i| int((i == 1) as i64)).collect();
    let t = fam.matrix(&group::unipotent(&q, &-a0)).mul_vec(&e1);
    let mut expect = e1.clone();
    expect[0] = -(int(2) * a0);
    let translate_matches = crate::matrix::proportional_vecs(&q, &t, &expect);
    Ok(BisecantLimitSample {
        b: b.to_string(),
        p,
        moved_point: format!("({})", moved.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")),
        matches_printed,
        reduces_to_e1,
        translate_matches,
    })
}

/// `(u, p)` pairs exercising every branch of the split multiplicative classifier.
pub fn reduction_grid() -> Vec<(BigRational, u64)> {
    let primes = [2u64, 3, 5, 7, 11];
    let mut us: Vec<BigRational> = vec![rat(3, 1), rat(1, 2), rat(-1, 1), rat(2, 1), rat(7, 3), rat(5, 9), rat(-4, 15), rat(22, 7), rat(11, 12), rat(13, 4)];
    us.extend([3i64, 5, 7, 11].iter().flat_map(|&p| [4u32, 5, 8].map(move |c| five_quarters() + int(p.pow(c)) * rat(1, 2))));
    us.extend([rat(5, 4) + rat(3, 4), rat(5, 4) + rat(81 * 2, 1), rat(5, 4) - int(625), rat(6, 5), rat(-3, 8), rat(9, 10), rat(125, 4), rat(16, 3)]);
    us.extend([rat(2, 3), rat(-5, 2), rat(17, 4), rat(21, 4), rat(1, 5), rat(49, 3), rat(-7, 11), rat(121, 8), rat(4, 5), five_quarters() + int(3 * 7i64.pow(4))]);
    us.truncate(40);
    us.iter().flat_map(|u| primes.iter().map(move |&p| (u.clone(), p))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        crate::arith::parse_rational(s).unwrap()
    }

    #[test]
    fn ga_reduction_examples() {
        assert_eq!(classify_ga_reduction(&int(1), 7).unwrap().standard, Some(Fiber::Ga { xi: 1 }));
        assert_eq!(classify_ga_reduction(&int(7), 7).unwrap().standard, Some(Fiber::MU));
        assert!(classify_ga_reduction(&int(1), 5).unwrap().bad);
        assert!(classify_ga_reduction(&rat(1, 7), 7).unwrap().bad);
        assert!(classify_ga_reduction(&int(0), 7).is_err());
    }

    #[test]
    fn gm_reduction_examples() {
        let r = classify_split_gm_reduction(&int(2), 7).unwrap();
        assert_eq!(r.standard, Some(Fiber::Gm { u: 2 }));
        assert!(r.twisted.is_none());
        // 3 = 5/4 in F7, so Z_3 reduces to a Mukai-Umemura type curve
        let r = classify_split_gm_reduction(&int(3), 7).unwrap();
        assert_eq!(r.standard, Some(Fiber::MU));
        assert!(r.twisted.is_none());
        let r = classify_split_gm_reduction(&q("5/4+81"), 3).unwrap();
        // u = 5/4 mod 3 as well
        assert_eq!(r.standard, Some(Fiber::MU));
        let t = r.twisted.unwrap();
        assert_eq!(t.c, 4);
        assert_eq!(t.witness.b_valuation, -1);
        assert_eq!(t.fiber, Fiber::Ga { xi: 1 });
        assert!(classify_split_gm_reduction(&rat(1, 2), 2).unwrap().bad);
        assert!(classify_split_gm_reduction(&rat(5, 4), 3).is_err());
        // u = 5/4 + 7 reduces to 5/4: standard fibre of Mukai-Umemura type
        assert_eq!(classify_split_gm_reduction(&q("5/4+7"), 7).unwrap().standard, Some(Fiber::MU));
    }

    #[test]
    fn flat_limits() {
        let f3 = PrimeField::new(3).unwrap();
        let lim = twisted_flat_limit(&q("5/4+3^4"), &rat(1, 3), 3).unwrap();
        assert!(!lim.degenerate, "{:?}", lim.reasons);
        let ga = build_quintic(&f3, &QuinticSpec::Ga(1)).unwrap();
        assert!(crate::projective::curves_same_image(&f3, &lim.curve, &ga).unwrap());
        let lim = twisted_flat_limit(&q("5/4+3^5"), &rat(1, 3), 3).unwrap();
        let mu = build_quintic(&f3, &QuinticSpec::MU).unwrap();
        assert!(crate::projective::curves_same_image(&f3, &lim.curve, &mu).unwrap());
        // identity translation with unit data is plain reduction
        let r = Rationals;
        let lim = flat_limit(&QuinticSpec::Gm(int(3)), &group::identity(&r), None, 7).unwrap();
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(lim.curve, build_quintic(&f7, &QuinticSpec::Gm(3)).unwrap());
        assert_eq!(lim.shift, 0);
        // without the reparametrization the naive reduction degenerates
        let naive = flat_limit(&QuinticSpec::Gm(q("5/4+3^4")), &group::unipotent(&r, &rat(1, 3)), None, 3).unwrap();
        assert!(naive.degenerate);
    }

    #[test]
    fn constructed_twisted_cases() {
        let cases = twisted_cases();
        assert_eq!(cases.len(), 20);
        let mut kinds = HashSet::new();
        for (u, b, p) in &cases {
            let c = check_twisted_flat_limit(u, b, *p).unwrap();
            assert!(c.matches, "{c:?}");
            kinds.insert(matches!(c.expected, Fiber::MU));
        }
        assert_eq!(kinds.len(), 2);
    }

    #[test]
    fn s_unit_examples() {
        assert!(s_unit_equation(&[], 3).unwrap().values.is_empty());
        let s = s_unit_equation(&[2], 5).unwrap();
        assert_eq!(s.candidates, 22);
        assert_eq!(s.values, vec![int(-1), rat(1, 2), int(2)]);
        let s = s_unit_equation(&[2, 3], 6).unwrap();
        for x in ["2", "-1", "1/2", "3", "-2", "4", "-3", "9", "-8", "1/9", "8/9", "3/4"] {
            assert!(s.values.contains(&q(x)), "{x}");
        }
        let set: HashSet<_> = s.values.iter().cloned().collect();
        assert!(s.values.iter().all(|u| set.contains(&(BigRational::one() - u))));
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(&int(-1), &int(-1), Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(&int(-1), &int(-1), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&int(1), &int(-7), Place::Prime(7)).unwrap(), 1);
        assert_eq!(hilbert_symbol(&int(2), &int(5), Place::Prime(5)).unwrap(), -1);
        assert!(hilbert_symbol(&int(0), &int(5), Place::Prime(5)).is_err());
    }

    #[test]
    fn brauer_counts() {
        let c = brauer_two_torsion_count(&[2, 5]).unwrap();
        assert_eq!(c.count, 4);
        assert!(c.matches_even_subsets);
        assert_eq!(brauer_two_torsion_count(&[]).unwrap().count, 1);
        assert_eq!(brauer_two_torsion_count(&[2, 5, 7]).unwrap().count, 8);
        assert!(brauer_two_torsion_count(&[5]).unwrap().matches_even_subsets);
    }

    #[test]
    fn shafarevich_counts() {
        let c = shaf_pgl2_count(&[2, 5]).unwrap();
        assert_eq!((c.formula, c.agree), (4, true));
        assert_eq!(shaf_pgl2_count(&[2]).unwrap().formula, 0);
        let c = shaf_ga_prime_count(&[2, 5]).unwrap();
        assert_eq!((c.formula, c.cross_check), (32, 32));
        assert_eq!(smith_quotient(&[vec![BigInt::from(2), BigInt::zero()]], 2, 4), Some(BigInt::from(8)));
        assert_eq!(smith_quotient(&[], 1, 0), None);
    }

    #[test]
    fn gm_candidates() {
        let c = shaf_gm_candidates(&[2], 5, 20).unwrap();
        let us: Vec<&str> = c.candidates.iter().map(|x| x.u.as_str()).collect();
        assert_eq!(us, vec!["-1", "1/2", "2"]);
        assert!(shaf_gm_candidates(&[], 4, 20).unwrap().candidates.is_empty());
        let c = shaf_gm_candidates(&[2, 5], 6, 20).unwrap();
        assert!(c.excluded.contains(&"5/4".to_string()));
        assert!(c.candidates.iter().all(|x| x.u != "5/4"));
    }

    #[test]
    fn bisecant_limit_samples() {
        for (b, p) in [(rat(1, 3), 3), (rat(2, 7), 7), (rat(1, 121), 11)] {
            let s = bisecant_limit_sample(&b, &int(3), p).unwrap();
            assert!(s.matches_printed && s.reduces_to_e1 && s.translate_matches, "{s:?}");
        }
    }

    #[test]
    fn grid_size() {
        assert_eq!(reduction_grid().len(), 200);
    }
}
