//! Closed-immersion certificate for a rational curve with integer
//! coefficients, valid over `Q` and over every prime field.
//!
//! The collision forms
//! `h_ij = (f_i(s,t) f_j(u,v) - f_j(s,t) f_i(u,v)) / (sv - tu)`
//! have no common zero on `P^1 x P^1` exactly when the map is injective and
//! unramified. Their restrictions to the diagonal decide ramification in
//! every characteristic; resultants in `(u, v)` bound the primes where
//! injectivity could fail, and those primes are then checked directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{is_prime, trial_factor};
use crate::binary::{binary_gcd_all, BinaryForm};
use crate::error::{Error, Result};
use crate::field::{construct_extension, Field, PrimeField, Rationals};
use crate::matrix::det_multimodular;
use crate::poly;
use crate::status::Status;

/// `H[a][b]` is the coefficient of `s^(e-a) t^a u^(e-b) v^b`, with `e = d - 1`.
pub type Grid = Vec<Vec<BigInt>>;

#[derive(Debug, Clone)]
pub struct CertificateConfig {
    pub seed: u64,
    /// Number of resultant forms built from random combinations.
    pub resultant_forms: usize,
    pub trial_bound: u64,
    /// Largest extension field searched for roots at a candidate prime.
    pub max_extension_size: u64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig { seed: 0, resultant_forms: 3, trial_bound: 1_000_000, max_extension_size: 1 << 40 }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SmoothnessCertificate {
    pub status: Status,
    pub immersion_candidate_primes: Vec<u64>,
    pub injectivity_candidate_primes: Vec<u64>,
    pub failure: Option<String>,
    pub reason: Option<String>,
}

impl SmoothnessCertificate {
    fn new() -> Self {
        SmoothnessCertificate {
            status: Status::Pass,
            immersion_candidate_primes: Vec::new(),
            injectivity_candidate_primes: Vec::new(),
            failure: None,
            reason: None,
        }
    }
    fn fail(mut self, msg: String) -> Self {
        self.status = Status::Fail;
        self.failure = Some(msg);
        self
    }
    fn inconclusive(mut self, msg: String) -> Self {
        self.status = Status::Inconclusive;
        self.reason = Some(msg);
        self
    }
}

/// Collision forms for every pair `i < j`.
pub fn collision_forms(forms: &[Vec<BigInt>]) -> Result<Vec<((usize, usize), Grid)>> {
    let d = forms.first().ok_or(Error::ZeroInput("curve with no coordinates"))?.len() - 1;
    if d == 0 || forms.iter().any(|f| f.len() != d + 1) {
        return Err(Error::Invalid("coordinate forms must share a positive degree".into()));
    }
    let mut out = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            out.push(((i, j), divide_collision(&forms[i], &forms[j], d)));
        }
    }
    Ok(out)
}

fn divide_collision(fi: &[BigInt], fj: &[BigInt], d: usize) -> Grid {
    // N(t, v) = F_i(t) F_j(v) - F_j(t) F_i(v), column b as a polynomial in t
    let col = |b: usize| -> Vec<BigInt> { (0..=d).map(|a| &fi[a] * &fj[b] - &fj[a] * &fi[b]).collect() };
    let mut q: Vec<Vec<BigInt>> = vec![Vec::new(); d];
    q[d - 1] = col(d);
    for b in (1..d).rev() {
        let n = col(b);
        let shifted = shift(&q[b]);
        q[b - 1] = n.iter().zip(&shifted).map(|(x, y)| x + y).collect();
    }
    let rem: Vec<BigInt> = col(0).iter().zip(&shift(&q[0])).map(|(x, y)| x + y).collect();
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    let e = d - 1;
    let mut grid = vec![vec![BigInt::zero(); e + 1]; e + 1];
    for (b, qb) in q.iter().enumerate() {
        debug_assert!(qb[d].is_zero());
        for a in 0..=e {
            grid[a][b] = qb[a].clone();
        }
    }
    grid
}

/// Multiplication by `t` on a length-`d+1` coefficient vector.
fn shift(p: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len()];
    for k in 0..p.len() - 1 {
        out[k + 1] = p[k].clone();
    }
    out
}

/// Restriction to the diagonal `(u, v) = (s, t)`, a form of degree `2e`.
pub fn diagonal_form(g: &Grid) -> Vec<BigInt> {
    let e = g.len() - 1;
    let mut out = vec![BigInt::zero(); 2 * e + 1];
    for a in 0..=e {
        for b in 0..=e {
            out[a + b] += &g[a][b];
        }
    }
    out
}

/// The form in `(u, v)` obtained by fixing `(s, t) = (x0, y0)`.
pub fn specialize_first<F: Field>(f: &F, g: &Grid, x0: &F::Elem, y0: &F::Elem) -> BinaryForm<F::Elem> {
    let e = g.len() - 1;
    let xp: Vec<F::Elem> = (0..=e).map(|k| f.pow(x0, k as u64)).collect();
    let yp: Vec<F::Elem> = (0..=e).map(|k| f.pow(y0, k as u64)).collect();
    let coeffs = (0..=e)
        .map(|b| {
            (0..=e).fold(f.zero(), |acc, a| {
                let c = f.from_bigint(&g[a][b]);
                f.add(&acc, &f.mul(&c, &f.mul(&xp[e - a], &yp[a])))
            })
        })
        .collect();
    BinaryForm::new(coeffs)
}

/// `Res_{(u,v)}(h_a, h_b)` as a form of degree `2 e^2` in `(s, t)`,
/// by evaluation at `(1, x)` and interpolation.
pub fn collision_resultant(ga: &Grid, gb: &Grid) -> Vec<BigInt> {
    let e = ga.len() - 1;
    let n = 2 * e * e;
    let at = |g: &Grid, x: &BigInt| -> Vec<BigInt> {
        (0..=e)
            .map(|b| {
                let mut acc = BigInt::zero();
                let mut xp = BigInt::one();
                for a in 0..=e {
                    acc += &g[a][b] * &xp;
                    xp *= x;
                }
                acc
            })
            .collect()
    };
    let xs: Vec<BigInt> = (0..=n as i64).map(BigInt::from).collect();
    let ys: Vec<BigInt> = xs.iter().map(|x| poly::resultant_int(&at(ga, x), &at(gb, x))).collect();
    interpolate_integer(&xs, &ys)
}

/// Coefficients (lowest first) of the interpolating polynomial, which must be integral.
fn interpolate_integer(xs: &[BigInt], ys: &[BigInt]) -> Vec<BigInt> {
    let n = xs.len();
    let xr: Vec<BigRational> = xs.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let mut dd: Vec<BigRational> = ys.iter().map(|y| BigRational::from_integer(y.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xr[i] - &xr[i - level]);
        }
    }
    // Horner on the Newton form
    let mut coeffs: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // coeffs = coeffs * (x - x_i) + dd[i]
        let mut next = vec![BigRational::zero(); n];
        for k in 0..n {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += &coeffs[k];
            }
            next[k] -= &coeffs[k] * &xr[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    coeffs
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "interpolated resultant is not integral");
            c.to_integer()
        })
        .collect()
}

fn combine(grids: &[&Grid], coeffs: &[i64]) -> Grid {
    let e = grids[0].len() - 1;
    let mut out = vec![vec![BigInt::zero(); e + 1]; e + 1];
    for (g, &c) in grids.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for a in 0..=e {
            for b in 0..=e {
                out[a][b] += &g[a][b] * c;
            }
        }
    }
    out
}

fn combine_vecs(vs: &[Vec<BigInt>], coeffs: &[i64]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); vs[0].len()];
    for (v, &c) in vs.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * c;
        }
    }
    out
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-3..=3)).collect()
}

/// Prime divisors of a nonzero integer, or an explanation when trial
/// division leaves a composite cofactor.
pub fn prime_support(g: &BigInt, bound: u64) -> std::result::Result<Vec<u64>, String> {
    let (fs, cof) = trial_factor(g, bound);
    let mut primes: Vec<u64> = fs.into_iter().map(|(p, _)| p).collect();
    if cof > BigInt::one() {
        match cof.to_u64() {
            Some(c) if is_prime(c) => primes.push(c),
            _ => return Err(format!("cofactor with {} digits left after trial division to {bound}", cof.to_string().len())),
        }
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

fn binary_sylvester_int(a: &[BigInt], b: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (k, c) in a.iter().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in b.iter().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    rows
}

fn gcd_of_nonzero(vals: &[BigInt]) -> Option<BigInt> {
    vals.iter().filter(|x| !x.is_zero()).fold(None, |acc: Option<BigInt>, x| Some(acc.map_or(x.clone(), |a| a.gcd(x))))
}

fn to_field_form<F: Field>(f: &F, v: &[BigInt]) -> BinaryForm<F::Elem> {
    BinaryForm::new(v.iter().map(|x| f.from_bigint(x)).collect())
}

/// Certificate that the curve given by integer forms is a closed
/// immersion over `Q` and over every `F_p`.
pub fn certify_curve_smooth_general(forms: &[Vec<BigInt>], cfg: &CertificateConfig) -> Result<SmoothnessCertificate> {
    let d = forms.first().ok_or(Error::ZeroInput("curve with no coordinates"))?.len() - 1;
    let cert = SmoothnessCertificate::new();
    if d == 1 {
        return Ok(certify_linear(forms, cert, cfg));
    }
    let grids = collision_forms(forms)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cert = check_immersion(&grids, cert, cfg, &mut rng);
    if cert.status != Status::Pass {
        return Ok(cert);
    }
    Ok(check_injectivity(&grids, cert, cfg, &mut rng))
}

fn certify_linear(forms: &[Vec<BigInt>], cert: SmoothnessCertificate, cfg: &CertificateConfig) -> SmoothnessCertificate {
    let mut minors = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            minors.push(&forms[i][0] * &forms[j][1] - &forms[j][0] * &forms[i][1]);
        }
    }
    match gcd_of_nonzero(&minors) {
        None => cert.fail("degree-one map is constant over Q".into()),
        Some(g) => match prime_support(&g, cfg.trial_bound) {
            Ok(ps) if ps.is_empty() => cert,
            Ok(ps) => cert.fail(format!("degree-one map is constant over F_{}", ps[0])),
            Err(msg) => cert.inconclusive(msg),
        },
    }
}

fn check_immersion(grids: &[((usize, usize), Grid)], mut cert: SmoothnessCertificate, cfg: &CertificateConfig, rng: &mut ChaCha8Rng) -> SmoothnessCertificate {
    let diag: Vec<Vec<BigInt>> = grids.iter().map(|(_, g)| diagonal_form(g)).collect();
    let mut res = Vec::new();
    for _ in 0..cfg.resultant_forms.max(2) {
        let a = combine_vecs(&diag, &random_coeffs(rng, diag.len()));
        let b = combine_vecs(&diag, &random_coeffs(rng, diag.len()));
        res.push(poly::resultant_int(&a, &b));
    }
    let Some(g) = gcd_of_nonzero(&res) else {
        let q = Rationals;
        let forms: Vec<_> = diag.iter().map(|v| to_field_form(&q, v)).collect();
        return match binary_gcd_all(&q, &forms) {
            Ok(h) if h.degree() > 0 => cert.fail(format!("ramified over Q at the roots of {}", h.format(&q))),
            Ok(_) => cert.inconclusive("all immersion resultants vanish".into()),
            Err(_) => cert.fail("all diagonal forms vanish over Q".into()),
        };
    };
    let primes = match prime_support(&g, cfg.trial_bound) {
        Ok(p) => p,
        Err(msg) => return cert.inconclusive(format!("immersion primes: {msg}")),
    };
    cert.immersion_candidate_primes = primes.clone();
    for p in primes {
        let fp = PrimeField::new(p).unwrap();
        let forms: Vec<_> = diag.iter().map(|v| to_field_form(&fp, v)).collect();
        match binary_gcd_all(&fp, &forms) {
            Err(_) => return cert.fail(format!("every diagonal form vanishes mod {p}")),
            Ok(h) if h.degree() > 0 => return cert.fail(format!("ramified mod {p} at the roots of {}", h.format(&fp))),
            Ok(_) => {}
        }
    }
    cert
}

fn check_injectivity(grids: &[((usize, usize), Grid)], mut cert: SmoothnessCertificate, cfg: &CertificateConfig, rng: &mut ChaCha8Rng) -> SmoothnessCertificate {
    let all: Vec<&Grid> = grids.iter().map(|(_, g)| g).collect();
    let k = cfg.resultant_forms.max(2);
    let rs: Vec<Vec<BigInt>> = (0..k)
        .map(|_| {
            let a = combine(&all, &random_coeffs(rng, all.len()));
            let b = combine(&all, &random_coeffs(rng, all.len()));
            collision_resultant(&a, &b)
        })
        .collect();
    let mut pair_res = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pair_res.push(det_multimodular(&binary_sylvester_int(&rs[i], &rs[j])));
        }
    }
    let Some(g) = gcd_of_nonzero(&pair_res) else {
        return rational_collision(grids, &rs, cert);
    };
    let primes = match prime_support(&g, cfg.trial_bound) {
        Ok(p) => p,
        Err(msg) => return cert.inconclusive(format!("injectivity primes: {msg}")),
    };
    cert.injectivity_candidate_primes = primes.clone();
    for p in primes {
        match collision_mod_p(grids, &rs, p, cfg) {
            Ok(None) => {}
            Ok(Some(msg)) => return cert.fail(msg),
            Err(msg) => return cert.inconclusive(msg),
        }
    }
    cert
}

/// Every resultant pair degenerates: look for a rational collision.
fn rational_collision(grids: &[((usize, usize), Grid)], rs: &[Vec<BigInt>], cert: SmoothnessCertificate) -> SmoothnessCertificate {
    let q = Rationals;
    let forms: Vec<_> = rs.iter().map(|v| to_field_form(&q, v)).collect();
    let g = match binary_gcd_all(&q, &forms) {
        Ok(g) => g,
        Err(_) => return cert.inconclusive("all collision resultants vanish identically".into()),
    };
    let mut candidates: Vec<(BigRational, BigRational)> = Vec::new();
    if g.root_multiplicity(&q, &BigRational::zero(), &BigRational::one()).unwrap_or(0) > 0 {
        candidates.push((BigRational::zero(), BigRational::one()));
    }
    let dehom: Vec<BigRational> = poly::trim(&q, g.coeffs().to_vec());
    for r in poly::rational_roots(&dehom) {
        candidates.push((BigRational::one(), r));
    }
    for (x0, y0) in candidates {
        let hs: Vec<_> = grids.iter().map(|(_, gr)| specialize_first(&q, gr, &x0, &y0)).collect();
        let h = match binary_gcd_all(&q, &hs) {
            Ok(h) => h,
            Err(_) => return cert.fail(format!("over Q, ({}:{}) is a base point", q.format(&x0), q.format(&y0))),
        };
        if h.degree() > 0 {
            return cert.fail(format!(
                "collision over Q: ({}:{}) has the same image as the roots of {}",
                q.format(&x0),
                q.format(&y0),
                h.format(&q)
            ));
        }
    }
    cert.inconclusive("collision resultants share irrational roots over Q".into())
}

/// `Ok(None)` when no collision exists over the algebraic closure of `F_p`.
fn collision_mod_p(grids: &[((usize, usize), Grid)], rs: &[Vec<BigInt>], p: u64, cfg: &CertificateConfig) -> std::result::Result<Option<String>, String> {
    let fp = PrimeField::new(p).unwrap();
    let forms: Vec<_> = rs.iter().map(|v| to_field_form(&fp, v)).collect();
    let g = match binary_gcd_all(&fp, &forms) {
        Ok(g) => g,
        Err(_) => return Err(format!("every collision resultant vanishes mod {p}")),
    };
    if g.degree() == 0 {
        return Ok(None);
    }
    // the point (0:1)
    if g.root_multiplicity(&fp, &0, &1).unwrap_or(0) > 0 {
        if let Some(msg) = collision_at(&fp, grids, &0, &1, p) {
            return Ok(Some(msg));
        }
    }
    // affine roots (1:x), split by degree of their residue fields
    let mut rest = poly::monic(&fp, &poly::trim(&fp, g.coeffs().to_vec()));
    let x = vec![0, 1];
    let mut e = 0;
    while poly::degree(&fp, &rest).unwrap_or(0) > 0 {
        e += 1;
        let xe = poly::frobenius_power(&fp, e, &rest);
        let part = poly::gcd(&fp, &rest, &poly::sub(&fp, &xe, &x));
        if part.len() <= 1 {
            continue;
        }
        loop {
            let c = poly::gcd(&fp, &rest, &part);
            if c.len() <= 1 {
                break;
            }
            rest = poly::divrem(&fp, &rest, &c).0;
        }
        let size = p.checked_pow(e as u32).filter(|&q| q <= cfg.max_extension_size);
        let Some(_) = size else {
            return Err(format!("roots mod {p} need an extension of degree {e}"));
        };
        let ext = construct_extension(p, e).map_err(|err| err.to_string())?;
        let emb: Vec<Vec<u64>> = part.iter().map(|c| ext.embed(c)).collect();
        for r in poly::roots_finite(&ext, &emb, cfg.seed) {
            if let Some(msg) = collision_at(&ext, grids, &ext.one(), &r, p) {
                return Ok(Some(msg));
            }
        }
    }
    Ok(None)
}

fn collision_at<F: Field>(f: &F, grids: &[((usize, usize), Grid)], x0: &F::Elem, y0: &F::Elem, p: u64) -> Option<String> {
    let hs: Vec<_> = grids.iter().map(|(_, g)| specialize_first(f, g, x0, y0)).collect();
    match binary_gcd_all(f, &hs) {
        Err(_) => Some(format!("mod {p}: ({}:{}) is a base point", f.format(x0), f.format(y0))),
        Ok(h) if h.degree() > 0 => Some(format!(
            "collision mod {p}: ({}:{}) has the same image as the roots of {}",
            f.format(x0),
            f.format(y0),
            h.format(f)
        )),
        Ok(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn collision_division_is_exact() {
        // twisted cubic
        let c = ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let hs = collision_forms(&c).unwrap();
        // h_{03} = s^2 v^2 + s t u v + t^2 u^2 up to sign
        let (_, g) = &hs[2];
        assert_eq!(g[0][2].abs(), BigInt::one());
        assert_eq!(g[1][1].abs(), BigInt::one());
        assert_eq!(g[2][0].abs(), BigInt::one());
        assert!(g[0][0].is_zero());
    }

    #[test]
    fn twisted_cubic_certified() {
        let c = ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let cert = certify_curve_smooth_general(&c, &CertificateConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Pass, "{cert:?}");
    }

    #[test]
    fn line_certified() {
        let c = ints(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(certify_curve_smooth_general(&c, &CertificateConfig::default()).unwrap().status, Status::Pass);
        let bad = ints(&[&[3, 0], &[0, 3]]);
        assert_eq!(certify_curve_smooth_general(&bad, &CertificateConfig::default()).unwrap().status, Status::Fail);
    }

    #[test]
    fn twisted_cubic_scaled_fails_mod_two() {
        // (s^3 : 2 s^2 t : 2 s t^2 : t^3) is ramified in characteristic 2
        let c = ints(&[&[1, 0, 0, 0], &[0, 2, 0, 0], &[0, 0, 2, 0], &[0, 0, 0, 1]]);
        let cert = certify_curve_smooth_general(&c, &CertificateConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Fail);
        assert!(cert.failure.unwrap().contains("mod 2"));
    }

    #[test]
    fn glued_sextic_collision_reported() {
        // (1:0) and (0:1) both map to (1:0:0:0:0)
        let c = ints(&[
            &[1, 0, 0, 0, 0, 0, 1],
            &[0, 1, 0, 0, 0, 0, 0],
            &[0, 0, 1, 0, 0, 0, 0],
            &[0, 0, 0, 0, 1, 0, 0],
            &[0, 0, 0, 1, 0, 1, 0],
        ]);
        let cert = certify_curve_smooth_general(&c, &CertificateConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Fail, "{cert:?}");
        assert!(cert.failure.unwrap().contains("collision over Q"));
    }
}
