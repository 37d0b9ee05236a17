//! The explicit sextic `Gamma` on the quadric `xy + zw + u^2` in `P^4`, and
//! the checks showing the pair is smooth and quadratically normal over `Z`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::primes_up_to;
use crate::error::Result;
use crate::field::{Field, PrimeField, Rationals};
use crate::matrix::bareiss_det;
use crate::multipoly::{parse_poly, MultiPoly};
use crate::projective::certificate::{certify_curve_smooth_general, prime_support, CertificateConfig, SmoothnessCertificate};
use crate::projective::{curve_on_variety, quadratic_normality, quadric_restriction_rows, quadric_smoothness, CurveMap, VarietySpec};
use crate::status::Status;

pub const QUADRIC_VARS: [&str; 5] = ["x", "y", "z", "w", "u"];

/// Coefficients of `Gamma`, index `i` holding `s^(6-i) t^i`.
pub fn gamma_coefficients() -> Vec<Vec<BigInt>> {
    let rows: [[i64; 7]; 5] = [
        [0, 0, 0, 0, 0, 0, -1],
        [1, 1, 0, 2, 0, 0, 1],
        [0, 0, -1, 0, 0, 0, 0],
        [1, 0, 2, 0, 0, 1, 0],
        [0, 1, 0, 1, 0, 0, 1],
    ];
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn gamma<F: Field>(f: &F) -> Result<CurveMap<F::Elem>> {
    let forms = gamma_coefficients()
        .iter()
        .map(|r| crate::binary::BinaryForm::new(r.iter().map(|x| f.from_bigint(x)).collect()))
        .collect();
    CurveMap::new(f, forms)
}

pub fn quadric<F: Field>(f: &F) -> Result<MultiPoly<F::Elem>> {
    parse_poly(f, &QUADRIC_VARS, "x*y + z*w + u^2")
}

pub fn quadric_variety<F: Field>(f: &F) -> Result<VarietySpec<F::Elem>> {
    VarietySpec::new(4, vec![quadric(f)?])
}

/// Integer matrix of degree-2 monomials restricted to `Gamma` (15 x 13).
pub fn restriction_matrix_int() -> Vec<Vec<BigInt>> {
    let q = Rationals;
    let c = gamma(&q).unwrap();
    quadric_restriction_rows(&q, &c).into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect()
}

/// Gcd of all maximal minors of an integer matrix with more rows than columns.
pub fn maximal_minor_gcd(m: &[Vec<BigInt>]) -> BigInt {
    use num_integer::Integer;
    let rows = m.len();
    let cols = m[0].len();
    let mut g = BigInt::from(0);
    let mut pick: Vec<usize> = (0..cols).collect();
    loop {
        let sub: Vec<Vec<BigInt>> = pick.iter().map(|&i| m[i].clone()).collect();
        g = g.gcd(&bareiss_det(sub));
        // next combination
        let mut k = cols;
        while k > 0 && pick[k - 1] == rows - cols + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        pick[k - 1] += 1;
        for j in k..cols {
            pick[j] = pick[j - 1] + 1;
        }
    }
    g
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalityReport {
    pub kernel_dimension_over_q: usize,
    pub minor_gcd: String,
    pub minor_gcd_primes: Vec<u64>,
    pub checked_primes: Vec<u64>,
    /// Primes where the kernel dimension differs from 2, with the value found.
    pub failures: Vec<(u64, usize)>,
    pub status: Status,
}

pub fn quadratic_normality_report(prime_bound: u64, trial_bound: u64) -> NormalityReport {
    let q = Rationals;
    let kq = quadratic_normality(&q, &gamma(&q).unwrap());
    let m = restriction_matrix_int();
    let g = maximal_minor_gcd(&m);
    let (minor_primes, mut status) = match prime_support(&g, trial_bound) {
        Ok(ps) => (ps, Status::Pass),
        Err(_) => (Vec::new(), Status::Inconclusive),
    };
    let mut primes = primes_up_to(prime_bound);
    primes.extend(&minor_primes);
    primes.sort_unstable();
    primes.dedup();
    let mut failures = Vec::new();
    for &p in &primes {
        let f = PrimeField::new(p).unwrap();
        let c = gamma(&f).unwrap();
        let k = quadratic_normality(&f, &c);
        if k != 2 {
            failures.push((p, k));
        }
    }
    if kq != 2 || !failures.is_empty() {
        status = Status::Fail;
    }
    NormalityReport {
        kernel_dimension_over_q: kq,
        minor_gcd: g.to_string(),
        minor_gcd_primes: minor_primes,
        checked_primes: primes,
        failures,
        status,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadricSmoothnessReport {
    pub smooth_over_q: bool,
    /// Primes dividing the Gram determinant of `2q`, checked individually.
    pub checked_primes: Vec<u64>,
    pub singular_primes: Vec<u64>,
    pub status: Status,
}

/// The Gram matrix of `2q` has determinant 2, so odd primes are smooth by
/// the determinant and `p = 2` is checked through the partials.
pub fn quadric_smoothness_report() -> QuadricSmoothnessReport {
    let q = Rationals;
    let smooth_q = quadric_smoothness(&q, &quadric(&q).unwrap()).unwrap();
    let two_q_gram = crate::matrix::Matrix::from_rows(
        &q,
        vec![
            vec![0, 1, 0, 0, 0],
            vec![1, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 0],
            vec![0, 0, 1, 0, 0],
            vec![0, 0, 0, 0, 2],
        ]
        .into_iter()
        .map(|r| r.into_iter().map(crate::arith::int).collect())
        .collect(),
    )
    .determinant()
    .to_integer();
    let mut primes = prime_support(&two_q_gram, 1000).unwrap_or_default();
    if !primes.contains(&2) {
        primes.insert(0, 2);
    }
    let singular: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| {
            let f = PrimeField::new(p).unwrap();
            !quadric_smoothness(&f, &quadric(&f).unwrap()).unwrap()
        })
        .collect();
    let status = Status::from_bool(smooth_q && singular.is_empty());
    QuadricSmoothnessReport { smooth_over_q: smooth_q, checked_primes: primes, singular_primes: singular, status }
}

#[derive(Debug, Clone, Serialize)]
pub struct V22Report {
    pub gamma_on_quadric: bool,
    pub quadric: QuadricSmoothnessReport,
    pub normality: NormalityReport,
    pub smoothness: SmoothnessCertificate,
    pub status: Status,
}

pub fn verify_v22_over_z(prime_bound: u64, cert: &CertificateConfig) -> Result<V22Report> {
    let q = Rationals;
    let on = curve_on_variety(&q, &gamma(&q)?, &quadric_variety(&q)?)?;
    let quadric = quadric_smoothness_report();
    let normality = quadratic_normality_report(prime_bound, cert.trial_bound);
    let smoothness = certify_curve_smooth_general(&gamma_coefficients(), cert)?;
    let status = Status::from_bool(on).combine(quadric.status).combine(normality.status).combine(smoothness.status);
    Ok(V22Report { gamma_on_quadric: on, quadric, normality, smoothness, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_lies_on_quadric() {
        let q = Rationals;
        assert!(curve_on_variety(&q, &gamma(&q).unwrap(), &quadric_variety(&q).unwrap()).unwrap());
    }

    #[test]
    fn normal_over_q_and_f2() {
        assert_eq!(quadratic_normality(&Rationals, &gamma(&Rationals).unwrap()), 2);
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(quadratic_normality(&f2, &gamma(&f2).unwrap()), 2);
    }

    #[test]
    fn gamma_certificate() {
        let c = certify_curve_smooth_general(&gamma_coefficients(), &CertificateConfig::default()).unwrap();
        assert_eq!(c.status, Status::Pass);
    }
}
