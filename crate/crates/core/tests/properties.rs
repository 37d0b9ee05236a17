mod common;

use std::collections::HashSet;

use common::{predict_split_gm, val, HilbertOracle};
use fano_check::arith::{parse_rational, vp};
use fano_check::binary::{binary_gcd, binary_resultant, BinaryForm};
use fano_check::field::{Field, PrimeField};
use fano_check::group::{inverse, mat2, mul};
use fano_check::matrix::Matrix;
use fano_check::projective::{curve_on_variety, curves_same_image, is_smooth_rnc, ProjPoint};
use fano_check::quintic::{build_quintic, check_quintic_smooth, gm_parameter_valid, QuinticSpec};
use fano_check::reduction::{
    brauer_two_torsion_count, classify_split_gm_reduction, flat_limit, hilbert_symbol, ramification, smith_quotient, twisted_flat_limit, Place,
};
use fano_check::v5::{classify_point, divisor, nu, nu_prime, quadrics, variety, y_points, ActionFamily};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::sync::OnceLock;

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (prop::sample::select(vec![-1i64, 1]), prop::collection::vec(-3i32..=3, 5)).prop_map(|(sign, e)| {
        [2i64, 3, 5, 7, 11].iter().zip(&e).fold(BigRational::from_integer(sign.into()), |acc, (&p, &k)| acc * BigRational::from_integer(p.into()).pow(k))
    })
}

fn oracle(p: u64) -> &'static HilbertOracle {
    static ORACLES: OnceLock<Vec<HilbertOracle>> = OnceLock::new();
    let all = ORACLES.get_or_init(|| [2u64, 3, 5].iter().map(|&p| HilbertOracle::new(p)).collect());
    &all[match p {
        2 => 0,
        3 => 1,
        _ => 2,
    }]
}

fn y_points_cached(p: u64) -> &'static Vec<Vec<u64>> {
    static PTS: OnceLock<Vec<Vec<Vec<u64>>>> = OnceLock::new();
    let all = PTS.get_or_init(|| [5u64, 7].iter().map(|&p| y_points(&PrimeField::new(p).unwrap())).collect());
    &all[usize::from(p == 7)]
}

fn invertible(p: u64) -> impl Strategy<Value = [[u64; 2]; 2]> {
    (0..p, 0..p, 0..p, 0..p).prop_map(|(a, b, c, d)| [[a, b], [c, d]]).prop_filter("invertible", move |m| (m[0][0] * m[1][1] + p * p - m[0][1] * m[1][0] % p) % p != 0)
}

fn binary_form(p: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..p, 2..7).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_additive(a in nonzero_rational(), b in nonzero_rational(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assert_eq!(vp(&(&a * &b), p), vp(&a, p) + vp(&b, p));
        prop_assert_eq!(vp(&a, p), val(&a, p));
    }

    #[test]
    fn gcd_divides_and_resultant_detects_common_factors(a in binary_form(7), b in binary_form(7)) {
        let f = PrimeField::new(7).unwrap();
        let (fa, fb) = (BinaryForm::new(a), BinaryForm::new(b));
        let g = binary_gcd(&f, &fa, &fb).unwrap();
        prop_assert!(fa.div_exact(&f, &g).is_some());
        prop_assert!(fb.div_exact(&f, &g).is_some());
        prop_assert_eq!(f.is_zero(&binary_resultant(&f, &fa, &fb)), g.degree() > 0);
    }

    #[test]
    fn kernel_vectors_are_annihilated(rows in prop::collection::vec(prop::collection::vec(0u64..5, 6), 1..6)) {
        let f = PrimeField::new(5).unwrap();
        let m = Matrix::from_rows(&f, rows);
        let (rank, kernel) = m.kernel_and_rank();
        prop_assert_eq!(rank + kernel.len(), 6);
        for v in kernel {
            prop_assert!(m.mul_vec(&v).iter().all(|x| f.is_zero(x)));
        }
    }

    #[test]
    fn smith_quotient_matches_coset_enumeration(k in 1usize..=3, n in 2i64..=4, rel in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 0..3)) {
        let rel: Vec<Vec<i64>> = rel.into_iter().map(|r| r[..k].to_vec()).collect();
        let mut span: HashSet<Vec<i64>> = HashSet::from([vec![0; k]]);
        loop {
            let next: HashSet<Vec<i64>> = span.iter().flat_map(|x| rel.iter().map(move |r| x.iter().zip(r).map(|(a, b)| (a + b).rem_euclid(n)).collect())).collect();
            let before = span.len();
            span.extend(next);
            if span.len() == before {
                break;
            }
        }
        let brute = n.pow(k as u32) / span.len() as i64;
        let rel_big: Vec<Vec<BigInt>> = rel.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        prop_assert_eq!(smith_quotient(&rel_big, k, n), Some(BigInt::from(brute)));
    }

    #[test]
    fn hilbert_symbol_is_bimultiplicative(a in nonzero_rational(), a2 in nonzero_rational(), b in nonzero_rational(), p in prop::sample::select(vec![2u64, 3, 5])) {
        for place in [Place::Prime(p), Place::Infinity] {
            let s = |x: &BigRational, y: &BigRational| hilbert_symbol(x, y, place).unwrap();
            prop_assert_eq!(s(&(&a * &a2), &b), s(&a, &b) * s(&a2, &b));
        }
        prop_assert_eq!(hilbert_symbol(&a, &b, Place::Prime(p)).unwrap(), oracle(p).symbol(&a, &b));
    }

    #[test]
    fn hilbert_product_formula(a in nonzero_rational(), b in nonzero_rational()) {
        let places = [Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(7), Place::Prime(11), Place::Infinity];
        let product: i8 = places.iter().map(|&v| hilbert_symbol(&a, &b, v).unwrap()).product();
        prop_assert_eq!(product, 1);
        prop_assert_eq!(ramification(&a, &b).unwrap().len() % 2, 0);
    }

    #[test]
    fn action_preserves_y_and_inverts(m in invertible(7), idx in 0usize..400) {
        let f = PrimeField::new(7).unwrap();
        let fam = ActionFamily::sigma(&f).unwrap();
        let pts = y_points_cached(7);
        let x = &pts[idx % pts.len()];
        let y = fam.matrix(&m).mul_vec(x);
        prop_assert!(quadrics(&f).iter().all(|q| f.is_zero(&q.eval(&f, &y))));
        let back = fam.matrix(&inverse(&f, &m).unwrap()).mul_vec(&y);
        prop_assert!(ProjPoint::new(&f, back).unwrap().same(&f, &ProjPoint::new(&f, x.clone()).unwrap()));
        let plane = fam.plane_matrix(&m).mul(&fam.plane_matrix(&inverse(&f, &m).unwrap()));
        prop_assert!(plane.proportional(&Matrix::identity(&f, 3)));
    }

    #[test]
    fn orbit_dimension_is_constant_along_orbits(m in invertible(5), idx in 0usize..156, c in 1u64..5) {
        let f = PrimeField::new(5).unwrap();
        let fam = ActionFamily::sigma(&f).unwrap();
        let pts = y_points_cached(5);
        let x = &pts[idx % pts.len()];
        let scaled: Vec<u64> = x.iter().map(|v| v * c % 5).collect();
        let moved = fam.matrix(&m).mul_vec(x);
        let d = classify_point(&f, &fam, &ProjPoint::new(&f, x.clone()).unwrap()).unwrap();
        prop_assert_eq!(d, classify_point(&f, &fam, &ProjPoint::new(&f, scaled).unwrap()).unwrap());
        prop_assert_eq!(d, classify_point(&f, &fam, &ProjPoint::new(&f, moved).unwrap()).unwrap());
    }

    #[test]
    fn quintics_lie_on_y_and_survive_reparametrization(p in prop::sample::select(vec![7u64, 11, 13]), u in 0u64..13, m in invertible(7)) {
        let f = PrimeField::new(p).unwrap();
        let u = u % p;
        prop_assume!(gm_parameter_valid(&f, &u));
        for spec in [QuinticSpec::MU, QuinticSpec::Ga(u), QuinticSpec::Gm(u)] {
            let c = build_quintic(&f, &spec).unwrap();
            prop_assert!(curve_on_variety(&f, &c, &variety(&f)).unwrap());
            prop_assert!(is_smooth_rnc(&f, &c));
            let m = [[m[0][0] % p, m[0][1] % p], [m[1][0] % p, m[1][1] % p]];
            prop_assume!(!f.is_zero(&fano_check::group::det(&f, &m)));
            prop_assert!(curves_same_image(&f, &c, &c.reparametrize(&f, &m)).unwrap());
        }
    }

    #[test]
    fn standard_reduction_is_symmetric_and_fibres_are_smooth(n in -400i64..400, d in 1i64..60, p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        let u = BigRational::new(n.into(), d.into());
        let excluded = |x: &BigRational| x.is_zero() || x.is_one() || *x == BigRational::new(5.into(), 4.into());
        prop_assume!(!excluded(&u) && !excluded(&(BigRational::one() - &u)));
        let o = classify_split_gm_reduction(&u, p).unwrap();
        let swapped = classify_split_gm_reduction(&(BigRational::one() - &u), p).unwrap();
        prop_assert_eq!(o.standard.is_some(), swapped.standard.is_some());
        prop_assert_eq!(o.bad, o.standard.is_none() && o.twisted.is_none());
        let want = predict_split_gm(&u, p);
        prop_assert_eq!(o.standard.map(|f| f.to_string()), want.standard);
        let f = PrimeField::new(p).unwrap();
        for fibre in o.standard.into_iter().chain(o.twisted.iter().flat_map(|t| t.menu.iter().map(|w| w.fiber))) {
            prop_assert!(check_quintic_smooth(&f, &fibre.spec(&f)).unwrap());
        }
    }

    #[test]
    fn unit_data_flat_limit_is_coefficientwise_reduction(n in -300i64..300, d in 1i64..40, p in prop::sample::select(vec![3u64, 7, 11, 13])) {
        let u = BigRational::new(n.into(), d.into());
        prop_assume!(vp(&u, p) == 0 && !u.is_zero() && !u.is_one() && vp(&(&u - BigRational::one()), p) == 0 && u != BigRational::new(5.into(), 4.into()));
        let f = PrimeField::new(p).unwrap();
        let id = fano_check::group::identity(&fano_check::field::Rationals);
        let lim = flat_limit(&QuinticSpec::Gm(u.clone()), &id, None, p).unwrap();
        let ub = common::residue(&u, p);
        prop_assert!(!lim.degenerate);
        prop_assert_eq!(lim.curve, build_quintic(&f, &QuinticSpec::Gm(ub)).unwrap());
    }

    #[test]
    fn twisted_flat_limits_lie_on_y(w in 1i64..50, c in 4i64..9, p in prop::sample::select(vec![3u64, 7, 11])) {
        let pb = BigRational::from_integer(BigInt::from(p));
        let u = BigRational::new(5.into(), 4.into()) + pb.pow(c as i32) * BigRational::from_integer(w.into());
        let b = pb.pow(-(c as i32 / 4));
        let f = PrimeField::new(p).unwrap();
        let lim = twisted_flat_limit(&u, &b, p).unwrap();
        prop_assert!(lim.degenerate || curve_on_variety(&f, &lim.curve, &variety(&f)).unwrap());
    }
}

#[test]
fn brauer_count_is_two_to_the_size_of_s() {
    let primes = [2u64, 3, 5, 7];
    for mask in 0u32..16 {
        let s: Vec<u64> = primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        if s.len() > 3 {
            continue;
        }
        let r = brauer_two_torsion_count(&s).unwrap();
        assert_eq!(r.count, 1 << s.len(), "S = {s:?}");
        assert!(r.matches_even_subsets);
    }
}

#[test]
fn divisor_contains_the_image_of_nu() {
    for p in [3u64, 5, 7] {
        let f = PrimeField::new(p).unwrap();
        assert!(divisor(&f).compose(&f, &nu(&f)).is_zero(), "p = {p}");
    }
    let f2 = PrimeField::new(2).unwrap();
    assert!(divisor(&f2).compose(&f2, &nu_prime(&f2)).is_zero());
}

#[test]
fn action_preserves_y_on_every_group_element() {
    let f = PrimeField::new(3).unwrap();
    let fam = ActionFamily::sigma(&f).unwrap();
    let qs = quadrics(&f);
    let pts = y_points(&f);
    for g in fam.group_elements() {
        let m = fam.matrix(&g);
        assert!(pts.iter().all(|x| {
            let y = m.mul_vec(x);
            qs.iter().all(|q| f.is_zero(&q.eval(&f, &y)))
        }));
    }
    let g = mat2(&f, 1, 1, 0, 1);
    assert!(fam.matrix(&mul(&f, &g, &g)).proportional(&fam.matrix(&g).mul(&fam.matrix(&g))));
}

#[test]
fn rational_parser_round_trips() {
    for s in ["5/4+81", "-1/2", "7", "3^4*2-1"] {
        let x = parse_rational(s).unwrap();
        assert_eq!(parse_rational(&x.to_string()).unwrap(), x);
    }
    assert!(!BigRational::zero().is_one());
}
