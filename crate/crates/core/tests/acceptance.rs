//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{hilbert_infinity, predict_split_gm, q, HilbertOracle};
use fano_check::arith::{prime_powers_up_to, rat};
use fano_check::field::{construct_extension, Field, PrimeField};
use fano_check::group::random_invertible;
use fano_check::projective::certificate::CertificateConfig;
use fano_check::projective::curves_same_image;
use fano_check::quintic::{
    build_quintic, check_quintic_smooth, count_v22, gm_parameter_valid, gm_parameter_with_root, stabilizer_exhaustive, verify_gm_rigidity_all,
    verify_sigma_z_decomposition, CountType, QuinticSpec, SigmaZSpec,
};
use fano_check::reduction::{
    brauer_two_torsion_count, classify_split_gm_reduction, hilbert_symbol, reduction_grid, s_unit_equation, shaf_ga_prime_count, shaf_pgl2_count,
    twisted_cases, twisted_flat_limit, Fiber, Place,
};
use fano_check::v5::{pair_mode, quadrics, verify_action_homomorphism, verify_orbit_table, verify_preservation, verify_y_smooth, y_points, ActionFamily};
use fano_check::Status;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn y_and_actions() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [2u64, 3, 5, 7] {
        let r = verify_y_smooth(p).unwrap();
        let want = 1 + p + p * p + p * p * p;
        ok &= r.status == Status::Pass && r.points_on_y == want as usize && r.singular_points.is_empty();
        parts.push(format!("#Y(F{p})={}", r.points_on_y));
    }
    let mut group = |label: String, order: usize, hom: [Status; 2], pres: Status| {
        ok &= hom == [Status::Pass, Status::Pass] && pres == Status::Pass;
        parts.push(format!("{label}:{order}"));
    };
    for p in [3u64, 7] {
        let f = PrimeField::new(p).unwrap();
        let fam = ActionFamily::sigma(&f).unwrap();
        let g = fam.group_elements();
        let mode = pair_mode(g.len(), usize::MAX, 0);
        let hom = [false, true].map(|plane| verify_action_homomorphism(&fam, plane, &g, mode).status);
        group(format!("PGL2(F{p})"), g.len(), hom, verify_preservation(&fam, &g).status);
    }
    for e in [1usize, 2] {
        let f = construct_extension(2, e).unwrap();
        let fam = ActionFamily::sigma_prime(&f).unwrap();
        let g = fam.group_elements();
        let mode = pair_mode(g.len(), usize::MAX, 0);
        let hom = [false, true].map(|plane| verify_action_homomorphism(&fam, plane, &g, mode).status);
        group(format!("SL2(F{})", 1 << e), g.len(), hom, verify_preservation(&fam, &g).status);
    }
    (ok, parts.join(" "))
}

fn orbit_dimensions() -> Outcome {
    let dims = |p: u64| {
        let r = verify_orbit_table(&PrimeField::new(p).unwrap()).unwrap();
        let d: Vec<usize> = r.entries.iter().map(|e| e.growth_dimension.unwrap_or(e.tangent_dimension)).collect();
        let t: Vec<usize> = r.entries.iter().map(|e| e.tangent_dimension).collect();
        (d, t)
    };
    let (d7, t7) = dims(7);
    let (d2, t2) = dims(2);
    let ok = d7 == [3, 2, 1] && d2 == [3, 2, 1, 1];
    (ok, format!("F7 {d7:?} (tangent {t7:?}); F2 {d2:?} (tangent {t2:?})"))
}

fn quintic_smoothness() -> Outcome {
    let mut ok = true;
    let mut smooth_at = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        let f = PrimeField::new(p).unwrap();
        let mu = check_quintic_smooth(&f, &QuinticSpec::MU).unwrap();
        let ga = check_quintic_smooth(&f, &QuinticSpec::Ga(1)).unwrap();
        ok &= mu == ga && mu == !matches!(p, 2 | 5);
        if mu {
            smooth_at.push(p);
        }
    }
    let mut singular_u = Vec::new();
    for p in [7u64, 13] {
        let f = PrimeField::new(p).unwrap();
        for u in 0..p {
            let s = check_quintic_smooth(&f, &QuinticSpec::Gm(u)).unwrap();
            ok &= s == (u > 1);
            if !s {
                singular_u.push(format!("{u}@F{p}"));
            }
        }
    }
    (ok, format!("MU/Ga smooth at {smooth_at:?}; Gm singular only at {singular_u:?}"))
}

fn stabilizers() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut run = |label: &str, q: u64, want: usize, orders: Vec<usize>| {
        ok &= !orders.is_empty() && orders.iter().all(|&o| o == want);
        parts.push(format!("{label}(F{q})={orders:?}"));
    };
    for q in [3u64, 7, 11] {
        let f = PrimeField::new(q).unwrap();
        run("MU", q, (q * (q - 1)) as usize, vec![stabilizer_exhaustive(&f, &QuinticSpec::MU, 100_000).unwrap().order]);
    }
    for q in [3u64, 7, 13] {
        let f = PrimeField::new(q).unwrap();
        let want = q * num_integer::gcd(4, q - 1);
        run("Ga", q, want as usize, vec![stabilizer_exhaustive(&f, &QuinticSpec::Ga(1), 100_000).unwrap().order]);
    }
    for (p, e) in [(7u64, 1usize), (13, 1), (2, 2), (2, 3)] {
        let f = construct_extension(p, e).unwrap();
        let qq = p.pow(e as u32);
        let orders = f
            .elements()
            .into_iter()
            .filter(|u| gm_parameter_valid(&f, u))
            .map(|u| stabilizer_exhaustive(&f, &QuinticSpec::Gm(u), 100_000).unwrap().order)
            .collect();
        run("Gm", qq, (qq - 1) as usize, orders);
    }
    (ok, parts.join(" "))
}

fn rigidity() -> Outcome {
    let r = verify_gm_rigidity_all(&PrimeField::new(13).unwrap()).unwrap();
    (r.status == Status::Pass && r.mapped_pairs.is_empty() && r.pairs_checked == 10 * 9, format!("{} ordered pairs over F13, {} mapped", r.pairs_checked, r.mapped_pairs.len()))
}

fn sigma_z() -> Outcome {
    let f16_u = gm_parameter_with_root(2, 4).unwrap().unwrap();
    // (case, components, pairwise intersection multiplicities as (i, j, m))
    let cases: Vec<(&str, SigmaZSpec, u64, usize, usize, Vec<(usize, usize, usize)>)> = vec![
        ("MU/F7", SigmaZSpec::MU, 7, 1, 2, vec![(0, 1, 2)]),
        ("Ga/F13", SigmaZSpec::Ga, 13, 1, 3, vec![(0, 1, 2), (0, 2, 2), (1, 2, 4)]),
        ("Gm/F7", SigmaZSpec::Gm { u: 2 }, 7, 1, 3, vec![(0, 1, 2), (0, 2, 2), (1, 2, 2), (1, 2, 2)]),
        ("Gm/F13", SigmaZSpec::Gm { u: 12 }, 13, 1, 3, vec![(0, 1, 2), (0, 2, 2), (1, 2, 2), (1, 2, 2)]),
        ("Gm/F16", SigmaZSpec::Gm { u: f16_u }, 2, 4, 3, vec![(0, 1, 2), (0, 2, 2), (1, 2, 2), (1, 2, 2)]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, spec, p, e, ncomp, mults) in cases {
        let r = verify_sigma_z_decomposition(spec, p, e).unwrap();
        let mut got: Vec<(usize, usize, usize)> = r.multiplicities.iter().map(|m| (m.components.0, m.components.1, m.found.unwrap_or(0))).collect();
        got.sort_unstable();
        let mut want = mults.clone();
        want.sort_unstable();
        let fine = r.status == Status::Pass && r.components.len() == ncomp && got == want && r.bisecant.status == Status::Pass;
        ok &= fine;
        let m: Vec<usize> = got.iter().map(|x| x.2).collect();
        parts.push(format!("{label}:{ncomp}comp mult{m:?}"));
    }
    (ok, parts.join(" ") + " bisecant l(1:0:0) unique")
}

fn counts() -> Outcome {
    let mut checked = 0;
    let mut wrong = Vec::new();
    for (qq, _, _) in prime_powers_up_to(49) {
        let bad = qq % 2 == 0 || qq % 5 == 0;
        let published = [
            (CountType::Pgl2, if bad { 0 } else { 1 }),
            (CountType::Ga, if bad { 0 } else { num_integer::gcd(4, qq - 1) }),
            (CountType::Gm, if bad { 2 * qq - 4 } else { 2 * qq - 6 }),
        ];
        for (kind, want) in published {
            let r = count_v22(kind, qq).unwrap();
            checked += 1;
            if r.enumerated != want {
                wrong.push(format!("{kind:?}(F{qq}) = {} not {want}", r.enumerated));
            }
        }
    }
    (wrong.is_empty(), format!("{checked} (type, q) pairs for q <= 49; mismatches {wrong:?}"))
}

fn fibre_label(f: Fiber) -> String {
    f.to_string()
}

fn reductions() -> Outcome {
    let grid = reduction_grid();
    let mut wrong = Vec::new();
    for (u, p) in &grid {
        let o = classify_split_gm_reduction(u, *p).unwrap();
        let want = predict_split_gm(u, *p);
        let got_standard = o.standard.map(fibre_label);
        let got_twisted = o.twisted.as_ref().map(|t| (t.c, fibre_label(t.fiber)));
        if got_standard != want.standard || got_twisted != want.twisted || o.bad != (want.standard.is_none() && want.twisted.is_none()) {
            wrong.push(format!("u={u} p={p}"));
        }
    }
    let cases = twisted_cases();
    let (mut ga, mut mu) = (0, 0);
    for (u, b, p) in &cases {
        let d = u - q(5, 4);
        let c = common::val(&d, *p);
        let k = -common::val(b, *p);
        let f = PrimeField::new(*p).unwrap();
        let spec = if c == 4 * k {
            ga += 1;
            let xi = common::residue(&(BigRational::from_integer(16.into()) * b.pow(4) * &d), *p);
            QuinticSpec::Ga(xi)
        } else {
            mu += 1;
            QuinticSpec::MU
        };
        let lim = twisted_flat_limit(u, b, *p).unwrap();
        if lim.degenerate || !curves_same_image(&f, &lim.curve, &build_quintic(&f, &spec).unwrap()).unwrap() {
            wrong.push(format!("flat limit u={u} b={b} p={p}"));
        }
    }
    let ok = grid.len() == 200 && cases.len() == 20 && ga > 0 && mu > 0 && wrong.is_empty();
    (ok, format!("grid {} cases, flat limits {} ({ga} Ga, {mu} MU); mismatches {wrong:?}", grid.len(), cases.len()))
}

fn shafarevich() -> Outcome {
    let pgl = shaf_pgl2_count(&[2, 5]).unwrap();
    let br = brauer_two_torsion_count(&[2, 5]).unwrap();
    let zeros: Vec<u64> = [vec![], vec![2], vec![5], vec![3, 5], vec![2, 3, 7]].iter().map(|s| shaf_pgl2_count(s).unwrap().formula).collect();
    let ga = shaf_ga_prime_count(&[2, 5]).unwrap();
    let mut layer: Vec<BigRational> = s_unit_equation(&[2], 6).unwrap().values.into_iter().filter(|u| *u != BigRational::one()).filter(|u| *u != BigRational::from_integer(0.into())).collect();
    layer.sort();
    layer.dedup();
    let want_layer = vec![rat(-1, 1), rat(1, 2), rat(2, 1)];
    let ok = pgl.formula == 4
        && pgl.agree
        && br.count == 4
        && br.matches_even_subsets
        && zeros.iter().all(|&z| z == 0)
        && ga.formula.to_u64() == Some(32)
        && ga.agree
        && layer == want_layer;
    let layer_s: Vec<String> = layer.iter().map(|x| x.to_string()).collect();
    (ok, format!("PGL2({{2,5}})={} Brauer={} zeros={zeros:?} Ga'({{2,5}})={} SNF={} S-unit layer {{2}}={layer_s:?}", pgl.formula, br.count, ga.formula, ga.cross_check))
}

fn v22() -> Outcome {
    let r = fano_check::v22::verify_v22_over_z(100, &CertificateConfig::default()).unwrap();
    let ok = r.gamma_on_quadric
        && r.quadric.status == Status::Pass
        && r.normality.status == Status::Pass
        && r.normality.kernel_dimension_over_q == 2
        && r.smoothness.status == Status::Pass
        && r.status == Status::Pass;
    (
        ok,
        format!(
            "on quadric {}, quadric {}, normality {} (dim {} over Q), smooth {} candidates immersion {:?} injectivity {:?}",
            r.gamma_on_quadric,
            r.quadric.status.as_str(),
            r.normality.status.as_str(),
            r.normality.kernel_dimension_over_q,
            r.smoothness.status.as_str(),
            r.smoothness.immersion_candidate_primes,
            r.smoothness.injectivity_candidate_primes
        ),
    )
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let primes = [2i64, 3, 5, 7, 11];
    let mut x = BigRational::from_integer(if rng.gen_bool(0.5) { (-1).into() } else { 1.into() });
    for p in primes {
        let e: i32 = rng.gen_range(-2..=3);
        x *= BigRational::from_integer(p.into()).pow(e);
    }
    x
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut failures = 0usize;
    let mut cases = 0usize;
    let oracles: Vec<(u64, HilbertOracle)> = [2u64, 3, 5].iter().map(|&p| (p, HilbertOracle::new(p))).collect();
    for _ in 0..200 {
        let (a1, a2, b) = (random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng));
        for (p, oracle) in &oracles {
            let place = Place::Prime(*p);
            let s = |x: &BigRational, y: &BigRational| hilbert_symbol(x, y, place).unwrap();
            cases += 1;
            let ok = s(&(&a1 * &a2), &b) == s(&a1, &b) * s(&a2, &b) && s(&a1, &b) == oracle.symbol(&a1, &b) && s(&b, &a1) == s(&a1, &b);
            failures += usize::from(!ok);
        }
        let inf = |x: &BigRational, y: &BigRational| hilbert_symbol(x, y, Place::Infinity).unwrap();
        cases += 1;
        failures += usize::from(inf(&(&a1 * &a2), &b) != inf(&a1, &b) * inf(&a2, &b) || inf(&a1, &b) != hilbert_infinity(&a1, &b));
    }
    for _ in 0..100 {
        let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
        let product: i8 = [2u64, 3, 5, 7, 11].iter().map(|&p| hilbert_symbol(&a, &b, Place::Prime(p)).unwrap()).product::<i8>() * hilbert_symbol(&a, &b, Place::Infinity).unwrap();
        cases += 1;
        failures += usize::from(product != 1);
    }
    for p in [5u64, 7] {
        let f = PrimeField::new(p).unwrap();
        let fam = ActionFamily::sigma(&f).unwrap();
        let pts = y_points(&f);
        let qs = quadrics(&f);
        for _ in 0..100 {
            let g = random_invertible(&f, &mut rng);
            let h = random_invertible(&f, &mut rng);
            let x = &pts[rng.gen_range(0..pts.len())];
            let y = fam.matrix(&g).mul_vec(x);
            let gh = fano_check::group::mul(&f, &g, &h);
            cases += 1;
            let on_y = qs.iter().all(|q| f.is_zero(&q.eval(&f, &y)));
            failures += usize::from(!on_y || !fam.matrix(&gh).proportional(&fam.matrix(&g).mul(&fam.matrix(&h))));
        }
    }
    for p in [7u64, 13] {
        let f = PrimeField::new(p).unwrap();
        for _ in 0..100 {
            let poly = |rng: &mut ChaCha8Rng| {
                let d = rng.gen_range(1..6);
                let mut c: Vec<u64> = (0..=d).map(|_| rng.gen_range(0..p)).collect();
                c[d] = rng.gen_range(1..p);
                c
            };
            let (a, b, c) = (poly(&mut rng), poly(&mut rng), poly(&mut rng));
            let r = fano_check::poly::resultant(&f, &a, &b).unwrap();
            let g = fano_check::poly::gcd(&f, &a, &b);
            let zero_iff_common = f.is_zero(&r) == (fano_check::poly::degree(&f, &g).unwrap_or(0) > 0);
            let ac = fano_check::poly::mul(&f, &a, &c);
            let multiplicative = fano_check::poly::resultant(&f, &ac, &b).unwrap() == f.mul(&r, &fano_check::poly::resultant(&f, &c, &b).unwrap());
            let divides = fano_check::poly::divrem(&f, &a, &g).1.is_empty() && fano_check::poly::divrem(&f, &b, &g).1.is_empty();
            cases += 1;
            failures += usize::from(!(zero_iff_common && multiplicative && divides));
        }
    }
    (failures == 0, format!("{cases} cases at seed 0, {failures} failures"))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("Y smooth over F2,F3,F5,F7; actions exact", y_and_actions),
        ("orbit dimensions", orbit_dimensions),
        ("quintic smoothness criterion", quintic_smoothness),
        ("stabilizer orders", stabilizers),
        ("rigidity of Gm curves over F13", rigidity),
        ("line loci of the quintic curves", sigma_z),
        ("point counts for q <= 49", counts),
        ("reduction classifiers and flat limits", reductions),
        ("Shafarevich counts over Q", shafarevich),
        ("degree-22 model over Z", v22),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        failed += usize::from(!ok);
        println!("{} {:>2} {name} [{:.1}s]: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
