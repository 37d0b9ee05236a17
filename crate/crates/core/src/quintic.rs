//! Rational quintic curves on `Y` with positive-dimensional stabilizer:
//! construction, smoothness, stabilizers, rigidity, the loci of lines
//! meeting them, and the resulting finite-field counts.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::prime_power_split;
use crate::binary::BinaryForm;
use crate::error::{Error, Result};
use crate::field::{construct_extension, field_label, Field, Gf};
use crate::group::{self, Mat2};
use crate::matrix::Matrix;
use crate::multipoly::MultiPoly;
use crate::projective::plane::intersection_multiplicity;
use crate::projective::{
    act_curve, curve_on_variety, curves_same_image, is_smooth_rnc, line_curve_intersection_degree, lines_through_point, point_preimage_on_curve, CurveMap,
    ProjPoint,
};
use crate::status::Status;
use crate::v5::{cube_root_of_unity, named_lines, variety, ActionFamily, ActionKind, Check, NamedLine};

/// A quintic curve on `Y` given by one of the standard parametrizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuinticSpec<E> {
    /// The Mukai-Umemura type curve.
    MU,
    /// The additive type curve with parameter `xi`.
    Ga(E),
    /// The multiplicative type curve `Z_u`.
    Gm(E),
    /// Its image under the swap `(0 1; 1 0)`.
    GmPrime(E),
    /// A curve moved by a group element.
    Translated(Box<QuinticSpec<E>>, Mat2<E>),
}

impl<E: Clone + PartialEq> QuinticSpec<E> {
    pub fn label<F: Field<Elem = E>>(&self, f: &F) -> String {
        match self {
            QuinticSpec::MU => "Z_MU".into(),
            QuinticSpec::Ga(x) => format!("Z_a(xi={})", f.format(x)),
            QuinticSpec::Gm(u) => format!("Z_u(u={})", f.format(u)),
            QuinticSpec::GmPrime(u) => format!("Z'_u(u={})", f.format(u)),
            QuinticSpec::Translated(b, g) => format!("{} . {}", group::format(f, g), b.label(f)),
        }
    }
}

/// `u` avoids `0`, `1` and `5/4`; the last comparison is made on `P^1`,
/// so `(5:4)` is `(0:1)` in characteristic 5 and `(1:0)` in characteristic 2.
pub fn gm_parameter_valid<F: Field>(f: &F, u: &F::Elem) -> bool {
    !f.is_zero(u) && !f.is_one(u) && f.mul(&f.from_i64(4), u) != f.from_i64(5)
}

fn quintic_rows<F: Field>(f: &F, rows: [[F::Elem; 6]; 7]) -> Result<(CurveMap<F::Elem>, BinaryForm<F::Elem>)> {
    CurveMap::with_content(f, rows.into_iter().map(|r| BinaryForm::new(r.to_vec())).collect())
}

/// The parametrization together with the common factor stripped from it.
pub fn build_quintic_with_content<F: Field>(f: &F, spec: &QuinticSpec<F::Elem>) -> Result<(CurveMap<F::Elem>, BinaryForm<F::Elem>)> {
    let i = |n: i64| f.from_i64(n);
    let z = || f.zero();
    let mono = |k: usize, c: F::Elem| -> [F::Elem; 6] {
        let mut r = [z(), z(), z(), z(), z(), z()];
        r[k] = c;
        r
    };
    match spec {
        QuinticSpec::MU => quintic_rows(f, [mono(0, i(8)), mono(1, i(20)), mono(2, i(8)), mono(3, i(4)), mono(4, i(2)), mono(5, i(1)), mono(0, z())]),
        QuinticSpec::Ga(xi) => {
            let mut r0 = mono(0, i(8));
            r0[4] = f.mul(&i(2), xi);
            let mut r1 = mono(1, i(20));
            r1[5] = xi.clone();
            quintic_rows(f, [r0, r1, mono(2, i(8)), mono(3, i(4)), mono(4, i(2)), mono(5, i(1)), mono(0, z())])
        }
        QuinticSpec::Gm(u) => quintic_rows(
            f,
            [mono(0, f.sub(u, &f.one())), mono(1, u.clone()), mono(2, i(1)), mono(3, i(1)), mono(4, i(1)), mono(5, i(1)), mono(0, z())],
        ),
        QuinticSpec::GmPrime(u) => quintic_rows(
            f,
            [mono(0, z()), mono(5, i(1)), mono(4, i(1)), mono(3, i(1)), mono(2, i(1)), mono(1, u.clone()), mono(0, f.sub(u, &f.one()))],
        ),
        QuinticSpec::Translated(base, g) => {
            let (c, content) = build_quintic_with_content(f, base)?;
            let fam = ActionFamily::for_field(f)?;
            Ok((act_curve(&fam.matrix(g), &c)?, content))
        }
    }
}

pub fn build_quintic<F: Field>(f: &F, spec: &QuinticSpec<F::Elem>) -> Result<CurveMap<F::Elem>> {
    Ok(build_quintic_with_content(f, spec)?.0)
}

/// The curve lies on `Y`.
pub fn quintic_on_y<F: Field>(f: &F, spec: &QuinticSpec<F::Elem>) -> Result<bool> {
    curve_on_variety(f, &build_quintic(f, spec)?, &variety(f))
}

/// Smooth rational quintic on `Y`: no base locus, degree 5, and the six
/// coordinate forms span all quintics.
pub fn check_quintic_smooth<F: Field>(f: &F, spec: &QuinticSpec<F::Elem>) -> Result<bool> {
    let (c, content) = build_quintic_with_content(f, spec)?;
    Ok(content.degree() == 0 && c.degree() == 5 && is_smooth_rnc(f, &c) && curve_on_variety(f, &c, &variety(f))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StructureTag {
    Borel,
    #[serde(rename = "Ga-semidirect-mu4")]
    GaMu4,
    Torus,
    TorusByTwo,
    Other,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizerReport {
    pub curve: String,
    pub field: String,
    pub family: ActionKind,
    pub group_order: usize,
    pub order: usize,
    pub tag: StructureTag,
    pub generators: Vec<String>,
    pub unipotent_elements: usize,
    pub max_element_order: usize,
}

fn is_scalar<F: Field>(f: &F, g: &Mat2<F::Elem>) -> bool {
    f.is_zero(&g[0][1]) && f.is_zero(&g[1][0]) && g[0][0] == g[1][1]
}

/// Non-trivial with a single eigenvalue: `tr^2 = 4 det`.
pub fn is_unipotent_class<F: Field>(f: &F, g: &Mat2<F::Elem>) -> bool {
    let tr = f.add(&g[0][0], &g[1][1]);
    !is_scalar(f, g) && f.square(&tr) == f.mul(&f.from_i64(4), &group::det(f, g))
}

/// Order in `PGL_2`.
pub fn projective_order<F: Field>(f: &F, g: &Mat2<F::Elem>) -> usize {
    let mut x = g.clone();
    let mut n = 1;
    while !is_scalar(f, &x) {
        x = group::mul(f, &x, g);
        n += 1;
        if n > 1 << 20 {
            break;
        }
    }
    n
}

fn generated_subgroup<F: Field>(f: &F, gens: &[Mat2<F::Elem>]) -> HashSet<Mat2<F::Elem>> {
    let mut set: HashSet<Mat2<F::Elem>> = HashSet::new();
    let id = group::canonical(f, &group::identity(f));
    set.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = group::canonical(f, &group::mul(f, &x, g));
            if set.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    set
}

fn structure_tag<F: Field>(f: &F, q: usize, elements: &[Mat2<F::Elem>]) -> StructureTag {
    let n = elements.len();
    let unip: Vec<&Mat2<F::Elem>> = elements.iter().filter(|g| is_unipotent_class(f, g)).collect();
    let max_ss_order = elements.iter().filter(|g| !is_unipotent_class(f, g)).map(|g| projective_order(f, g)).max().unwrap_or(1);
    let canon: HashSet<Mat2<F::Elem>> = elements.iter().map(|g| group::canonical(f, g)).collect();
    let unip_normal = unip.iter().all(|u| {
        elements.iter().all(|g| {
            let c = group::mul(f, &group::mul(f, g, u), &group::inverse(f, g).unwrap());
            is_unipotent_class(f, &c) && canon.contains(&group::canonical(f, &c))
        })
    });
    let g4 = num_integer::gcd(4, q - 1);
    if n == q * (q - 1) && unip.len() == q - 1 && max_ss_order == q - 1 {
        StructureTag::Borel
    } else if n == q * g4 && unip.len() == q - 1 && unip_normal {
        StructureTag::GaMu4
    } else if n == q - 1 && unip.is_empty() && max_ss_order == q - 1 {
        StructureTag::Torus
    } else if n == 2 * (q - 1) && elements.iter().any(|g| projective_order(f, g) == q - 1) {
        StructureTag::TorusByTwo
    } else {
        StructureTag::Other
    }
}

/// The exact stabilizer of a smooth quintic in the finite acting group:
/// `PGL_2(F_q)` away from characteristic 2, `SL_2(F_q)` in characteristic 2.
pub fn stabilizer_exhaustive<F: Field>(f: &F, spec: &QuinticSpec<F::Elem>, bound: usize) -> Result<StabilizerReport> {
    let q = f.size().ok_or_else(|| Error::Unsupported("stabilizer enumeration needs a finite field".into()))? as usize;
    if q.saturating_mul(q * q - 1) > bound {
        return Err(Error::BoundExceeded(format!("group of order {} exceeds the enumeration bound {bound}", q * (q * q - 1))));
    }
    if !check_quintic_smooth(f, spec)? {
        return Err(Error::Invalid(format!("{} is not a smooth quintic over {}", spec.label(f), field_label(f))));
    }
    let fam = ActionFamily::for_field(f)?;
    let z = build_quintic(f, spec)?;
    let all = fam.group_elements();
    let stab: Vec<Mat2<F::Elem>> = all
        .par_iter()
        .filter(|g| act_curve(&fam.matrix(g), &z).and_then(|m| curves_same_image(f, &m, &z)).unwrap_or(false))
        .cloned()
        .collect();
    let mut gens: Vec<Mat2<F::Elem>> = Vec::new();
    let mut span = generated_subgroup(f, &gens);
    for g in &stab {
        if !span.contains(&group::canonical(f, g)) {
            gens.push(g.clone());
            span = generated_subgroup(f, &gens);
        }
    }
    Ok(StabilizerReport {
        curve: spec.label(f),
        field: field_label(f),
        family: fam.kind(),
        group_order: all.len(),
        order: stab.len(),
        tag: structure_tag(f, q, &stab),
        generators: gens.iter().map(|g| group::format(f, g)).collect(),
        unipotent_elements: stab.iter().filter(|g| is_unipotent_class(f, g)).count(),
        max_element_order: stab.iter().map(|g| projective_order(f, g)).max().unwrap_or(1),
    })
}

/// Group elements carrying the first curve onto the second.
pub fn mapping_elements<F: Field>(f: &F, from: &QuinticSpec<F::Elem>, to: &QuinticSpec<F::Elem>) -> Result<Vec<Mat2<F::Elem>>> {
    let fam = ActionFamily::for_field(f)?;
    let a = build_quintic(f, from)?;
    let b = build_quintic(f, to)?;
    Ok(fam
        .group_elements()
        .into_par_iter()
        .filter(|g| act_curve(&fam.matrix(g), &a).and_then(|m| curves_same_image(f, &m, &b)).unwrap_or(false))
        .collect())
}

/// True when no group element maps `Z_u` onto `Z_{u'}`.
pub fn verify_gm_rigidity<F: Field>(f: &F, u: &F::Elem, u2: &F::Elem) -> Result<bool> {
    if !gm_parameter_valid(f, u) || !gm_parameter_valid(f, u2) {
        return Err(Error::Invalid("Gm parameters must avoid 0, 1 and 5/4".into()));
    }
    Ok(mapping_elements(f, &QuinticSpec::Gm(u.clone()), &QuinticSpec::Gm(u2.clone()))?.is_empty())
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub field: String,
    pub parameters: usize,
    pub pairs_checked: usize,
    pub mapped_pairs: Vec<(String, String)>,
    pub status: Status,
}

/// Rigidity for every ordered pair of distinct valid parameters.
pub fn verify_gm_rigidity_all<F: Field>(f: &F) -> Result<RigidityReport> {
    let fam = ActionFamily::for_field(f)?;
    let us: Vec<F::Elem> = f.elements().into_iter().filter(|u| gm_parameter_valid(f, u)).collect();
    let curves: Vec<CurveMap<F::Elem>> = us.iter().map(|u| build_quintic(f, &QuinticSpec::Gm(u.clone()))).collect::<Result<_>>()?;
    let mats: Vec<Matrix<F>> = fam.group_elements().par_iter().map(|g| fam.matrix(g)).collect();
    let pairs: Vec<(usize, usize)> = (0..us.len()).flat_map(|i| (0..us.len()).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mapped: Vec<(String, String)> = pairs
        .par_iter()
        .filter(|&&(i, j)| mats.iter().any(|m| act_curve(m, &curves[i]).and_then(|c| curves_same_image(f, &c, &curves[j])).unwrap_or(false)))
        .map(|&(i, j)| (f.format(&us[i]), f.format(&us[j])))
        .collect();
    Ok(RigidityReport {
        field: field_label(f),
        parameters: us.len(),
        pairs_checked: pairs.len(),
        status: Status::from_bool(mapped.is_empty()),
        mapped_pairs: mapped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CountType {
    #[serde(rename = "PGL2")]
    Pgl2,
    Ga,
    Gm,
}

impl CountType {
    pub fn as_str(self) -> &'static str {
        match self {
            CountType::Pgl2 => "PGL2",
            CountType::Ga => "Ga",
            CountType::Gm => "Gm",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountRecord {
    #[serde(rename = "type")]
    pub kind: CountType,
    pub q: u64,
    pub enumerated: u64,
    pub formula: u64,
    pub agree: bool,
}

/// Closed formulas for the number of isomorphism classes over `F_q`.
pub fn count_formula(kind: CountType, q: u64) -> u64 {
    let bad = q % 2 == 0 || q % 5 == 0;
    match kind {
        CountType::Pgl2 => u64::from(!bad),
        CountType::Ga if bad => 0,
        CountType::Ga => num_integer::gcd(4, q - 1),
        CountType::Gm if bad => 2 * q - 4,
        CountType::Gm => 2 * q - 6,
    }
}

/// Cosets of the fourth powers in `F_q^x`, by explicit partition.
pub fn fourth_power_classes<F: Field>(f: &F) -> usize {
    let units: Vec<F::Elem> = f.elements().into_iter().filter(|x| !f.is_zero(x)).collect();
    let fourth: HashSet<F::Elem> = units.iter().map(|x| f.pow(x, 4)).collect();
    let mut seen: HashSet<F::Elem> = HashSet::new();
    let mut classes = 0;
    for x in &units {
        if seen.contains(x) {
            continue;
        }
        classes += 1;
        seen.extend(fourth.iter().map(|h| f.mul(x, h)));
    }
    classes
}

/// Enumerated count against the formula. The enumeration is driven by the
/// smoothness test of the representative curves.
pub fn count_v22(kind: CountType, q: u64) -> Result<CountRecord> {
    let (p, e) = prime_power_split(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
    let k = construct_extension(p, e as usize)?;
    let enumerated = match kind {
        CountType::Pgl2 => u64::from(check_quintic_smooth(&k, &QuinticSpec::MU)?),
        CountType::Ga => {
            if check_quintic_smooth(&k, &QuinticSpec::Ga(k.one()))? {
                fourth_power_classes(&k) as u64
            } else {
                0
            }
        }
        CountType::Gm => {
            // P^1(F_q) minus {(0:1), (1:1), (5:4), (1:0)}, compared as projective points
            let excluded: Vec<[i64; 2]> = vec![[0, 1], [1, 1], [5, 4], [1, 0]];
            let norm = |a: &<Gf as Field>::Elem, b: &<Gf as Field>::Elem| ProjPoint::new(&k, vec![a.clone(), b.clone()]).map(|x| x.normalized(&k).coords().to_vec());
            let excluded: HashSet<Vec<<Gf as Field>::Elem>> = excluded.iter().filter_map(|[a, b]| norm(&k.from_i64(*a), &k.from_i64(*b)).ok()).collect();
            let mut count = 0u64;
            for u in k.elements() {
                if excluded.contains(&norm(&u, &k.one())?) {
                    continue;
                }
                if !check_quintic_smooth(&k, &QuinticSpec::Gm(u.clone()))? {
                    return Err(Error::Invalid(format!("Z_u not smooth at admissible u = {}", k.format(&u))));
                }
                count += 1;
            }
            if !excluded.contains(&norm(&k.one(), &k.zero())?) {
                count += 1;
            }
            2 * count
        }
    };
    let formula = count_formula(kind, q);
    Ok(CountRecord { kind, q, enumerated, formula, agree: enumerated == formula })
}

/// Whether `xi / xi'` is a fourth power in a finite field.
pub fn ga_form_class_finite<F: Field>(f: &F, xi: &F::Elem, xi2: &F::Elem) -> Result<bool> {
    if matches!(f.characteristic(), 2 | 5) {
        return Err(Error::Characteristic("no additive type curves in characteristic 2 or 5".into()));
    }
    let r = f.div(xi, xi2).filter(|_| !f.is_zero(xi)).ok_or(Error::ZeroInput("xi must be nonzero"))?;
    Ok(f.elements().iter().any(|x| f.pow(x, 4) == r))
}

/// Whether `xi / xi'` is a fourth power in `Q`.
pub fn ga_form_class_rational(xi: &BigRational, xi2: &BigRational) -> Result<bool> {
    if xi.is_zero() || xi2.is_zero() {
        return Err(Error::ZeroInput("xi must be nonzero"));
    }
    let r = xi / xi2;
    if r.is_negative() {
        return Ok(false);
    }
    let is_fourth = |n: &BigInt| {
        let root = n.nth_root(4);
        root.pow(4) == *n
    };
    Ok(is_fourth(r.numer()) && is_fourth(r.denom()))
}

// ---------------------------------------------------------------------------
// Lines meeting the curve.

/// Which curve the line locus is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SigmaZSpec {
    MU,
    /// The additive type, through `(0:-4:0:0:0:1:0)`.
    Ga,
    /// The multiplicative type; `u` is the element with this index in `F_{p^e}`.
    Gm { u: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct TracedLine {
    pub at: String,
    pub label: String,
    pub plane_point: String,
    pub component: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentCheck {
    pub equation: String,
    pub degree: usize,
    pub distinct_points: usize,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityCheck {
    pub components: (usize, usize),
    pub point: String,
    pub expected: usize,
    pub found: Option<usize>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaZReport {
    pub curve: String,
    pub field: String,
    pub parameters: Vec<(String, String)>,
    pub orbit_on_curve: Check,
    pub line_matching: Check,
    pub traced: Vec<TracedLine>,
    pub components: Vec<ComponentCheck>,
    pub off_components: Vec<String>,
    pub multiplicities: Vec<MultiplicityCheck>,
    pub bezout: Vec<Check>,
    pub bisecant: Check,
    pub meeting_bisecant: Check,
    pub extra: Vec<Check>,
    pub status: Status,
}

type E = <Gf as Field>::Elem;

fn plane_poly(k: &Gf, terms: &[(E, [u32; 3])]) -> MultiPoly<E> {
    MultiPoly::from_terms(k, 3, terms.iter().map(|(c, e)| (e.to_vec(), c.clone())).collect())
}

struct TraceSetup {
    curve: CurveMap<E>,
    curve_label: String,
    base: Vec<E>,
    base_lines: Vec<&'static str>,
    h: Mat2<E>,
    params: Vec<(String, Mat2<E>)>,
    extras: Vec<([i64; 7], Vec<&'static str>)>,
    components: Vec<(String, MultiPoly<E>)>,
    tangencies: Vec<(usize, usize, [i64; 3], usize)>,
    parameters: Vec<(String, String)>,
    extra_checks: Vec<Check>,
    // plane coordinates read through the inverse Frobenius
    untwist: bool,
}

const MAX_TRACE: usize = 24;

fn setup(k: &Gf, spec: SigmaZSpec) -> Result<TraceSetup> {
    let i = |n: i64| k.from_i64(n);
    let nonzero: Vec<E> = k.elements().into_iter().filter(|x| !k.is_zero(x)).take(MAX_TRACE).collect();
    let all: Vec<E> = k.elements().into_iter().take(MAX_TRACE).collect();
    let unip: Vec<(String, Mat2<E>)> = all.iter().map(|b| (format!("U({})", k.format(b)), group::unipotent(k, b))).collect();
    let y = || plane_poly(k, &[(i(1), [0, 1, 0])]);
    let p = k.characteristic();
    match spec {
        SigmaZSpec::MU => {
            if matches!(p, 2 | 5) {
                return Err(Error::Characteristic("the Mukai-Umemura curve is singular in characteristic 2 and 5".into()));
            }
            Ok(TraceSetup {
                curve: build_quintic(k, &QuinticSpec::MU)?,
                curve_label: QuinticSpec::MU.label(k),
                base: [0, 0, 0, 0, 0, 1, 0].iter().map(|&x| i(x)).collect(),
                base_lines: vec!["l(0:1:0)", "l(0:0:1)"],
                h: group::identity(k),
                params: unip,
                extras: vec![([1, 0, 0, 0, 0, 0, 0], vec!["l(1:0:0)"])],
                components: vec![
                    ("y".into(), y()),
                    ("2xy - z^2".into(), plane_poly(k, &[(i(2), [1, 1, 0]), (i(-1), [0, 0, 2])])),
                ],
                tangencies: vec![(0, 1, [1, 0, 0], 2)],
                parameters: vec![],
                extra_checks: vec![],
                untwist: false,
            })
        }
        SigmaZSpec::Ga => {
            if matches!(p, 2 | 5) {
                return Err(Error::Characteristic("additive type curves are singular in characteristic 2 and 5".into()));
            }
            let xi = i(-4);
            let mut extra_checks = Vec::new();
            // Z_1 is a translate of Z_{-4} when -1/4 is a fourth power
            let target = k.div(&i(-1), &i(4)).unwrap();
            if let Some(c) = k.elements().into_iter().find(|c| k.pow(c, 4) == target) {
                let moved = build_quintic(k, &QuinticSpec::Translated(Box::new(QuinticSpec::Ga(xi.clone())), group::diagonal(k, &c, &k.one())))?;
                let z1 = build_quintic(k, &QuinticSpec::Ga(k.one()))?;
                extra_checks.push(Check::new("translate-to-xi-1", curves_same_image(k, &moved, &z1)?, format!("diag({}, 1) maps Z_a(-4) to Z_a(1)", k.format(&c))));
            }
            Ok(TraceSetup {
                curve: build_quintic(k, &QuinticSpec::Ga(xi.clone()))?,
                curve_label: QuinticSpec::Ga(xi).label(k),
                base: [0, -4, 0, 0, 0, 1, 0].iter().map(|&x| i(x)).collect(),
                base_lines: vec!["l(0:0:1)", "l(2:-1:0)", "l(2:1:0)"],
                h: group::identity(k),
                params: unip,
                extras: vec![([1, 0, 0, 0, 0, 0, 0], vec!["l(1:0:0)"])],
                components: vec![
                    ("y".into(), y()),
                    ("2(x + 2y)y - z^2".into(), plane_poly(k, &[(i(2), [1, 1, 0]), (i(4), [0, 2, 0]), (i(-1), [0, 0, 2])])),
                    ("2(x - 2y)y - z^2".into(), plane_poly(k, &[(i(2), [1, 1, 0]), (i(-4), [0, 2, 0]), (i(-1), [0, 0, 2])])),
                ],
                tangencies: vec![(1, 2, [1, 0, 0], 4), (0, 1, [1, 0, 0], 2), (0, 2, [1, 0, 0], 2)],
                parameters: vec![("xi".into(), "-4".into())],
                extra_checks,
                untwist: false,
            })
        }
        SigmaZSpec::Gm { u } => {
            let q = k.size().unwrap();
            if u >= q {
                return Err(Error::Invalid(format!("parameter index {u} outside F{q}")));
            }
            let u = k.element(u);
            if !gm_parameter_valid(k, &u) {
                return Err(Error::Invalid("Gm parameter must avoid 0, 1 and 5/4".into()));
            }
            let curve = build_quintic(k, &QuinticSpec::Gm(u.clone()))?;
            let extras = vec![([0, 0, 0, 0, 0, 1, 0], vec!["l(0:0:1)", "l(0:1:0)"]), ([1, 0, 0, 0, 0, 0, 0], vec!["l(1:0:0)"])];
            let tangencies = vec![(1, 2, [1, 0, 0], 2), (1, 2, [0, 1, 0], 2), (0, 1, [1, 0, 0], 2), (0, 2, [1, 0, 0], 2)];
            if p != 2 {
                // v^{-4} = 5 - 4u
                let w = k.sub(&i(5), &k.mul(&i(4), &u));
                let v = k
                    .elements()
                    .into_iter()
                    .find(|v| !k.is_zero(v) && k.is_one(&k.mul(&k.pow(v, 4), &w)))
                    .ok_or_else(|| Error::Invalid(format!("no v with v^-4 = 5 - 4u in {}; extend the field", field_label(k))))?;
                let v2 = k.square(&v);
                let comp = |sign: i64| {
                    plane_poly(k, &[(k.mul(&i(2), &v2), [1, 1, 0]), (k.neg(&k.add(&v2, &i(sign))), [0, 0, 2])])
                };
                Ok(TraceSetup {
                    curve,
                    curve_label: QuinticSpec::Gm(u.clone()).label(k),
                    base: [0, -4, 0, 0, 0, 1, 0].iter().map(|&x| i(x)).collect(),
                    base_lines: vec!["l(0:0:1)", "l(2:-1:0)", "l(2:1:0)"],
                    h: group::unipotent(k, &v),
                    params: nonzero.iter().map(|t| (format!("diag({}, 1)", k.format(t)), group::diagonal(k, t, &k.one()))).collect(),
                    extras,
                    components: vec![("y".into(), y()), ("2xyv^2 - z^2(v^2 - 1)".into(), comp(-1)), ("2xyv^2 - z^2(v^2 + 1)".into(), comp(1))],
                    tangencies,
                    parameters: vec![("u".into(), k.format(&u)), ("v".into(), k.format(&v))],
                    extra_checks: vec![],
                    untwist: false,
                })
            } else {
                if k.pow(&u, 4) != u {
                    return Err(Error::Invalid("in characteristic 2 the Gm parameter must lie in F4".into()));
                }
                let a = k
                    .elements()
                    .into_iter()
                    .find(|a| k.add(&k.square(a), a) == u)
                    .ok_or_else(|| Error::Invalid(format!("no a with a^2 + a = u in {}; extend the field", field_label(k))))?;
                let w = cube_root_of_unity(k).ok_or_else(|| Error::Invalid(format!("{} has no cube root of unity", field_label(k))))?;
                let w2 = k.square(&w);
                let h = [[a.clone(), k.add(&a, &k.one())], [k.one(), k.one()]];
                let fam = ActionFamily::for_field(k)?;
                let pu = fam.matrix(&h).mul_vec(&[1, 0, 0, 1, 0, 0, 1].map(|x| i(x)));
                let claimed: Vec<E> = vec![k.sub(&u, &k.one()), u.clone(), i(1), i(1), i(1), i(1), i(0)];
                let comp = |c: &E| plane_poly(k, &[(k.add(&a, c), [0, 0, 2]), (i(-1), [1, 1, 0])]);
                Ok(TraceSetup {
                    curve,
                    curve_label: QuinticSpec::Gm(u.clone()).label(k),
                    base: [1, 0, 0, 1, 0, 0, 1].iter().map(|&x| i(x)).collect(),
                    base_lines: vec!["l(1:1:1)", "l(w^2:w:1)", "l(w:w^2:1)"],
                    h,
                    params: nonzero
                        .iter()
                        .map(|t| (format!("diag({}, {})", k.format(t), k.format(&k.inv(t).unwrap())), group::diagonal(k, t, &k.inv(t).unwrap())))
                        .collect(),
                    extras,
                    components: vec![("y".into(), y()), ("z^2(a + w) - xy".into(), comp(&w)), ("z^2(a + w^2) - xy".into(), comp(&w2))],
                    tangencies,
                    parameters: vec![("u".into(), k.format(&u)), ("a".into(), k.format(&a)), ("w".into(), k.format(&w))],
                    extra_checks: vec![Check::new(
                        "moved-base-point",
                        crate::matrix::proportional_vecs(k, &pu, &claimed),
                        format!("sigma'(h)(1:0:0:1:0:0:1) = {}", ProjPoint::new(k, pu.clone())?.format(k)),
                    )],
                    untwist: true,
                })
            }
        }
    }
}

fn lines_meet(k: &Gf, a: &CurveMap<E>, b: &CurveMap<E>) -> bool {
    let cols = |c: &CurveMap<E>| -> Vec<Vec<E>> { (0..2).map(|j| c.forms().iter().map(|g| g.coeff(j).clone()).collect()).collect() };
    let mut rows = cols(a);
    rows.extend(cols(b));
    Matrix::from_rows(k, rows).rank() <= 3
}

const LINE_SEARCH_POINTS: u64 = 1 << 22;

/// Traces the lines through a one-parameter orbit dense in the curve, places
/// their coordinates in the plane of lines on the claimed components, and
/// checks the claimed tangencies and the bisecant.
pub fn verify_sigma_z_decomposition(spec: SigmaZSpec, p: u64, e: usize) -> Result<SigmaZReport> {
    let k = construct_extension(p, e)?;
    let st = setup(&k, spec)?;
    let q = k.size().unwrap();
    let fam = ActionFamily::for_field(&k)?;
    let y = variety(&k);
    let named: Vec<NamedLine<E>> = named_lines(&k)?;
    let find = |label: &str| -> Result<&NamedLine<E>> { named.iter().find(|n| n.label == label).ok_or_else(|| Error::Invalid(format!("line {label} unavailable over {}", field_label(&k)))) };

    // (point label, found line, matched label, plane point)
    let mut records: Vec<(String, CurveMap<E>, String, Vec<E>)> = Vec::new();
    let mut unmatched: Vec<String> = Vec::new();
    let mut off_curve: Vec<String> = Vec::new();
    let mut jobs: Vec<(String, Matrix<Gf>, Matrix<Gf>, Vec<E>, Vec<&'static str>)> = st
        .params
        .iter()
        .map(|(name, g)| {
            let gh = group::mul(&k, g, &st.h);
            let a = fam.matrix(&gh);
            let pt = a.mul_vec(&st.base);
            (name.clone(), a, fam.line_plane_matrix(&gh), pt, st.base_lines.clone())
        })
        .collect();
    for (pt, labels) in &st.extras {
        jobs.push((format!("fixed {:?}", pt), Matrix::identity(&k, 7), Matrix::identity(&k, 3), pt.iter().map(|&x| k.from_i64(x)).collect(), labels.clone()));
    }
    for (name, a, r, pt, labels) in &jobs {
        let point = ProjPoint::new(&k, pt.clone())?;
        if point_preimage_on_curve(&k, &point, &st.curve)?.is_empty() {
            off_curve.push(format!("{name}: {}", point.format(&k)));
        }
        let found = lines_through_point(&k, &y, &point, LINE_SEARCH_POINTS)?;
        let expected: Vec<(String, CurveMap<E>, Vec<E>)> =
            labels.iter().map(|l| Ok((l.to_string(), act_curve(a, &find(l)?.line)?, r.mul_vec(&find(l)?.plane_point)))).collect::<Result<_>>()?;
        if found.len() != expected.len() {
            unmatched.push(format!("{name}: {} lines found, {} expected", found.len(), expected.len()));
        }
        for l in &found {
            match expected.iter().find(|(_, c, _)| curves_same_image(&k, &l.line, c).unwrap_or(false)) {
                Some((label, _, x)) => {
                    let x = if st.untwist { x.iter().map(|c| k.pow(c, q / 2)).collect() } else { x.clone() };
                    records.push((name.clone(), l.line.clone(), label.clone(), x))
                }
                None => unmatched.push(format!("{name}: unmatched line {}", l.line.format(&k))),
            }
        }
    }

    let comp_of = |x: &[E]| st.components.iter().position(|(_, c)| k.is_zero(&c.eval(&k, x)));
    let traced: Vec<TracedLine> = records
        .iter()
        .map(|(at, _, label, x)| TracedLine { at: at.clone(), label: label.clone(), plane_point: ProjPoint::new(&k, x.clone()).unwrap().format(&k), component: comp_of(x) })
        .collect();
    let off_components: Vec<String> = traced.iter().filter(|t| t.component.is_none()).map(|t| format!("{} via {}: {}", t.at, t.label, t.plane_point)).collect();
    let components: Vec<ComponentCheck> = st
        .components
        .iter()
        .map(|(name, c)| {
            let pts: HashSet<Vec<E>> = records.iter().filter(|r| k.is_zero(&c.eval(&k, &r.3))).map(|r| ProjPoint::new(&k, r.3.clone()).unwrap().normalized(&k).coords().to_vec()).collect();
            let d = c.homogeneous_degree().unwrap_or(0) as usize;
            ComponentCheck { equation: name.clone(), degree: d, distinct_points: pts.len(), status: Status::from_bool(pts.len() > 2 * d) }
        })
        .collect();

    let mut multiplicities = Vec::new();
    for &(i1, i2, pt, expected) in &st.tangencies {
        let x: Vec<E> = pt.iter().map(|&v| k.from_i64(v)).collect();
        let found = intersection_multiplicity(&k, &st.components[i1].1, &st.components[i2].1, &x).ok();
        multiplicities.push(MultiplicityCheck {
            components: (i1, i2),
            point: ProjPoint::new(&k, x)?.format(&k),
            expected,
            found,
            status: Status::from_bool(found == Some(expected)),
        });
    }
    let mut pairs: Vec<(usize, usize)> = st.tangencies.iter().map(|t| (t.0, t.1)).collect();
    pairs.dedup();
    let bezout: Vec<Check> = pairs
        .iter()
        .map(|&(i1, i2)| {
            let total: usize = multiplicities.iter().filter(|m| m.components == (i1, i2)).filter_map(|m| m.found).sum();
            let d = st.components[i1].1.homogeneous_degree().unwrap_or(0) * st.components[i2].1.homogeneous_degree().unwrap_or(0);
            Check::new(format!("bezout {} . {}", st.components[i1].0, st.components[i2].0), total == d as usize, format!("local multiplicities sum to {total} of {d}"))
        })
        .collect();

    let bis = &find("l(1:0:0)")?.line;
    let degrees: Vec<(String, usize)> = records.iter().map(|r| Ok((r.2.clone(), line_curve_intersection_degree(&k, &r.1, &st.curve)?))).collect::<Result<_>>()?;
    let bisecants: std::collections::BTreeSet<&str> = degrees.iter().filter(|(_, d)| *d == 2).map(|(l, _)| l.as_str()).collect();
    let others_simple = degrees.iter().all(|(l, d)| (*d == 2) == (l == "l(1:0:0)") && *d >= 1);
    let bisecant = Check::new(
        "unique-bisecant",
        others_simple && bisecants.len() == 1 && bisecants.contains("l(1:0:0)") && line_curve_intersection_degree(&k, bis, &st.curve)? == 2,
        format!("lines with intersection degree 2: {:?}; {} lines examined", bisecants, degrees.len()),
    );
    let meet_bad: Vec<String> = records
        .iter()
        .filter(|r| lines_meet(&k, &r.1, bis) != k.is_zero(&r.3[1]))
        .map(|r| format!("{} at {}", r.2, r.0))
        .collect();
    let meeting_bisecant = Check::new("lines-meeting-bisecant-are-the-line-component", meet_bad.is_empty(), format!("mismatches: {:?}", meet_bad));

    let orbit_on_curve = Check::new("orbit-points-on-curve", off_curve.is_empty(), format!("{} points, off the curve: {:?}", jobs.len(), off_curve));
    let line_matching = Check::new("lines-match-moved-named-lines", unmatched.is_empty(), format!("{} lines matched; problems: {:?}", records.len(), unmatched));
    let status = orbit_on_curve
        .status
        .combine(line_matching.status)
        .combine(Status::from_bool(off_components.is_empty()))
        .combine(components.iter().fold(Status::Pass, |s, c| s.combine(c.status)))
        .combine(multiplicities.iter().fold(Status::Pass, |s, c| s.combine(c.status)))
        .combine(bezout.iter().fold(Status::Pass, |s, c| s.combine(c.status)))
        .combine(bisecant.status)
        .combine(meeting_bisecant.status)
        .combine(st.extra_checks.iter().fold(Status::Pass, |s, c| s.combine(c.status)));
    Ok(SigmaZReport {
        curve: st.curve_label,
        field: field_label(&k),
        parameters: st.parameters,
        orbit_on_curve,
        line_matching,
        traced,
        components,
        off_components,
        multiplicities,
        bezout,
        bisecant,
        meeting_bisecant,
        extra: st.extra_checks,
        status,
    })
}

/// Index in `F_{p^e}` of the first valid Gm parameter whose auxiliary
/// root (`v` or `a`) lies in the same field.
pub fn gm_parameter_with_root(p: u64, e: usize) -> Result<Option<u64>> {
    let k = construct_extension(p, e)?;
    let q = k.size().unwrap();
    Ok((0..q).find(|&idx| {
        let u = k.element(idx);
        gm_parameter_valid(&k, &u)
            && if p == 2 {
                k.pow(&u, 4) == u && k.elements().iter().any(|a| k.add(&k.square(a), a) == u)
            } else {
                let w = k.sub(&k.from_i64(5), &k.mul(&k.from_i64(4), &u));
                k.elements().iter().any(|v| k.is_one(&k.mul(&k.pow(v, 4), &w)))
            }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn literal_parametrizations() {
        let q = Rationals;
        let z = build_quintic(&q, &QuinticSpec::MU).unwrap();
        let lead: Vec<BigRational> = z.coefficient_rows().iter().map(|r| r.iter().find(|c| !c.is_zero()).cloned().unwrap_or_default()).collect();
        assert_eq!(lead, [8, 20, 8, 4, 2, 1, 0].map(crate::arith::int).to_vec());
        assert_eq!(build_quintic(&q, &QuinticSpec::Ga(q.zero())).unwrap(), z);
        let f = PrimeField::new(7).unwrap();
        let g = build_quintic(&f, &QuinticSpec::Gm(3)).unwrap();
        let rows: Vec<Vec<u64>> = g.coefficient_rows();
        assert_eq!(rows[0], vec![2, 0, 0, 0, 0, 0]);
        assert_eq!(rows[1], vec![0, 3, 0, 0, 0, 0]);
    }

    #[test]
    fn smoothness_by_characteristic() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            let expect = !matches!(p, 2 | 5);
            assert_eq!(check_quintic_smooth(&f, &QuinticSpec::MU).unwrap(), expect, "p = {p}");
            assert_eq!(check_quintic_smooth(&f, &QuinticSpec::Ga(1)).unwrap(), expect, "p = {p}");
        }
        let f = PrimeField::new(7).unwrap();
        assert!(!check_quintic_smooth(&f, &QuinticSpec::Gm(1)).unwrap());
        assert!(check_quintic_smooth(&f, &QuinticSpec::Gm(3)).unwrap());
    }

    #[test]
    fn stabilizers_over_f7() {
        let f = PrimeField::new(7).unwrap();
        let mu = stabilizer_exhaustive(&f, &QuinticSpec::MU, 1 << 20).unwrap();
        assert_eq!((mu.order, mu.tag), (42, StructureTag::Borel));
        let gm = stabilizer_exhaustive(&f, &QuinticSpec::Gm(2), 1 << 20).unwrap();
        assert_eq!((gm.order, gm.tag), (6, StructureTag::Torus));
        // 3 = 5/4 in F7, where Z_u is a translate of the Mukai-Umemura curve
        assert!(!gm_parameter_valid(&f, &3));
        assert_eq!(stabilizer_exhaustive(&f, &QuinticSpec::Gm(3), 1 << 20).unwrap().order, 42);
        let ga = stabilizer_exhaustive(&f, &QuinticSpec::Ga(1), 1 << 20).unwrap();
        assert_eq!((ga.order, ga.tag), (14, StructureTag::GaMu4));
        assert!(stabilizer_exhaustive(&f, &QuinticSpec::MU, 100).is_err());
    }

    #[test]
    fn swap_maps_z_u_to_primed() {
        let f = PrimeField::new(7).unwrap();
        let swapped = build_quintic(&f, &QuinticSpec::Translated(Box::new(QuinticSpec::Gm(2)), group::mat2(&f, 0, 1, 1, 0))).unwrap();
        assert!(curves_same_image(&f, &swapped, &build_quintic(&f, &QuinticSpec::GmPrime(2)).unwrap()).unwrap());
    }

    #[test]
    fn rigidity_small() {
        let f = PrimeField::new(7).unwrap();
        assert!(verify_gm_rigidity(&f, &2, &5).unwrap());
        assert!(!verify_gm_rigidity(&f, &2, &2).unwrap());
        let g = PrimeField::new(13).unwrap();
        assert!(verify_gm_rigidity(&g, &3, &5).unwrap());
    }

    #[test]
    fn counts_match_formulas() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 13, 25] {
            for kind in [CountType::Pgl2, CountType::Ga, CountType::Gm] {
                let r = count_v22(kind, q).unwrap();
                assert!(r.agree, "{r:?}");
            }
        }
        assert_eq!(count_v22(CountType::Gm, 7).unwrap().enumerated, 8);
        assert_eq!(count_v22(CountType::Gm, 4).unwrap().enumerated, 4);
        assert_eq!(count_v22(CountType::Ga, 13).unwrap().enumerated, 4);
        assert_eq!(count_v22(CountType::Pgl2, 5).unwrap().enumerated, 0);
    }

    #[test]
    fn fourth_power_classes_rational_and_finite() {
        let q = Rationals;
        assert!(ga_form_class_rational(&crate::arith::int(16), &q.one()).unwrap());
        assert!(!ga_form_class_rational(&crate::arith::int(2), &q.one()).unwrap());
        assert!(!ga_form_class_rational(&crate::arith::int(-1), &q.one()).unwrap());
        assert!(ga_form_class_rational(&crate::arith::rat(1, 81), &crate::arith::int(16)).unwrap());
        let f = PrimeField::new(13).unwrap();
        assert_eq!(fourth_power_classes(&f), 4);
        assert!(ga_form_class_finite(&f, &3, &1).unwrap());
        assert!(!ga_form_class_finite(&f, &2, &1).unwrap());
        assert!(ga_form_class_finite(&PrimeField::new(5).unwrap(), &1, &1).is_err());
    }

    #[test]
    fn sigma_z_mu_over_f7() {
        let r = verify_sigma_z_decomposition(SigmaZSpec::MU, 7, 1).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:#?}");
    }

    #[test]
    fn sigma_z_other_types() {
        let cases = [(SigmaZSpec::Ga, 13, 1), (SigmaZSpec::Gm { u: 2 }, 7, 1), (SigmaZSpec::Gm { u: 12 }, 13, 1), (SigmaZSpec::Gm { u: gm_parameter_with_root(2, 4).unwrap().unwrap() }, 2, 4)];
        for (spec, p, e) in cases {
            let r = verify_sigma_z_decomposition(spec, p, e).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:#?}");
        }
        assert!(verify_sigma_z_decomposition(SigmaZSpec::Gm { u: 2 }, 2, 4).is_err());
    }
}
