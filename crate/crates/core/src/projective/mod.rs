//! Projective points, varieties, parametrized rational curves and linear
//! actions, with the geometric tests built on them.

pub mod certificate;
pub mod plane;

use serde::Serialize;

use crate::binary::{binary_gcd_all, BinaryForm};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{proportional_vecs, Matrix};
use crate::multipoly::{monomials, MultiPoly};

/// Projective transformations are invertible square matrices up to scalars.
pub type ProjAction<F> = Matrix<F>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint<E> {
    coords: Vec<E>,
}

impl<E: Clone + PartialEq> ProjPoint<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, coords: Vec<E>) -> Result<Self> {
        if coords.iter().all(|c| f.is_zero(c)) {
            return Err(Error::ZeroInput("projective point with all coordinates zero"));
        }
        Ok(ProjPoint { coords })
    }
    pub fn from_ints<F: Field<Elem = E>>(f: &F, v: &[i64]) -> Result<Self> {
        Self::new(f, v.iter().map(|&x| f.from_i64(x)).collect())
    }
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
    pub fn coords(&self) -> &[E] {
        &self.coords
    }
    pub fn same<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> bool {
        proportional_vecs(f, &self.coords, &o.coords)
    }
    /// Scales so the first nonzero coordinate is one.
    pub fn normalized<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let k = self.coords.iter().position(|c| !f.is_zero(c)).unwrap();
        let inv = f.inv(&self.coords[k]).unwrap();
        ProjPoint { coords: self.coords.iter().map(|c| f.mul(c, &inv)).collect() }
    }
    pub fn format<F: Field<Elem = E>>(&self, f: &F) -> String {
        format!("({})", self.coords.iter().map(|c| f.format(c)).collect::<Vec<_>>().join(":"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietySpec<E> {
    dim: usize,
    generators: Vec<MultiPoly<E>>,
    degrees: Vec<u32>,
}

impl<E: Clone + PartialEq> VarietySpec<E> {
    pub fn new(dim: usize, generators: Vec<MultiPoly<E>>) -> Result<Self> {
        let mut degrees = Vec::new();
        for g in &generators {
            if g.nvars() != dim + 1 {
                return Err(Error::DimensionMismatch { expected: dim + 1, got: g.nvars() });
            }
            degrees.push(g.homogeneous_degree().ok_or_else(|| Error::Invalid("generator not homogeneous".into()))?);
        }
        Ok(VarietySpec { dim, generators, degrees })
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn generators(&self) -> &[MultiPoly<E>] {
        &self.generators
    }
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }
}

/// A rational curve `P^1 -> P^n` given by `n + 1` binary forms of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveMap<E> {
    forms: Vec<BinaryForm<E>>,
}

impl<E: Clone + PartialEq> CurveMap<E> {
    /// Builds the map, stripping any common factor of positive degree.
    /// The stripped factor is returned alongside (degree 0 when none).
    pub fn with_content<F: Field<Elem = E>>(f: &F, forms: Vec<BinaryForm<E>>) -> Result<(Self, BinaryForm<E>)> {
        let d = forms.first().ok_or(Error::ZeroInput("curve with no coordinates"))?.degree();
        if forms.iter().any(|g| g.degree() != d) {
            return Err(Error::Invalid("coordinate forms of different degrees".into()));
        }
        let g = binary_gcd_all(f, &forms).map_err(|_| Error::ZeroInput("curve with all coordinates zero"))?;
        if g.degree() == 0 {
            return Ok((CurveMap { forms }, g));
        }
        let forms = forms
            .iter()
            .map(|h| if h.is_zero(f) { BinaryForm::zero(f, d - g.degree()) } else { h.div_exact(f, &g).unwrap() })
            .collect();
        Ok((CurveMap { forms }, g))
    }
    pub fn new<F: Field<Elem = E>>(f: &F, forms: Vec<BinaryForm<E>>) -> Result<Self> {
        Ok(Self::with_content(f, forms)?.0)
    }
    /// A line through two points, `s P + t Q`.
    pub fn line<F: Field<Elem = E>>(f: &F, p: &[E], q: &[E]) -> Result<Self> {
        Self::new(f, p.iter().zip(q).map(|(a, b)| BinaryForm::new(vec![a.clone(), b.clone()])).collect())
    }
    pub fn from_int_coeffs<F: Field<Elem = E>>(f: &F, rows: &[&[i64]]) -> Result<Self> {
        Self::new(f, rows.iter().map(|r| BinaryForm::new(r.iter().map(|&x| f.from_i64(x)).collect())).collect())
    }
    pub fn forms(&self) -> &[BinaryForm<E>] {
        &self.forms
    }
    pub fn degree(&self) -> usize {
        self.forms[0].degree()
    }
    pub fn dim(&self) -> usize {
        self.forms.len() - 1
    }
    pub fn eval<F: Field<Elem = E>>(&self, f: &F, s: &E, t: &E) -> Vec<E> {
        self.forms.iter().map(|g| g.eval(f, s, t)).collect()
    }
    /// `C o M` for a 2x2 matrix acting on the source.
    pub fn reparametrize<F: Field<Elem = E>>(&self, f: &F, m: &[[E; 2]; 2]) -> Self {
        CurveMap { forms: self.forms.iter().map(|g| g.compose(f, m)).collect() }
    }
    /// `(n+1) x (d+1)` coefficient matrix.
    pub fn coefficient_rows(&self) -> Vec<Vec<E>> {
        self.forms.iter().map(|g| g.coeffs().to_vec()).collect()
    }
    pub fn format<F: Field<Elem = E>>(&self, f: &F) -> String {
        format!("({})", self.forms.iter().map(|g| g.format(f)).collect::<Vec<_>>().join(" : "))
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub fn point_on_variety<F: Field>(f: &F, p: &ProjPoint<F::Elem>, v: &VarietySpec<F::Elem>) -> Result<bool> {
    check_dim(v.dim(), p.dim())?;
    Ok(v.generators().iter().all(|g| f.is_zero(&g.eval(f, p.coords()))))
}

pub fn curve_on_variety<F: Field>(f: &F, c: &CurveMap<F::Elem>, v: &VarietySpec<F::Elem>) -> Result<bool> {
    check_dim(v.dim(), c.dim())?;
    for g in v.generators() {
        if !g.substitute_forms(f, c.forms())?.is_zero(f) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn rnc_rank<F: Field>(f: &F, c: &CurveMap<F::Elem>) -> usize {
    Matrix::from_rows(f, c.coefficient_rows()).rank()
}

/// Full coefficient rank: the curve is a rational normal curve in its span.
pub fn is_smooth_rnc<F: Field>(f: &F, c: &CurveMap<F::Elem>) -> bool {
    rnc_rank(f, c) == c.degree() + 1
}

pub fn act_point<F: Field>(a: &ProjAction<F>, p: &ProjPoint<F::Elem>) -> Result<ProjPoint<F::Elem>> {
    check_dim(a.cols(), p.coords().len())?;
    ProjPoint::new(a.field(), a.mul_vec(p.coords()))
}

pub fn act_curve<F: Field>(a: &ProjAction<F>, c: &CurveMap<F::Elem>) -> Result<CurveMap<F::Elem>> {
    check_dim(a.cols(), c.forms().len())?;
    let f = a.field();
    let d = c.degree();
    let forms = (0..a.rows())
        .map(|i| {
            c.forms().iter().enumerate().fold(BinaryForm::zero(f, d), |acc, (j, g)| {
                if f.is_zero(a.get(i, j)) {
                    acc
                } else {
                    acc.add(f, &g.scale(f, a.get(i, j)))
                }
            })
        })
        .collect();
    CurveMap::new(f, forms)
}

/// Coefficient vectors of homogeneous polynomials of degree `d` in `n` variables.
fn coefficient_vectors<F: Field>(f: &F, n: usize, d: u32, polys: &[MultiPoly<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let monos = monomials(n, d);
    polys.iter().map(|p| monos.iter().map(|m| p.coeff(m).cloned().unwrap_or_else(|| f.zero())).collect()).collect()
}

/// Each pulled-back generator lies in the span of the generators.
pub fn action_preserves_variety<F: Field>(a: &ProjAction<F>, v: &VarietySpec<F::Elem>) -> Result<bool> {
    let f = a.field();
    let d = *v.degrees().first().ok_or(Error::Invalid("variety with no generators".into()))?;
    if v.degrees().iter().any(|&x| x != d) {
        return Err(Error::Invalid("generators of mixed degree".into()));
    }
    check_dim(v.dim() + 1, a.cols())?;
    let n = v.dim() + 1;
    let base = coefficient_vectors(f, n, d, v.generators());
    let r0 = Matrix::from_rows(f, base.clone()).rank();
    for g in v.generators() {
        let pulled = g.pullback(f, a.data());
        let mut rows = base.clone();
        rows.extend(coefficient_vectors(f, n, d, &[pulled]));
        if Matrix::from_rows(f, rows).rank() != r0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The forms `f_i P_k - f_k P_i` for a fixed pivot `k` with `P_k != 0`.
fn cross_forms<F: Field>(f: &F, p: &ProjPoint<F::Elem>, c: &CurveMap<F::Elem>) -> Vec<BinaryForm<F::Elem>> {
    let k = p.coords().iter().position(|x| !f.is_zero(x)).unwrap();
    let fk = &c.forms()[k];
    c.forms()
        .iter()
        .zip(p.coords())
        .map(|(fi, pi)| fi.scale(f, &p.coords()[k]).sub(f, &fk.scale(f, pi)))
        .collect()
}

/// The gcd of the cross forms: its roots are the parameters mapping to `P`.
pub fn preimage_form<F: Field>(f: &F, p: &ProjPoint<F::Elem>, c: &CurveMap<F::Elem>) -> Result<BinaryForm<F::Elem>> {
    check_dim(c.dim(), p.dim())?;
    let cf = cross_forms(f, p, c);
    if cf.iter().all(|g| g.is_zero(f)) {
        return Err(Error::Invalid("constant curve".into()));
    }
    binary_gcd_all(f, &cf)
}

/// Parameters `(s:t)` with `C(s:t) = P`. Over infinite fields only simple
/// (linear-gcd) preimages are resolved.
pub fn point_preimage_on_curve<F: Field>(f: &F, p: &ProjPoint<F::Elem>, c: &CurveMap<F::Elem>) -> Result<Vec<(F::Elem, F::Elem)>> {
    let g = preimage_form(f, p, c)?;
    match g.degree() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![(g.coeff(1).clone(), f.neg(g.coeff(0)))]),
        _ if f.size().is_some() => Ok(g.projective_roots(f, 0)),
        _ => Err(Error::Unsupported("multiple preimages over an infinite field".into())),
    }
}

fn single_preimage<F: Field>(f: &F, p: &[F::Elem], c: &CurveMap<F::Elem>) -> Result<Option<(F::Elem, F::Elem)>> {
    let pt = ProjPoint::new(f, p.to_vec())?;
    let mut roots = point_preimage_on_curve(f, &pt, c)?;
    Ok(if roots.len() == 1 { roots.pop() } else { None })
}

/// Same image up to reparametrization, for curves that are rational normal
/// curves in their span. The reparametrization is solved from the
/// preimages of three points and then verified on all coefficients.
pub fn curves_same_image<F: Field>(f: &F, c1: &CurveMap<F::Elem>, c2: &CurveMap<F::Elem>) -> Result<bool> {
    Ok(reparametrization(f, c1, c2)?.is_some())
}

/// A matrix `M` with `C1 o M` proportional to `C2`, if any.
pub fn reparametrization<F: Field>(f: &F, c1: &CurveMap<F::Elem>, c2: &CurveMap<F::Elem>) -> Result<Option<[[F::Elem; 2]; 2]>> {
    if c1.degree() != c2.degree() || c1.dim() != c2.dim() {
        return Err(Error::Invalid("curves of different degree or ambient dimension".into()));
    }
    if !is_smooth_rnc(f, c1) || !is_smooth_rnc(f, c2) {
        return Err(Error::Invalid("curve image comparison needs embedded rational normal curves".into()));
    }
    let (o, z) = (f.one(), f.zero());
    let mut pre = Vec::new();
    for (s, t) in [(&o, &z), (&z, &o), (&o, &o)] {
        match single_preimage(f, &c2.eval(f, s, t), c1)? {
            Some(x) => pre.push(x),
            None => return Ok(None),
        }
    }
    let [(s0, t0), (s1, t1), (s2, t2)] = [pre[0].clone(), pre[1].clone(), pre[2].clone()];
    // solve lambda (s0,t0) + mu (s1,t1) = (s2,t2)
    let det = f.sub(&f.mul(&s0, &t1), &f.mul(&s1, &t0));
    let Some(dinv) = f.inv(&det) else { return Ok(None) };
    let lambda = f.mul(&f.sub(&f.mul(&s2, &t1), &f.mul(&s1, &t2)), &dinv);
    let mu = f.mul(&f.sub(&f.mul(&s0, &t2), &f.mul(&s2, &t0)), &dinv);
    let m = [[f.mul(&lambda, &s0), f.mul(&mu, &s1)], [f.mul(&lambda, &t0), f.mul(&mu, &t1)]];
    let r = c1.reparametrize(f, &m);
    let a: Vec<F::Elem> = r.forms().iter().flat_map(|g| g.coeffs().to_vec()).collect();
    let b: Vec<F::Elem> = c2.forms().iter().flat_map(|g| g.coeffs().to_vec()).collect();
    Ok(proportional_vecs(f, &a, &b).then_some(m))
}

/// Rank of `{G P}` modulo the Euler direction `P`.
pub fn tangent_orbit_dimension<F: Field>(f: &F, generators: &[Matrix<F>], p: &ProjPoint<F::Elem>) -> usize {
    let mut rows = vec![p.coords().to_vec()];
    rows.extend(generators.iter().map(|g| g.mul_vec(p.coords())));
    Matrix::from_rows(f, rows).rank() - 1
}

/// `B_q(P, Q) = q(P + Q) - q(P) - q(Q)`.
pub fn polarization<F: Field>(f: &F, q: &MultiPoly<F::Elem>, p: &[F::Elem], x: &[F::Elem]) -> F::Elem {
    let sum: Vec<F::Elem> = p.iter().zip(x).map(|(a, b)| f.add(a, b)).collect();
    f.sub(&f.sub(&q.eval(f, &sum), &q.eval(f, p)), &q.eval(f, x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineThrough<E> {
    pub line: CurveMap<E>,
    /// Second spanning point, chosen in a fixed complement of `P`.
    pub direction: Vec<E>,
    /// Smallest `e` with the line defined over `F_{p^e}`.
    pub definition_degree: usize,
}

/// Lines through `P` on a variety cut out by quadrics, over a finite field.
/// Pass an extension of the base field to find lines defined over it.
pub fn lines_through_point<F: Field>(f: &F, v: &VarietySpec<F::Elem>, p: &ProjPoint<F::Elem>, max_points: u64) -> Result<Vec<LineThrough<F::Elem>>> {
    let q = f.size().ok_or_else(|| Error::Unsupported("line search needs a finite field".into()))?;
    if v.degrees().iter().any(|&d| d != 2) {
        return Err(Error::Invalid("line search needs quadrics".into()));
    }
    if !point_on_variety(f, p, v)? {
        return Err(Error::Invalid("point is not on the variety".into()));
    }
    let n = v.dim() + 1;
    let units: Vec<Vec<F::Elem>> = (0..n).map(|j| (0..n).map(|i| if i == j { f.one() } else { f.zero() }).collect()).collect();
    let polar: Vec<Vec<F::Elem>> = v.generators().iter().map(|g| units.iter().map(|e| polarization(f, g, p.coords(), e)).collect()).collect();
    let w = Matrix::from_rows(f, polar).kernel();
    // complement of P inside W
    let mut chosen: Vec<Vec<F::Elem>> = Vec::new();
    let mut span = vec![p.coords().to_vec()];
    for b in w {
        let mut trial = span.clone();
        trial.push(b.clone());
        if Matrix::from_rows(f, trial.clone()).rank() == trial.len() {
            span = trial;
            chosen.push(b);
        }
    }
    let k = chosen.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let count = (0..k).try_fold(0u64, |acc, i| q.checked_pow(i as u32).map(|x| acc + x));
    if count.map_or(true, |c| c > max_points) {
        return Err(Error::BoundExceeded(format!("{k}-dimensional line search over a field of size {q}")));
    }
    let mut out = Vec::new();
    for lam in projective_points(f, k) {
        let x: Vec<F::Elem> = (0..n).map(|i| (0..k).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(&lam[j], &chosen[j][i])))).collect();
        if v.generators().iter().all(|g| f.is_zero(&g.eval(f, &x))) {
            let e = lam.iter().map(|c| crate::field::field_of_definition(f, c, 64)).fold(1, lcm);
            out.push(LineThrough { line: CurveMap::line(f, p.coords(), &x)?, direction: x, definition_degree: e });
        }
    }
    Ok(out)
}

fn lcm(a: usize, b: usize) -> usize {
    a / num_integer::gcd(a, b) * b
}

/// Points of `P^{k-1}` over a finite field, normalized with first nonzero coordinate one.
pub fn projective_points<F: Field>(f: &F, k: usize) -> Vec<Vec<F::Elem>> {
    let els = f.elements();
    let q = els.len();
    let mut out = Vec::new();
    for lead in 0..k {
        let free = k - lead - 1;
        let total = q.pow(free as u32);
        for mut idx in 0..total {
            let mut v = vec![f.zero(); k];
            v[lead] = f.one();
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = els[idx % q].clone();
                idx /= q;
            }
            out.push(v);
        }
    }
    out
}

/// Linear forms cutting out the span of a curve of degree one.
pub fn line_equations<F: Field>(f: &F, l: &CurveMap<F::Elem>) -> Result<Vec<Vec<F::Elem>>> {
    if l.degree() != 1 {
        return Err(Error::Invalid("not a line parametrization".into()));
    }
    let rows = Matrix::from_rows(f, l.coefficient_rows()).transpose();
    if rows.rank() != 2 {
        return Err(Error::Invalid("degenerate line".into()));
    }
    Ok(rows.kernel())
}

/// Length of the intersection of a line with the image of a curve.
pub fn line_curve_intersection_degree<F: Field>(f: &F, l: &CurveMap<F::Elem>, c: &CurveMap<F::Elem>) -> Result<usize> {
    check_dim(l.dim(), c.dim())?;
    let eqs = line_equations(f, l)?;
    let d = c.degree();
    let restricted: Vec<BinaryForm<F::Elem>> = eqs
        .iter()
        .map(|lam| lam.iter().zip(c.forms()).fold(BinaryForm::zero(f, d), |acc, (a, g)| acc.add(f, &g.scale(f, a))))
        .collect();
    if restricted.iter().all(|g| g.is_zero(f)) {
        return Err(Error::Invalid("curve is contained in the line".into()));
    }
    Ok(binary_gcd_all(f, &restricted)?.degree())
}

/// The matrix sending degree-2 monomials to their restrictions along `C`.
pub fn quadric_restriction_rows<F: Field>(f: &F, c: &CurveMap<F::Elem>) -> Vec<Vec<F::Elem>> {
    let n = c.dim() + 1;
    monomials(n, 2)
        .into_iter()
        .map(|e| {
            let m = MultiPoly::from_terms(f, n, vec![(e, f.one())]);
            m.substitute_forms(f, c.forms()).unwrap().coeffs().to_vec()
        })
        .collect()
}

/// Dimension of the space of quadrics containing the curve.
pub fn quadratic_normality<F: Field>(f: &F, c: &CurveMap<F::Elem>) -> usize {
    let rows = quadric_restriction_rows(f, c);
    let total = rows.len();
    total - Matrix::from_rows(f, rows).rank()
}

/// Smoothness of a quadric hypersurface: nondegenerate Gram matrix away from
/// characteristic 2; in characteristic 2 the quadric must be anisotropic on
/// the common kernel of its partials.
pub fn quadric_smoothness<F: Field>(f: &F, q: &MultiPoly<F::Elem>) -> Result<bool> {
    if q.homogeneous_degree() != Some(2) {
        return Err(Error::Invalid("not a quadric".into()));
    }
    let n = q.nvars();
    if f.characteristic() != 2 {
        let half = f.inv(&f.from_i64(2)).unwrap();
        let mut g = Matrix::zeros(f, n, n);
        for (e, c) in q.terms() {
            let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat(i).take(e[i] as usize)).collect();
            let (i, j) = (idx[0], idx[1]);
            if i == j {
                g.set(i, i, c.clone());
            } else {
                let h = f.mul(c, &half);
                g.set(i, j, h.clone());
                g.set(j, i, h);
            }
        }
        return Ok(!f.is_zero(&g.determinant()));
    }
    let rows: Vec<Vec<F::Elem>> = (0..n)
        .map(|i| {
            let p = q.partial(f, i);
            (0..n).map(|j| p.coeff(&crate::multipoly::unit(n, j)).cloned().unwrap_or_else(|| f.zero())).collect()
        })
        .collect();
    let k = Matrix::from_rows(f, rows).kernel();
    Ok(match k.len() {
        0 => true,
        1 => !f.is_zero(&q.eval(f, &k[0])),
        _ => false,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CurveSummary {
    pub degree: usize,
    pub ambient: usize,
    pub forms: String,
}

impl<E: Clone + PartialEq> CurveMap<E> {
    pub fn summary<F: Field<Elem = E>>(&self, f: &F) -> CurveSummary {
        CurveSummary { degree: self.degree(), ambient: self.dim(), forms: self.format(f) }
    }
}
