//! Plane curves: local intersection multiplicities by resultants.

use crate::binary::BinaryForm;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::multipoly::MultiPoly;
use crate::projective::projective_points;

/// Coefficients in `z` of a polynomial in `(x, y, z)`, lowest first.
fn z_coefficients<F: Field>(f: &F, p: &MultiPoly<F::Elem>) -> Vec<MultiPoly<F::Elem>> {
    let d = p.terms().map(|(e, _)| e[2]).max().unwrap_or(0) as usize;
    let mut out = vec![MultiPoly::zero(3); d + 1];
    for (e, c) in p.terms() {
        let k = e[2] as usize;
        out[k] = out[k].add(f, &MultiPoly::from_terms(f, 3, vec![(vec![e[0], e[1], 0], c.clone())]));
    }
    out
}

fn det_poly<F: Field>(f: &F, m: &[Vec<MultiPoly<F::Elem>>]) -> MultiPoly<F::Elem> {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(3);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly<F::Elem>>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = m[0][j].mul(f, &det_poly(f, &minor));
        acc = if j % 2 == 0 { acc.add(f, &term) } else { acc.sub(f, &term) };
    }
    acc
}

/// `Res_z(a, b)` as a polynomial in `x, y` (still in three variables).
pub fn resultant_z<F: Field>(f: &F, a: &MultiPoly<F::Elem>, b: &MultiPoly<F::Elem>) -> MultiPoly<F::Elem> {
    let ca = z_coefficients(f, a);
    let cb = z_coefficients(f, b);
    let (m, n) = (ca.len() - 1, cb.len() - 1);
    let size = m + n;
    if size == 0 {
        return MultiPoly::constant(f, 3, f.one());
    }
    let mut rows = vec![vec![MultiPoly::zero(3); size]; size];
    for i in 0..n {
        for (k, c) in ca.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in cb.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    det_poly(f, &rows)
}

fn to_binary<F: Field>(f: &F, p: &MultiPoly<F::Elem>, d: usize) -> BinaryForm<F::Elem> {
    let mut c = vec![f.zero(); d + 1];
    for (e, v) in p.terms() {
        c[e[1] as usize] = f.add(&c[e[1] as usize], v);
    }
    BinaryForm::new(c)
}

fn univariate_in_z<F: Field>(f: &F, p: &MultiPoly<F::Elem>, x: &F::Elem, y: &F::Elem) -> Vec<F::Elem> {
    z_coefficients(f, p).iter().map(|c| c.eval(f, &[x.clone(), y.clone(), f.zero()])).collect()
}

/// Intersection multiplicity of the plane curves `V(a)` and `V(b)` at `p`,
/// over a finite field. The curves must share no component.
///
/// The curves are projected from a point `O` off both curves such that the
/// line `Op` meets `V(a) cap V(b)` only at `p`; the multiplicity is then the
/// order of the corresponding root of the resultant.
pub fn intersection_multiplicity<F: Field>(f: &F, a: &MultiPoly<F::Elem>, b: &MultiPoly<F::Elem>, p: &[F::Elem]) -> Result<usize> {
    if f.size().is_none() {
        return Err(Error::Unsupported("projection centre search needs a finite field".into()));
    }
    if !f.is_zero(&a.eval(f, p)) || !f.is_zero(&b.eval(f, p)) {
        return Ok(0);
    }
    let (da, db) = (a.homogeneous_degree().unwrap_or(0) as usize, b.homogeneous_degree().unwrap_or(0) as usize);
    let units: Vec<Vec<F::Elem>> = (0..3).map(|i| (0..3).map(|j| if i == j { f.one() } else { f.zero() }).collect()).collect();
    for o in projective_points(f, 3) {
        if f.is_zero(&a.eval(f, &o)) || f.is_zero(&b.eval(f, &o)) {
            continue;
        }
        // columns e_i, e_j, O
        let Some(basis) = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).find_map(|(i, j)| {
            let cols = vec![units[i].clone(), units[j].clone(), o.clone()];
            let m = Matrix::from_rows(f, cols).transpose();
            (m.rank() == 3).then_some(m)
        }) else {
            continue;
        };
        let rows: Vec<Vec<F::Elem>> = (0..3).map(|i| basis.row(i).to_vec()).collect();
        let (a2, b2) = (a.pullback(f, &rows), b.pullback(f, &rows));
        let p2 = basis.inverse().expect("invertible").mul_vec(p);
        if f.is_zero(&p2[0]) && f.is_zero(&p2[1]) {
            continue;
        }
        let ua = univariate_in_z(f, &a2, &p2[0], &p2[1]);
        let ub = univariate_in_z(f, &b2, &p2[0], &p2[1]);
        let g = crate::poly::gcd(f, &ua, &ub);
        let k = crate::poly::degree(f, &g).unwrap_or(0);
        let single = (0..k).fold(vec![f.one()], |acc, _| crate::poly::mul(f, &acc, &[f.neg(&p2[2]), f.one()]));
        if crate::poly::monic(f, &g) != single {
            continue;
        }
        let r = to_binary(f, &resultant_z(f, &a2, &b2), da * db);
        return r.root_multiplicity(f, &p2[0], &p2[1]).ok_or_else(|| Error::Invalid("curves share a component".into()));
    }
    Err(Error::Invalid("no admissible projection centre over this field".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::multipoly::parse_poly;

    const V: [&str; 3] = ["x", "y", "z"];

    fn mult(p: u64, a: &str, b: &str, pt: [i64; 3]) -> usize {
        let f = PrimeField::new(p).unwrap();
        let pt: Vec<u64> = pt.iter().map(|&x| f.from_i64(x)).collect();
        intersection_multiplicity(&f, &parse_poly(&f, &V, a).unwrap(), &parse_poly(&f, &V, b).unwrap(), &pt).unwrap()
    }

    #[test]
    fn textbook_multiplicities() {
        // transversal lines, tangent line to a conic, osculating conics
        assert_eq!(mult(7, "x", "y", [0, 0, 1]), 1);
        assert_eq!(mult(7, "y*z - x^2", "y", [0, 0, 1]), 2);
        assert_eq!(mult(11, "y*z - x^2", "y*z - x^2 - y^2", [0, 0, 1]), 4);
        assert_eq!(mult(11, "y*z - x^2", "y*z - x^2 - x*y", [0, 0, 1]), 3);
        assert_eq!(mult(7, "y*z - x^2", "x", [0, 1, 0]), 1);
        assert_eq!(mult(7, "y*z - x^2", "x - z", [0, 0, 1]), 0);
    }

    #[test]
    fn bezout_for_two_conics() {
        // x^2 + y^2 - z^2 and x y meet at four points
        let pts = [[1, 0, 1], [1, 0, -1], [0, 1, 1], [0, 1, -1]];
        let total: usize = pts.iter().map(|&p| mult(13, "x^2 + y^2 - z^2", "x*y", p)).sum();
        assert_eq!(total, 4);
    }
}
