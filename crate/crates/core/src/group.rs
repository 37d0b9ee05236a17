//! 2x2 matrices over a field and enumeration of `PGL_2(F_q)` and `SL_2(F_q)`.

use rand::Rng;

use crate::field::Field;

/// Rows `[[a, b], [c, d]]`.
pub type Mat2<E> = [[E; 2]; 2];

pub fn mat2<F: Field>(f: &F, a: i64, b: i64, c: i64, d: i64) -> Mat2<F::Elem> {
    [[f.from_i64(a), f.from_i64(b)], [f.from_i64(c), f.from_i64(d)]]
}

pub fn identity<F: Field>(f: &F) -> Mat2<F::Elem> {
    mat2(f, 1, 0, 0, 1)
}

pub fn unipotent<F: Field>(f: &F, b: &F::Elem) -> Mat2<F::Elem> {
    [[f.one(), b.clone()], [f.zero(), f.one()]]
}

pub fn diagonal<F: Field>(f: &F, a: &F::Elem, d: &F::Elem) -> Mat2<F::Elem> {
    [[a.clone(), f.zero()], [f.zero(), d.clone()]]
}

pub fn mul<F: Field>(f: &F, x: &Mat2<F::Elem>, y: &Mat2<F::Elem>) -> Mat2<F::Elem> {
    let e = |i: usize, j: usize| f.add(&f.mul(&x[i][0], &y[0][j]), &f.mul(&x[i][1], &y[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn det<F: Field>(f: &F, x: &Mat2<F::Elem>) -> F::Elem {
    f.sub(&f.mul(&x[0][0], &x[1][1]), &f.mul(&x[0][1], &x[1][0]))
}

pub fn inverse<F: Field>(f: &F, x: &Mat2<F::Elem>) -> Option<Mat2<F::Elem>> {
    let di = f.inv(&det(f, x))?;
    Some([
        [f.mul(&x[1][1], &di), f.neg(&f.mul(&x[0][1], &di))],
        [f.neg(&f.mul(&x[1][0], &di)), f.mul(&x[0][0], &di)],
    ])
}

pub fn flatten<E: Clone>(x: &Mat2<E>) -> [E; 4] {
    [x[0][0].clone(), x[0][1].clone(), x[1][0].clone(), x[1][1].clone()]
}

/// Representative of the class modulo scalars with first nonzero entry one.
pub fn canonical<F: Field>(f: &F, x: &Mat2<F::Elem>) -> Mat2<F::Elem> {
    let v = flatten(x);
    let k = v.iter().position(|c| !f.is_zero(c)).expect("nonzero matrix");
    let inv = f.inv(&v[k]).unwrap();
    let s = |c: &F::Elem| f.mul(c, &inv);
    [[s(&x[0][0]), s(&x[0][1])], [s(&x[1][0]), s(&x[1][1])]]
}

pub fn format<F: Field>(f: &F, x: &Mat2<F::Elem>) -> String {
    format!("[[{}, {}], [{}, {}]]", f.format(&x[0][0]), f.format(&x[0][1]), f.format(&x[1][0]), f.format(&x[1][1]))
}

/// `PGL_2(F_q)`, one canonical representative per class: `q(q^2 - 1)` elements.
pub fn pgl2_elements<F: Field>(f: &F) -> Vec<Mat2<F::Elem>> {
    let els = f.elements();
    let mut out = Vec::new();
    let mut push = |m: Mat2<F::Elem>| {
        if !f.is_zero(&det(f, &m)) {
            out.push(m);
        }
    };
    // a = 1
    for b in &els {
        for c in &els {
            for d in &els {
                push([[f.one(), b.clone()], [c.clone(), d.clone()]]);
            }
        }
    }
    // a = 0, b = 1
    for c in &els {
        for d in &els {
            push([[f.zero(), f.one()], [c.clone(), d.clone()]]);
        }
    }
    out
}

/// `SL_2(F_q)`: `q(q^2 - 1)` elements.
pub fn sl2_elements<F: Field>(f: &F) -> Vec<Mat2<F::Elem>> {
    let els = f.elements();
    let mut out = Vec::new();
    for a in &els {
        for b in &els {
            for c in &els {
                // solve a d - b c = 1 for d when a != 0, else enumerate d
                if let Some(ai) = f.inv(a) {
                    let d = f.mul(&f.add(&f.one(), &f.mul(b, c)), &ai);
                    out.push([[a.clone(), b.clone()], [c.clone(), d]]);
                } else {
                    for d in &els {
                        let m = [[a.clone(), b.clone()], [c.clone(), d.clone()]];
                        if f.is_one(&det(f, &m)) {
                            out.push(m);
                        }
                    }
                }
            }
        }
    }
    out
}

/// A uniformly random invertible matrix over a finite field.
pub fn random_invertible<F: Field, R: Rng>(f: &F, rng: &mut R) -> Mat2<F::Elem> {
    let q = f.size().expect("finite field");
    loop {
        let m = [[f.element(rng.gen_range(0..q)), f.element(rng.gen_range(0..q))], [f.element(rng.gen_range(0..q)), f.element(rng.gen_range(0..q))]];
        if !f.is_zero(&det(f, &m)) {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{construct_extension, PrimeField};
    use std::collections::HashSet;

    #[test]
    fn group_orders() {
        for q in [2u64, 3, 5, 7] {
            let f = PrimeField::new(q).unwrap();
            assert_eq!(pgl2_elements(&f).len() as u64, q * (q * q - 1));
            assert_eq!(sl2_elements(&f).len() as u64, q * (q * q - 1));
        }
        let f4 = construct_extension(2, 2).unwrap();
        assert_eq!(sl2_elements(&f4).len(), 60);
    }

    #[test]
    fn pgl2_closed_under_products() {
        let f = PrimeField::new(3).unwrap();
        let g = pgl2_elements(&f);
        let set: HashSet<_> = g.iter().cloned().collect();
        for x in &g {
            for y in &g {
                assert!(set.contains(&canonical(&f, &mul(&f, x, y))));
            }
        }
    }
}
