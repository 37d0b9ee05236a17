//! Exact matrices over a field, plus fraction-free integer routines
//! (Bareiss determinant, Smith normal form).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_prime, mul_mod, pow_mod};
use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<Vec<F::Elem>>,
}

impl<F: Field> Matrix<F> {
    pub fn from_rows(field: &F, data: Vec<Vec<F::Elem>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { field: field.clone(), rows, cols, data }
    }
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![vec![field.zero(); cols]; rows] }
    }
    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i][i] = field.one();
        }
        m
    }
    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i][j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i][j] = v;
    }
    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i]
    }
    pub fn data(&self) -> &[Vec<F::Elem>] {
        &self.data
    }
    pub fn transpose(&self) -> Self {
        let data = (0..self.cols).map(|j| (0..self.rows).map(|i| self.data[i][j].clone()).collect()).collect();
        Matrix { field: self.field.clone(), rows: self.cols, cols: self.rows, data }
    }
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, &other.data[k][j]);
                    out.data[i][j] = f.add(&out.data[i][j], &t);
                }
            }
        }
        out
    }
    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len());
        let f = &self.field;
        self.data
            .iter()
            .map(|row| row.iter().zip(v).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b))))
            .collect()
    }
    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        let data = self.data.iter().map(|r| r.iter().map(|x| f.mul(x, c)).collect()).collect();
        Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = &self.field;
        let mut m = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !f.is_zero(&m[i][c])) else {
                continue;
            };
            m.swap(r, pr);
            let inv = f.inv(&m[r][c]).unwrap();
            for x in m[r].iter_mut() {
                *x = f.mul(x, &inv);
            }
            for i in 0..self.rows {
                if i != r && !f.is_zero(&m[i][c]) {
                    let factor = m[i][c].clone();
                    for j in c..self.cols {
                        let t = f.mul(&factor, &m[r][j]);
                        m[i][j] = f.sub(&m[i][j], &t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data: m }, pivots)
    }

    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut m = self.data.clone();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !f.is_zero(&m[i][c])) else {
                continue;
            };
            m.swap(r, pr);
            let inv = f.inv(&m[r][c]).unwrap();
            for i in r + 1..self.rows {
                if !f.is_zero(&m[i][c]) {
                    let factor = f.mul(&m[i][c], &inv);
                    for j in c..self.cols {
                        let t = f.mul(&factor, &m[r][j]);
                        m[i][j] = f.sub(&m[i][j], &t);
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(&r.data[i][fc]);
                }
                v
            })
            .collect()
    }

    pub fn kernel_and_rank(&self) -> (usize, Vec<Vec<F::Elem>>) {
        let k = self.kernel();
        (self.cols - k.len(), k)
    }

    pub fn determinant(&self) -> F::Elem {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let f = &self.field;
        let n = self.rows;
        let mut m = self.data.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !f.is_zero(&m[i][c])) else {
                return f.zero();
            };
            if pr != c {
                m.swap(pr, c);
                det = f.neg(&det);
            }
            det = f.mul(&det, &m[c][c]);
            let inv = f.inv(&m[c][c]).unwrap();
            for i in c + 1..n {
                if !f.is_zero(&m[i][c]) {
                    let factor = f.mul(&m[i][c], &inv);
                    for j in c..n {
                        let t = f.mul(&factor, &m[c][j]);
                        m[i][j] = f.sub(&m[i][j], &t);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        let f = &self.field;
        let mut aug = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = self.data[i].clone();
            row.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            aug.push(row);
        }
        let (r, pivots) = Matrix::from_rows(f, aug).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_rows(f, r.data.iter().map(|row| row[n..].to_vec()).collect()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| self.field.is_zero(x)))
    }

    pub fn map<G: Field>(&self, g: &G, phi: impl Fn(&F::Elem) -> G::Elem) -> Matrix<G> {
        Matrix::from_rows(g, self.data.iter().map(|r| r.iter().map(&phi).collect()).collect())
    }

    /// Equality up to a nonzero scalar, by vanishing of all cross determinants.
    pub fn proportional(&self, other: &Self) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let a: Vec<&F::Elem> = self.data.iter().flatten().collect();
        let b: Vec<&F::Elem> = other.data.iter().flatten().collect();
        proportional_slices(&self.field, &a, &b)
    }
}

/// Two nonzero tuples agree up to scalar. Uses a pivot to keep the test linear
/// rather than checking every pair; equivalent to all `a_i b_j - a_j b_i` vanishing.
pub fn proportional_slices<F: Field>(f: &F, a: &[&F::Elem], b: &[&F::Elem]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(k) = a.iter().position(|x| !f.is_zero(x)) else {
        return false;
    };
    if f.is_zero(b[k]) {
        return false;
    }
    (0..a.len()).all(|i| f.mul(a[k], b[i]) == f.mul(a[i], b[k]))
}

pub fn proportional_vecs<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> bool {
    let ar: Vec<&F::Elem> = a.iter().collect();
    let br: Vec<&F::Elem> = b.iter().collect();
    proportional_slices(f, &ar, &br)
}

/// Bareiss fraction-free determinant over the integers.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Determinant modulo a word-size prime.
pub fn det_mod_p(rows: &[Vec<BigInt>], p: u64) -> u64 {
    let n = rows.len();
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| num_traits::ToPrimitive::to_u64(&x.mod_floor(&pb)).unwrap()).collect())
        .collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if pr != c {
            m.swap(pr, c);
            det = (p - det) % p;
        }
        det = mul_mod(det, m[c][c], p);
        let inv = pow_mod(m[c][c], p - 2, p);
        for i in c + 1..n {
            if m[i][c] == 0 {
                continue;
            }
            let factor = mul_mod(m[i][c], inv, p);
            for j in c..n {
                let t = mul_mod(factor, m[c][j], p);
                m[i][j] = (m[i][j] + p - t) % p;
            }
        }
    }
    det
}

/// Exact integer determinant by Chinese remaindering against the Hadamard bound.
pub fn det_multimodular(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let log2_bound: f64 = rows
        .iter()
        .map(|r| {
            let norm2: BigInt = r.iter().map(|x| x * x).sum();
            if norm2.is_zero() {
                0.0
            } else {
                norm2.bits() as f64 / 2.0
            }
        })
        .sum::<f64>()
        + 2.0;
    if rows.iter().any(|r| r.iter().all(|x| x.is_zero())) {
        return BigInt::zero();
    }
    let mut modulus = BigInt::one();
    let mut acc = BigInt::zero();
    let mut p: u64 = (1 << 62) - 1;
    while (modulus.bits() as f64) < log2_bound + 1.0 {
        while !is_prime(p) {
            p -= 2;
        }
        let r = det_mod_p(rows, p);
        let pb = BigInt::from(p);
        let cur = num_traits::ToPrimitive::to_u64(&acc.mod_floor(&pb)).unwrap();
        let minv = pow_mod(num_traits::ToPrimitive::to_u64(&modulus.mod_floor(&pb)).unwrap(), p - 2, p);
        let k = mul_mod((r + p - cur) % p, minv, p);
        acc += &modulus * BigInt::from(k);
        modulus *= &pb;
        p -= 2;
    }
    let half = &modulus >> 1;
    if acc > half {
        acc - modulus
    } else {
        acc
    }
}

/// Rank over the integers (equivalently over `Q`) by fraction-free elimination.
pub fn bareiss_rank(m: &[Vec<BigInt>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut a = m.to_vec();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[i][j] * &a[r][c] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Nonzero diagonal entries of the Smith normal form.
pub fn smith_invariants(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for j in t..cols {
                        let v = &a[t][j] * &q;
                        a[i][j] -= v;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    changed = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for i in t..rows {
                        let v = &a[i][t] * &q;
                        a[i][j] -= v;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // divisibility condition on the remaining block
            let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| {
                !(&a[i][j] % &a[t][t]).is_zero()
            });
            match bad {
                Some((i, _)) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn bi(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn identity_rank() {
        let f = Rationals;
        let m = Matrix::identity(&f, 3);
        let (r, k) = m.kernel_and_rank();
        assert_eq!((r, k.len()), (3, 0));
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = PrimeField::new(7).unwrap();
        let m = Matrix::from_rows(&f, vec![vec![1, 2, 3, 4], vec![2, 4, 6, 1], vec![0, 0, 0, 0]]);
        let (r, k) = m.kernel_and_rank();
        assert_eq!(r + k.len(), 4);
        for v in k {
            assert!(m.mul_vec(&v).iter().all(|x| *x == 0));
        }
    }

    #[test]
    fn bareiss_matches_field_det() {
        let rows = bi(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        let q = Rationals;
        let qm = Matrix::from_rows(&q, rows.iter().map(|r| r.iter().map(|x| q.from_bigint(x)).collect()).collect());
        assert_eq!(q.from_bigint(&bareiss_det(rows.clone())), qm.determinant());
        assert_eq!(bareiss_rank(&rows), 3);
    }

    #[test]
    fn multimodular_matches_bareiss() {
        let rows = bi(&[&[123456789, -987654321, 5], &[3, 1 << 40, -7], &[0, 99, 1 << 33]]);
        assert_eq!(det_multimodular(&rows), bareiss_det(rows.clone()));
        assert_eq!(det_multimodular(&bi(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn smith_small() {
        assert_eq!(smith_invariants(&bi(&[&[2, 0], &[0, 3]])), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(smith_invariants(&bi(&[&[2, 0, 0], &[4, 0, 0], &[0, 4, 0], &[0, 0, 4]])).len(), 3);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = PrimeField::new(13).unwrap();
        let m = Matrix::from_rows(&f, vec![vec![1, 2], vec![3, 5]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 2));
    }
}
