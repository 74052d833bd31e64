//! Gaussian elimination over an abstract field.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub trait FieldOps {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;
    fn neg(&self, a: &Self::E) -> Self::E {
        self.sub(&self.zero(), a)
    }
}

/// The rationals.
pub struct Rationals;

impl FieldOps for Rationals {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: FieldOps>(f: &F, m: &mut [Vec<F::E>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(&m[i][c])) else { continue };
        m.swap(r, pr);
        let inv = f.inv(&m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !f.is_zero(&row[c]) {
                let k = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = f.sub(x, &f.mul(&k, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right kernel `{v : m v = 0}`.
pub fn kernel<F: FieldOps>(f: &F, m: &[Vec<F::E>]) -> Vec<Vec<F::E>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.to_vec();
    let pivots = rref(f, &mut a);
    let mut out = vec![];
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(&a[r][free]);
        }
        out.push(v);
    }
    out
}

/// Solve the square system `m x = b`; `None` if `m` is singular.
pub fn solve<F: FieldOps>(f: &F, m: &[Vec<F::E>], b: &[F::E]) -> Option<Vec<F::E>> {
    let n = m.len();
    let mut a: Vec<Vec<F::E>> = m.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    let pivots = rref(f, &mut a);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

/// Determinant by elimination.
pub fn det<F: FieldOps>(f: &F, m: &[Vec<F::E>]) -> F::E {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = f.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !f.is_zero(&a[i][c])) else { return f.zero() };
        if pr != c {
            a.swap(c, pr);
            d = f.neg(&d);
        }
        d = f.mul(&d, &a[c][c]);
        let inv = f.inv(&a[c][c]).unwrap();
        for i in c + 1..n {
            if f.is_zero(&a[i][c]) {
                continue;
            }
            let k = f.mul(&a[i][c], &inv);
            let pivot = a[c].clone();
            for (x, y) in a[i].iter_mut().zip(&pivot) {
                *x = f.sub(x, &f.mul(&k, y));
            }
        }
    }
    d
}

/// Characteristic polynomial `det(x I - m)` over Q, monic, lowest degree
/// first (Faddeev-LeVerrier).
pub fn charpoly_q(m: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = m.len();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // mk = m mk_prev + c[n-k+1] I
        let mut next = mat_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        mk = next;
        let am = mat_mul(m, &mk);
        let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / BigRational::from_integer(k.into());
    }
    c
}

pub fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).fold(BigRational::zero(), |acc, (x, r)| acc + x * &r[j]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[&[i64]]) -> Vec<Vec<BigRational>> {
        v.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect()
    }

    #[test]
    fn small_matrices() {
        let m = q(&[&[2, 1], &[1, 3]]);
        assert_eq!(det(&Rationals, &m), BigRational::from_integer(5.into()));
        let cp = charpoly_q(&m);
        assert_eq!(cp, q(&[&[5, -5, 1]])[0]);
        let x = solve(&Rationals, &m, &q(&[&[1, 2]])[0]).unwrap();
        assert_eq!(x, vec![BigRational::new(1.into(), 5.into()), BigRational::new(3.into(), 5.into())]);
        let k = kernel(&Rationals, &q(&[&[1, 2, 3], &[2, 4, 6]]));
        assert_eq!(k.len(), 2);
        for v in k {
            let s: BigRational = v.iter().zip([1, 2, 3]).map(|(a, b)| a * BigRational::from_integer(b.into())).sum();
            assert!(s.is_zero());
        }
    }
}
