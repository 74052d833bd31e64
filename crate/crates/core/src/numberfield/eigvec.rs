use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::{Elem, NumberField};
use super::linalg::kernel;
use crate::{Error, Result};

/// `(M - a I) v` for an integer matrix `M` and the field generator `a`.
pub fn apply_shifted(k: &NumberField, m: &[Vec<i64>], v: &[Elem]) -> Vec<Elem> {
    let a = k.gen();
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            let mut acc = k.scale(&k.mul(&a, &v[i]), &BigRational::from_integer((-1).into()));
            for (x, &c) in v.iter().zip(row) {
                acc = k.add(&acc, &k.scale(x, &BigRational::from_integer(c.into())));
            }
            acc
        })
        .collect()
}

/// `M v` with `v` over the field.
pub fn apply(k: &NumberField, m: &[Vec<i64>], v: &[Elem]) -> Vec<Elem> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(k.zero(), |acc, (&c, x)| k.add(&acc, &k.scale(x, &BigRational::from_integer(c.into()))))
        })
        .collect()
}

/// A basis vector of `ker(M - a I)` over `Q(a)`, normalised so that its
/// last nonzero coordinate is 1.
pub fn kernel_vector(k: &NumberField, m: &[Vec<i64>]) -> Result<Vec<Elem>> {
    let a = k.gen();
    let n = m.len();
    let shifted: Vec<Vec<Elem>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = k.from_int(m[i][j]);
                    if i == j {
                        k.sub(&c, &a)
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let ker = kernel(k, &shifted);
    if ker.len() != 1 {
        return Err(Error::Singular(format!("eigenspace of dimension {} over the field", ker.len())));
    }
    let v = ker.into_iter().next().unwrap();
    let last = v.iter().rev().find(|x| !k.is_zero(x)).cloned().unwrap();
    let inv = k.inv(&last).unwrap();
    Ok(v.iter().map(|x| k.mul(x, &inv)).collect())
}

/// Eigenvector coefficients normalised as in the published tables: the
/// least positive integer `ell` with `ell v` integral, then a multiplier `b`
/// such that `modulus` divides every norm `N(c_j - scale b ell v_j)`.
#[derive(Clone, Debug)]
pub struct EigenCoeffs {
    pub v: Vec<Elem>,
    pub ell: BigInt,
    pub b: i64,
    pub d: Vec<Elem>,
}

pub fn eigenvector_coeffs(
    k: &NumberField,
    m: &[Vec<i64>],
    c: &[i64],
    modulus: u64,
    scale: i64,
    b_range: i64,
) -> Result<EigenCoeffs> {
    let v = kernel_vector(k, m)?;
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(&k.denominator(x)));
    let mut ell = None;
    for l in divisors_of(&den) {
        let lr = BigRational::from_integer(l.clone());
        if v.iter().all(|x| k.is_integral(&k.scale(x, &lr))) {
            ell = Some(l);
            break;
        }
    }
    let ell = ell.ok_or_else(|| Error::Inconsistent("no integral multiple of the eigenvector".into()))?;
    let lv: Vec<Elem> = v.iter().map(|x| k.scale(x, &BigRational::from_integer(ell.clone()))).collect();
    let md = BigInt::from(modulus);
    let mut order: Vec<i64> = (0..=b_range).flat_map(|b| [b, -b]).collect();
    order.dedup();
    for b in order {
        if b == 0 {
            continue;
        }
        let sb = BigRational::from_integer((scale * b).into());
        let ok = lv.iter().zip(c).all(|(x, &cj)| {
            let t = k.sub(&k.from_int(cj), &k.scale(x, &sb));
            let n = k.norm(&t);
            n.is_integer() && (n.to_integer() % &md).is_zero()
        });
        if ok {
            let d = lv.iter().map(|x| k.scale(x, &BigRational::from_integer(b.into()))).collect();
            return Ok(EigenCoeffs { v, ell, b, d });
        }
    }
    Err(Error::Inconsistent(format!("no multiplier b with |b| <= {b_range}")))
}

fn divisors_of(n: &BigInt) -> Vec<BigInt> {
    let mut out = vec![];
    let mut d = BigInt::one();
    // denominators here are small powers of two times small primes
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// `w = sum_j d_j / v_j` when `d` is a multiple of `v` by a field element.
pub fn proportionality(k: &NumberField, v: &[Elem], d: &[Elem]) -> Option<Elem> {
    let j = v.iter().position(|x| !k.is_zero(x))?;
    let r = k.div(&d[j], &v[j])?;
    v.iter().zip(d).all(|(x, y)| k.mul(&r, x) == *y).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_eigenvector() {
        // [[2, 1], [1, 2]] has eigenvalue 3 with eigenvector (1, 1)
        let k = NumberField::from_i64(&[-3, 1]).unwrap();
        let m = vec![vec![2, 1], vec![1, 2]];
        let v = kernel_vector(&k, &m).unwrap();
        assert_eq!(v, vec![k.one(), k.one()]);
        assert!(apply_shifted(&k, &m, &v).iter().all(|x| k.is_zero(x)));
        // c - b v divisible by 5 forces b = 2 mod 5 for c = (2, 7)
        let e = eigenvector_coeffs(&k, &m, &[2, 7], 5, 1, 10).unwrap();
        assert_eq!(e.b, 2);
    }
}
