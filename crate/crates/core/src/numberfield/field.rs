use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linalg::{charpoly_q, det, solve, FieldOps, Rationals};
use crate::data::parse_rat;
use crate::exactcore::{inv_mod, IntPoly};
use crate::{Error, Result};

/// `Q(a)` for a root `a` of a monic irreducible integer polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    minpoly: IntPoly,
}

/// Element of a number field: rational coordinates in `1, a, ..., a^(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Elem(pub Vec<BigRational>);

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl NumberField {
    pub fn new(minpoly: IntPoly) -> Result<Self> {
        if minpoly.degree().unwrap_or(0) == 0 || !minpoly.is_monic() {
            return Err(Error::Precondition(format!("{minpoly} is not monic of positive degree")));
        }
        Ok(NumberField { minpoly })
    }

    pub fn from_i64(c: &[i64]) -> Result<Self> {
        Self::new(IntPoly::from_i64(c))
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn deg(&self) -> usize {
        self.minpoly.degree().unwrap()
    }

    /// Reduce arbitrary power-basis coordinates modulo the minimal polynomial.
    pub fn elem(&self, mut v: Vec<BigRational>) -> Elem {
        let n = self.deg();
        while v.len() > n {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = v.len() - n;
            for i in 0..n {
                v[shift + i] -= &top * rat(self.minpoly.coeff(i));
            }
        }
        v.resize(n, BigRational::zero());
        Elem(v)
    }

    /// Parse coordinates such as `["515/2", "-2377/4"]`.
    pub fn parse(&self, v: &[String]) -> Result<Elem> {
        Ok(self.elem(v.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?))
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> Elem {
        self.elem(vec![rat(n)])
    }

    pub fn from_rat(&self, r: BigRational) -> Elem {
        self.elem(vec![r])
    }

    pub fn zero(&self) -> Elem {
        self.elem(vec![])
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    /// The generator `a`.
    pub fn gen(&self) -> Elem {
        self.elem(vec![BigRational::zero(), BigRational::one()])
    }

    /// `g(a)`
    pub fn eval_poly(&self, g: &IntPoly) -> Elem {
        self.elem(g.coeffs().iter().map(|c| rat(c.clone())).collect())
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        Elem(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        Elem(x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, x: &Elem, r: &BigRational) -> Elem {
        Elem(x.0.iter().map(|a| a * r).collect())
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        let n = self.deg();
        let mut out = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in x.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        self.elem(out)
    }

    /// Matrix of multiplication by `x` on the power basis; column `j` holds
    /// the coordinates of `x a^j`.
    pub fn mul_matrix(&self, x: &Elem) -> Vec<Vec<BigRational>> {
        let n = self.deg();
        let mut cols = vec![];
        let mut y = x.clone();
        for _ in 0..n {
            cols.push(y.clone());
            y = self.mul(&y, &self.gen());
        }
        (0..n).map(|i| (0..n).map(|j| cols[j].0[i].clone()).collect()).collect()
    }

    /// Characteristic polynomial of multiplication by `x`, monic, lowest
    /// degree first.
    pub fn charpoly(&self, x: &Elem) -> Vec<BigRational> {
        charpoly_q(&self.mul_matrix(x))
    }

    /// Norm to Q.
    pub fn norm(&self, x: &Elem) -> BigRational {
        det(&Rationals, &self.mul_matrix(x))
    }

    pub fn trace(&self, x: &Elem) -> BigRational {
        let m = self.mul_matrix(x);
        (0..self.deg()).map(|i| m[i][i].clone()).sum()
    }

    /// An algebraic integer: the characteristic polynomial is integral.
    pub fn is_integral(&self, x: &Elem) -> bool {
        self.charpoly(x).iter().all(|c| c.is_integer())
    }

    pub fn inv(&self, x: &Elem) -> Option<Elem> {
        let mut e = vec![BigRational::zero(); self.deg()];
        e[0] = BigRational::one();
        solve(&Rationals, &self.mul_matrix(x), &e).map(Elem)
    }

    pub fn div(&self, x: &Elem, y: &Elem) -> Option<Elem> {
        Some(self.mul(x, &self.inv(y)?))
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        x.0.iter().all(|c| c.is_zero())
    }

    /// The rational number `x`, if it is one.
    pub fn to_rational(&self, x: &Elem) -> Option<BigRational> {
        x.0[1..].iter().all(|c| c.is_zero()).then(|| x.0[0].clone())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self, x: &Elem) -> BigInt {
        x.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Image of `x` under `a -> r` in `F_p`, for `x` with `p`-integral
    /// coordinates.
    pub fn residue(&self, x: &Elem, p: u64, r: u64) -> Option<u64> {
        let pb = BigInt::from(p);
        let mut acc = BigInt::zero();
        let mut pw = BigInt::one();
        for c in &x.0 {
            let d = u64::try_from(c.denom().mod_floor(&pb)).unwrap();
            let di = inv_mod(d, p)?;
            acc += c.numer() * di * &pw;
            pw = (pw * r) % &pb;
        }
        Some(u64::try_from(acc.mod_floor(&pb)).unwrap())
    }

    pub fn display(&self, x: &Elem) -> String {
        format!("{x}")
    }
}

impl FieldOps for NumberField {
    type E = Elem;
    fn zero(&self) -> Elem {
        NumberField::zero(self)
    }
    fn one(&self) -> Elem {
        NumberField::one(self)
    }
    fn is_zero(&self, a: &Elem) -> bool {
        NumberField::is_zero(self, a)
    }
    fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        NumberField::sub(self, a, b)
    }
    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        NumberField::mul(self, a, b)
    }
    fn inv(&self, a: &Elem) -> Option<Elem> {
        NumberField::inv(self, a)
    }
}

impl fmt::Display for Elem {
    /// `515/2 - 2377/4 a + 443 a^2`
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && i > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 if unit => write!(f, "a")?,
                1 => write!(f, " a")?,
                _ if unit => write!(f, "a^{i}")?,
                _ => write!(f, " a^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_field() {
        let k = NumberField::from_i64(&[26, -11, 1]).unwrap();
        let a = k.gen();
        assert_eq!(k.mul(&a, &a), k.elem(vec![rat(-26), rat(11)]));
        assert_eq!(k.norm(&k.add(&a, &k.from_int(5))), rat(106));
        assert_eq!(k.trace(&a), rat(11));
        let half = k.scale(&a, &BigRational::new(1.into(), 2.into()));
        assert!(!k.is_integral(&half));
        assert_eq!(k.charpoly(&half), vec![BigRational::new(13.into(), 2.into()), BigRational::new((-11).into(), 2.into()), rat(1)]);
        let x = k.add(&a, &k.from_int(5));
        assert_eq!(k.mul(&x, &k.inv(&x).unwrap()), k.one());
        assert_eq!(k.residue(&x, 2, 1), Some(0));
        assert_eq!(format!("{}", k.sub(&k.from_int(5), &a)), "5 - a");
    }

    #[test]
    fn norm_of_one() {
        let k = NumberField::from_i64(&[2026, -5205, 4471, -1714, 322, -29, 1]).unwrap();
        assert_eq!(k.norm(&k.one()), rat(1));
        assert_eq!(k.norm(&k.add(&k.gen(), &k.from_int(7))), rat(512 * 43 * 101));
    }
}
