use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::exactcore::{find_split_prime, inv_mod, mul_mod, pow_mod, reduce_i128, IntPoly};

/// Coefficient ring for restricted series: a commutative ring with a
/// designated primitive `mu`-th root of unity `zeta`.
pub trait CoeffRing {
    type E: Clone + PartialEq + Debug;

    fn mu(&self) -> u64;
    fn zero(&self) -> Self::E;
    fn from_int(&self, v: i128) -> Self::E;
    /// `None` when the denominator is not invertible.
    fn from_ratio(&self, v: Ratio<i128>) -> Option<Self::E>;
    /// `zeta^j`
    fn root_pow(&self, j: u64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;
    fn is_zero(&self, a: &Self::E) -> bool;

    /// `sum a[i] b[i]`
    fn dot(&self, a: &[Self::E], b: &[Self::E]) -> Self::E {
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            acc = self.add(&acc, &self.mul(x, y));
        }
        acc
    }

    /// `a + v zeta^j` for an integer `v`.
    fn add_int_phase(&self, a: &Self::E, v: i128, j: u64) -> Self::E {
        self.add(a, &self.mul(&self.from_int(v), &self.root_pow(j)))
    }
}

/// The prime field `F_l` with `l = 1 mod mu` and a root of order `mu`.
#[derive(Clone, Debug)]
pub struct Fl {
    pub l: u64,
    pub root: u64,
    mu: u64,
    pows: Vec<u64>,
}

impl Fl {
    /// Least suitable prime `l >= min_l` (and `l < 2^62`).
    pub fn split(mu: u64, min_l: u64) -> Fl {
        let (l, root) = find_split_prime(mu, min_l);
        assert!(l < 1 << 62);
        let mut pows = Vec::with_capacity(mu as usize);
        let mut x = 1u64;
        for _ in 0..mu {
            pows.push(x);
            x = mul_mod(x, root, l);
        }
        Fl { l, root, mu, pows }
    }

    /// The next suitable prime above this one.
    pub fn next(&self) -> Fl {
        Fl::split(self.mu, self.l + 1)
    }

    pub fn balanced(&self, a: u64) -> i128 {
        if a > self.l / 2 {
            a as i128 - self.l as i128
        } else {
            a as i128
        }
    }
}

impl CoeffRing for Fl {
    type E = u64;

    fn mu(&self) -> u64 {
        self.mu
    }

    fn zero(&self) -> u64 {
        0
    }

    fn from_int(&self, v: i128) -> u64 {
        reduce_i128(v, self.l)
    }

    fn from_ratio(&self, v: Ratio<i128>) -> Option<u64> {
        let d = inv_mod(reduce_i128(*v.denom(), self.l), self.l)?;
        Some(mul_mod(reduce_i128(*v.numer(), self.l), d, self.l))
    }

    fn root_pow(&self, j: u64) -> u64 {
        self.pows[(j % self.mu) as usize]
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.l {
            s - self.l
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.l - b
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.l)
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(pow_mod(*a, self.l - 2, self.l))
        }
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        let mut acc: u128 = 0;
        for (x, y) in a.iter().zip(b) {
            acc += *x as u128 * *y as u128;
        }
        (acc % self.l as u128) as u64
    }

    fn add_int_phase(&self, a: &u64, v: i128, j: u64) -> u64 {
        self.add(a, &mul_mod(reduce_i128(v, self.l), self.pows[(j % self.mu) as usize], self.l))
    }
}

/// Exact arithmetic in `Q(zeta_mu) = Q[x] / Phi_mu`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    mu: u64,
    /// `Phi_mu`, monic, low degree first
    phi: Vec<BigInt>,
    pows: Vec<Vec<BigRational>>,
}

pub fn cyclotomic_poly(n: u64) -> IntPoly {
    let mut f = IntPoly::from_i64(&[-1]);
    f = &f + &IntPoly::x().inflate(n as usize);
    for d in 1..n {
        if n % d == 0 {
            f = f.divrem_monic(&cyclotomic_poly(d)).0;
        }
    }
    f
}

impl Cyclotomic {
    pub fn new(mu: u64) -> Self {
        let phi = cyclotomic_poly(mu).coeffs().to_vec();
        let mut c = Cyclotomic { mu, phi, pows: vec![] };
        let deg = c.deg();
        let mut x = vec![BigRational::zero(); deg];
        x[0] = BigRational::one();
        let mut gen = vec![BigRational::zero(); 2];
        gen[1] = BigRational::one();
        let gen = c.reduce(gen);
        for _ in 0..mu {
            c.pows.push(x.clone());
            x = c.mul(&x, &gen);
        }
        c
    }

    fn deg(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.deg();
        while v.len() > d {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = v.len() - d;
            for (i, c) in self.phi[..d].iter().enumerate() {
                v[shift + i] -= &top * BigRational::from_integer(c.clone());
            }
        }
        v.resize(d, BigRational::zero());
        v
    }

    /// The element as a rational number, if it is one.
    pub fn to_rational(&self, a: &[BigRational]) -> Option<BigRational> {
        a[1..].iter().all(|x| x.is_zero()).then(|| a[0].clone())
    }
}

impl CoeffRing for Cyclotomic {
    type E = Vec<BigRational>;

    fn mu(&self) -> u64 {
        self.mu
    }

    fn zero(&self) -> Self::E {
        vec![BigRational::zero(); self.deg()]
    }

    fn from_int(&self, v: i128) -> Self::E {
        let mut z = self.zero();
        z[0] = BigRational::from_integer(v.into());
        z
    }

    fn from_ratio(&self, v: Ratio<i128>) -> Option<Self::E> {
        let mut z = self.zero();
        z[0] = BigRational::new((*v.numer()).into(), (*v.denom()).into());
        Some(z)
    }

    fn root_pow(&self, j: u64) -> Self::E {
        self.pows[(j % self.mu) as usize].clone()
    }

    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E {
        let mut out = vec![BigRational::zero(); 2 * self.deg()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.reduce(out)
    }

    /// Only rational elements are inverted.
    fn inv(&self, a: &Self::E) -> Option<Self::E> {
        let r = self.to_rational(a)?;
        if r.is_zero() {
            return None;
        }
        let mut z = self.zero();
        z[0] = r.recip();
        Some(z)
    }

    fn is_zero(&self, a: &Self::E) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    fn add_int_phase(&self, a: &Self::E, v: i128, j: u64) -> Self::E {
        let v = BigRational::from_integer(v.into());
        a.iter().zip(&self.pows[(j % self.mu) as usize]).map(|(x, y)| x + &v * y).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_have_exact_order() {
        let f = Fl::split(9, 1 << 20);
        assert_eq!(f.l % 9, 1);
        assert_eq!(f.root_pow(9), 1);
        assert_ne!(f.root_pow(3), 1);
        let c = Cyclotomic::new(9);
        assert_eq!(c.deg(), 6);
        let mut s = c.zero();
        for j in 0..9 {
            s = c.add(&s, &c.root_pow(j));
        }
        assert!(c.is_zero(&s));
        assert_eq!(c.root_pow(9), c.from_int(1));
        assert_eq!(c.mul(&c.root_pow(4), &c.root_pow(7)), c.root_pow(2));
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic_poly(4), IntPoly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), IntPoly::from_i64(&[1, -1, 1]));
    }
}
