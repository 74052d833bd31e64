use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;

use super::poly::IntPoly;
use crate::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime `p`, `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

/// Residue of a signed integer.
#[inline]
pub fn reduce_i128(a: i128, p: u64) -> u64 {
    a.rem_euclid(p as i128) as u64
}

/// Element of F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeFieldElem {
    value: u64,
    modulus: u64,
}

impl PrimeFieldElem {
    pub fn new(v: i128, p: u64) -> Self {
        PrimeFieldElem { value: reduce_i128(v, p), modulus: p }
    }
    pub fn value(self) -> u64 {
        self.value
    }
    pub fn modulus(self) -> u64 {
        self.modulus
    }
    pub fn is_zero(self) -> bool {
        self.value == 0
    }
    pub fn inv(self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|v| PrimeFieldElem { value: v, modulus: self.modulus })
    }
    pub fn pow(self, e: u64) -> Self {
        PrimeFieldElem { value: pow_mod(self.value, e, self.modulus), modulus: self.modulus }
    }
    /// Representative in `(-p/2, p/2]`.
    pub fn balanced(self) -> i128 {
        let v = self.value as i128;
        if 2 * v > self.modulus as i128 {
            v - self.modulus as i128
        } else {
            v
        }
    }
}

impl Add for PrimeFieldElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        let s = self.value + o.value;
        PrimeFieldElem { value: if s >= self.modulus { s - self.modulus } else { s }, modulus: self.modulus }
    }
}

impl Sub for PrimeFieldElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for PrimeFieldElem {
    type Output = Self;
    fn neg(self) -> Self {
        PrimeFieldElem {
            value: if self.value == 0 { 0 } else { self.modulus - self.value },
            modulus: self.modulus,
        }
    }
}

impl Mul for PrimeFieldElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        PrimeFieldElem { value: mul_mod(self.value, o.value, self.modulus), modulus: self.modulus }
    }
}

impl fmt::Display for PrimeFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// Polynomial over F_p, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_int(f: &IntPoly, p: u64) -> Self {
        FpPoly { p, c: f.reduce_mod(p) }
    }

    pub fn one(p: u64) -> Self {
        Self::new(vec![1], p)
    }

    pub fn x(p: u64) -> Self {
        Self::new(vec![0, 1], p)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// Lift to Z with coefficients in `[0, p)`.
    pub fn to_int(&self) -> IntPoly {
        IntPoly::new(self.c.iter().map(|&x| x.into()).collect())
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| (mul_mod(acc, x, self.p) + a) % self.p)
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&lc) => {
                let inv = inv_mod(lc, self.p).expect("nonzero leading coefficient");
                Self::new(self.c.iter().map(|&a| mul_mod(a, inv, self.p)).collect(), self.p)
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        Self::new(v, self.p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| {
                (self.c.get(i).copied().unwrap_or(0) + self.p - o.c.get(i).copied().unwrap_or(0)) % self.p
            })
            .collect();
        Self::new(v, self.p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(vec![], self.p);
        }
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        let p = self.p as u128;
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(acc.into_iter().map(|x| x as u64).collect(), self.p)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dd = d.deg();
        let inv = inv_mod(*d.c.last().unwrap(), p).unwrap();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::new(vec![], p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = mul_mod(r[i], inv, p);
            if c == 0 {
                continue;
            }
            q[i - dd] = c;
            for j in 0..=dd {
                r[i - dd + j] = (r[i - dd + j] + p - mul_mod(c, d.c[j], p)) % p;
            }
        }
        r.truncate(dd);
        (Self::new(q, p), Self::new(r, p))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p))
            .collect();
        Self::new(v, self.p)
    }

    pub fn powmod(&self, e: &BigUint, m: &Self) -> Self {
        let mut r = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            r = r.mul(&r).rem(m);
            if e.bit(i) {
                r = r.mul(&base).rem(m);
            }
        }
        r
    }

    /// `f(x)^(1/p)` for `f` with `f' = 0`.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let v = self.c.iter().step_by(p).copied().collect();
        Self::new(v, self.p)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            let coef = if a == 1 && i > 0 { String::new() } else { a.to_string() };
            let sep = if coef.is_empty() || i == 0 { "" } else { "*" };
            parts.push(match i {
                0 => coef,
                1 => format!("{coef}{sep}x"),
                _ => format!("{coef}{sep}x^{i}"),
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn cmp_factor(a: &FpPoly, b: &FpPoly) -> Ordering {
    a.c.len().cmp(&b.c.len()).then_with(|| a.c.cmp(&b.c))
}

fn squarefree(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = vec![];
    let mut c = f.gcd(&f.derivative());
    let mut w = f.divrem(&c).0;
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.divrem(&y).0;
        if z.deg() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.divrem(&w).0;
    }
    if c.deg() > 0 {
        for (g, m) in squarefree(&c.pth_root()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = vec![];
    let mut g = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let pe = BigUint::from(p);
    let mut d = 1;
    while 2 * d <= g.deg() {
        h = h.powmod(&pe, &g);
        let gd = g.gcd(&h.sub(&x));
        if gd.deg() > 0 {
            g = g.divrem(&gd).0;
            h = h.rem(&g);
            out.push((gd, d));
        }
        d += 1;
    }
    if g.deg() > 0 {
        let dg = g.deg();
        out.push((g.monic(), dg));
    }
    out
}

/// Polynomial with base-p digits of `idx` as coefficients.
fn enumerate_poly(mut idx: u64, p: u64) -> FpPoly {
    let mut c = vec![];
    while idx > 0 {
        c.push(idx % p);
        idx /= p;
    }
    FpPoly::new(c, p)
}

fn equal_degree(f: &FpPoly, d: usize, out: &mut Vec<FpPoly>) {
    let n = f.deg();
    if n == d {
        out.push(f.monic());
        return;
    }
    let p = f.p;
    let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    let mut idx = p; // skip constants
    loop {
        let a = enumerate_poly(idx, p);
        idx += 1;
        if a.deg() >= n {
            continue;
        }
        let b = if p == 2 {
            let mut t = a.rem(f);
            let mut s = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                s = s.add(&t);
            }
            s
        } else {
            a.powmod(&e, f).sub(&FpPoly::one(p))
        };
        let g = f.gcd(&b);
        if g.deg() > 0 && g.deg() < n {
            let h = f.divrem(&g).0;
            equal_degree(&g, d, out);
            equal_degree(&h, d, out);
            return;
        }
    }
}

/// Factor an integer polynomial modulo a prime into monic irreducibles with
/// multiplicities, sorted by degree and then coefficients.
pub fn factor_mod_p(f: &IntPoly, p: u64) -> Result<Vec<(FpPoly, u32)>> {
    let fp = FpPoly::from_int(f, p);
    if fp.deg() != f.degree().unwrap_or(0) || fp.is_zero() {
        return Err(Error::Precondition(format!(
            "leading coefficient of {f} vanishes modulo {p}"
        )));
    }
    let mut res: Vec<(FpPoly, u32)> = vec![];
    for (g, m) in squarefree(&fp.monic()) {
        for (h, d) in distinct_degree(&g) {
            let mut irr = vec![];
            equal_degree(&h, d, &mut irr);
            for q in irr {
                match res.iter_mut().find(|(r, _)| *r == q) {
                    Some(e) => e.1 += m,
                    None => res.push((q, m)),
                }
            }
        }
    }
    res.sort_by(|a, b| cmp_factor(&a.0, &b.0));
    Ok(res)
}
