//! Spin Euler polynomials from Hecke eigenvalues.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactcore::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerPolynomial {
    pub p: i64,
    /// constant term first; 5 entries at a good prime, 4 at a bad one
    #[serde(serialize_with = "ser_bigints")]
    pub coeffs: Vec<BigInt>,
    pub epsilon: Option<i64>,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

fn pw(p: i64, e: i64) -> BigInt {
    assert!(e >= 0, "negative exponent");
    BigInt::from(p).pow(e as u32)
}

/// `Q_p(x)` at `p` not dividing the level.
pub fn spin_euler_good(lambda_p: i64, lambda_p2: i64, p: i64, k: i64) -> EulerPolynomial {
    let lp = BigInt::from(lambda_p);
    let c2 = BigInt::from(p) * lambda_p2 + pw(p, 2 * k - 5) * (1 + p * p);
    EulerPolynomial {
        p,
        coeffs: vec![BigInt::one(), -&lp, c2, -pw(p, 2 * k - 3) * &lp, pw(p, 4 * k - 6)],
        epsilon: None,
    }
}

/// `Q_p(x)` at `p` exactly dividing the level, from `lambda(T(p))`,
/// `lambda(T_{0,1}(p^2))` and the Atkin-Lehner sign.
pub fn spin_euler_bad(lambda_p: i64, lambda_01: i64, eps: i64, p: i64, k: i64) -> EulerPolynomial {
    let c1 = -(BigInt::from(lambda_p) + pw(p, k - 3) * eps);
    let c2 = BigInt::from(p) * lambda_01 + pw(p, 2 * k - 3);
    EulerPolynomial {
        p,
        coeffs: vec![BigInt::one(), c1, c2, pw(p, 3 * k - 5) * eps],
        epsilon: Some(eps),
    }
}

/// `lambda(T_{0,1}(p^2))` at prime level `p`, from
/// `p^(k-3) lambda_p eps + lambda_01 + p^(2k-5) + p^(2k-6) = 0`.
pub fn bad_relation(lambda_p: i64, eps: i64, p: i64, k: i64) -> BigInt {
    -(pw(p, k - 3) * lambda_p * eps + pw(p, 2 * k - 5) + pw(p, 2 * k - 6))
}

impl EulerPolynomial {
    pub fn poly(&self) -> IntPoly {
        IntPoly::new(self.coeffs.clone())
    }

    pub fn is_good(&self) -> bool {
        self.coeffs.len() == 5
    }

    /// Coefficients as `i64`, when they fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| i64::try_from(c).ok()).collect()
    }

    /// Tab separated: `p`, then the coefficients.
    pub fn tsv(&self) -> String {
        let mut s = self.p.to_string();
        for c in &self.coeffs {
            s.push('\t');
            s.push_str(&c.to_string());
        }
        s
    }
}

impl fmt::Display for EulerPolynomial {
    /// `1 + 7x + 24x^2 + ...`
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
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
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => {}
                _ => write!(f, "{mag}")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Aligned text table of Euler polynomials, one row per prime.
pub fn euler_table(rows: &[EulerPolynomial]) -> String {
    let ps: Vec<String> = rows.iter().map(|r| r.p.to_string()).collect();
    let w = ps.iter().map(|s| s.len()).max().unwrap_or(1);
    let mut out = String::new();
    for (r, p) in rows.iter().zip(&ps) {
        out.push_str(&format!("Q_{p:<w$}  {r}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(e: &EulerPolynomial) -> Vec<i64> {
        e.to_i64().unwrap()
    }

    #[test]
    fn good_factors() {
        assert_eq!(ints(&spin_euler_good(-7, 7, 2, 3)), vec![1, 7, 24, 56, 64]);
        assert_eq!(ints(&spin_euler_good(0, 0, 5, 3)), vec![1, 0, 130, 0, 15625]);
        assert_eq!(spin_euler_good(-7, 7, 2, 3).to_string(), "1 + 7x + 24x^2 + 56x^3 + 64x^4");
    }

    #[test]
    fn bad_factors() {
        assert_eq!(bad_relation(-23, -1, 73, 3), BigInt::from(-97));
        assert_eq!(bad_relation(146, -1, 61, 3), BigInt::from(84));
        assert_eq!(bad_relation(0, 1, 7, 3), BigInt::from(-8));
        let q = spin_euler_bad(-23, -97, -1, 73, 3);
        assert_eq!(ints(&q), vec![1, 24, 381936, -28398241]);
        let f = &IntPoly::from_i64(&[1, -73]) * &IntPoly::from_i64(&[1, 97, 389017]);
        assert_eq!(q.poly(), f);
        let q = spin_euler_bad(146, 84, -1, 61, 3);
        let f = &IntPoly::from_i64(&[1, -61]) * &IntPoly::from_i64(&[1, -84, 226981]);
        assert_eq!(q.poly(), f);
    }
}
