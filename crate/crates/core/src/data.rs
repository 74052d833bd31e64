//! Published constants for the levels 61, 73 and 79, shipped as TOML.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Deserialize;

use crate::exactcore::IntPoly;
use crate::jacobi::ThetaBlockSpec;
use crate::paramodular::NonliftSpec;
use crate::{Error, Result};

const LEVEL61: &str = include_str!("../data/level61.toml");
const LEVEL73: &str = include_str!("../data/level73.toml");
const LEVEL79: &str = include_str!("../data/level79.toml");

pub const LEVELS: [i64; 3] = [61, 73, 79];

#[derive(Debug, Clone, Deserialize)]
pub struct LevelData {
    pub version: u32,
    pub level: i64,
    pub dim_cusp: i64,
    pub dim_lifts: i64,
    pub theta_blocks: Vec<Vec<i64>>,
    pub nonlift: NonliftData,
    pub restriction: RestrictionData,
    pub divisors: DivisorData,
    pub hecke: HeckeData,
    pub eigenvalues: EigenData,
    pub field: Vec<FieldData>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NonliftData {
    pub linear: Vec<i64>,
    pub scale: i64,
    pub numerator: [usize; 2],
    pub denominator: usize,
    pub unit_content: Vec<[i64; 4]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RestrictionData {
    pub s: [i64; 3],
    pub q_order: i64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DivisorData {
    pub members: Vec<usize>,
    pub rows: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct HeckeData {
    pub t2: Vec<Vec<i64>>,
    pub charpoly_factors: Vec<Vec<i64>>,
    pub charpoly_disc: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EigenData {
    pub atkin_lehner: i64,
    pub tp: Vec<[i64; 2]>,
    pub t1: Vec<[i64; 2]>,
    pub euler: Vec<[i64; 6]>,
    pub euler_bad: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NormData {
    pub what: String,
    pub value: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FieldData {
    pub name: String,
    pub minpoly: Vec<i64>,
    pub disc: String,
    pub vector: Vec<Vec<String>>,
    pub lambda_t3: Option<Vec<String>>,
    pub lambda_t5: Option<Vec<String>>,
    pub norms: Vec<NormData>,
    pub norm_gcd: String,
    pub ideal: Vec<IdealData>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct IdealData {
    pub name: String,
    pub modulus: i64,
    pub generator: Vec<String>,
    pub mod_factors: Option<Vec<Vec<i64>>>,
    pub witness: Vec<String>,
    pub witness_norm: Option<String>,
    pub aux: String,
    pub scale: i64,
    pub cube_root: Option<Vec<String>>,
    pub norm: Option<i64>,
}

impl LevelData {
    pub fn load(level: i64) -> Result<Self> {
        let text = match level {
            61 => LEVEL61,
            73 => LEVEL73,
            79 => LEVEL79,
            _ => return Err(Error::Precondition(format!("no published data for level {level}"))),
        };
        let d: LevelData = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if d.version != 1 || d.level != level {
            return Err(Error::Parse(format!("unexpected data header for level {level}")));
        }
        Ok(d)
    }

    pub fn specs(&self) -> Vec<ThetaBlockSpec> {
        self.theta_blocks.iter().map(|d| ThetaBlockSpec::new(3, d.clone())).collect()
    }

    pub fn nonlift_spec(&self) -> NonliftSpec {
        NonliftSpec {
            level: self.level,
            linear: self.nonlift.linear.clone(),
            scale: self.nonlift.scale,
            num: (self.nonlift.numerator[0] - 1, self.nonlift.numerator[1] - 1),
            den: self.nonlift.denominator - 1,
        }
    }

    pub fn tp(&self, p: i64) -> Option<i64> {
        self.eigenvalues.tp.iter().find(|x| x[0] == p).map(|x| x[1])
    }

    pub fn t1(&self, p: i64) -> Option<i64> {
        self.eigenvalues.t1.iter().find(|x| x[0] == p).map(|x| x[1])
    }

    pub fn euler(&self, p: i64) -> Option<Vec<i64>> {
        self.eigenvalues.euler.iter().find(|x| x[0] == p).map(|x| x[1..].to_vec())
    }

    /// Expanded bad Euler polynomial, coefficients of `1, x, ...`.
    pub fn euler_bad(&self) -> Vec<i64> {
        let mut acc = IntPoly::one();
        for f in &self.eigenvalues.euler_bad {
            acc = &acc * &IntPoly::from_i64(f);
        }
        acc.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    pub fn charpoly(&self) -> IntPoly {
        self.hecke
            .charpoly_factors
            .iter()
            .fold(IntPoly::one(), |acc, f| &acc * &IntPoly::from_i64(f))
    }
}

/// Parse `"a/b"` or `"a"`.
pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s}"));
    match s.split_once('/') {
        Some((n, d)) => Ok(BigRational::new(
            BigInt::from_str(n.trim()).map_err(|_| bad())?,
            BigInt::from_str(d.trim()).map_err(|_| bad())?,
        )),
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

pub fn parse_rats(v: &[String]) -> Result<Vec<BigRational>> {
    v.iter().map(|s| parse_rat(s)).collect()
}

/// Evaluate a factored integer such as `"-2^7*3*3919"`.
pub fn parse_factored(s: &str) -> Result<BigInt> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let mut acc = BigInt::one();
    for part in body.split('*') {
        let (b, e) = match part.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().map_err(|_| Error::Parse(s.into()))?),
            None => (part, 1),
        };
        let b = BigInt::from_str(b.trim()).map_err(|_| Error::Parse(s.into()))?;
        acc *= b.pow(e);
    }
    Ok(if neg { -acc } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_levels_load() {
        for n in LEVELS {
            let d = LevelData::load(n).unwrap();
            assert_eq!(d.theta_blocks.len() as i64, d.dim_lifts);
            assert_eq!(d.nonlift.linear.len() as i64, d.dim_lifts);
            assert_eq!(d.hecke.t2.len() as i64, d.dim_lifts);
            for f in &d.field {
                for v in &f.vector {
                    parse_rats(v).unwrap();
                }
                parse_factored(&f.disc).unwrap();
            }
        }
    }

    #[test]
    fn factored() {
        assert_eq!(parse_factored("-2^7*3").unwrap(), BigInt::from(-384));
        assert_eq!(parse_factored("9270300").unwrap(), BigInt::from(9270300));
    }
}
