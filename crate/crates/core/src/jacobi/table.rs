use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::series::{LaurentPoly, QZSeries};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiClass {
    Cusp,
    Holomorphic,
    /// Coefficients vanish for discriminants below `d_floor` (a negative
    /// number for forms with a singular part).
    WeaklyHolomorphic { d_floor: i64 },
}

impl fmt::Display for JacobiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JacobiClass::Cusp => write!(f, "cusp"),
            JacobiClass::Holomorphic => write!(f, "holo"),
            JacobiClass::WeaklyHolomorphic { d_floor } => write!(f, "weak{d_floor}"),
        }
    }
}

impl std::str::FromStr for JacobiClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cusp" => Ok(JacobiClass::Cusp),
            "holo" => Ok(JacobiClass::Holomorphic),
            _ => s
                .strip_prefix("weak")
                .and_then(|x| x.parse().ok())
                .map(|d_floor| JacobiClass::WeaklyHolomorphic { d_floor })
                .ok_or_else(|| Error::Parse(format!("unknown class {s}"))),
        }
    }
}

/// Fourier coefficients of a Jacobi form of weight `k` and index `M`,
/// stored on reduced representatives `0 <= r0 <= M` as columns indexed by
/// `n`. Other coefficients follow from `c(n, r) = c(D, r mod 2M)` and
/// `c(n, -r) = (-1)^k c(n, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiCoeffTable {
    weight: i32,
    index: i64,
    class: JacobiClass,
    cols: Vec<Vec<i128>>,
    d_max: i64,
}

impl JacobiCoeffTable {
    /// Build from columns `cols[r0][n]`; `d_max` is derived from the column
    /// lengths.
    pub fn from_columns(weight: i32, index: i64, class: JacobiClass, cols: Vec<Vec<i128>>) -> Self {
        assert_eq!(cols.len() as i64, index + 1);
        let d_max = cols
            .iter()
            .enumerate()
            .map(|(r0, c)| 4 * index * (c.len() as i64 - 1) - (r0 as i64).pow(2))
            .min()
            .unwrap_or(0);
        JacobiCoeffTable { weight, index, class, cols, d_max }
    }

    /// Read reduced coefficients off a two-variable expansion (integral
    /// exponents) exact up to `q^prec`.
    pub fn from_series(weight: i32, index: i64, class: JacobiClass, s: &QZSeries) -> Result<Self> {
        if s.q_den != 1 || s.z_den != 1 {
            return Err(Error::Precondition("series must have integral exponents".into()));
        }
        if s.prec < 0 {
            return Err(Error::Precondition("empty series".into()));
        }
        let cols = (0..=index)
            .map(|r0| (0..=s.prec).map(|n| s.coeff(n, r0)).collect())
            .collect();
        Ok(Self::from_columns(weight, index, class, cols))
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn class(&self) -> JacobiClass {
        self.class
    }

    /// Every class with discriminant at most this value is stored.
    pub fn d_max(&self) -> i64 {
        self.d_max
    }

    pub fn columns(&self) -> &[Vec<i128>] {
        &self.cols
    }

    fn vanishes(&self, d: i64) -> bool {
        match self.class {
            JacobiClass::Cusp => d <= 0,
            JacobiClass::Holomorphic => d < 0,
            JacobiClass::WeaklyHolomorphic { d_floor } => d < d_floor,
        }
    }

    /// `c(n, r)`.
    pub fn coeff(&self, n: i64, r: i64) -> Result<i128> {
        let m = self.index;
        let d = 4 * n * m - r * r;
        if self.vanishes(d) {
            return Ok(0);
        }
        let mut r0 = r.rem_euclid(2 * m);
        if r0 > m {
            r0 -= 2 * m;
        }
        let mut sign = 1;
        if r0 < 0 {
            r0 = -r0;
            if self.weight % 2 != 0 {
                sign = -1;
            }
        }
        let n0 = (d + r0 * r0) / (4 * m);
        if n0 < 0 {
            return Ok(0);
        }
        let col = &self.cols[r0 as usize];
        match col.get(n0 as usize) {
            Some(&v) => Ok(sign * v),
            None => Err(Error::CacheMiss { needed: d, have: self.d_max }),
        }
    }

    /// Coefficient by discriminant and class: `c(D, r)`.
    pub fn coeff_d(&self, d: i64, r: i64) -> Result<i128> {
        let m = self.index;
        let num = d + r * r;
        if num.rem_euclid(4 * m) != 0 {
            return Err(Error::Precondition(format!("D = {d} is not -r^2 mod 4M for r = {r}")));
        }
        self.coeff(num / (4 * m), r)
    }

    /// Expansion up to `q^q_max` with all `r` carrying nonzero coefficients.
    pub fn to_series(&self, q_max: i64) -> Result<QZSeries> {
        let m = self.index;
        let mut s = QZSeries::zero(1, 1, q_max);
        let floor = match self.class {
            JacobiClass::WeaklyHolomorphic { d_floor } => d_floor,
            _ => 0,
        };
        for n in 0..=q_max {
            // 4nM - r^2 >= floor
            let rmax = isqrt(4 * n * m - floor);
            let mut terms = vec![];
            for r in -rmax..=rmax {
                let v = self.coeff(n, r)?;
                if v != 0 {
                    terms.push((r, v));
                }
            }
            s.set_row(n, LaurentPoly::from_terms(terms));
        }
        Ok(s)
    }

    /// Write in the line format `JACOBI k=.. M=.. class=.. Dmax=..` followed
    /// by `<D> <r mod 2M> <value>` lines, atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = format!(
            "JACOBI k={} M={} class={} Dmax={}\n",
            self.weight, self.index, self.class, self.d_max
        );
        let mut lines = vec![];
        for (r0, col) in self.cols.iter().enumerate() {
            let r0 = r0 as i64;
            for (n, &v) in col.iter().enumerate() {
                let d = 4 * n as i64 * self.index - r0 * r0;
                if v != 0 && d <= self.d_max {
                    lines.push((d, r0, v));
                }
            }
        }
        lines.sort();
        for (d, r, v) in lines {
            buf.push_str(&format!("{d} {r} {v}\n"));
        }
        write_atomic(path, buf.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = BufReader::new(fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty cache file".into()))??;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("JACOBI") {
            return Err(Error::Parse("not a JACOBI cache file".into()));
        }
        let (mut k, mut m, mut class, mut d_max) = (None, None, None, None);
        for kv in fields {
            let (key, val) = kv.split_once('=').ok_or_else(|| Error::Parse(kv.into()))?;
            match key {
                "k" => k = val.parse().ok(),
                "M" => m = val.parse().ok(),
                "class" => class = Some(val.parse()?),
                "Dmax" => d_max = val.parse().ok(),
                _ => return Err(Error::Parse(format!("unknown header field {key}"))),
            }
        }
        let (Some(k), Some(m), Some(class), Some(d_max)) = (k, m, class, d_max) else {
            return Err(Error::Parse("incomplete header".into()));
        };
        let m: i64 = m;
        let d_max: i64 = d_max;
        let mut cols: Vec<Vec<i128>> = (0..=m)
            .map(|r0| vec![0; ((d_max + r0 * r0) / (4 * m) + 1).max(1) as usize])
            .collect();
        for line in lines {
            let line = line?;
            let v: Vec<&str> = line.split_whitespace().collect();
            if v.len() != 3 {
                return Err(Error::Parse(format!("bad line {line}")));
            }
            let d: i64 = v[0].parse().map_err(|_| Error::Parse(line.clone()))?;
            let r: i64 = v[1].parse().map_err(|_| Error::Parse(line.clone()))?;
            let val: i128 = v[2].parse().map_err(|_| Error::Parse(line.clone()))?;
            if !(0..=m).contains(&r) || (d + r * r).rem_euclid(4 * m) != 0 {
                return Err(Error::Parse(format!("bad class in {line}")));
            }
            let n = (d + r * r) / (4 * m);
            let col = &mut cols[r as usize];
            if n < 0 || n as usize >= col.len() {
                return Err(Error::Parse(format!("entry beyond Dmax: {line}")));
            }
            col[n as usize] = val;
        }
        Ok(JacobiCoeffTable { weight: k, index: m, class, cols, d_max })
    }
}

pub fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("cache"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Lazy view of `phi | V_m`:
/// `c'(n, r) = sum over d | gcd(n, r, m) of d^(k-1) c(nm/d^2, r/d)`.
pub struct VmView<'a> {
    base: &'a JacobiCoeffTable,
    m: i64,
}

/// Apply the index-raising operator `V_m` (weight at least 1).
pub fn apply_v(base: &JacobiCoeffTable, m: i64) -> Result<VmView<'_>> {
    if m < 1 {
        return Err(Error::Precondition("V_m needs m >= 1".into()));
    }
    if base.weight < 1 {
        return Err(Error::Precondition("V_m coefficients are integral only for k >= 1".into()));
    }
    Ok(VmView { base, m })
}

impl VmView<'_> {
    pub fn index(&self) -> i64 {
        self.base.index * self.m
    }

    pub fn coeff(&self, n: i64, r: i64) -> Result<i128> {
        let g = gcd3(n, r, self.m);
        let mut acc = 0i128;
        for d in 1..=g {
            if g % d != 0 {
                continue;
            }
            let w = (d as i128).pow(self.base.weight as u32 - 1);
            acc += w * self.base.coeff(n * self.m / (d * d), r / d)?;
        }
        Ok(acc)
    }

    pub fn to_series(&self, q_max: i64) -> Result<QZSeries> {
        let mi = self.index();
        let mut s = QZSeries::zero(1, 1, q_max);
        for n in 0..=q_max {
            let rmax = isqrt(4 * n * mi);
            let mut terms = vec![];
            for r in -rmax..=rmax {
                let v = self.coeff(n, r)?;
                if v != 0 {
                    terms.push((r, v));
                }
            }
            s.set_row(n, LaurentPoly::from_terms(terms));
        }
        Ok(s)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}
