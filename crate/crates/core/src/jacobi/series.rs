use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// Laurent polynomial in one variable with `i128` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    lo: i64,
    c: Vec<i128>,
}

fn ck_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("laurent product"))
}

fn ck_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("laurent sum"))
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(e: i64, v: i128) -> Self {
        Self::from_dense(e, vec![v])
    }

    pub fn from_dense(lo: i64, c: Vec<i128>) -> Self {
        let mut p = LaurentPoly { lo, c };
        p.trim();
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i128)>) -> Self {
        let t: Vec<_> = terms.into_iter().filter(|t| t.1 != 0).collect();
        if t.is_empty() {
            return Self::zero();
        }
        let lo = t.iter().map(|x| x.0).min().unwrap();
        let hi = t.iter().map(|x| x.0).max().unwrap();
        let mut c = vec![0i128; (hi - lo + 1) as usize];
        for (e, v) in t {
            c[(e - lo) as usize] += v;
        }
        Self::from_dense(lo, c)
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
        let k = self.c.iter().take_while(|&&x| x == 0).count();
        if k > 0 {
            self.c.drain(..k);
            self.lo += k as i64;
        }
        if self.c.is_empty() {
            self.lo = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn lo(&self) -> Option<i64> {
        (!self.c.is_empty()).then_some(self.lo)
    }

    pub fn hi(&self) -> Option<i64> {
        (!self.c.is_empty()).then(|| self.lo + self.c.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> i128 {
        let i = e - self.lo;
        if i < 0 {
            return 0;
        }
        self.c.get(i as usize).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i128)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(i, &v)| (self.lo + i as i64, v))
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { lo: self.lo, c: self.c.iter().map(|x| -x).collect() }
    }

    /// `self += k * o`
    pub fn add_scaled(&mut self, o: &LaurentPoly, k: i128) -> Result<()> {
        if o.is_zero() || k == 0 {
            return Ok(());
        }
        if self.is_zero() {
            self.lo = o.lo;
        }
        let lo = self.lo.min(o.lo);
        let hi = self.hi().unwrap_or(o.lo).max(o.hi().unwrap());
        if lo < self.lo {
            let pad = (self.lo - lo) as usize;
            let mut c = vec![0; pad];
            c.append(&mut self.c);
            self.c = c;
            self.lo = lo;
        }
        let need = (hi - self.lo + 1) as usize;
        if self.c.len() < need {
            self.c.resize(need, 0);
        }
        for (i, &v) in o.c.iter().enumerate() {
            let j = (o.lo - self.lo) as usize + i;
            self.c[j] = ck_add(self.c[j], ck_mul(v, k)?)?;
        }
        self.trim();
        Ok(())
    }

    pub fn mul(&self, o: &LaurentPoly) -> Result<LaurentPoly> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        let mut c = vec![0i128; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = ck_add(c[i + j], ck_mul(a, b)?)?;
            }
        }
        Ok(Self::from_dense(self.lo + o.lo, c))
    }

    /// Exact quotient; fails if the remainder is nonzero.
    pub fn div_exact(&self, d: &LaurentPoly) -> Result<LaurentPoly> {
        if d.is_zero() {
            return Err(Error::InexactDivision("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let dl = d.c.len();
        if self.c.len() < dl {
            return Err(Error::InexactDivision("dividend shorter than divisor".into()));
        }
        let lead = *d.c.last().unwrap();
        let mut r = self.c.clone();
        let qn = r.len() - dl + 1;
        let mut q = vec![0i128; qn];
        for i in (0..qn).rev() {
            let top = r[i + dl - 1];
            if top == 0 {
                continue;
            }
            if top % lead != 0 {
                return Err(Error::InexactDivision("coefficient not divisible".into()));
            }
            let t = top / lead;
            q[i] = t;
            for (j, &dv) in d.c.iter().enumerate() {
                r[i + j] = ck_add(r[i + j], -ck_mul(t, dv)?)?;
            }
        }
        if r.iter().any(|&x| x != 0) {
            return Err(Error::InexactDivision("nonzero remainder".into()));
        }
        Ok(Self::from_dense(self.lo - d.lo, q))
    }

    pub fn scale(&self, k: i128) -> Result<LaurentPoly> {
        let c = self.c.iter().map(|&x| ck_mul(x, k)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_dense(self.lo, c))
    }
}

/// Two-variable expansion `sum c(n, r) q^(n/q_den) zeta^(r/z_den)`,
/// truncated in `q`: coefficients with numerator `n <= prec` are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QZSeries {
    pub q_den: i64,
    pub z_den: i64,
    pub prec: i64,
    terms: BTreeMap<i64, LaurentPoly>,
}

impl QZSeries {
    pub fn zero(q_den: i64, z_den: i64, prec: i64) -> Self {
        QZSeries { q_den, z_den, prec, terms: BTreeMap::new() }
    }

    pub fn set_row(&mut self, n: i64, p: LaurentPoly) {
        if n > self.prec || p.is_zero() {
            self.terms.remove(&n);
        } else {
            self.terms.insert(n, p);
        }
    }

    pub fn row(&self, n: i64) -> Option<&LaurentPoly> {
        self.terms.get(&n)
    }

    pub fn rows(&self) -> impl Iterator<Item = (i64, &LaurentPoly)> {
        self.terms.iter().map(|(&n, p)| (n, p))
    }

    pub fn coeff(&self, n: i64, r: i64) -> i128 {
        self.terms.get(&n).map_or(0, |p| p.coeff(r))
    }

    pub fn add_term(&mut self, n: i64, r: i64, v: i128) -> Result<()> {
        if n > self.prec || v == 0 {
            return Ok(());
        }
        let e = self.terms.entry(n).or_default();
        e.add_scaled(&LaurentPoly::monomial(r, 1), v)?;
        if e.is_zero() {
            self.terms.remove(&n);
        }
        Ok(())
    }

    /// Lowest `q` numerator with a nonzero row.
    pub fn order(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncate(&mut self, prec: i64) {
        self.prec = self.prec.min(prec);
        let p = self.prec;
        self.terms.retain(|&n, _| n <= p);
    }

    pub fn add_scaled(&mut self, o: &QZSeries, k: i128) -> Result<()> {
        self.check_compatible(o)?;
        self.prec = self.prec.min(o.prec);
        for (&n, p) in &o.terms {
            if n > self.prec {
                continue;
            }
            let e = self.terms.entry(n).or_default();
            e.add_scaled(p, k)?;
        }
        self.terms.retain(|_, p| !p.is_zero());
        let prec = self.prec;
        self.terms.retain(|&n, _| n <= prec);
        Ok(())
    }

    fn check_compatible(&self, o: &QZSeries) -> Result<()> {
        if self.q_den != o.q_den || self.z_den != o.z_den {
            return Err(Error::Precondition("incompatible series denominators".into()));
        }
        Ok(())
    }

    /// Product, exact up to the precision both factors support.
    pub fn mul(&self, o: &QZSeries) -> Result<QZSeries> {
        self.check_compatible(o)?;
        let prec = match (self.order(), o.order()) {
            (Some(a), Some(b)) => (self.prec + b).min(o.prec + a),
            _ => self.prec.min(o.prec),
        };
        let mut out = QZSeries::zero(self.q_den, self.z_den, prec);
        for (&n1, p1) in &self.terms {
            for (&n2, p2) in &o.terms {
                if n1 + n2 > prec {
                    break;
                }
                let e = out.terms.entry(n1 + n2).or_default();
                e.add_scaled(&p1.mul(p2)?, 1)?;
            }
        }
        out.terms.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    pub fn scale(&self, k: i128) -> Result<QZSeries> {
        let mut out = QZSeries::zero(self.q_den, self.z_den, self.prec);
        for (&n, p) in &self.terms {
            out.set_row(n, p.scale(k)?);
        }
        Ok(out)
    }

    /// Exact quotient `self / den` by long division in `q`, each step an
    /// exact Laurent division in `zeta`.
    pub fn div_exact(&self, den: &QZSeries) -> Result<QZSeries> {
        self.check_compatible(den)?;
        let Some(v) = den.order() else {
            return Err(Error::InexactDivision("zero denominator".into()));
        };
        let lead = &den.terms[&v];
        let prec = (self.prec - v).min(den.prec - v + self.order().unwrap_or(self.prec) - v);
        let prec = prec.min(self.prec - v);
        let mut out = QZSeries::zero(self.q_den, self.z_den, prec);
        let Some(start) = self.order() else { return Ok(out) };
        if start < v {
            return Err(Error::InexactDivision("numerator order below denominator order".into()));
        }
        for n in (start - v)..=prec {
            let mut rem = self.terms.get(&(n + v)).cloned().unwrap_or_default();
            for (&i, h) in out.terms.range(..n) {
                if let Some(dp) = den.terms.get(&(n + v - i)) {
                    rem.add_scaled(&h.mul(dp)?, -1)?;
                }
            }
            let h = rem.div_exact(lead)?;
            out.set_row(n, h);
        }
        Ok(out)
    }
}

impl fmt::Display for QZSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&n, p) in &self.terms {
            for (r, v) in p.terms() {
                writeln!(f, "{n}\t{r}\t{v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_division_roundtrip() {
        let a = LaurentPoly::from_terms([(-2, 1), (0, -3), (3, 5)]);
        let b = LaurentPoly::from_terms([(-1, 2), (1, 1)]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.div_exact(&b).unwrap(), a);
        let mut c = ab.clone();
        c.add_scaled(&LaurentPoly::monomial(0, 1), 1).unwrap();
        assert!(c.div_exact(&b).is_err());
    }

    #[test]
    fn series_division_roundtrip() {
        let mut a = QZSeries::zero(1, 1, 6);
        a.add_term(1, -1, 1).unwrap();
        a.add_term(1, 1, -1).unwrap();
        a.add_term(2, 0, 4).unwrap();
        a.add_term(3, 2, 7).unwrap();
        let mut b = QZSeries::zero(1, 1, 6);
        b.add_term(0, 0, 1).unwrap();
        b.add_term(1, 3, 2).unwrap();
        b.add_term(2, -1, 1).unwrap();
        let ab = a.mul(&b).unwrap();
        let q = ab.div_exact(&b).unwrap();
        for n in 0..=q.prec {
            assert_eq!(q.row(n), a.row(n), "row {n}");
        }
    }
}
