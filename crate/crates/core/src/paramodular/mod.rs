//! Fourier coefficients of paramodular forms of level `N`: Gritsenko lifts
//! of theta blocks, nonlifts written as rational functions of lifts, the
//! dimension formula for prime level, and the bad-prime Hecke action on
//! coefficients.

mod cache;
mod hecke;
mod nonlift;

pub use cache::ParamodularCache;
pub use hecke::{fc_action_bad_prime, transform_index, BadOperator};
pub use nonlift::{nonlift_coeff, FjQuotient, NonliftSpec};

use num_rational::Ratio;

use crate::exactcore::{is_prime_u64, legendre};
use crate::jacobi::{
    apply_v, dim_jacobi_cusp, gcd3, isqrt, theta_block_admissible, theta_block_table,
    JacobiCoeffTable, QZSeries, ThetaBlockSpec,
};
use crate::{Error, Result};

/// Index `t = [[n, r/2], [r/2, m N]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamodularIndex {
    pub n: i64,
    pub r: i64,
    pub m: i64,
}

impl ParamodularIndex {
    pub fn new(n: i64, r: i64, m: i64) -> Self {
        ParamodularIndex { n, r, m }
    }

    /// `4 n m N - r^2`, four times the determinant.
    pub fn disc(&self, level: i64) -> i64 {
        4 * self.n * self.m * level - self.r * self.r
    }

    pub fn in_cusp_support(&self, level: i64) -> bool {
        self.n >= 1 && self.m >= 1 && self.disc(level) > 0
    }

    /// Representative with `n <= m` and `r >= 0`, and the sign relating the
    /// coefficients for antisymmetric forms of odd weight.
    pub fn canonical(&self) -> (ParamodularIndex, i64) {
        let (n, m) = if self.n <= self.m { (self.n, self.m) } else { (self.m, self.n) };
        if self.r < 0 {
            (ParamodularIndex::new(n, -self.r, m), -1)
        } else {
            (ParamodularIndex::new(n, self.r, m), 1)
        }
    }

    /// `<X, t> * den` for `X = [[a, b], [b, c]] / den`.
    pub fn pair(&self, level: i64, x: &SymQ) -> i128 {
        x.a * self.n as i128 + x.b * self.r as i128 + x.c * (self.m * level) as i128
    }
}

/// Symmetric rational 2x2 matrix `[[a, b], [b, c]] / den` with `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymQ {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub den: i128,
}

impl SymQ {
    pub fn new(a: i128, b: i128, c: i128, den: i128) -> Self {
        assert!(den != 0);
        let (a, b, c, den) = if den < 0 { (-a, -b, -c, -den) } else { (a, b, c, den) };
        let g = gcd128(gcd128(gcd128(a, b), c), den);
        SymQ { a: a / g, b: b / g, c: c / g, den: den / g }
    }

    pub fn from_ratios(a: Ratio<i128>, b: Ratio<i128>, c: Ratio<i128>) -> Self {
        let den = lcm128(lcm128(*a.denom(), *b.denom()), *c.denom());
        SymQ::new(a.numer() * (den / a.denom()), b.numer() * (den / b.denom()), c.numer() * (den / c.denom()), den)
    }

    pub fn entries(&self) -> [Ratio<i128>; 3] {
        [Ratio::new(self.a, self.den), Ratio::new(self.b, self.den), Ratio::new(self.c, self.den)]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.a * self.c - self.b * self.b > 0
    }

    pub fn scale(&self, num: i128, den: i128) -> Self {
        SymQ::new(self.a * num, self.b * num, self.c * num, self.den * den)
    }

    pub fn add(&self, o: &SymQ) -> Self {
        let d = lcm128(self.den, o.den);
        let (u, v) = (d / self.den, d / o.den);
        SymQ::new(self.a * u + o.a * v, self.b * u + o.b * v, self.c * u + o.c * v, d)
    }

    pub fn det(&self) -> Ratio<i128> {
        Ratio::new(self.a * self.c - self.b * self.b, self.den * self.den)
    }
}

pub(crate) fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm128(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd128(a, b) * b).abs()
}

/// All cusp-support indices `t` of level `N` with `<X, t> <= bound`, for
/// positive definite `X`. The bound is given as a multiple of `1/den`,
/// i.e. `<X, t> * X.den <= bound_num`.
pub fn enumerate_indices(level: i64, x: &SymQ, bound_num: i128) -> Vec<ParamodularIndex> {
    assert!(x.is_positive_definite(), "restriction matrix must be positive definite");
    let mut out = vec![];
    if bound_num <= 0 {
        return out;
    }
    // a n + b r + c N m <= B with r^2 < 4 n m N; in u = sqrt n, v = sqrt(m N)
    // this is a u^2 + c v^2 - 2|b| u v <= B.
    let (a, b) = (x.a as f64, x.b.abs() as f64);
    let bound = bound_num as f64;
    let det = a * x.c as f64 - b * b;
    let u2_max = x.c as f64 * bound / det;
    let n_max = (u2_max * (1.0 + 1e-9)).floor() as i64 + 1;
    for n in 1..=n_max {
        let u = (n as f64).sqrt();
        // c v^2 - 2 b u v + (a u^2 - B) <= 0, v = sqrt(m N)
        let disc = b * b * u * u - x.c as f64 * (a * u * u - bound);
        if disc < 0.0 {
            continue;
        }
        let v_hi = (b * u + disc.sqrt()) / x.c as f64;
        let m_max = ((v_hi * v_hi / level as f64) * (1.0 + 1e-9)).floor() as i64 + 1;
        for m in 1..=m_max {
            let base = x.a * n as i128 + x.c * (m * level) as i128;
            let rmax = isqrt(4 * n * m * level - 1);
            if rmax < 0 {
                continue;
            }
            // base + b r <= B
            let (lo, hi) = if x.b > 0 {
                (-rmax, rmax.min(floor_div(bound_num - base, x.b) as i64))
            } else if x.b < 0 {
                ((-rmax).max(ceil_div(base - bound_num, -x.b) as i64), rmax)
            } else if base <= bound_num {
                (-rmax, rmax)
            } else {
                (1, 0)
            };
            for r in lo..=hi {
                out.push(ParamodularIndex::new(n, r, m));
            }
        }
    }
    out
}

pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b) - if b < 0 && a.rem_euclid(b) != 0 { 1 } else { 0 }
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// Gritsenko lifts of a list of weight-3 theta blocks of index `N`.
pub struct LiftBasis {
    level: i64,
    specs: Vec<ThetaBlockSpec>,
    tables: Vec<JacobiCoeffTable>,
    /// `flat[r0][n * dim + j] = c_j(n, r0)`
    flat: Vec<Vec<i64>>,
}

impl LiftBasis {
    /// Expand every theta block far enough for discriminants up to `d_max`.
    pub fn new(level: i64, specs: Vec<ThetaBlockSpec>, d_max: i64) -> Result<Self> {
        let mut tables = vec![];
        for s in &specs {
            if !theta_block_admissible(s) || s.index() != level {
                return Err(Error::Inadmissible(format!("{s} is not a cusp form of index {level}")));
            }
            tables.push(theta_block_table(s, d_max)?);
        }
        Self::from_tables(level, specs, tables)
    }

    pub fn from_tables(level: i64, specs: Vec<ThetaBlockSpec>, tables: Vec<JacobiCoeffTable>) -> Result<Self> {
        if tables.len() != specs.len() || tables.is_empty() {
            return Err(Error::Precondition("one table per theta block".into()));
        }
        for t in &tables {
            if t.index() != level || t.weight() != 3 {
                return Err(Error::Precondition("tables must have weight 3 and index N".into()));
            }
        }
        let dim = tables.len();
        let d_max = tables.iter().map(|t| t.d_max()).min().unwrap();
        let mut flat = vec![];
        for r0 in 0..=level {
            let len = ((d_max + r0 * r0) / (4 * level) + 1) as usize;
            let mut col = vec![0i64; len * dim];
            for (j, t) in tables.iter().enumerate() {
                for (n, v) in t.columns()[r0 as usize].iter().take(len).enumerate() {
                    col[n * dim + j] = i64::try_from(*v).map_err(|_| Error::Overflow("lift table entry"))?;
                }
            }
            flat.push(col);
        }
        Ok(LiftBasis { level, specs, tables, flat })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.tables.len()
    }

    pub fn specs(&self) -> &[ThetaBlockSpec] {
        &self.specs
    }

    pub fn tables(&self) -> &[JacobiCoeffTable] {
        &self.tables
    }

    pub fn d_max(&self) -> i64 {
        self.tables.iter().map(|t| t.d_max()).min().unwrap()
    }

    /// `a(n, r, m)` of the lift of member `j`.
    pub fn lift_coeff(&self, j: usize, n: i64, r: i64, m: i64) -> Result<i128> {
        lift_coeff(&self.tables[j], n, r, m)
    }

    /// Coefficients of every member at `(n, r, m)`, written into `out`.
    pub fn lift_coeffs_all(&self, n: i64, r: i64, m: i64, out: &mut [i128]) -> Result<()> {
        let dim = self.dim();
        out[..dim].iter_mut().for_each(|x| *x = 0);
        let big_n = self.level;
        if n < 1 || m < 1 || 4 * n * m * big_n - r * r <= 0 {
            return Ok(());
        }
        let g = gcd3(n, r, m);
        for d in 1..=g {
            if g % d != 0 {
                continue;
            }
            let (nn, rr) = (n * m / (d * d), r / d);
            let disc = 4 * nn * big_n - rr * rr;
            let mut r0 = rr.rem_euclid(2 * big_n);
            if r0 > big_n {
                r0 -= 2 * big_n;
            }
            let sign: i128 = if r0 < 0 { -(d * d) as i128 } else { (d * d) as i128 };
            let r0 = r0.abs();
            let n0 = ((disc + r0 * r0) / (4 * big_n)) as usize;
            let col = &self.flat[r0 as usize];
            if (n0 + 1) * dim > col.len() {
                return Err(Error::CacheMiss { needed: disc, have: self.d_max() });
            }
            for (o, v) in out.iter_mut().zip(&col[n0 * dim..(n0 + 1) * dim]) {
                *o += sign * *v as i128;
            }
        }
        Ok(())
    }

    /// The `m`-th Fourier-Jacobi coefficient of the lift of member `j`, up
    /// to `q^q_max`.
    pub fn fj_series(&self, j: usize, m: i64, q_max: i64) -> Result<QZSeries> {
        apply_v(&self.tables[j], m)?.to_series(q_max)
    }
}

/// `sum_{d | gcd(n, r, m)} d^2 c(nm/d^2, r/d)` for a weight-3 table.
pub fn lift_coeff(tbl: &JacobiCoeffTable, n: i64, r: i64, m: i64) -> Result<i128> {
    if n < 1 || m < 1 || 4 * n * m * tbl.index() - r * r <= 0 {
        return Ok(0);
    }
    let g = gcd3(n, r, m);
    let mut acc = 0i128;
    for d in 1..=g {
        if g % d == 0 {
            let w = (d as i128).pow(tbl.weight() as u32 - 1);
            acc += w * tbl.coeff(n * m / (d * d), r / d)?;
        }
    }
    Ok(acc)
}

/// Dimension of weight-3 paramodular cusp forms of prime level `p >= 5`.
pub fn dim_paramodular_cusp3(p: i64) -> Result<i64> {
    if p < 5 || !is_prime_u64(p as u64) {
        return Err(Error::Precondition(format!("{p} is not a prime >= 5")));
    }
    let q = |a: i64, b: i64| Ratio::new(a as i128, b as i128);
    let pu = p as u64;
    let l = |a: i64| legendre(a, pu) as i64;
    let mut d = q(p * p - 1, 2880) - q(1, 1);
    d += q(p + 1, 64) * q(1 - l(-1), 1);
    d += q(5 * (p - 1), 192) * q(1 + l(-1), 1);
    d += q(p + 1, 72) * q(1 - l(-3), 1);
    d += q(p - 1, 36) * q(1 + l(-3), 1);
    d += q(1 - l(2), 8);
    d += q(1 - l(5), 5);
    if p % 12 == 5 {
        d += q(1, 6);
    }
    if !d.is_integer() {
        return Err(Error::Inconsistent(format!("dimension formula gave {d}")));
    }
    Ok(d.to_integer() as i64)
}

/// Number of nonlift dimensions, `dim S_3(K(p)) - dim J_{3,p}^cusp`.
pub fn nonlift_dimension(p: i64) -> Result<i64> {
    Ok(dim_paramodular_cusp3(p)? - dim_jacobi_cusp(3, p)?)
}

/// Whether the listed coefficients generate the unit ideal.
pub fn unit_content_witness(coeffs: &[i128]) -> bool {
    let g = coeffs.iter().fold(0i128, |g, &c| gcd128(g, c));
    g == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ibukiyama_dims() {
        assert_eq!(dim_paramodular_cusp3(61).unwrap(), 7);
        assert_eq!(dim_paramodular_cusp3(73).unwrap(), 9);
        assert_eq!(dim_paramodular_cusp3(79).unwrap(), 8);
        for p in [61, 73, 79] {
            assert_eq!(nonlift_dimension(p).unwrap(), 1);
        }
        assert!(dim_paramodular_cusp3(4).is_err());
        assert!(dim_paramodular_cusp3(3).is_err());
        // the formula yields integers at every prime in range
        for p in 5..400 {
            if is_prime_u64(p as u64) {
                assert!(dim_paramodular_cusp3(p).unwrap() >= 0, "p = {p}");
            }
        }
    }

    #[test]
    fn content() {
        assert!(unit_content_witness(&[-75, 107]));
        assert!(unit_content_witness(&[7, -6]));
        assert!(!unit_content_witness(&[6, 9]));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        // 122 n + 9 r + 61 m <= 400 forces n <= 400/41 and m N <= 122 * 400/41
        let x = SymQ::new(122, 9, 1, 1);
        let level = 61;
        let b = 400;
        let mut got = enumerate_indices(level, &x, b);
        got.sort();
        let mut want = vec![];
        for n in 1..=12 {
            for m in 1..=24 {
                for r in -300..=300 {
                    let t = ParamodularIndex::new(n, r, m);
                    if t.in_cusp_support(level) && t.pair(level, &x) <= b {
                        want.push(t);
                    }
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn enumeration_negative_b() {
        let x = SymQ::new(13, -2, 19, 61);
        let level = 61;
        let b = 61 * 3;
        let mut got = enumerate_indices(level, &x, b);
        got.sort();
        let mut want = vec![];
        for n in 1..=30 {
            for m in 1..=30 {
                for r in -400..=400 {
                    let t = ParamodularIndex::new(n, r, m);
                    if t.in_cusp_support(level) && t.pair(level, &x) <= b {
                        want.push(t);
                    }
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
    }
}
