use super::{LiftBasis, ParamodularIndex};
use crate::jacobi::{weakly_holo_quotient, JacobiClass, JacobiCoeffTable, QZSeries};
use crate::{Error, Result};

/// `f = sum_j linear[j] G[j] + scale * G[num.0] G[num.1] / G[den]`, with
/// 0-based member indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonliftSpec {
    pub level: i64,
    pub linear: Vec<i64>,
    pub scale: i64,
    pub num: (usize, usize),
    pub den: usize,
}

/// Fourier-Jacobi coefficients `H_1, ..., H_mmax` of the quotient
/// `H = G[i] G[j] / G[k]`, from
/// `(G[i] G[j])_{m+1} = sum_{m1 = 1}^{m} G[k]_{m1} H_{m+1-m1}`.
pub struct FjQuotient {
    level: i64,
    q_max: i64,
    fj: Vec<JacobiCoeffTable>,
}

impl FjQuotient {
    /// Solve for `H_m` with `m <= m_max`, each exact up to `q^q_max`.
    pub fn new(basis: &LiftBasis, spec: &NonliftSpec, m_max: i64, q_max: i64) -> Result<Self> {
        if m_max < 1 || q_max < 1 {
            return Err(Error::Precondition("depth must be positive".into()));
        }
        let level = basis.level();
        let (i, j) = spec.num;
        let k = spec.den;
        let lead_order = basis.specs()[k].q_order();
        let q_in = q_max + lead_order + 1;
        let gi: Vec<QZSeries> = (1..=m_max).map(|m| basis.fj_series(i, m, q_in)).collect::<Result<_>>()?;
        let gj: Vec<QZSeries> = (1..=m_max).map(|m| basis.fj_series(j, m, q_in)).collect::<Result<_>>()?;
        let gk: Vec<QZSeries> = (1..=m_max).map(|m| basis.fj_series(k, m, q_in)).collect::<Result<_>>()?;
        let mut h: Vec<QZSeries> = vec![];
        let mut fj = vec![];
        for m in 1..=m_max {
            // A_{m+1}
            let mut rhs = QZSeries::zero(1, 1, q_in);
            for m1 in 1..=m {
                let m2 = m + 1 - m1;
                rhs.add_scaled(&gi[(m1 - 1) as usize].mul(&gj[(m2 - 1) as usize])?, 1)?;
            }
            for m1 in 2..=m {
                let prev = &h[(m - m1) as usize];
                rhs.add_scaled(&gk[(m1 - 1) as usize].mul(prev)?, -1)?;
            }
            let hm = weakly_holo_quotient(&rhs, &gk[0], q_max, None)?;
            let idx = m * level;
            // the quotient must be a holomorphic Jacobi form of index mN
            for (n, row) in hm.rows() {
                for (r, v) in row.terms() {
                    if v != 0 && 4 * n * idx - r * r < 0 {
                        return Err(Error::Inconsistent(format!(
                            "quotient FJ coefficient {m} has support at non-holomorphic ({n}, {r})"
                        )));
                    }
                }
            }
            fj.push(JacobiCoeffTable::from_series(3, idx, JacobiClass::Cusp, &hm)?);
            h.push(hm);
        }
        Ok(FjQuotient { level, q_max, fj })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn depth(&self) -> i64 {
        self.fj.len() as i64
    }

    pub fn q_max(&self) -> i64 {
        self.q_max
    }

    pub fn fj_table(&self, m: i64) -> Option<&JacobiCoeffTable> {
        self.fj.get((m - 1) as usize)
    }

    /// `a(n, r, m)` of the quotient, using `a(n, r, m) = a(m, r, n)` to keep
    /// the Fourier-Jacobi index small.
    pub fn coeff(&self, n: i64, r: i64, m: i64) -> Result<i128> {
        let t = ParamodularIndex::new(n, r, m);
        if !t.in_cusp_support(self.level) {
            return Ok(0);
        }
        let (c, _) = t.canonical();
        let tbl = self.fj_table(c.n).ok_or_else(|| {
            Error::Precondition(format!("FJ index {} beyond solved depth {}", c.n, self.depth()))
        })?;
        tbl.coeff(c.m, r)
    }
}

/// Coefficient of `f` at `t` from the lift basis and the solved quotient.
pub fn nonlift_coeff(basis: &LiftBasis, quot: &FjQuotient, spec: &NonliftSpec, t: ParamodularIndex) -> Result<i128> {
    if !t.in_cusp_support(spec.level) {
        return Ok(0);
    }
    let mut buf = vec![0i128; basis.dim()];
    basis.lift_coeffs_all(t.n, t.r, t.m, &mut buf)?;
    let mut acc: i128 = spec.linear.iter().zip(&buf).map(|(c, v)| *c as i128 * v).sum();
    acc += spec.scale as i128 * quot.coeff(t.n, t.r, t.m)?;
    Ok(acc)
}

impl NonliftSpec {
    /// Coefficient of `f` at `t`.
    pub fn coeff(&self, basis: &LiftBasis, quot: &FjQuotient, t: ParamodularIndex) -> Result<i128> {
        nonlift_coeff(basis, quot, self, t)
    }
}
