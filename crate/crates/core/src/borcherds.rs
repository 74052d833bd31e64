//! Borcherds products of weight-0 weakly holomorphic Jacobi forms: the
//! invariants `A, B, C, D0`, Humbert-surface multiplicities, divisor
//! tables, and the product expansion to low Fourier-Jacobi depth.

use std::fmt;

use num_rational::Ratio;

use crate::jacobi::{
    apply_v, expand_theta_block, gcd3, isqrt, theta_block_table, weakly_holo_quotient, JacobiClass,
    JacobiCoeffTable, LaurentPoly, QZSeries, ThetaBlockSpec,
};
use crate::{Error, Result};

/// Invariants of `BL(psi)` read off the `q^0` row and the principal part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorcherdsData {
    pub a: Ratio<i128>,
    pub b: Ratio<i128>,
    pub c: Ratio<i128>,
    pub d0: i128,
    /// `c(0, 0) / 2`
    pub weight: Ratio<i128>,
    /// `(-1)^(k + D0)`, defined when the weight is integral.
    pub epsilon: Option<i32>,
}

/// `psi = -(phi | V_2) / phi` for a theta block `phi` of `q`-order 1,
/// exact up to `q^q_max`. The support floor is read off the expansion.
pub fn psi_from_theta_block(spec: &ThetaBlockSpec, q_max: i64) -> Result<JacobiCoeffTable> {
    let m = spec.index();
    let q_in = q_max + spec.q_order();
    let phi = theta_block_table(spec, 4 * m * 2 * (q_in + 1))?;
    let num = apply_v(&phi, 2)?.to_series(q_in)?;
    let den = phi.to_series(q_in)?;
    let quo = weakly_holo_quotient(&num, &den, q_max, None)?.scale(-1)?;
    let mut d_floor = 0;
    for (n, row) in quo.rows() {
        for (r, v) in row.terms() {
            if v != 0 {
                d_floor = d_floor.min(4 * n * m - r * r);
            }
        }
    }
    JacobiCoeffTable::from_series(0, m, JacobiClass::WeaklyHolomorphic { d_floor }, &quo)
}

/// The four sums of the product theorem. Tables store only `n >= 0`, so
/// `D0` (a sum over `n <= -1`) is zero for them.
pub fn borcherds_data(psi: &JacobiCoeffTable) -> Result<BorcherdsData> {
    if psi.weight() != 0 {
        return Err(Error::Precondition("psi must have weight 0".into()));
    }
    let d_floor = match psi.class() {
        JacobiClass::WeaklyHolomorphic { d_floor } => d_floor,
        _ => 0,
    };
    let cols = psi.columns();
    if cols.iter().any(|c| c.is_empty()) {
        return Err(Error::Precondition("singular part is not populated".into()));
    }
    let c0 = |r: i64| psi.coeff(0, r);
    let rmax = isqrt(-d_floor);
    let mut a = Ratio::new(c0(0)?, 24);
    let mut b = Ratio::from_integer(0);
    let mut c = Ratio::from_integer(0);
    for r in 1..=rmax.max(0) {
        let v = c0(r)?;
        a += Ratio::new(v, 12);
        b += Ratio::new(r as i128 * v, 2);
        c += Ratio::new((r * r) as i128 * v, 2);
    }
    let d0 = 0;
    let weight = Ratio::new(c0(0)?, 2);
    let epsilon = weight.is_integer().then(|| if (weight.to_integer() + d0) % 2 == 0 { 1 } else { -1 });
    Ok(BorcherdsData { a, b, c, d0, weight, epsilon })
}

/// `sum_{i >= 1} c(i^2 n m, i r)` for a primitive triple with
/// `4 n m N - r^2 < 0`.
pub fn humbert_multiplicity(psi: &JacobiCoeffTable, n: i64, m: i64, r: i64) -> Result<i128> {
    let big_n = psi.index();
    let d = 4 * n * m * big_n - r * r;
    if d >= 0 || m < 0 {
        return Err(Error::Precondition(format!("({n}, {m}, {r}) does not define a Humbert surface")));
    }
    if gcd3(n, m, r) != 1 {
        return Err(Error::Precondition(format!("({n}, {m}, {r}) is not primitive")));
    }
    let floor = match psi.class() {
        JacobiClass::WeaklyHolomorphic { d_floor } => d_floor,
        _ => 0,
    };
    let mut acc = 0;
    let mut i = 1;
    while i * i * d >= floor {
        acc += psi.coeff(i * i * n * m, i * r)?;
        i += 1;
    }
    Ok(acc)
}

/// The representative triple `(n, 1, r)` of `H_N(|D|, r)`.
pub fn humbert_triple(level: i64, abs_d: i64, r: i64) -> Result<(i64, i64, i64)> {
    let num = r * r - abs_d;
    if abs_d <= 0 || num.rem_euclid(4 * level) != 0 {
        return Err(Error::Precondition(format!("|D| = {abs_d} is not r^2 mod 4N for r = {r}")));
    }
    Ok((num / (4 * level), 1, r))
}

/// Multiplicity of an integer combination `sum c_j psi_j` on `H_N(|D|, r)`.
pub fn combination_multiplicity(comb: &[(i64, &JacobiCoeffTable)], abs_d: i64, r: i64) -> Result<i128> {
    let level = comb.first().ok_or_else(|| Error::Precondition("empty combination".into()))?.1.index();
    let (n, m, r) = humbert_triple(level, abs_d, r)?;
    let mut acc = 0;
    for (c, psi) in comb {
        acc += *c as i128 * humbert_multiplicity(psi, n, m, r)?;
    }
    Ok(acc)
}

/// Multiplicities of several combinations along a list of classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorTable {
    pub level: i64,
    pub headers: Vec<String>,
    /// `(|D|, r, multiplicities)`
    pub rows: Vec<(i64, i64, Vec<i128>)>,
}

impl DivisorTable {
    /// Classes where some column is negative.
    pub fn negative_entries(&self) -> Vec<(i64, i64, usize)> {
        let mut out = vec![];
        for (d, r, v) in &self.rows {
            for (j, &x) in v.iter().enumerate() {
                if x < 0 {
                    out.push((*d, *r, j));
                }
            }
        }
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut s = format!("class\t{}\n", self.headers.join("\t"));
        for (d, r, v) in &self.rows {
            let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("H_{}({},{})\t{}\n", self.level, d, r, cells.join("\t")));
        }
        s
    }
}

impl fmt::Display for DivisorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.rows.iter().map(|(d, r, _)| format!("H_{}({},{})", self.level, d, r)).collect();
        let w0 = labels.iter().map(|s| s.len()).max().unwrap_or(5).max(5);
        let widths: Vec<usize> = self.headers.iter().map(|h| h.len().max(4)).collect();
        write!(f, "{:w0$}", "class")?;
        for (h, w) in self.headers.iter().zip(&widths) {
            write!(f, "  {h:>w$}")?;
        }
        writeln!(f)?;
        for (lab, (_, _, v)) in labels.iter().zip(&self.rows) {
            write!(f, "{lab:w0$}")?;
            for (x, w) in v.iter().zip(&widths) {
                write!(f, "  {x:>w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Multiplicities of each named combination along `classes` (`(|D|, r)`).
pub fn divisor_table(
    columns: &[(String, Vec<(i64, &JacobiCoeffTable)>)],
    classes: &[(i64, i64)],
) -> Result<DivisorTable> {
    let level = columns
        .first()
        .and_then(|c| c.1.first())
        .ok_or_else(|| Error::Precondition("no columns".into()))?
        .1
        .index();
    let mut rows = vec![];
    for &(d, r) in classes {
        let v = columns.iter().map(|(_, comb)| combination_multiplicity(comb, d, r)).collect::<Result<_>>()?;
        rows.push((d, r, v));
    }
    Ok(DivisorTable { level, headers: columns.iter().map(|c| c.0.clone()).collect(), rows })
}

/// The theta block `TB(lambda)` with `lambda(r) = c(0, r)`.
pub fn theta_block_of_psi(psi: &JacobiCoeffTable) -> Result<ThetaBlockSpec> {
    let data = borcherds_data(psi)?;
    if !data.weight.is_integer() {
        return Err(Error::Precondition("half-integral weight".into()));
    }
    let d_floor = match psi.class() {
        JacobiClass::WeaklyHolomorphic { d_floor } => d_floor,
        _ => 0,
    };
    let mut ds = vec![];
    for r in 1..=isqrt(-d_floor).max(0) {
        let v = psi.coeff(0, r)?;
        if v < 0 {
            return Err(Error::Precondition(format!("c(0, {r}) = {v} is negative")));
        }
        ds.extend(std::iter::repeat_n(r, v as usize));
    }
    Ok(ThetaBlockSpec::new(data.weight.to_integer() as i32, ds))
}

fn binomial_signed(c: i128, k: u32) -> i128 {
    // binom(c, k) for any integer c
    let mut num = 1i128;
    let mut den = 1i128;
    for i in 0..k as i128 {
        num *= c - i;
        den *= i + 1;
    }
    num / den
}

/// Fourier-Jacobi coefficients `1..=depth` of `BL(psi)` from the product
/// expression, each up to `q^q_max`. The leading coefficient is the theta
/// block `TB(lambda)`; index `j` carries `xi^(jN)`.
pub fn borcherds_fj_expansion(psi: &JacobiCoeffTable, depth: i64, q_max: i64) -> Result<Vec<QZSeries>> {
    let data = borcherds_data(psi)?;
    let big_n = psi.index();
    if data.c != Ratio::from_integer(big_n as i128) {
        return Err(Error::Precondition(format!("C = {} differs from the index {big_n}", data.c)));
    }
    let tb = theta_block_of_psi(psi)?;
    let lead = expand_theta_block(&tb, q_max)?;
    if lead.order() != Some(data.a.to_integer() as i64) || !data.a.is_integer() {
        return Err(Error::Inconsistent("q-order of the theta block differs from A".into()));
    }
    let d_floor = match psi.class() {
        JacobiClass::WeaklyHolomorphic { d_floor } => d_floor,
        _ => 0,
    };
    // P = prod over m >= 1 of (1 - q^n zeta^r xi^(mN))^c(nm, r), as a
    // polynomial in xi^N of degree < depth
    let mut p: Vec<QZSeries> = (0..depth).map(|_| QZSeries::zero(1, 1, q_max)).collect();
    p[0].add_term(0, 0, 1)?;
    for m in 1..depth {
        for n in 0..=q_max {
            let rmax = isqrt(4 * n * m * big_n - d_floor);
            for r in -rmax..=rmax {
                let c = psi.coeff(n * m, r)?;
                if c == 0 {
                    continue;
                }
                // multiply by sum_k binom(c, k) (-1)^k q^(nk) zeta^(rk) xi^(mNk)
                for i in (1..depth).rev() {
                    let mut add = QZSeries::zero(1, 1, q_max);
                    let mut k = 1;
                    while k * m <= i {
                        let coef = binomial_signed(c, k as u32) * if k % 2 == 0 { 1 } else { -1 };
                        if let Some(src) = Some(&p[(i - k * m) as usize]) {
                            for (sn, row) in src.rows() {
                                let e = sn + n * k;
                                if e > q_max {
                                    continue;
                                }
                                let shifted = LaurentPoly::from_terms(row.terms().map(|(sr, v)| (sr + r * k, v)));
                                let mut one = QZSeries::zero(1, 1, q_max);
                                one.set_row(e, shifted);
                                add.add_scaled(&one, coef)?;
                            }
                        }
                        k += 1;
                    }
                    p[i as usize].add_scaled(&add, 1)?;
                }
            }
        }
    }
    let mut out = vec![];
    for pi in &p {
        let mut s = lead.mul(pi)?;
        s.truncate(q_max);
        out.push(s);
    }
    Ok(out)
}

/// Compare the product expansion of `BL(psi_j)` with the lift of the theta
/// block through Fourier-Jacobi index `depth`, and check
/// `BL(psi) = TB * xi^C * exp(-Grit(psi))` through index 2.
pub fn check_grit_equals_borcherds(spec: &ThetaBlockSpec, depth: i64, q_max: i64) -> Result<bool> {
    if depth < 2 {
        return Err(Error::Precondition("depth must be at least 2".into()));
    }
    let big_n = spec.index();
    let psi = psi_from_theta_block(spec, q_max * (depth - 1))?;
    let bl = borcherds_fj_expansion(&psi, depth, q_max)?;
    let phi = theta_block_table(spec, 4 * big_n * depth * (q_max + 1))?;
    for (m, s) in bl.iter().enumerate() {
        let grit = apply_v(&phi, m as i64 + 1)?.to_series(q_max)?;
        if !series_eq(s, &grit) {
            return Ok(false);
        }
    }
    // exp(-Grit psi) = 1 - psi xi^N + ..., so the second coefficient is
    // -TB * psi
    let tb = expand_theta_block(&theta_block_of_psi(&psi)?, q_max)?;
    let mut second = tb.mul(&psi.to_series(q_max)?)?.scale(-1)?;
    second.truncate(q_max);
    Ok(series_eq(&tb, &bl[0]) && series_eq(&second, &bl[1]))
}

fn series_eq(a: &QZSeries, b: &QZSeries) -> bool {
    let prec = a.prec.min(b.prec);
    let mut d = a.clone();
    d.truncate(prec);
    let mut e = b.clone();
    e.truncate(prec);
    d.add_scaled(&e, -1).is_ok() && d.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial_signed(5, 2), 10);
        assert_eq!(binomial_signed(-3, 2), 6);
        assert_eq!(binomial_signed(-3, 3), -10);
        assert_eq!(binomial_signed(2, 3), 0);
    }

    #[test]
    fn zero_form() {
        let t = JacobiCoeffTable::from_columns(0, 5, JacobiClass::Holomorphic, vec![vec![0; 3]; 6]);
        let d = borcherds_data(&t).unwrap();
        assert_eq!(d.a, Ratio::from_integer(0));
        assert_eq!(d.b, Ratio::from_integer(0));
        assert_eq!(d.c, Ratio::from_integer(0));
        assert_eq!(d.d0, 0);
        assert_eq!(d.weight, Ratio::from_integer(0));
    }

    #[test]
    fn non_primitive_rejected() {
        let t = JacobiCoeffTable::from_columns(0, 5, JacobiClass::Holomorphic, vec![vec![0; 3]; 6]);
        assert!(humbert_multiplicity(&t, 0, 2, 2).is_err());
        assert!(humbert_multiplicity(&t, 1, 1, 1).is_err());
    }
}
