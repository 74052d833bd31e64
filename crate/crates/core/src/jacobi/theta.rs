use std::fmt;

use serde::{Deserialize, Serialize};

use super::series::{LaurentPoly, QZSeries};
use super::table::{JacobiClass, JacobiCoeffTable};
use crate::{Error, Result};

/// Theta block `eta^(2k - l) * prod theta_{d_j}` of weight `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaBlockSpec {
    pub weight: i32,
    pub d: Vec<i64>,
}

impl ThetaBlockSpec {
    pub fn new(weight: i32, mut d: Vec<i64>) -> Self {
        d.sort_unstable();
        ThetaBlockSpec { weight, d }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    fn sum_sq(&self) -> i64 {
        self.d.iter().map(|x| x * x).sum()
    }

    /// Index `M = sum d_j^2 / 2`.
    pub fn index(&self) -> i64 {
        self.sum_sq() / 2
    }

    pub fn eta_power(&self) -> i64 {
        2 * self.weight as i64 - self.len() as i64
    }

    /// Order of vanishing in `q`, `(k + l) / 12`.
    pub fn q_order(&self) -> i64 {
        (self.weight as i64 + self.len() as i64) / 12
    }
}

impl fmt::Display for ThetaBlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<String> = self.d.iter().map(|x| x.to_string()).collect();
        write!(f, "TB{}[{}]", self.weight, ds.join(","))
    }
}

/// Why a theta block fails to define a holomorphic Jacobi cusp form, if it
/// does. Checks `12 | k + l`, even `sum d^2`, and positivity of
/// `k/12 + (1/2) sum B2bar(d_j x)` on `[0, 1/2] cap (1/2M) Z`.
pub fn admissibility_defect(spec: &ThetaBlockSpec) -> Option<String> {
    let k = spec.weight as i64;
    let l = spec.len() as i64;
    if spec.d.iter().any(|&x| x <= 0) {
        return Some("entries must be positive".into());
    }
    if (k + l) % 12 != 0 {
        return Some(format!("12 does not divide k + l = {}", k + l));
    }
    if spec.sum_sq() % 2 != 0 {
        return Some("sum of squares is odd".into());
    }
    let m = spec.index();
    let w = 2 * m;
    // 12 w^2 * (k/12 + 1/2 sum B2bar) with B2bar(u/w) = (u^2 - u w + w^2/6)/w^2
    for i in 0..=m {
        let mut s = (k as i128) * (w as i128).pow(2);
        for &d in &spec.d {
            let u = ((d * i) % w) as i128;
            s += 6 * (u * u - u * w as i128) + (w as i128).pow(2);
        }
        if s <= 0 {
            return Some(format!("positivity fails at x = {i}/{w}"));
        }
    }
    None
}

pub fn theta_block_admissible(spec: &ThetaBlockSpec) -> bool {
    admissibility_defect(spec).is_none()
}

fn triangular(n: i64) -> i64 {
    n * (n + 1) / 2
}

/// Coefficients of `prod_{n >= 1} (1 - q^n)^e` up to `q^top`.
pub fn euler_product_power(e: i64, top: usize) -> Result<Vec<i128>> {
    let mut base = vec![0i128; top + 1];
    base[0] = 1;
    for _ in 0..e.unsigned_abs() {
        for n in 1..=top {
            for a in (n..=top).rev() {
                base[a] = base[a]
                    .checked_sub(base[a - n])
                    .ok_or(Error::Overflow("eta power"))?;
            }
        }
    }
    if e >= 0 {
        return Ok(base);
    }
    let mut inv = vec![0i128; top + 1];
    inv[0] = 1;
    for a in 1..=top {
        let mut s = 0i128;
        for j in 1..=a {
            s = s
                .checked_sub(base[j].checked_mul(inv[a - j]).ok_or(Error::Overflow("eta inverse"))?)
                .ok_or(Error::Overflow("eta inverse"))?;
        }
        inv[a] = s;
    }
    Ok(inv)
}

/// Expansion of an admissible theta block up to `q^q_max`, multiplying
/// two-variable series directly. Suited to small `q_max`.
pub fn expand_theta_block(spec: &ThetaBlockSpec, q_max: i64) -> Result<QZSeries> {
    if let Some(why) = admissibility_defect(spec) {
        return Err(Error::Inadmissible(format!("{spec}: {why}")));
    }
    let ord = spec.q_order();
    let top = q_max - ord;
    if top < 0 {
        return Ok(QZSeries::zero(1, 1, q_max));
    }
    // zeta exponents in half units while multiplying
    let mut acc = QZSeries::zero(1, 2, top);
    acc.set_row(0, LaurentPoly::monomial(0, 1));
    for &d in &spec.d {
        let mut th = QZSeries::zero(1, 2, top);
        let mut n = 0;
        while triangular(n) <= top {
            let s = if n % 2 == 0 { 1 } else { -1 };
            let e = d * (2 * n + 1);
            th.add_term(triangular(n), e, s)?;
            th.add_term(triangular(n), -e, -s)?;
            n += 1;
        }
        acc = acc.mul(&th)?;
        acc.truncate(top);
    }
    let eta = euler_product_power(spec.eta_power(), top as usize)?;
    let mut out = QZSeries::zero(1, 1, q_max);
    for a in 0..=top {
        let mut row = LaurentPoly::zero();
        for j in 0..=a {
            if eta[j as usize] == 0 {
                continue;
            }
            if let Some(p) = acc.row(a - j) {
                row.add_scaled(p, eta[j as usize])?;
            }
        }
        let mut terms = vec![];
        for (e, v) in row.terms() {
            if e % 2 != 0 {
                return Err(Error::Inadmissible("half-integral zeta exponent".into()));
            }
            terms.push((e / 2, v));
        }
        out.set_row(a + ord, LaurentPoly::from_terms(terms));
    }
    Ok(out)
}

/// Stage of the progressive theta product: for each `a`, coefficients of
/// `zeta^(rho/2)` for `rho = lo + 2i`.
struct Stage {
    rows: Vec<(i64, Vec<i64>)>,
}

fn ceil_sqrt_f(x: f64) -> i64 {
    if x <= 0.0 {
        0
    } else {
        x.sqrt().ceil() as i64 + 1
    }
}

/// Reduced coefficient table of an admissible theta block for all
/// discriminants up to at least `d_max`. Only the needed window of `zeta`
/// exponents is carried through the product.
pub fn theta_block_table(spec: &ThetaBlockSpec, d_max: i64) -> Result<JacobiCoeffTable> {
    if let Some(why) = admissibility_defect(spec) {
        return Err(Error::Inadmissible(format!("{spec}: {why}")));
    }
    let m = spec.index();
    let ord = spec.q_order();
    let n_top = (d_max.max(0) + m * m + 4 * m - 1) / (4 * m);
    let top = (n_top - ord).max(0);
    let l = spec.len();
    // crude bound on the l1 norm of the partial products
    let volume = (2.0 * top as f64 + l as f64).powf(l as f64 / 2.0) * 8.0;
    if volume > 2f64.powi(62) {
        return Err(Error::Overflow("theta table too deep for 64-bit accumulation"));
    }
    let mut ds = spec.d.clone();
    ds.sort_unstable_by(|a, b| b.cmp(a));
    let total_sq: i64 = ds.iter().map(|x| x * x).sum();
    let mut done_sq = 0i64;
    let mut parity = 0i64;
    let mut stage = Stage { rows: vec![(0, vec![]); top as usize + 1] };
    stage.rows[0] = (0, vec![1]);
    for (s, &d) in ds.iter().enumerate() {
        done_sq += d * d;
        parity = (parity + d) % 2;
        let rest_sq = total_sq - done_sq;
        let rest_len = (l - s - 1) as f64;
        let last = s + 1 == l;
        // window for the new stage
        let window = |a: i64| -> (i64, i64) {
            let sup = ceil_sqrt_f(done_sq as f64 * (8 * a) as f64 + done_sq as f64 * (s + 1) as f64);
            let rem = ceil_sqrt_f(rest_sq as f64 * (8.0 * (top - a) as f64 + rest_len));
            let (mut lo, hi) = if last { (0, 2 * m) } else { ((-sup).max(-rem), sup.min(2 * m + rem)) };
            if (lo - parity).rem_euclid(2) != 0 {
                lo += 1;
            }
            (lo, hi)
        };
        let mut next: Vec<(i64, Vec<i64>)> = (0..=top)
            .map(|a| {
                let (lo, hi) = window(a);
                let len = if hi >= lo { ((hi - lo) / 2 + 1) as usize } else { 0 };
                (lo, vec![0i64; len])
            })
            .collect();
        let mut n = 0i64;
        while triangular(n) <= top {
            let t = triangular(n);
            let sgn = if n % 2 == 0 { 1 } else { -1 };
            let sh = d * (2 * n + 1);
            for a in 0..=(top - t) {
                let (slo, src) = &stage.rows[a as usize];
                if src.is_empty() {
                    continue;
                }
                let (dlo, dst) = &mut next[(a + t) as usize];
                if dst.is_empty() {
                    continue;
                }
                for (shift, sign) in [(sh, sgn), (-sh, -sgn)] {
                    // dst index j <-> rho = dlo + 2j = slo + 2i + shift
                    let off = slo + shift - *dlo;
                    debug_assert_eq!(off.rem_euclid(2), 0);
                    let off = off / 2;
                    let i0 = (-off).max(0);
                    let i1 = (src.len() as i64).min(dst.len() as i64 - off);
                    if i0 >= i1 {
                        continue;
                    }
                    let (i0, i1) = (i0 as usize, i1 as usize);
                    let j0 = (i0 as i64 + off) as usize;
                    let dsl = &mut dst[j0..j0 + (i1 - i0)];
                    if sign > 0 {
                        for (x, y) in dsl.iter_mut().zip(&src[i0..i1]) {
                            *x += *y;
                        }
                    } else {
                        for (x, y) in dsl.iter_mut().zip(&src[i0..i1]) {
                            *x -= *y;
                        }
                    }
                }
            }
            n += 1;
        }
        stage = Stage { rows: next };
    }
    // columns r = rho/2 in [0, M]
    let eta = euler_product_power(-spec.eta_power(), top as usize)?;
    let sparse: Vec<(usize, i128)> =
        eta.iter().enumerate().skip(1).filter(|x| *x.1 != 0).map(|(i, &v)| (i, v)).collect();
    let divide = spec.eta_power() < 0;
    let mut cols = vec![vec![0i128; n_top as usize + 1]; m as usize + 1];
    let mult = if divide { vec![] } else { euler_product_power(spec.eta_power(), top as usize)? };
    for r in 0..=m {
        let theta: Vec<i128> = (0..=top as usize)
            .map(|a| {
                let (lo, row) = &stage.rows[a];
                let j = 2 * r - lo;
                if j < 0 || j % 2 != 0 {
                    return 0;
                }
                row.get((j / 2) as usize).copied().unwrap_or(0) as i128
            })
            .collect();
        let col = &mut cols[r as usize];
        if divide {
            // F = Theta / prod(1-q^n)^|e|
            let mut f = vec![0i128; top as usize + 1];
            for a in 0..=top as usize {
                let mut s = theta[a];
                for &(j, h) in &sparse {
                    if j > a {
                        break;
                    }
                    s -= h * f[a - j];
                }
                f[a] = s;
            }
            for a in 0..=top as usize {
                col[a + ord as usize] = f[a];
            }
        } else {
            for a in 0..=top as usize {
                let mut s = 0i128;
                for j in 0..=a {
                    s += mult[j] * theta[a - j];
                }
                col[a + ord as usize] = s;
            }
        }
    }
    Ok(JacobiCoeffTable::from_columns(spec.weight, m, JacobiClass::Cusp, cols))
}
