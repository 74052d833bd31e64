use super::ParamodularIndex;
use crate::exactcore::{inv_mod, is_prime_u64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BadOperator {
    /// `T(p)`
    Tp,
    /// `T_{0,1}(p^2)`
    T01,
}

/// `(1/den) t[U]` for an integral matrix `U = [[u11, u12], [u21, u22]]`,
/// as an index `(n, r, m)` if it is one (integral `n`, `r`, and `m`).
pub fn transform_index(level: i64, t: ParamodularIndex, u: [[i128; 2]; 2], den: i128) -> Option<ParamodularIndex> {
    // 2t = [[2n, r], [r, 2mN]]
    let tt = [[2 * t.n as i128, t.r as i128], [t.r as i128, 2 * (t.m * level) as i128]];
    let mut tu = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            tu[i][j] = tt[i][0] * u[0][j] + tt[i][1] * u[1][j];
        }
    }
    let mut s = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = u[0][i] * tu[0][j] + u[1][i] * tu[1][j];
        }
    }
    // 2 t' = s / den
    if s[0][0] % (2 * den) != 0 || s[0][1] % den != 0 || s[1][1] % (2 * den * level as i128) != 0 {
        return None;
    }
    Some(ParamodularIndex::new(
        (s[0][0] / (2 * den)) as i64,
        (s[0][1] / den) as i64,
        (s[1][1] / (2 * den * level as i128)) as i64,
    ))
}

/// The `t`-th coefficient of `f | T` for a prime `p` exactly dividing `N`,
/// where `coeff(n, r, m)` supplies the coefficients of `f` (weight `k >= 3`).
/// Transformed indices that are not integral contribute nothing.
pub fn fc_action_bad_prime<F>(
    coeff: F,
    level: i64,
    weight: u32,
    p: i64,
    t: ParamodularIndex,
    op: BadOperator,
) -> Result<i128>
where
    F: Fn(i64, i64, i64) -> Result<i128>,
{
    if !is_prime_u64(p as u64) || level % p != 0 || (level / p) % p == 0 {
        return Err(Error::Precondition(format!("{p} must divide {level} exactly once")));
    }
    if weight < 3 {
        return Err(Error::Precondition("integral formulas need k >= 3".into()));
    }
    let k = weight as i128;
    let pp = p as i128;
    let nn = level as i128;
    let np = nn / pp;
    let mm = inv_mod(np.rem_euclid(pp) as u64, p as u64).unwrap() as i128;
    // a p - c N/p = 1
    let (a, c) = {
        let c = (-(inv_mod(np.rem_euclid(pp) as u64, p as u64).unwrap() as i128)).rem_euclid(pp);
        // a p = 1 + c N/p
        let num = 1 + c * np;
        debug_assert_eq!(num % pp, 0);
        (num / pp, c)
    };
    let pw = |e: i128| -> i128 { pp.pow(e as u32) };
    let get = |s: Option<ParamodularIndex>| -> Result<i128> {
        match s {
            Some(s) if s.in_cusp_support(level) => coeff(s.n, s.r, s.m),
            _ => Ok(0),
        }
    };
    let tr = |u: [[i128; 2]; 2], den: i128| transform_index(level, t, u, den);
    let r = t.r as i128;
    let mut acc = 0i128;
    match op {
        BadOperator::Tp => {
            acc += get(Some(ParamodularIndex::new(t.n * p, t.r * p, t.m * p)))?;
            for x in 0..pp {
                acc += pw(k - 2) * get(tr([[1, 0], [-x, pp]], pp))?;
            }
            for y in 0..pp {
                acc += pw(k - 2) * get(tr([[pp, nn * mm * y], [0, 1]], pp))?;
            }
            acc += pw(2 * k - 3) * get(tr([[1, 0], [0, 1]], pp))?;
            let w = if r.rem_euclid(pp) == 0 { pp - 1 } else { -1 };
            acc += pw(k - 3) * w * get(tr([[a * pp, nn], [c, pp]], pp))?;
        }
        BadOperator::T01 => {
            for x in 0..pp {
                acc += pw(k - 3) * get(tr([[1, 0], [-x, pp]], 1))?;
            }
            // u = [[1, NMy/p], [0, 1/p]] = U/p with U = [[p, NMy], [0, 1]]
            for y in 0..pp {
                acc += pw(3 * k - 6) * get(tr([[pp, nn * mm * y], [0, 1]], pp * pp))?;
            }
            // u = [[(cN + p + cNMy)/p, N + NMy], [c/p, 1]]
            let t22c = 2 * (t.m as i128) * nn * c;
            for y in 0..pp {
                debug_assert_eq!(t22c % pp, 0);
                let test = r * (1 + 2 * c * np + 2 * c * y) + t22c / pp;
                let w = if test.rem_euclid(pp) == 0 { pp - 1 } else { -1 };
                let u = [[c * nn + pp + c * nn * mm * y, pp * (nn + nn * mm * y)], [c, pp]];
                acc += pw(2 * k - 6) * w * get(tr(u, pp * pp))?;
            }
            // u = [[1 + NMxy/p, NMy], [x/p, 1]]
            for y in 0..pp {
                let test = r * mm * y + t.m as i128;
                let w = if test.rem_euclid(pp) == 0 { pp - 1 } else { -1 };
                for x in 0..pp {
                    let u = [[pp + nn * mm * x * y, pp * nn * mm * y], [x, pp]];
                    acc += pw(2 * k - 6) * w * get(tr(u, pp * pp))?;
                }
            }
        }
    }
    Ok(acc)
}
