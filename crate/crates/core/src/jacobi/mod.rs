//! Jacobi forms: theta blocks, their Fourier expansions, the index-raising
//! operators `V_m`, quotients of Jacobi forms and dimension formulas.

mod series;
mod table;
mod theta;

pub use series::{LaurentPoly, QZSeries};
pub use table::{apply_v, gcd, gcd3, isqrt, JacobiClass, JacobiCoeffTable, VmView};
pub(crate) use table::write_atomic;
pub use theta::{
    admissibility_defect, euler_product_power, expand_theta_block, theta_block_admissible,
    theta_block_table, ThetaBlockSpec,
};

use crate::{Error, Result};

/// `c(n, r)` of a stored form.
pub fn jacobi_coeff(tbl: &JacobiCoeffTable, n: i64, r: i64) -> Result<i128> {
    tbl.coeff(n, r)
}

/// Dimension of cusp forms on SL2(Z) of even weight `w`.
pub fn dim_cusp_sl2(w: i64) -> i64 {
    if w < 12 || w % 2 != 0 {
        return 0;
    }
    let base = w / 12 + if w % 12 == 2 { 0 } else { 1 };
    base - 1
}

/// Dimension of Jacobi cusp forms of weight 3 and index `m`:
/// `sum_{j=1}^{m-1} (dim S_{2+2j} - floor(j^2 / 4m))`.
pub fn dim_jacobi_cusp(k: i32, m: i64) -> Result<i64> {
    if k != 3 {
        return Err(Error::Precondition("only weight 3 is implemented".into()));
    }
    Ok((1..m).map(|j| dim_cusp_sl2(2 + 2 * j) - (j * j) / (4 * m)).sum())
}

/// Exact quotient of two Jacobi expansions up to `q^q_max`. The quotient is
/// computed row by row with exact Laurent division, so every coefficient is
/// determined and the division is certified by a zero remainder. When
/// `z_window` is given, coefficients with `|r|` beyond it must vanish.
pub fn weakly_holo_quotient(
    num: &QZSeries,
    den: &QZSeries,
    q_max: i64,
    z_window: Option<i64>,
) -> Result<QZSeries> {
    let mut q = num.div_exact(den)?;
    if q.prec < q_max {
        return Err(Error::Precondition(format!(
            "inputs only determine the quotient to q^{}, asked for q^{q_max}",
            q.prec
        )));
    }
    q.truncate(q_max);
    if let Some(w) = z_window {
        for (n, row) in q.rows() {
            if row.lo().is_some_and(|lo| lo < -w) || row.hi().is_some_and(|hi| hi > w) {
                return Err(Error::Inconsistent(format!("row {n} exceeds the zeta window {w}")));
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_dims() {
        let d: Vec<i64> = (2..=26).step_by(2).map(dim_cusp_sl2).collect();
        assert_eq!(d, vec![0, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1, 2, 1]);
    }

    #[test]
    fn jacobi_dims() {
        assert_eq!(dim_jacobi_cusp(3, 61).unwrap(), 6);
        assert_eq!(dim_jacobi_cusp(3, 73).unwrap(), 8);
        assert_eq!(dim_jacobi_cusp(3, 79).unwrap(), 7);
    }

    #[test]
    fn admissibility_examples() {
        let ok = ThetaBlockSpec::new(3, vec![2, 2, 2, 3, 3, 3, 3, 5, 7]);
        assert!(theta_block_admissible(&ok));
        assert_eq!(ok.index(), 61);
        assert!(!theta_block_admissible(&ThetaBlockSpec::new(3, vec![1, 1, 1, 1, 1, 1, 1, 1])));
    }

    #[test]
    fn fast_table_matches_direct_product() {
        let spec = ThetaBlockSpec::new(3, vec![2, 2, 2, 3, 3, 3, 3, 5, 7]);
        let direct = expand_theta_block(&spec, 12).unwrap();
        let tbl = theta_block_table(&spec, 4 * 61 * 12 - 61 * 61).unwrap();
        for n in 0..=12 {
            for r in -40..=40 {
                let d = 4 * n * 61 - r * r;
                if d <= tbl.d_max() {
                    assert_eq!(tbl.coeff(n, r).unwrap(), direct.coeff(n, r), "c({n},{r})");
                }
            }
        }
    }

    #[test]
    fn leading_coefficient_is_product_of_theta_leads() {
        let spec = ThetaBlockSpec::new(3, vec![1, 2, 3, 3, 3, 3, 4, 4, 7]);
        let s = expand_theta_block(&spec, 3).unwrap();
        // q^1 row is prod (zeta^{d/2} - zeta^{-d/2})
        let mut lead = LaurentPoly::monomial(0, 1);
        for &d in &spec.d {
            lead = lead.mul(&LaurentPoly::from_terms([(d, 1), (-d, -1)])).unwrap();
        }
        let mut halved = vec![];
        for (e, v) in lead.terms() {
            halved.push((e / 2, v));
        }
        assert_eq!(s.row(1).cloned().unwrap(), LaurentPoly::from_terms(halved));
    }
}
