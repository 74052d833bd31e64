//! Restriction of paramodular forms and their Hecke images to modular
//! curves `tau -> X tau + Y`, and Hecke eigenvalues read off the restricted
//! eigenvalue equation over prime fields.

mod cosets;
mod eval;
mod ring;
mod series;

pub use cosets::{bad_prime_units, coset_sums, degree, plan, CosetSum, HeckeOp, RestrictionMatrix};
pub use eval::{zero_sym, EvalStats, Evaluator, FormExpr, QuotientPart, TermGroup};
pub use ring::{cyclotomic_poly, CoeffRing, Cyclotomic, Fl};
pub use series::{div_trunc, mul_trunc, valuation, PuiseuxSeries};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::exactcore::{crt_lift, inv_mod, mul_mod};
use crate::paramodular::LiftBasis;
use crate::{Error, Result};

/// `phi_s^* F` for each expression, integral exponents `0..=e_max`.
pub fn restrict<R: CoeffRing>(
    basis: &LiftBasis,
    exprs: &[FormExpr],
    s: &RestrictionMatrix,
    e_max: i64,
    ring: &R,
) -> Result<Vec<PuiseuxSeries<R::E>>> {
    let mut ev = Evaluator::new(basis, exprs)?;
    let g = TermGroup::single(s.sym(), zero_sym(), Ratio::from_integer(1), "s");
    Ok(ev.sum_groups(&[g], e_max, ring)?.into_iter().map(|c| PuiseuxSeries::new(1, c)).collect())
}

/// `phi_s^*(F | T)` at integral exponents, for each expression.
#[allow(clippy::too_many_arguments)]
pub fn hecke_restrict<R: CoeffRing>(
    basis: &LiftBasis,
    exprs: &[FormExpr],
    s: &RestrictionMatrix,
    p: i64,
    op: HeckeOp,
    weight: i64,
    e_max: i64,
    ring: &R,
    speedups: bool,
) -> Result<(Vec<Vec<R::E>>, EvalStats)> {
    let sums = coset_sums(s, p, weight, op)?;
    let mut ev = Evaluator::new(basis, exprs)?;
    let mut out = vec![vec![ring.zero(); e_max as usize + 1]; exprs.len()];
    for sum in &sums {
        // a speed-up whose terms have a vanishing divisor falls back to the
        // next one, then to the full index set
        let mut cands: Vec<&Vec<TermGroup>> = vec![];
        if speedups {
            cands.extend(sum.reduced.iter().map(|r| &r.1));
        }
        cands.push(&sum.full);
        let mut err = None;
        let mut done = false;
        for groups in cands {
            match ev.sum_groups(groups, e_max, ring) {
                Ok(part) => {
                    for (o, v) in out.iter_mut().zip(part) {
                        for (a, b) in o.iter_mut().zip(v) {
                            *a = ring.add(a, &b);
                        }
                    }
                    done = true;
                    break;
                }
                Err(e @ Error::Singular(_)) => err = Some(e),
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(err.unwrap());
        }
    }
    Ok((out, ev.stats))
}

/// Degree used in the eigenvalue bound. For `T(p)` at a bad prime the
/// coset decomposition has one representative more than the displayed
/// restriction sums, so the larger count is used.
pub fn bound_degree(s: &RestrictionMatrix, p: i64, op: HeckeOp, weight: i64) -> Result<usize> {
    let d = degree(&coset_sums(s, p, weight, op)?);
    Ok(if op == HeckeOp::T && s.level % p == 0 { d + 1 } else { d })
}

/// `|lambda| <= mu^(k-3) deg T`.
pub fn eigenvalue_bound(s: &RestrictionMatrix, p: i64, op: HeckeOp, weight: i64) -> Result<i128> {
    let sim = op.similitude(p) as i128;
    Ok(sim.pow((weight - 3).max(0) as u32) * bound_degree(s, p, op, weight)? as i128)
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenRun {
    pub level: i64,
    pub p: i64,
    pub operator: String,
    pub lambda: i128,
    pub s: RestrictionMatrix,
    pub primes: Vec<u64>,
    /// first exponent with invertible left side, then the cross-checks
    pub exponents: Vec<i64>,
    pub bound: i128,
    pub terms: usize,
    pub quotients: usize,
}

impl EigenRun {
    /// `N p operator lambda`
    pub fn tsv(&self) -> String {
        format!("{}\t{}\t{}\t{}", self.level, self.p, self.operator, self.lambda)
    }

    pub fn manifest(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Solve `lambda lhs = rhs` at `e0` and check it at every other exponent.
fn solve_scalar(ring: &Fl, lhs: &[u64], rhs: &[u64]) -> Result<Option<(u64, usize)>> {
    let Some(e0) = lhs.iter().position(|&x| x != 0) else { return Ok(None) };
    let lam = mul_mod(rhs[e0], inv_mod(lhs[e0], ring.l).unwrap(), ring.l);
    for (e, (&l, &r)) in lhs.iter().zip(rhs).enumerate() {
        if mul_mod(lam, l, ring.l) != r {
            return Err(Error::Inconsistent(format!(
                "eigenvalue equation fails at q^{e} mod {} (lambda = {} from q^{e0})",
                ring.l,
                ring.balanced(lam)
            )));
        }
    }
    Ok(Some((lam, e0)))
}

/// Hecke eigenvalue of the expression `f` by restriction, trying each `s`
/// of the pool until one gives a nonzero restriction. The equation is
/// checked at `checks` exponents past the first usable one, modulo two
/// primes, and the result CRT-lifted under the degree bound.
pub fn eigenvalue(
    basis: &LiftBasis,
    f: &FormExpr,
    pool: &[RestrictionMatrix],
    p: i64,
    op: HeckeOp,
    weight: i64,
    checks: usize,
) -> Result<EigenRun> {
    let mut last_err = None;
    for s in pool {
        match eigenvalue_at(basis, f, s, p, op, weight, checks) {
            Ok(Some(run)) => return Ok(run),
            Ok(None) => continue,
            Err(e @ Error::Singular(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Singular("the form restricts to zero under every s of the pool".into())))
}

fn eigenvalue_at(
    basis: &LiftBasis,
    f: &FormExpr,
    s: &RestrictionMatrix,
    p: i64,
    op: HeckeOp,
    weight: i64,
    checks: usize,
) -> Result<Option<EigenRun>> {
    let bound = eigenvalue_bound(s, p, op, weight)?;
    let min_l = (2 * bound as u64 + 3).max(1 << 30);
    let r1 = Fl::split(op.mu(p), min_l);
    let r2 = r1.next();
    // leading exponent of phi_s^* f, searched up to what the basis reaches
    let mut probe = 12;
    let e0 = loop {
        let lhs = match restrict(basis, std::slice::from_ref(f), s, probe, &r1) {
            Ok(mut v) => v.remove(0).coeffs,
            Err(Error::CacheMiss { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if let Some(e0) = lhs.iter().position(|&x| x != 0) {
            break e0;
        }
        probe *= 2;
    };
    let e_max = e0 as i64 + checks as i64;
    let mut residues = vec![];
    let mut terms = 0;
    let mut quotients = 0;
    let mut balanced = vec![];
    for ring in [&r1, &r2] {
        let lhs = restrict(basis, std::slice::from_ref(f), s, e_max, ring)?.remove(0).coeffs;
        let (rhs, stats) = hecke_restrict(basis, std::slice::from_ref(f), s, p, op, weight, e_max, ring, true)?;
        terms = stats.terms;
        quotients = stats.quotients;
        let Some((lam, e)) = solve_scalar(ring, &lhs, &rhs[0])? else { return Ok(None) };
        if e != e0 {
            return Err(Error::Inconsistent(format!("leading exponent differs modulo {}", ring.l)));
        }
        residues.push((BigInt::from(lam), ring.l));
        balanced.push(ring.balanced(lam));
    }
    if balanced[0] != balanced[1] {
        return Err(Error::Inconsistent(format!("eigenvalue residues disagree: {balanced:?}")));
    }
    let lambda = crt_lift(&residues, &BigInt::from(bound))?
        .to_i128()
        .ok_or(Error::Overflow("eigenvalue"))?;
    Ok(Some(EigenRun {
        level: s.level,
        p,
        operator: op.name(p),
        lambda,
        s: *s,
        primes: vec![r1.l, r2.l],
        exponents: (e0 as i64..=e_max).collect(),
        bound,
        terms,
        quotients,
    }))
}

/// Solve `A M = B` over `F_l` for `A` of full column rank; `None` if the
/// rank is deficient, error if the system is inconsistent.
pub fn solve_mod(a: &[Vec<u64>], b: &[Vec<u64>], l: u64) -> Result<Option<Vec<Vec<u64>>>> {
    let cols = a.first().map_or(0, |r| r.len());
    let bc = b.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<u64>> = a.iter().zip(b).map(|(x, y)| x.iter().chain(y).copied().collect()).collect();
    let mut piv_row = 0;
    for col in 0..cols {
        let Some(pr) = (piv_row..rows.len()).find(|&r| rows[r][col] != 0) else { return Ok(None) };
        rows.swap(piv_row, pr);
        let inv = inv_mod(rows[piv_row][col], l).unwrap();
        for x in rows[piv_row].iter_mut() {
            *x = mul_mod(*x, inv, l);
        }
        let pivot = rows[piv_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != piv_row && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + l - mul_mod(f, *y, l)) % l;
                }
            }
        }
        piv_row += 1;
    }
    if rows[cols..].iter().any(|r| r[cols..].iter().any(|&x| x != 0)) {
        return Err(Error::Inconsistent("restricted Hecke images are not in the span of the basis".into()));
    }
    Ok(Some(rows[..cols].iter().map(|r| r[cols..cols + bc].to_vec()).collect()))
}

/// Matrix `M` with `G[j] | T = sum_i M[i][j] G[i]` on the lift basis, from
/// the pooled restriction functionals modulo two primes.
pub fn hecke_matrix_on_lifts(
    basis: &LiftBasis,
    pool: &[RestrictionMatrix],
    p: i64,
    op: HeckeOp,
    weight: i64,
    e_max: i64,
) -> Result<(Vec<Vec<i128>>, Vec<u64>)> {
    let dim = basis.dim();
    let exprs: Vec<FormExpr> = (0..dim).map(|j| FormExpr::lift(j, dim)).collect();
    let r1 = Fl::split(op.mu(p), 1 << 30);
    let r2 = r1.next();
    let mut results = vec![];
    for ring in [&r1, &r2] {
        let mut a_rows = vec![];
        let mut b_rows = vec![];
        let mut solved = None;
        // once the rows have full rank, one more s overdetermines the system
        let mut extra = 1;
        for s in pool {
            let lhs = restrict(basis, &exprs, s, e_max, ring)?;
            let (rhs, _) = match hecke_restrict(basis, &exprs, s, p, op, weight, e_max, ring, true) {
                Ok(x) => x,
                Err(Error::CacheMiss { .. }) => continue,
                Err(e) => return Err(e),
            };
            for e in 0..=e_max as usize {
                a_rows.push((0..dim).map(|i| lhs[i].coeffs[e]).collect::<Vec<u64>>());
                b_rows.push((0..dim).map(|j| rhs[j][e]).collect::<Vec<u64>>());
            }
            if let Some(m) = solve_mod(&a_rows, &b_rows, ring.l)? {
                let full = solved.is_some();
                solved = Some(m);
                if full {
                    extra -= 1;
                    if extra == 0 {
                        break;
                    }
                }
            }
        }
        let m = solved.ok_or_else(|| Error::Singular("restriction functionals do not separate the basis".into()))?;
        results.push(m.iter().map(|r| r.iter().map(|&x| ring.balanced(x)).collect::<Vec<i128>>()).collect::<Vec<_>>());
    }
    if results[0] != results[1] {
        return Err(Error::Inconsistent("Hecke matrices disagree modulo the two primes".into()));
    }
    Ok((results.swap_remove(0), vec![r1.l, r2.l]))
}

/// Restrictions of lifts vanish to high order, so the matrix solve needs
/// exponents well past the first few.
pub const LIFT_MATRIX_EXPONENTS: i64 = 24;

/// `T(p)` (or another operator) on the lift basis for each prime, as
/// integer matrices keyed by `p`.
pub fn lift_hecke_matrices(
    basis: &LiftBasis,
    pool: &[RestrictionMatrix],
    primes: &[i64],
    op: HeckeOp,
) -> Result<BTreeMap<i64, Vec<Vec<i64>>>> {
    let mut out = BTreeMap::new();
    for &p in primes {
        let (m, _) = hecke_matrix_on_lifts(basis, pool, p, op, 3, LIFT_MATRIX_EXPONENTS)?;
        let m = m
            .iter()
            .map(|r| r.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow("Hecke matrix entry"))).collect())
            .collect::<Result<_>>()?;
        out.insert(p, m);
    }
    Ok(out)
}

/// The published `s` followed by forms `[[j N, b], [b, k]]`, `j, k <= 3`,
/// of small positive determinant.
pub fn default_pool(level: i64, published: Option<[i64; 3]>) -> Vec<RestrictionMatrix> {
    let mut out: Vec<RestrictionMatrix> = vec![];
    if let Some([a, b, c]) = published {
        if let Ok(s) = RestrictionMatrix::new(level, a, b, c) {
            out.push(s);
        }
    }
    // s = [[j N, b], [b, k]] with small positive determinant, smallest first
    let mut cands = vec![];
    for j in 1..=3i64 {
        for k in 1..=3i64 {
            let m = j * k * level;
            let b0 = ((m - 1) as f64).sqrt().floor() as i64;
            for b in (b0 - 2).max(0)..=b0 {
                if m - b * b > 0 {
                    cands.push((m - b * b, j + k, j * level, b, k * level));
                }
            }
        }
    }
    cands.sort();
    for (_, _, a, b, c) in cands {
        let s = RestrictionMatrix::new(level, a, b, c).unwrap();
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// One speed-up of one displayed sum, evaluated against its full index set.
#[derive(Clone, Debug, Serialize)]
pub struct SpeedupCheck {
    pub sum: String,
    pub speedup: String,
    pub full_terms: usize,
    pub reduced_terms: usize,
    /// `None` when the reduced set has a vanishing divisor
    pub agree: Option<bool>,
    pub nonzero: usize,
}

/// Evaluate every speed-up of every sum of `op` at `p` and compare it with
/// the full index set at integral exponents up to `e_max`.
#[allow(clippy::too_many_arguments)]
pub fn compare_speedups<R: CoeffRing>(
    basis: &LiftBasis,
    f: &FormExpr,
    s: &RestrictionMatrix,
    p: i64,
    op: HeckeOp,
    weight: i64,
    e_max: i64,
    ring: &R,
) -> Result<Vec<SpeedupCheck>> {
    let sums = coset_sums(s, p, weight, op)?;
    let exprs = std::slice::from_ref(f);
    let mut out = vec![];
    for sum in &sums {
        if sum.reduced.is_empty() {
            continue;
        }
        let full = Evaluator::new(basis, exprs)?.sum_groups(&sum.full, e_max, ring)?.remove(0);
        let nonzero = full.iter().filter(|x| **x != ring.zero()).count();
        for (name, groups) in &sum.reduced {
            let agree = match Evaluator::new(basis, exprs)?.sum_groups(groups, e_max, ring) {
                Ok(mut v) => Some(v.remove(0) == full),
                Err(Error::Singular(_)) => None,
                Err(e) => return Err(e),
            };
            out.push(SpeedupCheck {
                sum: sum.label.clone(),
                speedup: name.clone(),
                full_terms: sum.full.iter().map(|g| g.len()).sum(),
                reduced_terms: groups.iter().map(|g| g.len()).sum(),
                agree,
                nonzero,
            });
        }
    }
    Ok(out)
}
