use std::collections::HashMap;

use num_rational::Ratio;

use super::ring::CoeffRing;
use super::series::{div_trunc, mul_trunc, valuation, PuiseuxSeries};
use crate::paramodular::{enumerate_indices, LiftBasis, NonliftSpec, ParamodularIndex, SymQ};
use crate::{Error, Result};

/// `sum_j linear[j] G[j] + scale * A B / C` with `A, B, C` integer
/// combinations of the lifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormExpr {
    pub linear: Vec<i64>,
    pub quotient: Option<QuotientPart>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPart {
    pub scale: i64,
    pub num: [Vec<i64>; 2],
    pub den: Vec<i64>,
}

fn unit(j: usize, dim: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[j] = 1;
    v
}

impl FormExpr {
    pub fn linear(v: Vec<i64>) -> Self {
        FormExpr { linear: v, quotient: None }
    }

    pub fn lift(j: usize, dim: usize) -> Self {
        FormExpr::linear(unit(j, dim))
    }

    pub fn nonlift(spec: &NonliftSpec) -> Self {
        let dim = spec.linear.len();
        FormExpr {
            linear: spec.linear.clone(),
            quotient: Some(QuotientPart {
                scale: spec.scale,
                num: [unit(spec.num.0, dim), unit(spec.num.1, dim)],
                den: unit(spec.den, dim),
            }),
        }
    }
}

/// A family of terms `scale * f(X tau + Y)` sharing `X`, with
/// `Y = y0 + sum_g c_g gen_g` for `c_g` running over the listed values.
#[derive(Clone, Debug, PartialEq)]
pub struct TermGroup {
    pub x: SymQ,
    pub y0: SymQ,
    pub gens: Vec<(SymQ, Vec<i64>)>,
    pub scale: Ratio<i128>,
    pub tag: String,
}

pub fn zero_sym() -> SymQ {
    SymQ::new(0, 0, 0, 1)
}

impl TermGroup {
    pub fn single(x: SymQ, y: SymQ, scale: Ratio<i128>, tag: impl Into<String>) -> Self {
        TermGroup { x, y0: y, gens: vec![], scale, tag: tag.into() }
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.gens.iter().map(|g| g.1.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The individual terms `(X, Y)`.
    pub fn terms(&self) -> Vec<(SymQ, SymQ)> {
        let mut ys = vec![self.y0];
        for (g, vals) in &self.gens {
            ys = ys.iter().flat_map(|y| vals.iter().map(move |&c| y.add(&g.scale(c as i128, 1)))).collect();
        }
        ys.into_iter().map(|y| (self.x, y)).collect()
    }
}

/// `<X, t>` as `num / den` in lowest common terms over all `t`: returns
/// `(g, den / g)` where `g` divides every pairing numerator.
fn pairing_scale(level: i64, x: &SymQ) -> (i128, i128) {
    let mut g = crate::paramodular::gcd128(crate::paramodular::gcd128(x.a, x.b), x.c * level as i128);
    g = crate::paramodular::gcd128(g, x.den);
    if g == 0 {
        return (1, 1);
    }
    (g, x.den / g)
}

/// `j` with `e(<Y, t>) = zeta_mu^j`.
struct Phase {
    y: SymQ,
    g: i128,
    mult: i128,
    mu: i128,
}

impl Phase {
    fn new(level: i64, y: &SymQ, mu: u64) -> Result<Self> {
        if y.a == 0 && y.b == 0 && y.c == 0 {
            return Ok(Phase { y: *y, g: 1, mult: 0, mu: mu as i128 });
        }
        let (g, d) = pairing_scale(level, y);
        if mu as i128 % d != 0 {
            return Err(Error::Precondition(format!("<Y, t> has denominator {d}, which does not divide mu = {mu}")));
        }
        Ok(Phase { y: *y, g, mult: mu as i128 / d, mu: mu as i128 })
    }

    fn at(&self, level: i64, t: &ParamodularIndex) -> usize {
        if self.mult == 0 {
            return 0;
        }
        ((t.pair(level, &self.y) / self.g * self.mult).rem_euclid(self.mu)) as usize
    }
}

/// Evaluation context: the lift basis and the expressions being restricted.
pub struct Evaluator<'a> {
    basis: &'a LiftBasis,
    exprs: Vec<FormExpr>,
    channels: Vec<Vec<i64>>,
    /// per expression: linear channel and optional (A, B, C) channels
    layout: Vec<(usize, Option<(i64, usize, usize, usize)>)>,
    pub stats: EvalStats,
}

#[derive(Clone, Debug, Default)]
pub struct EvalStats {
    pub terms: usize,
    pub indices: usize,
    pub quotients: usize,
    pub skipped_groups: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(basis: &'a LiftBasis, exprs: &[FormExpr]) -> Result<Self> {
        let dim = basis.dim();
        let mut channels: Vec<Vec<i64>> = vec![];
        let mut chan = |v: &Vec<i64>| -> Result<usize> {
            if v.len() != dim {
                return Err(Error::Precondition(format!("combination of length {} for a basis of {dim}", v.len())));
            }
            Ok(match channels.iter().position(|c| c == v) {
                Some(i) => i,
                None => {
                    channels.push(v.clone());
                    channels.len() - 1
                }
            })
        };
        let mut layout = vec![];
        for e in exprs {
            let l = chan(&e.linear)?;
            let q = match &e.quotient {
                Some(q) => Some((q.scale, chan(&q.num[0])?, chan(&q.num[1])?, chan(&q.den)?)),
                None => None,
            };
            layout.push((l, q));
        }
        Ok(Evaluator { basis, exprs: exprs.to_vec(), channels, layout, stats: EvalStats::default() })
    }

    pub fn exprs(&self) -> &[FormExpr] {
        &self.exprs
    }

    fn has_quotient(&self) -> bool {
        self.layout.iter().any(|l| l.1.is_some())
    }

    /// Channel series of every term in a group, exact for exponent
    /// numerators `<= bound` (in units of `1/d`).
    #[allow(clippy::type_complexity)]
    fn group_series<R: CoeffRing>(
        &mut self,
        group: &TermGroup,
        ts: &[(usize, ParamodularIndex)],
        bound: usize,
        ring: &R,
    ) -> Result<Vec<Vec<Vec<R::E>>>> {
        let level = self.basis.level();
        let mu = ring.mu();
        let ph0 = Phase::new(level, &group.y0, mu)?;
        let phg: Vec<Phase> = group.gens.iter().map(|g| Phase::new(level, &g.0, mu)).collect::<Result<_>>()?;
        if phg.len() > 2 {
            return Err(Error::Precondition("at most two generators per term group".into()));
        }
        let size = (mu as usize).pow(phg.len() as u32);
        let nch = self.channels.len();
        let width = bound + 1;
        if size * width > 1 << 22 {
            return self.group_series_sparse(group, ts, bound, ring, &ph0, &phg);
        }
        let mut buckets = vec![vec![ring.zero(); width * size]; nch];
        let mut buf = vec![0i128; self.basis.dim()];
        for (e, t) in ts {
            self.basis.lift_coeffs_all(t.n, t.r, t.m, &mut buf)?;
            let j0 = ph0.at(level, t) as u64;
            let mut idx = 0;
            for (g, ph) in phg.iter().enumerate() {
                idx += ph.at(level, t) * (mu as usize).pow(g as u32);
            }
            for (c, ch) in self.channels.iter().enumerate() {
                let v: i128 = ch.iter().zip(&buf).map(|(a, b)| *a as i128 * b).sum();
                if v != 0 {
                    let slot = &mut buckets[c][e * size + idx];
                    *slot = ring.add_int_phase(slot, v, j0);
                }
            }
        }
        // per term: channel -> series
        let vals: Vec<&Vec<i64>> = group.gens.iter().map(|g| &g.1).collect();
        let mut out = vec![];
        match vals.len() {
            0 => out.push(buckets),
            1 => {
                let mu_us = mu as usize;
                for &c1 in vals[0] {
                    let mut per = vec![];
                    for b in &buckets {
                        let mut s = vec![ring.zero(); width];
                        for (e, se) in s.iter_mut().enumerate() {
                            let row = &b[e * mu_us..(e + 1) * mu_us];
                            for (phi, v) in row.iter().enumerate() {
                                if !ring.is_zero(v) {
                                    let w = ring.root_pow((c1.rem_euclid(mu as i64) as u64) * phi as u64);
                                    *se = ring.add(se, &ring.mul(v, &w));
                                }
                            }
                        }
                        per.push(s);
                    }
                    out.push(per);
                }
            }
            _ => {
                let m = mu as usize;
                for &c1 in vals[0] {
                    // tmp[ch][e * m + phi2]
                    let w1: Vec<R::E> = (0..m).map(|p1| ring.root_pow(c1.rem_euclid(mu as i64) as u64 * p1 as u64)).collect();
                    let mut tmp = vec![];
                    for b in &buckets {
                        let mut t = vec![ring.zero(); width * m];
                        for e in 0..width {
                            for p2 in 0..m {
                                let col: Vec<R::E> = (0..m).map(|p1| b[e * size + p1 + m * p2].clone()).collect();
                                if col.iter().any(|x| !ring.is_zero(x)) {
                                    t[e * m + p2] = ring.dot(&col, &w1);
                                }
                            }
                        }
                        tmp.push(t);
                    }
                    for &c2 in vals[1] {
                        let w2: Vec<R::E> =
                            (0..m).map(|p2| ring.root_pow(c2.rem_euclid(mu as i64) as u64 * p2 as u64)).collect();
                        let per: Vec<Vec<R::E>> = tmp
                            .iter()
                            .map(|t| (0..width).map(|e| ring.dot(&t[e * m..(e + 1) * m], &w2)).collect())
                            .collect();
                        out.push(per);
                    }
                }
            }
        }
        Ok(out)
    }

    /// As `group_series`, for phase spaces too large to tabulate densely:
    /// each term sums the nonzero `(exponent, phase)` buckets directly.
    #[allow(clippy::type_complexity)]
    fn group_series_sparse<R: CoeffRing>(
        &mut self,
        group: &TermGroup,
        ts: &[(usize, ParamodularIndex)],
        bound: usize,
        ring: &R,
        ph0: &Phase,
        phg: &[Phase],
    ) -> Result<Vec<Vec<Vec<R::E>>>> {
        let level = self.basis.level();
        let mu = ring.mu();
        let nch = self.channels.len();
        // (exponent, phase of y0, phases of the generators) -> channel values
        let mut buckets: HashMap<(usize, u64, Vec<u64>), Vec<i128>> = HashMap::new();
        let mut buf = vec![0i128; self.basis.dim()];
        for (e, t) in ts {
            self.basis.lift_coeffs_all(t.n, t.r, t.m, &mut buf)?;
            let key = (*e, ph0.at(level, t) as u64, phg.iter().map(|ph| ph.at(level, t) as u64).collect());
            let vals: Vec<i128> = self.channels.iter().map(|ch| ch.iter().zip(&buf).map(|(a, b)| *a as i128 * b).sum()).collect();
            if vals.iter().all(|&v| v == 0) {
                continue;
            }
            let slot = buckets.entry(key).or_insert_with(|| vec![0; nch]);
            for (s, v) in slot.iter_mut().zip(vals) {
                *s = s.checked_add(v).ok_or(Error::Overflow("restricted coefficient"))?;
            }
        }
        let mut combos: Vec<Vec<i64>> = vec![vec![]];
        for g in &group.gens {
            combos = combos.iter().flat_map(|c| g.1.iter().map(move |&v| [c.clone(), vec![v]].concat())).collect();
        }
        let mut out = vec![];
        for combo in combos {
            let mut per = vec![vec![ring.zero(); bound + 1]; nch];
            for ((e, j0, phis), vals) in &buckets {
                let mut j = *j0;
                for (c, phi) in combo.iter().zip(phis) {
                    j = (j + c.rem_euclid(mu as i64) as u64 * phi) % mu;
                }
                for (ch, &v) in vals.iter().enumerate() {
                    if v != 0 {
                        per[ch][*e] = ring.add_int_phase(&per[ch][*e], v, j);
                    }
                }
            }
            out.push(per);
        }
        Ok(out)
    }

    /// `sum_{terms} scale * f(X tau + Y)` at integral exponents `0..=e_max`,
    /// one vector per expression, added into `acc`.
    pub fn add_group<R: CoeffRing>(
        &mut self,
        group: &TermGroup,
        e_max: i64,
        ring: &R,
        acc: &mut [Vec<R::E>],
    ) -> Result<()> {
        let level = self.basis.level();
        if !group.x.is_positive_definite() {
            return Err(Error::Precondition(format!("X = {:?} is not positive definite", group.x)));
        }
        let (g, d) = pairing_scale(level, &group.x);
        let d = d as usize;
        let target = e_max as usize * d;
        let mut bound = target + if self.has_quotient() { d } else { 0 };
        let cap = 8 * (target + d);
        let mut doubling = false;
        let scale = ring
            .from_ratio(group.scale)
            .ok_or_else(|| Error::Precondition("term scale not invertible in the ring".into()))?;
        loop {
            let ts: Vec<(usize, ParamodularIndex)> = enumerate_indices(level, &group.x, bound as i128 * g)
                .into_iter()
                .map(|t| ((t.pair(level, &group.x) / g) as usize, t))
                .collect();
            if !ts.iter().any(|(e, _)| *e <= target) {
                self.stats.skipped_groups += 1;
                return Ok(());
            }
            let series = match self.group_series(group, &ts, bound, ring) {
                Ok(x) => x,
                // the divisor is still zero as far as the basis reaches
                Err(Error::CacheMiss { .. }) if doubling => {
                    return Err(Error::Singular(format!(
                        "denominator restricts to zero under X = {:?} (term {}) within the cached range",
                        group.x, group.tag
                    )))
                }
                Err(e) => return Err(e),
            };
            // required bound from the divisor valuations
            let mut need = bound;
            let mut missing = false;
            for per in &series {
                for &(_, q) in &self.layout {
                    if let Some((_, _, _, c)) = q {
                        match valuation(ring, &per[c]) {
                            Some(v) => need = need.max(target + v),
                            None => missing = true,
                        }
                    }
                }
            }
            if missing {
                if bound >= cap {
                    return Err(Error::Singular(format!(
                        "denominator restricts to zero under X = {:?} (term {}); choose another s",
                        group.x, group.tag
                    )));
                }
                bound = (2 * bound).min(cap);
                doubling = true;
                continue;
            }
            if need > bound {
                bound = need;
                continue;
            }
            self.stats.indices += ts.len();
            let mut local = vec![vec![ring.zero(); e_max as usize + 1]; self.layout.len()];
            for per in &series {
                self.stats.terms += 1;
                for (x, &(l, q)) in self.layout.iter().enumerate() {
                    let mut f: Vec<R::E> = per[l][..=target].to_vec();
                    if let Some((k, a, b, c)) = q {
                        let v = valuation(ring, &per[c]).unwrap();
                        let ab = mul_trunc(ring, &per[a], &per[b], target + v + 1);
                        let h = div_trunc(ring, &ab, &per[c][..target + v + 1], target + 1)?;
                        self.stats.quotients += 1;
                        let kk = ring.from_int(k as i128);
                        for (fi, hi) in f.iter_mut().zip(&h) {
                            *fi = ring.add(fi, &ring.mul(&kk, hi));
                        }
                    }
                    for (e, slot) in local[x].iter_mut().enumerate() {
                        *slot = ring.add(slot, &f[e * d]);
                    }
                }
            }
            for (a, l) in acc.iter_mut().zip(local) {
                for (s, v) in a.iter_mut().zip(l) {
                    *s = ring.add(s, &ring.mul(&scale, &v));
                }
            }
            return Ok(());
        }
    }

    /// Sum over several groups.
    pub fn sum_groups<R: CoeffRing>(&mut self, groups: &[TermGroup], e_max: i64, ring: &R) -> Result<Vec<Vec<R::E>>> {
        let mut acc = vec![vec![ring.zero(); e_max as usize + 1]; self.layout.len()];
        for g in groups {
            self.add_group(g, e_max, ring, &mut acc)?;
        }
        Ok(acc)
    }

    /// The single term `f(X tau + Y)` as a Puiseux series with exponents
    /// up to `e_max`, for linear expressions.
    pub fn term_series<R: CoeffRing>(&mut self, x: &SymQ, y: &SymQ, e_max: i64, ring: &R) -> Result<Vec<PuiseuxSeries<R::E>>> {
        if self.has_quotient() {
            return Err(Error::Precondition("term_series is for linear expressions".into()));
        }
        if !x.is_positive_definite() {
            return Err(Error::Precondition("X is not positive definite".into()));
        }
        let level = self.basis.level();
        let (g, d) = pairing_scale(level, x);
        let bound = e_max as usize * d as usize;
        let ts: Vec<(usize, ParamodularIndex)> = enumerate_indices(level, x, bound as i128 * g)
            .into_iter()
            .map(|t| ((t.pair(level, x) / g) as usize, t))
            .collect();
        let group = TermGroup::single(*x, *y, Ratio::from_integer(1), "term");
        let per = self.group_series(&group, &ts, bound, ring)?.pop().unwrap();
        Ok(self.layout.iter().map(|&(l, _)| PuiseuxSeries::new(d as i64, per[l].clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_enumerate_cartesian_products() {
        let x = SymQ::new(2, 1, 2, 1);
        let g = TermGroup {
            x,
            y0: zero_sym(),
            gens: vec![(SymQ::new(1, 0, 0, 3), vec![0, 1, 2]), (SymQ::new(0, 1, 0, 3), vec![1, 2])],
            scale: Ratio::from_integer(1),
            tag: "t".into(),
        };
        assert_eq!(g.len(), 6);
        assert_eq!(g.terms().len(), 6);
        assert!(g.terms().contains(&(x, SymQ::new(2, 2, 0, 3))));
    }

    #[test]
    fn phases_reduce_by_content() {
        // <Y, t> = k m N / p^2 with N = p is k m / p
        let y = SymQ::new(0, 0, 1, 61 * 61);
        let ph = Phase::new(61, &y, 61).unwrap();
        assert_eq!(ph.at(61, &ParamodularIndex::new(1, 0, 3)), 3);
        assert!(Phase::new(61, &SymQ::new(1, 0, 0, 61 * 61), 61).is_err());
    }
}
