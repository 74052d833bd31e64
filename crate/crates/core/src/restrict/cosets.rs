use num_rational::Ratio;

use super::eval::{zero_sym, TermGroup};
use crate::exactcore::{inv_mod, is_prime_u64};
use crate::paramodular::SymQ;
use crate::{Error, Result};

type Q = Ratio<i128>;

fn q(n: i128, d: i128) -> Q {
    Ratio::new(n, d)
}

fn qi(n: i128) -> Q {
    Ratio::from_integer(n)
}

fn sym(a: Q, b: Q, c: Q) -> SymQ {
    SymQ::from_ratios(a, b, c)
}

/// `s = [[a, b], [b, c/N]]`, paired with `t = (n, r, m)` as `a n + b r + c m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct RestrictionMatrix {
    pub level: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl RestrictionMatrix {
    pub fn new(level: i64, a: i64, b: i64, c: i64) -> Result<Self> {
        if a <= 0 || (a as i128) * (c as i128) <= (b as i128) * (b as i128) * level as i128 {
            return Err(Error::Precondition(format!("s = ({a}, {b}, {c}) is not positive definite at level {level}")));
        }
        Ok(RestrictionMatrix { level, a, b, c })
    }

    pub fn sym(&self) -> SymQ {
        let n = self.level as i128;
        SymQ::new(self.a as i128 * n, self.b as i128 * n, self.c as i128, n)
    }

    /// `[[a/p, b], [b, p c/N]]`
    pub fn check(&self, p: i64) -> SymQ {
        let (a, b, c, n, p) = self.parts(p);
        sym(q(a, p), qi(b), q(p * c, n))
    }

    /// `[[p a, b], [b, c/(p N)]]`
    pub fn hat(&self, p: i64) -> SymQ {
        let (a, b, c, n, p) = self.parts(p);
        sym(qi(p * a), qi(b), q(c, p * n))
    }

    fn parts(&self, p: i64) -> (i128, i128, i128, i128, i128) {
        (self.a as i128, self.b as i128, self.c as i128, self.level as i128, p as i128)
    }

    /// Smallest `e` of the pairing.
    pub fn pair(&self, n: i64, r: i64, m: i64) -> i128 {
        self.a as i128 * n as i128 + self.b as i128 * r as i128 + self.c as i128 * m as i128
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum HeckeOp {
    /// `T(p)`
    T,
    /// `T_1(p^2)`, for `p` not dividing `N`
    T1,
    /// `T_{0,1}(p^2)`, for `p` exactly dividing `N`
    T01,
}

impl HeckeOp {
    pub fn name(&self, p: i64) -> String {
        match self {
            HeckeOp::T => format!("T({p})"),
            HeckeOp::T1 => format!("T1({}^2)", p),
            HeckeOp::T01 => format!("T01({}^2)", p),
        }
    }

    /// Order of the roots of unity in the phases.
    pub fn mu(&self, p: i64) -> u64 {
        match self {
            HeckeOp::T => p as u64,
            _ => (p * p) as u64,
        }
    }

    /// Similitude of the cosets.
    pub fn similitude(&self, p: i64) -> i64 {
        match self {
            HeckeOp::T => p,
            _ => p * p,
        }
    }
}

/// One displayed sum of the restriction formula, with the reduced index
/// sets available under the speed-up hypotheses that hold.
#[derive(Clone, Debug)]
pub struct CosetSum {
    pub label: String,
    pub full: Vec<TermGroup>,
    /// `(speed-up name, groups)`
    pub reduced: Vec<(String, Vec<TermGroup>)>,
}

impl CosetSum {
    fn plain(label: &str, full: Vec<TermGroup>) -> Self {
        CosetSum { label: label.to_string(), full, reduced: vec![] }
    }

    pub fn term_count(&self) -> usize {
        self.full.iter().map(|g| g.len()).sum()
    }
}

fn all(n: i64) -> Vec<i64> {
    (0..n).collect()
}

fn nonzero(n: i64) -> Vec<i64> {
    (1..n).collect()
}

fn group(x: SymQ, y0: SymQ, gens: Vec<(SymQ, Vec<i64>)>, scale: Q, tag: String) -> TermGroup {
    TermGroup { x, y0, gens, scale, tag }
}

fn pw(p: i64, e: i64) -> Q {
    if e >= 0 {
        qi((p as i128).pow(e as u32))
    } else {
        q(1, (p as i128).pow((-e) as u32))
    }
}

fn check_prime(s: &RestrictionMatrix, p: i64, op: HeckeOp) -> Result<bool> {
    if p < 2 || !is_prime_u64(p as u64) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let bad = s.level % p == 0;
    if bad && (s.level / p) % p == 0 {
        return Err(Error::Precondition(format!("{p}^2 divides the level")));
    }
    match (op, bad) {
        (HeckeOp::T1, true) => Err(Error::Precondition(format!("T1(p^2) is for p not dividing N, got p = {p}"))),
        (HeckeOp::T01, false) => Err(Error::Precondition(format!("T01(p^2) is for p dividing N, got p = {p}"))),
        _ => Ok(bad),
    }
}

/// The displayed sums for `phi_s^*(f | T)` in weight `k`.
pub fn coset_sums(s: &RestrictionMatrix, p: i64, k: i64, op: HeckeOp) -> Result<Vec<CosetSum>> {
    if check_prime(s, p, op)? {
        bad_sums(s, p, k, op)
    } else {
        good_sums(s, p, k, op)
    }
}

fn good_sums(s: &RestrictionMatrix, p: i64, k: i64, op: HeckeOp) -> Result<Vec<CosetSum>> {
    let (a, b, c, n, pp) = s.parts(p);
    let ss = s.sym();
    let chk = s.check(p);
    let hat = s.hat(p);
    // t_{ijk} = [[i/p, j/p], [j/p, k/p]], u_{ijk} = [[i/p^2, j/p], [j/p, k/p^2]]
    let t = |i: i128, j: i128, kk: i128| sym(q(i, pp), q(j, pp), q(kk, pp));
    let u = |i: i128, j: i128, kk: i128| sym(q(i, pp * pp), q(j, pp), q(kk, pp * pp));
    let v = |i: i128| sym(qi(0), qi(i * a), q(i * (i * a + 2 * b), pp));
    let d_ok = |i: i128| (c + i * (i * a + 2 * b) * n).rem_euclid(pp) != 0;
    let z = zero_sym();
    let mut out = vec![];
    match op {
        HeckeOp::T => {
            out.push(CosetSum::plain(
                "p s",
                vec![TermGroup::single(ss.scale(pp, 1), z, pw(p, 2 * k - 3), "p s")],
            ));
            let mut sum = CosetSum::plain(
                "check s + t_i00",
                vec![group(chk, z, vec![(t(1, 0, 0), all(p))], pw(p, k - 3), "check".into())],
            );
            if a % pp != 0 {
                sum.reduced.push(("a".into(), vec![TermGroup::single(chk, z, pw(p, k - 2), "check (a)")]));
            }
            out.push(sum);
            let mut full = vec![];
            let mut red = vec![];
            for i in 0..pp {
                let x = hat.add(&v(i));
                let g = group(x, z, vec![(t(0, 0, 1), all(p))], pw(p, k - 3), format!("hat+v_{i}"));
                full.push(g.clone());
                red.push(if d_ok(i) { TermGroup::single(x, z, pw(p, k - 2), format!("hat+v_{i} (d)")) } else { g });
            }
            out.push(CosetSum { label: "hat s + v_i + t_00k".into(), full, reduced: vec![("d".into(), red)] });
            out.push(s_over_p_sum(&ss, p, pw(p, -3), t, a, b, c));
        }
        HeckeOp::T1 => {
            out.push(CosetSum::plain(
                "p check s",
                vec![TermGroup::single(chk.scale(pp, 1), z, pw(p, 3 * k - 6), "p check")],
            ));
            out.push(CosetSum::plain(
                "p (hat s + v_i)",
                (0..pp)
                    .map(|i| TermGroup::single(hat.add(&v(i)).scale(pp, 1), z, pw(p, 3 * k - 6), format!("p(hat+v_{i})")))
                    .collect(),
            ));
            out.push(CosetSum::plain(
                "s + t_i00",
                vec![group(ss, z, vec![(t(1, 0, 0), nonzero(p))], pw(p, 2 * k - 6), "s+t_i00".into())],
            ));
            out.push(CosetSum::plain(
                "s + j t_(i^2,i,1)",
                (0..pp)
                    .map(|i| group(ss, z, vec![(t(i * i, i, 1), nonzero(p))], pw(p, 2 * k - 6), format!("s+j t_{i}")))
                    .collect(),
            ));
            let x = chk.scale(1, pp);
            let mut sum = CosetSum::plain(
                "check s / p + u_ij0",
                vec![group(x, z, vec![(u(1, 0, 0), all(p * p)), (u(0, 1, 0), all(p))], pw(p, k - 6), "check/p".into())],
            );
            if a % pp != 0 {
                sum.reduced.push((
                    "a".into(),
                    vec![group(x, z, vec![(u(0, 1, 0), all(p))], pw(p, k - 4), "check/p (a)".into())],
                ));
            }
            if b % pp != 0 {
                sum.reduced.push((
                    "b".into(),
                    vec![group(x, z, vec![(u(1, 0, 0), all(p * p))], pw(p, k - 5), "check/p (b)".into())],
                ));
            }
            out.push(sum);
            let mut full = vec![];
            let mut red = vec![];
            for i in 0..pp {
                let x = hat.add(&v(i)).scale(1, pp);
                let g = group(
                    x,
                    z,
                    vec![(u(0, 1, 0), all(p)), (u(0, 0, 1), all(p * p))],
                    pw(p, k - 6),
                    format!("(hat+v_{i})/p"),
                );
                full.push(g.clone());
                red.push(if d_ok(i) {
                    group(x, z, vec![(u(0, 1, 0), all(p))], pw(p, k - 4), format!("(hat+v_{i})/p (d)"))
                } else {
                    g
                });
            }
            out.push(CosetSum { label: "(hat s + v_i)/p + u_0jk".into(), full, reduced: vec![("d".into(), red)] });
        }
        HeckeOp::T01 => unreachable!(),
    }
    Ok(out)
}

/// `scale * sum_{i,j,k mod p} f(s tau / p + t_ijk)` with speed-ups (a)-(c).
fn s_over_p_sum<F>(ss: &SymQ, p: i64, scale: Q, t: F, a: i128, b: i128, c: i128) -> CosetSum
where
    F: Fn(i128, i128, i128) -> SymQ,
{
    let pp = p as i128;
    let x = ss.scale(1, pp);
    let full = (0..pp)
        .map(|i| group(x, t(i, 0, 0), vec![(t(0, 1, 0), all(p)), (t(0, 0, 1), all(p))], scale, format!("s/p i={i}")))
        .collect();
    let mut sum = CosetSum { label: "s/p + t_ijk".into(), full, reduced: vec![] };
    let red = scale * qi(pp);
    let z = zero_sym();
    if a % pp != 0 {
        sum.reduced.push(("a".into(), vec![group(x, z, vec![(t(0, 1, 0), all(p)), (t(0, 0, 1), all(p))], red, "s/p (a)".into())]));
    }
    if b % pp != 0 {
        sum.reduced.push(("b".into(), vec![group(x, z, vec![(t(1, 0, 0), all(p)), (t(0, 0, 1), all(p))], red, "s/p (b)".into())]));
    }
    if c % pp != 0 {
        sum.reduced.push(("c".into(), vec![group(x, z, vec![(t(1, 0, 0), all(p)), (t(0, 1, 0), all(p))], red, "s/p (c)".into())]));
    }
    sum
}

/// `(a_hat, c_hat)` with `a_hat p + c_hat N/p = 1`.
pub fn bad_prime_units(level: i64, p: i64) -> (i128, i128) {
    let np = (level / p) as i128;
    let pp = p as i128;
    let ch = inv_mod(np.rem_euclid(pp) as u64, p as u64).expect("p exactly divides N") as i128;
    ((1 - ch * np) / pp, ch)
}

fn bad_sums(s: &RestrictionMatrix, p: i64, k: i64, op: HeckeOp) -> Result<Vec<CosetSum>> {
    let (a, b, c, n, pp) = s.parts(p);
    let ss = s.sym();
    let chk = s.check(p);
    let hat = s.hat(p);
    let (ah, ch) = bad_prime_units(s.level, p);
    // t_{ijk} = [[i/p, j/p], [j/p, k/p^2]], u_{ijk} = [[i/p, j/p], [j/p, k/p^3]]
    let t = |i: i128, j: i128, kk: i128| sym(q(i, pp), q(j, pp), q(kk, pp * pp));
    let u = |i: i128, j: i128, kk: i128| sym(q(i, pp), q(j, pp), q(kk, pp * pp * pp));
    let v = |i: i128| sym(qi(0), qi(i * a), q(i * (i * a + 2 * b), pp));
    let w = |j: i128| sym(q(j * (-2 * b + j * c) * n, pp), qi(-j * c), qi(0));
    let z = zero_sym();
    let mut out = vec![];
    match op {
        HeckeOp::T => {
            out.push(s_over_p_sum(&ss, p, pw(p, -3), t, a, b, c));
            let mut full = vec![];
            let mut red = vec![];
            for i in 0..pp {
                let x = hat.add(&v(i));
                full.push(group(x, z, vec![(t(0, 0, 1), all(p))], pw(p, k - 3), format!("hat+v_{i}")));
                red.push(TermGroup::single(x, z, pw(p, k - 2), format!("hat+v_{i} (c)")));
            }
            let mut sum = CosetSum::plain("hat s + v_i + t_00k", full);
            if c % pp != 0 {
                sum.reduced.push(("c".into(), red));
            }
            out.push(sum);
            let mut full = vec![];
            let mut red = vec![];
            for j in 0..pp {
                let x = chk.add(&w(j));
                full.push(group(x, z, vec![(t(1, 0, 0), all(p))], pw(p, k - 3), format!("check+w_{j}")));
                red.push(TermGroup::single(x, z, pw(p, k - 2), format!("check+w_{j} (a)")));
            }
            let mut sum = CosetSum::plain("check s + w_j + t_i00", full);
            if a % pp != 0 {
                sum.reduced.push(("a".into(), red));
            }
            out.push(sum);
            let x = sym(
                q(-2 * b * n * pp + c * n + a * pp * pp, pp),
                q(b * pp - ah * c * pp + a * ch * pp - 2 * b * ch * n, pp),
                q(-ah * c * ch * n + a * ch * ch * n + ah * c * pp + 2 * ah * b * ch * n * pp, n * pp),
            );
            out.push(CosetSum::plain(
                "special + t_0j0",
                vec![group(x, z, vec![(t(0, 1, 0), nonzero(p))], pw(p, k - 3), "special".into())],
            ));
            out.push(CosetSum::plain(
                "p s",
                vec![TermGroup::single(ss.scale(pp, 1), z, pw(p, 2 * k - 3), "p s")],
            ));
        }
        HeckeOp::T01 => {
            let mut full = vec![];
            let mut red_c = vec![];
            let mut red_d = vec![];
            for i in 0..pp {
                let x = hat.add(&v(i)).scale(1, pp);
                let g = group(
                    x,
                    z,
                    vec![(u(0, 1, 0), all(p)), (u(0, 0, 1), all(p * p))],
                    pw(p, k - 6),
                    format!("(hat+v_{i})/p"),
                );
                full.push(g.clone());
                red_c.push(group(x, z, vec![(u(0, 1, 0), all(p))], pw(p, k - 4), format!("(hat+v_{i})/p (c)")));
                red_d.push(if (i * a + b).rem_euclid(pp) != 0 {
                    group(x, z, vec![(u(0, 0, 1), all(p * p))], pw(p, k - 5), format!("(hat+v_{i})/p (d)"))
                } else {
                    g
                });
            }
            let mut sum = CosetSum::plain("(hat s + v_i)/p + u_0jk", full);
            if c % pp != 0 {
                sum.reduced.push(("c".into(), red_c));
            }
            sum.reduced.push(("d".into(), red_d));
            out.push(sum);
            let mj = |j: i128| {
                let e12 = q(a * ch - 2 * b * ch * j * n + c * ch * j * j * n - c * j * pp, pp);
                let e22 = q(
                    a * ch * ch - 2 * b * ch * ch * j * n + c * ch * ch * j * j * n + 2 * b * ch * pp - 2 * c * ch * j * pp,
                    pp * pp,
                );
                sym(qi(j * (c * j - 2 * b) * n), e12, e22)
            };
            out.push(CosetSum::plain(
                "s + M_j + t_0i0",
                (0..pp)
                    .map(|j| group(ss.add(&mj(j)), z, vec![(t(0, 1, 0), nonzero(p))], pw(p, 2 * k - 6), format!("s+M_{j}")))
                    .collect(),
            ));
            out.push(CosetSum::plain(
                "p (check s + w_j)",
                (0..pp)
                    .map(|j| TermGroup::single(chk.add(&w(j)).scale(pp, 1), z, pw(p, 3 * k - 6), format!("p(check+w_{j})")))
                    .collect(),
            ));
            let mij = |i: i128, j: i128| {
                let e12 = q(-a * i + 2 * b * i * j * n - c * i * j * j * n - c * j * pp, pp);
                let e22 = q(
                    a * i * i - 2 * b * i * i * j * n + c * i * i * j * j * n - 2 * b * i * pp + 2 * c * i * j * pp,
                    pp * pp,
                );
                sym(qi(j * (-2 * b + c * j) * n), e12, e22)
            };
            let mut groups = vec![];
            for i in 0..pp {
                for j in 0..pp {
                    groups.push(group(
                        ss.add(&mij(i, j)),
                        z,
                        vec![(t(0, 0, 1), nonzero(p))],
                        pw(p, 2 * k - 6),
                        format!("s+M'_{i},{j}"),
                    ));
                }
            }
            out.push(CosetSum::plain("s + M'_ij + t_00k", groups));
        }
        HeckeOp::T1 => unreachable!(),
    }
    Ok(out)
}

/// The groups to evaluate: the first applicable speed-up of each sum when
/// `speedups` is set, the full index sets otherwise.
pub fn plan(sums: &[CosetSum], speedups: bool) -> Vec<TermGroup> {
    let mut out = vec![];
    for s in sums {
        match s.reduced.first() {
            Some((_, g)) if speedups => out.extend(g.iter().cloned()),
            _ => out.extend(s.full.iter().cloned()),
        }
    }
    out
}

/// Number of cosets represented by the displayed sums.
pub fn degree(sums: &[CosetSum]) -> usize {
    sums.iter().map(|s| s.term_count()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units() {
        assert_eq!(bad_prime_units(61, 61), (0, 1));
        let (a, c) = bad_prime_units(122, 61);
        assert_eq!(a * 61 + c * 2, 1);
    }

    #[test]
    fn good_degrees() {
        let s = RestrictionMatrix::new(61, 122, 11, 61).unwrap();
        for p in [2, 3, 5] {
            let t = coset_sums(&s, p, 3, HeckeOp::T).unwrap();
            assert_eq!(degree(&t) as i64, (p + 1) * (p * p + 1));
            let t1 = coset_sums(&s, p, 3, HeckeOp::T1).unwrap();
            assert_eq!(degree(&t1) as i64, p * (p + 1) * (p * p + 1));
        }
    }

    #[test]
    fn bad_degrees() {
        let s = RestrictionMatrix::new(61, 122, 11, 61).unwrap();
        let p = 61;
        assert_eq!(degree(&coset_sums(&s, p, 3, HeckeOp::T).unwrap()) as i64, p * p * p + 2 * p * p + p);
        assert_eq!(degree(&coset_sums(&s, p, 3, HeckeOp::T01).unwrap()) as i64, p * p * p * p + p * p * p);
    }

    #[test]
    fn all_term_matrices_are_positive_definite() {
        for (n, a, b, c) in [(61, 122, 11, 61), (73, 146, 17, 146), (79, 158, 47, 1106), (61, 13, 2, 19)] {
            let s = RestrictionMatrix::new(n, a, b, c).unwrap();
            for (p, op) in [(2, HeckeOp::T), (3, HeckeOp::T1), (n, HeckeOp::T), (n, HeckeOp::T01)] {
                for sum in coset_sums(&s, p, 3, op).unwrap() {
                    for g in &sum.full {
                        assert!(g.x.is_positive_definite(), "{} {:?}", g.tag, g.x);
                    }
                }
            }
        }
    }
}
